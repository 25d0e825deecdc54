"""
Learning whom to delegate to
============================

Each round a box is drawn and the principal either opens from its own
reach or hands the choice to the agent. UCB learns which arm pays more.
"""

import numpy as np

from delegation.bandit import convergence_experiment, run_bandit, scenario_bandit

cfg = scenario_bandit("reach", horizon=10_000, seed=0)
res = run_bandit(cfg)
print("analytic arm means:", [str(m) for m in res.analytic_means])
print("pulls:", res.counts, "empirical means:", np.round(res.means, 3))
# Regret compares against expected rewards, so one lucky run can come out negative.
print("regret:", float(res.regret))

# A single unlucky first pull can lock the bonus-driven UCB onto the worse
# arm when rewards span a wide range. Scaling the bonus to that range fixes it.
for normalize in (False, True):
    c = scenario_bandit("reach", horizon=10_000, seed=0, normalize_rewards=normalize)
    s = convergence_experiment(c, 20)
    print(f"normalized={normalize}: delegate preferred in {s.converged}/{s.trials} runs, "
          f"mean regret {s.regret_mean:.1f}")

# Regret grows sublinearly: the delegate's share of pulls keeps rising with T.
for T in (1_000, 10_000, 100_000):
    r = run_bandit(scenario_bandit("reach", horizon=T, seed=1, normalize_rewards=True))
    print(f"T={T:>6}: regret {float(r.regret):8.1f}, delegate share {r.counts[1] / T:.3f}")
