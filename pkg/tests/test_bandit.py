from dataclasses import replace
from fractions import Fraction as F
from statistics import median

import pytest

from delegation.bandit import (
    ArmSpec,
    BanditConfig,
    analytic_arm_mean,
    convergence_experiment,
    run_bandit,
    scenario_bandit,
    ucb_radius,
    ucb_select,
)
from delegation.frames import Credence, StateSpace
from delegation.scoring import DecisionStrategy, Gamble, GambleDistribution

COIN = StateSpace(("heads", "tails"))


def coin_config(horizon, seed=0, left=(1, -1), right=(-1, 1), **kw):
    arms = []
    for name, pay in (("left", left), ("right", right)):
        g = Gamble(COIN, pay, name)
        arms.append(ArmSpec("self" if name == "left" else "delegate",
                            DecisionStrategy.fixed(COIN, [g], [name]), GambleDistribution(((g, 1),)), name))
    return BanditConfig(Credence.uniform(COIN), tuple(arms), horizon, seed, **kw)


# --------------------------------------------------------------------------
# selection rule


def test_ucb_examples():
    assert ucb_select([0, 0], [0.0, 0.0], 0) == 0
    assert ucb_select([1, 0], [5.0, 0.0], 1) == 1
    assert ucb_select([10, 1], [1.0, 1.0], 100) == 1
    assert ucb_select([500, 500], [2.0, 1.9], 1000) == 0
    assert ucb_select([5, 5], [1.0, 1.0], 50) == 0
    with pytest.raises(ValueError):
        ucb_select([1, 1], [0.0, 0.0], -1)


def test_radius_shapes():
    assert ucb_radius(0, 10) == float("inf")
    assert ucb_radius(4, 1) == 0.0
    assert ucb_radius(1, 100) > ucb_radius(2, 100)
    assert ucb_radius(1, 100, "textbook") < ucb_radius(1, 100)


def test_scale_widens_the_bonus():
    # a gap of 3 is decisive for the bare radius, not once the bonus is scaled by 10
    assert ucb_select([100, 10], [4.0, 1.0], 110) == 0
    assert ucb_select([100, 10], [4.0, 1.0], 110, scale=10.0) == 1


# --------------------------------------------------------------------------
# analytic means


def test_analytic_means():
    for name, want in (("reach", (F(2, 3), F(19, 10))), ("noisy-expert", (2, F(23, 12)))):
        cfg = scenario_bandit(name, 10)
        assert tuple(analytic_arm_mean(cfg.pi, a) for a in cfg.arms) == want
    shut = DecisionStrategy({}, default=False)
    cfg = scenario_bandit("reach", 10)
    assert analytic_arm_mean(cfg.pi, replace(cfg.arms[0], strategy=shut)) == 0


# --------------------------------------------------------------------------
# runs


def test_config_validation():
    with pytest.raises(ValueError):
        coin_config(1)
    with pytest.raises(ValueError):
        coin_config(10, exploration="greedy")
    cfg = coin_config(10)
    with pytest.raises(ValueError):
        BanditConfig(cfg.pi, cfg.arms[:1], 10)
    with pytest.raises(ValueError):
        ArmSpec("self", DecisionStrategy({}), GambleDistribution.empty())
    with pytest.raises(ValueError):
        scenario_bandit("lottery")


def test_horizon_equal_to_arm_count():
    res = run_bandit(coin_config(2))
    assert res.counts == (1, 1) and [e.arm for e in res.log] == [0, 1]


def test_single_state_is_deterministic():
    sp = StateSpace(("only",))
    arms = tuple(
        ArmSpec("self", DecisionStrategy({}, default=True), GambleDistribution(((Gamble(sp, (v,), "g"), 1),)))
        for v in (1, 3)
    )
    res = run_bandit(BanditConfig(Credence.uniform(sp), arms, 200))
    assert res.total_reward == sum(e.reward for e in res.log)
    assert res.means == (1.0, 3.0)
    assert res.regret == 2 * res.counts[0]


def test_same_seed_same_log():
    cfg = scenario_bandit("reach", 2000, seed=5)
    a, b = run_bandit(cfg), run_bandit(cfg)
    assert a.log == b.log and a == b
    assert run_bandit(replace(cfg, seed=6)).log != a.log


def test_log_accounting():
    cfg = scenario_bandit("noisy-expert", 3000, seed=2)
    res = run_bandit(cfg)
    assert sum(res.counts) == cfg.horizon == len(res.log)
    assert [e.t for e in res.log] == list(range(cfg.horizon))
    total = sum((e.reward for e in res.log), F(0))
    assert res.total_reward == total
    assert res.regret == cfg.horizon * max(res.analytic_means) - total
    for m, exact in zip(res.means, res.exact_means()):
        assert m == pytest.approx(float(exact), abs=1e-9)


def test_rewards_come_from_strategy_and_reach():
    cfg = scenario_bandit("reach", 500, seed=1)
    res = run_bandit(cfg)
    for e in res.log:
        arm = cfg.arms[e.arm]
        g = next(g for g in arm.mu.gambles if g.label == e.gamble)
        assert e.reward == (g.accepted_payoff(e.state) if arm.strategy(e.state, g) else 0)


def test_listing_regret():
    cfg = scenario_bandit("noisy-expert", 200, seed=0)
    res = run_bandit(cfg)
    last = max(e.t for e in res.log if e.arm == 0)
    assert res.log[last].arm == 0
    assert cfg.listing_offset == 6
    # offset minus a reward in {-5, 0, 3, 8}
    assert res.listing_regret in {11, 6, 3, -2}
    assert run_bandit(scenario_bandit("reach", 50)).listing_regret is None


def test_normalized_rewards_change_only_selection():
    cfg = scenario_bandit("reach", 1000, seed=4)
    a, b = run_bandit(cfg), run_bandit(replace(cfg, normalize_rewards=True))
    assert a.analytic_means == b.analytic_means
    assert [e.state for e in a.log] == [e.state for e in b.log]


def test_means_concentrate_with_horizon():
    # equal-mean arms keep both arms pulled, so both means get many samples
    gaps = {}
    for T in (1000, 30000):
        errs = []
        for seed in range(8):
            res = run_bandit(coin_config(T, seed, left=(1, -1), right=(2, -2)))
            errs.append(max(abs(m) for m in res.means))
        gaps[T] = median(errs)
    assert gaps[30000] < gaps[1000]


def test_convergence_experiment_summary():
    s = convergence_experiment(scenario_bandit("reach", 500), 5, keep_results=True)
    assert s.trials == 5 and len(s.results) == 5 and s.best_arm == 1 and not s.tie
    assert s.converged == sum(r.preferred_arm == 1 for r in s.results)
    tie = convergence_experiment(coin_config(100), 3)
    assert tie.tie and tie.best_arm is None and tie.converged == 0
    with pytest.raises(ValueError):
        convergence_experiment(coin_config(100), 0)


def test_better_arm_wins_on_easy_instance():
    s = convergence_experiment(coin_config(3000, left=(0, 0), right=(3, 1)), 10)
    assert s.best_arm == 1 and s.converged == 10
