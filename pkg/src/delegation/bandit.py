"""Repeated delegation as a stochastic multi-armed bandit, solved with UCB.

Each arm is a way of getting a box decided: open it yourself with your own
strategy and reach, or hand it to an agent with theirs. Every round a
state is drawn from the prior, the chosen arm draws a gamble from its own
reach, and the reward is the principal's payoff if the arm's strategy
accepts (0 otherwise).

Random draws use numpy's PCG64 generator. A run pre-draws every state and
every arm's gamble index up front, so the draws do not depend on which
arms UCB picks and a seed fully determines the log.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from statistics import mean, pstdev
from typing import Sequence

import numpy as np

from .frames import Credence
from .scoring import DecisionStrategy, GambleDistribution

__all__ = [
    "ArmSpec",
    "BanditConfig",
    "LogEntry",
    "BanditResult",
    "ConvergenceSummary",
    "analytic_arm_mean",
    "ucb_radius",
    "ucb_select",
    "run_bandit",
    "convergence_experiment",
    "scenario_bandit",
]


@dataclass(frozen=True)
class ArmSpec:
    kind: str  # "self" or "delegate"
    strategy: DecisionStrategy
    mu: GambleDistribution
    label: str = ""

    def __post_init__(self):
        if self.kind not in ("self", "delegate"):
            raise ValueError("arm kind must be 'self' or 'delegate'")
        if not self.mu.support:
            raise ValueError("an arm needs a non-empty gamble distribution")


@dataclass(frozen=True)
class BanditConfig:
    pi: Credence
    arms: tuple
    horizon: int
    seed: int = 0
    exploration: str = "listing"  # or "textbook"
    normalize_rewards: bool = False
    listing_offset: Fraction | None = None  # sum of the outcome set, for ``listing_regret``

    def __post_init__(self):
        arms = tuple(self.arms)
        if len(arms) < 2:
            raise ValueError("a bandit needs at least two arms")
        if self.horizon < len(arms):
            raise ValueError(f"horizon {self.horizon} is shorter than the {len(arms)} initial pulls")
        if self.exploration not in ("listing", "textbook"):
            raise ValueError("exploration must be 'listing' or 'textbook'")
        object.__setattr__(self, "arms", arms)


@dataclass(frozen=True)
class LogEntry:
    t: int
    arm: int
    state: object
    gamble: object
    reward: Fraction


@dataclass(frozen=True)
class BanditResult:
    counts: tuple
    means: tuple  # floating point, incremental
    total_reward: Fraction
    regret: Fraction
    analytic_means: tuple
    log: tuple = field(repr=False, default=())
    listing_regret: Fraction | None = None

    @property
    def preferred_arm(self) -> int:
        """Arm with the higher empirical mean, lowest index on ties."""
        return int(np.argmax(self.means))

    def exact_means(self) -> tuple:
        sums = [Fraction(0)] * len(self.counts)
        for e in self.log:
            sums[e.arm] += e.reward
        return tuple(s / c if c else None for s, c in zip(sums, self.counts))


def analytic_arm_mean(pi: Credence, arm: ArmSpec) -> Fraction:
    """Exact expected per-round reward of ``arm``."""
    total = Fraction(0)
    for s, p in zip(pi.space, pi.weights):
        if not p:
            continue
        for g, w in arm.mu.support:
            if arm.strategy(s, g):
                total += p * w * g.accepted_payoff(s)
    return total


def ucb_radius(count, t: int, exploration: str = "listing") -> float:
    """Exploration bonus; ``listing`` uses ``ln(1 + t ln(t)^2)``, ``textbook`` uses ``ln t``."""
    if count == 0:
        return math.inf
    if exploration == "listing":
        lt = math.log(t) if t > 0 else 0.0
        num = 2 * math.log(1 + t * lt * lt)
    else:
        num = 2 * math.log(t) if t > 1 else 0.0
    return math.sqrt(num / count)


def ucb_select(counts: Sequence, means: Sequence, t: int, exploration: str = "listing",
               scale: float = 1.0) -> int:
    """Arm ``t`` while ``t`` is below the arm count, then the highest upper bound (lowest index on ties).

    ``scale`` multiplies the exploration bonus; passing the reward range is
    the same as running UCB on rewards mapped affinely onto [0, 1].
    """
    n = len(counts)
    if t < 0:
        raise ValueError("t must be non-negative")
    if t < n:
        return t
    best, arm = -math.inf, 0
    for i, (c, m) in enumerate(zip(counts, means)):
        u = m + scale * ucb_radius(c, t, exploration)
        if u > best:
            best, arm = u, i
    return arm


def _sampler(rng: np.random.Generator, weights: Sequence[Fraction], size: int) -> np.ndarray:
    cdf = np.cumsum([float(w) for w in weights])
    cdf[-1] = 1.0
    return np.searchsorted(cdf, rng.random(size), side="right")


def run_bandit(cfg: BanditConfig) -> BanditResult:
    """Play ``cfg.horizon`` rounds of UCB over the configured arms.

    Regret is the standard cumulative one: horizon times the best analytic
    arm mean minus the realized total reward. With ``normalize_rewards``
    the exploration bonus is scaled by the spread of attainable rewards.
    """
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    T = cfg.horizon
    states = cfg.pi.space.states
    s_idx = _sampler(rng, cfg.pi.weights, T)
    g_idx = [_sampler(rng, [w for _, w in arm.mu.support], T) for arm in cfg.arms]

    # reward tables: arm -> (state index, gamble index) -> Fraction
    tables = []
    for arm in cfg.arms:
        gambles = [g for g, _ in arm.mu.support]
        tab = [
            [g.accepted_payoff(s) if arm.strategy(s, g) else Fraction(0) for g in gambles]
            for s in states
        ]
        tables.append(tab)
    ftables = [[[float(v) for v in row] for row in tab] for tab in tables]
    scale = 1.0
    if cfg.normalize_rewards:
        flat = [v for tab in ftables for row in tab for v in row]
        scale = (max(flat) - min(flat)) or 1.0

    n_arms = len(cfg.arms)
    counts = [0] * n_arms
    means = [0.0] * n_arms
    tally: dict = {}  # (arm, state index, gamble index) -> pulls; exact total at the end
    log = []
    gamble_labels = [[g.label for g, _ in arm.mu.support] for arm in cfg.arms]
    for t in range(T):
        if t < n_arms:
            a = t
        else:
            # same arithmetic as ucb_select, with the log term hoisted out of the arm loop
            if cfg.exploration == "listing":
                lt = math.log(t) if t > 0 else 0.0
                num = 2 * math.log(1 + t * lt * lt)
            else:
                num = 2 * math.log(t) if t > 1 else 0.0
            best, a = -math.inf, 0
            for i in range(n_arms):
                u = means[i] + scale * math.sqrt(num / counts[i])
                if u > best:
                    best, a = u, i
        si, gi = int(s_idx[t]), int(g_idx[a][t])
        counts[a] += 1
        n = counts[a]
        means[a] = ((n - 1) / n) * means[a] + (1 / n) * ftables[a][si][gi]
        key = (a, si, gi)
        tally[key] = tally.get(key, 0) + 1
        log.append(LogEntry(t, a, states[si], gamble_labels[a][gi], tables[a][si][gi]))
    total = sum((n * tables[a][si][gi] for (a, si, gi), n in tally.items()), Fraction(0))

    analytic = tuple(analytic_arm_mean(cfg.pi, arm) for arm in cfg.arms)
    regret = T * max(analytic) - total
    listing = None
    if cfg.listing_offset is not None:
        # The listing's quantity: outcome sum minus the best arm payoff seen
        # at the last round the first arm was pulled.
        last = max(e.t for e in log if e.arm == 0)
        si = int(s_idx[last])
        listing = cfg.listing_offset - max(tables[a][si][int(g_idx[a][last])] for a in range(n_arms))
    return BanditResult(tuple(counts), tuple(means), total, regret, analytic, tuple(log), listing)


@dataclass(frozen=True)
class ConvergenceSummary:
    trials: int
    best_arm: int | None  # None when the analytic optimum is not unique
    tie: bool
    converged: int  # trials whose preferred arm is the analytic best
    fraction: float
    regret_mean: float
    regret_std: float
    arm_diff_mean: float  # mean of (last arm mean - first arm mean)
    arm_diff_std: float
    results: tuple = field(repr=False, default=())


def convergence_experiment(cfg: BanditConfig, trials: int, keep_results: bool = False) -> ConvergenceSummary:
    """Repeat :func:`run_bandit` with seeds ``cfg.seed + i`` for ``i < trials``.

    When two arms share the best analytic mean there is no right answer;
    the summary flags ``tie`` and reports no convergence count.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    analytic = [analytic_arm_mean(cfg.pi, a) for a in cfg.arms]
    top = max(analytic)
    tie = analytic.count(top) > 1
    best = None if tie else analytic.index(top)
    results = []
    hits = 0
    for i in range(trials):
        res = run_bandit(replace(cfg, seed=cfg.seed + i))
        if best is not None and res.preferred_arm == best:
            hits += 1
        results.append(res)
    regrets = [float(r.regret) for r in results]
    diffs = [r.means[-1] - r.means[0] for r in results]
    return ConvergenceSummary(
        trials, best, tie, hits, hits / trials if best is not None else float("nan"),
        mean(regrets), pstdev(regrets), mean(diffs), pstdev(diffs),
        tuple(results) if keep_results else (),
    )


def scenario_bandit(name: str, horizon: int = 10_000, seed: int = 0, exploration: str = "listing",
                    appendix_e: bool = False, normalize_rewards: bool = False) -> BanditConfig:
    """Bandit config with a self arm and a delegate arm for a named scenario."""
    from .scenarios import build_misaligned_expert, build_noisy_expert, build_reach_scenario, noisy_expert_spec

    offset = None
    if name == "reach":
        sc = build_reach_scenario()
        arms = (ArmSpec("self", sc.strategy, sc.mu_self, "self"),
                ArmSpec("delegate", sc.strategy, sc.mu_delegate, "delegate"))
    elif name in ("noisy-expert", "misaligned-expert"):
        sc = build_noisy_expert(noisy_expert_spec(appendix_e)) if name == "noisy-expert" else build_misaligned_expert()
        arms = (ArmSpec("self", sc.principal, sc.mu_self, "self"),
                ArmSpec("delegate", sc.agent, sc.mu_delegate, "delegate"))
        offset = sum(sc.spec.outcomes, Fraction(0))
    else:
        raise ValueError(f"unknown scenario {name!r}")
    return BanditConfig(sc.pi, arms, horizon, seed, exploration, normalize_rewards, offset)
