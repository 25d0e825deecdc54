"""The three box-opening scenarios, compiled into scoring inputs.

``noisy-expert``
    The agent peeks at a value that is *not* in the box, then decides with
    a utility shifted by an unknown constant.
``misaligned-expert``
    Same peek, but the agent uses the signed square root utility and is
    paid a fee the principal only hands over on opened boxes.
``reach``
    Principal and agent share beliefs, values and rule; the agent simply
    has more boxes available.

Each builder returns the composite state space, the prior over it, the two
gamble distributions and the two strategies, plus the per-state table rows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import lcm
from typing import Mapping

from ._rational import as_fraction
from .frames import Credence, StateSpace
from .scoring import (
    DecisionStrategy,
    Gamble,
    GambleDistribution,
    ReachVerdict,
    ScoreConvention,
    delegation_criterion_reach,
)

__all__ = [
    "PeekAgentSpec",
    "PeekScenario",
    "PeekRow",
    "BoxSpec",
    "ReachScenarioSpec",
    "ReachScenario",
    "BoxRow",
    "Discrepancy",
    "ScenarioResult",
    "signed_sqrt",
    "agent_utility",
    "noisy_expert_spec",
    "misaligned_expert_spec",
    "reach_spec",
    "build_peek_scenario",
    "build_noisy_expert",
    "build_misaligned_expert",
    "build_reach_scenario",
    "run_scenario",
    "SCENARIOS",
]

UTILITIES = ("identity", "additive-shift", "signed-sqrt")


def _exact_sqrt(q: Fraction) -> Fraction | None:
    rn, rd = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if rn * rn == q.numerator and rd * rd == q.denominator:
        return Fraction(rn, rd)
    return None


def signed_sqrt(x) -> Fraction | float:
    """``x / sqrt(|x|)``; exact when ``|x|`` is a rational square, float otherwise."""
    x = as_fraction(x)
    if x == 0:
        return Fraction(0)
    r = _exact_sqrt(abs(x))
    if r is not None:
        return x / r
    return float(x) / math.sqrt(abs(float(x)))


def agent_utility(kind: str, x, shift=0):
    """Agent's utility of receiving ``x`` under the named transform.

    ``identity`` ignores ``shift``; ``additive-shift`` is ``x + shift``;
    ``signed-sqrt`` is ``signed_sqrt(x) + shift``.
    """
    if kind == "identity":
        return as_fraction(x)
    if kind == "additive-shift":
        return as_fraction(x) + as_fraction(shift)
    if kind == "signed-sqrt":
        return signed_sqrt(x) + as_fraction(shift)
    raise ValueError(f"unknown agent utility {kind!r}; expected one of {UTILITIES}")


# --------------------------------------------------------------------------
# Peek scenarios


@dataclass(frozen=True)
class PeekAgentSpec:
    """An agent that sees ``peek_count`` of the values *not* in the box.

    ``noise`` maps a tag to ``(shift, weight)``. ``fee`` is paid by the
    principal on accepted boxes only (``fee_mode="accepted"``) or folded
    into every delegated payoff (``fee_mode="always"``).
    """

    outcomes: tuple
    peek_count: int = 1
    noise: Mapping = field(default_factory=lambda: {"none": (0, 1)})
    agent_utility: str = "identity"
    fee: Fraction = Fraction(0)
    accept_on_tie: bool = True
    fee_mode: str = "accepted"

    def __post_init__(self):
        outs = tuple(as_fraction(v) for v in self.outcomes)
        if len(set(outs)) != len(outs):
            raise ValueError("outcomes must be distinct values")
        if not 0 <= self.peek_count < len(outs):
            raise ValueError("peek_count must be below the number of outcomes")
        noise = {t: (as_fraction(s), as_fraction(w)) for t, (s, w) in self.noise.items()}
        if sum(w for _, w in noise.values()) != 1 or any(w <= 0 for _, w in noise.values()):
            raise ValueError("noise weights must be positive and sum to 1")
        if self.agent_utility not in UTILITIES:
            raise ValueError(f"unknown agent utility {self.agent_utility!r}")
        if self.fee_mode not in ("accepted", "always"):
            raise ValueError("fee_mode must be 'accepted' or 'always'")
        object.__setattr__(self, "outcomes", outs)
        object.__setattr__(self, "noise", noise)
        object.__setattr__(self, "fee", as_fraction(self.fee))


@dataclass(frozen=True)
class PeekRow:
    true: Fraction
    peeked: tuple
    noise: object
    shift: Fraction
    belief: tuple
    eu: Fraction | float
    accepted: bool
    value: Fraction  # what the principal receives
    classification: str
    magnitude: Fraction


@dataclass(frozen=True)
class PeekScenario:
    spec: PeekAgentSpec
    space: StateSpace
    pi: Credence
    mu_self: GambleDistribution
    mu_delegate: GambleDistribution
    principal: DecisionStrategy
    agent: DecisionStrategy
    rows: tuple


def build_peek_scenario(spec: PeekAgentSpec) -> PeekScenario:
    """Compile a peek scenario onto states ``(true value, peeked values, noise tag)``.

    The prior is the product of a uniform box value, a uniform choice of
    which other values are peeked, and the noise weights. The principal
    opens iff the unconditional mean is non-negative; the agent opens iff
    the mean of its utility over the values it has not ruled out is
    non-negative (strictly positive when ``accept_on_tie`` is false).
    """
    outs = spec.outcomes
    n = len(outs)
    states, weights, info = [], [], []
    for x in outs:
        others = [o for o in outs if o != x]
        combos = list(combinations(others, spec.peek_count))
        for peeked in combos:
            for tag, (shift, w) in spec.noise.items():
                states.append((x, peeked, tag))
                weights.append(Fraction(1, n) / len(combos) * w)
                info.append((x, peeked, tag, shift))
    space = StateSpace(tuple(states))
    pi = Credence(space, weights)

    label = "box"
    own = Gamble(space, tuple(s[0] for s in states), label)
    if spec.fee_mode == "accepted":
        deleg = Gamble(space, own.payoffs, label, spec.fee)
    else:
        deleg = Gamble(space, tuple(v - spec.fee for v in own.payoffs), label)
    mu_self = GambleDistribution(((own, Fraction(1)),))
    mu_deleg = GambleDistribution(((deleg, Fraction(1)),))

    principal_opens = sum(outs) >= 0
    principal = DecisionStrategy({(s, label): principal_opens for s in states}, name="principal")

    decisions, rows = {}, []
    for s, (x, peeked, tag, shift) in zip(states, info):
        belief = tuple(o for o in outs if o not in peeked)
        eu = sum(agent_utility(spec.agent_utility, o, shift) for o in belief) / len(belief)
        acc = eu >= 0 if spec.accept_on_tie else eu > 0
        decisions[(s, label)] = bool(acc)
        if acc:
            v = deleg.accepted_payoff(s)
            cls, mag = ("loss" if v < 0 else "gain"), abs(v)
        else:
            v = Fraction(0)
            ref = deleg[s]
            cls = "loss" if ref >= 0 else "gain"
            mag = abs(ref)
        rows.append(PeekRow(x, peeked, tag, shift, belief, eu, bool(acc), v, cls, mag))
    agent = DecisionStrategy(decisions, name="agent")
    return PeekScenario(spec, space, pi, mu_self, mu_deleg, principal, agent, tuple(rows))


def noisy_expert_spec(appendix_e: bool = False) -> PeekAgentSpec:
    """Box values {-5, 3, 8}; agent utility shifted by +4 or -3 (or ±2 with ``appendix_e``)."""
    noise = {"n1": (2, Fraction(1, 2)), "n2": (-2, Fraction(1, 2))} if appendix_e else {
        "n1": (4, Fraction(1, 2)),
        "n2": (-3, Fraction(1, 2)),
    }
    return PeekAgentSpec((-5, 3, 8), 1, noise, "additive-shift", 0, True)


def misaligned_expert_spec(fee=50, fee_mode: str = "accepted") -> PeekAgentSpec:
    """Box values {-400, 25, 100, 225}; signed square root utility; opens only on strictly positive EU."""
    return PeekAgentSpec(
        (-400, 25, 100, 225), 1, {"none": (0, 1)}, "signed-sqrt", fee, False, fee_mode
    )


def build_noisy_expert(spec: PeekAgentSpec | None = None) -> PeekScenario:
    return build_peek_scenario(spec or noisy_expert_spec())


def build_misaligned_expert(spec: PeekAgentSpec | None = None) -> PeekScenario:
    return build_peek_scenario(spec or misaligned_expert_spec())


# --------------------------------------------------------------------------
# Reach


@dataclass(frozen=True)
class BoxSpec:
    label: str
    outcomes: tuple
    availability: str = "both"  # or "delegate"

    def __post_init__(self):
        outs = tuple(as_fraction(v) for v in self.outcomes)
        if not outs:
            raise ValueError(f"box {self.label!r} has no outcomes")
        if self.availability not in ("both", "delegate"):
            raise ValueError("availability must be 'both' or 'delegate'")
        object.__setattr__(self, "outcomes", outs)

    @property
    def expected(self) -> Fraction:
        return sum(self.outcomes) / len(self.outcomes)


@dataclass(frozen=True)
class ReachScenarioSpec:
    boxes: tuple
    accept_on_tie: bool = True

    def __post_init__(self):
        boxes = tuple(self.boxes)
        if not any(b.availability == "both" for b in boxes):
            raise ValueError("at least one box must be available to both parties")
        object.__setattr__(self, "boxes", boxes)


@dataclass(frozen=True)
class BoxRow:
    label: str
    outcomes: tuple
    expected: Fraction
    opened: bool
    availability: str
    loss: Fraction
    gain: Fraction


@dataclass(frozen=True)
class ReachScenario:
    spec: ReachScenarioSpec
    space: StateSpace
    pi: Credence
    gambles: tuple
    mu_self: GambleDistribution
    mu_delegate: GambleDistribution
    strategy: DecisionStrategy
    rows: tuple


def reach_spec() -> ReachScenarioSpec:
    return ReachScenarioSpec(
        (
            BoxSpec("A1", (-6, 3, 9)),
            BoxSpec("A2", (-8, -4, 12)),
            BoxSpec("A3", (-10, 2, 3)),
            BoxSpec("A4", (1, 2, 3, 4), "delegate"),
            BoxSpec("A5", (5, 5, 5), "delegate"),
        )
    )


def build_reach_scenario(spec: ReachScenarioSpec | None = None) -> ReachScenario:
    """Compile boxes onto a shared uniform index space.

    With ``N`` the lcm of the boxes' outcome counts, state ``k`` in
    ``range(N)`` shows outcome ``k * n // N`` of an ``n``-outcome box, so
    each box's values stay uniform. Scores depend only on these per-box
    marginals. Both parties open iff the box's mean is non-negative.
    """
    spec = spec or reach_spec()
    N = 1
    for b in spec.boxes:
        N = lcm(N, len(b.outcomes))
    space = StateSpace(tuple(range(N)))
    pi = Credence.uniform(space)
    gambles = tuple(
        Gamble(space, tuple(b.outcomes[k * len(b.outcomes) // N] for k in range(N)), b.label)
        for b in spec.boxes
    )
    opens = {b.label: (b.expected >= 0 if spec.accept_on_tie else b.expected > 0) for b in spec.boxes}
    strategy = DecisionStrategy.from_rule(space, gambles, lambda s, g: opens[g.label], "open-if-nonnegative-mean")
    both = [g for g, b in zip(gambles, spec.boxes) if b.availability == "both"]
    mu_self = GambleDistribution.uniform(both)
    mu_deleg = GambleDistribution.uniform(gambles)

    rows = []
    for b in spec.boxes:
        n = len(b.outcomes)
        if opens[b.label]:
            lo = sum((-v for v in b.outcomes if v < 0), Fraction(0)) / n
            ga = sum((v for v in b.outcomes if v >= 0), Fraction(0)) / n
        else:
            lo = sum((v for v in b.outcomes if v >= 0), Fraction(0)) / n
            ga = Fraction(0)
        rows.append(BoxRow(b.label, b.outcomes, b.expected, opens[b.label], b.availability, lo, ga))
    return ReachScenario(spec, space, pi, gambles, mu_self, mu_deleg, strategy, tuple(rows))


# --------------------------------------------------------------------------
# Named scenarios


@dataclass(frozen=True)
class Discrepancy:
    """A published aggregate that disagrees with its own state-by-state table."""

    quantity: str
    stated: Fraction
    derived: Fraction


@dataclass(frozen=True)
class ScenarioResult:
    name: str
    convention: ScoreConvention
    verdict: ReachVerdict
    table: tuple
    discrepancies: tuple = ()
    scenario: object = None

    @property
    def principal_report(self):
        return self.verdict.principal

    @property
    def agent_report(self):
        return self.verdict.agent

    @property
    def delegate(self) -> bool:
        return self.verdict.delegate


SCENARIOS = ("noisy-expert", "misaligned-expert", "reach")


def run_scenario(name: str, convention: str | ScoreConvention | None = None, appendix_e: bool = False) -> ScenarioResult:
    """Compile, score and tabulate one of :data:`SCENARIOS`.

    Default conventions: credit for the two peek scenarios, strict for reach.
    """
    if name == "noisy-expert":
        sc = build_noisy_expert(noisy_expert_spec(appendix_e))
        conv = ScoreConvention(convention or "credit")
    elif name == "misaligned-expert":
        sc = build_misaligned_expert()
        conv = ScoreConvention(convention or "credit")
    elif name == "reach":
        sc = build_reach_scenario()
        conv = ScoreConvention(convention or "strict")
        v = delegation_criterion_reach(sc.pi, sc.mu_self, sc.mu_delegate, sc.strategy, sc.strategy, conv)
        return ScenarioResult(name, conv, v, sc.rows, (), sc)
    else:
        raise ValueError(f"unknown scenario {name!r}; expected one of {', '.join(SCENARIOS)}")

    v = delegation_criterion_reach(sc.pi, sc.mu_self, sc.mu_delegate, sc.principal, sc.agent, conv)
    disc = []
    if conv is ScoreConvention.CREDIT and not appendix_e:
        if name == "noisy-expert":
            disc = [
                Discrepancy("agent gain (narrative)", Fraction(32, 12), v.agent.gain),
                Discrepancy("agent score (narrative)", Fraction(-11, 12), v.agent.score),
            ]
        else:
            disc = [
                Discrepancy("principal score (narrative)", Fraction(-150, 12), v.principal.score),
                Discrepancy("principal gain (table footer)", Fraction(300, 12), v.principal.gain),
                Discrepancy("principal score (table footer)", Fraction(750, 12), v.principal.score),
                Discrepancy("agent score (narrative)", Fraction(-700, 12), v.agent.score),
            ]
        disc = [d for d in disc if d.stated != d.derived]
    return ScenarioResult(name, conv, v, sc.rows, tuple(disc), sc)
