"""Decision-based scoring of accept/reject strategies over gamble distributions.

A gamble pays ``payoffs[state]`` when accepted and nothing when rejected.
A strategy decides, at every state, which gambles to accept. Loss collects
the payoff magnitude of every wrong call (accepted losers, rejected
winners); gain collects the magnitude of right calls. Two gain conventions
exist:

``strict``
    only accepted winners count as gain;
``credit``
    correctly rejected losers count as well.

Net score is ``loss - gain``; lower is better.

A gamble may carry a ``fee``: the amount the principal pays on acceptance
only. Accepted gambles are then classified and weighed on
``payoff - fee``, rejected ones on the bare payoff.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Mapping, Sequence

from ._rational import DomainError, as_fraction
from .frames import Credence, StateSpace

__all__ = [
    "Gamble",
    "GambleDistribution",
    "DecisionStrategy",
    "ScoreConvention",
    "TraceRow",
    "ScoreReport",
    "SharedVerdict",
    "ReachVerdict",
    "ideal_at",
    "error_at",
    "loss",
    "gain",
    "score",
    "ideal_strategy",
    "delegation_criterion_shared",
    "delegation_criterion_reach",
    "compare_agents",
]


@dataclass(frozen=True)
class Gamble:
    space: StateSpace
    payoffs: tuple
    label: Any = None
    fee: Fraction = Fraction(0)

    def __post_init__(self):
        p = self.payoffs
        if isinstance(p, Mapping):
            p = tuple(p[s] for s in self.space)
        p = tuple(as_fraction(v) for v in p)
        if len(p) != len(self.space):
            raise DomainError(f"gamble {self.label!r} has {len(p)} payoffs for {len(self.space)} states")
        object.__setattr__(self, "payoffs", p)
        object.__setattr__(self, "fee", as_fraction(self.fee))

    def __getitem__(self, state) -> Fraction:
        return self.payoffs[self.space.index(state)]

    def accepted_payoff(self, state) -> Fraction:
        return self[state] - self.fee

    def scaled(self, factor) -> Gamble:
        factor = as_fraction(factor)
        return Gamble(self.space, tuple(v * factor for v in self.payoffs), self.label, self.fee * factor)


@dataclass(frozen=True)
class GambleDistribution:
    """Finite-support distribution over gambles; the support may be empty."""

    support: tuple  # ((Gamble, weight), ...)

    def __post_init__(self):
        sup = tuple((g, as_fraction(w)) for g, w in self.support)
        if any(w <= 0 for _, w in sup):
            raise ValueError("gamble weights must be positive")
        if sup and sum(w for _, w in sup) != 1:
            raise ValueError("gamble weights must sum to 1")
        if len({g.space for g, _ in sup}) > 1:
            raise DomainError("gambles are defined over different state spaces")
        labels = [g.label for g, _ in sup]
        if len(set(labels)) != len(labels):
            raise ValueError("gamble labels must be unique within a distribution")
        object.__setattr__(self, "support", sup)

    @classmethod
    def uniform(cls, gambles: Sequence[Gamble]) -> GambleDistribution:
        gambles = list(gambles)
        return cls(tuple((g, Fraction(1, len(gambles))) for g in gambles))

    @classmethod
    def empty(cls) -> GambleDistribution:
        return cls(())

    @property
    def gambles(self) -> tuple:
        return tuple(g for g, _ in self.support)

    def scaled(self, factor) -> GambleDistribution:
        return GambleDistribution(tuple((g.scaled(factor), w) for g, w in self.support))


@dataclass(frozen=True)
class DecisionStrategy:
    """Accept/reject decisions keyed by ``(state, gamble label)``.

    ``default`` answers for pairs missing from ``accept``; leave it ``None``
    to demand totality.
    """

    accept: Mapping
    default: bool | None = None
    name: str = field(default="", compare=False)

    def __call__(self, state, gamble: Gamble) -> bool:
        try:
            return bool(self.accept[(state, gamble.label)])
        except KeyError:
            if self.default is None:
                raise DomainError(
                    f"strategy {self.name!r} has no decision for state {state!r}, gamble {gamble.label!r}"
                ) from None
            return self.default

    @classmethod
    def from_rule(
        cls, space: StateSpace, gambles: Iterable[Gamble], rule: Callable[[Any, Gamble], bool], name: str = ""
    ) -> DecisionStrategy:
        return cls({(s, g.label): bool(rule(s, g)) for s in space for g in gambles}, None, name)

    @classmethod
    def fixed(cls, space: StateSpace, gambles: Iterable[Gamble], accepted: Iterable, name: str = "") -> DecisionStrategy:
        """State-independent strategy accepting exactly the labels in ``accepted``."""
        acc = set(accepted)
        return cls.from_rule(space, gambles, lambda s, g: g.label in acc, name)

    def accepted_labels(self, state, gambles: Iterable[Gamble]) -> tuple:
        return tuple(g.label for g in gambles if self(state, g))


class ScoreConvention(str, enum.Enum):
    STRICT = "strict"
    CREDIT = "credit"


@dataclass(frozen=True)
class TraceRow:
    state: Any
    gamble: Any
    accepted: bool
    value: Fraction  # payoff the principal receives (0 on rejection)
    classification: str  # "loss", "gain" or "neutral"
    magnitude: Fraction
    weight: Fraction  # pi(state) * mu(gamble)


@dataclass(frozen=True)
class ScoreReport:
    loss: Fraction
    gain: Fraction
    score: Fraction
    convention: ScoreConvention
    trace: tuple = ()

    def by_gamble(self) -> dict:
        """Per-gamble ``(loss, gain)`` conditional on that gamble being drawn."""
        out: dict = {}
        mass: dict = {}
        for r in self.trace:
            lo, ga = out.get(r.gamble, (Fraction(0), Fraction(0)))
            pw = r.weight
            if r.classification == "loss":
                lo += pw * r.magnitude
            elif r.classification == "gain":
                ga += pw * r.magnitude
            out[r.gamble] = (lo, ga)
        for r in self.trace:
            mass[r.gamble] = mass.get(r.gamble, Fraction(0)) + r.weight
        return {k: (lo / mass[k], ga / mass[k]) for k, (lo, ga) in out.items() if mass[k]}


def ideal_at(state, g: Gamble) -> bool:
    """Should the gamble be accepted if ``state`` were known to be actual?"""
    return g[state] >= 0


def error_at(state, g: Gamble, accepted: bool) -> bool:
    """Accepted loser or rejected winner (payoffs net of fee when accepted)."""
    if accepted:
        return g.accepted_payoff(state) < 0
    return g[state] >= 0


def _classify(state, g: Gamble, accepted: bool, conv: ScoreConvention) -> tuple[str, Fraction, Fraction]:
    if accepted:
        v = g.accepted_payoff(state)
        return ("loss" if v < 0 else "gain"), abs(v), v
    v = g[state]
    if v >= 0:
        return "loss", abs(v), Fraction(0)
    if conv is ScoreConvention.CREDIT:
        return "gain", abs(v), Fraction(0)
    return "neutral", abs(v), Fraction(0)


def _check_space(pi: Credence, mu: GambleDistribution) -> None:
    for g, _ in mu.support:
        if g.space != pi.space:
            raise DomainError("gamble distribution and prior live on different state spaces")


def score(pi: Credence, mu: GambleDistribution, d: DecisionStrategy, conv=ScoreConvention.STRICT) -> ScoreReport:
    """Loss, gain and net score of ``d`` with the full per-(state, gamble) trace."""
    conv = ScoreConvention(conv)
    _check_space(pi, mu)
    rows = []
    lo = ga = Fraction(0)
    for s, p in zip(pi.space, pi.weights):
        for g, w in mu.support:
            acc = d(s, g)
            cls, mag, val = _classify(s, g, acc, conv)
            rows.append(TraceRow(s, g.label, acc, val, cls, mag, p * w))
            if cls == "loss":
                lo += p * w * mag
            elif cls == "gain":
                ga += p * w * mag
    return ScoreReport(lo, ga, lo - ga, conv, tuple(rows))


def loss(pi: Credence, mu: GambleDistribution, d: DecisionStrategy) -> Fraction:
    return score(pi, mu, d, ScoreConvention.STRICT).loss


def gain(pi: Credence, mu: GambleDistribution, d: DecisionStrategy, conv=ScoreConvention.STRICT) -> Fraction:
    return score(pi, mu, d, conv).gain


def ideal_strategy(space: StateSpace, gambles: Iterable[Gamble], name: str = "ideal") -> DecisionStrategy:
    """Accept exactly when the (fee-adjusted) payoff at the true state is non-negative.

    With a positive fee a gamble can be a winner before the fee and a loser
    after it; that pair is an error either way, so the oracle rejects it.
    """
    return DecisionStrategy.from_rule(space, gambles, lambda s, g: g.accepted_payoff(s) >= 0, name)


@dataclass(frozen=True)
class SharedVerdict:
    delegate: bool
    principal_loss: Fraction
    agent_loss: Fraction


@dataclass(frozen=True)
class ReachVerdict:
    delegate: bool
    principal: ScoreReport
    agent: ScoreReport

    @property
    def margin(self) -> Fraction:
        """How much lower (better) the delegated score is; positive favours delegating."""
        return self.principal.score - self.agent.score


def delegation_criterion_shared(
    pi: Credence, mu: GambleDistribution, d_principal: DecisionStrategy, d_agent: DecisionStrategy
) -> SharedVerdict:
    """Same problem distribution for both: delegate iff the agent's loss is no larger."""
    lp_ = loss(pi, mu, d_principal)
    la = loss(pi, mu, d_agent)
    return SharedVerdict(la <= lp_, lp_, la)


def delegation_criterion_reach(
    pi: Credence,
    mu_self: GambleDistribution,
    mu_delegate: GambleDistribution,
    d_principal: DecisionStrategy,
    d_agent: DecisionStrategy,
    conv=ScoreConvention.STRICT,
) -> ReachVerdict:
    """Delegate iff the agent's score on its reach is no worse than the principal's on its own."""
    rp = score(pi, mu_self, d_principal, conv)
    ra = score(pi, mu_delegate, d_agent, conv)
    return ReachVerdict(ra.score <= rp.score, rp, ra)


def compare_agents(pi: Credence, candidates: Sequence[tuple], conv=ScoreConvention.STRICT) -> list:
    """Rank ``(mu, strategy)`` candidates by ascending score, stable on ties.

    Returns ``(index, ScoreReport)`` pairs.
    """
    if not candidates:
        raise ValueError("at least one candidate is required")
    reports = [(i, score(pi, mu, d, conv)) for i, (mu, d) in enumerate(candidates)]
    return sorted(reports, key=lambda ir: ir[1].score)
