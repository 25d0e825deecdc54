"""Total trust, valuing and posterior alignment on finite frames.

The trust check is decided exactly: one small linear program per event,
solved with the rational simplex in :mod:`delegation.lp`. The alignment
check enumerates cells, act pairs and event pairs. When alignment fails,
:func:`construct_valuing_counterexample` splices the offending acts into a
two-act problem on which delegation does strictly worse than one of the
options.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import lcm
from typing import Iterable, Sequence

import numpy as np

from . import lp
from .frames import (
    Act,
    DecisionProblemRV,
    GeneralizedFrame,
    OptionRV,
    ProbabilityFrame,
    StateSpace,
    agent_choice,
    agent_value,
    cells,
    check_clarity,
    delegation_value,
    events,
    expectation,
    expert_strategy,
    induced_option,
    principal_value,
)

__all__ = [
    "TrustWitness",
    "TrustVerdict",
    "ValuingWitness",
    "ValuingVerdict",
    "CellWitness",
    "EventWitness",
    "AlignmentVerdict",
    "Counterexample",
    "RichnessReport",
    "ClarityError",
    "ClosureCapExceeded",
    "check_total_trust",
    "falsify_total_trust_randomized",
    "check_valuing_over_family",
    "check_posterior_alignment",
    "construct_valuing_counterexample",
    "indicator_acts",
    "event_witness_to_cell_witness",
    "check_richness_closure",
    "richness_close",
    "check_constant_acts",
    "expected_values",
]


class ClarityError(ValueError):
    """The frame violates clarity, so the alignment test does not apply."""


class ClosureCapExceeded(RuntimeError):
    def __init__(self, cap: int):
        super().__init__(f"richness closure exceeded the cap of {cap} acts")
        self.cap = cap


# --------------------------------------------------------------------------
# Total trust


@dataclass(frozen=True)
class TrustWitness:
    """A variable ``x`` and threshold ``t`` breaking total trust.

    ``slack`` is the margin the search found: the LP objective for the
    exact checker, ``t * pi(S) - sum_S pi * x`` for the randomized one.
    """

    x: OptionRV
    t: Fraction
    slack: Fraction

    def event(self, frame: ProbabilityFrame) -> tuple:
        return tuple(s for s, c in zip(frame.space, frame.agent) if expectation(c, self.x) >= self.t)

    def shortfall(self, frame: ProbabilityFrame) -> Fraction:
        """``sum over S of pi(w) * (x(w) - t)``; negative means a violation."""
        S = self.event(frame)
        return sum((frame.pi[s] * (self.x[s] - self.t) for s in S), Fraction(0))

    def verify(self, frame: ProbabilityFrame) -> bool:
        S = self.event(frame)
        return frame.pi.prob(S) > 0 and self.shortfall(frame) < 0


@dataclass(frozen=True)
class TrustVerdict:
    holds: bool
    witness: TrustWitness | None = None
    decided: bool = True  # False for a randomized search that found nothing


def expected_values(frame: ProbabilityFrame, x: OptionRV) -> tuple:
    return tuple(expectation(c, x) for c in frame.agent)


def _trust_lp(frame: ProbabilityFrame, S: frozenset) -> tuple[Fraction, OptionRV, Fraction]:
    # Shifted variables y = x + 1, tau = t + 1 in [0, 2] and slack s >= 0.
    # The shift cancels in every row (credences sum to one), so the origin
    # (x = -1, t = -1, s = 0) is feasible and no phase 1 is needed.
    space = frame.space
    n = len(space)
    zero = Fraction(0)
    A, b = [], []
    for i, st in enumerate(space.states):
        P = frame.agent[i].weights
        if st in S:
            A.append([-p for p in P] + [Fraction(1), zero])  # t <= E_st(x)
        else:
            A.append(list(P) + [Fraction(-1), Fraction(1)])  # E_st(x) <= t - s
        b.append(zero)
    pis = [w if st in S else zero for st, w in zip(space.states, frame.pi.weights)]
    A.append(pis + [-sum(pis), Fraction(1)])  # sum_S pi x <= t pi(S) - s
    b.append(zero)
    for j in range(n + 1):
        row = [zero] * (n + 2)
        row[j] = Fraction(1)
        A.append(row)
        b.append(Fraction(2))
    c = [zero] * (n + 1) + [Fraction(1)]
    res = lp.maximize(c, A, b)
    v = res.x
    x = OptionRV(space, tuple(v[j] - 1 for j in range(n)))
    return res.value, x, v[n] - 1


def check_total_trust(frame: ProbabilityFrame) -> TrustVerdict:
    """Decide total trust exactly.

    For every event ``S`` of positive prior mass, maximize a common slack
    ``s`` such that the agent's expectation of ``x`` reaches ``t`` exactly
    on ``S`` while the principal's mean of ``x`` over ``S`` falls below
    ``t``. Trust fails iff some optimum is strictly positive; the largest
    one is returned as the witness. Cost is ``2**n`` small LPs.
    """
    best = None
    for S in events(frame.space, max_states=16):
        if not S or frame.pi.prob(S) == 0:
            continue
        s, x, t = _trust_lp(frame, S)
        if s > 0 and (best is None or s > best.slack):
            best = TrustWitness(x, t, s)
    if best is None:
        return TrustVerdict(True)
    return TrustVerdict(False, best)


def _common_denominator(values) -> int:
    d = 1
    for v in values:
        d = lcm(d, v.denominator)
    return d


def falsify_total_trust_randomized(
    frame: ProbabilityFrame,
    trials: int,
    seed: int | None = 0,
    payoff_range: tuple[int, int] = (-3, 3),
    batch: int = 2048,
) -> TrustVerdict:
    """Random search for a total-trust violation.

    Draws integer payoff vectors in ``payoff_range`` (inclusive) and, for
    each, tries every threshold the agent's expectations take. Arithmetic is
    exact: credences are scaled to a common integer denominator. Sound for
    violations, incomplete otherwise: a clean run returns
    ``holds=True, decided=False``. Draws come from PCG64 seeded with
    ``seed``, in batches of ``batch`` vectors.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    lo, hi = payoff_range
    rng = np.random.Generator(np.random.PCG64(seed))
    space = frame.space
    n = len(space)
    D = _common_denominator(w for c in frame.agent for w in c.weights)
    Dp = _common_denominator(frame.pi.weights)
    bound = max(abs(lo), abs(hi)) * D * Dp * n * 4
    dtype = np.int64 if bound < 2**62 else object
    P = np.array([[int(w * D) for w in c.weights] for c in frame.agent], dtype=dtype)
    pi = np.array([int(w * Dp) for w in frame.pi.weights], dtype=dtype)
    done = 0
    while done < trials:
        k = min(batch, trials - done)
        X = rng.integers(lo, hi + 1, (k, n)).astype(dtype)
        T = X @ P.T  # D * E_state(X)
        DX = D * X
        viol = np.zeros((k, n), dtype=bool)
        for j in range(n):
            thr = T[:, j : j + 1]
            inS = T >= thr
            mass = (inS * pi).sum(axis=1)
            short = (inS * pi * (DX - thr)).sum(axis=1)
            viol[:, j] = (mass > 0) & (short < 0)
        hits = np.flatnonzero(viol.any(axis=1))
        if hits.size:
            b = int(hits[0])
            js = [j for j in range(n) if viol[b, j]]
            j = min(js, key=lambda j: T[b, j])
            x = OptionRV(space, tuple(int(v) for v in X[b]))
            t = expectation(frame.agent[j], x)
            w = TrustWitness(x, t, Fraction(0))
            return TrustVerdict(False, TrustWitness(x, t, -w.shortfall(frame)))
        done += k
    return TrustVerdict(True, None, decided=False)


# --------------------------------------------------------------------------
# Valuing


@dataclass(frozen=True)
class ValuingWitness:
    problem: tuple
    losing_option: object  # OptionRV or Act
    margin: Fraction  # E_pi(losing option) - E_pi(delegation) > 0


@dataclass(frozen=True)
class ValuingVerdict:
    holds: bool
    margin: Fraction | None  # smallest delegation advantage seen across the family
    witness: ValuingWitness | None = None


def _delegation_value_acts(g: GeneralizedFrame, problem: Sequence[Act]) -> Fraction:
    return sum(
        (p * g.u[agent_choice(g, s, problem)[s]] for s, p in zip(g.space, g.pi.weights) if p),
        Fraction(0),
    )


def check_valuing_over_family(frame, family: Iterable) -> ValuingVerdict:
    """Does the principal weakly prefer delegating on every problem in ``family``?

    ``frame`` is a :class:`ProbabilityFrame` (problems are
    :class:`DecisionProblemRV`) or a :class:`GeneralizedFrame` (problems are
    sequences of :class:`Act`). The first violation is returned as witness.
    """
    family = list(family)
    if not family:
        raise ValueError("family must contain at least one problem")
    worst = None
    for problem in family:
        if isinstance(frame, ProbabilityFrame):
            if not isinstance(problem, DecisionProblemRV):
                problem = DecisionProblemRV(tuple(problem))
            deleg = delegation_value(frame, expert_strategy(frame, problem))
            members = [(o, expectation(frame.pi, o)) for o in problem.options]
            opts = problem.options
        else:
            opts = tuple(problem)
            deleg = _delegation_value_acts(frame, opts)
            members = [(a, principal_value(frame, a)) for a in opts]
        for o, val in members:
            adv = deleg - val
            if worst is None or adv < worst:
                worst = adv
            if adv < 0:
                return ValuingVerdict(False, adv, ValuingWitness(opts, o, -adv))
    return ValuingVerdict(True, worst)


# --------------------------------------------------------------------------
# Posterior alignment


@dataclass(frozen=True)
class CellWitness:
    """Principal strictly prefers ``a`` to ``b`` given the cell; the agent does not."""

    cell: tuple
    a: Act
    b: Act
    principal_a: Fraction
    principal_b: Fraction
    agent_a: Fraction
    agent_b: Fraction


@dataclass(frozen=True)
class EventWitness:
    """Agent finds ``x`` strictly likelier than ``y``; the principal, given the cell, reverses it."""

    cell: tuple
    x: frozenset
    y: frozenset
    agent_x: Fraction
    agent_y: Fraction
    principal_x: Fraction
    principal_y: Fraction


@dataclass(frozen=True)
class AlignmentVerdict:
    holds: bool
    cell_witness: CellWitness | None = None
    event_witness: EventWitness | None = None
    skipped_cells: tuple = ()


def check_posterior_alignment(
    g: GeneralizedFrame, singleton_events: bool = False, max_states: int = 12
) -> AlignmentVerdict:
    """Test both alignment conditions on every cell of positive prior mass.

    Condition (i): whenever the principal, conditioned on the cell,
    strictly prefers act ``a`` to ``b``, the agent strictly prefers ``a``.
    Condition (ii): whenever the agent finds event ``X`` strictly likelier
    than ``Y``, the principal's conditional probability of ``X`` is at
    least that of ``Y``. Only the given acts are examined, so the verdict
    is complete only if the act set is richness-closed.
    """
    clarity = check_clarity(g)
    if not clarity:
        raise ClarityError(f"frame is not clear: {clarity.violations[:3]}")
    cw = ew = None
    skipped = []
    evs = None
    for cell in cells(g):
        if g.pi.prob(cell) == 0:
            skipped.append(cell)
            continue
        rep = cell[0]
        cond = g.pi.conditional(cell)
        if cw is None:
            pv = {id(a): expectation(cond, induced_option(g, a, g.u)) for a in g.acts}
            av = {id(a): agent_value(g, rep, a) for a in g.acts}
            for a, b in product(g.acts, repeat=2):
                if pv[id(a)] > pv[id(b)] and not av[id(a)] > av[id(b)]:
                    cw = CellWitness(cell, a, b, pv[id(a)], pv[id(b)], av[id(a)], av[id(b)])
                    break
        if ew is None:
            if evs is None:
                evs = list(events(g.space, singletons=singleton_events, max_states=max_states))
            P = g.belief_at(rep)
            pp = [P.prob(e) for e in evs]
            cp = [cond.prob(e) for e in evs]
            for i, j in product(range(len(evs)), repeat=2):
                if pp[i] > pp[j] and cp[i] < cp[j]:
                    ew = EventWitness(cell, evs[i], evs[j], pp[i], pp[j], cp[i], cp[j])
                    break
        if cw is not None and ew is not None:
            break
    return AlignmentVerdict(cw is None and ew is None, cw, ew, tuple(skipped))


@dataclass(frozen=True)
class Counterexample:
    """A two-act problem on which delegation underperforms ``witness.losing_option``.

    ``frame`` is the input frame with any newly spliced acts appended.
    """

    frame: GeneralizedFrame
    witness: ValuingWitness


def _find_or_add(acts: list, candidate: Act) -> Act:
    for a in acts:
        if a == candidate:
            return a
    acts.append(candidate)
    return candidate


def construct_valuing_counterexample(
    g: GeneralizedFrame, witness: CellWitness | AlignmentVerdict | None, baseline: Act | None = None
) -> Counterexample:
    """Splice the witness acts into ``{a*, b*}`` and measure the loss.

    ``a*`` follows ``a`` on the witness cell and ``baseline`` elsewhere;
    ``b*`` does the same with ``b``. By clarity the agent ranks them as it
    ranks ``a`` and ``b``, so it picks ``b*`` inside the cell (``b*`` is
    listed first to win ties), while the principal prefers ``a*``.
    Spliced acts missing from the frame are added to it.
    """
    if isinstance(witness, AlignmentVerdict):
        witness = witness.cell_witness
    if witness is None:
        raise ValueError("a cell witness is required")
    if not g.acts and baseline is None:
        raise ValueError("frame has no acts to use as a baseline")
    base = baseline if baseline is not None else g.acts[0]
    acts = list(g.acts)
    a_star = witness.a.splice(base, witness.cell, label=f"{witness.a.label}@cell|{base.label}")
    b_star = witness.b.splice(base, witness.cell, label=f"{witness.b.label}@cell|{base.label}")
    a_star = _find_or_add(acts, a_star)
    b_star = _find_or_add(acts, b_star)
    g2 = g.with_acts(acts) if len(acts) != len(g.acts) else g
    problem = (b_star, a_star)
    margin = principal_value(g2, a_star) - _delegation_value_acts(g2, problem)
    return Counterexample(g2, ValuingWitness(problem, a_star, margin))


def indicator_acts(
    space: StateSpace, x: Iterable, y: Iterable, high, low, labels=("f", "g")
) -> tuple[Act, Act]:
    """Acts paying ``high`` on ``x`` (resp. ``y``) and ``low`` elsewhere."""
    x, y = set(x), set(y)
    f = Act(space, tuple(high if s in x else low for s in space), labels[0])
    h = Act(space, tuple(high if s in y else low for s in space), labels[1])
    return f, h


def event_witness_to_cell_witness(g: GeneralizedFrame, w: EventWitness) -> tuple[GeneralizedFrame, CellWitness]:
    """Turn a comparative-probability reversal into a preference reversal.

    Picks consequences ``c1, c2`` that both the principal and the agent (at
    the witness cell) rank strictly ``c1 > c2``, builds indicator acts on
    ``x`` and ``y``, and returns the extended frame with the resulting cell
    witness. Raises ``ValueError`` when no such pair of consequences exists.
    """
    rep = w.cell[0]
    V = g.utility_at(rep)
    pair = next(
        ((c1, c2) for c1, c2 in product(g.consequences, repeat=2)
         if g.u[c1] > g.u[c2] and V[c1] > V[c2]),
        None,
    )
    if pair is None:
        raise ValueError("no consequence pair ranked the same way by principal and agent")
    f, h = indicator_acts(g.space, w.x, w.y, pair[0], pair[1], labels=("1_X", "1_Y"))
    acts = list(g.acts)
    f = _find_or_add(acts, f)
    h = _find_or_add(acts, h)
    g2 = g.with_acts(acts)
    cond = g2.pi.conditional(w.cell)
    cw = CellWitness(
        w.cell, h, f,
        expectation(cond, induced_option(g2, h, g2.u)),
        expectation(cond, induced_option(g2, f, g2.u)),
        agent_value(g2, rep, h),
        agent_value(g2, rep, f),
    )
    return g2, cw


# --------------------------------------------------------------------------
# Structural conditions


@dataclass(frozen=True)
class RichnessReport:
    holds: bool
    missing: tuple = ()  # (a, a_prime, event, spliced act)

    def __bool__(self) -> bool:
        return self.holds


def check_richness_closure(acts: Sequence[Act], event_list: Iterable[Iterable]) -> RichnessReport:
    """Is every splice ``a on X, a' elsewhere`` already among ``acts``?"""
    acts = tuple(acts)
    have = {a.outcome for a in acts}
    missing, seen = [], set()
    event_list = [frozenset(e) for e in event_list]
    for a, b in product(acts, repeat=2):
        for X in event_list:
            sp = a.splice(b, X)
            if sp.outcome not in have and sp.outcome not in seen:
                seen.add(sp.outcome)
                missing.append((a, b, X, sp))
    return RichnessReport(not missing, tuple(missing))


def richness_close(acts: Sequence[Act], event_list: Iterable[Iterable], cap: int = 4096) -> tuple:
    """Smallest splice-closed act set containing ``acts``.

    Grows by rounds of splicing; raises :class:`ClosureCapExceeded` once
    the set would exceed ``cap`` acts.
    """
    event_list = [frozenset(e) for e in event_list]
    out = list(acts)
    have = {a.outcome for a in out}
    frontier = True
    while frontier:
        frontier = False
        for a, b in product(list(out), repeat=2):
            for X in event_list:
                sp = a.splice(b, X, label=f"splice{len(out)}")
                if sp.outcome not in have:
                    if len(out) >= cap:
                        raise ClosureCapExceeded(cap)
                    have.add(sp.outcome)
                    out.append(sp)
                    frontier = True
    return tuple(out)


def check_constant_acts(g: GeneralizedFrame) -> bool:
    """Are there constant acts to two consequences the principal strictly ranks?"""
    consts = {a.outcome[0] for a in g.acts if a.is_constant()}
    return len({g.u[c] for c in consts}) >= 2
