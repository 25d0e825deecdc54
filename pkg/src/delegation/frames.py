"""Finite probability frames and generalized (belief + utility) frames.

Everything here is exact: probabilities, payoffs and utilities are
:class:`~fractions.Fraction` values and every expectation is an exact sum.
The event field is always the full power set of the state space.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Any, Hashable, Iterable, Iterator, Mapping, Sequence

from ._rational import DomainError, as_fraction

__all__ = [
    "StateSpace",
    "Credence",
    "OptionRV",
    "DecisionProblemRV",
    "ExpertStrategy",
    "ProbabilityFrame",
    "Act",
    "GeneralizedFrame",
    "ClarityReport",
    "expectation",
    "expert_strategy",
    "delegation_value",
    "induced_option",
    "agent_value",
    "agent_argmax",
    "agent_choice",
    "principal_value",
    "cells",
    "cell_of",
    "check_clarity",
    "events",
    "generalize",
]

State = Hashable


@dataclass(frozen=True)
class StateSpace:
    """Ordered, finite, duplicate-free sequence of state identifiers."""

    states: tuple

    def __post_init__(self):
        states = tuple(self.states)
        if not states:
            raise ValueError("state space must be non-empty")
        if len(set(states)) != len(states):
            raise ValueError("state identifiers must be unique")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(states)})

    def index(self, state: State) -> int:
        try:
            return self._index[state]
        except KeyError:
            raise DomainError(f"{state!r} is not a state of this space") from None

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self) -> Iterator:
        return iter(self.states)

    def __contains__(self, state) -> bool:
        return state in self._index


def _aligned(space: StateSpace, values, what: str) -> tuple:
    if isinstance(values, Mapping):
        extra = set(values) - set(space.states)
        if extra:
            raise DomainError(f"{what} mentions unknown states {sorted(map(repr, extra))}")
        return tuple(values.get(s, 0) for s in space.states)
    values = tuple(values)
    if len(values) != len(space):
        raise DomainError(f"{what} has {len(values)} entries for {len(space)} states")
    return values


@dataclass(frozen=True)
class Credence:
    """A probability function on the power set of ``space``.

    ``weights`` may be given as a sequence aligned with the space or as a
    mapping from state to weight (missing states get 0). The sum must be
    exactly one.
    """

    space: StateSpace
    weights: tuple

    def __post_init__(self):
        w = tuple(as_fraction(v) for v in _aligned(self.space, self.weights, "credence"))
        if any(v < 0 or v > 1 for v in w):
            raise ValueError("credence weights must lie in [0, 1]")
        if sum(w) != 1:
            raise ValueError(f"credence weights sum to {sum(w)}, not 1")
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, space: StateSpace) -> Credence:
        n = len(space)
        return cls(space, [Fraction(1, n)] * n)

    @classmethod
    def point(cls, space: StateSpace, state: State) -> Credence:
        return cls(space, {state: 1})

    def __getitem__(self, state: State) -> Fraction:
        return self.weights[self.space.index(state)]

    def prob(self, event: Iterable[State]) -> Fraction:
        return sum((self[s] for s in set(event)), Fraction(0))

    def support(self) -> tuple:
        return tuple(s for s, w in zip(self.space.states, self.weights) if w)

    def conditional(self, event: Iterable[State]) -> Credence:
        event = set(event)
        mass = self.prob(event)
        if mass == 0:
            raise ZeroDivisionError("conditioning on a null event")
        return Credence(
            self.space, [w / mass if s in event else 0 for s, w in zip(self.space, self.weights)]
        )


@dataclass(frozen=True)
class OptionRV:
    """A payoff random variable over a state space."""

    space: StateSpace
    payoffs: tuple
    label: Any = field(default=None, compare=False)

    def __post_init__(self):
        p = tuple(as_fraction(v) for v in _aligned(self.space, self.payoffs, "option"))
        object.__setattr__(self, "payoffs", p)

    @classmethod
    def constant(cls, space: StateSpace, value, label=None) -> OptionRV:
        return cls(space, [value] * len(space), label)

    def __getitem__(self, state: State) -> Fraction:
        return self.payoffs[self.space.index(state)]


@dataclass(frozen=True)
class DecisionProblemRV:
    options: tuple

    def __post_init__(self):
        opts = tuple(self.options)
        if not opts:
            raise ValueError("a decision problem needs at least one option")
        spaces = {o.space for o in opts}
        if len(spaces) != 1:
            raise DomainError("options are defined over different state spaces")
        if len({o.payoffs for o in opts}) != len(opts):
            raise ValueError("options must be pairwise distinct payoff vectors")
        object.__setattr__(self, "options", opts)

    @property
    def space(self) -> StateSpace:
        return self.options[0].space

    def __iter__(self):
        return iter(self.options)

    def __len__(self) -> int:
        return len(self.options)


@dataclass(frozen=True)
class ExpertStrategy:
    space: StateSpace
    choice: tuple

    def __getitem__(self, state: State) -> OptionRV:
        return self.choice[self.space.index(state)]

    def as_mapping(self) -> dict:
        return dict(zip(self.space.states, self.choice))


@dataclass(frozen=True)
class ProbabilityFrame:
    """Principal prior ``pi`` plus the agent's credence at every state.

    ``agent`` may be a mapping ``state -> Credence`` or a sequence aligned
    with the space; rows may also be plain weight sequences.
    ``tie_break`` optionally lists option labels in priority order for
    resolving argmax ties; unlisted options fall back to problem order.
    """

    space: StateSpace
    pi: Credence
    agent: tuple
    tie_break: tuple | None = None

    def __post_init__(self):
        rows = _aligned(self.space, self.agent, "agent credences")
        rows = tuple(r if isinstance(r, Credence) else Credence(self.space, r) for r in rows)
        if self.pi.space != self.space or any(r.space != self.space for r in rows):
            raise DomainError("all credences must be defined over the frame's state space")
        object.__setattr__(self, "agent", rows)

    def agent_at(self, state: State) -> Credence:
        return self.agent[self.space.index(state)]


def expectation(c: Credence, x: OptionRV) -> Fraction:
    """Exact expectation of ``x`` under ``c``."""
    if c.space != x.space:
        raise DomainError("credence and option live on different state spaces")
    return sum((w * v for w, v in zip(c.weights, x.payoffs)), Fraction(0))


def _rank(labels: Sequence | None, items: Sequence) -> list:
    """Order ``items`` by position of their label in ``labels`` then by input order."""
    if not labels:
        return list(items)
    pos = {lab: i for i, lab in enumerate(labels)}
    big = len(pos)
    return sorted(items, key=lambda it: (pos.get(it.label, big),))


def expert_strategy(frame: ProbabilityFrame, problem: DecisionProblemRV) -> ExpertStrategy:
    """The option the agent picks at each state by maximizing its own expectation."""
    if problem.space != frame.space:
        raise DomainError("problem and frame live on different state spaces")
    ordered = _rank(frame.tie_break, problem.options)
    choice = []
    for cred in frame.agent:
        best = max(expectation(cred, o) for o in ordered)
        choice.append(next(o for o in ordered if expectation(cred, o) == best))
    return ExpertStrategy(frame.space, tuple(choice))


def delegation_value(frame: ProbabilityFrame, strategy: ExpertStrategy) -> Fraction:
    """Principal's expected payoff from letting the agent choose."""
    if strategy.space != frame.space:
        raise DomainError("strategy and frame live on different state spaces")
    return sum(
        (p * strategy.choice[i].payoffs[i] for i, p in enumerate(frame.pi.weights)), Fraction(0)
    )


# --------------------------------------------------------------------------
# Generalized frames


@dataclass(frozen=True)
class Act:
    """A map from states to consequence identifiers."""

    space: StateSpace
    outcome: tuple
    label: Any = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "outcome", _aligned(self.space, self.outcome, "act"))

    @classmethod
    def constant(cls, space: StateSpace, consequence, label=None) -> Act:
        return cls(space, (consequence,) * len(space), label)

    def __getitem__(self, state: State):
        return self.outcome[self.space.index(state)]

    def is_constant(self) -> bool:
        return len(set(self.outcome)) == 1

    def splice(self, other: Act, event: Iterable[State], label=None) -> Act:
        """This act on ``event``, ``other`` everywhere else."""
        event = set(event)
        return Act(
            self.space,
            tuple(a if s in event else b for s, a, b in zip(self.space, self.outcome, other.outcome)),
            label,
        )


@dataclass(frozen=True)
class ClarityReport:
    holds: bool
    violations: tuple = ()  # (state, outside_state, mass)

    def __bool__(self) -> bool:
        return self.holds


@dataclass(frozen=True, eq=False)
class GeneralizedFrame:
    """Principal prior and utility, plus the agent's beliefs and utilities per state.

    The agent's behaviour at a state is the expected-utility argmax under
    ``(agent_beliefs[s], agent_utilities[s])``. Ties go to the act ranked
    first by ``tie_break[s]`` (a sequence of act labels), then to problem
    order. Distinct ``tie_break`` tags on states with equal beliefs and
    utilities model stochastic choice.
    """

    space: StateSpace
    pi: Credence
    consequences: tuple
    u: Mapping
    acts: tuple
    agent_beliefs: tuple
    agent_utilities: tuple
    tie_break: Mapping = field(default_factory=dict)

    def __post_init__(self):
        cons = tuple(self.consequences)
        if len(set(cons)) != len(cons):
            raise ValueError("consequence identifiers must be unique")
        u = {c: as_fraction(self.u[c]) for c in cons} if set(self.u) >= set(cons) else None
        if u is None:
            missing = set(cons) - set(self.u)
            raise DomainError(f"principal utility undefined on {sorted(map(repr, missing))}")
        acts = tuple(self.acts)
        for a in acts:
            if a.space != self.space:
                raise DomainError("act defined over a different state space")
            bad = set(a.outcome) - set(cons)
            if bad:
                raise DomainError(f"act {a.label!r} yields unknown consequences {bad!r}")
        beliefs = _aligned(self.space, self.agent_beliefs, "agent beliefs")
        beliefs = tuple(b if isinstance(b, Credence) else Credence(self.space, b) for b in beliefs)
        if self.pi.space != self.space or any(b.space != self.space for b in beliefs):
            raise DomainError("all credences must be defined over the frame's state space")
        utils = _aligned(self.space, self.agent_utilities, "agent utilities")
        norm_utils = []
        for v in utils:
            if not set(v) >= set(cons):
                raise DomainError("agent utility must be defined on every consequence")
            norm_utils.append({c: as_fraction(v[c]) for c in cons})
        tb = dict(self.tie_break)
        for s in tb:
            self.space.index(s)
        object.__setattr__(self, "consequences", cons)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "acts", acts)
        object.__setattr__(self, "agent_beliefs", beliefs)
        object.__setattr__(self, "agent_utilities", tuple(norm_utils))
        object.__setattr__(self, "tie_break", tb)

    def belief_at(self, state: State) -> Credence:
        return self.agent_beliefs[self.space.index(state)]

    def utility_at(self, state: State) -> dict:
        return self.agent_utilities[self.space.index(state)]

    def act(self, label) -> Act:
        for a in self.acts:
            if a.label == label:
                return a
        raise KeyError(label)

    def with_acts(self, acts: Iterable[Act]) -> GeneralizedFrame:
        return GeneralizedFrame(
            self.space, self.pi, self.consequences, self.u, tuple(acts),
            self.agent_beliefs, self.agent_utilities, self.tie_break,
        )


def induced_option(g: GeneralizedFrame, a: Act, utility: Mapping) -> OptionRV:
    """The payoff variable ``utility ∘ a``."""
    if a.space != g.space:
        raise DomainError("act and frame live on different state spaces")
    try:
        return OptionRV(g.space, tuple(utility[c] for c in a.outcome), a.label)
    except KeyError as exc:
        raise DomainError(f"utility undefined on consequence {exc.args[0]!r}") from None


def agent_value(g: GeneralizedFrame, state: State, a: Act) -> Fraction:
    i = g.space.index(state)
    return expectation(g.agent_beliefs[i], induced_option(g, a, g.agent_utilities[i]))


def principal_value(g: GeneralizedFrame, a: Act, given: Iterable[State] | None = None) -> Fraction:
    """``E_pi(u(a))``, optionally conditioned on an event of positive mass."""
    pi = g.pi if given is None else g.pi.conditional(given)
    return expectation(pi, induced_option(g, a, g.u))


def agent_argmax(g: GeneralizedFrame, state: State, problem: Sequence[Act]) -> tuple:
    problem = tuple(problem)
    if not problem:
        raise ValueError("empty decision problem")
    vals = [agent_value(g, state, a) for a in problem]
    best = max(vals)
    return tuple(a for a, v in zip(problem, vals) if v == best)


def agent_choice(g: GeneralizedFrame, state: State, problem: Sequence[Act]) -> Act:
    """The act the agent picks at ``state``, ties resolved by the frame's tie-break."""
    return _rank(g.tie_break.get(state), agent_argmax(g, state, problem))[0]


def _profile(g: GeneralizedFrame, i: int):
    return (g.agent_beliefs[i].weights, tuple(g.agent_utilities[i][c] for c in g.consequences))


def cells(g: GeneralizedFrame) -> tuple:
    """Partition of states by equality of the agent's (beliefs, utilities)."""
    groups: dict = {}
    for i, s in enumerate(g.space.states):
        groups.setdefault(_profile(g, i), []).append(s)
    return tuple(tuple(v) for v in groups.values())


def cell_of(g: GeneralizedFrame, state: State) -> tuple:
    for c in cells(g):
        if state in c:
            return c
    raise DomainError(f"{state!r} is not a state of this frame")


def check_clarity(g: GeneralizedFrame) -> ClarityReport:
    """Does every agent credence vanish outside its own cell?"""
    violations = []
    for cell in cells(g):
        inside = set(cell)
        for s in cell:
            cred = g.belief_at(s)
            for t, w in zip(g.space.states, cred.weights):
                if w and t not in inside:
                    violations.append((s, t, w))
    return ClarityReport(not violations, tuple(violations))


def events(space: StateSpace, singletons: bool = False, max_states: int = 12) -> Iterator[frozenset]:
    """Subsets of ``space`` by size, then in state order.

    With ``singletons=True`` only the empty set and one-state events are
    produced. The full power set is refused beyond ``max_states`` states.
    """
    n = len(space)
    if singletons:
        yield frozenset()
        for s in space.states:
            yield frozenset((s,))
        return
    if n > max_states:
        raise ValueError(
            f"{n} states exceed the power-set limit of {max_states}; pass singletons=True"
        )
    for k in range(n + 1):
        for combo in combinations(space.states, k):
            yield frozenset(combo)


def generalize(frame: ProbabilityFrame, problem: DecisionProblemRV | None = None) -> GeneralizedFrame:
    """View a probability frame as a generalized frame with shared identity utility.

    Consequences are the payoff values of ``problem``; each option becomes
    the act sending a state to its payoff there.
    """
    opts = problem.options if problem is not None else ()
    cons = sorted({v for o in opts for v in o.payoffs} | {Fraction(0)})
    u = {c: c for c in cons}
    acts = tuple(Act(frame.space, o.payoffs, o.label) for o in opts)
    return GeneralizedFrame(
        frame.space, frame.pi, tuple(cons), u, acts,
        frame.agent, tuple(u for _ in frame.space), {},
    )
