"""Reading and writing scenario files.

A scenario file is a UTF-8 JSON document with a ``version`` and a ``kind``:

``probability-frame``
    states, prior ``pi``, the agent's credence at every state, and optional
    named ``families`` of decision problems (lists of options).
``generalized-frame``
    states, ``pi``, consequences with a principal ``utility``, ``acts``,
    per-state agent ``beliefs`` and ``utilities``, optional ``tie_break``
    and named ``families`` of problems (lists of act labels).
``scoring``
    states, ``pi``, the two reaches ``mu_self`` and ``mu_delegate`` (gambles
    with weights), ``strategies`` for the principal and the agent, and an
    optional default ``convention``.
``bandit``
    either a named ``scenario`` or explicit ``states``, ``pi`` and ``arms``,
    plus ``horizon``, ``seed``, ``trials`` and exploration settings.

Probabilities, payoffs and utilities are exact: integers or strings such as
``"3/5"``. Float literals are rejected everywhere except in bandit arm
payoffs, where the decimal literal is read exactly. Errors point at the
offending line and column.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Any, Mapping

from ._rational import fmt
from .bandit import ArmSpec, BanditConfig, scenario_bandit
from .frames import Act, Credence, DecisionProblemRV, GeneralizedFrame, OptionRV, ProbabilityFrame, StateSpace
from .scoring import DecisionStrategy, Gamble, GambleDistribution, ScoreConvention

__all__ = [
    "VERSION",
    "ScenarioFileError",
    "FrameDocument",
    "GeneralizedDocument",
    "ScoringDocument",
    "BanditDocument",
    "loads",
    "load",
    "dumps",
    "dump",
    "to_json",
    "scenario_document",
    "state_key",
]

VERSION = 1
KINDS = ("probability-frame", "generalized-frame", "scoring", "bandit")
_RATIONAL = re.compile(r"\s*-?\d+(\s*/\s*\d+)?\s*")


class ScenarioFileError(ValueError):
    """Malformed scenario file; carries the line and column when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None, path: tuple = ()):
        self.message, self.line, self.column, self.path = message, line, column, path
        where = f"line {line}, column {column}: " if line is not None else ""
        at = f" (at {'/'.join(map(str, path))})" if path else ""
        super().__init__(f"{where}{message}{at}")


# --------------------------------------------------------------------------
# Documents


@dataclass(frozen=True)
class FrameDocument:
    frame: ProbabilityFrame
    families: Mapping = field(default_factory=dict)  # name -> tuple of DecisionProblemRV


@dataclass(frozen=True, eq=False)
class GeneralizedDocument:
    frame: GeneralizedFrame
    families: Mapping = field(default_factory=dict)  # name -> tuple of label tuples

    def problems(self, name: str) -> tuple:
        return tuple(tuple(self.frame.act(lab) for lab in p) for p in self.families[name])


@dataclass(frozen=True)
class ScoringDocument:
    pi: Credence
    mu_self: GambleDistribution
    mu_delegate: GambleDistribution
    principal: DecisionStrategy
    agent: DecisionStrategy
    convention: ScoreConvention | None = None


@dataclass(frozen=True)
class BanditDocument:
    """A bandit run: a named scenario, or an explicit config."""

    horizon: int
    seed: int | None = None
    trials: int = 1
    exploration: str = "listing"
    normalize_rewards: bool = False
    scenario: str | None = None
    appendix_e: bool = False
    config: BanditConfig | None = None

    def build(self, horizon: int | None = None, seed: int | None = None, appendix_e: bool | None = None) -> BanditConfig:
        """The run's config, with optional overrides from the command line."""
        h = self.horizon if horizon is None else horizon
        s = (self.seed or 0) if seed is None else seed
        if self.scenario is not None:
            ae = self.appendix_e if appendix_e is None else appendix_e
            return scenario_bandit(self.scenario, h, s, self.exploration, ae, self.normalize_rewards)
        c = self.config
        return BanditConfig(c.pi, c.arms, h, s, c.exploration, c.normalize_rewards, c.listing_offset)


# --------------------------------------------------------------------------
# Positions


def _locate(text: str) -> dict:
    """Map every JSON path to the (line, column) where its value starts."""
    dec = json.JSONDecoder()
    pos: dict = {}
    ws = re.compile(r"\s*")

    def skip(i):
        return ws.match(text, i).end()

    def value(i, path):
        i = skip(i)
        pos[path] = i
        ch = text[i] if i < len(text) else ""
        if ch == "{":
            i = skip(i + 1)
            if text[i] == "}":
                return i + 1
            while True:
                key, i = json.decoder.scanstring(text, skip(i) + 1)
                i = skip(i) + 1  # the colon
                i = skip(value(i, path + (key,)))
                if text[i] == "}":
                    return i + 1
                i += 1
        if ch == "[":
            i = skip(i + 1)
            if text[i] == "]":
                return i + 1
            k = 0
            while True:
                i = skip(value(i, path + (k,)))
                k += 1
                if text[i] == "]":
                    return i + 1
                i += 1
        _, end = dec.raw_decode(text, i)
        return end

    value(0, ())
    out = {}
    for path, i in pos.items():
        line = text.count("\n", 0, i) + 1
        col = i - (text.rfind("\n", 0, i) + 1) + 1
        out[path] = (line, col)
    return out


class _Reader:
    def __init__(self, text: str):
        self.text = text
        self._pos = None

    def fail(self, msg: str, path: tuple = ()):
        if self._pos is None:
            self._pos = _locate(self.text)
        p = tuple(path)
        while p and p not in self._pos:
            p = p[:-1]
        line, col = self._pos.get(p, (None, None))
        raise ScenarioFileError(msg, line, col, tuple(path))

    def get(self, obj, key, path, kind=None, default=...):
        if not isinstance(obj, dict):
            self.fail("expected an object", path)
        if key not in obj:
            if default is ...:
                self.fail(f"missing field {key!r}", path)
            return default
        v = obj[key]
        if kind is not None and not isinstance(v, kind) or isinstance(v, bool) and kind is int:
            self.fail(f"field {key!r} has the wrong type", path + (key,))
        return v

    def rational(self, v, path, allow_decimal=False) -> Fraction:
        if isinstance(v, bool):
            self.fail("expected a rational, got a boolean", path)
        if isinstance(v, int):
            return Fraction(v)
        if isinstance(v, Decimal):
            if allow_decimal:
                return Fraction(v)
            self.fail(f"decimal literal {v} is not allowed here; write it as an integer or 'p/q' string", path)
        if isinstance(v, str) and _RATIONAL.fullmatch(v):
            q = v.replace(" ", "")
            if q.endswith("/0"):
                self.fail("zero denominator", path)
            return Fraction(q)
        self.fail(f"expected an integer or 'p/q' string, got {v!r}", path)

    def state(self, v, path):
        if isinstance(v, bool) or not isinstance(v, (str, int)):
            self.fail("states must be strings or integers", path)
        return v

    def states(self, doc) -> StateSpace:
        raw = self.get(doc, "states", (), list)
        if not raw:
            self.fail("at least one state is required", ("states",))
        sts = tuple(self.state(s, ("states", i)) for i, s in enumerate(raw))
        if len(set(sts)) != len(sts):
            self.fail("duplicate state", ("states",))
        return StateSpace(sts)

    def by_state(self, space: StateSpace, v, path, conv) -> tuple:
        """Values given as a list aligned with the states or an object keyed by state."""
        if isinstance(v, list):
            if len(v) != len(space):
                self.fail(f"expected {len(space)} entries, got {len(v)}", path)
            return tuple(conv(x, path + (i,)) for i, x in enumerate(v))
        if isinstance(v, dict):
            keys = {_key(s): s for s in space}
            extra = set(v) - set(keys)
            if extra:
                self.fail(f"unknown state {sorted(extra)[0]!r}", path)
            missing = [k for k in keys if k not in v]
            if missing:
                self.fail(f"no entry for state {missing[0]!r}", path)
            return tuple(conv(v[_key(s)], path + (_key(s),)) for s in space)
        self.fail("expected a list or an object keyed by state", path)

    def credence(self, space, v, path) -> Credence:
        w = self.by_state(space, v, path, self.rational)
        if any(x < 0 for x in w):
            self.fail("probabilities must be non-negative", path)
        if sum(w) != 1:
            self.fail(f"probabilities sum to {fmt(sum(w))}, not 1", path)
        return Credence(space, w)


def _key(state) -> str:
    return str(state)


def state_key(state) -> str:
    """String form of a state; composite states are joined with ``|``."""
    if isinstance(state, tuple):
        return "|".join(state_key(p) for p in state)
    if isinstance(state, Fraction):
        return fmt(state)
    return str(state)


def _rat(q: Fraction):
    q = Fraction(q)
    return q.numerator if q.denominator == 1 else fmt(q)


# --------------------------------------------------------------------------
# Parsing


def loads(text: str):
    """Parse a scenario file into one of the document types."""
    try:
        doc = json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as e:
        raise ScenarioFileError(e.msg, e.lineno, e.colno) from None
    r = _Reader(text)
    if not isinstance(doc, dict):
        r.fail("a scenario file is a JSON object")
    version = r.get(doc, "version", (), int)
    if version != VERSION:
        r.fail(f"unsupported version {version}", ("version",))
    kind = r.get(doc, "kind", (), str)
    if kind not in KINDS:
        r.fail(f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}", ("kind",))
    return {"probability-frame": _frame, "generalized-frame": _generalized,
            "scoring": _scoring, "bandit": _bandit}[kind](r, doc)


def load(path) -> Any:
    with open(path, encoding="utf-8") as f:
        return loads(f.read())


def _options(r: _Reader, space, raw, path) -> DecisionProblemRV:
    if not isinstance(raw, list) or not raw:
        r.fail("a problem is a non-empty list of options", path)
    opts = []
    for i, o in enumerate(raw):
        p = path + (i,)
        lab = r.get(o, "label", p, str)
        pay = r.by_state(space, r.get(o, "payoffs", p), p + ("payoffs",), r.rational)
        opts.append(OptionRV(space, pay, lab))
    try:
        return DecisionProblemRV(tuple(opts))
    except ValueError as e:
        r.fail(str(e), path)


def _frame(r: _Reader, doc) -> FrameDocument:
    space = r.states(doc)
    pi = r.credence(space, r.get(doc, "pi", ()), ("pi",))
    agent = r.by_state(space, r.get(doc, "agent", ()), ("agent",), lambda v, p: r.credence(space, v, p))
    tb = r.get(doc, "tie_break", (), list, None)
    fams = {}
    for name, probs in r.get(doc, "families", (), dict, {}).items():
        p = ("families", name)
        if not isinstance(probs, list):
            r.fail("a family is a list of problems", p)
        fams[name] = tuple(_options(r, space, q, p + (i,)) for i, q in enumerate(probs))
    return FrameDocument(ProbabilityFrame(space, pi, agent, tuple(tb) if tb is not None else None), fams)


def _generalized(r: _Reader, doc) -> GeneralizedDocument:
    space = r.states(doc)
    pi = r.credence(space, r.get(doc, "pi", ()), ("pi",))
    cons = r.get(doc, "consequences", (), list)
    for i, c in enumerate(cons):
        if not isinstance(c, str):
            r.fail("consequences are strings", ("consequences", i))
    if len(set(cons)) != len(cons):
        r.fail("duplicate consequence", ("consequences",))

    def utility(v, path):
        if v == "identity":
            return {c: r.rational(c, path) for c in cons}
        if not isinstance(v, dict):
            r.fail("a utility is 'identity' or an object keyed by consequence", path)
        missing = [c for c in cons if c not in v]
        if missing:
            r.fail(f"utility undefined on {missing[0]!r}", path)
        extra = set(v) - set(cons)
        if extra:
            r.fail(f"unknown consequence {sorted(extra)[0]!r}", path)
        return {c: r.rational(v[c], path + (c,)) for c in cons}

    u = utility(r.get(doc, "utility", ()), ("utility",))
    acts = []
    for i, a in enumerate(r.get(doc, "acts", (), list)):
        p = ("acts", i)
        lab = r.get(a, "label", p, str)

        def cons_of(v, path):
            if v not in cons:
                r.fail(f"unknown consequence {v!r}", path)
            return v

        acts.append(Act(space, r.by_state(space, r.get(a, "outcome", p), p + ("outcome",), cons_of), lab))
    labels = [a.label for a in acts]
    if len(set(labels)) != len(labels):
        r.fail("duplicate act label", ("acts",))
    beliefs = r.by_state(space, r.get(doc, "beliefs", ()), ("beliefs",), lambda v, p: r.credence(space, v, p))
    raw_u = r.get(doc, "utilities", (), default="principal")
    if raw_u == "principal":
        utils = tuple(dict(u) for _ in space)
    else:
        utils = r.by_state(space, raw_u, ("utilities",),
                           lambda v, p: dict(u) if v == "principal" else utility(v, p))
    tb = {}
    for k, v in r.get(doc, "tie_break", (), dict, {}).items():
        p = ("tie_break", k)
        match = [s for s in space if _key(s) == k]
        if not match:
            r.fail(f"unknown state {k!r}", p)
        if not isinstance(v, list) or any(x not in labels for x in v):
            r.fail("tie_break lists act labels", p)
        tb[match[0]] = tuple(v)
    fams = {}
    for name, probs in r.get(doc, "families", (), dict, {}).items():
        p = ("families", name)
        if not isinstance(probs, list):
            r.fail("a family is a list of problems", p)
        out = []
        for i, q in enumerate(probs):
            if not isinstance(q, list) or not q or any(x not in labels for x in q):
                r.fail("a problem is a non-empty list of act labels", p + (i,))
            out.append(tuple(q))
        fams[name] = tuple(out)
    g = GeneralizedFrame(space, pi, tuple(cons), u, tuple(acts), beliefs, utils, tb)
    return GeneralizedDocument(g, fams)


def _distribution(r: _Reader, space, raw, path, allow_decimal=False) -> GambleDistribution:
    if not isinstance(raw, list):
        r.fail("a reach is a list of weighted gambles", path)
    sup = []
    for i, g in enumerate(raw):
        p = path + (i,)
        lab = r.get(g, "label", p, str)
        pay = r.by_state(space, r.get(g, "payoffs", p), p + ("payoffs",),
                         lambda v, q: r.rational(v, q, allow_decimal))
        fee = r.rational(r.get(g, "fee", p, default=0), p + ("fee",), allow_decimal)
        w = r.rational(r.get(g, "weight", p), p + ("weight",))
        if w <= 0:
            r.fail("gamble weights must be positive", p + ("weight",))
        sup.append((Gamble(space, pay, lab, fee), w))
    if sup and sum(w for _, w in sup) != 1:
        r.fail(f"gamble weights sum to {fmt(sum(w for _, w in sup))}, not 1", path)
    if len({g.label for g, _ in sup}) != len(sup):
        r.fail("duplicate gamble label", path)
    return GambleDistribution(tuple(sup))


def _strategy(r: _Reader, space, pi, gambles, raw, path, name) -> DecisionStrategy:
    """``{"accept": {state: [labels]}}`` or ``{"rule": ...}``."""
    if not isinstance(raw, dict):
        r.fail("a strategy is an object", path)
    labels = list(dict.fromkeys(g.label for g in gambles))
    if "rule" in raw:
        rule = raw["rule"]
        if rule == "ideal":
            f = lambda s, g: g.accepted_payoff(s) >= 0  # noqa: E731
        elif rule == "always":
            f = lambda s, g: True  # noqa: E731
        elif rule == "never":
            f = lambda s, g: False  # noqa: E731
        elif rule == "expected-value":
            tie = r.get(raw, "accept_on_tie", path, bool, True)
            ev = {}
            for g in gambles:
                e = sum((pi[s] * g.accepted_payoff(s) for s in space), Fraction(0))
                ev[g.label] = e >= 0 if tie else e > 0
            f = lambda s, g: ev[g.label]  # noqa: E731
        else:
            r.fail(f"unknown rule {rule!r}", path + ("rule",))
        return DecisionStrategy({(s, g.label): bool(f(s, g)) for s in space for g in gambles}, None, name)
    table = r.get(raw, "accept", path, dict)
    keys = {_key(s): s for s in space}
    acc = {(s, lab): False for s in space for lab in labels}
    for k, labs in table.items():
        p = path + ("accept", k)
        if k not in keys:
            r.fail(f"unknown state {k!r}", p)
        if not isinstance(labs, list) or any(x not in labels for x in labs):
            r.fail("accepted gambles are listed by label", p)
        for lab in labs:
            acc[(keys[k], lab)] = True
    return DecisionStrategy(acc, None, name)


def _scoring(r: _Reader, doc) -> ScoringDocument:
    space = r.states(doc)
    pi = r.credence(space, r.get(doc, "pi", ()), ("pi",))
    mu_s = _distribution(r, space, r.get(doc, "mu_self", ()), ("mu_self",))
    mu_d = _distribution(r, space, r.get(doc, "mu_delegate", ()), ("mu_delegate",))
    strat = r.get(doc, "strategies", (), dict)
    gam = mu_s.gambles + mu_d.gambles
    d_p = _strategy(r, space, pi, gam, r.get(strat, "principal", ("strategies",)), ("strategies", "principal"), "principal")
    d_a = _strategy(r, space, pi, gam, r.get(strat, "agent", ("strategies",)), ("strategies", "agent"), "agent")
    conv = r.get(doc, "convention", (), str, None)
    if conv is not None:
        try:
            conv = ScoreConvention(conv)
        except ValueError:
            r.fail(f"unknown convention {conv!r}", ("convention",))
    return ScoringDocument(pi, mu_s, mu_d, d_p, d_a, conv)


def _bandit(r: _Reader, doc) -> BanditDocument:
    horizon = r.get(doc, "horizon", (), int)
    seed = r.get(doc, "seed", (), int, None)
    trials = r.get(doc, "trials", (), int, 1)
    if trials < 1:
        r.fail("trials must be at least 1", ("trials",))
    expl = r.get(doc, "exploration", (), str, "listing")
    if expl not in ("listing", "textbook"):
        r.fail("exploration is 'listing' or 'textbook'", ("exploration",))
    norm = r.get(doc, "normalize_rewards", (), bool, False)
    scenario = r.get(doc, "scenario", (), str, None)
    if scenario is not None:
        from .scenarios import SCENARIOS

        if scenario not in SCENARIOS:
            r.fail(f"unknown scenario {scenario!r}", ("scenario",))
        ae = r.get(doc, "appendix_e", (), bool, False)
        return BanditDocument(horizon, seed, trials, expl, norm, scenario, ae)
    space = r.states(doc)
    pi = r.credence(space, r.get(doc, "pi", ()), ("pi",))
    arms = []
    for i, a in enumerate(r.get(doc, "arms", (), list)):
        p = ("arms", i)
        kind = r.get(a, "kind", p, str)
        if kind not in ("self", "delegate"):
            r.fail("arm kind is 'self' or 'delegate'", p + ("kind",))
        mu = _distribution(r, space, r.get(a, "mu", p), p + ("mu",), allow_decimal=True)
        if not mu.support:
            r.fail("an arm needs at least one gamble", p + ("mu",))
        d = _strategy(r, space, pi, mu.gambles, r.get(a, "strategy", p), p + ("strategy",), r.get(a, "label", p, str, ""))
        arms.append(ArmSpec(kind, d, mu, r.get(a, "label", p, str, "")))
    if len(arms) < 2:
        r.fail("a bandit needs at least two arms", ("arms",))
    if horizon < len(arms):
        r.fail(f"horizon {horizon} is shorter than the {len(arms)} initial pulls", ("horizon",))
    off = doc.get("listing_offset")
    off = None if off is None else r.rational(off, ("listing_offset",), allow_decimal=True)
    cfg = BanditConfig(pi, tuple(arms), horizon, seed or 0, expl, norm, off)
    return BanditDocument(horizon, seed, trials, expl, norm, None, False, cfg)


# --------------------------------------------------------------------------
# Serialization


def _by_state(space, values, conv=_rat) -> dict:
    return {_key(s): conv(v) for s, v in zip(space, values)}


def _gambles(mu: GambleDistribution) -> list:
    out = []
    for g, w in mu.support:
        d = {"label": g.label, "payoffs": _by_state(g.space, g.payoffs)}
        if g.fee:
            d["fee"] = _rat(g.fee)
        d["weight"] = _rat(w)
        out.append(d)
    return out


def _strategy_json(space, gambles, d: DecisionStrategy) -> dict:
    labels = list(dict.fromkeys(g.label for g in gambles))
    return {"accept": {_key(s): [lab for lab in labels if d(s, _Label(lab))] for s in space}}


class _Label:
    # stands in for a gamble when only its label matters
    def __init__(self, label):
        self.label = label


def to_json(doc) -> dict:
    """The JSON object for a document (the inverse of :func:`loads`)."""
    head = {"version": VERSION}
    if isinstance(doc, FrameDocument):
        f = doc.frame
        out = {**head, "kind": "probability-frame", "states": list(f.space.states),
               "pi": _by_state(f.space, f.pi.weights),
               "agent": {_key(s): _by_state(f.space, c.weights) for s, c in zip(f.space, f.agent)}}
        if f.tie_break is not None:
            out["tie_break"] = list(f.tie_break)
        if doc.families:
            out["families"] = {
                name: [[{"label": o.label, "payoffs": _by_state(f.space, o.payoffs)} for o in p] for p in probs]
                for name, probs in doc.families.items()
            }
        return out
    if isinstance(doc, GeneralizedDocument):
        g = doc.frame
        out = {**head, "kind": "generalized-frame", "states": list(g.space.states),
               "pi": _by_state(g.space, g.pi.weights),
               "consequences": list(g.consequences),
               "utility": {c: _rat(g.u[c]) for c in g.consequences},
               "acts": [{"label": a.label, "outcome": _by_state(g.space, a.outcome, lambda c: c)} for a in g.acts],
               "beliefs": {_key(s): _by_state(g.space, b.weights) for s, b in zip(g.space, g.agent_beliefs)},
               "utilities": {_key(s): ("principal" if v == g.u else {c: _rat(v[c]) for c in g.consequences})
                             for s, v in zip(g.space, g.agent_utilities)}}
        if g.tie_break:
            out["tie_break"] = {_key(s): list(v) for s, v in g.tie_break.items()}
        if doc.families:
            out["families"] = {name: [list(p) for p in probs] for name, probs in doc.families.items()}
        return out
    if isinstance(doc, ScoringDocument):
        space = doc.pi.space
        gam = doc.mu_self.gambles + doc.mu_delegate.gambles
        out = {**head, "kind": "scoring", "states": list(space.states),
               "pi": _by_state(space, doc.pi.weights),
               "mu_self": _gambles(doc.mu_self), "mu_delegate": _gambles(doc.mu_delegate),
               "strategies": {"principal": _strategy_json(space, gam, doc.principal),
                              "agent": _strategy_json(space, gam, doc.agent)}}
        if doc.convention is not None:
            out["convention"] = doc.convention.value
        return out
    if isinstance(doc, BanditDocument):
        out = {**head, "kind": "bandit"}
        if doc.scenario is not None:
            out["scenario"] = doc.scenario
            if doc.appendix_e:
                out["appendix_e"] = True
        else:
            c = doc.config
            space = c.pi.space
            out["states"] = list(space.states)
            out["pi"] = _by_state(space, c.pi.weights)
            out["arms"] = [{"kind": a.kind, "label": a.label, "mu": _gambles(a.mu),
                            "strategy": _strategy_json(space, a.mu.gambles, a.strategy)} for a in c.arms]
            if c.listing_offset is not None:
                out["listing_offset"] = _rat(c.listing_offset)
        out["horizon"] = doc.horizon
        if doc.seed is not None:
            out["seed"] = doc.seed
        out["trials"] = doc.trials
        out["exploration"] = doc.exploration
        if doc.normalize_rewards:
            out["normalize_rewards"] = True
        return out
    raise TypeError(f"cannot serialize {type(doc).__name__}")


def dumps(doc) -> str:
    return json.dumps(to_json(doc), indent=2, ensure_ascii=False) + "\n"


def dump(doc, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(dumps(doc))


# --------------------------------------------------------------------------
# Named scenarios as files


def _restate(space: StateSpace, mu: GambleDistribution, new: StateSpace) -> GambleDistribution:
    return GambleDistribution(tuple(
        (Gamble(new, g.payoffs, g.label, g.fee), w) for g, w in mu.support
    ))


def _restrategy(old: StateSpace, new: StateSpace, d: DecisionStrategy) -> DecisionStrategy:
    m = dict(zip(old, new))
    return DecisionStrategy({(m[s], lab): v for (s, lab), v in d.accept.items()}, d.default, d.name)


def scenario_document(name: str, appendix_e: bool = False) -> ScoringDocument:
    """A named scenario as a scoring document, composite states stringified."""
    from .scenarios import run_scenario

    res = run_scenario(name, appendix_e=appendix_e)
    sc = res.scenario
    old = sc.space
    new = StateSpace(tuple(state_key(s) for s in old))
    pi = Credence(new, sc.pi.weights)
    if name == "reach":
        d_p = d_a = sc.strategy
    else:
        d_p, d_a = sc.principal, sc.agent
    return ScoringDocument(
        pi, _restate(old, sc.mu_self, new), _restate(old, sc.mu_delegate, new),
        _restrategy(old, new, d_p), _restrategy(old, new, d_a), res.convention,
    )
