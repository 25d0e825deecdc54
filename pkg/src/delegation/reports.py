"""Rendering results as text tables and JSON, and checking them against golden tables.

Every rational is reported twice: exactly (``"-47/30"``) and as a decimal
rounded half away from zero to two places (``"-1.57"``), the way the
worked-example tables print them.
"""

from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources

from ._rational import fmt, fmt_decimal
from .scenarios import BoxRow, PeekRow, ScenarioResult
from .scoring import ScoreReport

__all__ = [
    "rational",
    "score_json",
    "score_lines",
    "table_json",
    "table_lines",
    "load_golden",
    "compare_golden",
    "format_table",
]


def rational(q, places: int = 2) -> dict:
    q = Fraction(q)
    return {"exact": fmt(q), "decimal": fmt_decimal(q, places)}


def _num(q) -> str:
    # compact rendering for table cells
    q = Fraction(q)
    return fmt(q) if q.denominator == 1 else f"{fmt(q)} ({fmt_decimal(q)})"


def _plain(v):
    if isinstance(v, Fraction):
        return fmt(v)
    if isinstance(v, tuple):
        return [_plain(x) for x in v]
    return v


def score_json(r: ScoreReport, trace: bool = False) -> dict:
    out = {
        "convention": r.convention.value,
        "loss": rational(r.loss),
        "gain": rational(r.gain),
        "score": rational(r.score),
        "by_gamble": {str(k): {"loss": rational(lo), "gain": rational(ga)} for k, (lo, ga) in r.by_gamble().items()},
    }
    if trace:
        out["trace"] = [
            {"state": _plain(t.state), "gamble": t.gamble, "accepted": t.accepted, "value": fmt(t.value),
             "classification": t.classification, "magnitude": fmt(t.magnitude), "weight": fmt(t.weight)}
            for t in r.trace
        ]
    return out


def score_lines(title: str, r: ScoreReport) -> list:
    return [
        f"{title} ({r.convention.value} convention)",
        f"  loss   {_num(r.loss)}",
        f"  gain   {_num(r.gain)}",
        f"  score  {_num(r.score)}",
    ]


def format_table(header: list, rows: list) -> list:
    """Fixed-width columns, left aligned, two spaces apart."""
    cells = [[str(c) for c in header]] + [[str(c) for c in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    fmt_row = lambda r: "  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip()  # noqa: E731
    return [fmt_row(cells[0]), fmt_row(["-" * w for w in widths])] + [fmt_row(r) for r in cells[1:]]


def _set(values) -> str:
    return "{" + ", ".join(fmt(Fraction(v)) for v in values) + "}"


def _eu(v) -> str:
    return fmt(v) if isinstance(v, Fraction) else f"{v:.6g}"


def _noise(r: PeekRow) -> str:
    shift = Fraction(r.shift)
    return f"{r.noise}({'+' if shift > 0 else ''}{fmt(shift)})" if shift else str(r.noise)


def _signed_magnitude(row: PeekRow) -> Fraction:
    return row.magnitude if row.classification == "gain" else -row.magnitude


def table_lines(result: ScenarioResult) -> list:
    rows = result.table
    if rows and isinstance(rows[0], BoxRow):
        head = ["box", "outcomes", "expected", "decision", "available", "loss", "gain"]
        body = [[r.label, _set(r.outcomes), fmt_decimal(r.expected), "open" if r.opened else "not open",
                 r.availability, fmt_decimal(r.loss), fmt_decimal(r.gain)] for r in rows]
        return format_table(head, body)
    head = ["true", "peeked", "noise", "belief", "agent EU", "action", "payoff", "outcome"]
    body = [[fmt(r.true), _set(r.peeked), _noise(r), _set(r.belief),
             _eu(r.eu), "open" if r.accepted else "not open", fmt(r.value),
             f"{fmt(_signed_magnitude(r))} ({r.classification})"] for r in rows]
    return format_table(head, body)


def table_json(result: ScenarioResult) -> list:
    out = []
    for r in result.table:
        if isinstance(r, BoxRow):
            out.append({"box": r.label, "outcomes": [fmt(Fraction(v)) for v in r.outcomes],
                        "expected": rational(r.expected), "opened": r.opened, "available": r.availability,
                        "loss": rational(r.loss), "gain": rational(r.gain)})
        else:
            out.append({"true": fmt(r.true), "peeked": [fmt(v) for v in r.peeked], "noise": r.noise,
                        "shift": fmt(Fraction(r.shift)), "belief": [fmt(v) for v in r.belief],
                        "eu": _eu(r.eu), "opened": r.accepted, "payoff": fmt(r.value),
                        "classification": r.classification, "magnitude": fmt(r.magnitude)})
    return out


# --------------------------------------------------------------------------
# Golden tables


def load_golden(name: str) -> dict:
    text = resources.files("delegation").joinpath("golden").joinpath(f"{name}.json").read_text(encoding="utf-8")
    return json.loads(text)


def _q(v) -> Fraction:
    return Fraction(str(v))


def compare_golden(result: ScenarioResult, golden: dict | None = None) -> list:
    """Cell-by-cell differences between ``result`` and its golden table.

    Returns human-readable mismatch descriptions; an empty list is a pass.
    Belief sets are compared as sets and agent expected utilities as exact
    rationals, so ``"5.5"`` in the table matches ``11/2``.
    """
    golden = golden or load_golden(result.name)
    cols = golden["columns"]
    want = [dict(zip(cols, r)) for r in golden["rows"]]
    got = list(result.table)
    bad = []
    if len(want) != len(got):
        return [f"row count: table has {len(want)}, generated {len(got)}"]
    if result.name == "reach":
        index = {r.label: r for r in got}
        for w in want:
            r = index.get(w["box"])
            if r is None:
                bad.append(f"box {w['box']}: missing")
                continue
            checks = {
                "outcomes": ([_q(v) for v in w["outcomes"]], [Fraction(v) for v in r.outcomes]),
                "expected": (w["expected"], fmt_decimal(r.expected)),
                "decision": (w["decision"], "open" if r.opened else "not open"),
                "available": (w["available"], r.availability),
                "loss": (w["loss"], fmt_decimal(r.loss)),
                "gain": (w["gain"], fmt_decimal(r.gain)),
            }
            bad += [f"box {w['box']} {k}: table {a!r}, generated {b!r}" for k, (a, b) in checks.items() if a != b]
        agg = golden.get("aggregates", {})
        for side, rep in (("self", result.principal_report), ("delegate", result.agent_report)):
            for k in ("loss", "gain", "score"):
                if k in agg.get(side, {}) and agg[side][k] != fmt_decimal(getattr(rep, k)):
                    bad.append(f"{side} {k}: table {agg[side][k]}, generated {fmt_decimal(getattr(rep, k))}")
        return bad

    def key(true, peeked, noise):
        return (_q(true), tuple(sorted(_q(v) for v in peeked)), noise)

    index = {key(r.true, r.peeked, r.noise if "noise" in cols else None): r for r in got}
    signed = "noise" in cols  # the noisy-expert table prints signed magnitudes
    for w in want:
        k = key(w["true"], w["peeked"], w.get("noise"))
        r = index.get(k)
        name = f"row (true {w['true']}, peeked {w['peeked']}{', ' + w['noise'] if 'noise' in w else ''})"
        if r is None:
            bad.append(f"{name}: missing")
            continue
        outcome = _signed_magnitude(r) if signed else r.value
        checks = {
            "belief": (sorted(_q(v) for v in w["belief"]), sorted(Fraction(v) for v in r.belief)),
            "eu": (_q(w["eu"]), r.eu),
            "action": (w["action"], "open" if r.accepted else "not open"),
            "outcome": (_q(w["outcome"]), outcome),
            "classification": (w["classification"], r.classification),
        }
        if "shift" in w:
            checks["shift"] = (_q(w["shift"]), Fraction(r.shift))
        for c, (a, b) in checks.items():
            if a != b:
                bad.append(f"{name} {c}: table {_plain(a) if not isinstance(a, list) else a}, generated {_plain(b) if not isinstance(b, list) else b}")
    return bad
