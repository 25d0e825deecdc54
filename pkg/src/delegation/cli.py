"""Command-line front end.

Exit codes: 0 when the command succeeds and any checked condition holds,
1 when a checked condition fails (a witness is printed), 2 for usage and
file errors. Output is deterministic: the same invocation on the same file
prints the same bytes.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

from . import __version__
from ._rational import fmt
from .bandit import convergence_experiment
from .deference import (
    ClarityError,
    check_constant_acts,
    check_posterior_alignment,
    check_total_trust,
    check_valuing_over_family,
    construct_valuing_counterexample,
    event_witness_to_cell_witness,
    falsify_total_trust_randomized,
)
from .frames import check_clarity
from .io import BanditDocument, FrameDocument, GeneralizedDocument, ScenarioFileError, ScoringDocument, loads
from .reports import compare_golden, format_table, rational, score_json, score_lines, table_json, table_lines
from .scenarios import SCENARIOS, run_scenario
from .scoring import ScoreConvention, delegation_criterion_reach, score

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# --------------------------------------------------------------------------
# Report plumbing


class Report:
    def __init__(self, argv, digest):
        self.argv = list(argv)
        self.digest = digest
        self.results: dict = {}
        self.lines: list = []

    def text(self) -> str:
        head = [f"delegation {__version__}", f"command: {' '.join(self.argv)}", f"inputs: {self.digest}", ""]
        return "\n".join(head + self.lines) + "\n"

    def json(self) -> str:
        doc = {"tool": "delegation", "version": __version__, "command": self.argv,
               "inputs_digest": self.digest, "results": self.results}
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def _digest(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


def _read(path):
    try:
        with open(path, "rb") as f:
            data = f.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    try:
        doc = loads(data.decode("utf-8"))
    except UnicodeDecodeError:
        raise UsageError(f"{path}: not UTF-8") from None
    except ScenarioFileError as e:
        raise UsageError(f"{path}: {e}") from None
    return doc, _digest(data)


def _expect(doc, kinds, path):
    if not isinstance(doc, kinds):
        names = {FrameDocument: "probability-frame", GeneralizedDocument: "generalized-frame",
                 ScoringDocument: "scoring", BanditDocument: "bandit"}
        want = " or ".join(names[k] for k in (kinds if isinstance(kinds, tuple) else (kinds,)))
        raise UsageError(f"{path}: expected a {want} file")


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("DELEG_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"DELEG_SEED must be an integer, got {env!r}") from None


def _states(xs) -> list:
    return [s if isinstance(s, (int, str)) else str(s) for s in xs]


# --------------------------------------------------------------------------
# Commands


def cmd_score(args, rep: Report) -> int:
    doc, rep.digest = _read(args.file)
    _expect(doc, ScoringDocument, args.file)
    conv = args.convention or (doc.convention.value if doc.convention else None)
    if conv is None:
        raise UsageError("the file sets no convention; pass --convention strict or --convention credit")
    conv = ScoreConvention(conv)
    out = {"convention": conv.value}
    if args.side in ("self", "both"):
        r = score(doc.pi, doc.mu_self, doc.principal, conv)
        out["self"] = score_json(r, args.trace)
        rep.lines += score_lines("self: principal on own reach", r) + [""]
    if args.side in ("delegate", "both"):
        r = score(doc.pi, doc.mu_delegate, doc.agent, conv)
        out["delegate"] = score_json(r, args.trace)
        rep.lines += score_lines("delegate: agent on its reach", r) + [""]
    if args.side == "both":
        v = delegation_criterion_reach(doc.pi, doc.mu_self, doc.mu_delegate, doc.principal, doc.agent, conv)
        out["verdict"] = "delegate" if v.delegate else "do-not-delegate"
        out["margin"] = rational(v.margin)
        rep.lines.append(f"verdict: {out['verdict']} (score difference {fmt(v.margin)})")
    rep.results = out
    return EXIT_OK


def _trust_witness_json(frame, w) -> dict:
    return {"x": dict(zip(map(str, frame.space), (fmt(v) for v in w.x.payoffs))),
            "t": fmt(w.t), "event": _states(w.event(frame)),
            "shortfall": fmt(w.shortfall(frame)), "verified": w.verify(frame)}


def cmd_check_trust(args, rep: Report) -> int:
    doc, rep.digest = _read(args.file)
    _expect(doc, FrameDocument, args.file)
    frame = doc.frame
    v = check_total_trust(frame)
    seed = _seed(args)
    rnd = falsify_total_trust_randomized(frame, args.trials, seed=seed)
    out = {"total_trust": v.holds, "falsifier": {"trials": args.trials, "seed": seed,
                                                 "found_violation": not rnd.holds}}
    rep.lines.append(f"total trust: {'holds' if v.holds else 'fails'}")
    rep.lines.append(f"randomized falsifier ({args.trials} trials, seed {seed}): "
                     f"{'violation found' if not rnd.holds else 'no violation found'}")
    if v.witness is not None:
        out["witness"] = _trust_witness_json(frame, v.witness)
        w = out["witness"]
        rep.lines += ["", "witness:", f"  x      {w['x']}", f"  t      {w['t']}",
                      f"  event  {w['event']} (agent expects x >= t exactly here)",
                      f"  principal's sum over the event of pi * (x - t) = {w['shortfall']}"]
    if v.holds and not rnd.holds:
        out["falsifier"]["witness"] = _trust_witness_json(frame, rnd.witness)
        rep.lines.append("warning: the falsifier contradicts the exact checker")
        rep.results = out
        return EXIT_FAIL
    rep.results = out
    return EXIT_OK if v.holds else EXIT_FAIL


def _family(doc, name):
    if not doc.families:
        if name is not None:
            raise UsageError(f"the file defines no families, so there is no {name!r}")
        return None, None
    if name is None:
        name = next(iter(doc.families))
    if name not in doc.families:
        raise UsageError(f"no family named {name!r}; the file has {', '.join(doc.families)}")
    if isinstance(doc, GeneralizedDocument):
        return name, doc.problems(name)
    return name, doc.families[name]


def _label(o):
    return str(o.label)


def cmd_check_valuing(args, rep: Report) -> int:
    doc, rep.digest = _read(args.file)
    _expect(doc, (FrameDocument, GeneralizedDocument), args.file)
    name, family = _family(doc, args.family)
    if family is None:
        if isinstance(doc, GeneralizedDocument):
            raise UsageError("a generalized frame needs a family of problems to check valuing over")
        # valuing over every problem is equivalent to total trust
        v = check_total_trust(doc.frame)
        rep.results = {"family": "all problems", "valuing": v.holds, "via": "total trust"}
        rep.lines.append(f"valuing over all problems (via total trust): {'holds' if v.holds else 'fails'}")
        if v.witness is not None:
            rep.results["witness"] = _trust_witness_json(doc.frame, v.witness)
            rep.lines.append(f"trust witness: {rep.results['witness']}")
        return EXIT_OK if v.holds else EXIT_FAIL
    v = check_valuing_over_family(doc.frame, family)
    out = {"family": name, "problems": len(family), "valuing": v.holds, "min_advantage": rational(v.margin)}
    rep.lines.append(f"valuing over family {name!r} ({len(family)} problems): {'holds' if v.holds else 'fails'}")
    rep.lines.append(f"smallest advantage of delegating: {fmt(v.margin)}")
    if v.witness is not None:
        w = v.witness
        out["witness"] = {"problem": [_label(o) for o in w.problem], "better_option": _label(w.losing_option),
                          "margin": rational(w.margin)}
        rep.lines.append(f"witness: on {out['witness']['problem']}, choosing {_label(w.losing_option)!r} "
                         f"beats delegating by {fmt(w.margin)}")
    rep.results = out
    return EXIT_OK if v.holds else EXIT_FAIL


def _act_json(g, a) -> dict:
    return {"label": str(a.label), "outcome": dict(zip(map(str, g.space), map(str, a.outcome)))}


def cmd_check_alignment(args, rep: Report) -> int:
    doc, rep.digest = _read(args.file)
    _expect(doc, GeneralizedDocument, args.file)
    g = doc.frame
    if args.acts:
        labels = [x.strip() for x in args.acts.split(",") if x.strip()]
        try:
            g = g.with_acts([g.act(lab) for lab in labels])
        except KeyError as e:
            raise UsageError(f"no act labelled {e.args[0]!r}") from None
    clar = check_clarity(g)
    if not clar:
        rep.results = {"clear": False, "violations": [[str(s), str(t), fmt(m)] for s, t, m in clar.violations]}
        rep.lines.append("the frame is not clear: the agent puts mass outside its own cell")
        for s, t, m in clar.violations[:5]:
            rep.lines.append(f"  at {s}: {fmt(m)} on {t}")
        return EXIT_FAIL
    try:
        v = check_posterior_alignment(g, singleton_events=args.singletons)
    except ClarityError as e:  # pragma: no cover - guarded above
        raise UsageError(str(e)) from None
    out = {"clear": True, "aligned": v.holds, "skipped_cells": [_states(c) for c in v.skipped_cells],
           "constant_acts": check_constant_acts(g)}
    rep.lines.append(f"posterior alignment: {'holds' if v.holds else 'fails'}")
    if v.skipped_cells:
        rep.lines.append(f"cells with zero prior mass (skipped): {out['skipped_cells']}")
    if not out["constant_acts"]:
        rep.lines.append("note: no pair of constant acts with distinct principal utility")
    if v.cell_witness is not None:
        w = v.cell_witness
        out["cell_witness"] = {"cell": _states(w.cell), "a": str(w.a.label), "b": str(w.b.label),
                               "principal": [fmt(w.principal_a), fmt(w.principal_b)],
                               "agent": [fmt(w.agent_a), fmt(w.agent_b)]}
        rep.lines.append(f"preference reversal on cell {_states(w.cell)}: principal {fmt(w.principal_a)} vs "
                         f"{fmt(w.principal_b)} for {w.a.label!r} over {w.b.label!r}; "
                         f"agent {fmt(w.agent_a)} vs {fmt(w.agent_b)}")
    if v.event_witness is not None:
        w = v.event_witness
        out["event_witness"] = {"cell": _states(w.cell), "x": sorted(_states(w.x), key=str),
                                "y": sorted(_states(w.y), key=str),
                                "agent": [fmt(w.agent_x), fmt(w.agent_y)],
                                "principal": [fmt(w.principal_x), fmt(w.principal_y)]}
        rep.lines.append(f"likelihood reversal on cell {_states(w.cell)}: agent {fmt(w.agent_x)} > {fmt(w.agent_y)}, "
                         f"principal {fmt(w.principal_x)} < {fmt(w.principal_y)}")
    if not v.holds:
        cw, g2 = v.cell_witness, g
        if cw is None:
            try:
                g2, cw = event_witness_to_cell_witness(g, v.event_witness)
            except ValueError as e:
                out["counterexample"] = None
                rep.lines.append(f"no counterexample constructed: {e}")
        if cw is not None:
            cx = construct_valuing_counterexample(g2, cw)
            check = check_valuing_over_family(cx.frame, [cx.witness.problem])
            out["counterexample"] = {
                "problem": [_act_json(cx.frame, a) for a in cx.witness.problem],
                "better_option": str(cx.witness.losing_option.label),
                "margin": rational(cx.witness.margin),
                "valuing_fails": not check.holds,
            }
            rep.lines += ["", "counterexample problem:"]
            rep.lines += ["  " + ln for ln in format_table(
                ["act"] + [str(s) for s in g.space],
                [[str(a.label)] + [str(a[s]) for s in g.space] for a in cx.witness.problem])]
            rep.lines.append(f"choosing {cx.witness.losing_option.label!r} beats delegating by {fmt(cx.witness.margin)}"
                             f" (re-checked: valuing {'fails' if not check.holds else 'holds'})")
    rep.results = out
    return EXIT_OK if v.holds else EXIT_FAIL


def cmd_reproduce(args, rep: Report) -> int:
    if args.name not in SCENARIOS:
        raise UsageError(f"unknown scenario {args.name!r}; expected one of {', '.join(SCENARIOS)}")
    if args.golden and args.appendix_e:
        raise UsageError("golden tables exist only for the default parameterization")
    if args.golden and args.convention:
        raise UsageError("golden tables use each scenario's own convention")
    rep.digest = _digest(json.dumps([args.name, args.convention, args.appendix_e]).encode())
    res = run_scenario(args.name, args.convention, args.appendix_e)
    v = res.verdict
    out = {"scenario": args.name, "convention": res.convention.value,
           "self": score_json(v.principal), "delegate": score_json(v.agent),
           "verdict": "delegate" if v.delegate else "do-not-delegate",
           "table": table_json(res),
           "discrepancies": [{"quantity": d.quantity, "stated": fmt(d.stated), "derived": fmt(d.derived)}
                             for d in res.discrepancies]}
    rep.lines += table_lines(res) + [""]
    rep.lines += score_lines("self: principal on own reach", v.principal) + [""]
    rep.lines += score_lines("delegate: agent on its reach", v.agent) + [""]
    rep.lines.append(f"verdict: {out['verdict']}")
    for d in res.discrepancies:
        rep.lines.append(f"discrepancy: {d.quantity} stated {fmt(d.stated)}, table gives {fmt(d.derived)}")
    code = EXIT_OK
    if args.golden:
        bad = compare_golden(res)
        out["golden"] = {"match": not bad, "mismatches": bad}
        rep.lines.append(f"golden table: {'match' if not bad else 'MISMATCH'}")
        rep.lines += [f"  {b}" for b in bad]
        code = EXIT_OK if not bad else EXIT_FAIL
    rep.results = out
    return code


def cmd_bandit(args, rep: Report) -> int:
    doc, rep.digest = _read(args.file)
    _expect(doc, BanditDocument, args.file)
    if args.appendix_e and doc.scenario is None:
        raise UsageError("--appendix-e applies only to files naming a scenario")
    seed = args.seed if args.seed is not None else (doc.seed if doc.seed is not None else _seed(args))
    try:
        cfg = doc.build(args.horizon, seed, True if args.appendix_e else None)
    except ValueError as e:
        raise UsageError(str(e)) from None
    trials = args.trials or doc.trials
    s = convergence_experiment(cfg, trials, keep_results=True)
    labels = [a.label or a.kind for a in cfg.arms]
    out = {"horizon": cfg.horizon, "seed": cfg.seed, "trials": trials, "exploration": cfg.exploration,
           "normalize_rewards": cfg.normalize_rewards,
           "arms": [{"label": lab, "kind": a.kind, "analytic_mean": rational(m, 4)}
                    for lab, a, m in zip(labels, cfg.arms, s.results[0].analytic_means)],
           "best_arm": None if s.best_arm is None else labels[s.best_arm],
           "converged": s.converged, "tie": s.tie,
           "regret": {"mean": round(s.regret_mean, 6), "std": round(s.regret_std, 6)},
           "runs": []}
    rows = []
    for i, r in enumerate(s.results):
        out["runs"].append({"seed": cfg.seed + i, "counts": list(r.counts), "means": [round(m, 6) for m in r.means],
                            "preferred": labels[r.preferred_arm], "regret": fmt(r.regret),
                            **({"listing_regret": fmt(r.listing_regret)} if r.listing_regret is not None else {})})
        if i < 10:
            rows.append([cfg.seed + i] + [f"{c} @ {m:.4f}" for c, m in zip(r.counts, r.means)]
                        + [labels[r.preferred_arm], fmt(r.regret)])
    rep.lines.append(f"UCB ({cfg.exploration} radius{', rewards normalized' if cfg.normalize_rewards else ''}), "
                     f"horizon {cfg.horizon}, {trials} trial(s) from seed {cfg.seed}")
    for lab, a in zip(labels, out["arms"]):
        rep.lines.append(f"  arm {lab}: analytic mean {a['analytic_mean']['exact']} ({a['analytic_mean']['decimal']})")
    rep.lines.append("")
    rep.lines += format_table(["seed"] + [f"{lab} pulls @ mean" for lab in labels] + ["preferred", "regret"], rows)
    if trials > 10:
        rep.lines.append(f"... {trials - 10} more runs in --json output")
    rep.lines.append("")
    if s.tie:
        rep.lines.append("arms tie analytically; convergence is not scored")
    else:
        rep.lines.append(f"preferred the analytic best arm ({out['best_arm']}) in {s.converged}/{trials} runs")
    rep.lines.append(f"regret mean {s.regret_mean:.4f}, std {s.regret_std:.4f}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            for i, r in enumerate(s.results):
                for e in r.log:
                    f.write(json.dumps({"trial": i, "step": e.t, "arm": labels[e.arm], "state": _states([e.state])[0],
                                        "gamble": e.gamble, "reward": fmt(e.reward)}) + "\n")
        rep.lines.append(f"episode log written to {args.out}")
    rep.results = out
    return EXIT_OK


# --------------------------------------------------------------------------
# Entry point


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="delegation", description="Check, score and simulate delegation decisions.")
    p.add_argument("--version", action="version", version=f"delegation {__version__}")
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable report")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("score", parents=[common], help="score both parties on a scoring file")
    s.add_argument("file")
    s.add_argument("--convention", choices=[c.value for c in ScoreConvention])
    s.add_argument("--side", choices=("self", "delegate", "both"), default="both")
    s.add_argument("--trace", action="store_true", help="include per-state rows in --json output")
    s.set_defaults(func=cmd_score)

    s = sub.add_parser("check-trust", parents=[common], help="decide total trust on a probability frame")
    s.add_argument("file")
    s.add_argument("--trials", type=int, default=10_000, help="randomized falsifier trials")
    s.add_argument("--seed", type=int)
    s.set_defaults(func=cmd_check_trust)

    s = sub.add_parser("check-valuing", parents=[common], help="check valuing over a family of problems")
    s.add_argument("file")
    s.add_argument("--family", help="family name from the file (default: the first)")
    s.set_defaults(func=cmd_check_valuing)

    s = sub.add_parser("check-alignment", parents=[common], help="check posterior alignment on a generalized frame")
    s.add_argument("file")
    s.add_argument("--singletons", action="store_true", help="compare only one-state events (for large spaces)")
    s.add_argument("--acts", help="comma-separated act labels to restrict the check to")
    s.set_defaults(func=cmd_check_alignment)

    s = sub.add_parser("reproduce", parents=[common], help="reproduce a worked example")
    s.add_argument("name", help=", ".join(SCENARIOS))
    s.add_argument("--golden", action="store_true", help="compare against the stored table")
    s.add_argument("--appendix-e", action="store_true", help="noise of +2/-2 instead of +4/-3")
    s.add_argument("--convention", choices=[c.value for c in ScoreConvention])
    s.set_defaults(func=cmd_reproduce)

    s = sub.add_parser("bandit", parents=[common], help="run the delegation bandit")
    s.add_argument("file")
    s.add_argument("--trials", type=int)
    s.add_argument("--horizon", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--appendix-e", action="store_true")
    s.add_argument("--out", help="write line-delimited JSON episode logs here")
    s.set_defaults(func=cmd_bandit)
    return p


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "trials", None) is not None and args.trials < 1:
            raise UsageError("--trials must be at least 1")
        rep = Report(["delegation"] + argv, "")
        code = args.func(args, rep)
    except UsageError as e:
        print(f"delegation: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(rep.json() if args.json else rep.text())
    return code


if __name__ == "__main__":
    sys.exit(main())
