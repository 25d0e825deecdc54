from fractions import Fraction as F

import pytest

from delegation.reports import compare_golden, load_golden, table_json, table_lines
from delegation.scenarios import (
    BoxSpec,
    PeekAgentSpec,
    ReachScenarioSpec,
    agent_utility,
    build_misaligned_expert,
    build_noisy_expert,
    build_peek_scenario,
    build_reach_scenario,
    misaligned_expert_spec,
    reach_spec,
    run_scenario,
    signed_sqrt,
)
from delegation.scoring import delegation_criterion_reach, score


def test_signed_sqrt():
    assert signed_sqrt(-400) == -20 and signed_sqrt(F(9, 4)) == F(3, 2) and signed_sqrt(0) == 0
    assert isinstance(signed_sqrt(2), float) and signed_sqrt(-2) == pytest.approx(-2**0.5)
    assert agent_utility("additive-shift", 3, 4) == 7
    with pytest.raises(ValueError):
        agent_utility("log", 1)


# --------------------------------------------------------------------------
# noisy expert


def test_noisy_expert_table():
    sc = build_noisy_expert()
    assert len(sc.rows) == 12 and sum(sc.pi.weights) == 1
    by_state = {(r.true, r.peeked, r.shift): r for r in sc.rows}
    # peeked 8 with shift -3: values {-5, 3} shifted give mean -4, so the box stays shut
    r = by_state[(3, (8,), -3)]
    assert r.belief == (-5, 3) and r.eu == -4 and not r.accepted
    assert r.classification == "loss" and r.magnitude == 3
    r = by_state[(-5, (3,), 4)]
    assert r.eu == F(11, 2) and r.accepted and r.value == -5


def test_noisy_expert_scores():
    res = run_scenario("noisy-expert")
    p, a = res.principal_report, res.agent_report
    assert (p.loss, p.gain, p.score) == (F(20, 12), F(44, 12), -2)
    assert (a.loss, a.gain, a.score) == (F(21, 12), F(43, 12), F(-22, 12))
    assert not res.delegate
    assert {d.quantity: d.stated for d in res.discrepancies} == {
        "agent gain (narrative)": F(32, 12),
        "agent score (narrative)": F(-11, 12),
    }


def test_noisy_expert_strict_convention():
    res = run_scenario("noisy-expert", "strict")
    assert (res.principal_report.score, res.agent_report.score) == (-2, -1)
    assert not res.delegate and res.discrepancies == ()


def test_zero_noise_equals_shift_free_peek():
    base = PeekAgentSpec((-5, 3, 8), 1, {"z": (0, 1)}, "additive-shift")
    ident = PeekAgentSpec((-5, 3, 8), 1, {"z": (0, 1)}, "identity")
    a, b = build_peek_scenario(base), build_peek_scenario(ident)
    assert [r.accepted for r in a.rows] == [r.accepted for r in b.rows]


def test_peeking_nothing_matches_principal():
    sc = build_peek_scenario(PeekAgentSpec((-5, 3, 8), 0))
    assert all(r.accepted for r in sc.rows)
    assert score(sc.pi, sc.mu_self, sc.principal) == score(sc.pi, sc.mu_delegate, sc.agent)


def test_peek_spec_validation():
    with pytest.raises(ValueError):
        PeekAgentSpec((1, 1, 2))
    with pytest.raises(ValueError):
        PeekAgentSpec((1, 2), peek_count=2)
    with pytest.raises(ValueError):
        PeekAgentSpec((1, 2), noise={"a": (0, F(1, 2))})
    with pytest.raises(ValueError):
        PeekAgentSpec((1, 2), agent_utility="cubic")


# --------------------------------------------------------------------------
# misaligned expert


def test_misaligned_expert_table():
    sc = build_misaligned_expert()
    eus = {(r.true, r.peeked): r for r in sc.rows}
    # peeking 100 leaves {-400, 25, 225}: (-20 + 5 + 15) / 3 = 0, and ties are rejected
    tie = eus[(-400, (100,))]
    assert tie.eu == 0 and not tie.accepted
    opened = eus[(225, (25,))]
    assert opened.eu == F(5, 3) and opened.value == 175


def test_misaligned_expert_scores():
    res = run_scenario("misaligned-expert")
    assert res.agent_report.score == F(-400, 12)
    assert res.agent_report.gain == F(1250, 12)
    assert res.delegate
    # the per-state table gives -150/12 for the principal, not the published 750/12
    assert res.principal_report.score == F(-150, 12)
    assert F(750, 12) in {d.stated for d in res.discrepancies}


def test_fee_monotonicity():
    scores = []
    for fee in (0, 25, 50, 100):
        sc = build_misaligned_expert(misaligned_expert_spec(fee))
        scores.append(score(sc.pi, sc.mu_delegate, sc.agent, "credit").score)
    assert scores == sorted(scores)


def test_fee_always_mode_differs():
    a = build_misaligned_expert(misaligned_expert_spec(50, "accepted"))
    b = build_misaligned_expert(misaligned_expert_spec(50, "always"))
    assert score(a.pi, a.mu_delegate, a.agent, "credit") != score(b.pi, b.mu_delegate, b.agent, "credit")


# --------------------------------------------------------------------------
# reach


def test_reach_rows_and_scores():
    res = run_scenario("reach")
    got = [(r.label, r.loss, r.gain) for r in res.table]
    assert got == [
        ("A1", 2, 4), ("A2", 4, 4), ("A3", F(5, 3), 0), ("A4", 0, F(5, 2)), ("A5", 0, 5),
    ]
    assert res.principal_report.score == F(-1, 9)
    assert res.agent_report.score == F(-47, 30)
    assert res.delegate and res.verdict.margin == F(131, 90)


def test_reach_space_keeps_box_marginals():
    sc = build_reach_scenario()
    assert len(sc.space) == 12
    for g, b in zip(sc.gambles, sc.spec.boxes):
        assert sorted(set(g.payoffs)) == sorted(set(b.outcomes))
        assert sum(g.payoffs) / len(g.payoffs) == b.expected


def test_reach_without_extra_boxes_is_a_tie():
    spec = ReachScenarioSpec(tuple(b for b in reach_spec().boxes if b.availability == "both"))
    sc = build_reach_scenario(spec)
    v = delegation_criterion_reach(sc.pi, sc.mu_self, sc.mu_delegate, sc.strategy, sc.strategy)
    assert v.delegate and v.margin == 0


def test_reach_monotone_in_good_boxes():
    base = reach_spec().boxes
    more = base + (BoxSpec("A6", (7, 8), "delegate"),)
    s1 = run_scenario("reach").agent_report.score
    sc = build_reach_scenario(ReachScenarioSpec(more))
    assert score(sc.pi, sc.mu_delegate, sc.strategy).score < s1


def test_reach_spec_validation():
    with pytest.raises(ValueError):
        BoxSpec("x", ())
    with pytest.raises(ValueError):
        ReachScenarioSpec((BoxSpec("x", (1,), "delegate"),))


def test_unknown_scenario():
    with pytest.raises(ValueError):
        run_scenario("lottery")


# --------------------------------------------------------------------------
# golden tables


@pytest.mark.parametrize("name", ["noisy-expert", "misaligned-expert", "reach"])
def test_matches_golden(name):
    res = run_scenario(name)
    assert compare_golden(res) == []
    assert load_golden(name)["rows"]
    assert table_lines(res) and table_json(res)


def test_alternative_noise_differs_from_golden():
    assert compare_golden(run_scenario("noisy-expert", appendix_e=True))
