from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from delegation.deference import (
    ClarityError,
    ClosureCapExceeded,
    TrustWitness,
    check_constant_acts,
    check_posterior_alignment,
    check_richness_closure,
    check_total_trust,
    check_valuing_over_family,
    construct_valuing_counterexample,
    event_witness_to_cell_witness,
    falsify_total_trust_randomized,
    richness_close,
)
from delegation.frames import (
    Act,
    Credence,
    DecisionProblemRV,
    GeneralizedFrame,
    OptionRV,
    ProbabilityFrame,
    StateSpace,
    cells,
    expectation,
)


def random_credence(rng, space, zeros=True):
    n = len(space)
    w = rng.integers(0 if zeros else 1, 6, n)
    if w.sum() == 0:
        w[rng.integers(n)] = 1
    return Credence(space, [F(int(v), int(w.sum())) for v in w])


def random_frame(rng, n):
    space = StateSpace(tuple(f"s{i}" for i in range(n)))
    kind = rng.integers(3)
    pi = random_credence(rng, space, zeros=False)
    if kind == 0:
        agent = tuple(random_credence(rng, space) for _ in space)
    else:
        # agent knows which block of a random partition is actual: trust holds
        labels = rng.integers(0, max(1, n - 1), n)
        agent = tuple(pi.conditional([t for t, l in zip(space, labels) if l == labels[i]]) for i in range(n))
        if kind == 2:
            # mixing in noise usually breaks it
            noise = random_credence(rng, space)
            agent = tuple(Credence(space, [(a + b) / 2 for a, b in zip(c.weights, noise.weights)]) for c in agent)
    return ProbabilityFrame(space, pi, agent)


# --------------------------------------------------------------------------
# total trust


def test_trust_holds_on_leaning_frame(frame_312):
    assert check_total_trust(frame_312).holds


def test_trust_holds_for_truth_knowing_agent():
    sp = StateSpace(("x", "y", "z"))
    f = ProbabilityFrame(sp, Credence(sp, (F(1, 2), F(1, 3), F(1, 6))), ((1, 0, 0), (0, 1, 0), (0, 0, 1)))
    assert check_total_trust(f).holds


def test_trust_fails_on_anti_expert_with_exact_witness(anti_expert):
    v = check_total_trust(anti_expert)
    assert not v.holds
    w = v.witness
    assert w.slack > 0 and w.verify(anti_expert)
    S = w.event(anti_expert)
    # recompute by hand: the principal's mean of x over S falls short of t
    mass = anti_expert.pi.prob(S)
    assert sum(anti_expert.pi[s] * w.x[s] for s in S) / mass < w.t


def test_hand_witness_verifies(anti_expert, two_states):
    w = TrustWitness(OptionRV(two_states, (1, 0)), F(1), F(0))
    assert w.event(anti_expert) == ("b",)
    assert w.verify(anti_expert)


def test_falsifier(anti_expert, frame_312):
    v = falsify_total_trust_randomized(anti_expert, 1000, seed=3)
    assert not v.holds and v.witness.verify(anti_expert)
    clean = falsify_total_trust_randomized(frame_312, 2000, seed=3)
    assert clean.holds and not clean.decided
    with pytest.raises(ValueError):
        falsify_total_trust_randomized(frame_312, 0)


def test_falsifier_is_reproducible(anti_expert):
    a = falsify_total_trust_randomized(anti_expert, 500, seed=11)
    b = falsify_total_trust_randomized(anti_expert, 500, seed=11)
    assert a == b


@pytest.mark.parametrize("seed", range(40))
def test_falsifier_never_contradicts_lp(seed):
    rng = np.random.default_rng(seed)
    f = random_frame(rng, int(rng.integers(2, 5)))
    lp = check_total_trust(f)
    rnd = falsify_total_trust_randomized(f, 2000, seed=seed)
    if not rnd.holds:
        assert not lp.holds
        assert rnd.witness.verify(f)
    if not lp.holds:
        assert lp.witness.verify(f)


# --------------------------------------------------------------------------
# valuing


def test_valuing_on_example_problem(frame_312, o1o2):
    v = check_valuing_over_family(frame_312, [o1o2])
    assert v.holds and v.margin == 1


def test_valuing_singleton_family(frame_312, two_states):
    v = check_valuing_over_family(frame_312, [DecisionProblemRV((OptionRV(two_states, (2, -3)),))])
    assert v.holds and v.margin == 0


def test_valuing_fails_for_anti_expert(anti_expert, o1o2):
    v = check_valuing_over_family(anti_expert, [o1o2])
    assert not v.holds
    assert v.witness.margin == 1


def test_empty_family_rejected(frame_312):
    with pytest.raises(ValueError):
        check_valuing_over_family(frame_312, [])


def test_valuing_antitone_in_family(anti_expert, o1o2, two_states):
    small = [DecisionProblemRV((OptionRV(two_states, (0, 0)),))]
    assert check_valuing_over_family(anti_expert, small).holds
    assert not check_valuing_over_family(anti_expert, small + [o1o2]).holds


def test_rain_valuing_over_bet_grid():
    from conftest import rain_frame

    xs = [F(k, 10) for k in range(11)]
    g = rain_frame(xs)
    family = [(g.act(f"bet-{x}"), g.act("reject")) for x in xs]
    assert check_valuing_over_family(g, family).holds


problems = st.lists(st.tuples(st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3)), min_size=1, max_size=4,
                    unique=True)


@settings(max_examples=150, deadline=None)
@given(problems, st.integers(0, 2**32 - 1))
def test_trust_implies_valuing(payoffs, seed):
    rng = np.random.default_rng(seed)
    f = random_frame(rng, 3)
    problem = DecisionProblemRV(tuple(OptionRV(f.space, p, str(i)) for i, p in enumerate(payoffs)))
    if check_total_trust(f).holds:
        assert check_valuing_over_family(f, [problem]).holds


# --------------------------------------------------------------------------
# alignment and counterexamples


def test_rain_alignment_fails_with_cell_witness(rain):
    v = check_posterior_alignment(rain)
    assert not v.holds
    w = v.cell_witness
    assert w.cell == ("c1-rain", "c1-dry")
    assert (w.a.label, w.b.label) == ("bet-9/10", "reject")
    assert (w.principal_a, w.principal_b, w.agent_a, w.agent_b) == (F(1, 10), 0, F(-3, 10), 0)


def test_rain_counterexample_margin(rain):
    cx = construct_valuing_counterexample(rain, check_posterior_alignment(rain))
    assert cx.witness.margin == F(1, 20)
    v = check_valuing_over_family(cx.frame, [cx.witness.problem])
    assert not v.holds and v.witness.margin == F(1, 20)


def test_counterexample_with_other_baseline(rain):
    w = check_posterior_alignment(rain).cell_witness
    cx = construct_valuing_counterexample(rain, w, baseline=rain.act("bet-9/10"))
    assert cx.witness.margin == F(1, 20)
    assert not check_valuing_over_family(cx.frame, [cx.witness.problem]).holds


def test_counterexample_needs_a_witness(rain):
    with pytest.raises(ValueError):
        construct_valuing_counterexample(rain, None)


def aligned_frame():
    sp = StateSpace(("a", "b", "c"))
    u = {"lose": -1, "nothing": 0, "win": 2}
    pi = (F(1, 2), F(1, 4), F(1, 4))
    acts = (Act.constant(sp, "nothing", "stay"), Act.constant(sp, "win", "sure"), Act(sp, ("win", "lose", "nothing"), "gamble"))
    return GeneralizedFrame(sp, Credence(sp, pi), tuple(u), u, acts, (pi,) * 3, (u,) * 3)


def test_alignment_holds_when_agent_shares_posterior():
    v = check_posterior_alignment(aligned_frame())
    assert v.holds and v.cell_witness is None and v.event_witness is None


def test_event_witness_and_conversion():
    sp = StateSpace(("a", "b"))
    u = {0: 0, 1: 1}
    g = GeneralizedFrame(sp, Credence(sp, (F(3, 4), F(1, 4))), (0, 1), u,
                         (Act.constant(sp, 0, "zero"),), ((0, 1), (0, 1)), (u, u))
    v = check_posterior_alignment(g, singleton_events=True)
    assert not v.holds and v.cell_witness is None
    ew = v.event_witness
    assert (ew.x, ew.y) == (frozenset({"b"}), frozenset({"a"}))
    g2, cw = event_witness_to_cell_witness(g, ew)
    assert cw.principal_a > cw.principal_b and not cw.agent_a > cw.agent_b
    cx = construct_valuing_counterexample(g2, cw)
    assert cx.witness.margin > 0
    assert not check_valuing_over_family(cx.frame, [cx.witness.problem]).holds


def test_unclear_frame_is_rejected():
    sp = StateSpace(("a", "b"))
    u = {0: 0, 1: 1}
    g = GeneralizedFrame(sp, Credence.uniform(sp), (0, 1), u, (), ((1, 0), (F(1, 2), F(1, 2))), (u, u))
    with pytest.raises(ClarityError):
        check_posterior_alignment(g)


def test_zero_mass_cell_is_skipped():
    sp = StateSpace(("a", "b"))
    u = {0: 0, 1: 1}
    g = GeneralizedFrame(sp, Credence(sp, (1, 0)), (0, 1), u, (Act.constant(sp, 0), Act.constant(sp, 1)),
                         ((1, 0), (0, 1)), (u, u))
    v = check_posterior_alignment(g)
    assert v.holds and v.skipped_cells == (("b",),)


# --------------------------------------------------------------------------
# structural conditions


def test_richness_closure(rain):
    evs = [frozenset(c) for c in cells(rain)]
    rep = check_richness_closure(rain.acts, evs)
    assert not rep and len(rep.missing) == 2
    closed = richness_close(rain.acts, evs)
    assert len(closed) == 4 and check_richness_closure(closed, evs)
    with pytest.raises(ClosureCapExceeded):
        richness_close(rain.acts, evs, cap=3)


def test_constant_acts(rain):
    assert not check_constant_acts(rain)
    assert check_constant_acts(aligned_frame())


def test_expectation_helper_consistency(frame_312):
    x = OptionRV(frame_312.space, (2, -1))
    assert [expectation(c, x) for c in frame_312.agent] == [F(7, 5), F(-7, 10)]
