"""
Preference reversals and the problems that expose them
======================================================

The agent sees which of two cells it is in and holds beliefs about rain
inside that cell. The principal is sure it rains in the first cell and
stays dry in the second. A bet that pays 1 - x on rain and -x otherwise
looks different to the two parties.
"""

from fractions import Fraction as F

from delegation.deference import (
    check_posterior_alignment,
    check_valuing_over_family,
    construct_valuing_counterexample,
)
from delegation.frames import Act, Credence, GeneralizedFrame, StateSpace, cells

space = StateSpace(("c1-rain", "c1-dry", "c2-rain", "c2-dry"))
prior = Credence(space, (F(1, 2), 0, 0, F(1, 2)))
beliefs = ((F(3, 5), F(2, 5), 0, 0),) * 2 + ((0, 0, F(2, 5), F(3, 5)),) * 2

x = F(9, 10)
consequences = (F(0), 1 - x, -x)
utility = {c: c for c in consequences}
acts = (Act.constant(space, F(0), "reject"), Act(space, (1 - x, -x, 1 - x, -x), "bet"))
frame = GeneralizedFrame(space, prior, consequences, utility, acts, beliefs, (utility,) * 4)
print("agent cells:", cells(frame))

# The principal, told it is in cell 1, wants the bet; the agent thinks rain is only 60% likely.
v = check_posterior_alignment(frame)
w = v.cell_witness
print(f"aligned: {v.holds}")
print(f"  cell {w.cell}: principal values {w.a.label!r} at {w.principal_a} vs {w.principal_b}, "
      f"agent at {w.agent_a} vs {w.agent_b}")

# The reversal turns into a decision problem where choosing directly beats delegating.
cx = construct_valuing_counterexample(frame, v)
for act in cx.witness.problem:
    print(f"  {act.label}: {[str(c) for c in act.outcome]}")
print(f"choosing {cx.witness.losing_option.label!r} beats delegating by {cx.witness.margin}")
print("valuing on that problem:", check_valuing_over_family(cx.frame, [cx.witness.problem]).holds)
