"""
When does deferring to an expert pay?
=====================================

A two-state world, a principal with a uniform prior, and two agents: one
who leans towards the truth and one who always believes the opposite.
"""

from fractions import Fraction as F

from delegation.deference import check_total_trust, check_valuing_over_family, falsify_total_trust_randomized
from delegation.frames import (
    Credence,
    DecisionProblemRV,
    OptionRV,
    ProbabilityFrame,
    StateSpace,
    delegation_value,
    expert_strategy,
)

space = StateSpace(("a", "b"))
prior = Credence.uniform(space)

# The agent's credence at each state: row i is what it believes when state i is actual.
leaning = ProbabilityFrame(space, prior, ((F(4, 5), F(1, 5)), (F(1, 10), F(9, 10))))
contrary = ProbabilityFrame(space, prior, ((0, 1), (1, 0)))

# One bet on each state.
problem = DecisionProblemRV((OptionRV(space, (1, -1), "bet-a"), OptionRV(space, (-1, 1), "bet-b")))

for name, frame in (("leaning", leaning), ("contrary", contrary)):
    choice = expert_strategy(frame, problem)
    print(f"{name}: agent picks {[o.label for o in choice.choice]}, "
          f"delegating is worth {delegation_value(frame, choice)} to the principal")

# Total trust asks whether "the agent expects X >= t" ever leaves the
# principal expecting less than t. The exact check solves one small LP per
# event and hands back a witness when trust fails.
for name, frame in (("leaning", leaning), ("contrary", contrary)):
    v = check_total_trust(frame)
    print(f"{name}: total trust {'holds' if v.holds else 'fails'}")
    if v.witness is not None:
        w = v.witness
        print(f"  witness x = {w.x.payoffs}, t = {w.t}, event {w.event(frame)}, verified {w.verify(frame)}")

# A random search over integer payoffs is a cheap second opinion.
rnd = falsify_total_trust_randomized(contrary, 1000, seed=0)
print("random search finds a violation for the contrary agent:", not rnd.holds)

# Valuing over a family of problems: is delegating at least as good as every option?
print("leaning agent valued on the bet problem:", check_valuing_over_family(leaning, [problem]).holds)
print("contrary agent valued on the bet problem:", check_valuing_over_family(contrary, [problem]).holds)
