from fractions import Fraction as F
from pathlib import Path

import pytest

from delegation.frames import (
    Act,
    Credence,
    DecisionProblemRV,
    GeneralizedFrame,
    OptionRV,
    ProbabilityFrame,
    StateSpace,
)

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"

# One line per acceptance criterion, printed in the terminal summary.
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


@pytest.fixture
def two_states():
    return StateSpace(("a", "b"))


@pytest.fixture
def o1o2(two_states):
    return DecisionProblemRV((OptionRV(two_states, (1, -1), "O1"), OptionRV(two_states, (-1, 1), "O2")))


@pytest.fixture
def frame_312(two_states):
    """Uniform prior; the agent leans towards the true state at both states."""
    return ProbabilityFrame(
        two_states, Credence.uniform(two_states), ((F(4, 5), F(1, 5)), (F(1, 10), F(9, 10)))
    )


@pytest.fixture
def anti_expert(two_states):
    return ProbabilityFrame(two_states, Credence.uniform(two_states), ((0, 1), (1, 0)))


def rain_frame(xs=(F(9, 10),)):
    """Two agent cells; the principal is sure it rains in the first and not in the second."""
    space = StateSpace(("c1-rain", "c1-dry", "c2-rain", "c2-dry"))
    cons = sorted({F(0)} | {1 - x for x in xs} | {-x for x in xs})
    u = {c: c for c in cons}
    acts = [Act.constant(space, F(0), "reject")]
    acts += [Act(space, (1 - x, -x, 1 - x, -x), f"bet-{x}") for x in xs]
    beliefs = (
        (F(3, 5), F(2, 5), 0, 0),
        (F(3, 5), F(2, 5), 0, 0),
        (0, 0, F(2, 5), F(3, 5)),
        (0, 0, F(2, 5), F(3, 5)),
    )
    pi = Credence(space, (F(1, 2), 0, 0, F(1, 2)))
    return GeneralizedFrame(space, pi, tuple(cons), u, tuple(acts), beliefs, tuple(u for _ in space))


@pytest.fixture
def rain():
    return rain_frame()
