import json
from fractions import Fraction as F

import pytest
from conftest import SCENARIO_DIR

from delegation import io
from delegation.io import (
    BanditDocument,
    FrameDocument,
    GeneralizedDocument,
    ScenarioFileError,
    ScoringDocument,
    dumps,
    load,
    loads,
    scenario_document,
    state_key,
)
from delegation.scoring import score

FILES = sorted(SCENARIO_DIR.glob("*.dlg"))

FRAME = {
    "version": 1,
    "kind": "probability-frame",
    "states": ["a", "b"],
    "pi": {"a": "1/2", "b": "1/2"},
    "agent": {"a": ["4/5", "1/5"], "b": ["1/10", "9/10"]},
}


def text(doc):
    return json.dumps(doc, indent=2)


def test_scenario_directory_is_populated():
    kinds = {json.loads(p.read_text())["kind"] for p in FILES}
    assert kinds == set(io.KINDS)


@pytest.mark.parametrize("path", FILES, ids=lambda p: p.stem)
def test_files_round_trip(path):
    raw = path.read_text()
    doc = loads(raw)
    assert dumps(doc) == raw
    again = loads(dumps(doc))
    if isinstance(doc, GeneralizedDocument):
        assert again.frame.space == doc.frame.space and again.frame.acts == doc.frame.acts
        assert again.frame.agent_beliefs == doc.frame.agent_beliefs and again.families == doc.families
    else:
        assert again == doc


def test_frame_document_contents():
    doc = load(SCENARIO_DIR / "frame_312.dlg")
    assert isinstance(doc, FrameDocument)
    assert doc.frame.agent[0].weights == (F(4, 5), F(1, 5))
    (problem,) = doc.families["example"]
    assert [o.label for o in problem] == ["O1", "O2"]


def test_generalized_document_problems():
    doc = load(SCENARIO_DIR / "rain.dlg")
    problems = doc.problems("bets")
    assert all(p[1].label == "reject" or p[0].label == "reject" for p in problems)
    assert len(doc.frame.acts) == 12


def test_scoring_document_matches_scenario():
    doc = load(SCENARIO_DIR / "reach.dlg")
    assert isinstance(doc, ScoringDocument)
    assert score(doc.pi, doc.mu_delegate, doc.agent, "strict").score == F(-47, 30)
    assert doc == scenario_document("reach")


def test_bandit_document_build_overrides():
    doc = load(SCENARIO_DIR / "coin_bandit.dlg")
    assert isinstance(doc, BanditDocument) and doc.config is not None
    cfg = doc.build(horizon=50, seed=3)
    assert (cfg.horizon, cfg.seed) == (50, 3)
    named = load(SCENARIO_DIR / "reach_bandit.dlg").build()
    assert named.horizon == 10000 and named.seed == 1


def test_state_key():
    assert state_key((F(-5), (F(3),), "n1")) == "-5|3|n1"
    assert state_key(F(1, 2)) == "1/2" and state_key(7) == "7"


def test_list_and_mapping_forms_agree():
    a = loads(text(FRAME))
    b = loads(text({**FRAME, "pi": ["1/2", "1/2"]}))
    assert a == b


# --------------------------------------------------------------------------
# errors


def err(doc_or_text):
    src = doc_or_text if isinstance(doc_or_text, str) else text(doc_or_text)
    with pytest.raises(ScenarioFileError) as e:
        loads(src)
    return e.value


def test_malformed_json_reports_position():
    e = err('{\n  "version": 1,\n  "kind": }')
    assert (e.line, e.column) == (3, 11)


def test_bad_sum_points_at_field():
    e = err({**FRAME, "pi": {"a": "1/2", "b": "2/5"}})
    assert "9/10" in e.message and e.path == ("pi",)
    assert e.line == 8 and e.column is not None
    assert str(e).startswith("line 8, column")


def test_float_rejected_with_position():
    e = err({**FRAME, "pi": {"a": 0.5, "b": "1/2"}})
    assert "decimal" in e.message and e.path == ("pi", "a")
    assert e.line == 9


def test_float_payoffs_allowed_in_bandit_files():
    raw = json.loads((SCENARIO_DIR / "coin_bandit.dlg").read_text())
    raw["arms"][0]["mu"][0]["payoffs"]["heads"] = 1.5
    doc = loads(text(raw))
    assert doc.config.arms[0].mu.gambles[0].payoffs[0] == F(3, 2)
    raw["pi"]["heads"] = 0.5
    with pytest.raises(ScenarioFileError):
        loads(text(raw))


@pytest.mark.parametrize("patch, fragment", [
    ({"version": 2}, "unsupported version"),
    ({"kind": "lottery"}, "unknown kind"),
    ({"states": []}, "at least one state"),
    ({"states": ["a", "a"]}, "duplicate state"),
    ({"pi": {"a": 1}}, "no entry for state 'b'"),
    ({"pi": {"a": 1, "b": 0, "c": 0}}, "unknown state"),
    ({"pi": ["1/0", 1]}, "zero denominator"),
    ({"pi": [True, 0]}, "boolean"),
    ({"pi": ["3/2", "-1/2"]}, "non-negative"),
    ({"version": "1"}, "wrong type"),
])
def test_validation_messages(patch, fragment):
    assert fragment in err({**FRAME, **patch}).message


def test_missing_field():
    doc = dict(FRAME)
    del doc["agent"]
    assert "missing field 'agent'" in err(doc).message
    assert "JSON object" in err("[1, 2]").message


def test_bandit_validation():
    base = json.loads((SCENARIO_DIR / "coin_bandit.dlg").read_text())
    assert "shorter" in err({**base, "horizon": 1}).message
    assert "two arms" in err({**base, "arms": base["arms"][:1]}).message
    assert "unknown scenario" in err({"version": 1, "kind": "bandit", "horizon": 10, "scenario": "x"}).message


def test_dump_writes_file(tmp_path):
    doc = load(SCENARIO_DIR / "anti_expert.dlg")
    out = tmp_path / "copy.dlg"
    io.dump(doc, out)
    assert load(out) == doc
