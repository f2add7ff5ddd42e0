import pytest

from conftest import FIXTURES
from fesim.engine import replay
from fesim.formats import FormatError, StageInvalid, emit_stage, emit_trace, parse_stage, parse_trace
from fesim.model import Outcome

TINY = (FIXTURES / "tiny.festage").read_text()


def test_stage_round_trip():
    spec = parse_stage(TINY)
    assert emit_stage(spec) == TINY
    assert spec.round_budget == 4 and not spec.counter_attacks
    assert spec.templates["Cleric"].attrs.heal.amount == 2
    assert spec.templates["Cleric"].start_hp == 1


def test_trace_round_trip_and_replay():
    text = (FIXTURES / "tiny.fetrace").read_text()
    script = parse_trace(text)
    assert emit_trace(script) == text
    assert replay(parse_stage(TINY), script).outcome is Outcome.WIN


def test_enemy_comments_are_ignored():
    logged = (FIXTURES / "tiny_logged.fetrace").read_text()
    assert "# ENEMY" in logged
    assert parse_trace(logged) == parse_trace((FIXTURES / "tiny.fetrace").read_text())


@pytest.mark.parametrize(
    "text",
    [
        "",
        "FESTAGE 2 3 1 on inf\n...\n",
        "FESTAGE 1 3 2 on inf\n...\n..\n",
        "FESTAGE 1 3 1 on inf\n.x.\n",
        "FESTAGE 1 3 1 maybe inf\n...\n",
        "FESTAGE 1 3 1 on inf\n.T.\nLord P 0 0 3/3 1 1 6 1-1 player\n",
        "FESTAGE 1 3 1 on inf\n.T.\nLord P zero 0 3/3 1 1 6 1-1 player lord\n",
        "FESTAGE 1 3 1 on inf\n.T.\nLord P 0 0 3/3 1 1 6 1to1 player lord\n",
    ],
)
def test_stage_syntax_errors(text):
    with pytest.raises((FormatError, StageInvalid)):
        parse_stage(text)


def test_format_error_carries_position():
    with pytest.raises(FormatError) as exc:
        parse_stage("FESTAGE 1 3 2 on inf\n...\n.x.\n")
    assert exc.value.line == 3


def test_semantic_errors_are_separate():
    text = "FESTAGE 1 3 1 on inf\n.#T\nLord P 1 0 3/3 1 1 6 1-1 player lord\n"
    with pytest.raises(StageInvalid) as exc:
        parse_stage(text)
    assert "unit on wall" in {v.code for v in exc.value.violations}
    assert parse_stage(text, validate=False).grid.width == 3


@pytest.mark.parametrize(
    "text",
    [
        "MOVE Lord (1,0)\n",
        "ROUND 2\nEND\n",
        "ROUND 1\nMOVE Lord (1,0)\nEND\n",
        "ROUND 1\nMOVE Lord 1,0\nWAIT Lord\nEND\n",
        "ROUND 1\nJUMP Lord\nEND\n",
        "ROUND 1\nWAIT Lord\n",
    ],
)
def test_trace_syntax_errors(text):
    with pytest.raises(FormatError):
        parse_trace(text)
