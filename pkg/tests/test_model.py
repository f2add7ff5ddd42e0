import pytest
from hypothesis import given
from hypothesis import strategies as st

from fesim.model import GridMap, Position, manhattan, validate_stage
from helpers import E, P, lord, stage, unit


@pytest.mark.parametrize(
    "a, b, want",
    [((0, 0), (1, 1), 2), ((3, 7), (3, 7), 0), ((0, 0), (0, 1), 1), ((-2, 5), (4, -1), 12)],
)
def test_manhattan(a, b, want):
    assert manhattan(Position(*a), Position(*b)) == want


coords = st.tuples(st.integers(-50, 50), st.integers(-50, 50))


@given(coords, coords, coords)
def test_manhattan_is_a_metric(a, b, c):
    a, b, c = Position(*a), Position(*b), Position(*c)
    assert manhattan(a, b) == manhattan(b, a)
    assert manhattan(a, c) <= manhattan(a, b) + manhattan(b, c)
    assert (manhattan(a, b) == 0) == (a == b)


def test_well_formed_stage_is_ok():
    s = stage("...\n...\n...", lord(0, 0), unit("G", E, 2, 0), throne=(2, 2))
    assert validate_stage(s) == []


def codes(s):
    return {v.code for v in validate_stage(s)}


def test_unit_on_wall():
    assert "unit on wall" in codes(stage(".#.", lord(1, 0), throne=(0, 0)))


def test_overlap():
    assert "overlap" in codes(stage("...", lord(0, 0), unit("G", E, 0, 0), throne=(2, 0)))


def test_other_violations():
    assert "missing lord" in codes(stage("..", unit("A", P, 0, 0), throne=(1, 0)))
    assert "multiple lords" in codes(stage("...", lord(0, 0), unit("B", P, 1, 0, lord=True), throne=(2, 0)))
    assert "throne on wall" in codes(stage(".#", lord(0, 0), throne=(1, 0)))
    assert "stat out of range" in codes(stage("..", lord(0, 0, atk=0), throne=(1, 0)))
    assert "stat out of range" in codes(stage("..", lord(0, 0, mov=11), throne=(1, 0)))
    assert "bad range" in codes(stage("..", lord(0, 0, rng=(2, 1)), throne=(1, 0)))
    assert "hp out of range" in codes(stage("..", lord(0, 0, start_hp=4), throne=(1, 0)))
    assert "duplicate id" in codes(stage("...", lord(0, 0), unit("Lord", E, 1, 0), throne=(2, 0)))
    assert "ragged grid" in codes(stage(("..", "."), lord(0, 0), throne=(1, 0)))
    assert "bad tile" in codes(stage("..x", lord(0, 0), throne=(1, 0)))


def test_neighbors_order_right_left_down_up():
    g = GridMap(("...", "...", "..."))
    assert g.neighbors[Position(1, 1)] == (Position(2, 1), Position(0, 1), Position(1, 2), Position(1, 0))


def test_components():
    g = GridMap(("..#..", "###.."))
    comp = g.component_of
    assert comp[Position(0, 0)] == comp[Position(1, 0)]
    assert comp[Position(0, 0)] != comp[Position(3, 0)]
    assert comp[Position(4, 1)] == comp[Position(3, 0)]


def test_state_initial_and_lookup():
    s = stage("...", lord(0, 0, hp=5, start_hp=2), unit("G", E, 2, 0, beh=None), throne=(1, 0))
    from fesim.model import GameState

    g = GameState.initial(s)
    assert g.by_id["Lord"].hp == 2
    assert g.occupant[Position(2, 0)] == "G"
    assert not g.by_id["G"].impatient
    assert [u.uid for u in g.live(E)] == ["G"]
