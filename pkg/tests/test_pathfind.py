from collections import deque

from hypothesis import given, settings
from hypothesis import strategies as st

from fesim.compiler import compile_instance
from fesim.model import GridMap, Position
from fesim.pathfind import (
    PathQueryMode,
    canonical_path,
    connected_component,
    move_and_attack_targets,
    reachable_tiles,
    shortest_path,
)
from fesim.sat import Clause, CnfInstance
from helpers import E, P, lord, start, unit


def test_open_corridor_reach():
    s = start("." * 13, lord(0, 0))
    assert len(reachable_tiles(s, "Lord")) == 7


def test_ally_is_passable_but_not_an_endpoint():
    s = start("." * 13, lord(0, 0), unit("A", P, 2, 0))
    reach = reachable_tiles(s, "Lord")
    assert Position(2, 0) not in reach
    assert Position(6, 0) in reach and reach[Position(6, 0)] == 6


def test_hostile_blocks():
    s = start("." * 13, lord(0, 0), unit("G", E, 2, 0))
    assert set(reachable_tiles(s, "Lord")) == {Position(0, 0), Position(1, 0)}


def test_canonical_path_goes_horizontal_first():
    s = start("...\n...\n...", lord(0, 0))
    assert shortest_path(s, "Lord", Position(2, 2)) == (Position(1, 0), Position(2, 0), Position(2, 1), Position(2, 2))
    assert shortest_path(s, "Lord", Position(0, 0)) == ()


def test_canonical_path_detours_right_then_down():
    # goal straight up behind a wall: both detours cost the same, right wins
    s = start("...\n.#.\n...", lord(1, 2))
    assert shortest_path(s, "Lord", Position(1, 0)) == (Position(2, 2), Position(2, 1), Position(2, 0), Position(1, 0))


def test_unreachable_behind_wall_ring():
    s = start(".....\n.###.\n.#.#.\n.###.\n.....", lord(0, 0))
    assert shortest_path(s, "Lord", Position(2, 2), PathQueryMode.WALLS_ONLY) is None


def test_sniper_shoots_through_walls():
    s = start(".#.", unit("S", E, 0, 0, mov=0, rng=(1, 2)), lord(2, 0))
    opts = move_and_attack_targets(s, "S")
    assert [(o.target, o.position) for o in opts] == [("Lord", Position(0, 0))]


def test_lowest_defense_first():
    s = start(".....", unit("A", P, 0, 0, df=2), unit("S", E, 2, 0, mov=0, rng=(1, 2)), lord(4, 0, df=1))
    assert [o.target for o in move_and_attack_targets(s, "S")][0] == "Lord"


def test_no_targets():
    s = start("." * 12, unit("S", E, 0, 0, mov=2, rng=(1, 2)), lord(11, 0))
    assert move_and_attack_targets(s, "S") == []


def test_components():
    g = GridMap(("...", "#.#", "..."))
    assert connected_component(g, Position(0, 0)) == set(g.floor_tiles)
    iso = GridMap(("#.#", "###", "..."))
    assert connected_component(iso, Position(1, 0)) == {Position(1, 0)}


def test_clause_path_is_its_own_component():
    spec, layout = compile_instance(CnfInstance(("x",), (Clause.pos("x"),)))
    cp = layout.clauses[0]
    g = layout.variables["x"]
    path = connected_component(spec.grid, cp.start)
    assert not path & connected_component(spec.grid, g.start)


def bfs(rows, a, b):
    seen = {a: 0}
    q = deque([a])
    while q:
        p = q.popleft()
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            n = (p[0] + dx, p[1] + dy)
            if 0 <= n[1] < len(rows) and 0 <= n[0] < len(rows[0]) and rows[n[1]][n[0]] == "." and n not in seen:
                seen[n] = seen[p] + 1
                q.append(n)
    return seen.get(b)


grids = st.integers(2, 7).flatmap(
    lambda w: st.lists(st.text(".#", min_size=w, max_size=w), min_size=2, max_size=7)
)


@settings(max_examples=150, deadline=None)
@given(grids, st.data())
def test_canonical_path_is_shortest_and_deterministic(rows, data):
    floor = [(x, y) for y, r in enumerate(rows) for x, c in enumerate(r) if c == "."]
    if len(floor) < 2:
        return
    a = data.draw(st.sampled_from(floor))
    b = data.draw(st.sampled_from(floor))
    g = GridMap(tuple(rows))
    path = canonical_path(g, Position(*a), Position(*b), g.is_floor)
    want = bfs(rows, a, b)
    if want is None:
        assert path is None
        return
    assert len(path) == want
    assert path == canonical_path(g, Position(*a), Position(*b), g.is_floor)
    cur = a
    for p in path:
        assert abs(p[0] - cur[0]) + abs(p[1] - cur[1]) == 1 and g.is_floor(p)
        cur = p
    assert cur == b
