"""Movement reachability, canonical shortest paths and attack coverage."""

from __future__ import annotations

import enum
from collections import deque
from typing import NamedTuple, Optional

from .model import GameState, GridMap, Position, Side, manhattan


class PathQueryMode(enum.Enum):
    MOVEMENT_BLOCKED = "blocked"  # hostile units block, allies can be passed
    WALLS_ONLY = "walls"


class AttackOption(NamedTuple):
    target: str
    position: Position
    path: tuple[Position, ...]


def _passable(state: GameState, uid: str, mode: PathQueryMode):
    """Predicate for tiles ``uid`` may step through under ``mode``."""
    grid = state.stage.grid
    if mode is PathQueryMode.WALLS_ONLY:
        return grid.is_floor
    tpl = state.stage.templates
    side = tpl[uid].side
    hostile = {u.pos for u in state.units if tpl[u.uid].side is not side}

    def ok(p: Position) -> bool:
        return p not in hostile and grid.is_floor(p)

    return ok


def _bfs(grid: GridMap, start: Position, passable, limit: Optional[int] = None) -> dict[Position, int]:
    dist = {start: 0}
    queue = deque([start])
    nbrs = grid.neighbors
    while queue:
        p = queue.popleft()
        d = dist[p]
        if limit is not None and d >= limit:
            continue
        for q in nbrs[p]:
            if q not in dist and passable(q):
                dist[q] = d + 1
                queue.append(q)
    return dist


def reachable_tiles(state: GameState, uid: str) -> dict[Position, int]:
    """Tiles where ``uid`` may end its move, mapped to their step cost."""
    me = state.by_id[uid]
    mov = state.template(uid).attrs.mov
    passable = _passable(state, uid, PathQueryMode.MOVEMENT_BLOCKED)
    dist = _bfs(state.stage.grid, me.pos, passable, mov)
    occ = state.occupant
    return {p: d for p, d in dist.items() if p == me.pos or p not in occ}


def _step_rank(frm: Position, to: Position, goal: Position) -> tuple[int, int]:
    dx, dy = to[0] - frm[0], to[1] - frm[1]
    if dx:
        toward = abs(goal[0] - to[0]) < abs(goal[0] - frm[0])
        return (0 if toward else 2, 0 if dx > 0 else 1)
    toward = abs(goal[1] - to[1]) < abs(goal[1] - frm[1])
    return (1 if toward else 3, 0 if dy > 0 else 1)


def canonical_path(
    grid: GridMap, start: Position, goal: Position, passable
) -> Optional[tuple[Position, ...]]:
    """Shortest path preferring horizontal steps toward the goal at every tile.

    Step order: horizontal toward goal, vertical toward goal, horizontal away,
    vertical away (right before left, down before up).
    """
    if start == goal:
        return ()
    back = _bfs(grid, goal, lambda q: q == start or passable(q))
    if start not in back:
        return None
    path = []
    cur = start
    nbrs = grid.neighbors
    while cur != goal:
        want = back[cur] - 1
        options = [q for q in nbrs[cur] if back.get(q) == want]
        cur = min(options, key=lambda q: _step_rank(cur, q, goal))
        path.append(cur)
    return tuple(path)


def shortest_path(
    state: GameState, uid: str, goal: Position, mode: PathQueryMode = PathQueryMode.MOVEMENT_BLOCKED
) -> Optional[tuple[Position, ...]]:
    """Canonical shortest path for ``uid`` to ``goal``; ``None`` if unreachable.

    The goal tile itself is always enterable (it may hold the target unit).
    """
    me = state.by_id[uid]
    grid = state.stage.grid
    if not grid.is_floor(goal):
        return None
    base = _passable(state, uid, mode)
    return canonical_path(grid, me.pos, goal, lambda q: q == goal or base(q))


def _path_key(grid, start, end, passable, ref: Position):
    path = canonical_path(grid, start, end, passable) or ()
    ranks, cur = [], start
    for q in path:
        ranks.append(_step_rank(cur, q, ref))
        cur = q
    return tuple(ranks)


def attack_candidates(state: GameState, uid: str) -> list[tuple[str, Position]]:
    """(target, endpoint) pairs in preference order, without paths."""
    tpl = state.stage.templates
    me = state.by_id[uid]
    attrs = tpl[uid].attrs
    if attrs.attack_range is None or (me.durability_left is not None and me.durability_left <= 0):
        return []
    reach = reachable_tiles(state, uid)
    side = tpl[uid].side
    order = state.stage.order
    hostiles = [u for u in state.units if tpl[u.uid].side is not side]
    hostiles.sort(key=lambda u: (tpl[u.uid].attrs.defense, order[u.uid]))
    lo, hi = attrs.attack_range
    grid = state.stage.grid
    passable = None
    out = []
    for h in hostiles:
        spots = [p for p in reach if lo <= manhattan(p, h.pos) <= hi]
        if not spots:
            continue
        best = min(reach[p] for p in spots)
        if sum(1 for p in spots if reach[p] == best) > 1:
            if passable is None:
                passable = _passable(state, uid, PathQueryMode.MOVEMENT_BLOCKED)
            spots.sort(key=lambda p: (reach[p], _path_key(grid, me.pos, p, passable, h.pos)))
        else:
            spots.sort(key=lambda p: reach[p])
        out.extend((h.uid, p) for p in spots)
    return out


def move_and_attack_targets(state: GameState, uid: str) -> list[AttackOption]:
    """Hostiles ``uid`` can strike this turn, lowest Def first.

    Each target is listed once per usable endpoint, cheapest endpoint first;
    walls never block the strike itself.
    """
    passable = _passable(state, uid, PathQueryMode.MOVEMENT_BLOCKED)
    start = state.by_id[uid].pos
    grid = state.stage.grid
    return [
        AttackOption(t, p, canonical_path(grid, start, p, passable) or ())
        for t, p in attack_candidates(state, uid)
    ]


def path_to(state: GameState, uid: str, end: Position) -> tuple[Position, ...]:
    """Canonical movement path for ``uid`` to a reachable endpoint."""
    passable = _passable(state, uid, PathQueryMode.MOVEMENT_BLOCKED)
    return canonical_path(state.stage.grid, state.by_id[uid].pos, end, passable) or ()


def connected_component(grid: GridMap, p: Position) -> set[Position]:
    comp = grid.component_of
    cid = comp[p]
    return {q for q, c in comp.items() if c == cid}


def same_component(grid: GridMap, a: Position, b: Position) -> bool:
    comp = grid.component_of
    return comp.get(a) is not None and comp.get(a) == comp.get(b)


def attack_coverage(grid: GridMap, start: Position, mov: int, lo: int, hi: int, blocked=frozenset()) -> set[Position]:
    """Every tile within strike distance of some tile reachable in ``mov`` steps.

    Static helper for layout checks; ``blocked`` tiles cannot be entered.
    """
    reach = _bfs(grid, start, lambda q: q not in blocked, mov)
    out = set()
    for p in reach:
        if p != start and p in blocked:
            continue
        x, y = p
        for dx in range(-hi, hi + 1):
            rest = hi - abs(dx)
            for dy in range(-rest, rest + 1):
                if abs(dx) + abs(dy) >= lo:
                    out.add(Position(x + dx, y + dy))
    return out
