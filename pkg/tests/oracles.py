"""Independent reference implementations used only by the tests."""

from __future__ import annotations

import itertools

from fesim.engine import EngineError, apply_player_action, end_player_turn, run_enemy_turn
from fesim.model import Action, GameState, Outcome, Position, Side

_DIRS = ((1, 0), (-1, 0), (0, 1), (0, -1))


def naive_moves(state: GameState, uid: str) -> dict[Position, tuple]:
    """Every endpoint of every step sequence the engine accepts, one path each."""
    me = state.by_id[uid]
    mov = state.template(uid).attrs.mov
    out = {me.pos: ()}
    for n in range(1, mov + 1):
        for dirs in itertools.product(_DIRS, repeat=n):
            x, y = me.pos
            path = []
            for dx, dy in dirs:
                x, y = x + dx, y + dy
                path.append(Position(x, y))
            if path[-1] in out:
                continue
            try:
                apply_player_action(state, Action(uid, tuple(path)))
            except EngineError:
                continue
            out[path[-1]] = tuple(path)
    return out


def naive_lines(state: GameState):
    """Every state reachable by some complete player phase, no pruning."""
    if state.outcome is not Outcome.ONGOING:
        yield state
        return
    yield end_player_turn(state)
    for u in state.units:
        if state.side(u.uid) is not Side.PLAYER or u.uid in state.acted:
            continue
        for path in naive_moves(state, u.uid).values():
            for kind, target in [("wait", None)] + [(k, o.uid) for o in state.units for k in ("attack", "heal")]:
                try:
                    nxt, _ = apply_player_action(state, Action(u.uid, path, kind, target))
                except EngineError:
                    continue
                yield from naive_lines(nxt)


def naive_winnable(spec, k: int) -> bool:
    """Plain recursion over rounds; only identical round-start states are merged."""
    layer = {GameState.initial(spec)}
    for _ in range(k):
        nxt = set()
        for st in layer:
            for after in naive_lines(st):
                if after.outcome is Outcome.WIN:
                    return True
                if after.outcome is not Outcome.ONGOING:
                    continue
                done, _ = run_enemy_turn(after)
                if done.outcome is Outcome.ONGOING:
                    nxt.add(done)
        layer = nxt
    return False


def crossing_ok(d: int, s1: int, s2: int) -> bool:
    """The four inequalities written out longhand."""
    return s1 != s2 and s1 != d - s2 and d - s1 != s2 and d - s1 != d - s2
