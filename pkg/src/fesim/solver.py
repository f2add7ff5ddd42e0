"""Winnability search over the single-agent game graph.

The enemy phase is a deterministic function of the state, so a stage is a
one-player reachability problem: expand every player phase exhaustively
(memoized on mid-turn states), run the enemy phase, and continue from the
states that have not been seen at an earlier round.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

from .engine import apply_player_action, end_player_turn, run_enemy_turn
from .model import Action, GameState, Outcome, Side, StageSpec, manhattan, validate_stage
from .pathfind import path_to, reachable_tiles


class Decision(str, enum.Enum):
    WINNABLE = "Winnable"
    NOT_WINNABLE = "NotWinnable"
    RESOURCE_EXCEEDED = "ResourceExceeded"


@dataclass(frozen=True)
class Limits:
    max_nodes: Optional[int] = 10_000_000
    max_seconds: Optional[float] = None


@dataclass
class SearchStats:
    nodes: int = 0
    memo_hits: int = 0
    states: int = 0
    rounds: int = 0
    elapsed: float = 0.0


@dataclass
class SolveResult:
    decision: Decision
    witness: Optional[tuple] = None
    stats: SearchStats = field(default_factory=SearchStats)

    @property
    def winnable(self) -> bool:
        return self.decision is Decision.WINNABLE


class _Budget(Exception):
    pass


def state_key(state: GameState, with_round: bool = False) -> tuple:
    """Canonical, hashable encoding of everything the engine reads."""
    units = tuple((u.uid, u.pos[0], u.pos[1], u.hp, u.impatient, u.durability_left) for u in state.units)
    key = (units, state.phase.value, tuple(sorted(state.acted)), state.outcome.value)
    return key + (state.round,) if with_round else key


def unit_actions(state: GameState, uid: str, skip_idle: bool = True) -> list[Action]:
    """Every distinct action for one player unit in the current state."""
    tpl = state.stage.templates
    me = state.by_id[uid]
    attrs = tpl[uid].attrs
    grid = state.stage.grid
    is_lord = uid == state.stage.lord_id
    hostiles = [u for u in state.units if tpl[u.uid].side is not Side.PLAYER]
    allies = [u for u in state.units if tpl[u.uid].side is Side.PLAYER and u.uid != uid]
    armed = me.durability_left is None or me.durability_left > 0
    out = []
    for end in sorted(reachable_tiles(state, uid)):
        path = path_to(state, uid, end) if end != me.pos else ()
        if is_lord and grid.throne is not None and end == grid.throne:
            out.append(Action(uid, path))
            continue
        if path or not skip_idle:
            out.append(Action(uid, path))
        if not armed:
            continue
        if attrs.attack_range is not None:
            for h in hostiles:
                if attrs.can_hit(manhattan(end, h.pos)):
                    out.append(Action(uid, path, "attack", h.uid))
        if attrs.heal is not None:
            for a in allies:
                if not attrs.can_heal(manhattan(end, a.pos)):
                    continue
                if me.durability_left is None and a.hp >= tpl[a.uid].attrs.hp_max:
                    continue  # no-op heal, identical to waiting
                out.append(Action(uid, path, "heal", a.uid))
    return out


class _Search:
    def __init__(self, spec: StageSpec, limits: Limits, skip_idle: bool, goal=None):
        self.spec = spec
        self.goal = goal
        self.limits = limits
        self.skip_idle = skip_idle
        self.stats = SearchStats()
        self.t0 = time.perf_counter()

    def tick(self) -> None:
        self.stats.nodes += 1
        lim = self.limits
        if lim.max_nodes is not None and self.stats.nodes > lim.max_nodes:
            raise _Budget()
        if lim.max_seconds is not None and self.stats.nodes % 256 == 0:
            if time.perf_counter() - self.t0 > lim.max_seconds:
                raise _Budget()

    def reached(self, state: GameState) -> bool:
        if self.goal is None:
            return state.outcome is Outcome.WIN
        return self.goal(state)

    def player_phase(self, start: GameState) -> Iterator[tuple[GameState, tuple]]:
        """Yield (state after the player phase, actions) for each distinct outcome.

        A winning line is yielded as soon as it is found.
        """
        seen = set()
        ended = set()
        stack = [(start, ())]
        while stack:
            state, acts = stack.pop()
            key = state_key(state)
            if key in seen:
                self.stats.memo_hits += 1
                continue
            seen.add(key)
            self.tick()
            if self.reached(state):
                yield state, acts
                continue
            if state.outcome is not Outcome.ONGOING:
                continue
            if key[0] not in ended:
                ended.add(key[0])
                yield end_player_turn(state), acts
            tpl = state.stage.templates
            for u in state.units:
                if tpl[u.uid].side is not Side.PLAYER or u.uid in state.acted:
                    continue
                for act in unit_actions(state, u.uid, self.skip_idle):
                    nxt, _ = apply_player_action(state, act)
                    stack.append((nxt, acts + (act,)))

    def run(self, max_rounds: Optional[int], root: Optional[GameState] = None) -> SolveResult:
        root = GameState.initial(self.spec) if root is None else root
        parents: dict[tuple, tuple] = {state_key(root): (None, ())}
        if self.goal is not None and self.goal(root):
            return self._done(Decision.WINNABLE, ())
        frontier = [root]
        rnd = 0
        try:
            while frontier and (max_rounds is None or rnd < max_rounds):
                rnd += 1
                self.stats.rounds = rnd
                nxt_frontier = []
                for state in frontier:
                    skey = state_key(state)
                    for after, acts in self.player_phase(state):
                        if self.reached(after):
                            return self._done(Decision.WINNABLE, self._witness(parents, skey, acts))
                        nxt, _ = run_enemy_turn(after)
                        if self.goal is not None and self.goal(nxt):
                            return self._done(Decision.WINNABLE, self._witness(parents, skey, acts))
                        if nxt.outcome is not Outcome.ONGOING:
                            continue
                        k = state_key(nxt)
                        if k in parents:
                            self.stats.memo_hits += 1
                            continue
                        parents[k] = (skey, acts)
                        nxt_frontier.append(nxt)
                frontier = nxt_frontier
                self.stats.states = len(parents)
        except _Budget:
            return self._done(Decision.RESOURCE_EXCEEDED)
        return self._done(Decision.NOT_WINNABLE)

    def _witness(self, parents, key, last) -> tuple:
        rounds = [last]
        while True:
            prev, acts = parents[key]
            if prev is None:
                break
            rounds.append(acts)
            key = prev
        return tuple(reversed(rounds))

    def _done(self, decision: Decision, witness=None) -> SolveResult:
        self.stats.elapsed = time.perf_counter() - self.t0
        return SolveResult(decision, witness, self.stats)


def _check(spec: StageSpec) -> None:
    problems = validate_stage(spec)
    if problems:
        raise ValueError("invalid stage: " + "; ".join(f"{v.code} ({v.detail})" for v in problems))


def solve_bounded(
    spec: StageSpec,
    k: int,
    limits: Limits = Limits(),
    skip_idle: bool = True,
    goal: Optional[Callable[[GameState], bool]] = None,
    start: Optional[GameState] = None,
) -> SolveResult:
    """Decide whether the player can win within ``k`` rounds.

    ``goal`` replaces the win test: any reachable state (mid-turn or after an
    enemy phase) satisfying it counts as reached.
    """
    _check(spec)
    if k < 1:
        raise ValueError("k must be >= 1")
    return _Search(spec, limits, skip_idle, goal).run(k, start)


def solve_unbounded(
    spec: StageSpec,
    limits: Limits = Limits(),
    skip_idle: bool = True,
    goal: Optional[Callable[[GameState], bool]] = None,
    start: Optional[GameState] = None,
) -> SolveResult:
    """Decide whether a win is forcible with no round limit."""
    _check(spec)
    return _Search(spec, limits, skip_idle, goal).run(None, start)


def explore(
    spec: StageSpec,
    limits: Limits = Limits(),
    start: Optional[GameState] = None,
    max_rounds: Optional[int] = None,
    on_terminal: Optional[Callable[[GameState, tuple], None]] = None,
) -> SearchStats:
    """Walk the whole reachable game graph, reporting every winning end state.

    ``on_terminal(state, history)`` sees each Win state together with the
    list of round-start keys leading to it. Raises ``ResourceExceeded`` when
    limits are hit.
    """
    search = _Search(spec, limits, True)
    root = GameState.initial(spec) if start is None else start
    seen = {state_key(root)}
    frontier = [root]
    rnd = 0
    try:
        while frontier and (max_rounds is None or rnd < max_rounds):
            rnd += 1
            nxt_frontier = []
            for state in frontier:
                for after, acts in search.player_phase(state):
                    if after.outcome is Outcome.WIN:
                        if on_terminal is not None:
                            on_terminal(after, acts)
                        continue
                    nxt, _ = run_enemy_turn(after)
                    if nxt.outcome is not Outcome.ONGOING:
                        continue
                    k = state_key(nxt)
                    if k not in seen:
                        seen.add(k)
                        nxt_frontier.append(nxt)
            frontier = nxt_frontier
    except _Budget as exc:
        raise ResourceExceeded(search.stats.nodes) from exc
    search.stats.states = len(seen)
    search.stats.rounds = rnd
    search.stats.elapsed = time.perf_counter() - search.t0
    return search.stats


class ResourceExceeded(RuntimeError):
    pass
