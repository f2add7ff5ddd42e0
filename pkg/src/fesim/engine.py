"""Turn resolution: player actions, combat, the deterministic enemy phase."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .model import (
    Action,
    GameState,
    Outcome,
    Phase,
    Position,
    Side,
    StageSpec,
    UnitState,
    manhattan,
)
from .pathfind import (
    PathQueryMode,
    attack_candidates,
    path_to,
    shortest_path,
)


class EngineError(ValueError):
    pass


class WrongPhase(EngineError):
    pass


class AlreadyActed(EngineError):
    pass


class IllegalMove(EngineError):
    pass


class OutOfRange(EngineError):
    pass


class TargetInvalid(EngineError):
    pass


class NoWeapon(EngineError):
    pass


class ReplayError(EngineError):
    def __init__(self, round_no: int, index: int, cause: Exception):
        super().__init__(f"round {round_no}, action {index}: {cause}")
        self.round_no = round_no
        self.index = index
        self.cause = cause


@dataclass(frozen=True)
class CombatReport:
    attacker: str
    defender: str
    damage_dealt: int
    countered: bool = False
    counter_damage: int = 0
    deaths: frozenset = frozenset()
    behavior_flips: frozenset = frozenset()


@dataclass(frozen=True)
class EnemyAction:
    uid: str
    kind: str  # "attack" | "move" | "stay"
    path: tuple[Position, ...] = ()
    target: Optional[str] = None
    report: Optional[CombatReport] = None


MoveScript = tuple  # tuple of rounds, each a tuple of Action


def _replace_unit(state: GameState, new: UnitState) -> tuple[UnitState, ...]:
    return tuple(new if u.uid == new.uid else u for u in state.units)


def _lord_dead(state: GameState) -> bool:
    lord = state.stage.lord_id
    return lord is not None and lord not in state.by_id


def resolve_combat(state: GameState, attacker: str, defender: str) -> tuple[GameState, CombatReport]:
    """Strike plus optional counter. Damage is ``max(0, atk - def)``."""
    tpl = state.stage.templates
    a, d = state.by_id.get(attacker), state.by_id.get(defender)
    if a is None or d is None:
        raise TargetInvalid(f"{attacker} or {defender} is not on the map")
    if tpl[attacker].side is tpl[defender].side:
        raise TargetInvalid(f"{attacker} cannot attack ally {defender}")
    aa, da = tpl[attacker].attrs, tpl[defender].attrs
    dist = manhattan(a.pos, d.pos)
    if not aa.can_hit(dist):
        raise OutOfRange(f"{attacker} cannot strike at distance {dist}")
    if a.durability_left is not None and a.durability_left <= 0:
        raise NoWeapon(attacker)

    units = dict(state.by_id)
    flips = {u for u, t in ((attacker, a), (defender, d)) if not t.impatient and tpl[u].side is Side.ENEMY}

    dmg = max(0, aa.atk - da.defense)
    a = UnitState(a.uid, a.pos, a.hp, a.impatient or attacker in flips,
                  None if a.durability_left is None else a.durability_left - 1)
    d = UnitState(d.uid, d.pos, d.hp - dmg, d.impatient or defender in flips, d.durability_left)
    deaths = set()
    countered, cdmg = False, 0
    if d.hp <= 0:
        deaths.add(defender)
    elif (
        state.stage.counter_attacks
        and da.can_hit(dist)
        and (d.durability_left is None or d.durability_left > 0)
    ):
        countered = True
        cdmg = max(0, da.atk - aa.defense)
        a = UnitState(a.uid, a.pos, a.hp - cdmg, a.impatient, a.durability_left)
        d = UnitState(d.uid, d.pos, d.hp, d.impatient,
                      None if d.durability_left is None else d.durability_left - 1)
        if a.hp <= 0:
            deaths.add(attacker)
    units[attacker], units[defender] = a, d
    new_units = tuple(units[u.uid] for u in state.units if u.uid not in deaths)
    new = state.evolve(units=new_units)
    if _lord_dead(new) and new.outcome is Outcome.ONGOING:
        new = new.evolve(outcome=Outcome.LOSE)
    report = CombatReport(attacker, defender, dmg, countered, cdmg, frozenset(deaths), frozenset(flips))
    return new, report


def check_path(state: GameState, uid: str, path: Sequence[Position]) -> None:
    me = state.by_id[uid]
    mov = state.template(uid).attrs.mov
    if len(path) > mov:
        raise IllegalMove(f"{uid}: path of length {len(path)} exceeds mov {mov}")
    grid = state.stage.grid
    tpl = state.stage.templates
    side = tpl[uid].side
    occ = state.occupant
    cur = me.pos
    for step in path:
        if manhattan(cur, step) != 1:
            raise IllegalMove(f"{uid}: step {tuple(cur)} -> {tuple(step)} is not orthogonal")
        if not grid.is_floor(step):
            raise IllegalMove(f"{uid}: {tuple(step)} is not floor")
        other = occ.get(step)
        if other is not None and tpl[other].side is not side:
            raise IllegalMove(f"{uid}: {tuple(step)} is held by hostile {other}")
        cur = step
    if path and cur != me.pos and cur in occ:
        raise IllegalMove(f"{uid}: endpoint {tuple(cur)} is occupied")


def apply_player_action(state: GameState, action: Action) -> tuple[GameState, Optional[CombatReport]]:
    if state.phase is not Phase.PLAYER:
        raise WrongPhase("player actions need the player phase")
    if state.outcome is not Outcome.ONGOING:
        raise WrongPhase(f"game already decided: {state.outcome.value}")
    uid = action.uid
    me = state.by_id.get(uid)
    if me is None or state.side(uid) is not Side.PLAYER:
        raise TargetInvalid(f"{uid} is not a live player unit")
    if uid in state.acted:
        raise AlreadyActed(uid)
    check_path(state, uid, action.path)
    end = action.path[-1] if action.path else me.pos
    moved = UnitState(uid, end, me.hp, me.impatient, me.durability_left)
    state = state.evolve(units=_replace_unit(state, moved), acted=state.acted | {uid})
    grid = state.stage.grid
    if uid == state.stage.lord_id and grid.throne is not None and end == grid.throne:
        return state.evolve(outcome=Outcome.WIN), None

    report = None
    if action.kind == "attack":
        target = state.by_id.get(action.target)
        if target is None or state.side(action.target) is Side.PLAYER:
            raise TargetInvalid(f"{uid}: bad attack target {action.target}")
        if state.template(uid).attrs.heal is not None and state.template(uid).attrs.attack_range is None:
            raise NoWeapon(uid)
        state, report = resolve_combat(state, uid, action.target)
    elif action.kind == "heal":
        state = _heal(state, uid, action.target)
    elif action.kind != "wait":
        raise TargetInvalid(f"unknown action kind {action.kind!r}")
    return state, report


def _heal(state: GameState, uid: str, target_id: Optional[str]) -> GameState:
    me = state.by_id[uid]
    heal = state.template(uid).attrs.heal
    if heal is None:
        raise NoWeapon(f"{uid} cannot heal")
    target = state.by_id.get(target_id) if target_id else None
    if target is None or state.side(target_id) is not Side.PLAYER or target_id == uid:
        raise TargetInvalid(f"{uid}: bad heal target {target_id}")
    if not heal.lo <= manhattan(me.pos, target.pos) <= heal.hi:
        raise OutOfRange(f"{uid}: {target_id} outside heal range")
    if me.durability_left is not None and me.durability_left <= 0:
        raise NoWeapon(uid)
    hp_max = state.template(target_id).attrs.hp_max
    healed = UnitState(target.uid, target.pos, min(hp_max, target.hp + heal.amount),
                       target.impatient, target.durability_left)
    units = _replace_unit(state, healed)
    if me.durability_left is not None:
        spent = UnitState(me.uid, me.pos, me.hp, me.impatient, me.durability_left - 1)
        units = tuple(spent if u.uid == uid else u for u in units)
    return state.evolve(units=units)


def end_player_turn(state: GameState) -> GameState:
    if state.phase is not Phase.PLAYER:
        raise WrongPhase("end_player_turn outside the player phase")
    return state.evolve(phase=Phase.ENEMY)


def _advance(state: GameState, uid: str) -> tuple[Position, ...]:
    """Path an impatient enemy walks toward its chase target (may be empty)."""
    tpl = state.stage.templates
    me = state.by_id[uid]
    comp = state.stage.grid.component_of
    mine = comp[me.pos]
    order = state.stage.order
    prey = [u for u in state.units if tpl[u.uid].side is Side.PLAYER and comp[u.pos] == mine]
    if not prey:
        return ()
    target = min(prey, key=lambda u: (tpl[u.uid].attrs.defense, order[u.uid]))
    full = shortest_path(state, uid, target.pos, PathQueryMode.WALLS_ONLY) or ()
    occ = state.occupant
    walked = []
    for step in full[: tpl[uid].attrs.mov]:
        other = occ.get(step)
        if other is not None and tpl[other].side is Side.PLAYER:
            break
        walked.append(step)
    while walked and walked[-1] in occ:
        walked.pop()
    return tuple(walked)


def run_enemy_turn(state: GameState) -> tuple[GameState, list[EnemyAction]]:
    if state.phase is not Phase.ENEMY:
        raise WrongPhase("run_enemy_turn outside the enemy phase")
    log: list[EnemyAction] = []
    tpl = state.stage.templates
    for uid in [t.uid for t in state.stage.roster if t.side is Side.ENEMY]:
        if state.outcome is not Outcome.ONGOING:
            break
        me = state.by_id.get(uid)
        if me is None:
            continue
        cands = attack_candidates(state, uid)
        if cands:
            target, spot = cands[0]
            path = path_to(state, uid, spot)
            moved = UnitState(uid, spot, me.hp, me.impatient, me.durability_left)
            state = state.evolve(units=_replace_unit(state, moved))
            state, report = resolve_combat(state, uid, target)
            log.append(EnemyAction(uid, "attack", path, target, report))
            continue
        if not me.impatient:
            log.append(EnemyAction(uid, "stay"))
            continue
        path = _advance(state, uid)
        if path:
            moved = UnitState(uid, path[-1], me.hp, me.impatient, me.durability_left)
            state = state.evolve(units=_replace_unit(state, moved))
            log.append(EnemyAction(uid, "move", path))
        else:
            log.append(EnemyAction(uid, "stay"))
    outcome = state.outcome
    budget = state.stage.round_budget
    if outcome is Outcome.ONGOING and budget is not None and state.round + 1 > budget:
        outcome = Outcome.LOSE
    return state.evolve(phase=Phase.PLAYER, round=state.round + 1, acted=frozenset(), outcome=outcome), log


@dataclass
class ReplayResult:
    final: GameState
    states: list[GameState] = field(default_factory=list)
    enemy_logs: list[list[EnemyAction]] = field(default_factory=list)
    reports: list[CombatReport] = field(default_factory=list)

    @property
    def outcome(self) -> Outcome:
        return self.final.outcome


def play_round(state: GameState, actions: Sequence[Action]):
    """Apply one round; returns (state, player reports, enemy log or None)."""
    reports = []
    for act in actions:
        state, rep = apply_player_action(state, act)
        if rep is not None:
            reports.append(rep)
        if state.outcome is not Outcome.ONGOING:
            return state, reports, None
    state = end_player_turn(state)
    state, log = run_enemy_turn(state)
    return state, reports, log


def replay(spec: StageSpec, script: MoveScript, state: Optional[GameState] = None) -> ReplayResult:
    state = GameState.initial(spec) if state is None else state
    result = ReplayResult(state, [state])
    for rnd in script:
        if state.outcome is not Outcome.ONGOING:
            break
        for i, act in enumerate(rnd):
            try:
                state, rep = apply_player_action(state, act)
            except EngineError as exc:
                raise ReplayError(state.round, i, exc) from exc
            if rep is not None:
                result.reports.append(rep)
            result.states.append(state)
            if state.outcome is not Outcome.ONGOING:
                break
        if state.outcome is not Outcome.ONGOING:
            break
        state = end_player_turn(state)
        state, log = run_enemy_turn(state)
        result.enemy_logs.append(log)
        result.states.append(state)
    result.final = state
    return result
