"""Compile a 3-bounded monotone CNF into a cycle-free stage, plus witnesses.

Geometry, relative to a variable gadget whose upper attack tile ``a`` sits
at (cx, 0) (rows grow downward):

    row -1        upper main road, tines hang above it
    row 0         a, the only tile within 2 of T
    rows 2..14    variable room (T at 2, F at 14), V starts at 8
    rows 3..13    sniper column at cx+2, one sniper per tile
    row 16        a' below F, row 17 the lower main road

Literal tines rise from the road at columns cx-2, cx, cx+2 (lengths 3, 5, 3)
so every tip is exactly six steps from ``a``. Contacts sit two tiles from
their own tip (cx-4, -4), (cx, -8), (cx+4, -4). Clause lanes run above the
contacts, one row pair per nesting level. The lower side is the mirror
image under r -> 16 - r.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace
from typing import Optional

from .engine import apply_player_action, end_player_turn, run_enemy_turn
from .model import (
    Action,
    Attributes,
    Behavior,
    GameState,
    GridMap,
    Outcome,
    Position,
    Side,
    StageSpec,
    UnitTemplate,
    manhattan,
    validate_stage,
)
from .pathfind import attack_coverage, canonical_path, path_to
from .sat import NEG, POS, CnfInstance, EmbeddingError, evaluate, is_bounded, slot_order, validate_embedding

D = 6
PITCH = 12
LEFT_MARGIN = 13  # first gadget column; keeps gate and throne out of reach

# slot column offset -> (tine column offset, tine length, contact offset)
_SLOT_GEOMETRY = {
    -4: (-2, 3, (-4, -4)),
    0: (0, 5, (0, -8)),
    4: (2, 3, (4, -4)),
}
_SLOT_COLUMNS = {1: (0,), 2: (-4, 4), 3: (-4, 0, 4)}


class RoutingFailure(ValueError):
    def __init__(self, clause: int, reason: str):
        super().__init__(f"clause {clause}: {reason}")
        self.clause = clause


class AssignmentUnsatisfying(ValueError):
    pass


class WitnessStuck(RuntimeError):
    pass


@dataclass(frozen=True)
class StatTable:
    variable: Attributes
    clause: Attributes
    lord: Attributes
    literal: Attributes
    sniper: Attributes


def stat_table(counter_attacks: bool = True, durability: Optional[int] = None) -> StatTable:
    def at(hp, atk, df, rng):
        return Attributes(hp, atk, df, D, rng, None, durability)

    return StatTable(
        variable=at(4 if counter_attacks else 7, 3, 1, (1, 2)),
        clause=at(3, 2, 1, (1, 2)),
        lord=at(1, 2, 1, (1, 1)),
        literal=at(2, 2, 1, (1, 2)),
        sniper=at(2, 5 if counter_attacks else 8, 2, (1, 2)),
    )


@dataclass
class VariableGadget:
    name: str
    column: int
    unit: str
    start: Position
    T: Position
    F: Position
    a_upper: Position
    a_lower: Position
    room: tuple[Position, ...]
    snipers: tuple[str, ...]
    sniper_tiles: tuple[Position, ...]
    literals: dict = field(default_factory=dict)  # (sign, clause) -> literal unit id
    tips: dict = field(default_factory=dict)  # (sign, clause) -> tip tile
    contacts: dict = field(default_factory=dict)  # (sign, clause) -> contact tile
    chokes: dict = field(default_factory=dict)  # sign -> (e, f)
    box: tuple[int, int, int, int] = (0, 0, 0, 0)


@dataclass
class ClausePath:
    index: int
    sign: str
    unit: str
    start: Position
    lane_row: int
    tiles: tuple[Position, ...]
    legs: tuple[tuple[str, Position, str], ...]  # (variable, contact, literal unit)


@dataclass
class GadgetLayout:
    variables: dict[str, VariableGadget]
    clauses: list[ClausePath]
    lord: str
    gate: Position
    throne: Position
    road: tuple[Position, ...]  # gate to throne, in walking order
    segments: dict = field(default_factory=dict)  # (variable, sign) -> road tiles e..f

    @property
    def literal_units(self) -> list[str]:
        return [u for g in self.variables.values() for u in g.literals.values()]


def _ranks(levels) -> dict[int, int]:
    return {lv: i for i, lv in enumerate(sorted(set(levels)))}


def compile_instance(
    inst: CnfInstance, counter_attacks: bool = True, durability: Optional[int] = None
) -> tuple[StageSpec, GadgetLayout]:
    """Build the stage and its landmark layout for ``inst``."""
    problems = validate_embedding(inst)
    if problems:
        raise EmbeddingError(problems)
    if not is_bounded(inst):
        raise ValueError("instance is not 3-bounded; run reduce_degree first")
    if not inst.variables:
        raise ValueError("instance has no variables")
    stats = stat_table(counter_attacks, durability)
    n = len(inst.variables)
    cols = {v: LEFT_MARGIN + PITCH * i for i, v in enumerate(inst.variables)}
    xc = cols[inst.variables[-1]] + 9

    # per side lane rows (relative to the upper side; lower side is mirrored)
    lane_rel: dict[int, int] = {}
    for sign in (POS, NEG):
        idxs = [i for i, c in enumerate(inst.clauses) if c.sign == sign]
        ranks = _ranks(inst.clauses[i].level for i in idxs)
        top = len(ranks) - 1
        for i in idxs:
            lane_rel[i] = -10 - 2 * (top - ranks[inst.clauses[i].level])

    def mirror(sign: str, r: int) -> int:
        return r if sign == POS else 16 - r

    # slot columns per (clause, variable)
    slot_of: dict[tuple[int, str], int] = {}
    for v in inst.variables:
        for sign in (POS, NEG):
            order = slot_order(inst, v, sign)
            for ci, off in zip(order, _SLOT_COLUMNS.get(len(order), ())):
                slot_of[(ci, v)] = off

    min_rel = min([-8] + [lane_rel[i] for i, c in enumerate(inst.clauses) if c.sign == POS]) - 1
    max_rel = max([24] + [16 - lane_rel[i] for i, c in enumerate(inst.clauses) if c.sign == NEG]) + 1
    y0 = -min_rel
    height = max_rel - min_rel + 1
    width = xc + 2

    def P(x: int, r: int) -> Position:
        return Position(x, r + y0)

    floor: set[Position] = set()
    road: list[Position] = [P(x, 17) for x in range(1, xc + 1)]
    road += [P(xc, r) for r in range(16, -2, -1)]
    road += [P(x, -1) for x in range(xc - 1, 0, -1)]
    floor.update(road)
    gate, throne = road[0], road[-1]

    gadgets: dict[str, VariableGadget] = {}
    roster_v, roster_lit, roster_snipe = [], [], []
    for i, v in enumerate(inst.variables):
        cx = cols[v]
        room = tuple(P(cx, r) for r in range(2, 15))
        snipe = tuple(P(cx + 2, r) for r in range(3, 14))
        floor.update(room)
        floor.update(snipe)
        floor.update((P(cx, 0), P(cx, 16)))
        uid = f"V.{v}"
        g = VariableGadget(
            v, cx, uid, P(cx, 8), P(cx, 2), P(cx, 14), P(cx, 0), P(cx, 16), room,
            tuple(f"S.{v}.{k}" for k in range(len(snipe))), snipe,
            box=(cx - 4, P(0, min_rel).y, cx + 4, P(0, max_rel).y),
        )
        roster_v.append(UnitTemplate(uid, Side.PLAYER, stats.variable, Behavior.PLAYER, g.start))
        for k, t in enumerate(snipe):
            roster_snipe.append(UnitTemplate(g.snipers[k], Side.ENEMY, stats.sniper, Behavior.PATIENT, t))
        for sign in (POS, NEG):
            users = slot_order(inst, v, sign)
            for ci in users:
                off = slot_of[(ci, v)]
                tcol, length, (kx, kr) = _SLOT_GEOMETRY[off]
                tine = [P(cx + tcol, mirror(sign, -1 - s)) for s in range(1, length + 1)]
                floor.update(tine)
                lit = f"L.{ci}.{v}"
                g.literals[(sign, ci)] = lit
                g.tips[(sign, ci)] = tine[-1]
                g.contacts[(sign, ci)] = P(cx + kx, mirror(sign, kr))
                roster_lit.append(UnitTemplate(lit, Side.ENEMY, stats.literal, Behavior.PATIENT, tine[-1]))
            if users:
                rr = mirror(sign, -1)
                g.chokes[sign] = (P(cx - 3, rr), P(cx + 3, rr))
        gadgets[v] = g

    clauses: list[ClausePath] = []
    roster_c = []
    claimed: dict[Position, int] = {}
    for ci, c in enumerate(inst.clauses):
        sign = c.sign
        lane = mirror(sign, lane_rel[ci])
        tiles: list[Position] = []
        legs = []
        leg_cols = []
        for v in c.variables:
            g = gadgets[v]
            contact = g.contacts[(sign, ci)]
            step = -1 if sign == POS else 1
            r = contact.y
            while True:
                tiles.append(Position(contact.x, r))
                if r == lane + y0:
                    break
                r += step
            legs.append((v, contact, g.literals[(sign, ci)]))
            leg_cols.append(contact.x)
        lo, hi = min(leg_cols), max(leg_cols)
        tiles += [Position(x, lane + y0) for x in range(lo, hi + 1)]
        tiles = sorted(set(tiles))
        for t in tiles:
            if t in floor or t in claimed:
                raise RoutingFailure(ci, f"tile {tuple(t)} already used")
            claimed[t] = ci
        start = Position(lo, lane + y0)
        uid = f"C{ci}"
        attrs = replace(stats.clause, hp_max=len(c.literals))
        roster_c.append(UnitTemplate(uid, Side.PLAYER, attrs, Behavior.PLAYER, start))
        legs.sort(key=lambda leg: leg[1].x)
        clauses.append(ClausePath(ci, sign, uid, start, lane + y0, tuple(tiles), tuple(legs)))

    # every clause path must be its own component
    all_floor = floor | set(claimed)
    for t, ci in claimed.items():
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            q = Position(t.x + dx, t.y + dy)
            if q in all_floor and claimed.get(q) != ci:
                raise RoutingFailure(ci, f"tile {tuple(t)} touches another structure at {tuple(q)}")

    rows = []
    for y in range(height):
        rows.append("".join("." if Position(x, y) in all_floor else "#" for x in range(width)))
    grid = GridMap(tuple(rows), throne)
    lord = UnitTemplate("Lord", Side.PLAYER, stats.lord, Behavior.PLAYER, gate, True)
    roster = (lord, *roster_v, *roster_c, *roster_lit, *roster_snipe)
    spec = StageSpec(grid, roster, len(grid.floor_tiles), counter_attacks)
    segments = {}
    for v, g in gadgets.items():
        for sign, (e, f) in g.chokes.items():
            segments[(v, sign)] = tuple(Position(x, e.y) for x in range(e.x, f.x + 1))
    layout = GadgetLayout(gadgets, clauses, "Lord", gate, throne, tuple(road), segments)
    return spec, layout


# ---------------------------------------------------------------------------


def check_cycle_free(grid: GridMap) -> tuple[bool, Optional[tuple[Position, ...]]]:
    """True iff floor adjacency is a forest; otherwise one cycle as a witness."""
    parent: dict[Position, Optional[Position]] = {}
    nbrs = grid.neighbors
    for root in grid.floor_tiles:
        if root in parent:
            continue
        parent[root] = None
        stack = [root]
        while stack:
            p = stack.pop()
            for q in nbrs[p]:
                if q == parent[p]:
                    continue
                if q in parent:
                    return False, _cycle(parent, p, q)
                parent[q] = p
                stack.append(q)
    return True, None


def _cycle(parent, p, q) -> tuple[Position, ...]:
    up_p = [p]
    while parent[up_p[-1]] is not None:
        up_p.append(parent[up_p[-1]])
    up_q = [q]
    while parent[up_q[-1]] is not None:
        up_q.append(parent[up_q[-1]])
    common = set(up_p) & set(up_q)
    a = [t for t in up_p if t not in common]
    b = [t for t in up_q if t not in common]
    meet = next(t for t in up_p if t in common)
    return tuple(a + [meet] + list(reversed(b)))


def _road_dist(grid: GridMap, src: Position) -> dict[Position, int]:
    dist = {src: 0}
    queue = deque([src])
    while queue:
        p = queue.popleft()
        for q in grid.neighbors[p]:
            if q not in dist:
                dist[q] = dist[p] + 1
                queue.append(q)
    return dist


def check_layout(spec: StageSpec, layout: GadgetLayout) -> list[str]:
    """Distance invariants of every gadget; an empty list means all hold."""
    grid = spec.grid
    out = []
    tpl = spec.templates
    lit_tiles = {tpl[u].start: u for u in layout.literal_units}
    players = [t.uid for t in spec.roster if t.side is Side.PLAYER]
    for v, g in layout.variables.items():
        if len(g.room) != 2 * D + 1 or g.start != g.room[D]:
            out.append(f"{v}: room span {len(g.room)} or start off centre")
        if len(g.sniper_tiles) != 2 * D - 1:
            out.append(f"{v}: {len(g.sniper_tiles)} snipers")
        for t in g.room:
            hits = sum(1 for s in g.sniper_tiles if manhattan(s, t) <= 2)
            if (t in (g.T, g.F)) != (hits == 0):
                out.append(f"{v}: sniper coverage wrong at {tuple(t)}")
        near_T = [p for p in grid.floor_tiles if manhattan(p, g.T) <= 2 and p not in g.room]
        near_F = [p for p in grid.floor_tiles if manhattan(p, g.F) <= 2 and p not in g.room]
        if near_T != [g.a_upper] or near_F != [g.a_lower]:
            out.append(f"{v}: attack tiles next to T/F are {near_T} / {near_F}")
        for (sign, ci), tip in g.tips.items():
            a = g.a_upper if sign == POS else g.a_lower
            if _road_dist(grid, tip).get(a) != D:
                out.append(f"{v}: literal {ci} not at distance {D} from a")
            contact = g.contacts[(sign, ci)]
            if manhattan(contact, tip) != 2:
                out.append(f"{v}: contact of clause {ci} not at distance 2")
        for sign, (e, f) in g.chokes.items():
            if manhattan(e, f) <= D - 1:
                out.append(f"{v}: choke too short")
            lits = [(u, t) for (s, _), u in g.literals.items() if s == sign for t in [tpl[u].start]]
            for u, t in lits:
                cov = attack_coverage(grid, t, D, 1, 2)
                missing = [p for p in layout.segments[(v, sign)] if p not in cov]
                if missing:
                    out.append(f"{v}: literal {u} misses choke tiles {missing}")
    # contacts are threatened by their own literal only; other clause and
    # variable tiles, the gate and the throne by no literal at all
    cover = {u: attack_coverage(grid, t, D, 1, 2) for t, u in lit_tiles.items()}
    contact_owner = {}
    for g in layout.variables.values():
        for key, c in g.contacts.items():
            contact_owner[c] = g.literals[key]
    for cp in layout.clauses:
        for t in cp.tiles:
            threats = {u for u, cov in cover.items() if t in cov}
            want = {contact_owner[t]} if t in contact_owner else set()
            if threats != want:
                out.append(f"clause {cp.index}: tile {tuple(t)} threatened by {sorted(threats)}")
    for t in (layout.gate, layout.throne):
        if any(t in cov for cov in cover.values()):
            out.append(f"road end {tuple(t)} is threatened")
    snipe = [s for g in layout.variables.values() for s in g.sniper_tiles]
    room = {t for g in layout.variables.values() for t in g.room}
    for p in grid.floor_tiles:
        if p in room or p in snipe:
            continue
        if any(manhattan(p, s) <= 2 for s in snipe):
            out.append(f"sniper reaches {tuple(p)}")
    ok, cyc = check_cycle_free(grid)
    if not ok:
        out.append(f"cycle through {cyc[:4]}")
    if validate_stage(spec):
        out.append("stage fails validation")
    del players
    return out


def layout_report(layout: GadgetLayout) -> str:
    """Landmark table, one line per landmark, stable order."""
    lines = [f"gate {tuple(layout.gate)}", f"throne {tuple(layout.throne)}"]
    for v, g in layout.variables.items():
        lines.append(f"variable {v} unit={g.unit} start={tuple(g.start)} T={tuple(g.T)} F={tuple(g.F)} "
                     f"a={tuple(g.a_upper)} a'={tuple(g.a_lower)} snipers={len(g.snipers)}")
        for (sign, ci), u in sorted(g.literals.items(), key=lambda kv: (kv[0][0], kv[0][1])):
            lines.append(f"  literal {u} side={sign} tip={tuple(g.tips[(sign, ci)])} "
                         f"contact={tuple(g.contacts[(sign, ci)])}")
        for sign, (e, f) in sorted(g.chokes.items()):
            lines.append(f"  choke {sign} e={tuple(e)} f={tuple(f)}")
    for cp in layout.clauses:
        legs = " ".join(f"{v}@{tuple(c)}" for v, c, _ in cp.legs)
        lines.append(f"clause {cp.index} {cp.sign} unit={cp.unit} start={tuple(cp.start)} "
                     f"lane={cp.lane_row} tiles={len(cp.tiles)} legs: {legs}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------


def _walk(grid: GridMap, src: Position, dst: Position) -> tuple[Position, ...]:
    return canonical_path(grid, src, dst, grid.is_floor) or ()


def synthesize_witness(
    inst: CnfInstance, spec: StageSpec, layout: GadgetLayout, assignment: dict[str, bool]
) -> tuple:
    """Winning move script for a satisfying ``assignment``.

    Round 1 commits every variable unit. Clause units then visit the contacts
    of their unsatisfied literals and kill them; the Lord walks once every
    literal unit is gone.
    """
    if any(v not in assignment for v in inst.variables) or not evaluate(inst, assignment):
        raise AssignmentUnsatisfying("assignment does not satisfy the instance")
    grid = spec.grid
    counters = spec.counter_attacks
    todo: dict[str, list[tuple[Position, str]]] = {}
    for cp in layout.clauses:
        want_true = cp.sign == NEG  # a negative literal's unit survives V when x is true
        todo[cp.unit] = [(c, lit) for v, c, lit in cp.legs if assignment[v] == want_true]
    lits = set(layout.literal_units)
    road = layout.road

    state = GameState.initial(spec)
    script = []
    limit = spec.round_budget or len(grid.floor_tiles)
    while state.outcome is Outcome.ONGOING:
        if state.round > limit:
            raise WitnessStuck("round budget exhausted")
        acts: list[Action] = []
        live = state.by_id
        for v, g in layout.variables.items():
            me = live.get(g.unit)
            if me is None:
                continue
            if state.round == 1:
                acts.append(Action(g.unit, path_to(state, g.unit, g.T if assignment[v] else g.F)))
                continue
            a = g.a_upper if assignment[v] else g.a_lower
            foe = state.occupant.get(a)
            if foe in lits:
                acts.append(Action(g.unit, (), "attack", foe))
        for cp in layout.clauses:
            me = live.get(cp.unit)
            queue = todo[cp.unit]
            while queue and queue[0][1] not in live:
                queue.pop(0)
            if me is None or not queue:
                continue
            contact, lit = queue[0]
            if me.pos == contact:
                if not counters or live[lit].impatient:
                    acts.append(Action(cp.unit, (), "attack", lit))
                continue
            path = _walk(grid, me.pos, contact)[:D]
            if path[-1] == contact and not counters:
                acts.append(Action(cp.unit, path, "attack", lit))
            else:
                acts.append(Action(cp.unit, path))
        lord = live.get(layout.lord)
        if lord is not None and not (lits & set(live)):
            i = road.index(lord.pos)
            acts.append(Action(layout.lord, road[i + 1 : i + 1 + D]))
        for act in acts:
            state, _ = apply_player_action(state, act)
            if state.outcome is not Outcome.ONGOING:
                break
        script.append(tuple(acts))
        if state.outcome is Outcome.ONGOING:
            state, _ = run_enemy_turn(end_player_turn(state))
    if state.outcome is not Outcome.WIN:
        raise WitnessStuck(f"witness ended in {state.outcome.value} at round {state.round}")
    return tuple(script)


# -- isolated harnesses -------------------------------------------------------


def _strip_throne(spec: StageSpec, *drop: str) -> StageSpec:
    grid = GridMap(spec.grid.rows, None)
    keep = tuple(t for t in spec.roster if t.uid not in set(drop))
    return StageSpec(grid, keep, spec.round_budget, spec.counter_attacks)


def variable_harness(counter_attacks: bool = True) -> tuple[StageSpec, VariableGadget]:
    """One variable unit in its room next to the sniper column, nothing else."""
    spec, layout = compile_instance(CnfInstance(("x",), ()), counter_attacks)
    return _strip_throne(spec, layout.lord), layout.variables["x"]


def clause_harness(live: int = 3, counter_attacks: bool = True) -> tuple[StageSpec, list[str]]:
    """A 3-literal clause unit facing ``live`` of its literal units.

    Returns the stage and the live literal ids. Variable units, snipers and
    the Lord are removed so only the clause fight remains.
    """
    inst = CnfInstance(("x", "y", "z"), ())
    from .sat import Clause

    inst = CnfInstance(inst.variables, (Clause.pos("x", "y", "z"),))
    spec, layout = compile_instance(inst, counter_attacks)
    lits = [lit for _, _, lit in layout.clauses[0].legs]
    gone = lits[: 3 - live]
    drop = [layout.lord, *gone]
    for g in layout.variables.values():
        drop += [g.unit, *g.snipers]
    return _strip_throne(spec, *drop), lits[3 - live:]


def choke_harness(live: tuple[int, ...] = (0, 1, 2), counter_attacks: bool = True):
    """The Lord against one trident; ``live`` picks which of the three tines keep a unit."""
    from .sat import Clause

    inst = CnfInstance(("x",), tuple(Clause.pos("x") for _ in range(3)))
    spec, layout = compile_instance(inst, counter_attacks)
    g = layout.variables["x"]
    lits = [g.literals[(POS, ci)] for ci in range(3)]
    drop = [g.unit, *g.snipers, *(cp.unit for cp in layout.clauses)]
    drop += [u for i, u in enumerate(lits) if i not in live]
    keep = tuple(t for t in spec.roster if t.uid not in set(drop))
    return StageSpec(spec.grid, keep, spec.round_budget, counter_attacks), layout
