"""Door, crossover, turning and one-way harnesses with contract checks.

Every harness is a set of one-tile-wide corridors. The Lord enters a
corridor two tiles ahead of an impatient Dragon, so she must cover exactly
``d`` tiles per turn and every round ends on a safe tile (path index
congruent to the start). The far end of each corridor holds an exit throne
used as the win proxy; corridors are symmetric so they can be walked either
way.

A parity fact shapes the door: with even ``d`` all safe tiles of a corridor
share one checkerboard colour. The open path needs ``a`` (two from A) and
``b`` (two from E) on one corridor, so E sits two tiles from A, not one.
The one-way composite also puts ``c`` (two from B) on that corridor, which
needs B on A's colour, hence a room one tile longer there.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .engine import apply_player_action, play_round, replay, run_enemy_turn
from .model import (
    Action,
    Attributes,
    Behavior,
    GameState,
    GridMap,
    Heal,
    Outcome,
    Phase,
    Position,
    Side,
    StageSpec,
    UnitTemplate,
    manhattan,
)
from .solver import Decision, Limits, _Search, solve_unbounded, state_key

FORWARD, REVERSE = "forward", "reverse"


class GeometryFailure(ValueError):
    pass


class BadOffsets(ValueError):
    pass


def table3(d: int = 6) -> dict[str, Attributes]:
    return {
        "lord": Attributes(3, 1, 1, d, (1, 2)),
        "dragon": Attributes(5, 5, 5, d, (1, 1)),
        "door": Attributes(2, 2, 2, d, (1, 2)),
        "sniper": Attributes(5, 5, 5, d, (1, 2)),
        "cleric": Attributes(1, 1, 1, d, None, Heal(2, 10, 2)),
        "damager": Attributes(5, 3, 5, d, (1, 2)),
    }


# -- corridor geometry --------------------------------------------------------


def polyline(*points) -> list[Position]:
    """Orthogonal segments through ``points`` (inclusive, no repeats)."""
    out = [Position(*points[0])]
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        if x0 != x1 and y0 != y1:
            raise GeometryFailure(f"segment {(x0, y0)}->{(x1, y1)} is not orthogonal")
        sx = (x1 > x0) - (x1 < x0)
        sy = (y1 > y0) - (y1 < y0)
        x, y = x0, y0
        while (x, y) != (x1, y1):
            x, y = x + sx, y + sy
            out.append(Position(x, y))
    return out


def add_bumps(tiles: list[Position], lo: int, hi: int, count: int, outward: int) -> list[Position]:
    """Insert ``count`` detours (+4 tiles each) in the straight run tiles[lo:hi]."""
    tiles = list(tiles)
    j = lo + 1
    for _ in range(count):
        if j + 2 >= hi:
            raise GeometryFailure("not enough straight corridor for padding")
        p, q = tiles[j], tiles[j + 2]
        if p.y == q.y and abs(p.x - q.x) == 2:
            s = (q.x - p.x) // 2
            det = [(p.x, p.y + outward), (p.x, p.y + 2 * outward), (p.x + s, p.y + 2 * outward),
                   (q.x, q.y + 2 * outward), (q.x, q.y + outward)]
        elif p.x == q.x and abs(p.y - q.y) == 2:
            s = (q.y - p.y) // 2
            det = [(p.x + outward, p.y), (p.x + 2 * outward, p.y), (p.x + 2 * outward, p.y + s),
                   (q.x + 2 * outward, q.y), (q.x + outward, q.y)]
        else:
            raise GeometryFailure("padding needs a straight run")
        tiles[j + 1 : j + 2] = [Position(*t) for t in det]
        j += 8
        hi += 4
    return tiles


def _pad_count(residue: int, d: int) -> int:
    for k in range(d):
        if (4 * k) % d == residue % d:
            return k
    raise GeometryFailure(f"cannot fix residue {residue} mod {d} with +4 detours")


@dataclass
class Corridor:
    name: str
    tiles: tuple[Position, ...]
    d: int

    def start(self, direction: str) -> tuple[Position, Position, Position]:
        """(dragon, lord, exit) tiles for one walking direction."""
        t = self.tiles
        if direction == FORWARD:
            return t[0], t[2], t[-3]
        return t[-1], t[-3], t[2]

    @property
    def safe(self) -> tuple[Position, ...]:
        return tuple(p for i, p in enumerate(self.tiles) if i >= 2 and i <= len(self.tiles) - 3 and (i - 2) % self.d == 0)

    def index(self, p: Position) -> int:
        return self.tiles.index(p)


def _fit(tiles: list[Position], anchor: Position, d: int) -> list[Position]:
    """Trim the head so ``anchor`` is safe, then the tail so both ends align."""
    i = tiles.index(anchor)
    cut = (i - 2) % d
    tiles = tiles[cut:]
    extra = (len(tiles) - 5) % d
    if extra:
        tiles = tiles[: len(tiles) - extra]
    if len(tiles) < 5 + 2 * d:
        raise GeometryFailure("corridor too short")
    return tiles


@dataclass
class Alcove:
    uid: str
    kind: str  # "cleric" | "damager" | "sniper"
    tile: Position
    corridor: str


@dataclass
class Harness:
    name: str
    d: int
    grid: GridMap
    corridors: dict[str, Corridor]
    alcoves: list[Alcove]
    landmarks: dict[str, Position]
    room: tuple[Position, ...] = ()
    contracts: list = field(default_factory=list)

    def stage(
        self,
        corridor: str,
        direction: str = FORWARD,
        door_post: Optional[str] = None,
        lord_hp: Optional[int] = None,
        throne: Optional[Position] = None,
    ) -> StageSpec:
        stats = table3(self.d)
        cor = self.corridors[corridor]
        dragon, lord, exit_ = cor.start(direction)
        grid = GridMap(self.grid.rows, exit_ if throne is None else throne)
        roster = [UnitTemplate("Lord", Side.PLAYER, stats["lord"], Behavior.PLAYER, lord, True, lord_hp)]
        mine = [a for a in self.alcoves if a.corridor in (corridor, "*")]
        for a in mine:
            if a.kind == "cleric":
                roster.append(UnitTemplate(a.uid, Side.PLAYER, stats["cleric"], Behavior.PLAYER, a.tile))
        if door_post is not None:
            roster.append(UnitTemplate("Door", Side.ENEMY, stats["door"], Behavior.IMPATIENT,
                                       self.landmarks[door_post]))
        for a in mine:
            if a.kind in ("sniper", "damager"):
                roster.append(UnitTemplate(a.uid, Side.ENEMY, stats[a.kind], Behavior.PATIENT, a.tile))
        roster.append(UnitTemplate("Dragon", Side.ENEMY, stats["dragon"], Behavior.IMPATIENT, dragon))
        return StageSpec(grid, tuple(roster), None, True)

    def walk_script(self, corridor: str, direction: str = FORWARD, door_post: Optional[str] = None,
                    heal: bool = True) -> tuple:
        """Full-speed walk to the exit; clerics heal whenever the Lord is hurt and in range."""
        cor = self.corridors[corridor]
        tiles = list(cor.tiles if direction == FORWARD else reversed(cor.tiles))
        path = tiles[2:-2]
        script = []
        spec = self.stage(corridor, direction, door_post)
        clerics = [t for t in spec.roster if t.attrs.heal is not None] if heal else []
        state = GameState.initial(spec)
        i = 0
        while i + 1 < len(path):
            step = tuple(path[i + 1 : i + 1 + self.d])
            acts = [Action("Lord", step)]
            probe = state
            probe, _ = apply_player_action(probe, acts[0])
            for c in clerics:
                lord = probe.by_id.get("Lord")
                if (probe.outcome is Outcome.ONGOING and lord is not None
                        and lord.hp < 3 and c.attrs.can_heal(manhattan(c.start, lord.pos))):
                    acts.append(Action(c.uid, (), "heal", "Lord"))
                    probe, _ = apply_player_action(probe, acts[-1])
            state, _, _ = play_round(state, acts)
            script.append(tuple(acts))
            i += self.d
            if state.outcome is not Outcome.ONGOING:
                break
        return tuple(script)


def _assemble(name, d, corridors, alcoves, room, landmarks) -> Harness:
    """Shift to positive coordinates, check isolation, build the grid."""
    floor: dict[Position, str] = {}
    for cor in corridors:
        seen = set()
        for p in cor.tiles:
            if p in seen:
                raise GeometryFailure(f"{cor.name} revisits {tuple(p)}")
            seen.add(p)
            if p in floor:
                raise GeometryFailure(f"{cor.name} overlaps {floor[p]} at {tuple(p)}")
            floor[p] = cor.name
    for p in room:
        if p in floor:
            raise GeometryFailure(f"room overlaps {floor[p]}")
        floor[p] = "room"
    for a in alcoves:
        if a.tile in floor:
            raise GeometryFailure(f"alcove {a.uid} overlaps {floor[a.tile]}")
        floor[a.tile] = a.uid
    # corridor tiles touch only their path neighbours; room and alcoves touch nothing
    nxt = {}
    for cor in corridors:
        for u, v in zip(cor.tiles, cor.tiles[1:]):
            nxt.setdefault(u, set()).add(v)
            nxt.setdefault(v, set()).add(u)
    for p, owner in floor.items():
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            q = Position(p.x + dx, p.y + dy)
            if q not in floor:
                continue
            if owner == "room" and floor[q] == "room":
                continue
            if q in nxt.get(p, ()):
                continue
            raise GeometryFailure(f"{owner} at {tuple(p)} touches {floor[q]} at {tuple(q)}")
    xs = [p.x for p in floor]
    ys = [p.y for p in floor]
    ox, oy = 1 - min(xs), 1 - min(ys)
    w, h = max(xs) + ox + 2, max(ys) + oy + 2

    def sh(p):
        return Position(p.x + ox, p.y + oy)

    cells = {sh(p) for p in floor}
    rows = tuple("".join("." if Position(x, y) in cells else "#" for x in range(w)) for y in range(h))
    cors = {c.name: Corridor(c.name, tuple(sh(p) for p in c.tiles), d) for c in corridors}
    alc = [Alcove(a.uid, a.kind, sh(a.tile), a.corridor) for a in alcoves]
    marks = {k: sh(v) for k, v in landmarks.items()}
    return Harness(name, d, GridMap(rows, None), cors, alc, marks, tuple(sh(p) for p in room))


# -- door ---------------------------------------------------------------------


def _door_room(length: int, d: int):
    if d < 4 or d % 2:
        raise GeometryFailure(f"door geometry needs an even d >= 4, got {d}")
    A, E, B = Position(0, 0), Position(2, 0), Position(length - 1, 0)
    if manhattan(E, B) > d or manhattan(A, B) <= d:
        raise GeometryFailure(f"room of length {length} does not separate A from B at d={d}")
    room = tuple(Position(x, 0) for x in range(length))
    return A, E, B, room


def _switch_tiles(side: int, d: int, reach: int):
    """Open path (side=+1, below) or close path (side=-1, above), right end first.

    Walks b then a: down the right column, left to b, a U-turn to a, then
    off to the left.
    """
    s = side
    b, a = Position(2, 2 * s), Position(0, 2 * s)
    tiles = polyline((5, s * reach), (5, 2 * s), (2, 2 * s), (2, 4 * s), (0, 4 * s), (0, 2 * s), (-3 * d, 2 * s))
    return tiles, b, a


def build_door_harness(d: int = 6, room_length: Optional[int] = None) -> Harness:
    """Door room plus separate open, close and traverse corridors."""
    length = d + 2 if room_length is None else room_length
    A, E, B, room = _door_room(length, d)
    lm = {"A": A, "E": E, "B": B}
    corridors, alcoves = [], []
    for side, name, lb, la in ((1, "open", "b", "a"), (-1, "close", "b'", "a'")):
        tiles, b, a = _switch_tiles(side, d, 4 * d)
        tiles = _fit(tiles, b, d)
        cor = Corridor(name, tuple(tiles), d)
        if (cor.index(a) - cor.index(b)) % d:
            raise GeometryFailure(f"{name}: a and b are not both safe")
        lm[lb], lm[la] = b, a
        after = tiles[cor.index(a) + d]
        before = tiles[cor.index(b) - 2 * d]
        alcoves.append(Alcove(f"Heal.{name}.1", "cleric", Position(after.x, after.y + 2 * side), name))
        alcoves.append(Alcove(f"Heal.{name}.2", "cleric", Position(before.x - 2, before.y), name))
        corridors.append(cor)
    xt = B.x + 2
    c = Position(xt, 0)
    tiles = polyline((xt, -4 * d), (xt, 4 * d))
    tiles = _fit(tiles, c, d)
    lm["c"] = c
    corridors.append(Corridor("traverse", tuple(tiles), d))
    alcoves.append(Alcove("Damage.traverse", "damager", Position(xt + 2, -d), "traverse"))
    alcoves.append(Alcove("Heal.traverse.1", "cleric", Position(xt + 2, 2 * d), "traverse"))
    alcoves.append(Alcove("Heal.traverse.2", "cleric", Position(xt + 2, -3 * d), "traverse"))
    h = _assemble("door", d, corridors, alcoves, room, lm)
    _check_door_distances(h)
    h.contracts = door_contracts()
    return h


def _check_door_distances(h: Harness) -> None:
    lm, room = h.landmarks, h.room

    def only(tile, post):
        near = [p for p in room if manhattan(p, tile) <= 2]
        if near != [lm[post]]:
            raise GeometryFailure(f"{tile} reaches {near}, expected only {post}")

    only(lm["a"], "A")
    only(lm["a'"], "A")
    only(lm["b"], "E")
    only(lm["b'"], "E")
    only(lm["c"], "B")
    for cor in h.corridors.values():
        for p in cor.safe:
            if p in (lm.get(k) for k in ("a", "b", "a'", "b'", "c")):
                continue
            if any(manhattan(p, r) <= 2 for r in room):
                raise GeometryFailure(f"safe tile {tuple(p)} of {cor.name} is in the door's reach")


def build_oneway_harness(d: int = 6) -> Harness:
    """One corridor: open switch, traverse, then the close switch walked backwards.

    Forward (left to right in the switch sense) opens the door before the
    traverse tile and leaves it open; backward closes it first.
    """
    length = d + 3
    A, E, B, room = _door_room(length, d)
    if manhattan(A, B) % 2:
        raise GeometryFailure("B must share A's colour on a single corridor")
    xt = B.x + 2
    low, high = 4 * d + 2, -(3 * d + 2)
    pts = [(5, 3 * d + 3), (5, 2), (2, 2), (2, 4), (0, 4), (0, 2), (-d - 2, 2), (-d - 2, low),
           (xt, low), (xt, high), (5, high), (5, -2), (2, -2), (2, -4), (0, -4), (0, -2), (-4 * d, -2)]
    tiles = polyline(*pts)
    b, a, c = Position(2, 2), Position(0, 2), Position(xt, 0)
    bp, ap = Position(2, -2), Position(0, -2)
    tiles = _fit(tiles, b, d)
    # pad the bottom loop so c is safe, then the descent so b' is safe
    i0 = tiles.index(Position(-d - 2, low))
    i1 = tiles.index(Position(xt, low))
    tiles = add_bumps(tiles, i0, i1, _pad_count((tiles.index(b) - tiles.index(c)) % d, d), 1)
    i0 = tiles.index(Position(5, high))
    i1 = tiles.index(Position(5, -2 * d))
    tiles = add_bumps(tiles, i0, i1, _pad_count((tiles.index(b) - tiles.index(bp)) % d, d), -1)
    tiles = _fit(tiles, b, d)
    cor = Corridor("oneway", tuple(tiles), d)
    for p in (a, c, bp, ap):
        if (cor.index(p) - cor.index(b)) % d:
            raise GeometryFailure(f"landmark {tuple(p)} is not safe")
    ia, ic, iap = cor.index(a), cor.index(c), cor.index(ap)
    h1, dmg, h2, h3 = tiles[ia + d], tiles[ic - d], tiles[ic + 2 * d], tiles[iap + d]
    alcoves = [
        Alcove("Heal.1", "cleric", Position(h1.x, h1.y + 2), "oneway"),
        Alcove("Damage", "damager", Position(dmg.x + 2, dmg.y), "oneway"),
        Alcove("Heal.2", "cleric", Position(h2.x + 2, h2.y), "oneway"),
        Alcove("Heal.3", "cleric", Position(h3.x, h3.y - 2), "oneway"),
    ]
    lm = {"A": A, "E": E, "B": B, "a": a, "b": b, "c": c, "a'": ap, "b'": bp}
    h = _assemble("oneway", d, [cor], alcoves, room, lm)
    _check_door_distances(h)
    _check_heal_gaps(h)
    h.contracts = oneway_contracts()
    return h


def _check_heal_gaps(h: Harness) -> None:
    """No cleric may reach the Lord between the damage tile and c."""
    cor = h.corridors["oneway"]
    dmg = next(a for a in h.alcoves if a.kind == "damager")
    start = next(p for p in cor.safe if manhattan(p, dmg.tile) == 2)
    i0, i1 = cor.index(start), cor.index(h.landmarks["c"])
    for a in h.alcoves:
        if a.kind != "cleric":
            continue
        for p in cor.tiles[min(i0, i1) : max(i0, i1) + 1]:
            if manhattan(p, a.tile) <= 10 and p in cor.safe:
                raise GeometryFailure(f"{a.uid} can heal at {tuple(p)}")


# -- contracts ----------------------------------------------------------------


@dataclass(frozen=True)
class Contract:
    name: str
    corridor: str
    direction: str
    expect: str  # "exit" | "dies" | "post:A" | "post:E" | "no-leak" | "safe-tiles"
    door_post: Optional[str] = None
    lord_hp: Optional[int] = None
    scripted: bool = False
    wrong_arms: tuple = ()


@dataclass
class Verdict:
    status: str  # "Pass" | "Fail" | "ResourceExceeded"
    detail: str = ""
    trace: Optional[tuple] = None
    nodes: int = 0

    @property
    def passed(self) -> bool:
        return self.status == "Pass"


def door_contracts() -> list[Contract]:
    out = []
    for post in ("E", "A"):
        out.append(Contract(f"close path reversed from {post} opens", "close", FORWARD, "post:A", post))
        out.append(Contract(f"open path reversed from {post} closes", "open", REVERSE, "post:E", post))
        out.append(Contract(f"open path forward from {post} opens", "open", FORWARD, "post:A", post))
    out.append(Contract("open door stays open on the open path", "open", FORWARD, "post:A", "A"))
    out.append(Contract("closed door stays closed on the close path", "close", REVERSE, "post:E", "E"))
    out.append(Contract("closed door kills the traversing Lord", "traverse", FORWARD, "dies", "E"))
    out.append(Contract("closed door kills a 1-hp Lord", "traverse", FORWARD, "dies", "E", lord_hp=1))
    out.append(Contract("closed door kills the Lord walking back", "traverse", REVERSE, "dies", "E"))
    out.append(Contract("open door lets the Lord through", "traverse", FORWARD, "exit", "A", scripted=True))
    out.append(Contract("open door lets the Lord through, any line", "traverse", FORWARD, "exit", "A"))
    out.append(Contract("open door, walking back", "traverse", REVERSE, "exit", "A"))
    return out


# The close corridor is built right end first, so walking it forward meets
# b' before a'. That is the close path taken in reverse; REVERSE is the
# close path in its own direction.
CLAIM1 = {
    "close path traversed reversely opens": Contract("claim1-1", "close", FORWARD, "post:A", "E"),
    "open path traversed reversely closes": Contract("claim1-2", "open", REVERSE, "post:E", "A"),
    "open path forward opens": Contract("claim1-3", "open", FORWARD, "post:A", "E"),
    "open door stays open on the open path": Contract("claim1-4", "open", FORWARD, "post:A", "A"),
    "closed door stays closed on the close path": Contract("claim1-5", "close", REVERSE, "post:E", "E"),
}


TRAVERSE = {
    "closed door kills a 1-hp Lord": Contract("traverse-closed", "traverse", FORWARD, "dies", "E", lord_hp=1),
    "open door lets the scripted traversal through": Contract("traverse-open", "traverse", FORWARD, "exit", "A",
                                                              scripted=True),
}


def oneway_contracts() -> list[Contract]:
    return [
        Contract("forward passage survives", "oneway", FORWARD, "exit", "E", scripted=True),
        Contract("forward passage, any line", "oneway", FORWARD, "exit", "E"),
        Contract("forward passage from an open door", "oneway", FORWARD, "exit", "A"),
        Contract("reverse passage dies from a closed door", "oneway", REVERSE, "dies", "E"),
        Contract("reverse passage dies from an open door", "oneway", REVERSE, "dies", "A"),
    ]


def _door_at(state: GameState, harness: Harness, post: str) -> bool:
    door = state.by_id.get("Door")
    return door is not None and door.pos == harness.landmarks[post]


def verify_contract(harness: Harness, contract: Contract, limits: Limits = Limits()) -> Verdict:
    c = contract
    spec = harness.stage(c.corridor, c.direction, c.door_post, c.lord_hp)

    def run(goal=None):
        return solve_unbounded(spec, limits, goal=goal)

    if c.expect == "exit" and c.scripted:
        script = harness.walk_script(c.corridor, c.direction, c.door_post)
        res = replay(spec, script)
        if res.outcome is Outcome.WIN:
            return Verdict("Pass", "scripted walk reaches the exit", script)
        return Verdict("Fail", f"scripted walk ends in {res.outcome.value}", script)
    if c.expect == "exit":
        r = run()
        if r.decision is Decision.RESOURCE_EXCEEDED:
            return Verdict("ResourceExceeded", nodes=r.stats.nodes)
        ok = r.decision is Decision.WINNABLE
        return Verdict("Pass" if ok else "Fail", "exit reachable" if ok else "no line reaches the exit",
                       r.witness, r.stats.nodes)
    if c.expect == "dies":
        r = run()
        if r.decision is Decision.RESOURCE_EXCEEDED:
            return Verdict("ResourceExceeded", nodes=r.stats.nodes)
        ok = r.decision is Decision.NOT_WINNABLE
        return Verdict("Pass" if ok else "Fail", "every line loses" if ok else "a line survives to the exit",
                       r.witness, r.stats.nodes)
    if c.expect.startswith("post:"):
        post = c.expect[5:]
        bad = run(lambda s: s.outcome is Outcome.WIN and not _door_at(s, harness, post))
        if bad.decision is Decision.RESOURCE_EXCEEDED:
            return Verdict("ResourceExceeded", nodes=bad.stats.nodes)
        if bad.decision is Decision.WINNABLE:
            return Verdict("Fail", f"a surviving line leaves the door off {post}", bad.witness, bad.stats.nodes)
        good = run(lambda s: s.outcome is Outcome.WIN and _door_at(s, harness, post))
        if good.decision is not Decision.WINNABLE:
            return Verdict("Fail", "no surviving line at all", None, bad.stats.nodes + good.stats.nodes)
        return Verdict("Pass", f"every surviving line ends with the door at {post}", good.witness,
                       bad.stats.nodes + good.stats.nodes)
    if c.expect == "no-leak":
        arms = [harness.corridors[a] for a in c.wrong_arms]
        centre = harness.landmarks["X"]
        wrong = {p for cor in arms for p in cor.tiles if manhattan(p, centre) >= 2}

        def leak(s):
            lord = s.by_id.get("Lord")
            return s.phase is Phase.PLAYER and not s.acted and lord is not None and lord.pos in wrong

        r = run(leak)
        if r.decision is Decision.RESOURCE_EXCEEDED:
            return Verdict("ResourceExceeded", nodes=r.stats.nodes)
        ok = r.decision is Decision.NOT_WINNABLE
        return Verdict("Pass" if ok else "Fail", "no surviving line leaves the arm" if ok else "leak", r.witness,
                       r.stats.nodes)
    if c.expect == "safe-tiles":
        return _check_safe_tiles(harness, spec, c, limits)
    raise ValueError(f"unknown expectation {c.expect!r}")


def _check_safe_tiles(harness: Harness, spec: StageSpec, c: Contract, limits: Limits) -> Verdict:
    """Every round that ends off a safe tile loses in that enemy phase."""

    safe = set(harness.corridors[c.corridor].safe)
    search = _Search(spec, limits, True)
    root = GameState.initial(spec)
    seen = {state_key(root)}
    frontier = [root]
    while frontier:
        nxt = []
        for st in frontier:
            for after, acts in search.player_phase(st):
                if after.outcome is not Outcome.ONGOING:
                    continue
                lord = after.by_id["Lord"]
                done, _ = run_enemy_turn(after)
                if lord.pos not in safe and done.outcome is not Outcome.LOSE:
                    return Verdict("Fail", f"Lord survives off the safe tiles at {tuple(lord.pos)}", acts)
                if done.outcome is Outcome.ONGOING:
                    k = state_key(done)
                    if k not in seen:
                        seen.add(k)
                        nxt.append(done)
        frontier = nxt
    return Verdict("Pass", "every off-tempo stop loses", None, search.stats.nodes)


def contract_manifest(harness: Harness) -> str:
    lines = [f"HARNESS {harness.name} d={harness.d}"]
    for c in harness.contracts:
        setup = f"corridor={c.corridor} direction={c.direction}"
        if c.door_post:
            setup += f" door={c.door_post}"
        if c.lord_hp:
            setup += f" lord_hp={c.lord_hp}"
        setup += " script" if c.scripted else " exhaustive"
        lines.append(f"CONTRACT {c.name!r} | {setup} | expect={c.expect}")
    return "\n".join(lines) + "\n"


# -- crossover and turning -------------------------------------------------------


def check_crossover_offsets(d: int, s1: int, s2: int) -> bool:
    if not (0 < s1 < d and 0 < s2 < d):
        raise ValueError("offsets must lie strictly between 0 and d")
    return s1 != s2 and s1 != d - s2 and d - s1 != s2 and d - s1 != d - s2


def _place_snipers(floor: set[Position], corridors, safe: set[Position], skip: set[Position], prefix: str,
                   centre: Position = Position(0, 0)):
    """One-tile sniper rooms two tiles off every non-safe corridor tile.

    Greedy, nearest to ``centre`` first, since tiles there have the fewest
    legal rooms.
    """
    alcoves: list[Alcove] = []
    taken: set[Position] = set()
    todo = sorted({p for cor in corridors for p in cor.tiles if p not in safe and p not in skip},
                  key=lambda p: (manhattan(p, centre), p.y, p.x))
    for p in todo:
        if any(manhattan(p, t) <= 2 for t in taken):
            continue
        cands = [Position(p.x, p.y + 2), Position(p.x, p.y - 2), Position(p.x + 2, p.y), Position(p.x - 2, p.y),
                 Position(p.x + 1, p.y + 1), Position(p.x - 1, p.y + 1), Position(p.x + 1, p.y - 1),
                 Position(p.x - 1, p.y - 1)]
        for s in cands:
            if s in floor or s in taken:
                continue
            if any(Position(s.x + dx, s.y + dy) in floor or Position(s.x + dx, s.y + dy) in taken
                   for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1))):
                continue
            if any(manhattan(s, q) <= 2 for q in safe):
                continue
            taken.add(s)
            alcoves.append(Alcove(f"{prefix}{len(alcoves)}", "sniper", s, "*"))
            break
    return alcoves


def build_crossover_harness(d: int = 6, s1: int = 1, s2: int = 3) -> Harness:
    """Horizontal and vertical corridors crossing at X = (0, 0)."""
    if not check_crossover_offsets(d, s1, s2):
        raise BadOffsets(f"offsets (d={d}, s1={s1}, s2={s2}) violate the crossing inequalities")
    if (s1 - s2) % 2 and d % 2 == 0:
        raise BadOffsets("s1 and s2 must share parity when d is even")
    lo1, hi1 = s1 - 3 * d, s1 + 2 * d
    lo2, hi2 = s2 - 3 * d, s2 + 2 * d
    hor = Corridor("horizontal", tuple(polyline((lo1 - 2, 0), (hi1 + 2, 0))), d)
    ver = Corridor("vertical", tuple(polyline((0, lo2 - 2), (0, hi2 + 2))), d)
    X = Position(0, 0)
    safe = {p for p in hor.tiles if (p.x - s1) % d == 0} | {p for p in ver.tiles if (p.y - s2) % d == 0}
    floor = set(hor.tiles) | set(ver.tiles)
    skip = {p for p in floor if manhattan(p, X) <= 1}
    snipers = _place_snipers(floor, [hor, ver], safe, skip, "Sniper.")
    missing = [p for p in floor if p not in safe and p not in skip
               and not any(manhattan(p, s.tile) <= 2 for s in snipers)]
    if missing:
        raise GeometryFailure(f"no sniper room for {missing[:3]}")
    arms = {}
    for name, pts in (("left", ((lo1 - 2, 0), (-1, 0))), ("right", ((1, 0), (hi1 + 2, 0))),
                      ("top", ((0, lo2 - 2), (0, -1))), ("bottom", ((0, 1), (0, hi2 + 2)))):
        arms[name] = Corridor(name, tuple(polyline(*pts)), d)
    # the two crossing corridors share X; assemble them as arms around it
    parts = [Corridor("left", arms["left"].tiles + (X,) + arms["right"].tiles, d)]
    vert = arms["top"].tiles + arms["bottom"].tiles
    # vertical tiles join through X, which the horizontal corridor already holds
    h = _assemble_cross(d, parts[0], vert, snipers, X)
    h.name = "crossover"
    h.contracts = crossover_contracts()
    x = h.landmarks["X"]
    h.landmarks.update({"s1": Position(x.x + s1, x.y), "s2": Position(x.x, x.y + s2)})
    return h


def _assemble_cross(d, hcor: Corridor, vtiles, snipers, X) -> Harness:
    floor = set(hcor.tiles) | set(vtiles)
    for s in snipers:
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            if Position(s.tile.x + dx, s.tile.y + dy) in floor:
                raise GeometryFailure(f"sniper room {tuple(s.tile)} opens onto a corridor")
    allp = floor | {s.tile for s in snipers}
    xs = [p.x for p in allp]
    ys = [p.y for p in allp]
    ox, oy = 1 - min(xs), 1 - min(ys)
    w, h = max(xs) + ox + 2, max(ys) + oy + 2

    def sh(p):
        return Position(p.x + ox, p.y + oy)

    cells = {sh(p) for p in allp}
    rows = tuple("".join("." if Position(x, y) in cells else "#" for x in range(w)) for y in range(h))
    htiles = tuple(sh(p) for p in hcor.tiles)
    top = [sh(p) for p in vtiles if p.y < X.y]
    bottom = [sh(p) for p in vtiles if p.y > X.y]
    x = sh(X)
    cors = {
        "horizontal": Corridor("horizontal", htiles, d),
        "vertical": Corridor("vertical", tuple(top) + (x,) + tuple(bottom), d),
    }
    ix = htiles.index(x)
    cors["left"] = Corridor("left", htiles[: ix], d)
    cors["right"] = Corridor("right", htiles[ix + 1 :], d)
    cors["top"] = Corridor("top", tuple(top), d)
    cors["bottom"] = Corridor("bottom", tuple(bottom), d)
    alc = [Alcove(a.uid, a.kind, sh(a.tile), a.corridor) for a in snipers]
    return Harness("crossover", d, GridMap(rows, None), cors, alc, {"X": x})


def crossover_contracts() -> list[Contract]:
    out = []
    for cor, direction, straight, wrong in (
        ("horizontal", FORWARD, "right", ("top", "bottom")),
        ("horizontal", REVERSE, "left", ("top", "bottom")),
        ("vertical", FORWARD, "bottom", ("left", "right")),
        ("vertical", REVERSE, "top", ("left", "right")),
    ):
        out.append(Contract(f"{cor} {direction} goes straight through", cor, direction, "exit"))
        out.append(Contract(f"{cor} {direction} cannot turn", cor, direction, "no-leak", wrong_arms=wrong))
    return out


TURN_KINDS = {
    # kind: (horizontal arm side, vertical arm side, walking direction)
    "right-down": (-1, 1, FORWARD),
    "up-left": (-1, 1, REVERSE),
    "right-up": (-1, -1, FORWARD),
    "down-left": (-1, -1, REVERSE),
    "left-down": (1, 1, FORWARD),
    "up-right": (1, 1, REVERSE),
    "left-up": (1, -1, FORWARD),
    "down-right": (1, -1, REVERSE),
}


def _turn_tiles(hs: int, vs: int, o: int, d: int, s1: int, s2: int) -> list[Position]:
    """Horizontal arm on side ``hs`` into a hook overshooting by ``o`` columns,
    then down (vs=+1) or up (vs=-1) the vertical arm on column 0."""
    ox = -hs  # overshoot away from the horizontal arm
    far = hs * (3 * d + 2)
    pts = [(far, 0), (0, 0)]
    if o:
        pts += [(ox * o, 0), (ox * o, 2 * vs), (0, 2 * vs)]
    pts.append((0, vs * (3 * d + 2)))
    return polyline(*pts)


def build_turn_harness(kind: str, d: int = 6, s1: int = 1, s2: int = 3) -> Harness:
    """Corner that joins a horizontal arm (safe x = s1 mod d) to a vertical
    arm (safe y = s2 mod d), with a hook when the offsets need shifting."""
    if kind not in TURN_KINDS:
        raise ValueError(f"unknown turn kind {kind!r}; expected one of {sorted(TURN_KINDS)}")
    hs, vs, direction = TURN_KINDS[kind]
    for o in [0] + list(range(2, d + 2)):
        tiles = _turn_tiles(hs, vs, o, d, s1, s2)
        hsafe = [i for i, p in enumerate(tiles) if p.y == 0 and p.x * hs > 0 and (p.x - s1) % d == 0]
        if not hsafe:
            continue
        anchor = tiles[hsafe[0]]
        try:
            fitted = _fit(tiles, anchor, d)
        except GeometryFailure:
            continue
        cor = Corridor("turn", tuple(fitted), d)
        vsafe = [p for p in cor.safe if p.x == 0 and p.y * vs > 2]
        hs_ok = all((p.x - s1) % d == 0 for p in cor.safe if p.y == 0 and p.x * hs > 0)
        if vsafe and hs_ok and all((p.y - s2) % d == 0 for p in vsafe):
            break
    else:
        raise GeometryFailure(f"no hook realizes offsets ({s1}, {s2}) for {kind}")
    floor = set(cor.tiles)
    safe = set(cor.safe)
    hook = {p for p in floor if abs(p.x) <= o + 1 and abs(p.y) <= 3}
    snipers = _place_snipers(floor, [cor], safe, hook, "Sniper.")
    h = _assemble(f"turn-{kind}", d, [cor], snipers, (), {"corner": Position(0, 0)})
    h.contracts = [
        Contract(f"{kind} scripted traversal", "turn", direction, "exit", scripted=True),
        Contract(f"{kind} off-tempo stops lose", "turn", direction, "safe-tiles"),
    ]
    h.landmarks["hook"] = h.landmarks["corner"]
    return h


def measured_offsets(h: Harness) -> tuple[int, int]:
    """(x offset of horizontal safe tiles, y offset of vertical ones) relative to the corner."""
    cx, cy = h.landmarks["corner"]
    cor = h.corridors["turn"]
    hor = {(p.x - cx) % h.d for p in cor.safe if p.y == cy and p.x != cx}
    ver = {(p.y - cy) % h.d for p in cor.safe if p.x == cx and abs(p.y - cy) > 2}
    if len(hor) != 1 or len(ver) != 1:
        raise GeometryFailure(f"inconsistent offsets {hor} / {ver}")
    return hor.pop(), ver.pop()
