"""Domain types: grid maps, unit attributes, stages and immutable game states."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import NamedTuple, Optional

WALL = "#"
FLOOR = "."
THRONE = "T"

STAT_MIN, STAT_MAX = 1, 50
MOV_MAX = 10


class Position(NamedTuple):
    x: int
    y: int


def manhattan(a: Position, b: Position) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


class Side(str, enum.Enum):
    PLAYER = "P"
    ENEMY = "E"


class Behavior(str, enum.Enum):
    PLAYER = "player"
    PATIENT = "patient"
    IMPATIENT = "impatient"


class Phase(str, enum.Enum):
    PLAYER = "player"
    ENEMY = "enemy"


class Outcome(str, enum.Enum):
    ONGOING = "ongoing"
    WIN = "win"
    LOSE = "lose"


@dataclass(frozen=True)
class GridMap:
    """Rectangular map stored as rows of ``#`` (wall) and ``.`` (floor)."""

    rows: tuple[str, ...]
    throne: Optional[Position] = None

    @property
    def width(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    @property
    def height(self) -> int:
        return len(self.rows)

    def in_bounds(self, p: Position) -> bool:
        return 0 <= p[0] < self.width and 0 <= p[1] < self.height

    def is_floor(self, p: Position) -> bool:
        return self.in_bounds(p) and self.rows[p[1]][p[0]] != WALL

    @cached_property
    def floor_tiles(self) -> tuple[Position, ...]:
        return tuple(
            Position(x, y)
            for y, row in enumerate(self.rows)
            for x, ch in enumerate(row)
            if ch != WALL
        )

    @cached_property
    def neighbors(self) -> dict[Position, tuple[Position, ...]]:
        """Floor adjacency, neighbours listed right, left, down, up."""
        out = {}
        floor = set(self.floor_tiles)
        for p in self.floor_tiles:
            x, y = p
            cand = (Position(x + 1, y), Position(x - 1, y), Position(x, y + 1), Position(x, y - 1))
            out[p] = tuple(q for q in cand if q in floor)
        return out

    @cached_property
    def component_of(self) -> dict[Position, int]:
        comp: dict[Position, int] = {}
        nbrs = self.neighbors
        cid = -1
        for start in self.floor_tiles:
            if start in comp:
                continue
            cid += 1
            comp[start] = cid
            stack = [start]
            while stack:
                p = stack.pop()
                for q in nbrs[p]:
                    if q not in comp:
                        comp[q] = cid
                        stack.append(q)
        return comp

    @classmethod
    def from_rows(cls, rows, throne: Optional[Position] = None) -> "GridMap":
        rows = tuple(rows)
        found = [Position(x, y) for y, r in enumerate(rows) for x, ch in enumerate(r) if ch == THRONE]
        if found and throne is None:
            throne = found[0]
        clean = tuple(r.replace(THRONE, FLOOR) for r in rows)
        return cls(clean, throne)


@dataclass(frozen=True)
class Heal:
    lo: int
    hi: int
    amount: int


@dataclass(frozen=True)
class Attributes:
    hp_max: int
    atk: int
    defense: int
    mov: int
    attack_range: Optional[tuple[int, int]] = (1, 1)
    heal: Optional[Heal] = None
    durability: Optional[int] = None

    def can_hit(self, dist: int) -> bool:
        r = self.attack_range
        return r is not None and r[0] <= dist <= r[1]

    def can_heal(self, dist: int) -> bool:
        h = self.heal
        return h is not None and h.lo <= dist <= h.hi


@dataclass(frozen=True)
class UnitTemplate:
    uid: str
    side: Side
    attrs: Attributes
    behavior: Behavior
    start: Position
    is_lord: bool = False
    hp: Optional[int] = None  # starting hp; None means full

    @property
    def start_hp(self) -> int:
        return self.attrs.hp_max if self.hp is None else self.hp


@dataclass(frozen=True)
class StageSpec:
    grid: GridMap
    roster: tuple[UnitTemplate, ...]
    round_budget: Optional[int] = None
    counter_attacks: bool = True

    @cached_property
    def templates(self) -> dict[str, UnitTemplate]:
        return {t.uid: t for t in self.roster}

    @cached_property
    def order(self) -> dict[str, int]:
        return {t.uid: i for i, t in enumerate(self.roster)}

    @cached_property
    def lord_id(self) -> Optional[str]:
        for t in self.roster:
            if t.is_lord:
                return t.uid
        return None

    def with_units(self, roster) -> "StageSpec":
        return replace(self, roster=tuple(roster))

    def without(self, *uids: str) -> "StageSpec":
        drop = set(uids)
        return replace(self, roster=tuple(t for t in self.roster if t.uid not in drop))


@dataclass(frozen=True)
class UnitState:
    uid: str
    pos: Position
    hp: int
    impatient: bool = False
    durability_left: Optional[int] = None


@dataclass(frozen=True)
class Action:
    """One player unit's move, followed by an attack, a heal or a wait."""

    uid: str
    path: tuple[Position, ...] = ()
    kind: str = "wait"  # "wait" | "attack" | "heal"
    target: Optional[str] = None

    @property
    def end(self) -> Optional[Position]:
        return self.path[-1] if self.path else None


@dataclass(frozen=True)
class GameState:
    stage: StageSpec = field(compare=False, repr=False)
    units: tuple[UnitState, ...]
    round: int = 1
    phase: Phase = Phase.PLAYER
    acted: frozenset = frozenset()
    outcome: Outcome = Outcome.ONGOING

    @classmethod
    def initial(cls, stage: StageSpec) -> "GameState":
        units = tuple(
            UnitState(
                t.uid,
                t.start,
                t.start_hp,
                impatient=t.behavior is Behavior.IMPATIENT,
                durability_left=t.attrs.durability,
            )
            for t in stage.roster
        )
        return cls(stage, units)

    @cached_property
    def by_id(self) -> dict[str, UnitState]:
        return {u.uid: u for u in self.units}

    @cached_property
    def occupant(self) -> dict[Position, str]:
        return {u.pos: u.uid for u in self.units}

    def unit(self, uid: str) -> Optional[UnitState]:
        return self.by_id.get(uid)

    def template(self, uid: str) -> UnitTemplate:
        return self.stage.templates[uid]

    def side(self, uid: str) -> Side:
        return self.stage.templates[uid].side

    def live(self, side: Side) -> list[UnitState]:
        tpl = self.stage.templates
        return [u for u in self.units if tpl[u.uid].side is side]

    def evolve(self, **changes) -> "GameState":
        return replace(self, **changes)


class Violation(NamedTuple):
    code: str
    detail: str


def validate_stage(spec: StageSpec) -> list[Violation]:
    """Return every structural problem with ``spec``; an empty list means ok."""
    out: list[Violation] = []
    grid = spec.grid
    if grid.height < 1 or grid.width < 1:
        out.append(Violation("empty grid", "width and height must be >= 1"))
        return out
    for y, row in enumerate(grid.rows):
        if len(row) != grid.width:
            out.append(Violation("ragged grid", f"row {y} has length {len(row)}"))
        bad = set(row) - {WALL, FLOOR}
        if bad:
            out.append(Violation("bad tile", f"row {y} contains {sorted(bad)}"))
    if grid.throne is not None and not grid.is_floor(grid.throne):
        out.append(Violation("throne on wall", str(tuple(grid.throne))))
    if spec.round_budget is not None and spec.round_budget < 1:
        out.append(Violation("bad budget", str(spec.round_budget)))

    seen_ids: set[str] = set()
    seen_pos: dict[Position, str] = {}
    lords = 0
    for t in spec.roster:
        if t.uid in seen_ids:
            out.append(Violation("duplicate id", t.uid))
        seen_ids.add(t.uid)
        if not grid.in_bounds(t.start):
            out.append(Violation("out of bounds", f"{t.uid} at {tuple(t.start)}"))
        elif not grid.is_floor(t.start):
            out.append(Violation("unit on wall", f"{t.uid} at {tuple(t.start)}"))
        if t.start in seen_pos:
            out.append(Violation("overlap", f"{t.uid} and {seen_pos[t.start]} at {tuple(t.start)}"))
        seen_pos[t.start] = t.uid
        if (t.behavior is Behavior.PLAYER) != (t.side is Side.PLAYER):
            out.append(Violation("bad behavior", f"{t.uid}: {t.behavior.value} on side {t.side.value}"))
        if t.is_lord:
            lords += 1
            if t.side is not Side.PLAYER:
                out.append(Violation("enemy lord", t.uid))
        out.extend(_check_attrs(t))
    if grid.throne is not None and lords != 1:
        out.append(Violation("missing lord" if lords == 0 else "multiple lords", f"{lords} lords"))
    return out


def _check_attrs(t: UnitTemplate) -> list[Violation]:
    a = t.attrs
    out = []
    for name in ("hp_max", "atk", "defense"):
        v = getattr(a, name)
        if not STAT_MIN <= v <= STAT_MAX:
            out.append(Violation("stat out of range", f"{t.uid}.{name}={v}"))
    if not 0 <= a.mov <= MOV_MAX:
        out.append(Violation("stat out of range", f"{t.uid}.mov={a.mov}"))
    for label, r in (("range", a.attack_range), ("heal", (a.heal.lo, a.heal.hi) if a.heal else None)):
        if r is not None and not 1 <= r[0] <= r[1]:
            out.append(Violation("bad range", f"{t.uid}.{label}={r}"))
    if a.heal is not None and a.heal.amount < 1:
        out.append(Violation("bad heal", f"{t.uid}.heal amount {a.heal.amount}"))
    if a.durability is not None and a.durability < 0:
        out.append(Violation("bad durability", f"{t.uid}.dur={a.durability}"))
    if not 1 <= t.start_hp <= a.hp_max:
        out.append(Violation("hp out of range", f"{t.uid}.hp={t.start_hp}/{a.hp_max}"))
    return out
