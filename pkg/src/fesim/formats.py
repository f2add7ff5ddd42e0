"""Text formats: ``.festage`` stages, ``.fetrace`` move scripts, ``.cnfp`` formulas."""

from __future__ import annotations

import re
from typing import Iterable, Optional

from .engine import EnemyAction
from .model import (
    FLOOR,
    THRONE,
    WALL,
    Action,
    Attributes,
    Behavior,
    GridMap,
    Heal,
    Position,
    Side,
    StageSpec,
    UnitTemplate,
    validate_stage,
)


class FormatError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)
        self.line = line
        self.column = column


class StageInvalid(ValueError):
    def __init__(self, violations):
        super().__init__("; ".join(f"{v.code}: {v.detail}" for v in violations))
        self.violations = violations


# -- stages ------------------------------------------------------------------

_RANGE = re.compile(r"^(\d+)-(\d+)$")
_HEAL = re.compile(r"^heal=(\d+)-(\d+):(\d+)$")
_DUR = re.compile(r"^dur=(\d+)$")


def emit_stage(spec: StageSpec) -> str:
    grid = spec.grid
    budget = "inf" if spec.round_budget is None else str(spec.round_budget)
    lines = [f"FESTAGE 1 {grid.width} {grid.height} {'on' if spec.counter_attacks else 'off'} {budget}"]
    for y, row in enumerate(grid.rows):
        if grid.throne is not None and grid.throne.y == y:
            x = grid.throne.x
            row = row[:x] + THRONE + row[x + 1:]
        lines.append(row)
    for t in spec.roster:
        a = t.attrs
        rng = "-" if a.attack_range is None else f"{a.attack_range[0]}-{a.attack_range[1]}"
        parts = [
            t.uid, t.side.value, str(t.start.x), str(t.start.y), f"{t.start_hp}/{a.hp_max}",
            str(a.atk), str(a.defense), str(a.mov), rng, t.behavior.value,
        ]
        if t.is_lord:
            parts.append("lord")
        if a.heal is not None:
            parts.append(f"heal={a.heal.lo}-{a.heal.hi}:{a.heal.amount}")
        if a.durability is not None:
            parts.append(f"dur={a.durability}")
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def _int(tok: str, what: str, lineno: int) -> int:
    if not re.fullmatch(r"-?\d+", tok):
        raise FormatError(f"expected integer {what}, got {tok!r}", lineno)
    return int(tok)


def parse_stage(text: str, validate: bool = True) -> StageSpec:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise FormatError("empty stage file", 1)
    head = lines[0].split(" ")
    if len(head) != 6 or head[0] != "FESTAGE":
        raise FormatError("header must be 'FESTAGE 1 <width> <height> <on|off> <budget|inf>'", 1)
    if head[1] != "1":
        raise FormatError(f"unsupported version {head[1]}", 1, 9)
    width, height = _int(head[2], "width", 1), _int(head[3], "height", 1)
    if width < 1 or height < 1:
        raise FormatError("width and height must be positive", 1)
    if head[4] not in ("on", "off"):
        raise FormatError(f"counter flag must be on/off, got {head[4]!r}", 1)
    budget = None if head[5] == "inf" else _int(head[5], "budget", 1)
    if len(lines) < 1 + height:
        raise FormatError(f"expected {height} grid rows, file ends early", len(lines) + 1)

    rows, throne = [], None
    for y in range(height):
        lineno = y + 2
        row = lines[1 + y]
        if len(row) != width:
            raise FormatError(f"grid row has length {len(row)}, expected {width}", lineno)
        for x, ch in enumerate(row):
            if ch not in (WALL, FLOOR, THRONE):
                raise FormatError(f"unknown tile character {ch!r}", lineno, x + 1)
            if ch == THRONE:
                if throne is not None:
                    raise FormatError("more than one throne", lineno, x + 1)
                throne = Position(x, y)
        rows.append(row.replace(THRONE, FLOOR))

    roster = [_parse_unit(line, 2 + height + i) for i, line in enumerate(lines[1 + height:])]
    spec = StageSpec(GridMap(tuple(rows), throne), tuple(roster), budget, head[4] == "on")
    if validate:
        problems = validate_stage(spec)
        if problems:
            raise StageInvalid(problems)
    return spec


def _parse_unit(line: str, lineno: int) -> UnitTemplate:
    tok = line.split(" ")
    if len(tok) < 10:
        raise FormatError("unit line needs at least 10 fields", lineno)
    uid, side = tok[0], tok[1]
    if side not in ("P", "E"):
        raise FormatError(f"side must be P or E, got {side!r}", lineno)
    x, y = _int(tok[2], "x", lineno), _int(tok[3], "y", lineno)
    hp_m = re.fullmatch(r"(\d+)/(\d+)", tok[4])
    if not hp_m:
        raise FormatError(f"hp must be <hp>/<hp_max>, got {tok[4]!r}", lineno)
    atk, dfn, mov = (_int(t, n, lineno) for t, n in zip(tok[5:8], ("atk", "def", "mov")))
    if tok[8] == "-":
        rng = None
    else:
        m = _RANGE.match(tok[8])
        if not m:
            raise FormatError(f"range must be <lo>-<hi> or '-', got {tok[8]!r}", lineno)
        rng = (int(m[1]), int(m[2]))
    try:
        behavior = Behavior(tok[9])
    except ValueError:
        raise FormatError(f"unknown behavior {tok[9]!r}", lineno) from None
    lord, heal, dur = False, None, None
    for extra in tok[10:]:
        if extra == "lord" and not lord:
            lord = True
        elif (m := _HEAL.match(extra)) and heal is None:
            heal = Heal(int(m[1]), int(m[2]), int(m[3]))
        elif (m := _DUR.match(extra)) and dur is None:
            dur = int(m[1])
        else:
            raise FormatError(f"unexpected unit field {extra!r}", lineno)
    attrs = Attributes(int(hp_m[2]), atk, dfn, mov, rng, heal, dur)
    return UnitTemplate(uid, Side(side), attrs, behavior, Position(x, y), lord, int(hp_m[1]))


# -- traces ------------------------------------------------------------------

_POS = re.compile(r"^\((-?\d+),(-?\d+)\)$")


def _fmt_pos(p) -> str:
    return f"({p[0]},{p[1]})"


def emit_trace(script, enemy_logs: Optional[list[list[EnemyAction]]] = None) -> str:
    """Serialize a move script; ``enemy_logs`` adds ``# ENEMY`` comment lines."""
    lines = []
    for i, rnd in enumerate(script, start=1):
        lines.append(f"ROUND {i}")
        for act in rnd:
            if act.path:
                lines.append(f"MOVE {act.uid} " + " ".join(_fmt_pos(p) for p in act.path))
            if act.kind == "wait":
                lines.append(f"WAIT {act.uid}")
            else:
                lines.append(f"{act.kind.upper()} {act.uid} {act.target}")
        lines.append("END")
        if enemy_logs is not None and i - 1 < len(enemy_logs):
            lines.extend(format_enemy_log(enemy_logs[i - 1]))
    return "\n".join(lines) + "\n"


def format_enemy_log(log: Iterable[EnemyAction]) -> list[str]:
    out = []
    for e in log:
        parts = [f"# ENEMY {e.uid} {e.kind}"]
        if e.path:
            parts.append(" ".join(_fmt_pos(p) for p in e.path))
        if e.target is not None:
            parts.append(f"-> {e.target}")
        if e.report is not None:
            r = e.report
            parts.append(f"dmg={r.damage_dealt}")
            if r.countered:
                parts.append(f"counter={r.counter_damage}")
            if r.deaths:
                parts.append("dead=" + ",".join(sorted(r.deaths)))
        out.append(" ".join(parts))
    return out


def parse_trace(text: str) -> tuple:
    rounds: list[tuple[Action, ...]] = []
    current: Optional[list[Action]] = None
    pending: Optional[tuple[str, tuple]] = None
    expect = 1
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tok = line.split()
        cmd = tok[0]
        if cmd == "ROUND":
            if current is not None:
                raise FormatError("ROUND before END", lineno)
            if len(tok) != 2 or tok[1] != str(expect):
                raise FormatError(f"expected 'ROUND {expect}'", lineno)
            current = []
            continue
        if current is None:
            raise FormatError(f"{cmd} outside a ROUND block", lineno)
        if cmd == "END":
            if pending is not None:
                raise FormatError(f"MOVE for {pending[0]} has no ATTACK/HEAL/WAIT", lineno)
            rounds.append(tuple(current))
            current = None
            expect += 1
        elif cmd == "MOVE":
            if pending is not None or len(tok) < 3:
                raise FormatError("malformed MOVE", lineno)
            steps = []
            for t in tok[2:]:
                m = _POS.match(t)
                if not m:
                    raise FormatError(f"bad position {t!r}", lineno)
                steps.append(Position(int(m[1]), int(m[2])))
            pending = (tok[1], tuple(steps))
        elif cmd in ("WAIT", "ATTACK", "HEAL"):
            want = 2 if cmd == "WAIT" else 3
            if len(tok) != want:
                raise FormatError(f"{cmd} takes {want - 1} argument(s)", lineno)
            uid = tok[1]
            path = ()
            if pending is not None:
                if pending[0] != uid:
                    raise FormatError(f"MOVE for {pending[0]} followed by {cmd} for {uid}", lineno)
                path = pending[1]
                pending = None
            target = tok[2] if cmd != "WAIT" else None
            current.append(Action(uid, path, cmd.lower(), target))
        else:
            raise FormatError(f"unknown command {cmd!r}", lineno)
    if current is not None:
        raise FormatError("missing END for final round")
    return tuple(rounds)
