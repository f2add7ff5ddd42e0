"""ASCII and SVG pictures of a stage or a state."""

from __future__ import annotations

from typing import Iterable, Mapping, Optional, Union
from xml.sax.saxutils import escape

from .model import FLOOR, THRONE, GameState, Position, Side, StageSpec
from .pathfind import attack_coverage

SAFE_GLYPH = ":"
RANGE_GLYPH = "*"
_PLAYER_GLYPHS = "abcdefghijklmnopqrsuvwxyz"
_ENEMY_GLYPHS = "ABCDEFGHIJKLMNOPQRSUVWXYZ"


def _as_state(obj: Union[StageSpec, GameState]) -> GameState:
    return obj if isinstance(obj, GameState) else GameState.initial(obj)


def glyphs(state: GameState) -> dict[str, str]:
    """Lord is '@'; other units get letters in creation order ('T' is taken by thrones)."""
    out = {}
    pi = ei = 0
    for uid in state.stage.order:
        tpl = state.stage.templates[uid]
        if tpl.is_lord:
            out[uid] = "@"
        elif tpl.side is Side.PLAYER:
            out[uid] = _PLAYER_GLYPHS[pi] if pi < len(_PLAYER_GLYPHS) else "+"
            pi += 1
        else:
            out[uid] = _ENEMY_GLYPHS[ei] if ei < len(_ENEMY_GLYPHS) else "!"
            ei += 1
    return out


def enemy_ranges(state: GameState) -> set[Position]:
    """Tiles some live enemy could strike this enemy phase, ignoring blockers."""
    out: set[Position] = set()
    for u in state.units:
        tpl = state.stage.templates[u.uid]
        if tpl.side is not Side.ENEMY or tpl.attrs.attack_range is None:
            continue
        lo, hi = tpl.attrs.attack_range
        out |= attack_coverage(state.stage.grid, u.pos, tpl.attrs.mov, lo, hi, frozenset())
    return out


def render_ascii(
    obj: Union[StageSpec, GameState],
    safe: Iterable[Position] = (),
    landmarks: Optional[Mapping[str, Position]] = None,
    ranges: bool = False,
) -> str:
    state = _as_state(obj)
    grid = state.stage.grid
    g = glyphs(state)
    safe = set(safe)
    reach = enemy_ranges(state) if ranges else set()
    occ = {u.pos: g[u.uid] for u in state.units}
    rows = []
    for y in range(grid.height):
        row = []
        for x in range(grid.width):
            p = Position(x, y)
            ch = THRONE if p == grid.throne else grid.rows[y][x]
            if p in occ:
                ch = occ[p]
            elif ch == FLOOR and p in safe:
                ch = SAFE_GLYPH
            elif ch == FLOOR and p in reach:
                ch = RANGE_GLYPH
            row.append(ch)
        rows.append("".join(row))
    legend = []
    for u in state.units:
        tpl = state.stage.templates[u.uid]
        flag = " impatient" if u.impatient and tpl.side is Side.ENEMY else ""
        legend.append(f"{g[u.uid]} {u.uid} {tpl.side.value} ({u.pos.x},{u.pos.y}) hp {u.hp}/{tpl.attrs.hp_max}{flag}")
    for name, p in sorted((landmarks or {}).items(), key=lambda kv: (kv[1].y, kv[1].x, kv[0])):
        legend.append(f"landmark {name} ({p.x},{p.y})")
    if safe:
        legend.append(f"{SAFE_GLYPH} safe tile")
    if ranges:
        legend.append(f"{RANGE_GLYPH} enemy reach")
    return "\n".join(rows) + "\n" + "\n".join(legend) + ("\n" if legend else "")


def render_svg(
    obj: Union[StageSpec, GameState],
    safe: Iterable[Position] = (),
    landmarks: Optional[Mapping[str, Position]] = None,
    ranges: bool = False,
    cell: int = 16,
) -> str:
    state = _as_state(obj)
    grid = state.stage.grid
    g = glyphs(state)
    safe = set(safe)
    reach = enemy_ranges(state) if ranges else set()
    w, h = grid.width * cell, grid.height * cell
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
        f'<rect width="{w}" height="{h}" fill="#333"/>',
    ]
    for y in range(grid.height):
        for x in range(grid.width):
            p = Position(x, y)
            ch = THRONE if p == grid.throne else grid.rows[y][x]
            if ch not in (FLOOR, THRONE):
                continue
            fill = "#e8d9a8" if ch == THRONE else "#f4f4f4"
            cls = "floor"
            if p in safe:
                fill, cls = "#9fd89f", "safe"
            elif p in reach:
                fill, cls = "#f2b8b8", "range"
            out.append(f'<rect class="{cls}" x="{x * cell}" y="{y * cell}" width="{cell}" height="{cell}" fill="{fill}"/>')
    for name, p in sorted((landmarks or {}).items(), key=lambda kv: (kv[1].y, kv[1].x, kv[0])):
        out.append(
            f'<rect class="landmark" x="{p.x * cell + 1}" y="{p.y * cell + 1}" width="{cell - 2}" height="{cell - 2}" '
            f'fill="none" stroke="#1f5fbf" stroke-width="2"><title>{escape(name)}</title></rect>'
        )
    r = cell // 2
    for u in state.units:
        tpl = state.stage.templates[u.uid]
        colour = "#2a6fdb" if tpl.side is Side.PLAYER else "#c0392b"
        cx, cy = u.pos.x * cell + r, u.pos.y * cell + r
        out.append(f'<circle class="unit" cx="{cx}" cy="{cy}" r="{r - 1}" fill="{colour}"><title>{escape(u.uid)}</title></circle>')
        out.append(f'<text x="{cx}" y="{cy + r // 2}" font-size="{cell - 6}" text-anchor="middle" fill="#fff">'
                   f'{escape(g[u.uid])}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render(obj, fmt: str = "ascii", **overlays) -> str:
    if fmt == "ascii":
        return render_ascii(obj, **overlays)
    if fmt == "svg":
        return render_svg(obj, **overlays)
    raise ValueError(f"unknown render format {fmt!r}")
