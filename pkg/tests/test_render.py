from conftest import FIXTURES
from fesim.formats import parse_stage
from fesim.gadgets import build_door_harness
from fesim.render import glyphs, render, render_ascii, render_svg
from helpers import E, P, lord, start, stage, unit


def test_ascii_grid_and_legend():
    spec = parse_stage((FIXTURES / "tiny.festage").read_text())
    text = render(spec)
    lines = text.splitlines()
    assert lines[:3] == ["@a#", "...", "#AT"]
    assert any(l.startswith("@ Lord P (0,0) hp 3/3") for l in lines[3:])
    assert render(spec) == text


def test_glyph_letters_skip_t():
    units = [lord(0, 0)] + [unit(f"E{i}", E, i + 1, 0) for i in range(21)]
    g = glyphs(start("." * 22, *units))
    assert g["Lord"] == "@" and "T" not in g.values()
    assert g["E19"] == "U"


def test_safe_overlay_and_landmarks():
    h = build_door_harness(6)
    cor = h.corridors["traverse"]
    spec = h.stage("traverse")
    text = render_ascii(spec, safe=cor.safe, landmarks=h.landmarks)
    rows = text.splitlines()[: h.grid.height]
    marked = {(x, y) for y, r in enumerate(rows) for x, c in enumerate(r) if c == ":"}
    assert marked and marked <= {tuple(p) for p in cor.safe}
    assert all((cor.index(p) - 2) % 6 == 0 for p in cor.safe)
    assert "landmark A" in text


def test_ranges_overlay():
    s = start(".....", lord(0, 0), unit("S", E, 4, 0, mov=1, rng=(1, 1)))
    text = render_ascii(s, ranges=True)
    assert text.splitlines()[0] == "@.**A"


def test_svg_is_deterministic():
    s = stage("...", lord(0, 0), unit("A", P, 1, 0), throne=(2, 0))
    a, b = render_svg(s), render_svg(s)
    assert a == b and a.startswith("<svg") and a.rstrip().endswith("</svg>")
    assert render(s, "svg") == a
