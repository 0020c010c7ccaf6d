"""Diagram generators: ASCII states and SVG chord diagrams."""
from __future__ import annotations

from loopmodel import fpl, patterns, render

N1_ART = """\
     1
     |
     +
     |
     2
"""


def test_ascii_n1_exact():
    state = next(fpl.enumerate_states(1))
    assert render.ascii_state(state) == N1_ART


def test_ascii_structure():
    for st in list(fpl.enumerate_states(3))[:4]:
        art = render.ascii_state(st)
        assert art.count("+") == 9, "one marker per internal vertex"
        assert all(ord(ch) < 128 for ch in art)
        # every stub number appears exactly once
        for k in range(1, 7):
            assert art.count(str(k)) >= 1


def test_ascii_edge_consistency():
    # horizontal dashes appear iff the two vertices share a selected edge
    st = next(fpl.enumerate_states(2))
    art = render.ascii_state(st)
    lines = art.splitlines()
    for r in range(2):
        for c in range(1):
            left = st.shape(r + 1, c + 2) & fpl.L
            y, x = 2 + 2 * r, 5 + 4 * c + 1
            seg = lines[y][x:x + 3] if len(lines) > y else ""
            assert (seg == "---") == bool(left)


def test_svg_chords_structure():
    p = patterns.LinkPattern.from_text("2 1 4 3")
    svg = render.svg_chords(p)
    assert svg.startswith("<svg ")
    assert svg.rstrip().endswith("</svg>")
    assert svg.count("<path") == 2, "one chord per pair"
    assert svg.count("<text") == 4, "one label per circle position"
    for k in range(1, 5):
        assert f">{k}</text>" in svg
    # deterministic output
    assert svg == render.svg_chords(p)


def test_svg_various_sizes():
    for n in (1, 3, 5):
        p = patterns.unrank(n, patterns.catalan(n) - 1)
        svg = render.svg_chords(p)
        assert svg.count("<path") == n
        assert svg.count("<circle") == 2 * n + 1  # points plus the rim
