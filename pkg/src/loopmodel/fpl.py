"""Fully packed loop states on the n-by-n grid.

Geometry and conventions
------------------------

The states live on the "tic-tac-toe" graph: an n-by-n array of internal
degree-4 vertices, addressed (row, col) with row 1 at the top and col 1
at the left, plus 4n external degree-1 stub vertices, one beyond every
boundary vertex on each open side.  A state selects a subset of edges
such that every internal vertex lies on exactly two selected edges.
Walking the boundary stubs clockwise from the top-left corner stub and
numbering every other stub 1, 2, ..., 2n, a state must occupy all the
numbered stubs and none of the unnumbered ones.  Selected edges then
form n open paths joining the numbered stubs in pairs (plus closed
loops in the interior, which are allowed); the pairing of stub numbers
is the state's boundary link pattern, a noncrossing matching.

Each internal vertex is summarized by a 4-bit shape mask over its
selected edge directions (U=1, L=2, B=4, R=8); exactly two bits are
set, so six shapes occur.  A state stores the n-by-n grid of masks;
edge sets, alternating-sign matrices, and diagrams are derived views.

Ice-rule sweep
--------------

Enumeration works row by row through the equivalent ice model: every
lattice edge carries an arrow, each vertex has two arrows in and two
out, horizontal boundary arrows point into the grid and vertical ones
out.  The sweep state is the bitmask v of downward vertical arrows
entering the current row.  A row transition v -> v2 is valid iff,
reading columns left to right, the flipped bits alternate
0->1, 1->0, ..., 0->1 (starting and ending with 0->1); each valid
transition fixes the whole row, including every shape mask.  Selected
edges are the arrows leaving vertices of even checkerboard parity
(row+col even), equivalently the arrows entering odd vertices; this is
the orientation convention under which the numbered-stub boundary rule
holds, which `_row_moves` asserts for every precomputed row.

The census keeps, along the sweep, a frontier linkage: for every live
vertical edge crossing the sweep line, the far end of its open path
(another live column or an already-reached numbered stub), plus the set
of completed stub-stub arcs.  Sweep states that agree on (v, linkage,
arcs) have identical futures, so the census merges them with
multiplicities instead of revisiting each state; totals are exact
integers either way.  `enumerate_states` streams the individual states
instead and never merges.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from . import patterns as _pat
from .errors import CapacityError
from .patterns import LinkPattern

# Refuse full-grid enumeration beyond this n unless overridden: the
# state count asm_count(n) grows like 3**(n*n) and n = 10 is already
# in the billions of billions.
DEFAULT_MAX_N = 9

# Shape-mask bits (selected edge directions at an internal vertex).
U, L, B, R = 1, 2, 4, 8
_SHAPES = frozenset({U | L, U | B, U | R, L | B, L | R, B | R})

FORMAT_VERSION = 1


def asm_count(n: int) -> int:
    """Number of n-by-n alternating-sign matrices (= loop states).

    Product formula: prod_{k=0}^{n-1} (3k+1)! / (n+k)!.

    >>> [asm_count(k) for k in range(1, 8)]
    [1, 2, 7, 42, 429, 7436, 218348]
    """
    if n < 0:
        raise ValueError(f"asm_count undefined for n={n}")
    num = math.prod(math.factorial(3 * k + 1) for k in range(n))
    den = math.prod(math.factorial(n + k) for k in range(n))
    assert num % den == 0
    return num // den


def _check_n(n: int, max_n: int | None) -> None:
    ceiling = DEFAULT_MAX_N if max_n is None else max_n
    if n < 1:
        raise ValueError(f"need n >= 1, got n={n}")
    if n > ceiling:
        raise CapacityError(
            f"n={n} exceeds the enumeration ceiling {ceiling} "
            f"(about {asm_count(n):.3e} states); pass max_n to override"
        )


# -- boundary stub numbering ------------------------------------------
#
# Clockwise stub slots from the top-left corner: top row left-to-right
# (cols 1..n), right side top-to-bottom (rows 1..n), bottom row
# right-to-left, left side bottom-to-top.  Numbered = every other slot
# starting with the first.


def _top_stub(n: int, c: int) -> int | None:
    return (c + 1) // 2 if c % 2 == 1 else None


def _right_stub(n: int, r: int) -> int | None:
    return (n + r + 1) // 2 if (n + r) % 2 == 1 else None


def _bottom_stub(n: int, c: int) -> int | None:
    return (3 * n - c) // 2 + 1 if (n + c) % 2 == 0 else None


def _left_stub(n: int, r: int) -> int | None:
    return 2 * n + 1 - r // 2 if r % 2 == 0 else None


@lru_cache(maxsize=None)
def stub_positions(n: int) -> dict[int, tuple[str, int]]:
    """Map stub number -> (side, index); side in "TRBL", index 1-based."""
    out: dict[int, tuple[str, int]] = {}
    for c in range(1, n + 1):
        if (s := _top_stub(n, c)) is not None:
            out[s] = ("T", c)
        if (s := _bottom_stub(n, c)) is not None:
            out[s] = ("B", c)
    for r in range(1, n + 1):
        if (s := _right_stub(n, r)) is not None:
            out[s] = ("R", r)
        if (s := _left_stub(n, r)) is not None:
            out[s] = ("L", r)
    assert sorted(out) == list(range(1, 2 * n + 1))
    return out


# -- row transition table ----------------------------------------------


def _row_shapes(n: int, v: int, v2: int, row_parity: int) -> tuple[int, ...] | None:
    """Shape masks for one row given arrow masks above (v) and below (v2).

    Returns None when the transition is invalid.  row_parity is r mod 2.
    Horizontal arrows enter at 1 (rightward) and must leave at 0.
    """
    shapes = []
    l = 1
    for j in range(n):
        a = (v >> j) & 1
        b = (v2 >> j) & 1
        if b != a:
            if l != 1 - a:
                return None
            rgt = a
        else:
            rgt = l
        p = (row_parity + j + 1) & 1  # checkerboard parity of (r, j+1)
        mask = (
            (1 if a == p else 0)
            | (2 if l == p else 0)
            | (4 if b != p else 0)
            | (8 if rgt != p else 0)
        )
        assert mask in _SHAPES
        shapes.append(mask)
        l = rgt
    if l != 0:
        return None
    return tuple(shapes)


@lru_cache(maxsize=None)
def _row_moves(n: int) -> list[list[tuple[int, tuple[int, ...], tuple[int, ...]]]]:
    """moves[v] = sorted list of (v2, shapes for odd rows, for even rows).

    Also asserts, for every precomputed row, that the parity convention
    places boundary edges exactly on the numbered stubs: top stubs on
    odd columns, and the left/right edge selection matching the row
    parity rule used by the census.
    """
    moves: list[list[tuple[int, tuple[int, ...], tuple[int, ...]]]] = [
        [] for _ in range(1 << n)
    ]
    for v in range(1 << n):
        for v2 in range(1 << n):
            odd = _row_shapes(n, v, v2, 1)
            if odd is None:
                continue
            even = _row_shapes(n, v, v2, 0)
            assert even is not None, "validity must not depend on row parity"
            for parity, shapes in ((1, odd), (0, even)):
                # left edge selected iff the row is even; right edge
                # selected iff n+row is odd; up edges follow v's bits
                # on the checkerboard.
                assert bool(shapes[0] & L) == (parity == 0)
                assert bool(shapes[-1] & R) == ((n + parity) % 2 == 1)
                for j in range(n):
                    p = (parity + j + 1) & 1
                    assert bool(shapes[j] & U) == (((v >> j) & 1) == p)
                    assert bool(shapes[j] & B) == (((v2 >> j) & 1) != p)
            moves[v].append((v2, odd, even))
        moves[v].sort()
    return moves


def _initial_frontier(n: int) -> tuple:
    """Far-end tokens above row 1: numbered top stubs at odd columns.

    Token convention used throughout the sweep: None = no live edge,
    j >= 0 = live edge at column j (0-based), -k = numbered stub k.
    """
    return tuple(-(j // 2 + 1) if j % 2 == 0 else None for j in range(n))


def _apply_row(F: list, shapes: tuple[int, ...], pend, right_stub: int | None,
               new_arcs: list) -> None:
    """Advance the frontier linkage through one row of shape masks.

    F is mutated in place; completed (stub, stub) arcs are appended to
    new_arcs.  pend is the far token of the path end moving rightward
    along the row (the left stub's token, or None).  A slot whose path
    end is currently pend may hold a stale token; it is never read in
    that window (the join that could read it is exactly the closed-loop
    case, detected through pend itself).
    """
    PEND = len(F)  # placeholder far-token for a partner still in flight
    for j, mask in enumerate(shapes):
        if mask == 10 or mask == 5:  # L|R pass-through, U|B straight down
            continue
        if mask == 3:  # U|L: join the up end with the incoming end
            t = F[j]
            F[j] = None
            if pend == j:  # both ends of one segment: a closed loop
                pend = None
                continue
            u, pend = pend, None
            if t >= 0:
                F[t] = u
                if u >= 0:
                    F[u] = t
            elif u >= 0:
                F[u] = t
            else:
                new_arcs.append((-t, -u) if -t < -u else (-u, -t))
        elif mask == 9:  # U|R: the up end turns rightward
            pend = F[j]
            F[j] = None
        elif mask == 6:  # L|B: the incoming end lands in the frontier
            t = pend
            pend = None
            F[j] = t
            if t >= 0:
                F[t] = j
        else:  # mask == 12, B|R: a fresh segment is born
            F[j] = PEND
            pend = j
    if pend is not None:
        assert right_stub is not None
        if pend >= 0:
            F[pend] = -right_stub
        else:
            new_arcs.append(
                (-pend, right_stub) if -pend < right_stub else (right_stub, -pend)
            )
    else:
        assert right_stub is None  # a right stub always catches a path end


def _bottom_arcs(n: int, F) -> list[tuple[int, int]]:
    """Close the frontier onto the numbered bottom stubs after row n."""
    arcs = []
    for j, t in enumerate(F):
        if t is None:
            continue
        s = (3 * n - j - 1) // 2 + 1  # bottom stub number at column j+1
        if t < 0:
            arcs.append((-t, s) if -t < s else (s, -t))
        elif t > j:
            s2 = (3 * n - t - 1) // 2 + 1
            arcs.append((s, s2) if s < s2 else (s2, s))
    return arcs


def _row_tokens(n: int, r: int) -> tuple[int | None, int | None]:
    """(left stub token, right stub number) for 1-based row r."""
    left = _left_stub(n, r)
    return (None if left is None else -left), _right_stub(n, r)


# -- states and matrices ------------------------------------------------


@dataclass(frozen=True)
class FplState:
    """One fully packed loop state: n plus the n-by-n grid of shape masks.

    ``grid[r][c]`` (0-based) is the mask of vertex (r+1, c+1).  The
    constructor checks mask validity, agreement of shared edges between
    neighbors, and the numbered-stub boundary rule, so every reachable
    instance is a genuine state.
    """

    n: int
    grid: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n, g = self.n, self.grid
        if n < 1 or len(g) != n or any(len(row) != n for row in g):
            raise ValueError("grid must be n rows of n shape masks")
        for r in range(n):
            for c in range(n):
                m = g[r][c]
                if m not in _SHAPES:
                    raise ValueError(f"bad shape mask {m} at {(r + 1, c + 1)}")
                if c + 1 < n and bool(m & R) != bool(g[r][c + 1] & L):
                    raise ValueError(f"horizontal edge mismatch at {(r + 1, c + 1)}")
                if r + 1 < n and bool(m & B) != bool(g[r + 1][c] & U):
                    raise ValueError(f"vertical edge mismatch at {(r + 1, c + 1)}")
        for c in range(1, n + 1):
            if bool(g[0][c - 1] & U) != (_top_stub(n, c) is not None):
                raise ValueError(f"top boundary violated at column {c}")
            if bool(g[n - 1][c - 1] & B) != (_bottom_stub(n, c) is not None):
                raise ValueError(f"bottom boundary violated at column {c}")
        for r in range(1, n + 1):
            if bool(g[r - 1][0] & L) != (_left_stub(n, r) is not None):
                raise ValueError(f"left boundary violated at row {r}")
            if bool(g[r - 1][n - 1] & R) != (_right_stub(n, r) is not None):
                raise ValueError(f"right boundary violated at row {r}")

    def shape(self, r: int, c: int) -> int:
        """Shape mask at 1-based (r, c)."""
        return self.grid[r - 1][c - 1]

    def edges(self) -> frozenset[frozenset]:
        """Selected edges as frozensets of endpoint tuples.

        Internal endpoints are ("in", r, c); externals are
        ("ext", side, k) with side in "TRBL" and k the row or column.
        """
        n = self.n
        out = set()
        for r in range(1, n + 1):
            for c in range(1, n + 1):
                m = self.shape(r, c)
                here = ("in", r, c)
                if m & R:
                    out.add(frozenset({here, ("in", r, c + 1) if c < n else ("ext", "R", r)}))
                if m & B:
                    out.add(frozenset({here, ("in", r + 1, c) if r < n else ("ext", "B", c)}))
                if m & U and r == 1:
                    out.add(frozenset({here, ("ext", "T", c)}))
                if m & L and c == 1:
                    out.add(frozenset({here, ("ext", "L", r)}))
        return frozenset(out)


@dataclass(frozen=True)
class AsmMatrix:
    """An alternating-sign matrix: entries in {-1, 0, 1}, every row and
    column summing to 1 with nonzero entries alternating in sign
    (equivalently: all prefix sums are 0 or 1 and each line sums to 1).
    """

    n: int
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n, rows = self.n, self.rows
        if n < 1 or len(rows) != n or any(len(r) != n for r in rows):
            raise ValueError("need an n-by-n entry grid")
        for r in range(n):
            acc = 0
            for c in range(n):
                if rows[r][c] not in (-1, 0, 1):
                    raise ValueError(f"entry {rows[r][c]} at {(r + 1, c + 1)}")
                acc += rows[r][c]
                if acc not in (0, 1):
                    raise ValueError(f"row {r + 1} prefix sum leaves {{0,1}}")
            if acc != 1:
                raise ValueError(f"row {r + 1} sums to {acc}")
        for c in range(n):
            acc = 0
            for r in range(n):
                acc += rows[r][c]
                if acc not in (0, 1):
                    raise ValueError(f"column {c + 1} prefix sum leaves {{0,1}}")
            if acc != 1:
                raise ValueError(f"column {c + 1} sums to {acc}")

    def to_text(self) -> str:
        """Entries space-separated, one matrix row per line."""
        return "\n".join(
            " ".join(f"{v:2d}" for v in row) for row in self.rows
        ) + "\n"


def asm_stream_text(matrices) -> str:
    """Plain-text export: one matrix per block, blocks blank-separated."""
    return "\n".join(m.to_text() for m in matrices)


def state_to_asm(state: FplState) -> AsmMatrix:
    """Forget loops, keep arrows: recover the alternating-sign matrix.

    The arrows of the ice configuration are reconstructed from the
    shape masks by the checkerboard rule; +1 marks vertices where both
    arrow streams swap with horizontals inward, -1 the reverse swap.
    """
    n = state.n
    rows = []
    for r in range(1, n + 1):
        row = []
        for c in range(1, n + 1):
            m = state.shape(r, c)
            p = (r + c) & 1
            a = p if m & U else 1 - p
            l = p if m & L else 1 - p
            b = 1 - p if m & B else p
            rgt = 1 - p if m & R else p
            if (a, l, b, rgt) == (0, 1, 1, 0):
                row.append(1)
            elif (a, l, b, rgt) == (1, 0, 0, 1):
                row.append(-1)
            else:
                row.append(0)
        rows.append(tuple(row))
    return AsmMatrix(n, tuple(rows))


def asm_to_state(asm: AsmMatrix) -> FplState:
    """Inverse of state_to_asm: rebuild the shape grid from entries.

    Vertical arrows below row r are the column prefix sums; horizontal
    arrows right of column c are one minus the row prefix sums.
    """
    n = asm.n
    grid = []
    vabove = [0] * n
    for r in range(1, n + 1):
        row = []
        vbelow = [vabove[c] + asm.rows[r - 1][c] for c in range(n)]
        l = 1
        for c in range(1, n + 1):
            a, b = vabove[c - 1], vbelow[c - 1]
            rgt = l - asm.rows[r - 1][c - 1]
            assert rgt in (0, 1)
            p = (r + c) & 1
            mask = (
                (1 if a == p else 0)
                | (2 if l == p else 0)
                | (4 if b != p else 0)
                | (8 if rgt != p else 0)
            )
            row.append(mask)
            l = rgt
        grid.append(tuple(row))
        vabove = vbelow
    return FplState(n, tuple(grid))


def link_pattern_of(state: FplState) -> LinkPattern:
    """Trace the open paths of a state and return its boundary pattern.

    This walks the grid stub to stub and is deliberately independent of
    the sweep-line linkage used by the census, so the two can check
    each other.  Malformed connectivity raises ValueError.
    """
    n = state.n
    positions = stub_positions(n)
    entry_of = {"T": U, "B": B, "L": L, "R": R}
    step = {U: (-1, 0, B), B: (1, 0, U), L: (0, -1, R), R: (0, 1, L)}
    side_at = {U: "T", B: "B", L: "L", R: "R"}

    def walk(start: int) -> int:
        side, k = positions[start]
        if side in ("T", "B"):
            r, c = (1, k) if side == "T" else (n, k)
        else:
            r, c = (k, 1) if side == "L" else (k, n)
        entry = entry_of[side]
        while True:
            m = state.shape(r, c)
            if not m & entry:
                raise ValueError(f"path enters vertex {(r, c)} on an unselected edge")
            exit_bit = m ^ entry
            dr, dc, entry = step[exit_bit]
            r, c = r + dr, c + dc
            if not (1 <= r <= n and 1 <= c <= n):
                side = side_at[exit_bit]
                back = {"T": (1, c), "B": (n, c), "L": (r, 1), "R": (r, n)}
                rr, cc = back[side]
                idx = cc if side in ("T", "B") else rr
                for num, pos in positions.items():
                    if pos == (side, idx):
                        return num
                raise ValueError(f"path exits at unnumbered stub {(side, idx)}")

    m = [-1] * (2 * n)
    for s in range(1, 2 * n + 1):
        if m[s - 1] >= 0:
            continue
        t = walk(s)
        m[s - 1], m[t - 1] = t - 1, s - 1
    return LinkPattern(n, tuple(m))


# -- enumeration and census ---------------------------------------------


def enumerate_states(n: int, max_n: int | None = None):
    """Yield every state exactly once, in a deterministic order.

    The order is depth-first over rows with the vertical-arrow masks
    ascending, so it is reproducible across runs and platforms.
    """
    _check_n(n, max_n)
    moves = _row_moves(n)
    full = (1 << n) - 1
    rows: list[tuple[int, ...]] = []

    def descend(v: int, r: int):
        parity = r & 1
        for v2, odd, even in moves[v]:
            if r == n and v2 != full:
                continue
            rows.append(odd if parity else even)
            if r == n:
                yield FplState(n, tuple(rows))
            else:
                yield from descend(v2, r + 1)
            rows.pop()

    yield from descend(0, 1)


def _census_sweep(n: int, level: dict, start_row: int) -> dict[int, int]:
    """Run the merged sweep from start_row to completion.

    level maps (v, frontier tuple, sorted arcs tuple) -> multiplicity.
    Returns a dict rank -> count over final link patterns.
    """
    moves = _row_moves(n)
    full = (1 << n) - 1
    _, rank_of = _pat._basis(n)
    size = 2 * n
    counts: dict[int, int] = {}
    for r in range(start_row, n + 1):
        parity = r & 1
        left, right = _row_tokens(n, r)
        last = r == n
        nxt: dict = {}
        for (v, Ft, arcs), mult in level.items():
            for v2, odd, even in moves[v]:
                if last and v2 != full:
                    continue
                F = list(Ft)
                new: list[tuple[int, int]] = []
                _apply_row(F, odd if parity else even, left, right, new)
                if last:
                    new.extend(_bottom_arcs(n, F))
                    m = [0] * size
                    for a, b in arcs:
                        m[a - 1] = b - 1
                        m[b - 1] = a - 1
                    for a, b in new:
                        m[a - 1] = b - 1
                        m[b - 1] = a - 1
                    # rank lookup doubles as a validity check: only
                    # genuine noncrossing matchings are in the table
                    rk = rank_of[tuple(m)]
                    counts[rk] = counts.get(rk, 0) + mult
                else:
                    key = (v2, tuple(F), tuple(sorted(arcs + tuple(new))) if new else arcs)
                    if key in nxt:
                        nxt[key] += mult
                    else:
                        nxt[key] = mult
        if not last:
            level = nxt
    return counts


def _census_chunk(args) -> dict[int, int]:
    n, start_row, items = args
    return _census_sweep(n, dict(items), start_row)


def _census(n: int, workers: int = 1) -> dict[int, int]:
    start = {(0, _initial_frontier(n), ()): 1}
    if workers <= 1 or n < 3:
        return _census_sweep(n, start, 1)

    # Pre-expand a few rows, then split the level deterministically and
    # sweep each slice in its own process; integer sums commute, so the
    # merged result cannot depend on scheduling.
    moves = _row_moves(n)
    level = start
    row = 1
    while row < n and len(level) < 8 * workers:
        parity = row & 1
        left, right = _row_tokens(n, row)
        nxt: dict = {}
        for (v, Ft, arcs), mult in level.items():
            for v2, odd, even in moves[v]:
                F = list(Ft)
                new: list[tuple[int, int]] = []
                _apply_row(F, odd if parity else even, left, right, new)
                key = (v2, tuple(F), tuple(sorted(arcs + tuple(new))) if new else arcs)
                nxt[key] = nxt.get(key, 0) + mult
        level = nxt
        row += 1
    items = sorted(level.items())
    chunk = -(-len(items) // (4 * workers))
    tasks = [
        (n, row, items[i: i + chunk]) for i in range(0, len(items), chunk)
    ]

    import multiprocessing as mp

    counts: dict[int, int] = {}
    with mp.get_context("fork").Pool(workers) as pool:
        for part in pool.imap_unordered(_census_chunk, tasks):
            for rk, cnt in part.items():
                counts[rk] = counts.get(rk, 0) + cnt
    return counts


@dataclass(frozen=True)
class PatternHistogram:
    """Census result: for each pattern rank, how many states realize it."""

    n: int
    counts: dict[int, int]

    def total(self) -> int:
        return sum(self.counts.values())

    def count(self, r: int) -> int:
        return self.counts.get(r, 0)

    def as_vector(self) -> list[int]:
        """Counts as a dense list indexed by rank."""
        return [self.counts.get(r, 0) for r in range(_pat.catalan(self.n))]

    def to_csv_text(self) -> str:
        lines = ["rank,match_array,count"]
        for r in sorted(self.counts):
            lines.append(f"{r},{_pat.unrank(self.n, r).to_text()},{self.counts[r]}")
        return "\n".join(lines) + "\n"

    def to_json_obj(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "kind": "fpl-histogram",
            "n": self.n,
            "total": self.total(),
            "counts": {str(r): self.counts[r] for r in sorted(self.counts)},
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> PatternHistogram:
        if obj.get("kind") != "fpl-histogram":
            raise ValueError(f"not a histogram object: kind={obj.get('kind')!r}")
        if obj.get("format_version") != FORMAT_VERSION:
            raise ValueError(f"unsupported format_version {obj.get('format_version')!r}")
        h = cls(int(obj["n"]), {int(k): int(v) for k, v in obj["counts"].items()})
        if h.total() != int(obj["total"]):
            raise ValueError("histogram total does not match its rows")
        return h


def histogram(n: int, workers: int = 1, max_n: int | None = None) -> PatternHistogram:
    """Count states per boundary link pattern.

    The grand total is cross-checked against the product formula on
    every call; a mismatch would mean a defect in the sweep and raises.
    """
    _check_n(n, max_n)
    counts = _census(n, workers)
    expected = asm_count(n)
    got = sum(counts.values())
    if got != expected:
        raise AssertionError(
            f"census total {got} != product formula {expected} at n={n}"
        )
    return PatternHistogram(n, counts)
