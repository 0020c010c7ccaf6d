"""Noncrossing link patterns on 2n circle positions.

A link pattern is a perfect matching of the positions 1..2n, drawn as
chords of a disk, in which no two chords cross.  Positions are numbered
clockwise; position labels in every public string form are 1-based.
Internally a pattern is stored as a 0-based ``match`` tuple, where
``match[i]`` is the partner of position ``i``; the tuple is a
fixed-point-free involution and the noncrossing condition reads: there
are no a < b < c < d with ``match[a] == c`` and ``match[b] == d``.

The canonical ordering of the Catalan(n) patterns of a given size is
lexicographic on the match tuple.  Ranks are positions in that ordering
and are stable across runs and platforms; every tabulated quantity in
this package (census counts, matrix rows, probability vectors) is
indexed by them.

The elementary rewiring operators act cyclically: ``apply_h(i, p)``
joins positions i and i+1 (position 2n+1 meaning position 1).  If they
are already linked the pattern is returned unchanged; otherwise their
old partners get linked to each other.  Planarity is preserved, which
the constructor re-checks on every result.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import CapacityError

# Ceiling on Catalan(n) for any operation that materializes the whole
# pattern basis.  Python integers do not overflow, so unlike a
# fixed-width index this guards time and memory, not correctness.
# C(13) = 742900 is the largest value under the default.
MAX_PATTERNS = 1_000_000


def catalan(n: int) -> int:
    """Catalan number C(n) = binom(2n, n) / (n + 1).

    >>> [catalan(k) for k in range(6)]
    [1, 1, 2, 5, 14, 42]
    """
    if n < 0:
        raise ValueError(f"catalan undefined for n={n}")
    return math.comb(2 * n, n) // (n + 1)


@dataclass(frozen=True)
class LinkPattern:
    """An immutable noncrossing perfect matching of 2n circle positions.

    ``match`` is 0-based: ``match[i]`` is the partner of position i.
    All constructors validate; an invalid array never becomes a value.
    """

    n: int
    match: tuple[int, ...]

    def __post_init__(self):
        m = self.match
        size = 2 * self.n
        if self.n < 1:
            raise ValueError(f"need n >= 1, got n={self.n}")
        if len(m) != size:
            raise ValueError(f"match length {len(m)} != 2n = {size}")
        for i, j in enumerate(m):
            if not 0 <= j < size or j == i or m[j] != i:
                raise ValueError(
                    f"not a fixed-point-free involution at position {i + 1}"
                )
        # Stack check: scanning left to right, a closing position must
        # close the most recently opened chord, else two chords cross.
        stack: list[int] = []
        for i, j in enumerate(m):
            if j > i:
                stack.append(i)
            elif not stack or stack.pop() != j:
                raise ValueError(
                    f"chords cross near position {i + 1}: {self.to_text()!r}"
                )

    # -- constructors ------------------------------------------------

    @classmethod
    def from_pairs(cls, pairs) -> LinkPattern:
        """Build from 1-based position pairs.

        >>> LinkPattern.from_pairs([(1, 2), (3, 4)]).to_text()
        '2 1 4 3'
        """
        pairs = list(pairs)
        size = 2 * len(pairs)
        m = [-1] * size
        for a, b in pairs:
            if not (1 <= a <= size and 1 <= b <= size):
                raise ValueError(f"pair ({a}, {b}) out of range 1..{size}")
            m[a - 1] = b - 1
            m[b - 1] = a - 1
        if -1 in m:
            raise ValueError("pairs do not cover every position")
        return cls(len(pairs), tuple(m))

    @classmethod
    def from_text(cls, text: str) -> LinkPattern:
        """Parse the 1-based match array form, e.g. ``"2 1 4 3"``."""
        values = [int(tok) for tok in text.split()]
        if len(values) % 2:
            raise ValueError(f"odd number of entries in {text!r}")
        return cls(len(values) // 2, tuple(v - 1 for v in values))

    @classmethod
    def from_parens(cls, text: str) -> LinkPattern:
        """Parse the balanced-parenthesis form, e.g. ``"(())"``.

        Position i opens a chord when its partner lies clockwise ahead.
        """
        text = text.strip()
        if len(text) % 2:
            raise ValueError(f"odd length parenthesis word {text!r}")
        m = [-1] * len(text)
        stack: list[int] = []
        for i, ch in enumerate(text):
            if ch == "(":
                stack.append(i)
            elif ch == ")":
                if not stack:
                    raise ValueError(f"unbalanced word {text!r}")
                j = stack.pop()
                m[i], m[j] = j, i
            else:
                raise ValueError(f"unexpected character {ch!r} in {text!r}")
        if stack:
            raise ValueError(f"unbalanced word {text!r}")
        return cls(len(text) // 2, tuple(m))

    # -- views -------------------------------------------------------

    def pairs(self) -> tuple[tuple[int, int], ...]:
        """The chords as sorted 1-based pairs.

        >>> LinkPattern.from_parens("(())").pairs()
        ((1, 4), (2, 3))
        """
        return tuple(
            (i + 1, j + 1) for i, j in enumerate(self.match) if j > i
        )

    def to_text(self) -> str:
        """1-based match array, space separated (round-trips from_text)."""
        return " ".join(str(j + 1) for j in self.match)

    def to_parens(self) -> str:
        """Balanced-parenthesis word (round-trips from_parens)."""
        return "".join("(" if j > i else ")" for i, j in enumerate(self.match))

    def partner(self, i: int) -> int:
        """1-based partner of 1-based position i."""
        if not 1 <= i <= 2 * self.n:
            raise ValueError(f"position {i} out of range 1..{2 * self.n}")
        return self.match[i - 1] + 1

    def adjacent_arcs(self) -> int:
        """Number of chords joining cyclically adjacent positions."""
        size = 2 * self.n
        return sum(1 for i, j in enumerate(self.match) if j == (i + 1) % size)

    def __str__(self) -> str:
        return self.to_text()


# -- elementary operators ---------------------------------------------


def apply_h(i: int, p: LinkPattern) -> LinkPattern:
    """Join positions i and i+1 (cyclically); re-link their old partners.

    Fixes p when i and i+1 are already partners.  1 <= i <= 2n, and
    i = 2n acts on the pair (2n, 1).

    >>> p = LinkPattern.from_pairs([(1, 2), (3, 4)])
    >>> apply_h(4, p).pairs()
    ((1, 4), (2, 3))
    >>> apply_h(1, p) is p
    True
    """
    size = 2 * p.n
    if not 1 <= i <= size:
        raise ValueError(f"operator index {i} out of range 1..{size}")
    a = i - 1
    b = i % size
    m = p.match
    if m[a] == b:
        return p
    j, k = m[a], m[b]
    new = list(m)
    new[a], new[b] = b, a
    new[j], new[k] = k, j
    return LinkPattern(p.n, tuple(new))


def rotate(p: LinkPattern) -> LinkPattern:
    """Relabel every position i as i+1 (cyclically, clockwise shift)."""
    size = 2 * p.n
    m = p.match
    new = [0] * size
    for i in range(size):
        new[(i + 1) % size] = (m[i] + 1) % size
    return LinkPattern(p.n, tuple(new))


def reflect(p: LinkPattern) -> LinkPattern:
    """Relabel every position i as 2n+1-i (mirror through the axis)."""
    size = 2 * p.n
    m = p.match
    new = [0] * size
    for i in range(size):
        new[size - 1 - i] = size - 1 - m[i]
    return LinkPattern(p.n, tuple(new))


# -- canonical basis, ranking -----------------------------------------


def _noncrossing_matchings(positions: tuple[int, ...]):
    """Yield each noncrossing matching of ``positions`` as pair lists.

    The first position is paired with every candidate that splits the
    rest into two even halves; halves match independently, so crossings
    are impossible by construction.
    """
    if not positions:
        yield []
        return
    first = positions[0]
    for k in range(1, len(positions), 2):
        inside, outside = positions[1:k], positions[k + 1:]
        for mi in _noncrossing_matchings(inside):
            for mo in _noncrossing_matchings(outside):
                yield [(first, positions[k])] + mi + mo


@lru_cache(maxsize=None)
def _basis(n: int) -> tuple[tuple[LinkPattern, ...], dict[tuple[int, ...], int]]:
    count = catalan(n)
    if count > MAX_PATTERNS:
        raise CapacityError(
            f"Catalan({n}) = {count} patterns exceeds MAX_PATTERNS = "
            f"{MAX_PATTERNS}; raise loopmodel.patterns.MAX_PATTERNS to override"
        )
    size = 2 * n
    arrays = []
    for pairing in _noncrossing_matchings(tuple(range(size))):
        m = [0] * size
        for a, b in pairing:
            m[a], m[b] = b, a
        arrays.append(tuple(m))
    arrays.sort()
    assert len(arrays) == count, "enumeration disagrees with Catalan count"
    patterns = tuple(LinkPattern(n, m) for m in arrays)
    index = {m: r for r, m in enumerate(arrays)}
    return patterns, index


def enumerate_patterns(n: int) -> list[LinkPattern]:
    """All noncrossing patterns of size n in canonical (ranked) order."""
    return list(_basis(n)[0])


def rank(p: LinkPattern) -> int:
    """Position of p in the canonical ordering (0-based, stable)."""
    return _basis(p.n)[1][p.match]


def unrank(n: int, r: int) -> LinkPattern:
    """Inverse of rank: the pattern with the given rank."""
    patterns, _ = _basis(n)
    if not 0 <= r < len(patterns):
        raise ValueError(f"rank {r} out of range 0..{len(patterns) - 1}")
    return patterns[r]


def rotation_permutation(n: int) -> tuple[int, ...]:
    """sigma with sigma[r] = rank(rotate(unrank(n, r)))."""
    return tuple(rank(rotate(p)) for p in _basis(n)[0])


def reflection_permutation(n: int) -> tuple[int, ...]:
    """sigma with sigma[r] = rank(reflect(unrank(n, r)))."""
    return tuple(rank(reflect(p)) for p in _basis(n)[0])
