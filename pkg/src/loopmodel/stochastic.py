"""Game-of-chance view of the loop model and a stationary-law sampler.

Player A commits to a boundary link pattern, a uniformly random state
is drawn, and A wins when the state's pattern is the chosen one, so
A's winning probability is count(pattern)/total.  Player B gets a
uniformly random state followed by one random rewiring operation
applied to its pattern, so B's probability is a weighted column of the
transition matrix.  The two probabilities agreeing for every target
pattern is equivalent to the census histogram being stationary for the
Markov chain "pick one of the 2n operations uniformly, apply it",
whose transition matrix is the operator-sum matrix divided by 2n.

All probability computations are exact rationals; floats appear only
in reports.  The sampler uses a small explicit 64-bit generator so
trajectories are reproducible on any platform.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import fpl as _fpl
from . import patterns as _pat
from .patterns import LinkPattern, apply_h

FORMAT_VERSION = 1

_MASK64 = (1 << 64) - 1

# Hop tables are cheap per entry; this cap covers n <= 12 with room.
MAX_HOP_TABLE = 500_000


class SplitMix64:
    """Deterministic 64-bit generator (splitmix64 finalizer).

    Plain integer arithmetic, identical output on every platform.
    """

    __slots__ = ("state",)

    def __init__(self, seed: int) -> None:
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def randbelow(self, k: int) -> int:
        """Uniform draw from range(k), unbiased via rejection."""
        if k <= 0:
            raise ValueError("k must be positive")
        limit = (1 << 64) - ((1 << 64) % k)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % k


def chain_seed(seed: int, chain: int) -> int:
    """Distinct, reproducible seed for an auxiliary chain."""
    return SplitMix64((seed ^ (0xA5A5A5A5DEADBEEF * (chain + 1))) & _MASK64).next_u64()


@dataclass(frozen=True)
class PatternDistribution:
    """Exact probability law over the pattern basis for one n."""

    n: int
    probabilities: dict[int, Fraction]

    def __post_init__(self) -> None:
        dim = _pat.catalan(self.n)
        total = Fraction(0)
        for r, p in self.probabilities.items():
            if not (0 <= r < dim):
                raise ValueError(f"rank {r} out of range for n={self.n}")
            if p < 0:
                raise ValueError(f"negative probability at rank {r}")
            total += p
        if total != 1:
            raise ValueError(f"probabilities sum to {total}, not 1")

    def probability(self, rank: int) -> Fraction:
        return self.probabilities.get(rank, Fraction(0))

    def float_view(self) -> dict[int, float]:
        return {r: float(p) for r, p in sorted(self.probabilities.items())}

    def tv_distance(self, other: PatternDistribution) -> Fraction:
        """Total-variation distance, exact."""
        if self.n != other.n:
            raise ValueError("distributions live on different bases")
        ranks = set(self.probabilities) | set(other.probabilities)
        return sum(
            (abs(self.probability(r) - other.probability(r)) for r in ranks),
            Fraction(0),
        ) / 2


def stationary_law(n: int, source: str = "histogram",
                   workers: int = 1, max_n: int | None = None) -> PatternDistribution:
    """The conjectured stationary law count(pattern)/total, exactly.

    source="histogram" reads the grid census; source="perron" reads
    the exact top eigenvector instead, for an independent route.
    """
    if source == "histogram":
        hist = _fpl.histogram(n, workers=workers, max_n=max_n)
        total = hist.total()
        probs = {r: Fraction(c, total) for r, c in hist.counts.items()}
    elif source == "perron":
        from . import spectra as _spec

        psi = _spec.perron_vector(_spec.build_hamiltonian(n))
        s = psi.total()
        probs = {r: Fraction(v, s) for r, v in enumerate(psi.components)}
    else:
        raise ValueError(f"unknown source {source!r}")
    return PatternDistribution(n, probs)


def player_a_probability(n: int, target: LinkPattern,
                         hist: _fpl.PatternHistogram | None = None) -> Fraction:
    """Probability that a uniform state carries the target pattern."""
    if target.n != n:
        raise ValueError("target pattern size does not match n")
    if hist is None:
        hist = _fpl.histogram(n)
    return Fraction(hist.count(_pat.rank(target)), hist.total())


def player_b_probability(n: int, target: LinkPattern,
                         hist: _fpl.PatternHistogram | None = None) -> Fraction:
    """Probability of landing on the target after one random rewiring.

    Sum over source patterns q of (count(q)/total) times the fraction
    of the 2n operation indices sending q to the target, all exact.
    """
    if target.n != n:
        raise ValueError("target pattern size does not match n")
    if hist is None:
        hist = _fpl.histogram(n)
    total = hist.total()
    two_n = 2 * n
    acc = Fraction(0)
    for q in _pat.enumerate_patterns(n):
        cq = hist.count(_pat.rank(q))
        if cq == 0:
            continue
        hits = sum(1 for i in range(1, two_n + 1) if apply_h(i, q) == target)
        if hits:
            acc += Fraction(cq, total) * Fraction(hits, two_n)
    return acc


def chain_step(p: LinkPattern, rng: SplitMix64) -> LinkPattern:
    """One move of the chain: uniform operation index, then apply."""
    i = rng.randbelow(2 * p.n) + 1
    return apply_h(i, p)


@lru_cache(maxsize=8)
def _hop_table(n: int) -> tuple[tuple[int, ...], ...]:
    """hop[rank][i-1] = rank of operation i applied to pattern rank."""
    dim = _pat.catalan(n)
    if dim * 2 * n > MAX_HOP_TABLE:
        raise _fpl.CapacityError(
            f"hop table for n={n} needs {dim * 2 * n} entries, over "
            f"{MAX_HOP_TABLE}"
        )
    basis = _pat.enumerate_patterns(n)
    return tuple(
        tuple(_pat.rank(apply_h(i, q)) for i in range(1, 2 * n + 1))
        for q in basis
    )


def _run_chain(n: int, burn_in: int, samples: int, seed: int,
               counts: list[int]) -> None:
    """Accumulate one chain's sample counts in place."""
    hop = _hop_table(n)
    rng = SplitMix64(seed)
    two_n = 2 * n
    state = 0  # rank of the all-adjacent pattern, the lex minimum
    for _ in range(burn_in):
        state = hop[state][rng.randbelow(two_n)]
    for _ in range(samples):
        state = hop[state][rng.randbelow(two_n)]
        counts[state] += 1


@dataclass(frozen=True)
class SamplerReport:
    """Empirical outcome of a stationary-law sampling run."""

    n: int
    seed: int
    burn_in: int
    samples: int
    chains: int
    counts: tuple[int, ...]
    tolerance: float
    tv_distance: float | None
    passed: bool | None

    def empirical(self) -> PatternDistribution:
        total = sum(self.counts)
        return PatternDistribution(
            self.n,
            {r: Fraction(c, total) for r, c in enumerate(self.counts) if c},
        )

    def to_json_obj(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "kind": "sampler-report",
            "n": self.n,
            "seed": self.seed,
            "burn_in": self.burn_in,
            "samples": self.samples,
            "chains": self.chains,
            "empirical": {str(r): c for r, c in enumerate(self.counts) if c},
            "tolerance": self.tolerance,
            "tv_distance": self.tv_distance,
            "pass": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2, sort_keys=True) + "\n"


def default_tv_tolerance(n: int, samples: int) -> float:
    """Three times the worst-case standard error of the TV statistic.

    Each cell's frequency has binomial standard error at most
    0.5/sqrt(N); total variation halves the sum over the Catalan(n)
    cells, so the statistic's worst-case error is C(n)/(4 sqrt(N)).
    """
    return min(1.0, 3 * _pat.catalan(n) / (4 * samples ** 0.5))


def sample_stationary(n: int, burn_in: int = 1000, samples: int = 100_000,
                      seed: int = 0, chains: int = 1,
                      law: PatternDistribution | None = None,
                      compare: bool = True,
                      tolerance: float | None = None) -> SamplerReport:
    """Run the chain and compare empirical frequencies to the exact law.

    One sample is recorded per step after burn-in, no thinning.  With
    chains > 1 the samples are split across independently seeded
    chains (derived deterministically from the master seed) and the
    counts merged by addition; the result depends only on the
    arguments, never on scheduling.  Set compare=False to skip the
    census and report frequencies alone.
    """
    if samples <= 0:
        raise ValueError("samples must be positive")
    if burn_in < 0:
        raise ValueError("burn_in must be nonnegative")
    if chains <= 0:
        raise ValueError("chains must be positive")
    dim = _pat.catalan(n)
    counts = [0] * dim
    per = [samples // chains] * chains
    for c in range(samples % chains):
        per[c] += 1
    for c in range(chains):
        if per[c] == 0:
            continue
        s = seed if chains == 1 else chain_seed(seed, c)
        _run_chain(n, burn_in, per[c], s, counts)

    tol = default_tv_tolerance(n, samples) if tolerance is None else tolerance
    tv = None
    passed = None
    if compare:
        exact = stationary_law(n) if law is None else law
        emp = PatternDistribution(
            n, {r: Fraction(c, samples) for r, c in enumerate(counts) if c}
        )
        tv = float(emp.tv_distance(exact))
        passed = tv <= tol
    return SamplerReport(
        n, seed, burn_in, samples, chains, tuple(counts), tol, tv, passed
    )


# -- chain structure checks ------------------------------------------------


def is_irreducible(n: int) -> bool:
    """Strong connectivity of the transition graph, by double BFS."""
    hop = _hop_table(n)
    dim = len(hop)

    def reaches_all(adj) -> bool:
        seen = [False] * dim
        seen[0] = True
        stack = [0]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        return all(seen)

    if not reaches_all(hop):
        return False
    rev: list[list[int]] = [[] for _ in range(dim)]
    for v, row in enumerate(hop):
        for w in row:
            rev[w].append(v)
    return reaches_all(rev)


def is_aperiodic(n: int) -> bool:
    """Every pattern keeps at least one operation fixing it."""
    return all(p.adjacent_arcs() >= 1 for p in _pat.enumerate_patterns(n))
