"""Command-line front end: reproducible runs with cached artifacts.

Subcommands map onto the library modules: ``enumerate`` runs the grid
census, ``groundstate`` builds the operator-sum matrix and extracts
the exact top eigenvector, ``verify`` runs the full census-versus-
spectrum comparison, ``sample`` drives the Markov-chain sampler, and
``render`` draws states and patterns.  Results are cached per n under
a root taken from $LOOPMODEL_CACHE (default ~/.cache/loopmodel), each
file carrying a format version and a checksum; corrupt cache entries
are recomputed silently.

Exit status: 0 on success, 1 when a requested check fails, 2 on a
capacity refusal (the message says which knob raises the ceiling).
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

from . import fpl as _fpl
from . import patterns as _pat
from . import render as _render
from . import spectra as _spec
from . import stochastic as _st
from .errors import CapacityError, ConjectureViolation

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CAPACITY = 2

CACHE_ENV = "LOOPMODEL_CACHE"
LONG_GATE_N = 8  # census sizes from here up hide behind --long


def cache_root() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "loopmodel"


def _canonical(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def _cache_path(n: int, name: str) -> Path:
    return cache_root() / f"n={n}" / f"{name}.json"


def cache_store(n: int, name: str, payload: dict) -> Path:
    """Write a payload with its checksum header; returns the path."""
    body = _canonical(payload)
    obj = {"sha256": hashlib.sha256(body.encode()).hexdigest(), "payload": payload}
    path = _cache_path(n, name)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, sort_keys=True, indent=1) + "\n")
    return path


def cache_load(n: int, name: str) -> dict | None:
    """Read a cached payload; None when absent, corrupt, or mismatched."""
    path = _cache_path(n, name)
    try:
        obj = json.loads(path.read_text())
        payload = obj["payload"]
        if hashlib.sha256(_canonical(payload).encode()).hexdigest() != obj["sha256"]:
            return None
        return payload
    except (OSError, ValueError, KeyError, TypeError):
        return None


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)
        print(f"wrote {out}")


def _histogram(args) -> _fpl.PatternHistogram:
    """Census via cache unless disabled; stores fresh results."""
    if not args.no_cache:
        payload = cache_load(args.n, "histogram")
        if payload is not None:
            try:
                return _fpl.PatternHistogram.from_json_obj(payload)
            except ValueError:
                pass
    hist = _fpl.histogram(args.n, workers=args.workers, max_n=args.max_n)
    if not args.no_cache:
        cache_store(args.n, "histogram", hist.to_json_obj())
    return hist


def cmd_enumerate(args) -> int:
    hist = _histogram(args)
    dim = _pat.catalan(args.n)
    print(f"n={args.n}: {hist.total()} states over {dim} patterns")
    rows = sorted(hist.counts)
    shown = rows if len(rows) <= 50 else rows[:20]
    for r in shown:
        print(f"  {r:6d}  {_pat.unrank(args.n, r).to_text():<30} {hist.count(r)}")
    if len(rows) > len(shown):
        print(f"  ... {len(rows) - len(shown)} more rows in the artifact")
    if args.format == "csv":
        _emit(hist.to_csv_text(), args.out)
    elif args.format == "json":
        _emit(json.dumps(hist.to_json_obj(), indent=2, sort_keys=True) + "\n", args.out)
    else:
        raise ValueError(f"enumerate cannot write format {args.format!r}")
    return EXIT_OK


def cmd_groundstate(args) -> int:
    H = _spec.build_hamiltonian(args.n, max_dim=args.max_dim)
    psi = None
    if not args.no_cache:
        payload = cache_load(args.n, "vector")
        if payload is not None and payload.get("kind") == "perron-vector":
            comps = tuple(int(v) for v in payload["components"])
            if len(comps) == H.dim:
                psi = _spec.BigIntVector(args.n, comps)
    if psi is None:
        psi = _spec.perron_vector(H)
        if not args.no_cache:
            cache_store(args.n, "vector", psi.to_json_obj())
            cache_store(args.n, "matrix", H.to_json_obj())
    print(f"n={args.n}: eigenvector at 2n={2 * args.n} over {H.dim} patterns")
    print(f"  component sum {psi.total()}")
    print(f"  component max {psi.maximum()}")
    if args.format == "json":
        _emit(json.dumps(psi.to_json_obj(), indent=2, sort_keys=True) + "\n", args.out)
    elif args.format == "csv":
        lines = ["rank,component"]
        lines += [f"{r},{v}" for r, v in enumerate(psi.components)]
        _emit("\n".join(lines) + "\n", args.out)
    elif args.format == "text":
        _emit(" ".join(str(v) for v in psi.components) + "\n", args.out)
    else:
        raise ValueError(f"groundstate cannot write format {args.format!r}")
    if args.with_matrix:
        _emit(H.to_coo_text(), args.matrix_out)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.n >= LONG_GATE_N and not args.long:
        raise CapacityError(
            f"n={args.n} means {_fpl.asm_count(args.n)} states; pass --long "
            "to run sizes this large"
        )
    report = _spec.verify_conjecture(
        args.n, workers=args.workers, max_n=args.max_n, max_dim=args.max_dim
    )
    for line in report.summary_lines():
        print(line)
    if not args.no_cache:
        cache_store(args.n, "report", report.to_json_obj())
    if args.out:
        _emit(report.to_json(), args.out)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_sample(args) -> int:
    rep = _st.sample_stationary(
        args.n,
        burn_in=args.burn_in,
        samples=args.samples,
        seed=args.seed,
        chains=args.workers,
        compare=not args.no_compare,
        tolerance=args.tolerance,
    )
    print(
        f"n={args.n}: {rep.samples} samples, seed {rep.seed}, "
        f"{rep.chains} chain(s)"
    )
    if rep.tv_distance is not None:
        print(
            f"  tv distance {rep.tv_distance:.6f} vs tolerance "
            f"{rep.tolerance:.6f}: {'pass' if rep.passed else 'FAIL'}"
        )
    _emit(rep.to_json(), args.out)
    if rep.passed is False:
        return EXIT_FAIL
    return EXIT_OK


def cmd_render(args) -> int:
    if args.pattern is not None:
        p = _pat.LinkPattern.from_text(args.pattern)
        if args.format == "svg":
            _emit(_render.svg_chords(p), args.out)
        else:
            _emit(p.to_parens() + "\n" + p.to_text() + "\n", args.out)
        return EXIT_OK
    if args.n is None:
        raise ValueError("render needs --pattern or -n with --index")
    it = _fpl.enumerate_states(args.n, max_n=args.max_n)
    state = None
    for k, s in enumerate(it):
        if k == args.index:
            state = s
            break
    if state is None:
        raise ValueError(f"state index {args.index} out of range for n={args.n}")
    if args.format == "svg":
        _emit(_render.svg_chords(_fpl.link_pattern_of(state)), args.out)
    else:
        text = _render.ascii_state(state)
        if args.with_asm:
            text += "\n" + _fpl.state_to_asm(state).to_text()
        _emit(text, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="loopmodel",
        description="Grid-loop census and exact eigenvector verification.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, need_n=True):
        if need_n:
            p.add_argument("-n", type=int, required=True, help="grid size")
        p.add_argument("--workers", type=int, default=1,
                       help="parallel workers (default 1)")
        p.add_argument("--out", default=None,
                       help="artifact path ('-' for stdout, the default)")
        p.add_argument("--no-cache", action="store_true",
                       help="skip reading and writing the artifact cache")
        p.add_argument("--max-n", type=int, default=None,
                       help="raise the enumeration size ceiling")

    p = sub.add_parser("enumerate", help="census of states per link pattern")
    common(p)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("groundstate", help="exact top eigenvector of the operator sum")
    common(p)
    p.add_argument("--format", choices=("csv", "json", "text"), default="json")
    p.add_argument("--max-dim", type=int, default=None,
                   help="raise the matrix dimension ceiling")
    p.add_argument("--with-matrix", action="store_true",
                   help="also write the matrix in coordinate text form")
    p.add_argument("--matrix-out", default=None,
                   help="path for --with-matrix output")
    p.set_defaults(func=cmd_groundstate)

    p = sub.add_parser("verify", help="census versus eigenvector, full report")
    common(p)
    p.add_argument("--max-dim", type=int, default=None)
    p.add_argument("--long", action="store_true",
                   help="allow long runs (n >= 8)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sample", help="Markov-chain sampler for the stationary law")
    common(p)
    p.add_argument("--seed", type=int, default=0, help="RNG seed (echoed)")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--burn-in", type=int, default=1000)
    p.add_argument("--tolerance", type=float, default=None,
                   help="TV pass threshold (default 3x worst-case SE)")
    p.add_argument("--no-compare", action="store_true",
                   help="skip the exact-law comparison")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("render", help="draw a state (ASCII) or pattern (SVG)")
    p.add_argument("-n", type=int, default=None, help="grid size for --index")
    p.add_argument("--workers", type=int, default=1, help=argparse.SUPPRESS)
    p.add_argument("--no-cache", action="store_true", help=argparse.SUPPRESS)
    p.add_argument("--max-n", type=int, default=None, help=argparse.SUPPRESS)
    p.add_argument("--index", type=int, default=0,
                   help="state index in enumeration order (default 0)")
    p.add_argument("--pattern", default=None,
                   help='pattern text like "2 1 4 3" (renders chords)')
    p.add_argument("--format", choices=("text", "svg"), default="text")
    p.add_argument("--with-asm", action="store_true",
                   help="append the alternating-sign matrix to ASCII output")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_render)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CapacityError as exc:
        print(f"capacity: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except ConjectureViolation as exc:
        print(f"violation: {exc} {exc.details}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
