"""Command-line front end.

Exit codes: 0 success, 2 bad input (geometry, file format, malformed rows),
3 shift search exhausted, 4 singular cell system, 5 failed verification,
6 empty inner cover, 64 usage error.  Every error also writes one JSON line
to stderr.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import basisfile
from .geometry import DimensionError, OverlapError, TilingError, build_partition
from .kernels import SingularSystem, eval_kernels, make_kernel_set
from .reconstruct import SampleSet, lattice_points, reconstruct_at
from .shifts import DEFAULT_TAU, ShiftSearchExhausted, choose_shifts
from .verify import EmptyInner, WindowTooLarge, approximate_cover, beurling_density, verification_report

EXIT_INPUT = 2
EXIT_SHIFTS = 3
EXIT_SINGULAR = 4
EXIT_VERIFY = 5
EXIT_EMPTY = 6
EXIT_USAGE = 64

FLOAT_FMT = "%.17g"


class CliError(Exception):
    def __init__(self, code: int, kind: str, message: str, **extra):
        super().__init__(message)
        self.code = code
        self.kind = kind
        self.extra = extra


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(EXIT_USAGE, "UsageError", message)


def _fmt(x: float) -> str:
    return FLOAT_FMT % x


def _emit_error(err: CliError) -> None:
    rec = {"error": err.kind, "exit": err.code, "message": str(err)}
    rec.update(err.extra)
    sys.stderr.write(json.dumps(rec) + "\n")


def _positive(name):
    def conv(s):
        try:
            v = float(s)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be a number, got {s!r}")
        if not v > 0:
            raise argparse.ArgumentTypeError(f"{name} must be > 0, got {s}")
        return v
    return conv


def _nonneg_int(s):
    try:
        v = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"radius must be an integer, got {s!r}")
    if v < 0:
        raise argparse.ArgumentTypeError(f"radius must be >= 0, got {v}")
    return v


# -- text tables -------------------------------------------------------------

def _rows(path):
    """Yield ``(line_number, fields)`` for non-blank, non-comment lines."""
    with open(path) as fh:
        for no, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if line:
                yield no, line.split()


def _bad_row(path, no, why):
    return CliError(EXIT_INPUT, "MalformedRow", f"{path}:{no}: {why}", file=str(path), line=no)


def read_points(path, dim: int) -> np.ndarray:
    pts = []
    for no, f in _rows(path):
        if len(f) != dim:
            raise _bad_row(path, no, f"expected {dim} coordinates, got {len(f)}")
        try:
            pts.append([float(v) for v in f])
        except ValueError as exc:
            raise _bad_row(path, no, str(exc))
    return np.array(pts, dtype=float).reshape(-1, dim)


def read_samples(path, p: int, dim: int):
    """Rows ``l n_1 .. n_d re im`` with one-based ``l``; returns ``(l, n, values)``."""
    ls, ns, vals = [], [], []
    for no, f in _rows(path):
        if len(f) != dim + 3:
            raise _bad_row(path, no, f"expected {dim + 3} fields (l n_1..n_{dim} re im), got {len(f)}")
        try:
            l = int(f[0])
            n = [int(v) for v in f[1:dim + 1]]
            re, im = float(f[-2]), float(f[-1])
        except ValueError as exc:
            raise _bad_row(path, no, str(exc))
        if not 1 <= l <= p:
            raise _bad_row(path, no, f"shift index {l} outside 1..{p}")
        ls.append(l - 1)
        ns.append(n)
        vals.append(complex(re, im))
    return np.array(ls, dtype=np.int64), np.array(ns, dtype=np.int64).reshape(-1, dim), np.array(vals)


def _write_table(out, points: np.ndarray, values: np.ndarray) -> None:
    """One line per point: coordinates then ``re im`` for each value column."""
    lines = []
    for x, v in zip(points, values):
        cols = [_fmt(c) for c in x]
        for z in np.atleast_1d(v):
            cols += [_fmt(z.real), _fmt(z.imag)]
        lines.append(" ".join(cols))
    text = "\n".join(lines) + ("\n" if lines else "")
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _load_basis(path):
    try:
        return basisfile.load_basis(path)
    except FileNotFoundError as exc:
        raise CliError(EXIT_INPUT, "FileNotFound", str(exc), file=str(path))
    except basisfile.FormatError as exc:
        raise CliError(EXIT_INPUT, "FormatError", str(exc), file=str(path))


# -- commands ----------------------------------------------------------------

def cmd_build(args) -> int:
    try:
        E = basisfile.load_geometry(args.geometry)
        P = build_partition(E)
    except FileNotFoundError as exc:
        raise CliError(EXIT_INPUT, "FileNotFound", str(exc), file=args.geometry)
    except OverlapError as exc:
        raise CliError(EXIT_INPUT, "OverlapError", str(exc), pair=list(exc.pair))
    except (DimensionError, TilingError, basisfile.FormatError, ValueError) as exc:
        raise CliError(EXIT_INPUT, type(exc).__name__, str(exc))
    try:
        K = choose_shifts(P, E.beta, seed=args.seed, tau=args.tau)
    except ShiftSearchExhausted as exc:
        raise CliError(EXIT_SHIFTS, "ShiftSearchExhausted", str(exc), tries=exc.tries, best=exc.best)
    try:
        ks = make_kernel_set(E, P, K)
    except SingularSystem as exc:
        raise CliError(EXIT_SINGULAR, "SingularSystem", str(exc), cell=[c + 1 for c in exc.cell])
    basisfile.save_basis(ks, args.out)
    print(f"certificate {_fmt(K.min_norm_det)}")
    print(f"system_residual {_fmt(ks.coeffs.max_residual)}")
    print(f"tries {K.tries}")
    return 0


def cmd_verify(args) -> int:
    if not args.radius:
        raise CliError(EXIT_USAGE, "UsageError", "at least one radius is required")
    ks = _load_basis(args.basis)
    report = verification_report(ks, args.radius, trials=args.trials, interp_tol=args.tol)
    Path(args.out).write_text(json.dumps(report, indent=1) + "\n")
    for name, c in report["checks"].items():
        verdict = "ok" if c["pass"] else ("FAIL" if c["gating"] else "warn")
        print(f"{name} {_fmt(c['value'])} {verdict}")
    if report["failed"]:
        raise CliError(EXIT_VERIFY, "VerificationFailed", "checks failed: " + ", ".join(report["failed"]),
                       checks=report["failed"], report=str(args.out))
    return 0


def cmd_reconstruct(args) -> int:
    ks = _load_basis(args.basis)
    ls, ns, vals = read_samples(args.samples, ks.p, ks.dim)
    N = int(np.abs(ns).max()) if len(ns) else 0
    lat, _ = lattice_points(ks.K, ks.E.beta, N)
    # position of n in the lexicographic index list of the lattice
    flat = np.ravel_multi_index((ns + N).T, (2 * N + 1,) * ks.dim) if len(ns) else np.empty(0, dtype=np.int64)
    alpha = np.zeros((ks.p, len(lat.indices)), dtype=complex)
    np.add.at(alpha, (ls, flat), vals)
    pts = read_points(args.points, ks.dim)
    out = reconstruct_at(ks, SampleSet(lat, alpha), pts) if len(pts) else np.empty(0, dtype=complex)
    _write_table(args.out, pts, out)
    return 0


def cmd_eval_kernel(args) -> int:
    ks = _load_basis(args.basis)
    pts = read_points(args.points, ks.dim)
    if args.l is not None and not 1 <= args.l <= ks.p:
        raise CliError(EXIT_USAGE, "UsageError", f"kernel index {args.l} outside 1..{ks.p}")
    vals = eval_kernels(ks, pts) if len(pts) else np.empty((0, ks.p), dtype=complex)
    if args.l is not None:
        vals = vals[:, args.l - 1]
    _write_table(args.out, pts, vals)
    return 0


def cmd_density(args) -> int:
    ks = _load_basis(args.basis)
    W = ks.W
    h = args.h if args.h is not None else args.factor * W
    N = args.radius if args.radius is not None else int(np.ceil(h / (2 * W))) + 2
    lat, _ = lattice_points(ks.K, ks.E.beta, N)
    try:
        rep = beurling_density(lat, h)
    except WindowTooLarge as exc:
        raise CliError(EXIT_USAGE, "WindowTooLarge", str(exc))
    for key in ("h", "upper", "lower", "nyquist"):
        print(f"{key} {_fmt(getattr(rep, key))}")
    print(f"n_plus {rep.n_plus}")
    print(f"n_minus {rep.n_minus}")
    print(f"measure_over_2pi_d {_fmt(ks.E.measure / (2 * np.pi) ** ks.dim)}")
    return 0


def cmd_cover(args) -> int:
    try:
        boxes = basisfile.load_boxes(args.boxes)
    except FileNotFoundError as exc:
        raise CliError(EXIT_INPUT, "FileNotFound", str(exc), file=args.boxes)
    except (basisfile.FormatError, ValueError) as exc:
        raise CliError(EXIT_INPUT, type(exc).__name__, str(exc))
    try:
        cover = approximate_cover(boxes, args.eps)
    except EmptyInner as exc:
        raise CliError(EXIT_EMPTY, "EmptyInner", str(exc))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    basisfile.save_geometry(cover.inner, out / "inner.json")
    basisfile.save_geometry(cover.outer, out / "outer.json")
    audit = cover.audit()
    (out / "audit.json").write_text(json.dumps(audit, indent=1) + "\n")
    for key, v in audit.items():
        print(f"{key} {_fmt(v) if isinstance(v, float) else v}")
    return 0


def make_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="rieszcubes", description="Complete interpolating sequences for unions of cubes.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("build", help="construct shifts and kernel coefficients")
    b.add_argument("geometry")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--tau", type=_positive("tau"), default=DEFAULT_TAU)
    b.add_argument("--out", default="basis.json")
    b.set_defaults(func=cmd_build)

    v = sub.add_parser("verify", help="run the numerical checks on a basis file")
    v.add_argument("basis")
    v.add_argument("-N", "--radius", type=_nonneg_int, nargs="*", default=[2, 4, 8])
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--tol", type=_positive("tol"), default=1e-8, help="interpolation tolerance")
    v.add_argument("--out", default="report.json")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("reconstruct", help="evaluate the sampling series at points")
    r.add_argument("basis")
    r.add_argument("samples")
    r.add_argument("points")
    r.add_argument("--out", default="-")
    r.set_defaults(func=cmd_reconstruct)

    c = sub.add_parser("cover", help="inner and outer cube unions for a set of boxes")
    c.add_argument("boxes")
    c.add_argument("--eps", type=_positive("eps"), required=True)
    c.add_argument("--out", default=".")
    c.set_defaults(func=cmd_cover)

    d = sub.add_parser("density", help="Beurling density of the sampling lattice")
    d.add_argument("basis")
    d.add_argument("--h", type=_positive("h"), default=None, help="window side")
    d.add_argument("--factor", type=_positive("factor"), default=50.0, help="window side in lattice steps")
    d.add_argument("-N", "--radius", type=_nonneg_int, default=None)
    d.set_defaults(func=cmd_density)

    k = sub.add_parser("eval-kernel", help="print S_l at given points")
    k.add_argument("basis")
    k.add_argument("points")
    k.add_argument("-l", type=int, default=None, help="kernel index (1-based); all kernels if omitted")
    k.add_argument("--out", default="-")
    k.set_defaults(func=cmd_eval_kernel)
    return ap


def main(argv=None) -> int:
    try:
        args = make_parser().parse_args(argv)
        if getattr(args, "trials", 1) < 1:
            raise CliError(EXIT_USAGE, "UsageError", "trials must be >= 1")
        return args.func(args)
    except CliError as err:
        _emit_error(err)
        return err.code


if __name__ == "__main__":
    sys.exit(main())
