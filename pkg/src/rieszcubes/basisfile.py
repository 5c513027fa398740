"""JSON files for geometries, boxes and constructed bases.

Floats are written with ``repr`` (shortest round-tripping form), so loading a
saved basis gives back every number bit for bit.  Index fields in files are
one-based, matching the usual ``l, j, s = 1..p`` notation.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .geometry import CubeUnion, Rect, build_partition, validate_union
from .kernels import CoefficientTable, KernelSet
from .shifts import ShiftVector

__all__ = [
    "FORMAT_VERSION",
    "FormatError",
    "basis_to_dict",
    "basis_from_dict",
    "dumps_basis",
    "save_basis",
    "load_basis",
    "load_geometry",
    "save_geometry",
    "load_boxes",
]

FORMAT_VERSION = 1


class FormatError(ValueError):
    """A file does not follow the expected layout."""


def _dump(obj) -> str:
    return json.dumps(obj, indent=1) + "\n"


def geometry_from_dict(d: dict) -> CubeUnion:
    try:
        return validate_union(d["dim"], d["beta"], d["corners"])
    except (KeyError, TypeError) as exc:
        raise FormatError(f"geometry needs fields dim, beta, corners: {exc}") from exc


def load_geometry(path) -> CubeUnion:
    return geometry_from_dict(_read_json(path))


def save_geometry(E: CubeUnion, path) -> None:
    Path(path).write_text(_dump(E.to_dict()))


def load_boxes(path) -> list[Rect]:
    """Boxes file: ``{"dim": d, "boxes": [{"lo": [...], "hi": [...]}, ...]}``."""
    d = _read_json(path)
    try:
        dim = int(d["dim"])
        boxes = [Rect(tuple(map(float, b["lo"])), tuple(map(float, b["hi"]))) for b in d["boxes"]]
    except (KeyError, TypeError) as exc:
        raise FormatError(f"boxes file needs fields dim, boxes[lo, hi]: {exc}") from exc
    if any(b.dim != dim for b in boxes):
        raise FormatError("box dimension does not match dim")
    return boxes


def _read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: {exc}") from exc


def basis_to_dict(ks: KernelSet) -> dict:
    x = ks.coeffs.x
    p, _, S = x.shape
    rows = [[l + 1, j + 1, s + 1, float(x[l, j, s].real), float(x[l, j, s].imag)]
            for l in range(p) for j in range(p) for s in range(S)]
    return {
        "format_version": FORMAT_VERSION,
        "geometry": ks.E.to_dict(),
        "shifts": {
            "k": ks.K.shifts.tolist(),
            "seed": ks.K.seed,
            "tau": ks.K.tau,
            "tries": ks.K.tries,
            "certificate": ks.K.min_norm_det,
        },
        "cell_count": S,
        "coefficients": rows,
        "residuals": {"system": ks.coeffs.max_residual},
    }


def basis_from_dict(d: dict) -> KernelSet:
    if d.get("format_version") != FORMAT_VERSION:
        raise FormatError(f"unsupported format_version {d.get('format_version')!r}")
    E = geometry_from_dict(d["geometry"])
    P = build_partition(E)
    sh = d["shifts"]
    k = np.array(sh["k"], dtype=float).reshape(E.p, E.dim)
    k.setflags(write=False)
    K = ShiftVector(k, float(sh["certificate"]), seed=sh.get("seed"), tries=int(sh.get("tries", 0)), tau=sh.get("tau"))
    S = int(d["cell_count"])
    if S != P.cell_count:
        raise FormatError(f"file has {S} cells per cube, geometry gives {P.cell_count}")
    x = np.zeros((E.p, E.p, S), dtype=complex)
    seen = np.zeros(x.shape, dtype=bool)
    for row in d["coefficients"]:
        l, j, s, re, im = row
        x[l - 1, j - 1, s - 1] = complex(re, im)
        seen[l - 1, j - 1, s - 1] = True
    if not seen.all():
        raise FormatError("coefficient table is incomplete")
    x.setflags(write=False)
    return KernelSet(E, P, K, CoefficientTable(x, float(d["residuals"]["system"])))


def dumps_basis(ks: KernelSet) -> str:
    return _dump(basis_to_dict(ks))


def save_basis(ks: KernelSet, path) -> None:
    Path(path).write_text(dumps_basis(ks))


def load_basis(path) -> KernelSet:
    d = _read_json(path)
    try:
        return basis_from_dict(d)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"{path}: malformed basis file ({exc})") from exc
