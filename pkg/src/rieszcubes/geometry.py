"""Cube unions, wrap indices and the cell partition shared by all cubes.

The spectrum is ``E = Q_0 u ... u Q_{p-1}`` with ``Q_j = prod_t [a_j^t, a_j^t + beta)``.
Every cube is cut into the same family of half-open cells (up to a translation
by ``beta * Z^d``).  The cells are computed on ``Q_0`` and carried over to the
other cubes by integer translations; the carried cells are then checked to
tile their cube.

Indices are zero-based throughout: cube ``j``, cell ``s``, target cube ``k``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

__all__ = [
    "Rect",
    "CubeUnion",
    "Partition",
    "OverlapError",
    "DimensionError",
    "TilingError",
    "validate_union",
    "locate_wrap",
    "build_partition",
    "cell_of",
    "locate_cells",
]

#: Relative tolerance (times ``beta``) for merging coincident cut coordinates.
DEDUP_RTOL = 1e-9


class OverlapError(ValueError):
    """Two cubes of a union intersect."""

    def __init__(self, j: int, k: int):
        super().__init__(f"cubes {j} and {k} overlap")
        self.pair = (j, k)


class DimensionError(ValueError):
    """Corner vectors of inconsistent length."""


class TilingError(RuntimeError):
    """Translated cells fail to tile a cube."""

    def __init__(self, cube: int, gap: float, detail: str = ""):
        msg = f"cells fail to tile cube {cube} (gap measure {gap:.3e})"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
        self.cube = cube
        self.gap = gap


@dataclass(frozen=True)
class Rect:
    """Half-open box ``prod_t [lo_t, hi_t)``."""

    lo: tuple[float, ...]
    hi: tuple[float, ...]

    def __post_init__(self):
        if len(self.lo) != len(self.hi):
            raise DimensionError("lo and hi differ in length")
        if not all(a < b for a, b in zip(self.lo, self.hi)):
            raise ValueError(f"empty box: lo={self.lo}, hi={self.hi}")

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def measure(self) -> float:
        return float(np.prod(np.subtract(self.hi, self.lo)))

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all((np.asarray(self.lo) <= x) & (x < np.asarray(self.hi))))

    def translate(self, offset) -> "Rect":
        offset = np.asarray(offset, dtype=float)
        return Rect(tuple((np.asarray(self.lo) + offset).tolist()),
                    tuple((np.asarray(self.hi) + offset).tolist()))


@dataclass(frozen=True)
class CubeUnion:
    """Disjoint union of ``p`` half-open cubes of side ``beta`` in ``R^dim``.

    Build instances through :func:`validate_union`; the constructor itself
    does not check disjointness.
    """

    dim: int
    beta: float
    corners: tuple[tuple[float, ...], ...]

    @property
    def p(self) -> int:
        return len(self.corners)

    @property
    def measure(self) -> float:
        return self.p * self.beta ** self.dim

    @property
    def corner_array(self) -> np.ndarray:
        return np.array(self.corners, dtype=float).reshape(self.p, self.dim)

    def cube(self, j: int) -> Rect:
        lo = self.corners[j]
        return Rect(lo, tuple(a + self.beta for a in lo))

    def contains(self, x) -> bool:
        return self.which_cube(np.asarray(x, dtype=float)[None, :])[0] >= 0

    def which_cube(self, points: np.ndarray) -> np.ndarray:
        """Index of the cube holding each row of ``points``, or -1."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        lo = self.corner_array
        inside = np.all((points[:, None, :] >= lo[None]) & (points[:, None, :] < lo[None] + self.beta), axis=-1)
        found = inside.any(axis=1)
        return np.where(found, inside.argmax(axis=1), -1)

    def to_dict(self) -> dict:
        return {"dim": self.dim, "beta": self.beta, "corners": [list(c) for c in self.corners]}


def validate_union(dim: int, beta: float, corners: Sequence[Sequence[float]]) -> CubeUnion:
    """Check and freeze a cube union.

    Raises
    ------
    DimensionError
        If ``dim < 1`` or a corner has the wrong length.
    ValueError
        If ``beta <= 0`` or there are no corners.
    OverlapError
        If two cubes intersect; the offending (zero-based) pair is attached.
    """
    dim = int(dim)
    if dim < 1:
        raise DimensionError(f"dim must be >= 1, got {dim}")
    beta = float(beta)
    if not np.isfinite(beta) or beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    corners = [list(c) for c in corners]
    if not corners:
        raise ValueError("at least one corner is required")
    for i, c in enumerate(corners):
        if len(c) != dim:
            raise DimensionError(f"corner {i} has length {len(c)}, expected {dim}")
    arr = np.array(corners, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("corners must be finite")

    # cubes j, k are disjoint iff some axis separates them by at least beta;
    # grid corners built as origin + beta * i may fall a few ulps short
    reach = np.nextafter(beta * (1 - DEDUP_RTOL), 0.0)
    pairs = cKDTree(arr).query_pairs(reach, p=np.inf, output_type="ndarray")
    if len(pairs):
        j, k = min(map(tuple, pairs.tolist()))
        raise OverlapError(int(j), int(k))
    return CubeUnion(dim, beta, tuple(tuple(float(v) for v in c) for c in arr))


def locate_wrap(E: CubeUnion, j: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Integer vector ``n`` with ``gamma = a_k - beta * n`` inside ``Q_j``."""
    a = E.corner_array
    n = np.floor((a[k] - a[j]) / E.beta).astype(np.int64)
    gamma = a[k] - E.beta * n
    # guard against the division rounding across an integer
    low = gamma < a[j]
    high = gamma >= a[j] + E.beta
    if low.any() or high.any():
        n = n - low + high
        gamma = a[k] - E.beta * n
    return n, gamma


@dataclass(frozen=True, eq=False)
class Partition:
    """Cells of ``Q_0`` and the bookkeeping that carries them to every cube.

    Attributes
    ----------
    cells
        Reference cells of ``Q_0``, in lexicographic grid order.
    wrap
        ``(p, p, d)`` integers ``n_jk``.
    gamma
        ``(p, p, d)`` anchors ``gamma_jk = a_k - beta n_jk``.
    corrections
        ``(p, S, p, d)`` entries ``C_js(k)``.
    translation_sets
        ``(p, S, p, d)`` vectors ``n_jk + C_js(k)``; row ``k = j`` is zero.
    cuts
        Per-axis cut coordinates of ``Q_0`` relative to its corner, including
        both endpoints ``0`` and ``beta``.
    """

    cells: tuple[Rect, ...]
    wrap: np.ndarray
    gamma: np.ndarray
    corrections: np.ndarray
    translation_sets: np.ndarray
    cuts: tuple[np.ndarray, ...]
    beta: float

    @property
    def cell_count(self) -> int:
        return len(self.cells)

    @property
    def p(self) -> int:
        return self.wrap.shape[0]

    def cell_box(self, j: int, s: int) -> Rect:
        """The cell ``Q_j^s`` as a box."""
        return self.cells[s].translate(self.beta * self.translation_sets[0, s, j])

    def cell_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        """Arrays ``lo, hi`` of shape ``(p, S, d)`` for every ``Q_j^s``."""
        lo0 = np.array([c.lo for c in self.cells])
        hi0 = np.array([c.hi for c in self.cells])
        shift = self.beta * np.transpose(self.translation_sets[0], (1, 0, 2))  # (p, S, d)
        return lo0[None] + shift, hi0[None] + shift


def _cut_points(offsets: np.ndarray, beta: float) -> np.ndarray:
    """Sorted cut coordinates in ``[0, beta]`` with near-duplicates merged."""
    tol = DEDUP_RTOL * beta
    cuts = [0.0]
    for v in np.sort(offsets):
        if v - cuts[-1] > tol and beta - v > tol:
            cuts.append(float(v))
    cuts.append(beta)
    return np.array(cuts)


def build_partition(E: CubeUnion) -> Partition:
    """Cut ``Q_0`` at the anchors ``gamma_0k`` and carry the cells to every cube.

    Raises
    ------
    TilingError
        If the carried cells do not tile some cube, or a correction leaves
        ``{-1, 0, 1}^d``.
    """
    p, d, beta = E.p, E.dim, E.beta
    a = E.corner_array
    wrap = np.zeros((p, p, d), dtype=np.int64)
    gamma = np.zeros((p, p, d))
    for j in range(p):
        for k in range(p):
            wrap[j, k], gamma[j, k] = locate_wrap(E, j, k)

    rel = gamma[0] - a[0]  # anchors of Q_0 relative to its corner, (p, d)
    cuts = tuple(_cut_points(rel[:, t], beta) for t in range(d))
    intervals = [list(zip(c[:-1], c[1:])) for c in cuts]
    cells = []
    for combo in itertools.product(*intervals):
        lo = tuple(float(a[0, t] + combo[t][0]) for t in range(d))
        hi = tuple(float(a[0, t] + combo[t][1]) for t in range(d))
        cells.append(Rect(lo, hi))
    S = len(cells)
    mids = np.array([[(lo + hi) / 2 for lo, hi in zip(c.lo, c.hi)] for c in cells])

    # a cell of Q_0 lies on one side of every anchor; below the anchor it needs
    # one extra step of beta to land in the target cube
    corr0 = (mids[:, None, :] < gamma[0][None, :, :]).astype(np.int64)  # (S, p, d)
    move0 = wrap[0][None, :, :] + corr0  # translation Q_0^s -> Q_k^s, (S, p, d)

    corrections = np.zeros((p, S, p, d), dtype=np.int64)
    tsets = np.zeros((p, S, p, d), dtype=np.int64)
    for j in range(p):
        tsets[j] = move0 - move0[:, j:j + 1, :]
        corrections[j] = tsets[j] - wrap[j][None, :, :]
    if np.abs(corrections).max(initial=0) > 1:
        j = int(np.argwhere(np.abs(corrections) > 1)[0][0])
        raise TilingError(j, float("nan"), "correction outside {-1, 0, 1}")

    part = Partition(
        cells=tuple(cells),
        wrap=_frozen(wrap),
        gamma=_frozen(gamma),
        corrections=_frozen(corrections),
        translation_sets=_frozen(tsets),
        cuts=tuple(_frozen(c) for c in cuts),
        beta=beta,
    )
    _check_tiling(E, part)
    return part


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


def _check_tiling(E: CubeUnion, part: Partition) -> None:
    tol = DEDUP_RTOL * E.beta
    lo, hi = part.cell_bounds()
    a = E.corner_array
    vol = E.beta ** E.dim
    for j in range(E.p):
        inside = np.all(lo[j] >= a[j] - tol) and np.all(hi[j] <= a[j] + E.beta + tol)
        ov_lo = np.maximum(lo[j][:, None], lo[j][None])
        ov_hi = np.minimum(hi[j][:, None], hi[j][None])
        overlap = np.prod(np.clip(ov_hi - ov_lo, 0.0, None), axis=-1)
        np.fill_diagonal(overlap, 0.0)
        covered = np.prod(hi[j] - lo[j], axis=-1).sum() - overlap.sum() / 2
        gap = abs(vol - covered)
        if not inside or overlap.max(initial=0.0) > tol * vol / E.beta or gap > tol * vol / E.beta:
            raise TilingError(j, gap)


def locate_cells(part: Partition, E: CubeUnion, omegas) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised :func:`cell_of`; returns ``(j, s)`` arrays with -1 outside ``E``."""
    omegas = np.atleast_2d(np.asarray(omegas, dtype=float))
    j = E.which_cube(omegas)
    rel = np.mod(omegas - E.corner_array[0], E.beta)
    idx = np.zeros(len(omegas), dtype=np.int64)
    for t, c in enumerate(part.cuts):
        it = np.clip(np.searchsorted(c, rel[:, t], side="right") - 1, 0, len(c) - 2)
        idx = idx * (len(c) - 1) + it
    s = np.where(j >= 0, idx, -1)
    return j, s


def cell_of(part: Partition, E: CubeUnion, omega) -> Optional[tuple[int, int]]:
    """The cell ``(j, s)`` containing ``omega``, or ``None`` if ``omega`` is not in ``E``."""
    omega = np.asarray(omega, dtype=float).reshape(-1)
    if omega.shape[0] != E.dim:
        raise DimensionError(f"point has length {omega.shape[0]}, expected {E.dim}")
    j, s = locate_cells(part, E, omega[None, :])
    if j[0] < 0:
        return None
    return int(j[0]), int(s[0])
