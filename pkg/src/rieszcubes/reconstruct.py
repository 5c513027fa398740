"""Sampling lattices, truncated reconstruction series and test signals."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np
from scipy.special import roots_legendre

from .geometry import CubeUnion
from .kernels import KernelSet, eval_kernels, rect_kernels

__all__ = [
    "Lattice",
    "SampleSet",
    "SampleError",
    "lattice_points",
    "sample",
    "reconstruct_at",
    "synth_from_coeffs",
    "bump_oracle",
    "Synthesized",
    "BumpSignal",
]

#: Evaluation points handled per block in :func:`reconstruct_at`.
CHUNK = 64


class SampleError(RuntimeError):
    """The sampled function failed at a lattice point."""

    def __init__(self, point, cause):
        super().__init__(f"oracle failed at {list(np.atleast_1d(point))}: {cause!r}")
        self.point = point


@dataclass(frozen=True, eq=False)
class Lattice:
    """``{W n + k_l : |n|_inf <= radius}`` with ``W = W_scale * Id``."""

    W_scale: float
    shifts: np.ndarray
    radius: int

    @property
    def p(self) -> int:
        return self.shifts.shape[0]

    @property
    def dim(self) -> int:
        return self.shifts.shape[1]

    @cached_property
    def indices(self) -> np.ndarray:
        """Integer vectors ``n`` in lexicographic order, ``((2N+1)^d, d)``."""
        rng = range(-self.radius, self.radius + 1)
        idx = np.array(list(itertools.product(rng, repeat=self.dim)), dtype=np.int64)
        return idx.reshape(-1, self.dim)

    @cached_property
    def points(self) -> np.ndarray:
        """All points, ``l``-major, ``(p * (2N+1)^d, d)``."""
        base = self.W_scale * self.indices
        return np.concatenate([base + k for k in self.shifts])

    @cached_property
    def labels(self) -> np.ndarray:
        """Shift index ``l`` of each row of :attr:`points`."""
        return np.repeat(np.arange(self.p), len(self.indices))

    def __len__(self) -> int:
        return self.p * len(self.indices)

    def separation(self) -> float:
        """Smallest Euclidean distance between two distinct points."""
        pts = self.points
        diff = pts[:, None, :] - pts[None, :, :]
        dist = np.sqrt((diff ** 2).sum(-1))
        np.fill_diagonal(dist, np.inf)
        return float(dist.min())


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Values ``alpha[l, i]`` attached to the point ``W n_i + k_l`` of a lattice."""

    lattice: Lattice
    values: np.ndarray

    def __post_init__(self):
        expected = (self.lattice.p, len(self.lattice.indices))
        if self.values.shape != expected:
            raise ValueError(f"values have shape {self.values.shape}, expected {expected}")

    @property
    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)

    def scaled(self, c) -> "SampleSet":
        return SampleSet(self.lattice, c * self.values)

    def __add__(self, other: "SampleSet") -> "SampleSet":
        return SampleSet(self.lattice, self.values + other.values)


def lattice_points(K, beta: float, N: int) -> tuple[Lattice, np.ndarray]:
    """Truncated lattice ``Lambda(k_1, ..., k_p)`` and its point list."""
    if N < 0:
        raise ValueError("radius must be >= 0")
    shifts = np.asarray(getattr(K, "shifts", K), dtype=float)
    lat = Lattice(2 * np.pi / beta, shifts, int(N))
    return lat, lat.points


def sample(oracle: Callable, L: Lattice) -> SampleSet:
    """Evaluate ``oracle`` on every lattice point.

    Oracles flagged with a true ``vectorized`` attribute receive all points as
    one ``(M, d)`` array; others are called point by point.
    """
    pts = L.points
    if getattr(oracle, "vectorized", False):
        try:
            vals = np.asarray(oracle(pts), dtype=complex)
        except Exception:
            vals = None  # fall back to locating the failing point
        if vals is not None:
            return SampleSet(L, vals.reshape(L.p, -1))
    vals = np.empty(len(pts), dtype=complex)
    for i, x in enumerate(pts):
        try:
            vals[i] = oracle(x)
        except Exception as exc:
            raise SampleError(x, exc) from exc
    return SampleSet(L, vals.reshape(L.p, -1))


def _series(ks: KernelSet, S: SampleSet, t: np.ndarray) -> np.ndarray:
    lo, hi = ks.boxes
    coeffs = ks.flat_coeffs[S.lattice.labels]  # (Np, C)
    pts = S.lattice.points
    alpha = S.flat
    out = np.empty(len(t), dtype=complex)
    for start in range(0, len(t), CHUNK):
        block = t[start:start + CHUNK]
        diff = (block[:, None, :] - pts[None]).reshape(-1, ks.dim)
        rk = rect_kernels(lo, hi, diff).reshape(len(block), len(pts), -1)
        terms = np.einsum("mpc,pc->mp", rk, coeffs) * alpha
        out[start:start + CHUNK] = terms.sum(axis=-1)
    return out


def reconstruct_at(ks: KernelSet, S: SampleSet, t):
    """Truncated series ``sum_{l, |n| <= N} alpha_n^l S_l(t - W n - k_l)``.

    Terms are added in lattice order; each evaluation point is summed
    independently, so results do not depend on how points are batched.
    """
    t = np.asarray(t, dtype=float)
    single = t.ndim == 1
    out = _series(ks, S, t.reshape(-1, ks.dim))
    return complex(out[0]) if single else out


class Synthesized:
    """``F[alpha](t)`` evaluated directly from its defining sum of shifted kernels."""

    vectorized = True

    def __init__(self, ks: KernelSet, alpha: SampleSet):
        self.ks = ks
        self.alpha = alpha
        nz = np.flatnonzero(alpha.flat)
        self._labels = alpha.lattice.labels[nz]
        self._nodes = alpha.lattice.points[nz]
        self._weights = alpha.flat[nz]

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        single = t.ndim == 1
        t2 = t.reshape(-1, self.ks.dim)
        n = len(self._nodes)
        acc = np.zeros(len(t2), dtype=complex)
        block = max(1, 4096 // max(n, 1))
        for start in range(0, len(t2), block):
            tb = t2[start:start + block]
            diff = (tb[:, None, :] - self._nodes[None]).reshape(-1, self.ks.dim)
            vals = eval_kernels(self.ks, diff).reshape(len(tb), n, -1)
            picked = np.take_along_axis(vals, self._labels[None, :, None], axis=2)[..., 0]
            acc[start:start + block] = picked @ self._weights
        return complex(acc[0]) if single else acc


def synth_from_coeffs(ks: KernelSet, alpha: SampleSet) -> Synthesized:
    """The band-limited function ``t -> sum alpha_n^l S_l(t - W n - k_l)``."""
    return Synthesized(ks, alpha)


def _bump(u: np.ndarray) -> np.ndarray:
    return np.exp(-1.0 / (1.0 - u * u))


class BumpSignal:
    """Band-limited signal whose spectrum is a smooth bump inside one cube.

    The spectrum is ``prod_t exp(-1 / (1 - u_t^2))`` with
    ``u_t = 2 (omega_t - c_t) / width`` on the cube of side ``width`` centred at
    ``c``.  The signal is its inverse transform, computed axis by axis with
    Gauss-Legendre quadrature: ``nodes`` points for moderate ``|t|``, doubled
    as often as needed to resolve the oscillation ``exp(i omega t)``.
    """

    vectorized = True

    def __init__(self, centre, width: float, nodes: int = 64):
        self.centre = np.asarray(centre, dtype=float)
        self.width = float(width)
        self.nodes = int(nodes)
        self._rules = {}

    @property
    def dim(self) -> int:
        return self.centre.shape[0]

    def _rule(self, n: int):
        if n not in self._rules:
            u, w = roots_legendre(n)
            self._rules[n] = (u, w * self.width / 2 * _bump(u))
        return self._rules[n]

    def _node_counts(self, t: np.ndarray) -> np.ndarray:
        # about 0.36 * width * |t| nodes resolve the oscillation to 1e-10
        need = 0.4 * self.width * np.abs(t) + 16
        k = np.ceil(np.log2(np.maximum(need, self.nodes) / self.nodes)).astype(int)
        return self.nodes * 2 ** np.maximum(k, 0)

    def spectrum(self, omega) -> np.ndarray:
        omega = np.atleast_2d(np.asarray(omega, dtype=float))
        u = 2 * (omega - self.centre) / self.width
        inside = np.all(np.abs(u) < 1, axis=-1)
        with np.errstate(divide="ignore", over="ignore"):
            val = np.prod(_bump(np.where(np.abs(u) < 1, u, 0.0)), axis=-1)
        return np.where(inside, val, 0.0)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        single = t.ndim == 1
        t2 = t.reshape(-1, self.dim)
        out = np.full(len(t2), (2 * np.pi) ** (-self.dim / 2), dtype=complex)
        for ax in range(self.dim):
            counts = self._node_counts(t2[:, ax])
            for n in np.unique(counts):
                sel = counts == n
                u, w = self._rule(int(n))
                omega = self.centre[ax] + self.width / 2 * u
                out[sel] *= np.exp(1j * np.outer(t2[sel, ax], omega)) @ w
        return complex(out[0]) if single else out


def bump_oracle(E: CubeUnion, j: int, shrink: float = 0.9) -> BumpSignal:
    """Bump signal with spectrum on the concentric sub-cube of ``Q_j`` of side ``shrink * beta``."""
    centre = E.corner_array[j] + E.beta / 2
    return BumpSignal(centre, shrink * E.beta)
