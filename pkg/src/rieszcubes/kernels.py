"""Coefficients of the spectral step functions and the interpolation kernels.

For every cell ``Q_j^s`` the values ``x_l(j, s)`` solve

    sum_l x_l exp(i beta m . k_l) = (sqrt(2 pi) / beta)^d [m == 0],   m in C_js.

The spectral function ``s_l`` equals ``x_l(j, s)`` on ``Q_j^s`` and vanishes off
``E``; the kernel ``S_l`` is its inverse Fourier transform, a finite sum of
closed-form box transforms.  Fourier convention:
``F f(x) = (2 pi)^(-d/2) int f(t) exp(-i x . t) dt``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg as sla

from .geometry import CubeUnion, Partition, Rect, locate_cells
from .shifts import ShiftVector, system_matrix

__all__ = [
    "CoefficientTable",
    "KernelSet",
    "SingularSystem",
    "solve_coefficients",
    "system_residual",
    "make_kernel_set",
    "eval_spectral",
    "rect_kernel",
    "rect_kernels",
    "eval_kernel",
    "eval_kernels",
]

MAX_P = 32
#: Normalised determinant below which a cell system is declared singular.
SINGULAR_TOL = 1e-12
#: Below this ``|t|`` the box transform switches to its Taylor expansion.
SINC_SWITCH = 1e-6


class SingularSystem(np.linalg.LinAlgError):
    """A cell system has (numerically) vanishing determinant."""

    def __init__(self, j: int, s: int, det: float):
        super().__init__(f"singular system for cell (j={j}, s={s}); normalised |det| = {det:.3e}")
        self.cell = (j, s)
        self.det = det


@dataclass(frozen=True, eq=False)
class CoefficientTable:
    """``x[l, j, s]`` and the largest absolute residual of the cell systems."""

    x: np.ndarray
    max_residual: float


def _rhs(p: int, j: int, beta: float, d: int) -> np.ndarray:
    b = np.zeros(p, dtype=complex)
    b[j] = (np.sqrt(2 * np.pi) / beta) ** d
    return b


def solve_coefficients(part: Partition, K: ShiftVector, beta: float) -> CoefficientTable:
    """Solve every cell system by LU with partial pivoting.

    Raises
    ------
    SingularSystem
        If some cell matrix has normalised determinant below ``SINGULAR_TOL``.
    """
    p, S = part.p, part.cell_count
    if p > MAX_P:
        raise ValueError(f"p={p} exceeds the supported maximum {MAX_P}")
    d = len(part.cuts)
    x = np.empty((p, p, S), dtype=complex)
    worst = 0.0
    hadamard = p ** (p / 2)
    for j in range(p):
        b = _rhs(p, j, beta, d)
        for s in range(S):
            a = system_matrix(part, K, j, s, beta)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", sla.LinAlgWarning)
                lu, piv = sla.lu_factor(a, check_finite=False)
            det = abs(np.prod(np.diag(lu))) / hadamard
            if not det >= SINGULAR_TOL:
                raise SingularSystem(j, s, det)
            sol = sla.lu_solve((lu, piv), b, check_finite=False)
            worst = max(worst, float(np.abs(a @ sol - b).max()))
            x[:, j, s] = sol
    x.setflags(write=False)
    return CoefficientTable(x, worst)


def system_residual(part: Partition, K, beta: float, x: np.ndarray) -> float:
    """Largest ``|B_js x(j, s) - rhs|`` over all cells for a given table."""
    p, S = part.p, part.cell_count
    d = len(part.cuts)
    worst = 0.0
    for j in range(p):
        b = _rhs(p, j, beta, d)
        for s in range(S):
            r = system_matrix(part, K, j, s, beta) @ x[:, j, s] - b
            worst = max(worst, float(np.abs(r).max()))
    return worst


@dataclass(frozen=True, eq=False)
class KernelSet:
    """Everything needed to evaluate ``s_l`` and ``S_l``."""

    E: CubeUnion
    P: Partition
    K: ShiftVector
    coeffs: CoefficientTable

    @property
    def p(self) -> int:
        return self.E.p

    @property
    def dim(self) -> int:
        return self.E.dim

    @property
    def W(self) -> float:
        """Lattice step ``2 pi / beta``."""
        return 2 * np.pi / self.E.beta

    @property
    def shifts(self) -> np.ndarray:
        return self.K.shifts

    @cached_property
    def boxes(self) -> tuple[np.ndarray, np.ndarray]:
        """Flattened cell bounds ``(p * S, d)``; cell ``c = j * S + s``."""
        lo, hi = self.P.cell_bounds()
        return lo.reshape(-1, self.dim), hi.reshape(-1, self.dim)

    @cached_property
    def flat_coeffs(self) -> np.ndarray:
        """``(p, p * S)`` coefficient matrix matching :attr:`boxes`."""
        return self.coeffs.x.reshape(self.p, -1)

    @cached_property
    def axis_tensor(self) -> tuple[list, np.ndarray]:
        """Distinct intervals per axis and coefficients on their product grid.

        ``T[u_1, ..., u_d, l]`` is ``x_l`` of the cell whose axis intervals are
        ``u_1, ..., u_d`` (zero where no cell has that shape).
        """
        lo, hi = self.boxes
        intervals, index = [], []
        for a in range(self.dim):
            pairs, inv = np.unique(np.stack([lo[:, a], hi[:, a]], axis=1), axis=0, return_inverse=True)
            intervals.append(pairs)
            index.append(inv.ravel())
        T = np.zeros(tuple(len(iv) for iv in intervals) + (self.p,), dtype=complex)
        np.add.at(T, tuple(index), self.flat_coeffs.T)
        return intervals, T


def make_kernel_set(E: CubeUnion, P: Partition, K: ShiftVector) -> KernelSet:
    return KernelSet(E, P, K, solve_coefficients(P, K, E.beta))


def eval_spectral(ks: KernelSet, l: int, omega):
    """``s_l(omega)``: the coefficient of the cell holding ``omega``, zero off ``E``.

    Accepts a single point ``(d,)`` or a batch ``(M, d)``.
    """
    omega = np.asarray(omega, dtype=float)
    single = omega.ndim == 1
    j, s = locate_cells(ks.P, ks.E, omega.reshape(-1, ks.dim))
    out = np.where(j >= 0, ks.coeffs.x[l, np.maximum(j, 0), np.maximum(s, 0)], 0.0)
    return complex(out[0]) if single else out


#: Below this ``|t w / 2|`` the difference of exponentials loses digits; use sinc.
DIFF_SWITCH = 0.1


def _sinc_factor(lo: np.ndarray, hi: np.ndarray, t: np.ndarray) -> np.ndarray:
    width = hi - lo
    x = t[:, None] * width / 2
    small = np.abs(t)[:, None] < SINC_SWITCH
    with np.errstate(invalid="ignore", divide="ignore"):
        sinc = np.where(small, 1 - x * x / 6 + x ** 4 / 120, np.sin(x) / np.where(small, 1.0, x))
    return np.exp(1j * np.outer(t, (hi + lo) / 2)) * width * sinc


def _axis_factor(lo: np.ndarray, hi: np.ndarray, t: np.ndarray) -> np.ndarray:
    """``int_lo^hi exp(i w t) dw`` for ``(M,)`` points and ``(U,)`` intervals.

    Away from ``t w = 0`` this is ``(e^{i t hi} - e^{i t lo}) / (i t)`` with one
    exponential per distinct endpoint; rows near zero use the sinc form.
    """
    ends, inv = np.unique(np.concatenate([lo, hi]), return_inverse=True)
    e = np.exp(1j * np.outer(t, ends))
    near = np.abs(t) * (hi - lo).max(initial=0.0) / 2 < DIFF_SWITCH
    with np.errstate(invalid="ignore", divide="ignore"):
        out = (e[:, inv[len(lo):]] - e[:, inv[:len(lo)]]) / (1j * t[:, None])
    if near.any():
        out[near] = _sinc_factor(lo, hi, t[near])
    return out


def rect_kernels(lo: np.ndarray, hi: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Inverse Fourier transforms of box indicators.

    The transform factors over axes; each axis factor is computed once per
    distinct interval and shared by all boxes using it.

    Parameters
    ----------
    lo, hi : (C, d) arrays
        Box bounds.
    t : (M, d) array
        Real evaluation points.

    Returns
    -------
    (M, C) complex array
    """
    d = lo.shape[1]
    out = None
    for a in range(d):
        pairs, inv = np.unique(np.stack([lo[:, a], hi[:, a]], axis=1), axis=0, return_inverse=True)
        f = _axis_factor(pairs[:, 0], pairs[:, 1], t[:, a])[:, inv.ravel()]
        out = f if out is None else out * f
    return (2 * np.pi) ** (-d / 2) * out


def rect_kernel(R: Rect, t):
    """Inverse Fourier transform of the indicator of ``R`` at real ``t``."""
    t = np.asarray(t, dtype=float)
    single = t.ndim == 1
    out = rect_kernels(np.array([R.lo]), np.array([R.hi]), t.reshape(-1, R.dim))[:, 0]
    return complex(out[0]) if single else out


def eval_kernels(ks: KernelSet, t) -> np.ndarray:
    """All kernels at once: ``(M, p)`` array of ``S_l(t_m)``.

    The box transforms factor over axes, so the sum over cells is a sequence
    of contractions of per-axis factors with :attr:`KernelSet.axis_tensor`.
    """
    t = np.atleast_2d(np.asarray(t, dtype=float))
    intervals, T = ks.axis_tensor
    M = len(t)
    f = _axis_factor(intervals[0][:, 0], intervals[0][:, 1], t[:, 0])
    Z = (f @ T.reshape(len(intervals[0]), -1)).reshape((M,) + T.shape[1:])
    for a in range(1, ks.dim):
        f = _axis_factor(intervals[a][:, 0], intervals[a][:, 1], t[:, a])
        Z = np.einsum("mu,mu...->m...", f, Z)
    return (2 * np.pi) ** (-ks.dim / 2) * Z


def eval_kernel(ks: KernelSet, l: int, t):
    """``S_l(t) = sum_{j,s} x_l(j, s) * rect_kernel(Q_j^s, t)``."""
    t = np.asarray(t, dtype=float)
    single = t.ndim == 1
    lo, hi = ks.boxes
    out = rect_kernels(lo, hi, t.reshape(-1, ks.dim)) @ ks.flat_coeffs[l]
    return complex(out[0]) if single else out
