"""Shift vectors for the sampling lattice and their determinant certificate."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .geometry import Partition

__all__ = [
    "ShiftVector",
    "ShiftSearchExhausted",
    "system_matrix",
    "normalized_dets",
    "min_normalized_det",
    "choose_shifts",
    "lu_det",
]

DEFAULT_TAU = 1e-3


class ShiftSearchExhausted(RuntimeError):
    """No draw reached the requested certificate."""

    def __init__(self, tries: int, best: float, tau: float):
        super().__init__(f"no shift draw reached tau={tau:g} in {tries} tries (best certificate {best:.3e})")
        self.tries = tries
        self.best = best
        self.tau = tau


@dataclass(frozen=True, eq=False)
class ShiftVector:
    """Shifts ``k_l`` (rows of ``shifts``) with the certificate they earned."""

    shifts: np.ndarray
    min_norm_det: float
    seed: int | None = None
    tries: int = 0
    tau: float | None = None

    @property
    def p(self) -> int:
        return self.shifts.shape[0]


def _as_shifts(K) -> np.ndarray:
    return np.asarray(K.shifts if isinstance(K, ShiftVector) else K, dtype=float)


def system_matrix(part: Partition, K, j: int, s: int, beta: float) -> np.ndarray:
    """Matrix with entry ``(k, l) = exp(i beta m_k . k_l)`` for ``m_k`` in ``C_js``."""
    m = part.translation_sets[j, s]  # (p, d)
    return np.exp(1j * beta * (m @ _as_shifts(K).T))


def lu_det(a: np.ndarray) -> complex:
    """Determinant from an LU factorisation with partial pivoting."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(a, check_finite=False)
    sign = -1.0 if np.count_nonzero(piv != np.arange(len(piv))) % 2 else 1.0
    return sign * np.prod(np.diag(lu))


def normalized_dets(part: Partition, K, beta: float) -> np.ndarray:
    """``|det B_js| / p^(p/2)`` for every cell, shape ``(p, S)``."""
    p = part.p
    out = np.empty((p, part.cell_count))
    scale = p ** (p / 2)
    for j in range(p):
        for s in range(part.cell_count):
            out[j, s] = abs(lu_det(system_matrix(part, K, j, s, beta))) / scale
    return out


def min_normalized_det(part: Partition, K, beta: float) -> float:
    """Minimum over all cells of the Hadamard-normalised determinant modulus."""
    return float(normalized_dets(part, K, beta).min())


def choose_shifts(part: Partition, beta: float, seed: int = 0, tau: float = DEFAULT_TAU,
                  max_tries: int = 64) -> ShiftVector:
    """Draw shifts uniformly from ``[0, 2 pi / beta)^d`` until the certificate reaches ``tau``.

    Raises
    ------
    ShiftSearchExhausted
        After ``max_tries`` rejected draws.
    """
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    if max_tries < 1:
        raise ValueError("max_tries must be >= 1")
    rng = np.random.default_rng(seed)
    d = len(part.cuts)
    period = 2 * np.pi / beta
    best = -1.0
    for attempt in range(1, max_tries + 1):
        k = rng.uniform(0.0, period, size=(part.p, d))
        cert = min_normalized_det(part, k, beta)
        best = max(best, cert)
        if cert >= tau:
            k.setflags(write=False)
            return ShiftVector(k, cert, seed=seed, tries=attempt, tau=tau)
    raise ShiftSearchExhausted(max_tries, best, tau)
