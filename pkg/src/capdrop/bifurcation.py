"""Bifurcation data on the trivial branch ``(Z0, c)`` of circular drops."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import StepTooLargeError
from .spectral import LatticeCoeffs

SEED_AMPLITUDE = 0.01
MAX_SEED = 0.05


@dataclass(frozen=True)
class BifurcationPoint:
    m: int
    k: int
    c: float
    kernel: LatticeCoeffs
    transversality: float

    @property
    def N(self) -> int:
        return self.kernel.N


def bifurcation_speed(m: int, k: int) -> float:
    """Rotation speed ``sqrt(mk - 1/(mk))`` at which mode ``w**(mk+1)`` bifurcates."""
    if m < 2 or k < 1:
        raise ValueError(f"need m >= 2 and k >= 1, got m={m}, k={k}")
    mk = m * k
    return math.sqrt(mk - 1.0 / mk)


def make_bifurcation_point(m: int, k: int, N: int) -> BifurcationPoint:
    if not 1 <= k < N:
        raise IndexError(f"kernel index k={k} must satisfy 1 <= k < N={N}")
    c = bifurcation_speed(m, k)
    return BifurcationPoint(m, k, c, LatticeCoeffs.unit(m, N, k), 2.0 * c * m * k)


def branch_seed(bp: BifurcationPoint, s0: float = SEED_AMPLITUDE):
    """First-order predictor ``(Z0 + s0 w**(mk+1), c_mk)``; the speed does not
    move to first order along the branch."""
    if abs(s0) > MAX_SEED:
        raise StepTooLargeError(f"seed amplitude |s0|={abs(s0)} exceeds {MAX_SEED}")
    a = LatticeCoeffs.identity(bp.m, bp.N).coeffs + s0 * bp.kernel.coeffs
    return LatticeCoeffs(bp.m, a), bp.c


def bifurcation_table(m: int, k_max: int):
    """Rows ``(k, mk, c_mk)`` for ``k = 1..k_max``."""
    return [(k, m * k, bifurcation_speed(m, k)) for k in range(1, k_max + 1)]


def nondegeneracy_margin(m: int, N: int, c: float, skip: int | None = None) -> float:
    """Smallest ``|m^2 n^2 - c^2 m n - 1|`` over ``n = 1..N-1`` (excluding ``skip``)."""
    from .residual import trivial_linearization

    d = np.abs(trivial_linearization(m, N, c))
    mask = np.ones(N, dtype=bool)
    mask[0] = False
    if skip is not None:
        mask[skip] = False
    return float(d[mask].min())
