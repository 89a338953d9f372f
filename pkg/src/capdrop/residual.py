"""Traveling-wave residual of a rotating capillary drop, its Jacobian and
geometric diagnostics.

With surface tension and the Bernoulli constant both scaled to one, a
symmetric Riemann map ``Z`` rotating at speed ``c`` is a traveling wave iff

    F(Z, c) = 2 C(Z_a/|Z_a|)_a - 2i Z_a + c^2 C(Z H(|Z|^2)_a) = 0,

where ``C`` is the Cauchy projection, ``H`` the circle Hilbert transform and
``_a`` the angular derivative.  A general surface tension ``sigma`` is
recovered by reading ``c**2`` as ``c**2 / sigma``.

Nonlinear terms are evaluated pointwise on an oversampled grid and projected
back onto the symmetry lattice.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import spectral as sp
from .errors import CurvatureRealnessError, DegenerateMapError, SymmetryViolationError
from .spectral import LatticeCoeffs, SymmetryDefect


@dataclass(frozen=True)
class ResidualReport:
    residual: LatticeCoeffs
    norm_complex: float
    norm_real: float
    defect: SymmetryDefect
    # L2 mass of lattice modes beyond the truncation
    tail: float = 0.0


@dataclass(frozen=True)
class DiagnosticsReport:
    curvature_min: float
    curvature_max: float
    chord_arc: float
    c1_norm: float
    decay_slope: float
    min_deriv: float


@dataclass(frozen=True)
class PotentialReport:
    phi_alpha: np.ndarray
    bernoulli_avg: complex


class _Fields:
    """Grid quantities shared by the residual, Jacobian and diagnostics."""

    def __init__(self, z: LatticeCoeffs, M: int | None, tol_floor: float):
        self.m, self.N = z.m, z.N
        self.M = M or sp.default_grid_size(z.m, z.N)
        self.Z = sp.to_grid(z, self.M)
        tau = sp.nodes(self.M)
        fr = z.frequencies
        # exact derivatives of the truncated series
        self.Za = sp.from_spectrum(_place(1j * fr * z.coeffs, fr, self.M))
        self.Zaa = sp.from_spectrum(_place(-(fr**2) * z.coeffs, fr, self.M))
        self.A = np.abs(self.Za)
        self.min_deriv = float(self.A.min())
        if self.min_deriv <= tol_floor:
            raise DegenerateMapError(
                f"min |Z_alpha| = {self.min_deriv:.3e} is below the floor {tol_floor:.1e}"
            )
        self.tau = tau
        self.S = np.abs(self.Z) ** 2
        self.Sa = sp.d_alpha(self.S).real
        self.HSa = sp.hilbert(self.Sa).real
        self.unit_tangent = self.Za / self.A


def _place(values, freqs, M):
    fhat = np.zeros(M, dtype=complex)
    fhat[freqs] = values
    return fhat


def _field_grid(f: _Fields, c: float) -> np.ndarray:
    return (
        2.0 * sp.d_alpha(sp.cauchy_project(f.unit_tangent))
        - 2j * f.Za
        + c**2 * sp.cauchy_project(f.Z * f.HSa)
    )


def _real_grid(f: _Fields, c: float) -> np.ndarray:
    CSa = sp.plemelj(f.Sa)
    return (
        -2j * f.Za
        + c**2 * f.Z * f.HSa
        + 2.0 * sp.d_alpha(f.unit_tangent)
        - 1j * c**2 * np.conj(CSa) ** 2 / np.conj(f.Za)
    )


def _evaluate(z, c, M, tol_floor, tol_sym, strict):
    f = _Fields(z, M, tol_floor)
    coeffs, defect_sq, tail_sq, norm_sq = sp.project(_field_grid(f, c), z.m, z.N)
    absolute = float(np.sqrt(defect_sq))
    defect = SymmetryDefect(absolute, absolute / max(1.0, float(np.sqrt(norm_sq))))
    if strict and defect.relative > tol_sym:
        raise SymmetryViolationError(
            f"residual symmetry defect {defect.relative:.3e} exceeds {tol_sym:.1e}", defect
        )
    res = LatticeCoeffs(z.m, coeffs)
    norm_complex = float(np.max(np.abs(sp.to_grid(res, f.M))))
    norm_real = float(np.max(np.abs(_real_grid(f, c))))
    return ResidualReport(res, norm_complex, norm_real, defect, float(np.sqrt(tail_sq)))


def residual_complex(
    z: LatticeCoeffs,
    c: float,
    M: int | None = None,
    *,
    tol_floor: float = sp.TOL_FLOOR,
    tol_sym: float = sp.TOL_SYM,
    strict: bool = True,
) -> ResidualReport:
    """Lattice coefficients of ``F(Z, c)`` with grid norms and symmetry defect."""
    return _evaluate(z, c, M, tol_floor, tol_sym, strict)


def residual_real(
    z: LatticeCoeffs,
    c: float,
    M: int | None = None,
    *,
    tol_floor: float = sp.TOL_FLOOR,
    tol_sym: float = sp.TOL_SYM,
    strict: bool = True,
) -> ResidualReport:
    """Same report; ``norm_real`` is the sup of the pointwise (unprojected) form

        -2i Z_a + c^2 Z H(|Z|^2)_a + 2 (Z_a/|Z_a|)_a - i c^2 conj(C(|Z|^2)_a)^2 / conj(Z_a)

    which vanishes on the circle exactly when ``F(Z, c) = 0`` for a genuine
    Riemann map.
    """
    return _evaluate(z, c, M, tol_floor, tol_sym, strict)


def real_form_grid(z: LatticeCoeffs, c: float, M: int | None = None, tol_floor=sp.TOL_FLOOR):
    """Pointwise values of the unprojected boundary equation."""
    return _real_grid(_Fields(z, M, tol_floor), c)


def residual_vector(z: LatticeCoeffs, c: float, M: int | None = None, tol_floor=sp.TOL_FLOOR):
    """Lattice coefficients of ``F`` as a plain array (no checks, no norms)."""
    f = _Fields(z, M, tol_floor)
    return sp.project(_field_grid(f, c), z.m, z.N)[0]


def directional_derivative(z: LatticeCoeffs, c: float, zeta, M: int | None = None,
                           tol_floor=sp.TOL_FLOOR) -> np.ndarray:
    """Grid values of ``D_Z F(Z, c)[zeta]`` for one or a stack of zeta grids.

    ``zeta`` holds boundary samples of holomorphic directions, shape ``(..., M)``.
    """
    f = _Fields(z, M, tol_floor)
    return _directional(f, c, np.asarray(zeta, dtype=complex))


def _directional(f: _Fields, c: float, zeta, zeta_a=None):
    if zeta_a is None:
        zeta_a = sp.d_alpha(zeta)
    lead = zeta_a / f.A - f.Za**2 * np.conj(zeta_a) / f.A**3
    cross = (zeta * np.conj(f.Z) + np.conj(zeta) * f.Z).real
    return (
        sp.d_alpha(sp.cauchy_project(lead))
        - 2j * zeta_a
        + c**2 * sp.cauchy_project(zeta * f.HSa + f.Z * sp.hilbert(sp.d_alpha(cross)).real)
    )


def jacobian_analytic(z: LatticeCoeffs, c: float, M: int | None = None,
                      tol_floor=sp.TOL_FLOOR) -> np.ndarray:
    """Dense ``N x (N+1)`` Jacobian; the last column is ``dF/dc``."""
    f = _Fields(z, M, tol_floor)
    fr = z.frequencies
    basis = f.tau[None, :] ** fr[:, None]
    cols = _directional(f, c, basis, 1j * fr[:, None] * basis)
    J = np.empty((z.N, z.N + 1))
    J[:, : z.N] = sp.project(cols, z.m, z.N)[0].T
    dc = 2.0 * c * sp.cauchy_project(f.Z * f.HSa)
    J[:, z.N] = sp.project(dc, z.m, z.N)[0]
    return J


def jacobian_fd(z: LatticeCoeffs, c: float, h: float = 1e-5, M: int | None = None,
                tol_floor=sp.TOL_FLOOR) -> np.ndarray:
    """Central-difference Jacobian of the lattice residual."""
    if not 1e-7 <= h <= 1e-3:
        raise ValueError(f"finite-difference step {h} outside [1e-7, 1e-3]")
    M = M or sp.default_grid_size(z.m, z.N)
    J = np.empty((z.N, z.N + 1))
    for n in range(z.N):
        e = np.zeros(z.N)
        e[n] = h
        fp = residual_vector(LatticeCoeffs(z.m, z.coeffs + e), c, M, tol_floor)
        fm = residual_vector(LatticeCoeffs(z.m, z.coeffs - e), c, M, tol_floor)
        J[:, n] = (fp - fm) / (2 * h)
    fp = residual_vector(z, c + h, M, tol_floor)
    fm = residual_vector(z, c - h, M, tol_floor)
    J[:, z.N] = (fp - fm) / (2 * h)
    return J


def trivial_linearization(m: int, N: int, c: float) -> np.ndarray:
    """Diagonal of ``D_Z F(Z0, c)`` on the lattice basis."""
    k = np.arange(N, dtype=float)
    d = -(m**2 * k**2 - c**2 * m * k - 1.0)
    d[0] = 2.0
    return d


def curvature(z: LatticeCoeffs, M: int | None = None, tol_floor=sp.TOL_FLOOR) -> np.ndarray:
    """Real curvature ``kappa = (Z_a/|Z_a|)_a / (i Z_a)`` on the grid."""
    f = _Fields(z, M, tol_floor)
    return _curvature(f)


def _curvature(f: _Fields) -> np.ndarray:
    # (Z_a/|Z_a|)_a by the chain rule on exact derivatives; differentiating the
    # sampled unit tangent spectrally would alias.
    turn = f.Zaa / f.A - f.Za * (np.conj(f.Za) * f.Zaa).real / f.A**3
    kappa = turn / (1j * f.Za)
    bound = 1e-8 * (1.0 + np.max(np.abs(kappa)))
    if np.max(np.abs(kappa.imag)) > bound:
        raise CurvatureRealnessError(
            f"sup |Im kappa| = {np.max(np.abs(kappa.imag)):.3e} exceeds {bound:.3e}"
        )
    return kappa.real


def chord_arc_constant(z: LatticeCoeffs, M: int | None = None, *, chunk: int = 256) -> float:
    """``max |tau1 - tau2| / |Z(tau1) - Z(tau2)|`` over all node pairs.

    Diagonal pairs contribute ``1/|Z_a|``.  Returns ``inf`` when two distinct
    nodes map to (numerically) the same point or ``Z_a`` vanishes.
    """
    M = M or sp.default_grid_size(z.m, z.N)
    Zg = sp.to_grid(z, M)
    tau = sp.nodes(M)
    fr = z.frequencies
    Za = sp.from_spectrum(_place(1j * fr * z.coeffs, fr, M))
    amin = np.min(np.abs(Za))
    if amin == 0.0:
        return float("inf")
    best = 1.0 / amin
    idx = np.arange(M)
    for start in range(0, M, chunk):
        rows = slice(start, min(start + chunk, M))
        num = np.abs(tau[rows, None] - tau[None, :])
        den = np.abs(Zg[rows, None] - Zg[None, :])
        off = idx[rows, None] != idx[None, :]
        if np.any(den[off] < 1e-14):
            return float("inf")
        den = np.where(off, den, 1.0)
        best = max(best, float(np.max(np.where(off, num / den, 0.0))))
    return best


def c1_norm(z: LatticeCoeffs, M: int | None = None) -> float:
    """``sup |Z| + sup |Z_a|`` over the grid."""
    M = M or sp.default_grid_size(z.m, z.N)
    fr = z.frequencies
    Za = sp.from_spectrum(_place(1j * fr * z.coeffs, fr, M))
    return float(np.max(np.abs(sp.to_grid(z, M))) + np.max(np.abs(Za)))


def decay_slope(z: LatticeCoeffs, rel_floor: float = 1e-14) -> float:
    """Least-squares slope of ``log|a_n|`` against ``n`` over the upper half of
    the resolved spectrum.

    Coefficients below ``rel_floor * max|a|`` are round-off and are skipped;
    if fewer than two resolved coefficients remain beyond ``a_0`` the spectrum
    has already decayed to round-off and ``-inf`` is returned.
    """
    a = np.abs(z.coeffs)
    floor = rel_floor * max(a.max(), 1e-300)
    n = np.nonzero(a[1:] > floor)[0] + 1
    if n.size < 2:
        return float("-inf")
    upper = n[n >= (n[0] + n[-1]) / 2.0]
    if upper.size < 2:
        upper = n[-2:]
    slope, _ = np.polyfit(upper.astype(float), np.log(a[upper]), 1)
    return float(slope)


def diagnostics(z: LatticeCoeffs, M: int | None = None, tol_floor=sp.TOL_FLOOR) -> DiagnosticsReport:
    f = _Fields(z, M, tol_floor)
    kappa = _curvature(f)
    return DiagnosticsReport(
        curvature_min=float(kappa.min()),
        curvature_max=float(kappa.max()),
        chord_arc=chord_arc_constant(z, f.M),
        c1_norm=float(np.max(np.abs(f.Z)) + np.max(f.A)),
        decay_slope=decay_slope(z),
        min_deriv=f.min_deriv,
    )


def potential_diagnostics(z: LatticeCoeffs, c: float, M: int | None = None,
                          tol_floor=sp.TOL_FLOOR) -> PotentialReport:
    """Boundary trace of ``Phi_a = -i c C(|Z|^2)_a`` and ``Avg (Phi_a)^2 / Z_a``."""
    f = _Fields(z, M, tol_floor)
    phi_a = -1j * c * sp.plemelj(f.Sa)
    avg = sp.circle_average(phi_a**2 / f.Za)
    return PotentialReport(phi_a, complex(avg))


def half_turn(z: LatticeCoeffs, k: int = 1) -> LatticeCoeffs:
    """``e^{-i pi/(mk)} Z(e^{i pi/(mk)} w)`` for ``Z`` with mk-fold symmetry.

    On the sub-lattice ``n = k j`` this flips the sign of every odd ``j``.
    """
    n = np.arange(z.N)
    if np.any(z.coeffs[n % k != 0] != 0.0):
        off = np.max(np.abs(z.coeffs[n % k != 0]))
        if off > 1e-12 * max(1.0, np.max(np.abs(z.coeffs))):
            raise ValueError(f"map is not {z.m * k}-fold symmetric (off-sublattice mass {off:.2e})")
    sign = np.where((n // k) % 2 == 1, -1.0, 1.0)
    a = np.where(n % k == 0, sign * z.coeffs, 0.0)
    return LatticeCoeffs(z.m, a)
