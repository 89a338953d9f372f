"""Boundary calculus for functions holomorphic in the unit disk.

A boundary function is stored as its samples on the equispaced nodes
``tau_j = exp(2*pi*i*j/M)``, ``j = 0..M-1``; a plain complex ndarray plays the
role of a grid.  All operators act on the last axis, so a stack of grids
(shape ``(..., M)``) is transformed in one call.

Fourier modes are indexed by integer frequency ``n``: the grid value is
``sum_n fhat_n * tau_j**n`` with ``fhat = fft(values) / M``.  On an even grid
the Nyquist mode ``M/2`` has no sign, so odd operators (derivative, Hilbert
transform) send it to zero and the Cauchy projection keeps half of it; this
keeps the Plemelj identity exact on the grid.

Symmetric holomorphic maps are stored as :class:`LatticeCoeffs`,
``Z(w) = sum_n a_n w**(m*n + 1)`` with real ``a_n``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DivisionFloorError, GridTooSmallError, SymmetryViolationError

TOL_SYM = 1e-9
TOL_FLOOR = 1e-10


@dataclass(frozen=True, eq=False)
class LatticeCoeffs:
    """Real coefficients of ``sum_n a_n w**(m n + 1)``, ``n = 0..N-1``."""

    m: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=float).reshape(-1)
        if int(self.m) != self.m or self.m < 2:
            raise ValueError(f"symmetry multiplicity must be an integer >= 2, got {self.m}")
        if coeffs.size < 1:
            raise ValueError("need at least one lattice coefficient")
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("lattice coefficients must be finite")
        coeffs.setflags(write=False)
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def N(self) -> int:
        return self.coeffs.size

    @property
    def frequencies(self) -> np.ndarray:
        return lattice_frequencies(self.m, self.N)

    @classmethod
    def identity(cls, m: int, N: int) -> "LatticeCoeffs":
        """The trivial drop ``Z0(w) = w``."""
        a = np.zeros(N)
        a[0] = 1.0
        return cls(m, a)

    @classmethod
    def unit(cls, m: int, N: int, k: int) -> "LatticeCoeffs":
        a = np.zeros(N)
        a[k] = 1.0
        return cls(m, a)

    def resized(self, N: int) -> "LatticeCoeffs":
        """Zero-pad or truncate to ``N`` modes."""
        a = np.zeros(N)
        n = min(N, self.N)
        a[:n] = self.coeffs[:n]
        return LatticeCoeffs(self.m, a)

    def min_grid(self) -> int:
        return min_grid_size(self.m, self.N)

    def __eq__(self, other):
        if not isinstance(other, LatticeCoeffs):
            return NotImplemented
        return self.m == other.m and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash((self.m, self.coeffs.tobytes()))


@dataclass(frozen=True)
class SymmetryDefect:
    absolute: float
    relative: float


def lattice_frequencies(m: int, N: int) -> np.ndarray:
    return m * np.arange(N) + 1


def min_grid_size(m: int, N: int) -> int:
    """Smallest M for which products of two lattice functions are alias-free."""
    return 2 * (m * (N - 1) + 1) + 2


def default_grid_size(m: int, N: int, oversample: int = 4) -> int:
    """Grid size for nonlinear evaluation: ``m * 2**p`` (or ``2**p``) covering
    ``oversample`` times the top lattice frequency.

    Keeping ``m | M`` makes the node set invariant under rotation by 2*pi/m, so
    pointwise nonlinearities alias only within the symmetry class.
    """
    need = max(oversample * (m * (N - 1) + 1), min_grid_size(m, N), 16)
    base = m
    while base % 2 == 0:
        base //= 2
    M = base
    while M < need:
        M *= 2
    return M


def nodes(M: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(M) / M)


def angles(M: int) -> np.ndarray:
    return 2 * np.pi * np.arange(M) / M


@lru_cache(maxsize=64)
def _freqs(M: int) -> np.ndarray:
    n = np.fft.fftfreq(M, 1.0 / M).round().astype(int)
    n.setflags(write=False)
    return n


@lru_cache(maxsize=64)
def _multipliers(M: int):
    n = _freqs(M)
    nyq = (M % 2 == 0) & (np.abs(n) == M // 2)
    dalpha = 1j * n.astype(complex)
    dalpha[nyq] = 0.0
    hil = -1j * np.sign(n).astype(complex)
    hil[nyq] = 0.0
    cau = (n >= 0).astype(complex)
    cau[nyq] = 0.5
    for arr in (dalpha, hil, cau):
        arr.setflags(write=False)
    return dalpha, hil, cau


def spectrum(g) -> np.ndarray:
    """Fourier coefficients ``fhat_n`` in numpy FFT order."""
    g = np.asarray(g)
    return np.fft.fft(g, axis=-1) / g.shape[-1]


def from_spectrum(fhat) -> np.ndarray:
    fhat = np.asarray(fhat)
    return np.fft.ifft(fhat, axis=-1) * fhat.shape[-1]


def frequencies(M: int) -> np.ndarray:
    """Integer frequency of each FFT slot (Nyquist reported as ``-M/2``)."""
    return _freqs(M)


def to_grid(z: LatticeCoeffs, M: int) -> np.ndarray:
    """Sample ``Z`` on the M circle nodes."""
    if M < min_grid_size(z.m, z.N):
        raise GridTooSmallError(
            f"M={M} cannot resolve {z.N} modes at m={z.m}; need M >= {min_grid_size(z.m, z.N)}"
        )
    fhat = np.zeros(M, dtype=complex)
    fhat[z.frequencies] = z.coeffs
    return from_spectrum(fhat)


def lattice_grid(m: int, N: int, M: int) -> np.ndarray:
    """Rows are the basis functions ``tau**(m n + 1)`` sampled on the grid."""
    return nodes(M)[None, :] ** lattice_frequencies(m, N)[:, None]


def _lattice_mask(m: int, M: int) -> np.ndarray:
    n = _freqs(M)
    return (n >= 1) & ((n - 1) % m == 0)


def project(g, m: int, N: int):
    """Lattice projection of one grid or a stack of grids.

    Returns ``(coeffs, defect_sq, tail_sq, norm_sq)``: the real parts of the
    first ``N`` lattice modes, the squared L2 mass off the symmetry lattice
    (off-lattice modes and imaginary parts of lattice modes), the squared
    mass of lattice modes beyond ``N``, and the squared L2 norm of the input.
    """
    g = np.asarray(g)
    M = g.shape[-1]
    freq = m * (N - 1) + 1
    if 2 * freq >= M:
        raise GridTooSmallError(f"M={M} cannot resolve frequency {freq} alias-free")
    fhat = spectrum(g)
    mask = _lattice_mask(m, M)
    kept = np.zeros(M, dtype=bool)
    kept[lattice_frequencies(m, N)] = True
    coeffs = fhat[..., lattice_frequencies(m, N)].real
    power = np.abs(fhat) ** 2
    off = np.sum(np.where(mask, 0.0, power), axis=-1)
    imag = np.sum(np.where(mask, fhat.imag**2, 0.0), axis=-1)
    tail = np.sum(np.where(mask & ~kept, fhat.real**2, 0.0), axis=-1)
    return coeffs, off + imag, tail, np.sum(power, axis=-1)


def to_coeffs(g, m: int, N: int, strict: bool = False, tol_sym: float = TOL_SYM):
    """Orthogonal projection of a grid function onto the first ``N`` lattice modes.

    Lattice modes above ``N`` are truncated without counting as a symmetry
    defect.
    """
    coeffs, defect_sq, _, norm_sq = project(g, m, N)
    absolute = float(np.sqrt(defect_sq))
    defect = SymmetryDefect(absolute, absolute / max(1.0, float(np.sqrt(norm_sq))))
    if strict and defect.relative > tol_sym:
        raise SymmetryViolationError(
            f"relative symmetry defect {defect.relative:.3e} exceeds {tol_sym:.1e}", defect
        )
    return LatticeCoeffs(m, coeffs), defect


def d_alpha(g) -> np.ndarray:
    """Angular derivative: mode ``tau**n`` -> ``i n tau**n``."""
    g = np.asarray(g)
    return from_spectrum(spectrum(g) * _multipliers(g.shape[-1])[0])


def hilbert(g) -> np.ndarray:
    """Circle Hilbert transform: ``tau**n`` -> ``-i sgn(n) tau**n``."""
    g = np.asarray(g)
    return from_spectrum(spectrum(g) * _multipliers(g.shape[-1])[1])


def cauchy_project(g) -> np.ndarray:
    """Boundary trace of the Cauchy integral: keep modes ``n >= 0``."""
    g = np.asarray(g)
    return from_spectrum(spectrum(g) * _multipliers(g.shape[-1])[2])


def plemelj(g) -> np.ndarray:
    """Boundary values of the Cauchy integral assembled from Avg, f and H f."""
    g = np.asarray(g)
    return 0.5 * circle_average(g)[..., None] + 0.5 * g + 0.5j * hilbert(g)


def circle_average(g):
    return np.mean(np.asarray(g), axis=-1)


def pointwise_algebra(op: str, a, b=None, *, alpha=1.0, tol_floor: float = TOL_FLOOR):
    """Elementwise ``mul``, ``div``, ``conj``, ``abs`` or ``axpy`` (``alpha*a + b``)."""
    a = np.asarray(a)
    if op == "conj":
        return np.conj(a)
    if op == "abs":
        return np.abs(a).astype(complex)
    b = np.asarray(b)
    if a.shape[-1] != b.shape[-1]:
        raise ValueError(f"grid sizes differ: {a.shape[-1]} vs {b.shape[-1]}")
    if op == "mul":
        return a * b
    if op == "axpy":
        return alpha * a + b
    if op == "div":
        floor = float(np.min(np.abs(b)))
        if floor <= tol_floor:
            raise DivisionFloorError(f"divisor magnitude {floor:.3e} below floor {tol_floor:.1e}")
        return a / b
    raise ValueError(f"unknown pointwise op {op!r}")
