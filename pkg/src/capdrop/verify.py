"""Randomized property suites for the operators, residual and Jacobian.

Each suite returns a :class:`SuiteResult`; ``run_suites`` collects them into
the pass/fail matrix printed by ``capdrop verify``.  Random inputs are drawn
from a seeded generator so a run is reproducible.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import residual as res
from . import spectral as sp
from .bifurcation import make_bifurcation_point
from .spectral import LatticeCoeffs

TOL_OP = 1e-12


@dataclass
class SuiteResult:
    name: str
    passed: bool
    worst: float
    tol: float
    trials: int
    seconds: float = 0.0

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"{mark}  {self.name:<20s} worst={self.worst:.3e}  tol={self.tol:.1e}  n={self.trials}"


# ---------------------------------------------------------------------------
# random inputs


def random_trig(rng, M: int, deg: int, freqs=None) -> np.ndarray:
    """Smooth random trigonometric polynomial, frequencies in ``[-deg, deg]``."""
    n = np.arange(-deg, deg + 1) if freqs is None else np.asarray(freqs)
    a = (rng.normal(size=n.size) + 1j * rng.normal(size=n.size)) / (1.0 + np.abs(n)) ** 2
    fhat = np.zeros(M, dtype=complex)
    np.add.at(fhat, n % M, a)
    return sp.from_spectrum(fhat)


def random_holomorphic(rng, M: int, deg: int) -> np.ndarray:
    return random_trig(rng, M, deg, np.arange(0, deg + 1))


def random_map(rng, m: int, N: int, size: float = 0.3) -> LatticeCoeffs:
    """Analytic perturbation of the circle (geometric coefficient decay) with
    ``sum |(m n + 1) a_n| <= size * a_0`` over ``n >= 1``, so ``Z_alpha`` stays
    away from zero on the closed disk."""
    n = np.arange(N)
    a = rng.normal(size=N) * rng.uniform(0.3, 0.7) ** n
    a[0] = 0.0
    weight = np.sum(np.abs(a) * (m * n + 1))
    if weight > 0:
        a *= size * rng.uniform(0.2, 1.0) / weight
    a[0] = 1.0
    a *= rng.uniform(0.5, 2.0)
    return LatticeCoeffs(m, a)


def _err(a, b) -> float:
    scale = max(1.0, float(np.max(np.abs(b))))
    return float(np.max(np.abs(a - b))) / scale


def _suite(name, tol, trials, fn) -> SuiteResult:
    t0 = time.perf_counter()
    worst = 0.0
    for i in range(trials):
        worst = max(worst, fn(i))
    return SuiteResult(name, bool(worst <= tol), worst, tol, trials, time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# operator suites


def plemelj_suite(rng, M=512, trials=100) -> SuiteResult:
    def one(_):
        f = random_trig(rng, M, rng.integers(1, M // 4))
        return _err(sp.plemelj(f), sp.cauchy_project(f))
    return _suite("Plemelj", TOL_OP, trials, one)


def titchmarsh_suites(rng, M=512, trials=100) -> list:
    """For holomorphic ``f``: ``c f = f``, ``c conj f = conj f(0)``,
    ``c Re f = (f + conj f(0))/2`` and ``c (i Im f) = (f - conj f(0))/2``."""
    fs = [random_holomorphic(rng, M, rng.integers(1, M // 4)) for _ in range(trials)]
    f0 = [sp.circle_average(f) for f in fs]
    checks = [
        lambda f, a: _err(sp.cauchy_project(f), f),
        lambda f, a: _err(sp.cauchy_project(np.conj(f)), np.full(M, np.conj(a))),
        lambda f, a: _err(sp.cauchy_project(f.real.astype(complex)), 0.5 * (f + np.conj(a))),
        lambda f, a: _err(sp.cauchy_project(1j * f.imag), 0.5 * (f - np.conj(a))),
    ]
    return [_suite(f"Titchmarsh-{i + 1}", TOL_OP, trials, lambda j, c=c: c(fs[j], f0[j]))
            for i, c in enumerate(checks)]


def _ops():
    # looked up at call time so a patched operator is exercised
    return (sp.d_alpha, sp.cauchy_project, sp.hilbert)


def rotation_suite(rng, M=512, trials=100) -> SuiteResult:
    """Functions with ``f(e^{i a0} tau) = e^{i a0} f(tau)`` (or invariant), ``a0 = 2 pi/m``."""
    def one(_):
        m = int(rng.integers(2, 7))
        MM = m * (M // m)  # rotation by 2 pi/m must map nodes to nodes
        deg = int(rng.integers(1, MM // (4 * m)))
        shift = MM // m
        rot = np.exp(2j * np.pi / m)
        n = m * np.arange(-deg, deg + 1)
        worst = 0.0
        for freqs, factor in ((n + 1, rot), (n, 1.0)):
            f = random_trig(rng, MM, 0, freqs)
            for op in _ops():
                g = op(f)
                worst = max(worst, _err(np.roll(g, -shift), factor * g))
        return worst
    return _suite("rot-sym", TOL_OP, trials, one)


def conjugation_suite(rng, M=512, trials=100) -> SuiteResult:
    """Real coefficients give ``conj f(tau) = f(conj tau)``; imaginary ones the odd version."""
    def flip(g):
        return np.roll(g[::-1], 1)  # g(conj tau_j) = g[-j]

    def one(_):
        deg = int(rng.integers(1, M // 4))
        fhat = np.zeros(M, dtype=complex)
        n = np.arange(-deg, deg + 1)
        fhat[n % M] = rng.normal(size=n.size) / (1.0 + np.abs(n)) ** 2
        f = sp.from_spectrum(fhat)
        worst = 0.0
        # (d_alpha, c, h) on even / odd inputs: signs of conj(op f) vs op f(conj tau)
        for g, signs in ((f, (-1, 1, -1)), (1j * f, (1, -1, 1))):
            for op, sgn in zip(_ops(), signs):
                h = op(g)
                worst = max(worst, _err(np.conj(h), sgn * flip(h)))
        return worst
    return _suite("conj-sym", TOL_OP, trials, one)


def commutation_suite(rng, M=512, trials=100) -> SuiteResult:
    def one(_):
        f = random_trig(rng, M, rng.integers(1, M // 4))
        df = sp.d_alpha(f)
        return max(_err(sp.d_alpha(sp.cauchy_project(f)), sp.cauchy_project(df)),
                   _err(sp.d_alpha(sp.hilbert(f)), sp.hilbert(df)))
    return _suite("d-alpha-commute", TOL_OP, trials, one)


def hilbert_square_suite(rng, M=512, trials=100) -> SuiteResult:
    def one(_):
        f = random_trig(rng, M, rng.integers(1, M // 4))
        return _err(sp.hilbert(sp.hilbert(f)), -f + sp.circle_average(f))
    return _suite("hilbert-square", TOL_OP, trials, one)


# ---------------------------------------------------------------------------
# residual / Jacobian suites


def fd_jacobian_discrepancy(z: LatticeCoeffs, c: float, h: float, M=None) -> float:
    """Max-entry relative difference ``max|J_a - J_fd| / max|J_a|``."""
    Ja = res.jacobian_analytic(z, c, M)
    Jf = res.jacobian_fd(z, c, h, M)
    return float(np.max(np.abs(Ja - Jf)) / np.max(np.abs(Ja)))


def fd_jacobian_suite(rng, N=32, M=512, trials=5, h=1e-5, tol=1e-5) -> SuiteResult:
    def one(_):
        m = int(rng.integers(2, 5))
        z = random_map(rng, m, N)
        return fd_jacobian_discrepancy(z, rng.uniform(0.0, 3.0), h, M)
    return _suite("FD-Jacobian", tol, trials, one)


def trivial_diagonal_suite(rng, N=32, M=512, trials=10, tol=1e-10) -> SuiteResult:
    """At the circle the Jacobian is ``diag(2, -(m^2 n^2 - c^2 m n - 1))`` plus a zero c-column."""
    def one(_):
        m = int(rng.integers(2, 7))
        MM = M if M % m == 0 else sp.default_grid_size(m, N)
        c = rng.uniform(0.0, 3.0)
        J = res.jacobian_analytic(LatticeCoeffs.identity(m, N), c, MM)
        expect = np.zeros((N, N + 1))
        expect[:, :N] = np.diag(res.trivial_linearization(m, N, c))
        return float(np.max(np.abs(J - expect)) / np.max(np.abs(expect)))
    return _suite("trivial-diagonal", tol, trials, one)


def gauss_bonnet_suite(rng, N=32, M=512, trials=20, tol=1e-8) -> SuiteResult:
    """Total turning of a closed convex-or-not simple curve: Avg(kappa |Z_alpha|) = 1."""
    def one(_):
        m = int(rng.integers(2, 5))
        z = random_map(rng, m, N)
        kappa = res.curvature(z, M)
        speed = np.abs(sp.d_alpha(sp.to_grid(z, M)))
        return abs(float(np.mean(kappa * speed)) - 1.0)
    return _suite("Gauss-Bonnet", tol, trials, one)


def bernoulli_avg_suite(rng, N=32, M=512, trials=20, tol=1e-10) -> SuiteResult:
    """``Avg (Phi_alpha)^2 / Z_alpha`` vanishes for any nondegenerate map and speed."""
    def one(_):
        m = int(rng.integers(2, 5))
        z = random_map(rng, m, N)
        return abs(res.potential_diagnostics(z, rng.uniform(0.0, 3.0), M).bernoulli_avg)
    return _suite("bernoulli-avg", tol, trials, one)


# ---------------------------------------------------------------------------
# full-level suites (continuation)


def branch_smoke_suite(steps=10) -> SuiteResult:
    from .continuation import ContinuationConfig, continue_branch

    t0 = time.perf_counter()
    cfg = ContinuationConfig(N=32)
    rec = continue_branch(make_bifurcation_point(2, 1, 32), 1, cfg, steps=steps)
    worst = max(p.residual_norms[0] for p in rec.points)
    ok = rec.status == "max-steps" and len(rec.points) == steps + 1 and worst <= cfg.tol_newton
    return SuiteResult("branch-smoke", ok, worst, cfg.tol_newton, steps, time.perf_counter() - t0)


def refinement_suite(steps=10, tol=1e-8) -> SuiteResult:
    from .continuation import ContinuationConfig, continue_branch, refine

    t0 = time.perf_counter()
    cfg = ContinuationConfig(N=32, ds_max=0.05)
    rec = continue_branch(make_bifurcation_point(2, 1, 32), 1, cfg, steps=steps)
    worst = 0.0
    for p in rec.points[1:]:
        q = refine(p, cfg)
        worst = max(worst, float(np.max(np.abs(q.z.coeffs[: p.z.N] - p.z.coeffs))),
                    float(np.max(np.abs(q.z.coeffs[p.z.N:]), initial=0.0)), abs(q.c - p.c))
    return SuiteResult("refinement-stability", worst <= tol, worst, tol, steps,
                       time.perf_counter() - t0)


def run_suites(full: bool = False, seed: int = 20240611) -> list:
    rng = np.random.default_rng(seed)
    out = [plemelj_suite(rng)]
    out += titchmarsh_suites(rng)
    out += [
        rotation_suite(rng),
        conjugation_suite(rng),
        commutation_suite(rng),
        hilbert_square_suite(rng),
        fd_jacobian_suite(rng, trials=20 if full else 5),
        trivial_diagonal_suite(rng),
        gauss_bonnet_suite(rng),
        bernoulli_avg_suite(rng),
    ]
    if full:
        out += [refinement_suite(), branch_smoke_suite()]
    return out
