"""Newton correction and pseudo-arclength continuation of traveling-wave
branches emanating from the circular drop.

The unknown is ``x = (a_0, ..., a_{N-1}, c)`` in R^{N+1}; the truncated system
``F_N(x) = 0`` has N equations and is closed with one affine constraint
``t . (x - x_prev) = ds``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from . import residual as res
from . import spectral as sp
from .bifurcation import BifurcationPoint
from .errors import CapdropError, DegenerateMapError, NewtonFailure, RankDeficiencyError
from .spectral import LatticeCoeffs

log = logging.getLogger(__name__)

CONTINUING = "continuing"
MAX_STEPS = "max-steps"
C1_BLOWUP = "c1-blowup"
CHORD_ARC_BLOWUP = "chord-arc-blowup"
LOOP_CLOSED = "loop-closed"
NEWTON_FAILURE = "newton-failure"
RANK_DEFICIENT = "rank-deficient"
TERMINAL = (C1_BLOWUP, CHORD_ARC_BLOWUP, LOOP_CLOSED, NEWTON_FAILURE, RANK_DEFICIENT)


@dataclass(frozen=True)
class ContinuationConfig:
    N: int = 64
    M: Optional[int] = None  # None: smallest m*2**p covering 4x the top mode
    tol_newton: float = 1e-11
    max_newton: int = 25
    ds_init: float = 0.01
    ds_min: float = 1e-5
    ds_max: float = 0.1
    c1_max: float = 100.0
    chord_arc_max: float = 100.0
    loop_eps: float = 1e-6
    loop_s_min: float = 0.5
    max_steps: int = 100
    tol_sym: float = sp.TOL_SYM
    tol_floor: float = sp.TOL_FLOOR
    max_cond: float = 1e14
    rank_tol: float = 1e-9

    def __post_init__(self):
        if not self.ds_min <= self.ds_init <= self.ds_max:
            raise ValueError("need ds_min <= ds_init <= ds_max")
        for name in ("tol_newton", "ds_min", "c1_max", "chord_arc_max", "loop_eps",
                     "tol_sym", "tol_floor"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.N < 2:
            raise ValueError("need N >= 2")

    def grid_size(self, m: int) -> int:
        return self.M or sp.default_grid_size(m, self.N)


@dataclass
class SolutionPoint:
    z: LatticeCoeffs
    c: float
    s: float
    diagnostics: res.DiagnosticsReport
    residual_norms: tuple
    newton_iters: int
    tangent: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def state(self) -> np.ndarray:
        return np.append(self.z.coeffs, self.c)


@dataclass
class BranchRecord:
    m: int
    k: int
    sign: int
    points: list = field(default_factory=list)
    status: str = CONTINUING


# ---------------------------------------------------------------------------
# constraints


def fixed_speed(c: float):
    """Constraint row fixing the wave speed."""
    return _Constraint(None, c)


def arclength(tangent, x_prev, ds: float):
    """Affine constraint ``tangent . (x - x_prev) = ds``."""
    return _Constraint(np.asarray(tangent, float), None, np.asarray(x_prev, float), ds)


@dataclass
class _Constraint:
    row: Optional[np.ndarray]
    c_fixed: Optional[float] = None
    x_prev: Optional[np.ndarray] = None
    ds: float = 0.0

    def gradient(self, n: int) -> np.ndarray:
        if self.row is None:
            e = np.zeros(n)
            e[-1] = 1.0
            return e
        return self.row

    def value(self, x: np.ndarray) -> float:
        if self.row is None:
            return x[-1] - self.c_fixed
        return float(self.row @ (x - self.x_prev) - self.ds)


# ---------------------------------------------------------------------------


def make_point(z: LatticeCoeffs, c: float, s: float, iters: int, cfg: ContinuationConfig,
               tangent=None, report=None) -> SolutionPoint:
    M = cfg.grid_size(z.m)
    if report is None:
        report = res.residual_real(z, c, M, tol_floor=cfg.tol_floor, tol_sym=cfg.tol_sym)
    diag = res.diagnostics(z, M, cfg.tol_floor)
    return SolutionPoint(z, float(c), float(s), diag, (report.norm_complex, report.norm_real),
                         iters, tangent)


def newton_correct(z0: LatticeCoeffs, c0: float, constraint, cfg: ContinuationConfig,
                   s: float = 0.0, min_iters: int = 0) -> SolutionPoint:
    """Solve the bordered system ``[F_N(x); g(x)] = 0`` by damped Newton.

    Convergence: sup norm of the projected residual and |g| both at most
    ``tol_newton``, after at least ``min_iters`` updates.
    """
    m, N = z0.m, z0.N
    M = cfg.grid_size(m)
    x = np.append(z0.coeffs, c0)

    def evaluate(x):
        z = LatticeCoeffs(m, x[:-1])
        rep = res.residual_complex(z, x[-1], M, tol_floor=cfg.tol_floor, tol_sym=cfg.tol_sym)
        return z, rep, max(rep.norm_complex, abs(constraint.value(x)))

    z, rep, err = evaluate(x)
    for it in range(cfg.max_newton + 1):
        if err <= cfg.tol_newton and it >= min_iters:
            return make_point(z, x[-1], s, it, cfg, report=rep)
        if it == cfg.max_newton:
            break
        J = res.jacobian_analytic(z, x[-1], M, cfg.tol_floor)
        B = np.vstack([J, constraint.gradient(N + 1)])
        cond = np.linalg.cond(B)
        if not cond < cfg.max_cond:
            raise NewtonFailure(f"bordered Jacobian is singular (cond {cond:.2e})", it, err)
        rhs = np.append(rep.residual.coeffs, constraint.value(x))
        dx = np.linalg.solve(B, -rhs)
        lam = 1.0
        while True:
            try:
                cand = evaluate(x + lam * dx)
            except DegenerateMapError:
                cand = None
            if cand is not None and (cand[2] < err or cand[2] <= cfg.tol_newton or lam < 0.25):
                break
            lam *= 0.5
            if lam < 1.0 / 64:
                raise NewtonFailure("damping failed to reduce the residual", it, err)
        x = x + lam * dx
        z, rep, err = cand
    raise NewtonFailure(f"no convergence in {cfg.max_newton} iterations (residual {err:.2e})",
                        cfg.max_newton, err)


def compute_tangent(p: SolutionPoint, prev_tangent=None, cfg: ContinuationConfig | None = None,
                    seed=None) -> np.ndarray:
    """Unit null vector of the ``N x (N+1)`` Jacobian at ``p``.

    Orientation follows ``prev_tangent`` (or ``seed``).  Where the null space is
    two-dimensional, as at a bifurcation point on the trivial branch, the
    reference direction is projected onto it; this is accepted only when the
    reference already lies in the null space.
    """
    cfg = cfg or ContinuationConfig(N=p.z.N)
    J = res.jacobian_analytic(p.z, p.c, cfg.grid_size(p.z.m), cfg.tol_floor)
    _, svals, vt = np.linalg.svd(J)
    scale = max(svals[0], 1.0)
    # numerical rank of the N x (N+1) matrix
    # the (N+1)-th right singular vector is always null; add numerically null ones
    small = np.count_nonzero(svals < cfg.rank_tol * scale)
    null = vt[J.shape[0] - small:]
    ref = prev_tangent if prev_tangent is not None else seed
    if null.shape[0] == 1:
        t = null[0]
        if ref is not None and t @ ref < 0:
            t = -t
        return t
    if ref is None:
        raise RankDeficiencyError(f"null space has dimension {null.shape[0]}; no reference direction")
    ref = np.asarray(ref, float)
    proj = null.T @ (null @ ref)
    if np.linalg.norm(proj) < 0.999 * np.linalg.norm(ref):
        raise RankDeficiencyError(
            f"null space has dimension {null.shape[0]} at s={p.s:.4g}; branch point not treated"
        )
    return proj / np.linalg.norm(proj)


def _segment_distance(a, b, p) -> float:
    d = b - a
    dd = d @ d
    t = 0.0 if dd == 0 else float(np.clip((p - a) @ d / dd, 0.0, 1.0))
    return float(np.linalg.norm(a + t * d - p))


def classify_alternative(points, cfg: ContinuationConfig) -> str:
    """Status after the last point of a branch prefix."""
    p = points[-1]
    if p.diagnostics.c1_norm > cfg.c1_max:
        return C1_BLOWUP
    if p.diagnostics.chord_arc > cfg.chord_arc_max:
        return CHORD_ARC_BLOWUP
    if len(points) >= 3 and p.s > cfg.loop_s_min:
        first = points[1]
        dist = _segment_distance(points[-2].state, p.state, first.state)
        if dist < cfg.loop_eps:
            if p.tangent is None or first.tangent is None:
                return LOOP_CLOSED
            if float(p.tangent @ first.tangent) > 0.99:
                return LOOP_CLOSED
    return CONTINUING


def trivial_point(bp: BifurcationPoint, cfg: ContinuationConfig, direction: int = 1) -> SolutionPoint:
    z0 = LatticeCoeffs.identity(bp.m, bp.N)
    t = np.zeros(bp.N + 1)
    t[bp.k] = float(direction)
    return make_point(z0, bp.c, 0.0, 0, cfg, tangent=t)


def continue_branch(bp: BifurcationPoint, direction: int, cfg: ContinuationConfig,
                    steps: Optional[int] = None,
                    on_point: Optional[Callable[[SolutionPoint], None]] = None) -> BranchRecord:
    """Predictor-corrector continuation from the bifurcation point ``bp``.

    Euler predictor along the tangent, Newton corrector on the arclength
    constraint.  The step halves on a failed correction and grows by 1.3 after
    quick (at most 3 iteration) convergence.  ``on_point`` sees each accepted
    point as it is produced (incremental persistence).
    """
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    if bp.N != cfg.N:
        raise ValueError(f"bifurcation point has N={bp.N}, config has N={cfg.N}")
    steps = cfg.max_steps if steps is None else steps
    record = BranchRecord(bp.m, bp.k, direction)
    p = trivial_point(bp, cfg, direction)
    record.points.append(p)
    if on_point:
        on_point(p)
    ds = cfg.ds_init
    while len(record.points) - 1 < steps:
        t = p.tangent
        try:
            q = _corrected_step(p, ds, cfg)
        except (NewtonFailure, CapdropError) as exc:
            log.debug("step ds=%.3g rejected: %s", ds, exc)
            if ds / 2 < cfg.ds_min:
                record.status = NEWTON_FAILURE
                return record
            ds /= 2
            continue
        try:
            q.tangent = compute_tangent(q, t, cfg)
        except RankDeficiencyError as exc:
            log.info("stopping at s=%.4g: %s", q.s, exc)
            record.points.append(q)
            if on_point:
                on_point(q)
            record.status = RANK_DEFICIENT
            return record
        record.points.append(q)
        if on_point:
            on_point(q)
        p = q
        status = classify_alternative(record.points, cfg)
        if status != CONTINUING:
            record.status = status
            return record
        if q.newton_iters <= 3:
            ds = min(ds * 1.3, cfg.ds_max)
    record.status = MAX_STEPS
    return record


def _corrected_step(p: SolutionPoint, ds: float, cfg: ContinuationConfig) -> SolutionPoint:
    x_prev, t = p.state, p.tangent
    guess = x_prev + ds * t
    z = LatticeCoeffs(p.z.m, guess[:-1])
    return newton_correct(z, guess[-1], arclength(t, x_prev, ds), cfg, s=p.s + ds)


def correct_at_amplitude(bp: BifurcationPoint, amplitude: float, cfg: ContinuationConfig,
                         guess: Optional[tuple] = None) -> SolutionPoint:
    """Branch point whose kernel coefficient equals ``amplitude`` (valid while
    the kernel coefficient still parametrizes the branch)."""
    if guess is None:
        z = LatticeCoeffs(bp.m, LatticeCoeffs.identity(bp.m, bp.N).coeffs + amplitude * bp.kernel.coeffs)
        c = bp.c
    else:
        z, c = guess
    t = np.zeros(bp.N + 1)
    t[bp.k] = 1.0
    x0 = np.append(LatticeCoeffs.identity(bp.m, bp.N).coeffs, bp.c)
    return newton_correct(z, c, arclength(t, x0, amplitude), cfg, s=amplitude)


def refine(p: SolutionPoint, cfg: ContinuationConfig, factor: int = 2):
    """Re-correct ``p`` with ``factor`` times the modes and grid points, holding
    the kernel-independent arclength constraint through the same state."""
    N2 = p.z.N * factor
    M2 = cfg.grid_size(p.z.m) * factor
    cfg2 = replace(cfg, N=N2, M=M2)
    z = p.z.resized(N2)
    t = np.zeros(N2 + 1)
    if p.tangent is not None:
        t[: p.z.N] = p.tangent[:-1]
        t[-1] = p.tangent[-1]
    else:
        t[-1] = 1.0
    x0 = np.append(z.coeffs, p.c)
    return newton_correct(z, p.c, arclength(t, x0, 0.0), cfg2, s=p.s, min_iters=1)
