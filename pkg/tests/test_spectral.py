import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from capdrop import spectral as sp
from capdrop.errors import DivisionFloorError, GridTooSmallError, SymmetryViolationError
from capdrop.spectral import LatticeCoeffs
from capdrop.verify import random_holomorphic, random_trig


def tau(M, n=1):
    return sp.nodes(M) ** n


# ---------------------------------------------------------------- to_grid


def test_identity_map_samples_nodes():
    g = sp.to_grid(LatticeCoeffs(2, [1.0]), 8)
    np.testing.assert_allclose(g, np.exp(2j * np.pi * np.arange(8) / 8), atol=1e-15)


def test_single_lattice_mode():
    g = sp.to_grid(LatticeCoeffs(2, [0.0, 1.0]), 16)
    np.testing.assert_allclose(g, np.exp(3j * 2 * np.pi * np.arange(16) / 16), atol=1e-14)


def test_direct_summation_and_round_trip():
    z = LatticeCoeffs(3, [1.0, 0.1])
    a = sp.angles(32)
    np.testing.assert_allclose(sp.to_grid(z, 32), np.exp(1j * a) + 0.1 * np.exp(4j * a), atol=1e-14)
    back, defect = sp.to_coeffs(sp.to_grid(z, 32), 3, 2)
    np.testing.assert_allclose(back.coeffs, [1.0, 0.1], atol=1e-13)
    assert defect.absolute < 1e-13


def test_grid_too_small():
    with pytest.raises(GridTooSmallError):
        sp.to_grid(LatticeCoeffs(2, np.ones(8)), 16)


def test_lattice_coeffs_validation():
    with pytest.raises(ValueError):
        LatticeCoeffs(1, [1.0])
    with pytest.raises(ValueError):
        LatticeCoeffs(2, [np.nan])
    z = LatticeCoeffs(2, [1.0, 2.0])
    with pytest.raises(ValueError):
        z.coeffs[0] = 3.0
    assert z == LatticeCoeffs(2, [1.0, 2.0]) and hash(z) == hash(LatticeCoeffs(2, [1.0, 2.0]))
    assert z.resized(4).coeffs.tolist() == [1.0, 2.0, 0.0, 0.0]


def test_default_grid_is_multiple_of_m():
    for m in range(2, 7):
        for N in (4, 17, 32, 64):
            M = sp.default_grid_size(m, N)
            assert M % m == 0 and M >= 4 * (m * (N - 1) + 1)


# ---------------------------------------------------------------- to_coeffs


def test_to_coeffs_identity():
    z, d = sp.to_coeffs(tau(16), 2, 4)
    np.testing.assert_allclose(z.coeffs, [1, 0, 0, 0], atol=1e-15)
    assert d.absolute < 1e-15


def test_to_coeffs_off_lattice_strict():
    with pytest.raises(SymmetryViolationError) as info:
        sp.to_coeffs(tau(16, 2), 2, 4, strict=True)
    assert info.value.defect.relative > 0.5


def test_to_coeffs_tiny_imaginary_part_accepted():
    z, d = sp.to_coeffs((1 + 1e-15j) * tau(32), 2, 4, strict=True)
    assert z.coeffs[0] == pytest.approx(1.0)
    assert 1e-16 < d.relative < 1e-14


def test_tail_is_not_defect():
    g = sp.to_grid(LatticeCoeffs(2, [1.0, 0.0, 0.0, 0.5]), 64)
    coeffs, defect_sq, tail_sq, _ = sp.project(g, 2, 2)
    assert defect_sq < 1e-28 and tail_sq == pytest.approx(0.25)


# ---------------------------------------------------------------- operators


def test_d_alpha_examples():
    M = 32
    np.testing.assert_allclose(sp.d_alpha(tau(M, 3)), 3j * tau(M, 3), atol=1e-13)
    np.testing.assert_allclose(sp.d_alpha(np.ones(M)), 0, atol=1e-15)
    np.testing.assert_allclose(sp.d_alpha(tau(M, -2)), -2j * tau(M, -2), atol=1e-13)


def test_cauchy_examples():
    M = 32
    np.testing.assert_allclose(sp.cauchy_project(tau(M, 2)), tau(M, 2), atol=1e-14)
    np.testing.assert_allclose(sp.cauchy_project(tau(M, -1)), 0, atol=1e-15)
    f = 0.3 + 2j * tau(M) - tau(M, 4)
    np.testing.assert_allclose(sp.cauchy_project(np.conj(f)), np.full(M, 0.3), atol=1e-14)


def test_hilbert_examples():
    M = 32
    np.testing.assert_allclose(sp.hilbert(tau(M, 3)), -1j * tau(M, 3), atol=1e-14)
    np.testing.assert_allclose(sp.hilbert(tau(M, -2)), 1j * tau(M, -2), atol=1e-14)
    np.testing.assert_allclose(sp.hilbert(np.ones(M)), 0, atol=1e-15)


def test_nyquist_conventions():
    M = 16
    nyq = tau(M, M // 2)
    np.testing.assert_allclose(sp.d_alpha(nyq), 0, atol=1e-13)
    np.testing.assert_allclose(sp.hilbert(nyq), 0, atol=1e-13)
    np.testing.assert_allclose(sp.cauchy_project(nyq), 0.5 * nyq, atol=1e-13)


def test_circle_average_examples():
    M = 32
    assert sp.circle_average(np.full(M, 5 + 1j)) == pytest.approx(5 + 1j)
    for n in (1, -3, 31, -31):
        assert abs(sp.circle_average(tau(M, n))) < 1e-14
    assert sp.circle_average(np.abs(tau(M)) ** 2) == pytest.approx(1.0)


def test_pointwise_algebra():
    M = 16
    np.testing.assert_allclose(sp.pointwise_algebra("mul", tau(M), tau(M, -1)), 1, atol=1e-15)
    np.testing.assert_allclose(sp.pointwise_algebra("abs", 1j * tau(M)), 1, atol=1e-15)
    np.testing.assert_allclose(sp.pointwise_algebra("axpy", tau(M), tau(M), alpha=2.0), 3 * tau(M))
    b = np.ones(M, dtype=complex)
    b[3] = 1e-16
    with pytest.raises(DivisionFloorError):
        sp.pointwise_algebra("div", np.ones(M), b)
    with pytest.raises(ValueError):
        sp.pointwise_algebra("mul", np.ones(4), np.ones(8))


def test_operators_act_on_stacks():
    rng = np.random.default_rng(0)
    stack = np.array([random_trig(rng, 64, 10) for _ in range(3)])
    for op in (sp.d_alpha, sp.hilbert, sp.cauchy_project, sp.plemelj):
        out = op(stack)
        for i in range(3):
            np.testing.assert_allclose(out[i], op(stack[i]), atol=1e-14)


# ---------------------------------------------------------------- properties

seeds = st.integers(0, 2**32 - 1)
grids = st.sampled_from([64, 96, 128, 256])


@settings(max_examples=60, deadline=None)
@given(m=st.integers(2, 6), coeffs=st.lists(st.floats(-2, 2), min_size=1, max_size=12),
       extra=st.integers(0, 64))
def test_round_trip(m, coeffs, extra):
    z = LatticeCoeffs(m, coeffs)
    M = z.min_grid() + extra
    back, defect = sp.to_coeffs(sp.to_grid(z, M), m, z.N)
    assert np.max(np.abs(back.coeffs - z.coeffs)) <= 1e-13
    assert defect.absolute <= 1e-13


@settings(max_examples=50, deadline=None)
@given(seed=seeds, M=grids)
def test_plemelj_identity(seed, M):
    f = random_trig(np.random.default_rng(seed), M, M // 2 - 1)
    np.testing.assert_allclose(sp.plemelj(f), sp.cauchy_project(f), atol=1e-13)


@settings(max_examples=50, deadline=None)
@given(seed=seeds, M=grids)
def test_titchmarsh(seed, M):
    f = random_holomorphic(np.random.default_rng(seed), M, M // 4)
    f0 = sp.circle_average(f)
    np.testing.assert_allclose(sp.cauchy_project(f), f, atol=1e-13)
    np.testing.assert_allclose(sp.cauchy_project(np.conj(f)), np.conj(f0), atol=1e-13)
    np.testing.assert_allclose(sp.cauchy_project(f.real.astype(complex)), 0.5 * (f + np.conj(f0)),
                               atol=1e-13)
    np.testing.assert_allclose(sp.cauchy_project(1j * f.imag), 0.5 * (f - np.conj(f0)), atol=1e-13)


@settings(max_examples=50, deadline=None)
@given(seed=seeds, M=grids)
def test_hilbert_squares_to_minus_identity_on_mean_zero(seed, M):
    f = random_trig(np.random.default_rng(seed), M, M // 4)
    np.testing.assert_allclose(sp.hilbert(sp.hilbert(f)), -f + sp.circle_average(f), atol=1e-13)


@settings(max_examples=50, deadline=None)
@given(seed=seeds, M=grids)
def test_commutation_with_d_alpha(seed, M):
    f = random_trig(np.random.default_rng(seed), M, M // 4)
    for op in (sp.cauchy_project, sp.hilbert):
        np.testing.assert_allclose(sp.d_alpha(op(f)), op(sp.d_alpha(f)), atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, m=st.integers(2, 6))
def test_rotation_equivariance(seed, m):
    rng = np.random.default_rng(seed)
    M = 48 * m
    n = m * np.arange(-5, 6)
    f = random_trig(rng, M, 0, n + 1)
    rot = np.exp(2j * np.pi / m)
    for op in (sp.d_alpha, sp.cauchy_project, sp.hilbert):
        g = op(f)
        np.testing.assert_allclose(np.roll(g, -(M // m)), rot * g, atol=1e-13)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, M=grids)
def test_conjugation_equivariance(seed, M):
    rng = np.random.default_rng(seed)
    n = np.arange(-20, 21)
    fhat = np.zeros(M, dtype=complex)
    fhat[n % M] = rng.normal(size=n.size)
    f = sp.from_spectrum(fhat)

    def flip(g):
        return np.roll(g[::-1], 1)

    np.testing.assert_allclose(np.conj(f), flip(f), atol=1e-13)
    np.testing.assert_allclose(np.conj(sp.d_alpha(f)), -flip(sp.d_alpha(f)), atol=1e-12)
    np.testing.assert_allclose(np.conj(sp.cauchy_project(f)), flip(sp.cauchy_project(f)), atol=1e-13)
    np.testing.assert_allclose(np.conj(sp.hilbert(f)), -flip(sp.hilbert(f)), atol=1e-13)


@settings(max_examples=30, deadline=None)
@given(m=st.integers(2, 5), coeffs=st.lists(st.floats(-0.2, 0.2), min_size=1, max_size=10))
def test_aliasing_stays_in_rotation_class(m, coeffs):
    # with m | M, aliased frequencies keep their residue mod m
    z = LatticeCoeffs(m, [1.0] + coeffs)
    M = sp.default_grid_size(m, z.N)
    g = sp.to_grid(z, M)
    h = g**3 * np.conj(g) ** 2 * np.abs(g)
    fhat = sp.spectrum(h)
    off = (sp.frequencies(M) - 1) % m != 0
    assert np.max(np.abs(fhat[off])) < 1e-13 * np.max(np.abs(fhat))
