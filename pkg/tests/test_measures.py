import math

import numpy as np
import pytest
from scipy.integrate import quad

from cdkit import (AtomicMeasure, MeasureError, NamedMeasure, SupportKind,
                   add_point_mass, cdf, inner_product, moments)


def test_lebesgue_circle_discretization_is_roots_of_unity():
    mu = NamedMeasure.lebesgue_circle().discretize(256)
    assert mu.n_atoms == 256
    assert np.allclose(np.abs(mu.points), 1.0, atol=1e-15)
    assert np.allclose(mu.weights, 1.0 / 256)
    mm = moments(mu, 3)
    assert mm.structure == "toeplitz"
    # discrete orthogonality of roots of unity: identity moments
    assert np.max(np.abs(mm.matrix - np.eye(4))) < 1e-15


def test_uniform_monomial_moments_closed_form():
    mu = NamedMeasure.uniform().discretize(128)
    x = mu.points
    for k in range(13):
        mom = float(np.sum(mu.weights * x ** k))
        expected = 0.0 if k % 2 else 1.0 / (k + 1)
        assert abs(mom - expected) <= 1e-12


def test_chebyshev2_mass_and_second_moment():
    mu = NamedMeasure.chebyshev2().discretize(256)
    assert abs(mu.mass - 1.0) <= 1e-13
    second = float(np.sum(mu.weights * mu.points ** 2))
    # oracle: direct quadrature of the analytic weight
    ref, _ = quad(lambda x: x * x * np.sqrt(4 - x * x) / (2 * np.pi), -2, 2)
    assert abs(ref - 1.0) < 1e-10
    assert abs(second - ref) <= 1e-12


def test_uniform_moment_matrix_n1():
    mu = NamedMeasure.uniform().discretize(128)
    mm = moments(mu, 1)
    assert mm.structure == "hankel"
    assert np.max(np.abs(mm.matrix - [[1, 0], [0, 1 / 3]])) <= 1e-13


def test_three_atom_moment_matrix(atoms3):
    mm = moments(atoms3, 2)
    expected = np.array([[1, 0, 2 / 3], [0, 2 / 3, 0], [2 / 3, 0, 2 / 3]])
    assert np.max(np.abs(mm.matrix - expected)) <= 1e-15


def test_hankel_structure_is_bitwise(uniform_mu):
    mm = moments(uniform_mu, 6)
    for j in range(7):
        for k in range(7):
            # entries with equal j+k are the same float, not just close
            assert mm.matrix[j, k] == mm.matrix[k, j]
            if j >= 1 and k <= 5:
                assert mm.matrix[j, k] == mm.matrix[j - 1, k + 1]


def test_moment_matrix_positive_definite(uniform_mu):
    mm = moments(uniform_mu, 6)
    assert np.min(np.linalg.eigvalsh(mm.matrix)) > 0


def test_jacobi_weight_moments_match_quad_oracle():
    a, b = 0.5, -0.3
    nm = NamedMeasure.jacobi(a, b)
    mu = nm.discretize(256)
    norm = quad(lambda x: (1 - x) ** a * (1 + x) ** b, -1, 1)[0]
    for k in (0, 1, 2, 5):
        ref = quad(lambda x: x ** k * (1 - x) ** a * (1 + x) ** b,
                   -1, 1)[0] / norm
        mom = float(np.sum(mu.weights * mu.points ** k))
        assert abs(mom - ref) <= 1e-10


def test_jacobi_weight_requires_admissible_exponents():
    with pytest.raises(MeasureError):
        NamedMeasure.jacobi(-1.0, 0.0)
    with pytest.raises(MeasureError):
        NamedMeasure.jacobi(0.0, -2.0)


def test_szego_weight_moments():
    # w = 1 + cos(theta): Toeplitz moments m_{jk} = c_{j-k} with
    # c_0 = 1, c_{+-1} = 1/2
    mu = NamedMeasure.szego(1.0, 0.5).discretize(256)
    mm = moments(mu, 3)
    expected = np.zeros((4, 4), dtype=complex)
    for j in range(4):
        for k in range(4):
            d = abs(j - k)
            expected[j, k] = 1.0 if d == 0 else (0.5 if d == 1 else 0.0)
    assert np.max(np.abs(mm.matrix - expected)) <= 1e-14


def test_szego_weight_must_be_positive():
    with pytest.raises(MeasureError):
        NamedMeasure.szego(1.0, 0.8).discretize(128)  # dips negative


def test_moments_converge_as_resolution_doubles():
    nm = NamedMeasure.jacobi(0.3, 0.7)
    for res in (64, 128, 256):
        mu = nm.discretize(res)
        mom = float(np.sum(mu.weights * mu.points ** 6))
        ref = quad(lambda x: x ** 6 * nm.weight_density(x), -1, 1)[0]
        # Gauss discretization is exact to roundoff at every resolution
        assert abs(mom - ref) <= 1e-12


def test_inner_product_basics(uniform_mu, lebesgue_mu):
    assert abs(inner_product([1.0], [1.0], uniform_mu) - 1.0) <= 1e-13
    assert abs(inner_product([1.0], [0.0, 1.0], lebesgue_mu)) <= 1e-15
    assert abs(inner_product([0.0, 1.0], [0.0, 1.0], uniform_mu)
               - 1 / 3) <= 1e-13


def test_inner_product_conjugate_linear_first_slot(lebesgue_mu):
    f = [0.0, 1j]
    g = [0.0, 1.0]
    lhs = inner_product(f, g, lebesgue_mu)
    rhs = np.conjugate(1j) * inner_product([0.0, 1.0], g, lebesgue_mu)
    assert abs(lhs - rhs) <= 1e-14


def test_cdf_atom_measure(atoms3):
    assert cdf(atoms3, 0.0, closed=True) == pytest.approx(2 / 3, abs=1e-15)
    assert cdf(atoms3, 0.0, closed=False) == pytest.approx(1 / 3, abs=1e-15)
    assert cdf(atoms3, 10.0) == pytest.approx(atoms3.mass, abs=1e-15)
    assert cdf(atoms3, -10.0) == 0.0


def test_cdf_monotone_and_converging():
    # an atomic approximation can track a continuous CDF no tighter than
    # half its largest atom; check that bound and that doubling the
    # resolution halves the error
    x0 = 1 / math.sqrt(3)
    target = (1 + x0) / 2
    errs = []
    for res in (256, 512):
        mu = NamedMeasure.uniform().discretize(res)
        err = abs(cdf(mu, x0) - target)
        assert err <= float(np.max(mu.weights))
        errs.append(err)
    assert errs[1] <= errs[0]
    grid = np.linspace(-1.2, 1.2, 41)
    mu = NamedMeasure.uniform().discretize(256)
    vals = [cdf(mu, x) for x in grid]
    assert np.all(np.diff(vals) >= 0)


def test_named_cdf_closed_forms():
    uni = NamedMeasure.uniform()
    assert uni.cdf(1 / math.sqrt(3)) == pytest.approx((1 + 1 / math.sqrt(3)) / 2,
                                                      abs=1e-15)
    ch = NamedMeasure.chebyshev2()
    ref = quad(lambda x: ch.weight_density(x), -2, 0.7)[0]
    assert ch.cdf(0.7) == pytest.approx(ref, abs=1e-10)
    jw = NamedMeasure.jacobi(0.5, -0.3)
    ref = quad(lambda x: jw.weight_density(x), -1, 0.2)[0]
    assert jw.cdf(0.2) == pytest.approx(ref, abs=1e-10)
    withatom = NamedMeasure.uniform().with_atoms((0.5, 0.25))
    assert withatom.cdf(0.5, closed=True) - withatom.cdf(0.5, closed=False) \
        == pytest.approx(0.25, abs=1e-15)


def test_atomic_measure_validation():
    with pytest.raises(MeasureError):
        AtomicMeasure(SupportKind.REAL_LINE, np.array([0.0, 0.0]),
                      np.array([0.5, 0.5]))
    with pytest.raises(MeasureError):
        AtomicMeasure(SupportKind.REAL_LINE, np.array([0.0, 1.0]),
                      np.array([0.5, -0.5]))
    with pytest.raises(MeasureError):
        AtomicMeasure(SupportKind.UNIT_CIRCLE, np.array([0.5 + 0j]),
                      np.array([1.0]))


def test_add_point_mass_merges_and_removes(atoms3):
    grown = add_point_mass(atoms3, 0.0, 1 / 3)
    assert grown.n_atoms == 3
    assert grown.mass == pytest.approx(4 / 3, abs=1e-15)
    removed = add_point_mass(atoms3, 0.0, -1 / 3)
    assert removed.n_atoms == 2
    fresh = add_point_mass(atoms3, 0.5, 0.1)
    assert fresh.n_atoms == 4
    with pytest.raises(MeasureError):
        add_point_mass(atoms3, 0.0, -0.5)
    with pytest.raises(MeasureError):
        add_point_mass(atoms3, 0.25, -0.1)


def test_scaled_measure(atoms3):
    assert atoms3.scaled(2.0).mass == pytest.approx(2.0, abs=1e-15)
    with pytest.raises(MeasureError):
        atoms3.scaled(-1.0)


def test_resolution_floor():
    with pytest.raises(MeasureError):
        NamedMeasure.uniform().discretize(32)


def test_extra_atoms_appended_verbatim():
    nm = NamedMeasure.uniform().with_atoms((1.5, 0.4), (0.25, 0.1))
    mu = nm.discretize(128)
    assert mu.n_atoms == 130
    assert mu.mass == pytest.approx(1.5, abs=1e-13)
    assert nm.mass == pytest.approx(1.5, abs=1e-15)
