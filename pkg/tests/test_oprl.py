import numpy as np
import pytest

from cdkit import (AtomicMeasure, CoarseMeasureError, DegreeError,
                   InsufficientAtomsError, MeasureError, NamedMeasure,
                   SupportKind, eval_polys, inner_product,
                   second_kind_shift_check, stieltjes_recurrence)
from cdkit.oprl import (monic_values, orthonormal_values,
                        orthonormal_values_and_derivs, second_kind_values,
                        wronskian)


def gram_schmidt_recurrence_oracle(mu, n_max):
    """Brute-force oracle: classical Gram-Schmidt on explicit atom vectors."""
    x, w = mu.points, mu.weights
    basis = []
    norms2 = []
    a2, b = [], []
    cur = np.ones_like(x)
    for n in range(n_max + 1):
        norms2.append(np.sum(w * cur * cur))
        basis.append(cur / np.sqrt(norms2[-1]))
        if n >= 1:
            a2.append(norms2[n] / norms2[n - 1])
        if n == n_max:
            break
        nxt = x * cur
        for v in basis:  # project out everything built so far
            nxt = nxt - np.sum(w * v * nxt) * v
        b.append(np.sum(w * basis[-1] * (x * basis[-1])) * 1.0)
        cur = nxt
    return np.sqrt(a2), np.array(b)


def test_chebyshev_recurrence_is_constant(cheb_jp):
    # sin((n+1)theta)/sin(theta) satisfies the recurrence with a = 1, b = 0
    assert np.max(np.abs(cheb_jp.a[:40] - 1.0)) <= 1e-10
    assert np.max(np.abs(cheb_jp.b[:40])) <= 1e-10


def test_uniform_recurrence_against_gram_schmidt(uniform_mu, uniform_jp):
    a_ref, b_ref = gram_schmidt_recurrence_oracle(uniform_mu, 8)
    assert np.max(np.abs(uniform_jp.a[:8] - a_ref)) <= 1e-10
    assert np.max(np.abs(uniform_jp.b[:8] - b_ref)) <= 1e-10
    assert uniform_jp.a[0] ** 2 == pytest.approx(1 / 3, abs=1e-10)
    assert uniform_jp.a[1] ** 2 == pytest.approx(4 / 15, abs=1e-10)


def test_three_atom_recurrence(atoms3_jp):
    assert np.max(np.abs(atoms3_jp.b)) <= 1e-15
    assert atoms3_jp.a[0] ** 2 == pytest.approx(2 / 3, abs=1e-14)
    assert atoms3_jp.a[1] ** 2 == pytest.approx(1 / 3, abs=1e-14)


def test_insufficient_atoms(atoms3):
    with pytest.raises(InsufficientAtomsError):
        stieltjes_recurrence(atoms3, 3)


def test_resolution_policing_for_discretized_measures():
    mu = NamedMeasure.uniform().discretize(64)
    with pytest.raises(InsufficientAtomsError):
        stieltjes_recurrence(mu, 17)  # 64 < 4 * 17
    stieltjes_recurrence(mu, 16)


def test_wrong_support_rejected(lebesgue_mu):
    with pytest.raises(MeasureError):
        stieltjes_recurrence(lebesgue_mu, 4)


def test_collapse_detection_near_duplicate_atoms():
    pts = np.array([0.0, 1e-10, 1.0, 1.0 + 1e-10, 2.0, 2.0 + 1e-10])
    mu = AtomicMeasure(SupportKind.REAL_LINE, pts, np.full(6, 1 / 6))
    with pytest.raises(CoarseMeasureError):
        stieltjes_recurrence(mu, 5)


def test_eval_polys_basics(cheb_jp, uniform_jp):
    ev = eval_polys(cheb_jp, 2, 0.0)
    # p_2(2 cos t) = sin(3t)/sin(t) -> at t = pi/2: -1
    assert ev.p[2] == pytest.approx(-1.0, abs=1e-12)
    assert ev.p[0] == pytest.approx(1.0, abs=1e-15)
    ev_u = eval_polys(uniform_jp, 1, 0.5)
    assert ev_u.p[1] == pytest.approx(0.5 * np.sqrt(3), abs=1e-12)
    assert not ev.overflow


def test_eval_overflow_flag(cheb_jp):
    assert eval_polys(cheb_jp, 220, 60.0).overflow


def test_orthonormality_against_measure(uniform_mu, uniform_jp):
    n = uniform_jp.max_degree // 2
    p = orthonormal_values(uniform_jp, n, uniform_mu.points)
    gram = (p * uniform_mu.weights) @ p.T
    assert np.max(np.abs(gram - np.eye(n + 1))) <= 1e-9


def test_norm_identity(uniform_mu, uniform_jp):
    # ||P_n|| = a_1...a_n mass0^{1/2} vs direct evaluation on the atoms
    pm = monic_values(uniform_jp, 12, uniform_mu.points)
    for n in (1, 5, 12):
        direct = np.sqrt(np.sum(uniform_mu.weights * pm[n] ** 2))
        assert abs(direct - uniform_jp.monic_norm(n)) <= 1e-10 * direct


def test_kappa_matches_leading_coefficient(uniform_jp):
    # p_n = kappa_n x^n + ...: compare against the monic ratio at large x
    ev = eval_polys(uniform_jp, 6, 0.0)
    assert np.all(ev.kappa > 0)
    big = 1e6
    p = orthonormal_values(uniform_jp, 6, np.asarray([big]))[:, 0]
    assert p[6] / big ** 6 == pytest.approx(uniform_jp.kappa(6), rel=1e-9)
    assert p[6] > 0  # positive leading coefficient


def test_three_term_identities_hold(cheb_jp):
    x = 0.37
    n = 20
    p = orthonormal_values(cheb_jp, n + 1, np.asarray([x]))[:, 0]
    pm = monic_values(cheb_jp, n + 1, np.asarray([x]))[:, 0]
    a, b = cheb_jp.a, cheb_jp.b
    for k in range(1, n):
        res = (x * p[k] - (a[k] * p[k + 1] + b[k] * p[k] + a[k - 1] * p[k - 1]))
        assert abs(res) <= 1e-12 * max(1.0, abs(x * p[k]))
        res_m = x * pm[k] - (pm[k + 1] + b[k] * pm[k] + a[k - 1] ** 2 * pm[k - 1])
        assert abs(res_m) <= 1e-12 * max(1.0, abs(x * pm[k]))


def test_second_kind_shift_identity(cheb_jp, uniform_jp):
    # n = 1 is exact by construction
    assert second_kind_shift_check(cheb_jp, 1, 0.123) == 0.0
    q5 = second_kind_values(cheb_jp, 5, np.asarray([0.3]))[5, 0]
    assert second_kind_shift_check(cheb_jp, 5, 0.3) <= 1e-10 * max(1, abs(q5))
    q3 = second_kind_values(uniform_jp, 3, np.asarray([-0.7]))[3, 0]
    assert second_kind_shift_check(uniform_jp, 3, -0.7) \
        <= 1e-10 * max(1, abs(q3))
    with pytest.raises(DegreeError):
        second_kind_shift_check(cheb_jp, cheb_jp.max_degree, 0.0)


def test_wronskian_constant_in_n(cheb_jp):
    vals = [wronskian(cheb_jp, n, 0.7) for n in range(10)]
    assert np.max(np.abs(np.diff(vals))) <= 1e-10
    assert vals[0] == pytest.approx(1.0 / cheb_jp.mass0, abs=1e-12)


def test_derivative_recurrence_against_poly_coefficients(uniform_jp):
    # p'_j from the coupled recurrence vs differentiating the interpolated
    # polynomial through the same values (finite difference oracle)
    x = 0.4
    h = 1e-6
    p_plus = orthonormal_values(uniform_jp, 8, np.asarray([x + h]))[:, 0]
    p_minus = orthonormal_values(uniform_jp, 8, np.asarray([x - h]))[:, 0]
    _, dp = orthonormal_values_and_derivs(uniform_jp, 8, np.asarray([x]))
    fd = (p_plus - p_minus) / (2 * h)
    assert np.max(np.abs(dp[:, 0] - fd)) <= 1e-7 * np.max(np.abs(fd) + 1)


def test_stripped_params(cheb_jp):
    st = cheb_jp.stripped()
    assert st.max_degree == cheb_jp.max_degree - 1
    assert np.array_equal(st.a, cheb_jp.a[1:])
    assert st.mass0 == cheb_jp.mass0


def test_reorthogonalized_build_matches_plain(uniform_mu):
    plain = stieltjes_recurrence(uniform_mu, 40)
    reorth = stieltjes_recurrence(uniform_mu, 40, reorthogonalize=True)
    assert np.max(np.abs(plain.a - reorth.a)) <= 1e-12
    assert np.max(np.abs(plain.b - reorth.b)) <= 1e-12


def test_orthonormality_via_inner_product_coeffs(atoms3, atoms3_jp):
    # cross-check through the polynomial-coefficient inner product path
    from cdkit.kernels import orthonormal_coefficient_matrix
    coeffs = orthonormal_coefficient_matrix(atoms3, 2)
    for j in range(3):
        for k in range(3):
            ip = inner_product(coeffs[j], coeffs[k], atoms3)
            assert abs(ip - (j == k)) <= 1e-12
