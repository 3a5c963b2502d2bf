import numpy as np
import pytest
from scipy.linalg import eigh_tridiagonal

from cdkit import (TruncatedJacobi, atom_mass_bound, cdf, exactness_check,
                   gauss_rule, interlacing_check, markov_stieltjes,
                   markov_stieltjes_interval, spacing_lower_bound_check,
                   zeros_pn, zeros_pn_indexed, zeros_shifted)
from cdkit.oprl import monic_values
from cdkit.quadrature import kernel_diag_values


def catalan(m):
    from math import comb
    return comb(2 * m, m) // (m + 1)


def test_zeros_closed_forms(uniform_jp, cheb_jp, atoms3_jp):
    z = zeros_pn(uniform_jp, 2)
    assert np.max(np.abs(z - [-1 / np.sqrt(3), 1 / np.sqrt(3)])) <= 1e-12
    z5 = zeros_pn(cheb_jp, 5)
    ref = 2 * np.cos(np.arange(5, 0, -1) * np.pi / 6)
    assert np.max(np.abs(z5 - ref)) <= 1e-12
    z3 = zeros_pn(atoms3_jp, 2)
    assert np.max(np.abs(z3 - [-np.sqrt(2 / 3), np.sqrt(2 / 3)])) <= 1e-12


@pytest.mark.parametrize("n", [5, 20, 60])
def test_zeros_match_eigensolver(cheb_jp, uniform_jp, n):
    # independent route: LAPACK tridiagonal eigenvalues
    for jp in (cheb_jp, uniform_jp):
        ref = eigh_tridiagonal(jp.b[:n], jp.a[:n - 1],
                               eigvals_only=True)
        assert np.max(np.abs(zeros_pn(jp, n) - np.sort(ref))) <= 1e-10


def test_zeros_indexed(cheb_jp):
    full = zeros_pn(cheb_jp, 40)
    sel = zeros_pn_indexed(cheb_jp, 40, [0, 7, 21, 39])
    assert np.max(np.abs(sel - full[[0, 7, 21, 39]])) <= 1e-12


def test_residuals_at_zeros(cheb_jp):
    from cdkit.oprl import orthonormal_values
    z = zeros_pn(cheb_jp, 30)
    p = orthonormal_values(cheb_jp, 30, z)[30]
    # local scale: |p'| times the mean spacing
    from cdkit.oprl import orthonormal_values_and_derivs
    _, dp = orthonormal_values_and_derivs(cheb_jp, 30, z)
    scale = np.abs(dp[30]) * (z[-1] - z[0]) / 30
    assert np.max(np.abs(p) / scale) <= 1e-10


def test_characteristic_polynomial_identity(uniform_jp):
    # det(z - J_{n;F}(b)) = P_n(z) - b P_{n-1}(z) at 50 random z
    rng = np.random.default_rng(41)
    for b in (0.0, 0.35, -1.2):
        n = 9
        tj = TruncatedJacobi.from_params(uniform_jp, n, b)
        dense = tj.to_dense()
        zs = rng.uniform(-2, 2, 50)
        pm = monic_values(uniform_jp, n, zs)
        for i, z in enumerate(zs):
            det = np.linalg.det(z * np.eye(n) - dense)
            ref = pm[n, i] - b * pm[n - 1, i]
            assert abs(det - ref) <= 1e-9 * max(1.0, abs(ref))


def test_sturm_count(uniform_jp):
    tj = TruncatedJacobi.from_params(uniform_jp, 8)
    zs = zeros_pn(uniform_jp, 8)
    mid = 0.5 * (zs[3] + zs[4])
    assert tj.count_below(np.asarray([mid]))[0] == 4
    assert tj.count_below(np.asarray([zs[0] - 0.1]))[0] == 0
    assert tj.count_below(np.asarray([zs[-1] + 0.1]))[0] == 8


def test_zeros_shifted(uniform_jp):
    assert np.array_equal(zeros_shifted(uniform_jp, 4, 0.0),
                          zeros_pn(uniform_jp, 4))
    # uniform n = 2, b = 0.1: roots of (x^2 - 1/3) - 0.1 x
    got = zeros_shifted(uniform_jp, 2, 0.1)
    disc = np.sqrt(0.0025 + 1 / 3)
    ref = np.array([0.05 - disc, 0.05 + disc])
    assert np.max(np.abs(got - ref)) <= 1e-12
    # bracketing for both signs of b
    base = zeros_pn(uniform_jp, 6)
    up = zeros_shifted(uniform_jp, 6, 0.5)
    down = zeros_shifted(uniform_jp, 6, -0.5)
    assert np.all(up > base)
    assert np.all(up[:-1] < base[1:])
    assert np.all(down < base)
    assert np.all(down[1:] > base[:-1])
    # infinite corner shift: roots of P_{n-1}
    inf_nodes = zeros_shifted(uniform_jp, 6, np.inf)
    assert np.max(np.abs(inf_nodes - zeros_pn(uniform_jp, 5))) <= 1e-12


def test_gauss_rule_uniform_n2(uniform_jp, uniform_mu):
    rule = gauss_rule(uniform_jp, 2)
    assert np.max(np.abs(rule.nodes - [-1 / np.sqrt(3), 1 / np.sqrt(3)])) \
        <= 1e-12
    assert np.max(np.abs(rule.weights - 0.5)) <= 1e-12
    assert rule.exact_degree == 3
    assert rule.mass == pytest.approx(1.0, abs=1e-13)
    # odd-degree exactness is automatic by symmetry, and within 2n-1
    assert abs(rule.apply(rule.nodes ** 3)) <= 1e-15
    # degree 4 misses: rule gives 2 * (1/2) * (1/9) = 1/9, moment is 1/5
    assert rule.apply(rule.nodes ** 4) == pytest.approx(1 / 9, abs=1e-14)


def test_gauss_rule_weight_kernel_link(cheb_jp):
    # lambda_j = 1/K_{n-1}(x_j, x_j)
    rule = gauss_rule(cheb_jp, 7)
    kd = kernel_diag_values(cheb_jp, 6, rule.nodes)
    assert np.max(np.abs(rule.weights * kd - 1.0)) <= 1e-10


def test_gauss_rule_anchored_cases(uniform_jp):
    # x0 = 0 with n = 2: p_1(0) = 0 is the degenerate anchor, one node
    rule = gauss_rule(uniform_jp, 2, x0=0.0)
    assert rule.provenance.get("degenerate_anchor")
    assert rule.n_nodes == 1
    assert rule.nodes[0] == pytest.approx(0.0, abs=1e-13)
    assert rule.weights[0] == pytest.approx(1.0, abs=1e-12)
    assert rule.exact_degree == 1
    # generic anchor: x0 is a node, exactness drops to 2n-2
    rule2 = gauss_rule(uniform_jp, 4, x0=0.31)
    assert rule2.exact_degree == 6
    assert np.min(np.abs(rule2.nodes - 0.31)) <= 1e-12
    # anchor at a zero of p_n reduces to the b = 0 rule
    top = zeros_pn(uniform_jp, 4)[-1]
    rule3 = gauss_rule(uniform_jp, 4, x0=top)
    assert rule3.exact_degree == 7
    assert np.max(np.abs(rule3.nodes - zeros_pn(uniform_jp, 4))) <= 1e-10


def test_exactness_check_chebyshev(cheb_jp, cheb_mu):
    rule = gauss_rule(cheb_jp, 10)
    errors = exactness_check(rule, cheb_mu, range(22))
    assert np.max(errors[:20]) <= 1e-10
    # also certify against the frozen closed-form moments (Catalan numbers)
    for m in range(10):
        assert rule.apply(rule.nodes ** (2 * m)) \
            == pytest.approx(catalan(m), rel=1e-12)
    # first failure beyond the certificate is at degree 2n = 20
    floor = max(1e-13, 50 * float(np.max(errors[:20])))
    beyond = [d for d in (20, 21) if errors[d] > floor]
    assert beyond and beyond[0] == 20


def test_markov_stieltjes_uniform(uniform_jp, uniform_mu):
    x0 = 1 / np.sqrt(3)
    b = markov_stieltjes(uniform_jp, 2, x0)
    assert b.upper == pytest.approx(1.0, abs=1e-12)
    assert b.lower == pytest.approx(0.5, abs=1e-12)
    true_cdf = (1 + x0) / 2  # ~0.78868
    assert b.upper >= true_cdf >= b.lower
    assert b.gap == pytest.approx(atom_mass_bound(uniform_jp, 2, x0),
                                  abs=1e-12)


@pytest.mark.parametrize("n", [5, 10, 20])
def test_markov_stieltjes_sandwich(cheb_jp, cheb_mu, n):
    for x0 in np.linspace(-1.7, 1.7, 9):
        b = markov_stieltjes(cheb_jp, n, x0)
        closed = cdf(cheb_mu, x0, closed=True)
        open_ = cdf(cheb_mu, x0, closed=False)
        assert b.upper + 1e-9 >= closed >= open_ >= b.lower - 1e-9
        assert b.gap == pytest.approx(atom_mass_bound(cheb_jp, n, x0),
                                      abs=1e-12)


def test_markov_stieltjes_interval(uniform_jp, uniform_mu):
    inner, outer, x_lo, x_hi = markov_stieltjes_interval(uniform_jp, 8, 0.15,
                                                         2, 6)
    mass = cdf(uniform_mu, x_hi, closed=True) - cdf(uniform_mu, x_lo,
                                                    closed=False)
    assert inner - 1e-9 <= mass <= outer + 1e-9


def test_atom_mass_bound(atoms3_jp, cheb_jp, lebesgue_vp):
    # the 3-atom measure: 1/K_2(0,0) equals the atom mass exactly
    assert atom_mass_bound(atoms3_jp, 3, 0.0) == pytest.approx(1 / 3,
                                                               abs=1e-12)
    # chebyshev: no atom at 0, the bound decays like 2/(n+1)
    prev = np.inf
    for n in (11, 21, 51, 101):
        bound = atom_mass_bound(cheb_jp, n, 0.0)
        assert bound == pytest.approx(2 / (n + 1), rel=1e-9)
        assert bound <= prev
        prev = bound
    # circle analog via the diagonal: 1/K_n = 1/(n+1) -> 0
    from cdkit import christoffel, kernel_diag_circle
    lam = christoffel(kernel_diag_circle(lebesgue_vp, 100, np.exp(0.5j)))
    assert lam == pytest.approx(1 / 101, abs=1e-12)


def test_interlacing(cheb_jp, uniform_jp, jacobi_jp):
    for jp in (cheb_jp, uniform_jp, jacobi_jp):
        report = interlacing_check(jp, 20)
        assert report.n_checked == 20
        assert report.min_gap > 0
        assert report.min_sign_margin > 0
    # n=1 vs n=2 for uniform: 0 strictly between the two zeros of p_2
    z1 = zeros_pn(uniform_jp, 1)
    z2 = zeros_pn(uniform_jp, 2)
    assert z2[0] < z1[0] < z2[1]


def test_spacing_lower_bound(cheb_jp, uniform_jp):
    z20 = zeros_pn(cheb_jp, 20)
    gap = z20[10] - z20[9]
    holds, lhs, rhs = spacing_lower_bound_check(cheb_jp, 20, z20[9], z20[10],
                                                delta=gap)
    assert holds and lhs >= rhs
    z10 = zeros_pn(uniform_jp, 10)
    holds, _, _ = spacing_lower_bound_check(uniform_jp, 10, z10[0], z10[-1],
                                            delta=1.2)
    assert holds
    with pytest.raises(ValueError):
        spacing_lower_bound_check(cheb_jp, 20, z20[9], z20[10],
                                  delta=gap / 2)
    with pytest.raises(ValueError):
        spacing_lower_bound_check(cheb_jp, 20, 0.123, 0.456, delta=1.0)


def test_rule_positivity_and_mass(jacobi_jp, jacobi_mu):
    for n in (3, 9, 17):
        rule = gauss_rule(jacobi_jp, n)
        assert np.all(rule.weights > 0)
        assert rule.mass == pytest.approx(jacobi_mu.mass, abs=1e-11)
