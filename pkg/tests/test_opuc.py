import numpy as np
import pytest

from cdkit import (AtomicMeasure, CoarseMeasureError, InsufficientAtomsError,
                   MeasureError, NamedMeasure, SupportKind, eval_circle_polys,
                   szego_recurrence)
from cdkit.opuc import circle_values, monic_circle_values


def toeplitz_gram_schmidt_oracle(coeffs, n_max):
    """Monic OPUC coefficients from the Toeplitz moment matrix directly.

    coeffs are the analytic Fourier coefficients c_k of the weight
    (m_{jk} = c_{j-k}, c_{-k} = conj(c_k)); solves the orthogonality
    conditions <z^j, Phi_n> = 0 row by row and reads alpha off
    alpha_{n-1} = -conj(Phi_n(0)).
    """
    def c(k):
        if abs(k) >= len(coeffs):
            return 0.0
        return coeffs[k] if k >= 0 else np.conjugate(coeffs[-k])

    alphas = []
    for n in range(1, n_max + 1):
        m = np.array([[c(k - j) for k in range(n + 1)] for j in range(n + 1)],
                     dtype=complex)
        rhs = -m[:n, n]
        low = np.linalg.solve(m[:n, :n], rhs)
        alphas.append(-np.conjugate(low[0]))
    return np.array(alphas)


def test_lebesgue_alphas_vanish(lebesgue_vp):
    assert np.max(np.abs(lebesgue_vp.alpha)) <= 1e-12


def test_point_mass_alphas(pointmass_circle_vp):
    n = np.arange(pointmass_circle_vp.max_degree)
    assert np.max(np.abs(pointmass_circle_vp.alpha - 1 / (n + 2))) <= 1e-8


def test_szego_cos_weight_alphas(szego_cos_vp):
    # oracle: Gram-Schmidt on the Toeplitz moments c_0 = 1, c_1 = 1/2
    ref = toeplitz_gram_schmidt_oracle([1.0, 0.5], 10)
    got = szego_cos_vp.alpha[:10]
    assert np.max(np.abs(got.imag)) <= 1e-10  # real weight, real alphas
    assert np.max(np.abs(got - ref)) <= 1e-8 * np.max(np.abs(ref))
    # closed form for |1 + z|^2-type weights: alpha_n = (-1)^n/(n+2)
    n = np.arange(10)
    assert np.max(np.abs(got.real - (-1.0) ** n / (n + 2))) <= 1e-10


def test_rho_and_norm_identity(pointmass_circle_mu, pointmass_circle_vp):
    vp = pointmass_circle_vp
    assert np.all(np.abs(vp.alpha) < 1)
    assert np.max(np.abs(vp.rho - np.sqrt(1 - np.abs(vp.alpha) ** 2))) == 0.0
    # ||Phi_n||^2 = rho_0^2...rho_{n-1}^2 * mass against the atoms
    mu = pointmass_circle_mu
    monic, _ = monic_circle_values(vp, 12, mu.points)
    for n in (1, 5, 12):
        direct = np.sqrt(np.sum(mu.weights * np.abs(monic[n]) ** 2))
        assert abs(direct - vp.monic_norm(n)) <= 1e-10 * direct


def test_eval_trivial_cases(lebesgue_vp):
    theta = 0.813
    z = np.exp(1j * theta)
    ev = eval_circle_polys(lebesgue_vp, 8, z)
    expected = np.exp(1j * np.arange(9) * theta)
    assert np.max(np.abs(ev.phi - expected)) <= 1e-12
    assert np.max(np.abs(ev.phi_star - 1.0)) <= 1e-12
    ev0 = eval_circle_polys(lebesgue_vp, 0, 0.3 + 0.1j)
    assert ev0.phi[0] == pytest.approx(1.0)
    assert ev0.phi_star[0] == pytest.approx(1.0)


def test_star_conjugation_identity(pointmass_circle_vp):
    # Phi_n^*(z) = z^n conj(Phi_n(1/conj(z))) at 100 random z, every n
    rng = np.random.default_rng(3)
    zs = rng.uniform(0.4, 1.4, 100) * np.exp(2j * np.pi * rng.random(100))
    n = 30
    monic, star = monic_circle_values(pointmass_circle_vp, n, zs)
    monic_refl, _ = monic_circle_values(pointmass_circle_vp, n,
                                        1.0 / np.conjugate(zs))
    for k in range(n + 1):
        ref = zs ** k * np.conjugate(monic_refl[k])
        assert np.max(np.abs(star[k] - ref) / np.maximum(np.abs(ref), 1.0)) \
            <= 1e-12


def test_star_modulus_on_circle(szego_cos_vp):
    theta = np.linspace(0, 2 * np.pi, 17)[:-1]
    zs = np.exp(1j * theta)
    phi, star = circle_values(szego_cos_vp, 25, zs)
    assert np.max(np.abs(np.abs(star[25]) - np.abs(phi[25]))) <= 1e-12


def test_szego_recursion_residual(pointmass_circle_vp):
    # z phi_n = rho_n phi_{n+1} + conj(alpha_n) phi_n^*
    rng = np.random.default_rng(11)
    zs = rng.uniform(0.5, 1.3, 20) * np.exp(2j * np.pi * rng.random(20))
    vp = pointmass_circle_vp
    phi, star = circle_values(vp, 21, zs)
    for n in (0, 3, 10, 20):
        lhs = zs * phi[n]
        rhs = vp.rho[n] * phi[n + 1] + np.conjugate(vp.alpha[n]) * star[n]
        scale = np.maximum(np.abs(lhs), 1.0)
        assert np.max(np.abs(lhs - rhs) / scale) <= 1e-12


def test_orthonormality_against_measure(szego_cos_mu, szego_cos_vp):
    n = 40
    phi, _ = circle_values(szego_cos_vp, n, szego_cos_mu.points)
    gram = (phi * szego_cos_mu.weights) @ np.conjugate(phi.T)
    assert np.max(np.abs(gram - np.eye(n + 1))) <= 1e-9


def test_errors():
    real_mu = NamedMeasure.uniform().discretize(128)
    with pytest.raises(MeasureError):
        szego_recurrence(real_mu, 4)
    few = NamedMeasure.lebesgue_circle().discretize(64)
    with pytest.raises(InsufficientAtomsError):
        szego_recurrence(few, 9)  # 64 < 8 * 9


def test_exhausted_discretization_flags_alpha_near_one():
    # three near-duplicate pairs on the circle: the degree-4/5 polynomials
    # collapse and |alpha| runs into 1
    base = np.exp(1j * np.array([0.0, 2.1, 4.2]))
    eps = 1e-9
    pts = np.concatenate([base, base * np.exp(1j * eps)])
    mu = AtomicMeasure(SupportKind.UNIT_CIRCLE, pts, np.full(6, 1 / 6))
    with pytest.raises(CoarseMeasureError):
        szego_recurrence(mu, 5)
