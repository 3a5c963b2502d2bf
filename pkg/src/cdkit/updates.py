"""Point-mass measure updates in closed form.

Adding lambda * delta_{z0} to a measure transforms the monic orthogonal
polynomials by a rank-one correction built from the CD kernel:

    X_n(z; dnu) = X_n(z; dmu)
                  - lambda X_n(z0; dmu) K_{n-1}(z0, z; dmu)
                    / (1 + lambda K_{n-1}(z0, z0; dmu)),

and on the unit circle the Verblunsky coefficients move by

    alpha_n(dnu~) = alpha_n(dmu)
                    + rho_n conj(phi_{n+1}(z0)) phi_n^*(z0)
                      / (lambda^{-1} + K_n(z0, z0; dmu)),

where dnu~ = (dmu + lambda delta_{z0}) / (1 + lambda).  Every closed-form
update is double-checked against full recomputation on the atomically
updated measure unless the caller opts out.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._sums import cdot, cfsum, fsum
from .errors import InsufficientAtomsError, MeasureError
from .measures import SupportKind, add_point_mass
from .oprl import stieltjes_recurrence
from .opuc import VerblunskyParams, circle_values, szego_recurrence

_EPS = np.finfo(float).eps


def _existing_mass(mu, z0):
    dist = np.abs(mu.points - z0)
    j = int(np.argmin(dist))
    return float(mu.weights[j]) if dist[j] <= 1e-12 * mu.spread else 0.0


def _check_admissible(mu, z0, lam):
    floor = -_existing_mass(mu, z0)
    if lam < floor - 1e-15 * max(1.0, -floor):
        raise MeasureError("inadmissible lambda %g < -mu({z0}) = %g"
                           % (lam, floor))


@dataclass(frozen=True)
class GeronimusResult:
    """Monic coefficients (monomial basis, ascending) of X_n for the updated
    measure, plus the full-recomputation oracle residual when requested."""

    coefficients: np.ndarray
    n: int
    z0: complex
    lam: float
    oracle_residual: float | None


def _monic_coefficients(mu, n):
    """Monomial coefficients of X_0..X_n and their norms, straight from the
    atoms (coefficient-space Stieltjes / Szego).

    Only n atoms are required: the top polynomial X_n is still well defined
    when the measure has exactly n atoms (it vanishes on all of them and
    norms[n] is ~0), which is exactly the situation of a point-mass update
    anchored one degree past the support.
    """
    if mu.n_atoms < n:
        raise InsufficientAtomsError(
            "degree-%d monic polynomial needs at least %d atoms" % (n, n))
    w = mu.weights
    if mu.support is SupportKind.REAL_LINE:
        x = mu.points
        coeff = np.zeros((n + 1, n + 1))
        vals = np.zeros((n + 1, mu.n_atoms))
        coeff[0, 0] = 1.0
        vals[0] = 1.0
        norms2 = np.zeros(n + 1)
        for k in range(n):
            t = w * vals[k] * vals[k]
            norms2[k] = fsum(t)
            b = fsum(x * t) / norms2[k]
            coeff[k + 1, 1:] = coeff[k, :-1]
            coeff[k + 1] -= b * coeff[k]
            vals[k + 1] = (x - b) * vals[k]
            if k >= 1:
                a_sq = norms2[k] / norms2[k - 1]
                coeff[k + 1] -= a_sq * coeff[k - 1]
                vals[k + 1] -= a_sq * vals[k - 1]
        norms2[n] = fsum(w * vals[n] * vals[n])
        return coeff, np.sqrt(np.maximum(norms2, 0.0))
    z = mu.points
    coeff = np.zeros((n + 1, n + 1), dtype=complex)
    phi = np.zeros((n + 1, mu.n_atoms), dtype=complex)
    star = np.zeros_like(phi)
    coeff[0, 0] = 1.0
    phi[0] = 1.0
    star[0] = 1.0
    norms2 = np.zeros(n + 1)
    for k in range(n):
        norms2[k] = fsum(w * np.abs(phi[k]) ** 2)
        z_phi = z * phi[k]
        alpha_bar = cdot(star[k], z_phi, w) / norms2[k]
        star_coeff = np.zeros(n + 1, dtype=complex)
        star_coeff[:k + 1] = np.conjugate(coeff[k, :k + 1][::-1])
        coeff[k + 1, 1:] = coeff[k, :-1]
        coeff[k + 1] -= alpha_bar * star_coeff
        phi[k + 1] = z_phi - alpha_bar * star[k]
        star[k + 1] = star[k] - np.conjugate(alpha_bar) * z_phi
    norms2[n] = fsum(w * np.abs(phi[n]) ** 2)
    return coeff, np.sqrt(np.maximum(norms2, 0.0))


def geronimus_update(mu, z0, lam, n, check_oracle=True):
    """Monic X_n of mu + lam * delta_{z0}, by the kernel rank-one formula.

    The oracle recomputes the recurrence on the atomically updated measure
    and reports the max coefficient difference (contract: <= 1e-8 * scale
    for n <= 50); pass check_oracle=False to skip it in production paths.
    """
    _check_admissible(mu, z0, lam)
    if mu.support is SupportKind.UNIT_CIRCLE:
        z0 = complex(z0)
    else:
        z0 = float(np.real(z0))
    monic, norms = _monic_coefficients(mu, n)
    if lam == 0.0:
        coeffs = monic[n].copy()
        residual = 0.0 if check_oracle else None
        return GeronimusResult(coeffs, n, z0, lam, residual)

    ortho = monic[:n] / norms[:n, None]   # x_0..x_{n-1}; only K_{n-1} needed
    powers = z0 ** np.arange(n + 1)
    x_at_z0 = ortho @ powers              # x_j(z0), j = 0..n-1
    k_diag = float(np.real(cfsum(np.abs(x_at_z0) ** 2)))
    denom = 1.0 + lam * k_diag
    if abs(denom) <= 1e3 * _EPS:
        raise MeasureError("inadmissible lambda: 1 + lambda K_{n-1} vanished")
    # K_{n-1}(z0, .) as a polynomial: sum_j conj(x_j(z0)) x_j
    kernel_poly = np.conjugate(x_at_z0) @ ortho
    x_n_at_z0 = monic[n] @ powers
    coeffs = monic[n] - (lam * x_n_at_z0 / denom) * kernel_poly

    residual = None
    if check_oracle:
        nu = add_point_mass(mu, z0, lam)
        monic_nu, _ = _monic_coefficients(nu, n)
        residual = float(np.max(np.abs(coeffs - monic_nu[n])))
    return GeronimusResult(np.asarray(coeffs), n, z0, lam, residual)


@dataclass(frozen=True)
class WongResult:
    params: VerblunskyParams
    oracle_residual: float | None


def wong_update(vp, mu, z0, lam, check_oracle=True):
    """Verblunsky coefficients of (dmu + lam delta_{z0}) / (1 + lam).

    Requires a probability measure on the circle and |z0| = 1; lam = 0
    returns the input coefficients exactly.  The oracle runs the Szego
    recursion on the updated atoms (contract: residual <= 1e-8 for
    n <= 30).
    """
    if mu.support is not SupportKind.UNIT_CIRCLE:
        raise MeasureError("Wong update needs a unit-circle measure")
    if abs(mu.mass - 1.0) > 1e-8:
        raise MeasureError("Wong update requires a probability measure "
                           "(mass = %.12g)" % mu.mass)
    z0 = complex(z0)
    if abs(abs(z0) - 1.0) > 1e-9:
        raise MeasureError("z0 must lie on the unit circle")
    _check_admissible(mu, z0, lam)
    n_max = vp.max_degree
    if lam == 0.0:
        return WongResult(vp, 0.0 if check_oracle else None)

    phi, star = circle_values(vp, n_max, np.asarray([z0], dtype=complex))
    phi, star = phi[:, 0], star[:, 0]
    k_cum = np.cumsum(np.abs(phi) ** 2)   # K_n(z0, z0), n = 0..n_max
    rho = vp.rho
    shift = rho * np.conjugate(phi[1:n_max + 1]) * star[:n_max] \
        / (1.0 / lam + k_cum[:n_max])
    alpha_new = vp.alpha + shift
    mass_new = (mu.mass + lam) / (1.0 + lam)
    updated = VerblunskyParams(alpha_new, mass_new, n_max)

    residual = None
    if check_oracle:
        nu = add_point_mass(mu, z0, lam).scaled(1.0 / (1.0 + lam))
        vp_nu = szego_recurrence(nu, n_max)
        residual = float(np.max(np.abs(alpha_new - vp_nu.alpha)))
    return WongResult(updated, residual)


@dataclass(frozen=True)
class DecayFit:
    """Advisory log-linear decay fit over the above-noise window."""

    slope: float
    r_squared: float
    n_points: int

    @property
    def indicates_decay(self):
        return self.n_points >= 4 and self.slope < 0 and self.r_squared >= 0.9


def _fit_decay(ns, diffs, scale):
    # fit only the decaying prefix: once diffs hit the roundoff floor the
    # log-linear model is meaningless, so stop at the first sub-floor diff
    floor = 1e3 * _EPS * scale
    below = np.nonzero(diffs <= floor)[0]
    stop = int(below[0]) if below.size else len(diffs)
    x = np.asarray(ns, dtype=float)[:stop]
    y_raw = diffs[:stop]
    keep = y_raw > 0
    if np.count_nonzero(keep) < 2:
        return DecayFit(slope=0.0, r_squared=0.0,
                        n_points=int(np.count_nonzero(keep)))
    x, y = x[keep], np.log(y_raw[keep])
    slope, intercept = np.polyfit(x, y, 1)
    fit = slope * x + intercept
    ss_res = float(np.sum((y - fit) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return DecayFit(slope=float(slope), r_squared=r2, n_points=int(len(x)))


@dataclass(frozen=True)
class JacobiPointMassReport:
    """Jacobi-side consequences of a point-mass update at x0.

    ``kappa_ratios[n]`` is kappa_n(dnu~)/kappa_n(dmu) with nu~ the
    (1+lambda)-normalized updated measure; for x0 isolated from the
    essential support it converges to (1+lambda)^{1/2} exponentially, and
    the a/b coefficient differences decay geometrically (advisory
    log-linear fit, restricted to diffs above the 100*eps noise floor).
    """

    x0: float
    lam: float
    kappa_ratios: np.ndarray
    kappa_target: float
    a_diffs: np.ndarray
    b_diffs: np.ndarray
    a_fit: DecayFit
    b_fit: DecayFit


def jacobi_pointmass_diffs(jp, mu, x0, lam, n_max):
    """Recompute the recurrence for (mu + lam delta_{x0})/(1 + lam) and report
    kappa ratios against (1 + lambda)^{1/2} plus coefficient differences.

    Both sides are built with full reorthogonalization: tracking
    exponentially small differences at an isolated x0 requires ghost-free
    coefficient streams, and plain discretized Stieltjes re-amplifies the
    lost atom component into spurious spikes by n ~ 40.  The passed ``jp``
    is used for degree validation; the base coefficients are rebuilt.
    """
    if mu.support is not SupportKind.REAL_LINE:
        raise MeasureError("Jacobi point-mass diffs need a real-line measure")
    _check_admissible(mu, x0, lam)
    if n_max > jp.max_degree:
        raise MeasureError("n_max exceeds the base coefficients' maxDegree")
    if lam == 0.0:
        zeros = np.zeros(n_max)
        ones = np.ones(n_max + 1)
        flat = DecayFit(slope=0.0, r_squared=0.0, n_points=0)
        return JacobiPointMassReport(float(x0), 0.0, ones, 1.0, zeros,
                                     zeros.copy(), flat, flat)
    jp_mu = stieltjes_recurrence(mu, n_max, reorthogonalize=True)
    nu = add_point_mass(mu, float(x0), lam).scaled(1.0 / (1.0 + lam))
    jp_nu = stieltjes_recurrence(nu, n_max, reorthogonalize=True)
    ns = np.arange(n_max + 1)
    kappa_ratios = np.exp([jp_nu.log_kappa(n) - jp_mu.log_kappa(n)
                           for n in ns])
    a_diffs = np.abs(jp_nu.a - jp_mu.a)
    b_diffs = np.abs(jp_nu.b - jp_mu.b)
    coeff_ns = np.arange(1, n_max + 1)
    a_fit = _fit_decay(coeff_ns, a_diffs, float(np.max(jp_mu.a)))
    b_fit = _fit_decay(coeff_ns, b_diffs,
                       max(1.0, float(np.max(np.abs(jp_mu.b)))))
    return JacobiPointMassReport(float(x0), float(lam), kappa_ratios,
                                 float(np.sqrt(1.0 + lam)), a_diffs, b_diffs,
                                 a_fit, b_fit)
