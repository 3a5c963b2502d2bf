"""Christoffel-Darboux kernels by independent routes.

K_n(z, zeta) = sum_{j=0}^n conj(x_j(z)) x_j(zeta) can be evaluated as the
direct sum, by the OPRL CD formula

    K_n = a_{n+1} [conj(p_{n+1}(z)) p_n(zeta) - conj(p_n(z)) p_{n+1}(zeta)]
          / (conj(z) - zeta),

by its confluent (real-diagonal) form, or on the circle by either

    K_n = [conj(phi*_{n+1}(z)) phi*_{n+1}(zeta)
           - conj(phi_{n+1}(z)) phi_{n+1}(zeta)] / (1 - conj(z) zeta)

or the degree-n "other form" using (phi_n^*, z phi_n).  Route agreement is a
library contract (relative 1e-10 at moderate n away from confluence).

Also here: Christoffel function and its minimizer, mixed second-kind kernels,
the moment-inverse (ABC) matrices, and the scaled-diagonal derivative.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np

from ._sums import cfsum
from .errors import ConfluentPointsError, DegreeError, IllConditionedError
from .measures import SupportKind, moments
from .oprl import (JacobiParams, monic_values, orthonormal_values,
                   orthonormal_values_and_derivs, second_kind_values,
                   stieltjes_recurrence)
from .opuc import circle_values, szego_recurrence

CONFLUENCE_GUARD = 1e-8


class Route(enum.Enum):
    DIRECT_SUM = "direct_sum"
    CD_FORMULA_REAL = "cd_real"
    CD_FORMULA_CIRCLE = "cd_circle"
    CD_FORMULA_CIRCLE_ALT = "cd_circle_alt"
    CONFLUENT_DIAGONAL = "confluent_diagonal"


@dataclass(frozen=True)
class KernelValue:
    value: complex
    route: Route
    n: int
    z: complex
    zeta: complex

    @property
    def is_diagonal(self):
        return self.z == self.zeta

    @property
    def real(self):
        return float(np.real(self.value))


def kernel_direct(ev_z, ev_zeta, n):
    """Direct compensated sum over an evaluated basis pair.

    Accepts PolyEval (.p) or CirclePolyEval (.phi) pairs evaluated at z and
    zeta to degree >= n; conjugation sits on the z slot.
    """
    xz = ev_z.p if hasattr(ev_z, "p") else ev_z.phi
    xzeta = ev_zeta.p if hasattr(ev_zeta, "p") else ev_zeta.phi
    if len(xz) <= n or len(xzeta) <= n:
        raise DegreeError("basis evaluations shorter than degree %d" % n)
    value = cfsum(np.conjugate(xz[:n + 1]) * xzeta[:n + 1])
    return KernelValue(value, Route.DIRECT_SUM, n, ev_z.x if hasattr(ev_z, "x")
                       else ev_z.z, ev_zeta.x if hasattr(ev_zeta, "x")
                       else ev_zeta.z)


def _point_scale(z, zeta):
    return max(1.0, abs(z), abs(zeta))


def kernel_cd_real(jp, n, z, zeta):
    """OPRL CD formula; requires |conj(z) - zeta| > 1e-8 * scale.

    Raises ConfluentPointsError at (numerically) confluent points; use
    kernel_diag_real on the real diagonal instead.
    """
    if n + 1 > jp.max_degree:
        raise DegreeError("CD formula at degree n needs coefficients to n+1")
    denom = np.conjugate(z) - zeta
    if abs(denom) <= CONFLUENCE_GUARD * _point_scale(z, zeta):
        raise ConfluentPointsError(
            "confluent: |conj(z) - zeta| = %.3e; use kernel_diag_real"
            % abs(denom))
    pts = np.asarray([z, zeta])
    p = orthonormal_values(jp, n + 1, pts)
    num = (np.conjugate(p[n + 1, 0]) * p[n, 1]
           - np.conjugate(p[n, 0]) * p[n + 1, 1])
    return KernelValue(jp.a[n] * num / denom, Route.CD_FORMULA_REAL, n, z, zeta)


def kernel_diag_real(jp, n, x):
    """Confluent CD formula on the real diagonal.

    K_n(x, x) = a_{n+1} [p'_{n+1}(x) p_n(x) - p'_n(x) p_{n+1}(x)] with the
    derivatives propagated through the recurrence.
    """
    if n + 1 > jp.max_degree:
        raise DegreeError("confluent formula at degree n needs n+1")
    x = float(np.real(x))
    p, dp = orthonormal_values_and_derivs(jp, n + 1, np.asarray([x]))
    val = jp.a[n] * (dp[n + 1, 0] * p[n, 0] - dp[n, 0] * p[n + 1, 0])
    return KernelValue(complex(val), Route.CONFLUENT_DIAGONAL, n, x, x)


def kernel_cd_circle(vp, n, z, zeta, alt=False):
    """OPUC CD formula (degree n+1 star pair), or the "other form" (alt=True)
    built from (phi_n^*, z phi_n); both need |1 - conj(z) zeta| > 1e-8.
    """
    denom = 1.0 - np.conjugate(z) * zeta
    if abs(denom) <= CONFLUENCE_GUARD:
        raise ConfluentPointsError(
            "confluent: |1 - conj(z) zeta| = %.3e" % abs(denom))
    pts = np.asarray([z, zeta], dtype=complex)
    if alt:
        phi, star = circle_values(vp, n, pts)
        num = (np.conjugate(star[n, 0]) * star[n, 1]
               - np.conjugate(pts[0] * phi[n, 0]) * (pts[1] * phi[n, 1]))
        route = Route.CD_FORMULA_CIRCLE_ALT
    else:
        if n + 1 > vp.max_degree:
            raise DegreeError("CD formula at degree n needs coefficients to n+1")
        phi, star = circle_values(vp, n + 1, pts)
        num = (np.conjugate(star[n + 1, 0]) * star[n + 1, 1]
               - np.conjugate(phi[n + 1, 0]) * phi[n + 1, 1])
        route = Route.CD_FORMULA_CIRCLE
    return KernelValue(num / denom, route, n, z, zeta)


def kernel_diag_circle(vp, n, z):
    """Diagonal kernel on/off the circle by direct sum.

    On |z| = 1 the CD denominator 1 - |z|^2 vanishes identically, so the
    direct sum is the only route there.
    """
    phi, _ = circle_values(vp, n, np.asarray([z], dtype=complex))
    value = cfsum(np.abs(phi[:, 0]) ** 2)
    return KernelValue(value, Route.DIRECT_SUM, n, z, z)


def christoffel(kdiag):
    """Christoffel function lambda_n(z0) = 1 / K_n(z0, z0) (> 0)."""
    if not kdiag.is_diagonal:
        raise ValueError("christoffel needs an on-diagonal kernel value")
    return 1.0 / kdiag.real


def minimizer_poly(params, n, z0):
    """Coefficients (orthonormal basis) of Q_n(z; z0) = K_n(z0,z)/K_n(z0,z0).

    Q_n(z0) = 1 and the L2(dmu) norm of Q_n equals 1/K_n(z0,z0): it is the
    minimizer of the Christoffel variational problem at z0.
    """
    if isinstance(params, JacobiParams):
        vals = orthonormal_values(params, n, np.asarray([z0]))[:, 0]
    else:
        vals = circle_values(params, n, np.asarray([z0], dtype=complex))[0][:, 0]
    kdiag = cfsum(np.abs(vals) ** 2).real
    return np.conjugate(vals) / kdiag


def mixed_kernels(jp, n, x, y):
    """(K^{(q)}_n, K^{(pq)}_n): second-kind and mixed CD kernels.

    K^{(q)}_n(x,y) = sum conj(q_j(x)) q_j(y) satisfies
    K^{(q)}_n(x,y; dmu) = a_1^{-2} K_{n-1}(x,y; dmu~) with mu~ the stripped
    measure; K^{(pq)}_n(x,y) = sum conj(q_j(x)) p_j(y).
    """
    pts = np.asarray([x, y])
    q = second_kind_values(jp, n, pts)
    p = orthonormal_values(jp, n, pts)
    k_q = cfsum(np.conjugate(q[:, 0]) * q[:, 1])
    k_pq = cfsum(np.conjugate(q[:, 0]) * p[:, 1])
    return k_q, k_pq


# ---------------------------------------------------------------------------
# ABC matrices: the coefficient inverse of the moment matrix
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ABCMatrices:
    """k^(n) with K_n(z,zeta) = sum k_jm conj(z)^m zeta^j, the moment matrix,
    and the triangular orthonormal-coefficient factor with k = a^T conj(a)."""

    k: np.ndarray
    moment: object
    a_triangular: np.ndarray
    residual: float
    cond_proxy: float


def monic_coefficient_matrix_real(jp, n):
    """Rows = monomial coefficients of P_0..P_n (lower triangular, unit diag)."""
    jp.check_degree(n)
    c = np.zeros((n + 1, n + 1))
    c[0, 0] = 1.0
    for k in range(n):
        c[k + 1, 1:] = c[k, :-1]
        c[k + 1] -= jp.b[k] * c[k]
        if k >= 1:
            c[k + 1] -= jp.a[k - 1] ** 2 * c[k - 1]
    return c


def monic_coefficient_matrix_circle(vp, n):
    """Rows = monomial coefficients of Phi_0..Phi_n."""
    vp.check_degree(n)
    c = np.zeros((n + 1, n + 1), dtype=complex)
    c[0, 0] = 1.0
    for k in range(n):
        star = np.zeros(n + 1, dtype=complex)
        star[:k + 1] = np.conjugate(c[k, :k + 1][::-1])  # Phi_k^* coefficients
        c[k + 1, 1:] = c[k, :-1]
        c[k + 1] -= np.conjugate(vp.alpha[k]) * star
    return c


def orthonormal_coefficient_matrix(mu, n):
    """Rows = monomial coefficients of x_0..x_n for the measure's family."""
    mu.require_atoms(n + 1, "degree-%d orthonormal coefficients" % n)
    if n == 0:
        dtype = float if mu.support is SupportKind.REAL_LINE else complex
        return np.array([[mu.mass ** -0.5]], dtype=dtype)
    if mu.support is SupportKind.REAL_LINE:
        jp = stieltjes_recurrence(mu, max(n, 1))
        c = monic_coefficient_matrix_real(jp, n)
        norms = np.array([jp.monic_norm(j) for j in range(n + 1)])
    else:
        vp = szego_recurrence(mu, max(n, 1))
        c = monic_coefficient_matrix_circle(vp, n)
        norms = np.array([vp.monic_norm(j) for j in range(n + 1)])
    return c / norms[:, None]


def abc(mu, n):
    """ABC matrices: k^(n) assembled from orthonormal coefficients inverts the
    moment matrix; acceptance is residual-based (||k m - I||_max).

    For n > 8 the Hankel conditioning makes binary64 results increasingly
    soft; allowed, with a warning.
    """
    if n > 8:
        warnings.warn("abc beyond n = 8 is conditioning-limited in binary64",
                      stacklevel=2)
    a_tri = orthonormal_coefficient_matrix(mu, n)
    k = a_tri.T @ np.conjugate(a_tri)
    mom = moments(mu, n)
    resid_mat = k @ mom.matrix - np.eye(n + 1)
    residual = float(np.max(np.abs(resid_mat)))
    cond_proxy = max(1.0, float(np.max(np.abs(k)))) \
        * max(1.0, float(np.max(np.abs(mom.matrix)))) * (n + 1)
    if residual > 1e-6 * cond_proxy:
        raise IllConditionedError(
            "ABC residual %.3e exceeds 1e-6 * cond proxy %.3e"
            % (residual, cond_proxy))
    return ABCMatrices(k=k, moment=mom, a_triangular=a_tri,
                       residual=residual, cond_proxy=cond_proxy)


def kernel_diag_derivative(jp, n, x0):
    """d/da of (1/n) K_n(x0 + a/n, x0 + a/n) at a = 0, by the exact double sum

        (2 mass0 / n^2) sum_j [ q_j p_j (sum_{k<=j} p_k^2)
                                - p_j^2 (sum_{k<=j} p_k q_k) ]

    evaluated with running prefix sums (all values at x0).  The mass0 factor
    makes the (p, q) pair Wronskian-normalized for non-probability measures.
    The sign convention is fixed against the central-finite-difference oracle
    of the scaled diagonal (see tests); the variation-of-parameters identity
    p'_n = mass0 * sum_{m<n} (p_m q_n - p_n q_m) p_m underlies it.
    """
    if n < 1:
        raise DegreeError("derivative needs n >= 1")
    jp.check_degree(n)
    xa = np.asarray([float(x0)])
    p = orthonormal_values(jp, n, xa)[:, 0]
    q = second_kind_values(jp, n, xa)[:, 0]
    s_pp = np.cumsum(p * p)
    s_pq = np.cumsum(p * q)
    total = np.sum(q * p * s_pp - p * p * s_pq)
    return 2.0 * jp.mass0 * total / n ** 2


def shifted_char_values(jp, n, b, xs):
    """p_n(x) - (b / a_n) p_{n-1}(x): orthonormal-scaled char. polynomial of
    the corner-shifted truncation (monic P_n - b P_{n-1} times kappa_n)."""
    p = orthonormal_values(jp, n, np.atleast_1d(xs))
    if b == 0.0:
        return p[n]
    return p[n] - (b / jp.a[n - 1]) * p[n - 1]


__all__ = [
    "Route", "KernelValue", "ABCMatrices", "kernel_direct", "kernel_cd_real",
    "kernel_diag_real", "kernel_cd_circle", "kernel_diag_circle",
    "christoffel", "minimizer_poly", "mixed_kernels", "abc",
    "monic_coefficient_matrix_real", "monic_coefficient_matrix_circle",
    "orthonormal_coefficient_matrix", "kernel_diag_derivative",
    "shifted_char_values", "monic_values",
]
