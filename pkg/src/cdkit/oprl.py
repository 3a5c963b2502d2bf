"""Orthogonal polynomials on the real line.

Builds three-term recurrence coefficients from an atomic measure by the
discretized Stieltjes procedure and evaluates orthonormal, monic and
second-kind polynomials by forward recurrence.

Indexing: ``a[i]``, ``b[i]`` hold the 1-indexed recurrence coefficients
a_{i+1}, b_{i+1} of

    x p_n = a_{n+1} p_{n+1} + b_{n+1} p_n + a_n p_{n-1}

with p_{-1} = 0 and p_0 = mass0^{-1/2}.  The monic family obeys
P_{n+1} = (x - b_{n+1}) P_n - a_n^2 P_{n-1} and the second-kind family uses
the same recurrence started from q_0 = 0, q_1 = (a_1 sqrt(mass0))^{-1}.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._sums import fsum
from .errors import (CoarseMeasureError, DegreeError, InsufficientAtomsError,
                     MeasureError)
from .measures import SupportKind

_EPS = np.finfo(float).eps
_OVERFLOW_LIMIT = 1e300


@dataclass(frozen=True)
class JacobiParams:
    """OPRL recurrence coefficients {a_n > 0, b_n in R} up to degree maxDegree.

    ``mass0`` is the total mass of the generating measure; leading
    coefficients are kept in log form (kappa_n = (a_1...a_n)^{-1}
    mass0^{-1/2} under/overflows well before n ~ 1e4 otherwise).
    """

    a: np.ndarray
    b: np.ndarray
    mass0: float
    max_degree: int
    _log_a_cumsum: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if a.shape != (self.max_degree,) or b.shape != (self.max_degree,):
            raise ValueError("need exactly max_degree coefficients a and b")
        if np.any(a <= 0):
            raise ValueError("off-diagonal coefficients a_n must be positive")
        if self.mass0 <= 0:
            raise ValueError("mass0 must be positive")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        csum = np.concatenate([[0.0], np.cumsum(np.log(a))])
        csum.setflags(write=False)
        object.__setattr__(self, "_log_a_cumsum", csum)

    def check_degree(self, n):
        if not 0 <= n <= self.max_degree:
            raise DegreeError("degree %d outside stored range 0..%d"
                              % (n, self.max_degree))

    def log_kappa(self, n):
        """log of the leading coefficient of p_n."""
        self.check_degree(n)
        return -self._log_a_cumsum[n] - 0.5 * np.log(self.mass0)

    def kappa(self, n):
        return float(np.exp(self.log_kappa(n)))

    def kappas(self, n):
        """kappa_0..kappa_n as an array (may overflow to inf for huge n)."""
        self.check_degree(n)
        return np.exp(-self._log_a_cumsum[:n + 1] - 0.5 * np.log(self.mass0))

    def monic_norm(self, n):
        """||P_n||_{L2(dmu)} = a_1...a_n mass0^{1/2}."""
        self.check_degree(n)
        return float(np.exp(self._log_a_cumsum[n] + 0.5 * np.log(self.mass0)))

    def stripped(self, k=1):
        """Coefficients of the k-times-stripped measure: a'_n = a_{n+k}.

        The stripped family keeps mass0, which makes the second-kind shift
        identity q_n(x; mu) = a_1^{-1} p_{n-1}(x; mu~) exact as implemented.
        """
        if k >= self.max_degree:
            raise DegreeError("cannot strip %d levels from maxDegree %d"
                              % (k, self.max_degree))
        return JacobiParams(self.a[k:], self.b[k:], self.mass0,
                            self.max_degree - k)


@dataclass(frozen=True)
class PolyEval:
    """Values of p_0..p_n, P_0..P_n (monic) and q_0..q_n at one point."""

    x: complex
    p: np.ndarray
    monic: np.ndarray
    q: np.ndarray
    kappa: np.ndarray
    overflow: bool

    @property
    def n(self):
        return len(self.p) - 1


def stieltjes_recurrence(mu, n_max, reorthogonalize=False):
    """Jacobi parameters of an atomic measure by discretized Stieltjes.

    Iterates the monic recurrence against the atoms:
    b_{n+1} = <x P_n, P_n> / ||P_n||^2 and a_n^2 = ||P_n||^2 / ||P_{n-1}||^2.

    ``reorthogonalize=True`` projects each new polynomial against all stored
    predecessors (twice), which suppresses the Lanczos ghost phenomenon:
    without it, exponentially small components at isolated atoms far from
    the essential support are lost to roundoff and re-amplified, spawning
    spurious coefficient spikes at larger n.  Costs O(n_max^2 * atoms) and
    memory for the full value table, so it is off by default.

    Raises
    ------
    InsufficientAtomsError
        if the atom count is <= n_max (no degree-n_max polynomial exists), or
        below 4*n_max for discretized measures (resolution policing: the 4x
        margin keeps orthogonality residuals < 1e-9).
    CoarseMeasureError
        if ||P_n||^2 collapses below the 1e3 * eps * mass * cap^{2n} proxy,
        signalling an exhausted discretization.
    """
    if mu.support is not SupportKind.REAL_LINE:
        raise MeasureError("OPRL recurrence requires a real-line measure")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    mu.require_atoms(n_max + 1, "degree-%d recurrence" % n_max)
    if mu.named is not None and mu.n_atoms < 4 * n_max:
        # lazy resolution policing for discretized measures: the 4x margin
        # keeps orthogonality residuals < 1e-9
        raise InsufficientAtomsError(
            "resolution too small: %d atoms < 4 * %d; rediscretize"
            % (mu.n_atoms, n_max))
    x, w = mu.points, mu.weights
    mass0 = mu.mass
    cap = max(mu.spread / 4.0, _EPS)  # capacity scale of the support interval

    a = np.empty(n_max)
    b = np.empty(n_max)
    # iterate with *normalized* polynomial values (Lanczos scaling): monic
    # values decay like cap^n and their norms underflow binary64 near
    # n ~ 500 for cap = 1/2, so P_{n+1} = (x - b) P_n - a_n^2 P_{n-1} is run
    # as r = (x - b) q_n - a_n q_{n-1} with q_n = P_n/||P_n||, a_{n+1} = ||r||
    q_prev = np.zeros_like(x)
    q_cur = np.full_like(x, mass0 ** -0.5)
    basis = None
    if reorthogonalize:
        basis = np.empty((n_max, x.size))
    # stepwise form of the 1e3*eps*||P_0||^2*cap^{2n} collapse proxy: the
    # norm ratio ||P_{n+1}||^2/||P_n||^2 = a_{n+1}^2 dropping to roundoff
    # against the cap^2 scale means the discretization is exhausted here
    floor = 1e3 * _EPS * cap ** 2
    for n in range(n_max):
        if basis is not None:
            basis[n] = q_cur
        t = w * q_cur * q_cur
        b[n] = fsum(x * t) / fsum(t)
        r = (x - b[n]) * q_cur - (a[n - 1] if n >= 1 else 0.0) * q_prev
        if basis is not None:
            for _ in range(2):  # CGS2: twice is enough
                coefs = basis[:n + 1] @ (w * r)
                r = r - coefs @ basis[:n + 1]
        ratio_sq = fsum(w * r * r)
        if ratio_sq <= floor:
            raise CoarseMeasureError(
                "measure too coarse: ||P_%d||^2/||P_%d||^2 = %.3e below the "
                "%.3e collapse floor" % (n + 1, n, ratio_sq, floor))
        a[n] = np.sqrt(ratio_sq)
        q_prev, q_cur = q_cur, r / a[n]
    return JacobiParams(a, b, mass0, n_max)


def _forward(jp, n, x, init0, init1_scale, want_deriv=False):
    """Shared forward recurrence core, vectorized over x.

    Returns value rows v_0..v_n at the points; ``init0`` is v_0 and v_1 is
    built as ((x - b_1) * v_0 + init1_scale) / a_1 so the same loop serves
    the orthonormal family (init0 = mass0^{-1/2}, init1_scale = 0) and the
    second kind (init0 = 0, init1_scale = mass0^{-1/2}).
    """
    jp.check_degree(n)
    x = np.atleast_1d(np.asarray(x))
    rows = np.zeros((n + 1,) + x.shape, dtype=np.result_type(x.dtype, float))
    rows[0] = init0
    if want_deriv:
        derivs = np.zeros_like(rows)
    if n >= 1:
        # overflow far off-support is reported via the eval_polys flag, not
        # as a warning
        with np.errstate(over="ignore", invalid="ignore"):
            rows[1] = ((x - jp.b[0]) * init0 + init1_scale) / jp.a[0]
            if want_deriv:
                derivs[1] = init0 / jp.a[0]
            for k in range(1, n):
                rows[k + 1] = ((x - jp.b[k]) * rows[k]
                               - jp.a[k - 1] * rows[k - 1]) / jp.a[k]
                if want_deriv:
                    derivs[k + 1] = ((x - jp.b[k]) * derivs[k] + rows[k]
                                     - jp.a[k - 1] * derivs[k - 1]) / jp.a[k]
    if want_deriv:
        return rows, derivs
    return rows


def orthonormal_values(jp, n, xs):
    """Matrix p_j(x_i), j = 0..n, for an array of points xs."""
    return _forward(jp, n, xs, jp.mass0 ** -0.5, 0.0)


def orthonormal_values_and_derivs(jp, n, xs):
    """(p_j(x_i), p'_j(x_i)) via the differentiated three-term recurrence."""
    return _forward(jp, n, xs, jp.mass0 ** -0.5, 0.0, want_deriv=True)


def second_kind_values(jp, n, xs):
    """Matrix q_j(x_i): q_0 = 0, q_1 = (a_1 sqrt(mass0))^{-1}, then (1.5)."""
    return _forward(jp, n, xs, 0.0, jp.mass0 ** -0.5)


def monic_values(jp, n, xs):
    """Matrix P_j(x_i) from the monic recurrence (may overflow off-support)."""
    jp.check_degree(n)
    xs = np.atleast_1d(np.asarray(xs))
    rows = np.zeros((n + 1,) + xs.shape, dtype=np.result_type(xs.dtype, float))
    rows[0] = 1.0
    if n >= 1:
        with np.errstate(over="ignore", invalid="ignore"):
            rows[1] = xs - jp.b[0]
            for k in range(1, n):
                rows[k + 1] = ((xs - jp.b[k]) * rows[k]
                               - jp.a[k - 1] ** 2 * rows[k - 1])
    return rows


def eval_polys(jp, n, x):
    """Evaluate p_0..p_n, monic P_0..P_n and q_0..q_n at a point.

    Sets the overflow flag (instead of raising) when any value exceeds 1e300,
    which happens far off-support at large n.
    """
    xarr = np.asarray([x])
    p = orthonormal_values(jp, n, xarr)[:, 0]
    q = second_kind_values(jp, n, xarr)[:, 0]
    monic = monic_values(jp, n, xarr)[:, 0]
    overflow = bool(
        np.any(~np.isfinite(p)) or np.any(~np.isfinite(monic))
        or np.any(np.abs(p) > _OVERFLOW_LIMIT)
        or np.any(np.abs(monic) > _OVERFLOW_LIMIT))
    return PolyEval(x=x, p=p, monic=monic, q=q, kappa=jp.kappas(n),
                    overflow=overflow)


def second_kind_shift_check(jp, n, x):
    """Residual of q_n(x; dmu) = a_1^{-1} p_{n-1}(x; dmu~).

    mu~ is the once-stripped measure (a~_n = a_{n+1}, b~_n = b_{n+1});
    contract: residual <= 1e-10 * max(1, |q_n|).
    """
    if n < 1:
        raise DegreeError("shift check needs n >= 1")
    if n > jp.max_degree - 1:
        raise DegreeError("n exceeds maxDegree - 1 (stripped family shorter)")
    q_n = second_kind_values(jp, n, np.asarray([x]))[n, 0]
    p_strip = orthonormal_values(jp.stripped(), n - 1, np.asarray([x]))[n - 1, 0]
    return abs(q_n - p_strip / jp.a[0])


def wronskian(jp, n, x):
    """a_{n+1}(q_{n+1} p_n - p_{n+1} q_n) at x; constant (= 1/mass0) in n."""
    if n + 1 > jp.max_degree:
        raise DegreeError("need coefficients to degree n+1")
    xa = np.asarray([x])
    p = orthonormal_values(jp, n + 1, xa)[:, 0]
    q = second_kind_values(jp, n + 1, xa)[:, 0]
    return jp.a[n] * (q[n + 1] * p[n] - p[n + 1] * q[n])
