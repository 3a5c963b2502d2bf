"""Zeros of OPRL, Gaussian quadrature, and Markov-Stieltjes bounds.

Zeros of P_n (and of the corner-shifted P_n - b P_{n-1}) are eigenvalues of
the truncated Jacobi matrix J_{n;F}(b).  They are located by bisection on the
Sturm eigenvalue count (the LDL^T negative-pivot count, i.e. the sign pattern
of the monic minor ratio sequence) and polished with Newton steps on the
orthonormal-scaled characteristic polynomial p_n - (b/a_n) p_{n-1}; no
general eigensolver is involved.

Cotes numbers are Christoffel-function values at the nodes,
lambda_j = 1 / K_{n-1}(x_j, x_j), which makes the Markov-Stieltjes CDF
sandwich and the atom bound mu({x0}) <= 1/K_{n-1}(x0, x0) one-liners.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from ._sums import fsum
from .errors import CdkitError, DegreeError
from .kernels import shifted_char_values
from .oprl import orthonormal_values, orthonormal_values_and_derivs

_EPS = np.finfo(float).eps

# Nodes closer than this (relative to the node spread) are rejected as
# discretization artifacts: atoms of the generating measure can pin spurious
# near-degenerate roots when n approaches the atom count.
_NODE_DUPLICATE_RTOL = 1e-12

_ANCHOR_TINY = 1e-10  # case-classification threshold for |p_n(x0)| / scale


@dataclass(frozen=True)
class TruncatedJacobi:
    """The n x n truncation J_{n;F}(b): only the corner entry b_n is shifted.

    det(z - J) = P_n(z) - b P_{n-1}(z) against independent monic evaluation.
    """

    n: int
    diag: np.ndarray      # b_1..b_n, corner shift already added
    off: np.ndarray       # a_1..a_{n-1}
    corner_shift: float

    @staticmethod
    def from_params(jp, n, corner_shift=0.0):
        jp.check_degree(n)
        if n < 1:
            raise DegreeError("truncation size must be >= 1")
        diag = jp.b[:n].copy()
        diag[-1] += corner_shift
        return TruncatedJacobi(n=n, diag=diag, off=jp.a[:n - 1].copy(),
                               corner_shift=float(corner_shift))

    def to_dense(self):
        m = np.diag(self.diag)
        if self.n > 1:
            m += np.diag(self.off, 1) + np.diag(self.off, -1)
        return m

    def count_below(self, xs):
        """Number of eigenvalues strictly below each x (Sturm / LDL^T count).

        The pivot sequence d_k = (b_k - x) - a_{k-1}^2 / d_{k-1} is the ratio
        form of the monic minor (1.7a) sequence; negative pivots count
        eigenvalues below x.
        """
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        pivmin = _EPS * max(1.0, float(np.max(np.abs(self.diag))) +
                            2.0 * (float(np.max(self.off)) if self.n > 1 else 0.0))
        d = self.diag[0] - xs
        d = np.where(np.abs(d) < pivmin, -pivmin, d)
        count = (d < 0).astype(np.int64)
        for k in range(1, self.n):
            d = (self.diag[k] - xs) - self.off[k - 1] ** 2 / d
            d = np.where(np.abs(d) < pivmin, -pivmin, d)
            count += d < 0
        return count

    def gershgorin(self):
        a_lo = np.concatenate([[0.0], self.off])
        a_hi = np.concatenate([self.off, [0.0]])
        radius = a_lo + a_hi
        return (float(np.min(self.diag - radius)),
                float(np.max(self.diag + radius)))


def _bisect_eigenvalues(tj, indices):
    """Bisection on the Sturm count, vectorized over eigenvalue indices."""
    lo_all, hi_all = tj.gershgorin()
    width = max(hi_all - lo_all, 1.0)
    lo = np.full(len(indices), lo_all - 1e-3 * width)
    hi = np.full(len(indices), hi_all + 1e-3 * width)
    targets = np.asarray(indices, dtype=np.int64)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        c = tj.count_below(mid)
        go_left = c >= targets + 1
        hi = np.where(go_left, mid, hi)
        lo = np.where(go_left, lo, mid)
        if np.max(hi - lo) < 64 * _EPS * width:
            break
    return lo, hi


def _zeros_of_truncation(jp, n, corner_shift):
    """All eigenvalues of J_{n;F}(b), certified by Sturm brackets, polished."""
    tj = TruncatedJacobi.from_params(jp, n, corner_shift)
    lo, hi = _bisect_eigenvalues(tj, np.arange(n))
    x = 0.5 * (lo + hi)
    # <= 5 Newton steps on the orthonormal-scaled characteristic polynomial,
    # derivative propagated through the recurrence; stay inside the bracket
    for _ in range(5):
        p, dp = orthonormal_values_and_derivs(jp, n, x)
        if corner_shift == 0.0:
            f, df = p[n], dp[n]
        else:
            c = corner_shift / jp.a[n - 1]
            f, df = p[n] - c * p[n - 1], dp[n] - c * dp[n - 1]
        step = np.where(df != 0.0, f / np.where(df == 0.0, 1.0, df), 0.0)
        x = np.clip(x - step, lo, hi)
    x = np.sort(x)
    spread = max(float(x[-1] - x[0]), _EPS) if n > 1 else 1.0
    if n > 1 and np.min(np.diff(x)) < _NODE_DUPLICATE_RTOL * spread:
        raise CdkitError("near-degenerate nodes: discretization artifact "
                         "(n too close to the atom count)")
    return x


def zeros_pn(jp, n):
    """The n zeros of p_n, strictly increasing.

    Eigenvalues of the b = 0 truncated Jacobi matrix; each root carries a
    Sturm sign-change certificate from the bisection bracket.
    """
    jp.check_degree(n)
    if n < 1:
        raise DegreeError("zeros need n >= 1")
    return _zeros_of_truncation(jp, n, 0.0)


def zeros_pn_indexed(jp, n, indices):
    """Selected zeros of p_n by 0-based index (ascending order), without
    computing the full set; used by windowed experiments at large n."""
    jp.check_degree(n)
    tj = TruncatedJacobi.from_params(jp, n)
    indices = np.asarray(indices, dtype=np.int64)
    if np.any(indices < 0) or np.any(indices >= n):
        raise ValueError("zero indices must lie in [0, n)")
    lo, hi = _bisect_eigenvalues(tj, indices)
    x = 0.5 * (lo + hi)
    for _ in range(5):
        p, dp = orthonormal_values_and_derivs(jp, n, x)
        f, df = p[n], dp[n]
        step = np.where(df != 0.0, f / np.where(df == 0.0, 1.0, df), 0.0)
        x = np.clip(x - step, lo, hi)
    return x


def zeros_shifted(jp, n, corner_shift, infinite=False, check_bracketing=True):
    """Roots of P_n - b P_{n-1}; ``infinite=True`` means the b = infinity
    convention, i.e. the roots of P_{n-1}.

    By default the strict bracketing against the unshifted zeros is asserted:
    for b > 0 each shifted root lies in (x_j(0), x_{j+1}(0)), for b < 0 in
    (x_{j-1}(0), x_j(0)).
    """
    if infinite or (np.isinf(corner_shift) if corner_shift is not None else False):
        return zeros_pn(jp, n - 1)
    if corner_shift == 0.0:
        return zeros_pn(jp, n)
    shifted = _zeros_of_truncation(jp, n, float(corner_shift))
    if check_bracketing:
        base = zeros_pn(jp, n)
        if corner_shift > 0:
            hi = np.append(base[1:], np.inf)
            ok = np.all(base < shifted) and np.all(shifted < hi)
        else:
            lo = np.concatenate([[-np.inf], base[:-1]])
            ok = np.all(lo < shifted) and np.all(shifted < base)
        if not ok:
            raise CdkitError("shifted zeros failed strict bracketing")
    return shifted


def kernel_diag_values(jp, n, xs):
    """K_n(x, x) for an array of real points (direct diagonal sum)."""
    p = orthonormal_values(jp, n, np.atleast_1d(np.asarray(xs, dtype=float)))
    return np.einsum("ij,ij->j", p, p)


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-type rule: nodes, Cotes numbers, certified exactness degree."""

    nodes: np.ndarray
    weights: np.ndarray
    exact_degree: int
    provenance: dict

    def __post_init__(self):
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)

    @property
    def n_nodes(self):
        return len(self.nodes)

    @property
    def mass(self):
        return fsum(self.weights)

    def apply(self, values):
        """sum_j lambda_j values_j (fixed-order compensated)."""
        return fsum(self.weights * np.asarray(values))


def gauss_rule(jp, n, corner_shift=None, x0=None):
    """Gaussian quadrature from the degree-n truncation.

    Exactly one anchor: ``corner_shift`` b (default 0.0) puts the nodes at the
    roots of P_n - b P_{n-1}; ``x0`` maps to b(x0) = P_n(x0)/P_{n-1}(x0) so
    that x0 itself is a node.  Weights are lambda_j = 1/K_{n-1}(x_j, x_j).

    Exactness degree: 2n-1 for b = 0 (equivalently P_n(x0) = 0), 2n-2 for
    finite nonzero b, 2n-3 for the degenerate anchor P_{n-1}(x0) = 0 (the
    rule then has n-1 nodes and the provenance carries the
    "degenerate_anchor" flag).
    """
    if n < 1:
        raise DegreeError("rule needs n >= 1")
    jp.check_degree(n)
    provenance = {"n": n}
    if x0 is not None:
        if corner_shift is not None:
            raise ValueError("give either corner_shift or x0, not both")
        p = orthonormal_values(jp, n, np.asarray([float(x0)]))[:, 0]
        scale = float(np.max(np.abs(p)))
        tiny_n = abs(p[n]) <= _ANCHOR_TINY * scale
        tiny_nm1 = abs(p[n - 1]) <= _ANCHOR_TINY * scale
        provenance["x0"] = float(x0)
        if tiny_n and tiny_nm1:
            warnings.warn("anchored rule: both P_n(x0) and P_{n-1}(x0) are "
                          "tiny; case assignment is numerically ambiguous, "
                          "picking case (2)", stacklevel=2)
            b = jp.a[n - 1] * p[n] / p[n - 1]
            nodes = zeros_shifted(jp, n, b)
            exact = 2 * n - 2
        elif tiny_nm1:
            provenance["degenerate_anchor"] = True
            nodes = zeros_pn(jp, n - 1)
            exact = 2 * n - 3
        elif tiny_n:
            nodes = zeros_pn(jp, n)
            exact = 2 * n - 1
        else:
            # monic ratio P_n/P_{n-1} = a_n p_n/p_{n-1}: log-scaled, no
            # under/overflow from the kappa products
            b = jp.a[n - 1] * p[n] / p[n - 1]
            provenance["corner_shift"] = float(b)
            nodes = zeros_shifted(jp, n, b)
            exact = 2 * n - 2
    else:
        b = 0.0 if corner_shift is None else corner_shift
        provenance["corner_shift"] = float(b)
        if np.isinf(b):
            nodes = zeros_pn(jp, n - 1)
            exact = 2 * n - 3
            provenance["degenerate_anchor"] = True
        else:
            nodes = zeros_shifted(jp, n, b)
            exact = 2 * n - 1 if b == 0.0 else 2 * n - 2
    weights = 1.0 / kernel_diag_values(jp, n - 1, nodes)
    return QuadratureRule(nodes=nodes, weights=weights, exact_degree=exact,
                          provenance=provenance)


def exactness_check(rule, mu, degrees):
    """Relative error of the rule against atomic monomial moments.

    Returns one relative error per requested degree, with the scale
    max(|moment|, sum_j lambda_j |x_j|^deg) so odd (zero) moments are
    handled.  Degrees up to exact_degree must come out <= 1e-10; the first
    failure beyond the certificate is reported by the caller, not asserted
    here.
    """
    errors = []
    for deg in degrees:
        xs_pow = rule.nodes ** deg
        rule_sum = fsum(rule.weights * xs_pow)
        moment = fsum(mu.weights * mu.points.real ** deg)
        scale = max(abs(moment), fsum(rule.weights * np.abs(rule.nodes) ** deg),
                    np.finfo(float).tiny)
        errors.append(abs(rule_sum - moment) / scale)
    return np.asarray(errors)


@dataclass(frozen=True)
class MarkovStieltjesBounds:
    """Two-sided CDF bounds at x0: upper >= mu((-inf,x0]) >= mu((-inf,x0))
    >= lower, with upper - lower = 1/K_{n-1}(x0, x0)."""

    x0: float
    upper: float
    lower: float
    rule: QuadratureRule

    @property
    def gap(self):
        return self.upper - self.lower


def markov_stieltjes(jp, n, x0):
    """Markov-Stieltjes bounds from the x0-anchored n-point rule."""
    rule = gauss_rule(jp, n, x0=float(x0))
    nodes, lam = rule.nodes, rule.weights
    scale = max(1.0, abs(x0))
    j0 = int(np.argmin(np.abs(nodes - x0)))
    if abs(nodes[j0] - x0) <= 1e-8 * scale:
        lower = fsum(lam[:j0]) if j0 > 0 else 0.0
        upper = lower + lam[j0]
    else:  # x0 failed to pin as a node (should not happen for anchored rules)
        lower = fsum(lam[nodes < x0]) if np.any(nodes < x0) else 0.0
        upper = lower
    return MarkovStieltjesBounds(x0=float(x0), upper=upper, lower=lower,
                                 rule=rule)


def markov_stieltjes_interval(jp, n, x0, ell, k):
    """Inner/outer Cotes sums sandwiching mu([x_ell, x_k]) on the x0 rule.

    Indices are 0-based into the sorted nodes; requires ell <= k - 1.
    """
    if ell > k - 1:
        raise ValueError("need ell <= k - 1")
    rule = gauss_rule(jp, n, x0=float(x0))
    lam = rule.weights
    inner = fsum(lam[ell + 1:k]) if k > ell + 1 else 0.0
    outer = fsum(lam[ell:k + 1])
    return inner, outer, float(rule.nodes[ell]), float(rule.nodes[k])


def atom_mass_bound(jp, n, x0):
    """1/K_{n-1}(x0, x0): upper bound for mu({x0}), nonincreasing in n, and
    converging to the actual atom mass."""
    return 1.0 / float(kernel_diag_values(jp, n - 1, [float(x0)])[0])


@dataclass(frozen=True)
class InterlacingReport:
    n_checked: int
    min_gap: float          # smallest normalized interlacing margin seen
    min_sign_margin: float  # smallest -p_{n+1}(x0) p'_n(x0) seen


def interlacing_check(jp, n_max):
    """Verify zeros are real, simple, strictly interlaced, and the sign
    condition p_{n+1}(x0) p'_n(x0) < 0 at every zero x0 of p_n, n < n_max.

    Any violation raises CdkitError citing the offending (n, j).
    """
    if n_max > jp.max_degree - 1:
        raise DegreeError("n_max must be <= maxDegree - 1")
    min_gap = np.inf
    min_sign = np.inf
    prev = zeros_pn(jp, 1)
    for n in range(1, n_max + 1):
        cur = prev
        nxt = zeros_pn(jp, n + 1)
        spread = max(nxt[-1] - nxt[0], _EPS)
        if np.min(np.diff(nxt), initial=np.inf) <= 0:
            raise CdkitError("zeros of p_%d not simple/increasing" % (n + 1))
        # strict interlacing: nxt_j < cur_j < nxt_{j+1}
        left = (cur - nxt[:-1]) / spread
        right = (nxt[1:] - cur) / spread
        margin = min(np.min(left), np.min(right))
        if margin <= 0:
            j = int(np.argmin(np.minimum(left, right)))
            raise CdkitError("interlacing violated at (n=%d, j=%d)" % (n, j))
        min_gap = min(min_gap, float(margin))
        p, dp = orthonormal_values_and_derivs(jp, n + 1, cur)
        sign_product = -p[n + 1] * dp[n]
        if np.min(sign_product) <= 0:
            j = int(np.argmin(sign_product))
            raise CdkitError("sign condition violated at (n=%d, j=%d)" % (n, j))
        min_sign = min(min_sign, float(np.min(sign_product)))
        prev = nxt
    return InterlacingReport(n_checked=n_max, min_gap=min_gap,
                             min_sign_margin=min_sign)


def spacing_lower_bound_check(jp, n, zero_a, zero_b, delta, grid_points=1000):
    """Zero-spacing lower bound for two distinct zeros E, E' of P_n:

        |E - E'| >= (delta^2 - (|E-E'|/2)^2)
                    * sqrt(K_n(E,E) / sup K_n(y,y)) / (3n),

    the sup taken over a ``grid_points``-point grid on |y - (E+E')/2| <=
    delta (a documented grid proxy; the check is advisory).  Returns
    (holds, lhs, rhs).
    """
    zero_a, zero_b = float(zero_a), float(zero_b)
    gap = abs(zero_a - zero_b)
    if gap == 0.0:
        raise ValueError("zeros must be distinct")
    if not delta > gap / 2.0:
        raise ValueError("need delta > |E - E'| / 2")
    p = orthonormal_values(jp, n, np.asarray([zero_a, zero_b]))
    scale = float(np.max(np.abs(p)))
    if max(abs(p[n, 0]), abs(p[n, 1])) > 1e-8 * scale:
        raise ValueError("inputs are not zeros of p_n")
    mid = 0.5 * (zero_a + zero_b)
    grid = np.linspace(mid - delta, mid + delta, grid_points)
    sup_k = float(np.max(kernel_diag_values(jp, n, grid)))
    k_e = float(kernel_diag_values(jp, n, [zero_a])[0])
    rhs = (delta ** 2 - (gap / 2.0) ** 2) * np.sqrt(k_e / sup_k) / (3.0 * n)
    return gap >= rhs, gap, float(rhs)
