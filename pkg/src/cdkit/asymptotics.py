"""Desk-scale experiments for the scaling-limit theory.

Everything here is finite-n evidence for asymptotic statements: kernel
measures and zero-counting moments, diagonal Christoffel limits against the
single-interval equilibrium density rho_e(x) = 1/(pi sqrt((x-a)(b-x))),
sine-kernel universality of the rescaled kernel, the Lubinsky inequality,
Nevai delta-convergence metrics, clock spacing of zeros, the regularity
index (a_1...a_n)^{1/n} vs capacity, and the a.c.-set diagnostic.

Limit/liminf quantities computed over a finite n list are labelled "proxy"
in outputs; nothing here claims an asymptotic verdict.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ._sums import fsum
from .errors import CdkitError, MeasureError
from .measures import AtomicMeasure, SupportKind, add_point_mass
from .oprl import orthonormal_values, stieltjes_recurrence
from .quadrature import (TruncatedJacobi, kernel_diag_values, zeros_pn,
                         zeros_pn_indexed)


# ---------------------------------------------------------------------------
# Equilibrium objects for a single interval
# ---------------------------------------------------------------------------

def equilibrium_density(interval, x):
    """rho_e(x) = 1/(pi sqrt((x - lo)(hi - x))) on a single interval."""
    lo, hi = interval
    x = np.asarray(x, dtype=float)
    inside = (x > lo) & (x < hi)
    out = np.full_like(x, np.inf)
    out[~inside] = np.inf
    out[inside] = 1.0 / (np.pi * np.sqrt((x[inside] - lo) * (hi - x[inside])))
    return out if out.ndim else float(out)


def equilibrium_cdf(interval, x):
    """Arcsine-law CDF of the equilibrium measure of [lo, hi]."""
    lo, hi = interval
    u = np.clip((2.0 * np.asarray(x, dtype=float) - lo - hi) / (hi - lo),
                -1.0, 1.0)
    return 0.5 + np.arcsin(u) / np.pi


def capacity(interval):
    """Logarithmic capacity of a single interval: (hi - lo)/4."""
    lo, hi = interval
    return (hi - lo) / 4.0


# ---------------------------------------------------------------------------
# Measures derived from the kernel and from zeros
# ---------------------------------------------------------------------------

def zero_counting_measure(jp, n):
    """nu_n: weight 1/n at each zero of p_n (a probability measure)."""
    zeros = zeros_pn(jp, n)
    return AtomicMeasure(SupportKind.REAL_LINE, zeros,
                         np.full(n, 1.0 / n), label="nu_%d" % n)


def kernel_measure(jp, mu, n):
    """mu_n = (n+1)^{-1} K_n(x, x) dmu(x) on the atoms (mass 1 to 1e-12)."""
    kdiag = kernel_diag_values(jp, n, mu.points.real)
    weights = mu.weights * kdiag / (n + 1.0)
    return AtomicMeasure(SupportKind.REAL_LINE, mu.points, weights,
                         label="kernel_measure_%d" % n)


def moment_compare(jp, mu, n, l_max):
    """| int x^l d nu_{n+1} - int x^l d mu_n | for l = 0..l_max.

    Returns (differences, bounds) with the rank-bound envelope
    l * R^l / (n+1), R = max |atom|, an operator-norm proxy.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    if l_max > 12:
        raise ValueError("l_max capped at 12 (powers overflow the envelope)")
    zeros = zeros_pn(jp, n + 1)
    kdiag = kernel_diag_values(jp, n, mu.points.real)
    radius = float(np.max(np.abs(mu.points.real)))
    diffs, bounds = [], []
    for ell in range(l_max + 1):
        nu_mom = fsum(zeros ** ell) / (n + 1.0)
        mu_mom = fsum(mu.weights * mu.points.real ** ell * kdiag) / (n + 1.0)
        diffs.append(abs(nu_mom - mu_mom))
        bounds.append(ell * radius ** ell / (n + 1.0))
    return np.asarray(diffs), np.asarray(bounds)


# ---------------------------------------------------------------------------
# Pointwise density helpers
# ---------------------------------------------------------------------------

def density_at(mu, x0, n):
    """w(x0) for the measure: analytic when provenance is known, else the
    documented local-average proxy mass([x0-h, x0+h])/(2h) with h = 10/n."""
    if mu.named is not None and mu.named.support is SupportKind.REAL_LINE:
        return float(mu.named.weight_density(x0))
    h = 10.0 / n
    mask = (mu.points.real >= x0 - h) & (mu.points.real <= x0 + h)
    if not np.any(mask):
        return 0.0
    return fsum(mu.weights[mask]) / (2.0 * h)


def _require_interval(mu):
    if mu.named is None or mu.named.support is not SupportKind.REAL_LINE:
        raise MeasureError("unsupported support: single-interval analytic "
                           "measure required (closed-form rho_e)")
    return mu.named.interval


# ---------------------------------------------------------------------------
# Diagonal Christoffel limit
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChristoffelScanRow:
    n: int
    x: float
    kn_over_n: float       # (1/n) K_n(x, x)
    rho_n: float           # (w(x)/n) K_n(x, x), the (22.3) normalization
    rho_e: float
    rel_deviation: float   # |rho_n - rho_e| / rho_e


def christoffel_limit_scan(jp, mu, x_grid, n_list):
    """Tabulate (1/n) K_n(x,x) w(x) against the equilibrium density.

    Desk-scale experiment: the deviation column is the finite-n evidence for
    the rho_e/w limit; both the raw (1/n) K_n and the w-weighted
    normalization are reported.
    """
    interval = _require_interval(mu)
    rows = []
    x_grid = np.asarray(x_grid, dtype=float)
    for n in n_list:
        kdiag = kernel_diag_values(jp, n, x_grid)
        w = mu.named.weight_density(x_grid)
        rho_e = equilibrium_density(interval, x_grid)
        for i, x in enumerate(x_grid):
            rho_n = w[i] * kdiag[i] / n
            rows.append(ChristoffelScanRow(
                n=n, x=float(x), kn_over_n=float(kdiag[i] / n),
                rho_n=float(rho_n), rho_e=float(rho_e[i]),
                rel_deviation=float(abs(rho_n - rho_e[i]) / rho_e[i])))
    return rows


# ---------------------------------------------------------------------------
# Bulk universality
# ---------------------------------------------------------------------------

def sinc(t):
    """sin(pi t) / (pi t), the sine-kernel reference (1 at t = 0)."""
    t = np.asarray(t, dtype=float)
    out = np.ones_like(t)
    nz = t != 0.0
    out[nz] = np.sin(np.pi * t[nz]) / (np.pi * t[nz])
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class ScalingReport:
    """Scaled-kernel table vs the sinc reference at one (x0, n)."""

    x0: float
    n: int
    rho_n: float            # (22.3): (w(x0)/n) K_n(x0, x0)
    rho_e: float            # equilibrium density at x0, for comparison
    rescale: float          # n * rho_n, the unit of the a/b grid
    grid_a: np.ndarray
    grid_b: np.ndarray
    measured: np.ndarray    # K_n(x0 + a/(n rho_n), x0 + b/(n rho_n)) / K_n(x0, x0)
    reference: np.ndarray   # sinc(b - a)
    max_abs_error: float
    runtime_seconds: float


def universality_scan(jp, mu, x0, n, grid_a, grid_b):
    """Measure K_n(x0 + a/(n rho_n), x0 + b/(n rho_n)) / K_n(x0, x0) against
    sin(pi(b-a))/(pi(b-a)) over the (a, b) grid."""
    start = time.perf_counter()
    grid_a = np.asarray(grid_a, dtype=float)
    grid_b = np.asarray(grid_b, dtype=float)
    w0 = density_at(mu, x0, n)
    if w0 <= 0:
        raise MeasureError("universality scan needs w(x0) > 0")
    p0 = orthonormal_values(jp, n, np.asarray([x0]))[:, 0]
    # same fsum reduction as the scan rows, so measured(0, 0) == 1 exactly
    k00 = fsum(p0 * p0)
    rho_n = w0 * k00 / n
    scale = n * rho_n
    pts_a = x0 + grid_a / scale
    pts_b = x0 + grid_b / scale
    pa = orthonormal_values(jp, n, pts_a)
    pb = orthonormal_values(jp, n, pts_b)
    measured = np.empty((len(grid_a), len(grid_b)))
    for i in range(len(grid_a)):
        for j in range(len(grid_b)):
            measured[i, j] = fsum(pa[:, i] * pb[:, j]) / k00
    reference = sinc(grid_b[None, :] - grid_a[:, None])
    err = float(np.max(np.abs(measured - reference)))
    rho_e = np.nan
    if mu.named is not None and mu.named.support is SupportKind.REAL_LINE:
        rho_e = float(equilibrium_density(mu.named.interval, x0))
    return ScalingReport(x0=float(x0), n=n, rho_n=float(rho_n), rho_e=rho_e,
                         rescale=float(scale), grid_a=grid_a, grid_b=grid_b,
                         measured=measured, reference=reference,
                         max_abs_error=err,
                         runtime_seconds=time.perf_counter() - start)


# ---------------------------------------------------------------------------
# Lubinsky's inequality
# ---------------------------------------------------------------------------

def lubinsky_inequality_check(mu, added_atoms, n, point_pairs,
                              resolution_params=None):
    """Max normalized violation of

        |K_n(z,zeta) - K_n*(z,zeta)|^2
            <= K_n(z,z) [K_n(zeta,zeta) - K_n*(zeta,zeta)]

    where mu* = mu + the given positive atoms (constructively mu <= mu*).
    Returns max over pairs of (lhs - rhs)/scale; contract <= 1e-10.
    """
    mu_star = mu
    for point, weight in added_atoms:
        if weight <= 0:
            raise MeasureError("mu* - mu must be a positive atomic measure")
        mu_star = add_point_mass(mu_star, point, weight)
    jp = stieltjes_recurrence(mu, n + 1)
    jp_star = stieltjes_recurrence(mu_star, n + 1)
    worst = -np.inf
    for z, zeta in point_pairs:
        pz, pzeta = _pair_values(jp, n, z, zeta)
        sz, szeta = _pair_values(jp_star, n, z, zeta)
        k = np.vdot(pz, pzeta)           # conj on the z slot
        k_star = np.vdot(sz, szeta)
        kzz = np.vdot(pz, pz).real
        kzetazeta = np.vdot(pzeta, pzeta).real
        kzetazeta_star = np.vdot(szeta, szeta).real
        lhs = abs(k - k_star) ** 2
        rhs = kzz * (kzetazeta - kzetazeta_star)
        scale = max(kzz * kzetazeta, 1.0)
        worst = max(worst, (lhs - rhs) / scale)
    return worst


def _pair_values(jp, n, z, zeta):
    pts = np.asarray([z, zeta])
    p = orthonormal_values(jp, n, pts)
    return p[:, 0], p[:, 1]


# ---------------------------------------------------------------------------
# Nevai delta-convergence metrics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NevaiMetrics:
    second_moment: float    # int |x - x0|^2 d eta_n, via the CD identity
    lemma_ratio: float      # p_n(x0)^2 / K_n(x0, x0)


def nevai_delta_metric(jp, x0, n):
    """Second moment of eta_n^{x0} and the Nevai-lemma ratio at x0.

    second_moment = a_{n+1}^2 [p_n(x0)^2 + p_{n+1}(x0)^2] / K_n(x0, x0);
    both -> 0 exactly when the delta-convergence criterion holds.
    """
    p = orthonormal_values(jp, n + 1, np.asarray([float(x0)]))[:, 0]
    k_nn = float(np.sum(p[:n + 1] ** 2))
    second = jp.a[n] ** 2 * (p[n] ** 2 + p[n + 1] ** 2) / k_nn
    return NevaiMetrics(second_moment=float(second),
                        lemma_ratio=float(p[n] ** 2 / k_nn))


# ---------------------------------------------------------------------------
# Clock spacing of zeros
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClockSpacingTable:
    x0: float
    n: int
    c_n: float
    j_values: np.ndarray        # j = -J..J
    scaled_spacings: np.ndarray  # n c_n (x_{j+1} - x_j)
    first_zero_scaled: float    # n c_n (x_0^{(n)} - x0)
    zeros: np.ndarray           # x_{-J}..x_{J+1}


def clock_spacing(jp, mu, x0, n, j_window):
    """Scaled spacings of the zeros of p_n around x0.

    Zeros are labelled x_{-1} < x0 <= x_0^{(n)} < x_1 < ...; the table
    reports n c_n (x_{j+1} - x_j) for |j| <= J with c_n = rho_n from the
    (22.3) normalization.  Callers should confirm universality at x0 first
    (universality_scan); clock behavior is its fingerprint on zeros.
    """
    j_window = int(j_window)
    w0 = density_at(mu, x0, n)
    k00 = float(kernel_diag_values(jp, n, [x0])[0])
    c_n = w0 * k00 / n
    tj = TruncatedJacobi.from_params(jp, n)
    k0 = int(tj.count_below(np.asarray([x0]))[0])  # zeros strictly below x0
    lo_idx = k0 - j_window
    hi_idx = k0 + j_window + 1
    if lo_idx < 0 or hi_idx >= n:
        raise CdkitError("fewer than %d zeros in the window around x0"
                         % (2 * j_window + 1))
    indices = np.arange(lo_idx, hi_idx + 1)
    zeros = zeros_pn_indexed(jp, n, indices)
    spacings = np.diff(zeros) * n * c_n
    j_values = np.arange(-j_window, j_window + 1)
    first_scaled = (zeros[j_window] - x0) * n * c_n  # zeros[j_window] = x_0^{(n)}
    return ClockSpacingTable(x0=float(x0), n=n, c_n=float(c_n),
                             j_values=j_values, scaled_spacings=spacings,
                             first_zero_scaled=float(first_scaled),
                             zeros=zeros)


# ---------------------------------------------------------------------------
# Regularity index and a.c.-set diagnostic
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RegularityIndexReport:
    n_list: np.ndarray
    geometric_means: np.ndarray   # (a_1...a_n)^{1/n}, log-domain
    capacity: float
    rel_gaps: np.ndarray


def regularity_index(jp, mu, n_list):
    """Geometric means of the a_n against the interval capacity (hi-lo)/4."""
    interval = _require_interval(mu)
    cap = capacity(interval)
    n_list = np.asarray(sorted(n_list), dtype=int)
    gms = np.array([np.exp(jp._log_a_cumsum[n] / n) for n in n_list])
    return RegularityIndexReport(n_list=n_list, geometric_means=gms,
                                 capacity=cap,
                                 rel_gaps=np.abs(gms - cap) / cap)


@dataclass(frozen=True)
class AcSetPoint:
    x: float
    proxy: float                  # min over nList of (1/n) K_n(x, x)
    values: np.ndarray            # (1/n) K_n(x, x) per n
    classification: str           # "bounded" | "growing" | "vanishing"


AC_SET_GROWTH_THRESHOLD = 10.0


def ac_set_diagnostic(jp, x_grid, n_list):
    """Liminf proxy min_n (1/n) K_n(x, x) with a boundedness classification.

    Purely diagnostic: "growing" when the scaled diagonal grew by more than
    the recorded threshold across the n list (off-support exponential
    growth), "vanishing" when it shrank by the same factor (point masses),
    "bounded" otherwise.  Finite-n evidence only, never an asymptotic
    verdict.
    """
    n_list = sorted(int(n) for n in n_list)
    if len(n_list) < 2:
        raise ValueError("need at least two n values")
    x_grid = np.asarray(x_grid, dtype=float)
    table = np.empty((len(n_list), len(x_grid)))
    for i, n in enumerate(n_list):
        table[i] = kernel_diag_values(jp, n, x_grid) / n
    out = []
    for j, x in enumerate(x_grid):
        vals = table[:, j]
        ratio = vals[-1] / vals[0]
        if ratio > AC_SET_GROWTH_THRESHOLD:
            cls = "growing"
        elif ratio < 1.0 / AC_SET_GROWTH_THRESHOLD:
            cls = "vanishing"
        else:
            cls = "bounded"
        out.append(AcSetPoint(x=float(x), proxy=float(np.min(vals)),
                              values=vals.copy(), classification=cls))
    return out


# ---------------------------------------------------------------------------
# Zero-counting histogram vs the equilibrium measure
# ---------------------------------------------------------------------------

def zero_histogram_vs_equilibrium(jp, mu, n, bins):
    """Per-bin mass of nu_n minus the equilibrium-measure bin mass.

    Bins partition the support interval into ``bins`` equal pieces; returns
    (edges, nu_masses, rho_masses, max deviation).
    """
    interval = _require_interval(mu)
    zeros = zeros_pn(jp, n)
    edges = np.linspace(interval[0], interval[1], bins + 1)
    counts, _ = np.histogram(zeros, bins=edges)
    nu_mass = counts / float(n)
    cdf_vals = equilibrium_cdf(interval, edges)
    rho_mass = np.diff(cdf_vals)
    max_dev = float(np.max(np.abs(nu_mass - rho_mass)))
    return edges, nu_mass, rho_mass, max_dev
