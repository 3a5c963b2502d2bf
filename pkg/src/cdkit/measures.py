"""Measures with finite moments on the real line or the unit circle.

Everything downstream (recurrences, kernels, quadrature, experiments) runs on
:class:`AtomicMeasure`, a finite weighted point set.  Analytic weights are
described by :class:`NamedMeasure` and turned into atoms by
:meth:`NamedMeasure.discretize`, which uses an exact Gauss-type rule for each
weight family so that moments match the analytic measure to ~1e-12 up to the
documented degree bound.

Conventions
-----------
* All named weight families are probability-normalized; extra point masses are
  appended verbatim on top, so total mass may exceed 1.  No operation ever
  renormalizes silently.
* All reductions over atoms use exactly-rounded summation in fixed atom order
  (see :mod:`cdkit._sums`), so results are deterministic under any threading.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.special import betainc, roots_jacobi, roots_legendre

from ._sums import cdot, cfsum, fsum
from .errors import InsufficientAtomsError, MeasureError

MIN_RESOLUTION = 64

# Atoms closer than this (relative to the support spread) are merged when
# point masses are added; AtomicMeasure construction rejects them outright.
_DUPLICATE_RTOL = 1e-12


class SupportKind(enum.Enum):
    """Where the measure lives: OPRL atoms are real, OPUC atoms unit-modulus."""

    REAL_LINE = "real_line"
    UNIT_CIRCLE = "unit_circle"


@dataclass(frozen=True)
class AtomicMeasure:
    """A finite positive weighted point set.

    Parameters
    ----------
    support : SupportKind
    points : array
        Real (REAL_LINE) or unit-modulus complex (UNIT_CIRCLE), pairwise
        distinct.
    weights : array
        Strictly positive, same length as ``points``.
    label : str
        Free-form description, carried through provenance records.
    named : NamedMeasure or None
        The analytic measure this was discretized from, when applicable.
    """

    support: SupportKind
    points: np.ndarray
    weights: np.ndarray
    label: str = ""
    named: "NamedMeasure | None" = field(default=None, compare=False)

    def __post_init__(self):
        if self.support is SupportKind.REAL_LINE:
            pts = np.asarray(self.points, dtype=float)
        else:
            pts = np.asarray(self.points, dtype=complex)
            if pts.size and np.max(np.abs(np.abs(pts) - 1.0)) > 1e-9:
                raise MeasureError("unit-circle atoms must have |z| = 1")
        wts = np.asarray(self.weights, dtype=float)
        if pts.ndim != 1 or wts.shape != pts.shape:
            raise MeasureError("points and weights must be 1-d and congruent")
        if pts.size == 0:
            raise MeasureError("measure needs at least one atom")
        if np.any(wts <= 0.0) or not np.all(np.isfinite(wts)):
            raise MeasureError("weights must be positive and finite")
        if _has_duplicates(pts, self.spread_of(pts, self.support)):
            raise MeasureError("atoms must be pairwise distinct")
        pts.setflags(write=False)
        wts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", wts)

    @staticmethod
    def spread_of(pts, support):
        if support is SupportKind.UNIT_CIRCLE:
            return 2.0
        return float(np.max(pts.real) - np.min(pts.real)) or 1.0

    @property
    def spread(self):
        return self.spread_of(self.points, self.support)

    @property
    def n_atoms(self):
        return int(self.points.size)

    @property
    def mass(self):
        return fsum(self.weights)

    def scaled(self, c):
        """The measure c*mu, c > 0."""
        if c <= 0:
            raise MeasureError("scaling factor must be positive")
        return AtomicMeasure(self.support, self.points, self.weights * c,
                             label=self.label, named=None)

    def require_atoms(self, minimum, what=""):
        if self.n_atoms < minimum:
            raise InsufficientAtomsError(
                "insufficient atoms: %d available, %d required%s"
                % (self.n_atoms, minimum, " for " + what if what else ""))


def _has_duplicates(pts, spread):
    if pts.size < 2:
        return False
    if np.iscomplexobj(pts):
        srt = pts[np.argsort(np.angle(pts))]
        gaps = np.abs(np.diff(srt))
        gaps = np.append(gaps, np.abs(srt[0] - srt[-1]))  # wrap-around pair
        return bool(np.min(gaps) <= _DUPLICATE_RTOL * spread)
    gaps = np.diff(np.sort(pts))
    return bool(np.min(gaps) <= _DUPLICATE_RTOL * spread)


def add_point_mass(mu, z0, lam):
    """mu + lam * delta_{z0}, merging with an existing atom at z0.

    ``lam`` may be negative down to -mu({z0}); hitting the boundary removes
    the atom.
    """
    pts = mu.points
    if mu.support is SupportKind.UNIT_CIRCLE:
        z0 = complex(z0)
        if abs(abs(z0) - 1.0) > 1e-9:
            raise MeasureError("point mass on the circle must have |z0| = 1")
    else:
        z0 = float(np.real(z0))
    dist = np.abs(pts - z0)
    hit = int(np.argmin(dist))
    tol = _DUPLICATE_RTOL * mu.spread
    existing = float(mu.weights[hit]) if dist[hit] <= tol else 0.0
    if lam < -existing - 1e-15 * max(1.0, existing):
        raise MeasureError("lambda = %g below -mu({z0}) = %g" % (lam, -existing))
    new_w = existing + lam
    label = mu.label
    if dist[hit] <= tol:
        keep = np.ones(pts.size, dtype=bool)
        keep[hit] = False
        if new_w > 1e-14 * max(1.0, existing):
            points = np.concatenate([pts[keep], [z0]])
            weights = np.concatenate([mu.weights[keep], [new_w]])
        else:  # full removal
            points, weights = pts[keep], mu.weights[keep]
    else:
        if lam <= 0.0:
            raise MeasureError("negative point mass at a point with no atom")
        points = np.concatenate([pts, [z0]])
        weights = np.concatenate([mu.weights, [lam]])
    return AtomicMeasure(mu.support, points, weights, label=label, named=None)


# ---------------------------------------------------------------------------
# Named (analytic) measures
# ---------------------------------------------------------------------------

_REAL_KINDS = ("uniform", "chebyshev2", "jacobi")
_CIRCLE_KINDS = ("lebesgue_circle", "szego")


@dataclass(frozen=True)
class NamedMeasure:
    """An analytic weight family plus optional extra point masses.

    Kinds
    -----
    uniform(lo, hi)
        Probability measure dx/(hi-lo) on [lo, hi].
    chebyshev2
        (2 pi)^{-1} sqrt(4-x^2) dx on [-2, 2]; recurrence a_n = 1, b_n = 0.
    jacobi(a, b)
        C_{a,b} (1-x)^a (1+x)^b dx on [-1, 1], a, b > -1, C normalizing.
    lebesgue_circle
        d theta / 2 pi on the unit circle.
    szego(c0, c1, ...)
        w(theta) d theta / 2 pi with the trigonometric polynomial
        w(theta) = c0 + sum_k 2 Re(c_k e^{i k theta}); must be positive.
    """

    kind: str
    params: tuple = ()
    extra_atoms: tuple = ()  # ((point, weight), ...)

    def __post_init__(self):
        if self.kind not in _REAL_KINDS + _CIRCLE_KINDS:
            raise MeasureError("unsupported measure kind %r" % (self.kind,))
        if self.kind == "jacobi":
            a, b = self.params
            if a <= -1 or b <= -1:
                raise MeasureError("jacobi weight requires a > -1 and b > -1")
        if self.kind == "uniform":
            lo, hi = self.params
            if not hi > lo:
                raise MeasureError("uniform interval requires hi > lo")
        for point, weight in self.extra_atoms:
            if weight <= 0:
                raise MeasureError("extra atoms must carry positive mass")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def uniform(lo=-1.0, hi=1.0):
        return NamedMeasure("uniform", (float(lo), float(hi)))

    @staticmethod
    def chebyshev2():
        return NamedMeasure("chebyshev2")

    @staticmethod
    def jacobi(a, b):
        return NamedMeasure("jacobi", (float(a), float(b)))

    @staticmethod
    def lebesgue_circle():
        return NamedMeasure("lebesgue_circle")

    @staticmethod
    def szego(*coeffs):
        if not coeffs:
            raise MeasureError("szego weight needs at least the constant term")
        c = tuple(complex(v) for v in coeffs)
        if abs(c[0].imag) > 0 or c[0].real <= 0:
            raise MeasureError("szego constant term must be real positive")
        return NamedMeasure("szego", c)

    def with_atoms(self, *atoms):
        """Attach extra point masses ((point, weight), ...)."""
        return NamedMeasure(self.kind, self.params,
                            self.extra_atoms + tuple(atoms))

    # -- geometry ----------------------------------------------------------

    @property
    def support(self):
        if self.kind in _CIRCLE_KINDS:
            return SupportKind.UNIT_CIRCLE
        return SupportKind.REAL_LINE

    @property
    def interval(self):
        """Support interval (lo, hi) of the weight part (real-line kinds)."""
        if self.kind == "uniform":
            return self.params
        if self.kind == "chebyshev2":
            return (-2.0, 2.0)
        if self.kind == "jacobi":
            return (-1.0, 1.0)
        raise MeasureError("circle measures have no support interval")

    @property
    def label(self):
        core = self.kind
        if self.params:
            core += "(" + ",".join("%g" % np.real(p) if np.isreal(p) else str(p)
                                   for p in self.params) + ")"
        if self.extra_atoms:
            core += "+" + "+".join("%g*delta(%s)" % (w, p)
                                   for p, w in self.extra_atoms)
        return core

    # -- densities and CDF -------------------------------------------------

    def weight_density(self, x):
        """Pointwise density w: dmu = w(x) dx on R, or w(theta) dtheta/2pi.

        For circle kinds ``x`` is the angle theta.
        """
        scalar = np.ndim(x) == 0
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if self.kind == "uniform":
            lo, hi = self.params
            out = np.where((x >= lo) & (x <= hi), 1.0 / (hi - lo), 0.0)
        elif self.kind == "chebyshev2":
            out = np.where(np.abs(x) <= 2.0,
                           np.sqrt(np.maximum(4.0 - x * x, 0.0)) / (2 * np.pi),
                           0.0)
        elif self.kind == "jacobi":
            a, b = self.params
            c = _jacobi_norm(a, b)
            inside = (x > -1.0) & (x < 1.0)
            out = np.zeros_like(x)
            out[inside] = c * (1 - x[inside]) ** a * (1 + x[inside]) ** b
        elif self.kind == "lebesgue_circle":
            out = np.ones_like(x)
        elif self.kind == "szego":
            out = _szego_values(self.params, x)
        else:
            raise MeasureError(self.kind)
        return float(out[0]) if scalar else out

    def cdf(self, x0, closed=True):
        """Closed-form mu((-inf, x0]) (or open) for real-line kinds."""
        if self.support is not SupportKind.REAL_LINE:
            raise MeasureError("cdf requires a real-line measure")
        x0 = float(x0)
        if self.kind == "uniform":
            lo, hi = self.params
            base = min(max((x0 - lo) / (hi - lo), 0.0), 1.0)
        elif self.kind == "chebyshev2":
            if x0 <= -2.0:
                base = 0.0
            elif x0 >= 2.0:
                base = 1.0
            else:
                base = (0.5 + x0 * math.sqrt(4.0 - x0 * x0) / (4 * math.pi)
                        + math.asin(x0 / 2.0) / math.pi)
        elif self.kind == "jacobi":
            a, b = self.params
            u = min(max((x0 + 1.0) / 2.0, 0.0), 1.0)
            base = float(betainc(b + 1.0, a + 1.0, u))
        else:
            raise MeasureError(self.kind)
        atoms = fsum([w for p, w in self.extra_atoms
                      if (p <= x0 if closed else p < x0)] or [0.0])
        return base + atoms

    @property
    def mass(self):
        weight_mass = (self.params[0].real if self.kind == "szego" else 1.0)
        return weight_mass + fsum([w for _, w in self.extra_atoms] or [0.0])

    # -- discretization ------------------------------------------------------

    def discretize(self, resolution):
        """Quadrature discretization into an AtomicMeasure.

        The atoms reproduce the analytic moments exactly (to roundoff) up to
        the degree bound: monomial moments of degree <= 2*resolution - 1 for
        the interval kinds; Toeplitz moments m_{jk} for
        |j - k| <= resolution - 1 - deg(w) on the circle.  Extra atoms are
        appended verbatim (merged if they collide with a quadrature node).
        """
        resolution = int(resolution)
        if resolution < MIN_RESOLUTION:
            raise MeasureError("resolution %d below minimum %d"
                               % (resolution, MIN_RESOLUTION))
        if self.kind == "uniform":
            lo, hi = self.params
            x, w = roots_legendre(resolution)
            pts = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
            wts = 0.5 * w  # probability normalization
        elif self.kind == "chebyshev2":
            k = np.arange(1, resolution + 1, dtype=float)
            theta = k * np.pi / (resolution + 1)
            pts = 2.0 * np.cos(theta[::-1])
            wts = (2.0 / (resolution + 1)) * np.sin(theta[::-1]) ** 2
        elif self.kind == "jacobi":
            a, b = self.params
            x, w = roots_jacobi(resolution, a, b)
            pts = x
            wts = w * _jacobi_norm(a, b)
        elif self.kind == "lebesgue_circle":
            theta = 2 * np.pi * np.arange(resolution) / resolution
            pts = np.exp(1j * theta)
            wts = np.full(resolution, 1.0 / resolution)
        elif self.kind == "szego":
            theta = 2 * np.pi * np.arange(resolution) / resolution
            vals = _szego_values(self.params, theta)
            floor = 1e-12 * float(np.max(np.abs(vals)))
            if np.min(vals) < -floor:
                raise MeasureError("szego weight is negative on the grid")
            keep = vals > floor  # grid zeros of the weight carry no mass
            pts = np.exp(1j * theta[keep])
            wts = vals[keep] / resolution
        else:
            raise MeasureError("unsupported kind %r" % (self.kind,))
        mu = AtomicMeasure(self.support, pts, wts, label=self.label, named=self)
        for point, weight in self.extra_atoms:
            mu = add_point_mass(mu, point, weight)
        return AtomicMeasure(mu.support, mu.points, mu.weights,
                             label=self.label, named=self)


def _jacobi_norm(a, b):
    """1 / integral of (1-x)^a (1+x)^b over [-1, 1]."""
    return math.exp(-((a + b + 1) * math.log(2.0)
                      + math.lgamma(a + 1) + math.lgamma(b + 1)
                      - math.lgamma(a + b + 2)))


def _szego_values(coeffs, theta):
    theta = np.asarray(theta, dtype=float)
    vals = np.full_like(theta, float(np.real(coeffs[0])))
    for k, c in enumerate(coeffs[1:], start=1):
        vals += 2.0 * (np.real(c) * np.cos(k * theta)
                       - np.imag(c) * np.sin(k * theta))
    return vals


# ---------------------------------------------------------------------------
# Moment machinery
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MomentMatrix:
    """Moments m_{jk} = integral of conj(z)^j z^k dmu, 0 <= j, k <= n."""

    n: int
    matrix: np.ndarray
    structure: str  # "hankel" | "toeplitz"

    def __post_init__(self):
        self.matrix.setflags(write=False)


def moments(mu, n):
    """Moment matrix of degree n (fixed-order compensated sums over atoms).

    Hankel entries depend only on j+k and Toeplitz entries only on j-k
    *exactly* (each distinct moment is computed once and copied), so the
    structural constraints hold bitwise.
    """
    if n < 0:
        raise ValueError("degree must be >= 0")
    if mu.support is SupportKind.REAL_LINE:
        x, w = mu.points, mu.weights
        powers = np.empty(2 * n + 1)
        xk = np.ones_like(x)
        for m in range(2 * n + 1):
            powers[m] = fsum(w * xk)
            xk = xk * x
        mat = np.empty((n + 1, n + 1))
        for j in range(n + 1):
            mat[j, :] = powers[j:j + n + 1]
        return MomentMatrix(n, mat, "hankel")
    z, w = mu.points, mu.weights
    diag = np.empty(2 * n + 1, dtype=complex)  # diag[d + n] = sum w z^d
    zk = np.ones_like(z)
    for d in range(n + 1):
        diag[n + d] = cfsum(w * zk)
        diag[n - d] = np.conjugate(diag[n + d])
        zk = zk * z
    mat = np.empty((n + 1, n + 1), dtype=complex)
    for j in range(n + 1):
        for k in range(n + 1):
            mat[j, k] = diag[n + k - j]
    return MomentMatrix(n, mat, "toeplitz")


def inner_product(f, g, mu):
    """<f, g> = sum_atoms w * conj(f(p)) * g(p), conjugate-linear in f.

    ``f`` and ``g`` are monomial coefficient sequences (ascending).
    """
    fv = npoly.polyval(mu.points, np.asarray(f))
    gv = npoly.polyval(mu.points, np.asarray(g))
    return cdot(fv, gv, mu.weights)


def cdf(mu, x0, closed=True):
    """Atomic CDF: total weight of atoms with point < x0 (<= when closed)."""
    if mu.support is not SupportKind.REAL_LINE:
        raise MeasureError("cdf requires a real-line measure")
    mask = mu.points <= x0 if closed else mu.points < x0
    if not np.any(mask):
        return 0.0
    return fsum(mu.weights[mask])
