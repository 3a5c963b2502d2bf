"""Orthogonal polynomials on the unit circle.

Szego recursion in monic form

    Phi_{n+1}(z) = z Phi_n(z) - conj(alpha_n) Phi_n^*(z),
    Phi_n^*(z)   = z^n conj(Phi_n(1/conj(z))),

with Verblunsky coefficients |alpha_n| < 1 and
rho_n = (1 - |alpha_n|^2)^{1/2}.  Orthonormal evaluation uses the forward
form rho_n phi_{n+1} = z phi_n - conj(alpha_n) phi_n^*.

Complex arithmetic throughout; real-measure symmetry is not exploited.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._sums import cdot, fsum
from .errors import (CoarseMeasureError, DegreeError, InsufficientAtomsError,
                     MeasureError)
from .measures import SupportKind

_OVERFLOW_LIMIT = 1e300


@dataclass(frozen=True)
class VerblunskyParams:
    """Verblunsky coefficients alpha_0..alpha_{N-1} with |alpha_n| < 1."""

    alpha: np.ndarray
    mass0: float
    max_degree: int

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=complex)
        if alpha.shape != (self.max_degree,):
            raise ValueError("need exactly max_degree alpha coefficients")
        if np.any(np.abs(alpha) >= 1.0):
            raise ValueError("Verblunsky coefficients must satisfy |alpha| < 1")
        if self.mass0 <= 0:
            raise ValueError("mass0 must be positive")
        alpha.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)

    @property
    def rho(self):
        return np.sqrt(1.0 - np.abs(self.alpha) ** 2)

    def check_degree(self, n):
        if not 0 <= n <= self.max_degree:
            raise DegreeError("degree %d outside stored range 0..%d"
                              % (n, self.max_degree))

    def monic_norm(self, n):
        """||Phi_n|| = rho_0...rho_{n-1} mass0^{1/2}."""
        self.check_degree(n)
        return float(np.exp(np.sum(np.log(self.rho[:n]))
                            + 0.5 * np.log(self.mass0)))


@dataclass(frozen=True)
class CirclePolyEval:
    """phi_0..phi_n, phi^*_0..phi^*_n, and the monic pair, at one point z."""

    z: complex
    phi: np.ndarray
    phi_star: np.ndarray
    monic: np.ndarray
    monic_star: np.ndarray
    overflow: bool

    @property
    def n(self):
        return len(self.phi) - 1


def szego_recurrence(mu, n_max):
    """Verblunsky coefficients of an atomic measure on the unit circle.

    Extracts conj(alpha_n) = <Phi_n^*, z Phi_n> / ||Phi_n||^2 on the atoms and
    rebuilds the monic pair (Phi_{n+1}, Phi_{n+1}^*) each step.

    Raises CoarseMeasureError when |alpha_n| >= 1 - 1e-12, which signals an
    exhausted discretization.
    """
    if mu.support is not SupportKind.UNIT_CIRCLE:
        raise MeasureError("Szego recursion requires a unit-circle measure")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    mu.require_atoms(n_max + 1, "degree-%d Szego recursion" % n_max)
    if mu.named is not None and mu.n_atoms < 8 * n_max:
        # aliasing control for discretized circle weights
        raise InsufficientAtomsError(
            "resolution too small: %d atoms < 8 * %d; rediscretize"
            % (mu.n_atoms, n_max))
    z, w = mu.points, mu.weights
    mass0 = mu.mass

    alpha = np.empty(n_max, dtype=complex)
    phi = np.ones_like(z)
    phi_star = np.ones_like(z)
    for n in range(n_max):
        z_phi = z * phi
        norm2 = fsum(w * np.abs(phi) ** 2)
        alpha_bar = cdot(phi_star, z_phi, w) / norm2
        if abs(alpha_bar) >= 1.0 - 1e-12:
            raise CoarseMeasureError(
                "|alpha_%d| = %.15f reached 1: discretization exhausted"
                % (n, abs(alpha_bar)))
        alpha[n] = np.conjugate(alpha_bar)
        phi, phi_star = z_phi - alpha_bar * phi_star, phi_star - alpha[n] * z_phi
    return VerblunskyParams(alpha, mass0, n_max)


def circle_values(vp, n, zs):
    """(phi_j(z_i), phi^*_j(z_i)) matrices for an array of points."""
    vp.check_degree(n)
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    phi = np.zeros((n + 1,) + zs.shape, dtype=complex)
    star = np.zeros_like(phi)
    phi[0] = vp.mass0 ** -0.5
    star[0] = vp.mass0 ** -0.5
    rho = vp.rho
    for k in range(n):
        z_phi = zs * phi[k]
        phi[k + 1] = (z_phi - np.conjugate(vp.alpha[k]) * star[k]) / rho[k]
        star[k + 1] = (star[k] - vp.alpha[k] * z_phi) / rho[k]
    return phi, star


def monic_circle_values(vp, n, zs):
    """(Phi_j(z_i), Phi_j^*(z_i)) monic matrices."""
    vp.check_degree(n)
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    phi = np.zeros((n + 1,) + zs.shape, dtype=complex)
    star = np.zeros_like(phi)
    phi[0] = 1.0
    star[0] = 1.0
    for k in range(n):
        z_phi = zs * phi[k]
        phi[k + 1] = z_phi - np.conjugate(vp.alpha[k]) * star[k]
        star[k + 1] = star[k] - vp.alpha[k] * z_phi
    return phi, star


def eval_circle_polys(vp, n, z):
    """Evaluate phi, phi^*, Phi, Phi^* up to degree n at one point.

    On |z| = 1, |phi_n^*(z)| = |phi_n(z)|; off the circle the values grow like
    max(|z|, 1)^n and the overflow flag is set past 1e300.
    """
    zarr = np.asarray([z], dtype=complex)
    phi, star = circle_values(vp, n, zarr)
    monic, monic_star = monic_circle_values(vp, n, zarr)
    vals = (phi[:, 0], star[:, 0], monic[:, 0], monic_star[:, 0])
    overflow = any(
        bool(np.any(~np.isfinite(v)) or np.any(np.abs(v) > _OVERFLOW_LIMIT))
        for v in vals)
    return CirclePolyEval(z=z, phi=vals[0], phi_star=vals[1], monic=vals[2],
                          monic_star=vals[3], overflow=overflow)
