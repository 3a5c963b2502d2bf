"""Shared fixtures: discretized measures and their recurrence coefficients.

The large (n = 2001) builds are session-scoped because several acceptance
experiments share them; everything below is deterministic, so sharing is
safe.
"""

import numpy as np
import pytest

from cdkit import (AtomicMeasure, NamedMeasure, SupportKind,
                   stieltjes_recurrence, szego_recurrence)


@pytest.fixture(scope="session")
def uniform_mu():
    return NamedMeasure.uniform().discretize(1024)


@pytest.fixture(scope="session")
def uniform_jp(uniform_mu):
    return stieltjes_recurrence(uniform_mu, 230)


@pytest.fixture(scope="session")
def cheb_mu():
    return NamedMeasure.chebyshev2().discretize(1024)


@pytest.fixture(scope="session")
def cheb_jp(cheb_mu):
    return stieltjes_recurrence(cheb_mu, 230)


@pytest.fixture(scope="session")
def jacobi_mu():
    return NamedMeasure.jacobi(0.5, -0.3).discretize(1024)


@pytest.fixture(scope="session")
def jacobi_jp(jacobi_mu):
    return stieltjes_recurrence(jacobi_mu, 230)


@pytest.fixture(scope="session")
def atoms3():
    return AtomicMeasure(SupportKind.REAL_LINE,
                         np.array([-1.0, 0.0, 1.0]),
                         np.array([1 / 3, 1 / 3, 1 / 3]),
                         label="(d_-1 + d_0 + d_1)/3")


@pytest.fixture(scope="session")
def atoms3_jp(atoms3):
    return stieltjes_recurrence(atoms3, 2)


@pytest.fixture(scope="session")
def lebesgue_mu():
    return NamedMeasure.lebesgue_circle().discretize(2048)


@pytest.fixture(scope="session")
def lebesgue_vp(lebesgue_mu):
    return szego_recurrence(lebesgue_mu, 230)


@pytest.fixture(scope="session")
def pointmass_circle_mu():
    # Lebesgue + unit mass at z = 1: alpha_n = 1/(n+2)
    return NamedMeasure.lebesgue_circle().with_atoms((1.0 + 0.0j, 1.0)) \
        .discretize(2048)


@pytest.fixture(scope="session")
def pointmass_circle_vp(pointmass_circle_mu):
    return szego_recurrence(pointmass_circle_mu, 230)


@pytest.fixture(scope="session")
def szego_cos_mu():
    # w(theta) = 1 + cos(theta): alpha_n = (-1)^n / (n+2)
    return NamedMeasure.szego(1.0, 0.5).discretize(2048)


@pytest.fixture(scope="session")
def szego_cos_vp(szego_cos_mu):
    return szego_recurrence(szego_cos_mu, 210)


@pytest.fixture(scope="session")
def cheb_big():
    mu = NamedMeasure.chebyshev2().discretize(8192)
    return mu, stieltjes_recurrence(mu, 2001)


@pytest.fixture(scope="session")
def uniform_big():
    mu = NamedMeasure.uniform().discretize(8192)
    return mu, stieltjes_recurrence(mu, 2001)
