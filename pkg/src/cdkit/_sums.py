"""Deterministic summation helpers.

Every reduction over measure atoms goes through these so that results are
identical regardless of caller threading or BLAS configuration: math.fsum
accumulates in fixed array order with exact intermediate rounding.
"""

import math

import numpy as np


def fsum(values):
    """Exactly-rounded sum of a real array, in fixed (array) order."""
    return math.fsum(np.asarray(values, dtype=float).ravel())


def cfsum(values):
    """Exactly-rounded sum of a complex array (real/imag parts separately)."""
    arr = np.asarray(values)
    if np.iscomplexobj(arr):
        return complex(math.fsum(arr.real.ravel()), math.fsum(arr.imag.ravel()))
    return complex(math.fsum(arr.ravel()), 0.0)


def dot(weights, values):
    """Compensated real weighted sum: sum_i weights[i] * values[i]."""
    return fsum(np.asarray(weights, dtype=float) * np.asarray(values, dtype=float))


def cdot(f, g, weights):
    """L2(d mu) pairing on atoms: sum_i w_i * conj(f_i) * g_i.

    Conjugate-linear in the first argument.
    """
    prod = np.conjugate(np.asarray(f)) * np.asarray(g) * np.asarray(weights)
    return cfsum(prod)
