"""numba implementations of the hot kernels.

Region boundaries and truncation constants are shared with
:mod:`starklp.kernels.numpy_impl` through :mod:`starklp.kernels.constants`.
"""
import cmath
import math

import numpy as np
from numba import njit, prange

from .constants import (CF_DEPTH, INV_SQRT_PI, SERIES_RADIUS, TRAP_H,
                        TRAP_RADIUS, TRAP_TERMS, TWO_OVER_SQRT_PI)


@njit(cache=True)
def _w_series(z):
    # w(z) = sum_n (iz)^n / Gamma(n/2 + 1), even and odd chains separately
    iz = 1j * z
    iz2 = iz * iz
    te = 1.0 + 0.0j
    to = iz * TWO_OVER_SQRT_PI
    s = te + to
    n = 0
    while n < 200:
        te = te * iz2 / (0.5 * n + 1.0)
        to = to * iz2 / (0.5 * n + 1.5)
        n += 2
        s += te + to
        if abs(te) + abs(to) < 1e-17 * abs(s):
            break
    return s


@njit(cache=True)
def _w_trapezoid(z):
    # modified trapezoidal rule with pole correction, 0 <= Im z < pi/h
    h = TRAP_H
    cell = z.real / h - math.floor(z.real / h)
    z2 = z * z
    s = 0.0j
    if 0.25 <= cell <= 0.75:
        for k in range(1, TRAP_TERMS + 1):
            a = k * h
            s += math.exp(-a * a) / (z2 - a * a)
        s = 2j * h * z / math.pi * s + 1j * h / (math.pi * z)
        return s + 2.0 * cmath.exp(-z2) / (1.0 - cmath.exp(-2j * math.pi * z / h))
    for k in range(1, TRAP_TERMS + 1):
        a = (k - 0.5) * h
        s += math.exp(-a * a) / (z2 - a * a)
    s = 2j * h * z / math.pi * s
    return s + 2.0 * cmath.exp(-z2) / (1.0 + cmath.exp(-2j * math.pi * z / h))


@njit(cache=True)
def _w_contfrac(z):
    r = 0.0j
    for k in range(CF_DEPTH, 0, -1):
        r = (0.5 * k) / (z - r)
    return 1j * INV_SQRT_PI / (z - r)


@njit(cache=True)
def _w_upper(z):
    r = abs(z)
    if r < SERIES_RADIUS:
        return _w_series(z)
    if r < TRAP_RADIUS:
        return _w_trapezoid(z)
    return _w_contfrac(z)


@njit(cache=True)
def _expm_sq(z):
    # exp(-z^2) with the real part of z^2 formed as (x-y)(x+y)
    x = z.real
    y = z.imag
    return cmath.exp(complex(-(x - y) * (x + y), -2.0 * x * y))


@njit(cache=True)
def faddeeva_scalar(z):
    x = z.real
    y = z.imag
    if not (math.isfinite(x) and math.isfinite(y)):
        return complex(math.nan, math.nan)
    if y == 0.0:
        return complex(math.exp(-x * x), _w_upper(z).imag)
    if y > 0.0:
        return _w_upper(z)
    return 2.0 * _expm_sq(z) - _w_upper(-z)


@njit(cache=True, parallel=True)
def faddeeva(z):
    out = np.empty(z.shape[0], dtype=np.complex128)
    for i in prange(z.shape[0]):
        out[i] = faddeeva_scalar(z[i])
    return out


@njit(cache=True, parallel=True)
def spectral_sum(weights, energies, times):
    out = np.empty(times.shape[0], dtype=np.complex128)
    for j in prange(times.shape[0]):
        t = times[j]
        re = 0.0
        im = 0.0
        for k in range(energies.shape[0]):
            ph = energies[k] * t
            re += weights[k] * math.cos(ph)
            im -= weights[k] * math.sin(ph)
        out[j] = complex(re, im)
    return out


@njit(cache=True, parallel=True)
def pv_pair_sum(h_minus, h_plus, u, wts):
    """Sum_j wts[i, j] * (h(x_i - u_ij) - h(x_i + u_ij)) / u_ij for every row i."""
    n, m = h_minus.shape
    out = np.empty(n, dtype=np.complex128)
    for i in prange(n):
        acc = 0.0j
        for j in range(m):
            acc += wts[i, j] * (h_minus[i, j] - h_plus[i, j]) / u[i, j]
        out[i] = acc
    return out
