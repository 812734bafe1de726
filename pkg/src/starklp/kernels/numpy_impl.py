"""Vectorized numpy versions of the kernels in :mod:`starklp.kernels.jit`.

Same regions and constants, evaluated with masks instead of per-element
branches. Used when ``STARK_DISABLE_JIT`` is set or numba is unavailable.
"""
import numpy as np

from .constants import (CF_DEPTH, INV_SQRT_PI, SERIES_RADIUS, SERIES_TERMS,
                        TRAP_H, TRAP_RADIUS, TRAP_TERMS, TWO_OVER_SQRT_PI)


def _w_series(z):
    iz = 1j * z
    iz2 = iz * iz
    te = np.ones_like(z)
    to = iz * TWO_OVER_SQRT_PI
    s = te + to
    for n in range(0, SERIES_TERMS, 2):
        te = te * iz2 / (0.5 * n + 1.0)
        to = to * iz2 / (0.5 * n + 1.5)
        s = s + te + to
    return s


def _w_trapezoid(z):
    h = TRAP_H
    cell = z.real / h - np.floor(z.real / h)
    z2 = (z * z)[:, None]
    k = np.arange(1, TRAP_TERMS + 1)
    a_plain = k * h
    a_shift = (k - 0.5) * h
    s_plain = (np.exp(-a_plain**2) / (z2 - a_plain**2)).sum(axis=1)
    s_shift = (np.exp(-a_shift**2) / (z2 - a_shift**2)).sum(axis=1)
    z2 = z2[:, 0]
    plain = (2j * h * z / np.pi * s_plain + 1j * h / (np.pi * z)
             + 2.0 * np.exp(-z2) / (1.0 - np.exp(-2j * np.pi * z / h)))
    shifted = (2j * h * z / np.pi * s_shift
               + 2.0 * np.exp(-z2) / (1.0 + np.exp(-2j * np.pi * z / h)))
    return np.where((cell >= 0.25) & (cell <= 0.75), plain, shifted)


def _w_contfrac(z):
    r = np.zeros_like(z)
    for k in range(CF_DEPTH, 0, -1):
        r = (0.5 * k) / (z - r)
    return 1j * INV_SQRT_PI / (z - r)


def _w_upper(z):
    out = np.empty_like(z)
    r = np.abs(z)
    m1 = r < SERIES_RADIUS
    m2 = (r >= SERIES_RADIUS) & (r < TRAP_RADIUS)
    m3 = r >= TRAP_RADIUS
    with np.errstate(all="ignore"):
        out[m1] = _w_series(z[m1])
        out[m2] = _w_trapezoid(z[m2])
        out[m3] = _w_contfrac(z[m3])
    return out


def faddeeva(z):
    z = np.asarray(z, dtype=np.complex128)
    out = np.full(z.shape, np.nan + 1j * np.nan)
    finite = np.isfinite(z)
    x, y = z.real, z.imag
    lower = finite & (y < 0)
    zu = np.where(lower, -z, z)
    zu = np.where(finite, zu, 0.0)
    wu = _w_upper(zu)
    with np.errstate(over="ignore", invalid="ignore"):
        expm = np.exp((-(x - y) * (x + y)) + 1j * (-2.0 * x * y))
        out = np.where(lower, 2.0 * expm - wu, wu)
        axis = finite & (y == 0)
        out = np.where(axis, np.exp(-x * x) + 1j * wu.imag, out)
    out[~finite] = np.nan + 1j * np.nan
    return out


def faddeeva_scalar(z):
    return complex(faddeeva(np.array([z], dtype=np.complex128))[0])


def spectral_sum(weights, energies, times):
    return np.exp(-1j * np.outer(times, energies)) @ weights.astype(np.complex128)


def pv_pair_sum(h_minus, h_plus, u, wts):
    return np.sum(wts * (h_minus - h_plus) / u, axis=1)
