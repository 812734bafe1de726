"""Faddeeva function, complex erfc and Dawson's integral.

``w(z) = exp(-z**2) * erfc(-i z)`` is evaluated piecewise in the upper half
plane (Maclaurin series for |z| < 2, modified trapezoidal rule with pole
correction for 2 <= |z| < 7, Laplace continued fraction beyond) and
continued to the lower half plane with ``w(z) = 2 exp(-z**2) - w(-z)``.
On the real axis the real part is exactly ``exp(-x**2)``.

All functions accept scalars or arrays and return the same shape.
"""
import math

import numpy as np

from . import kernels
from .errors import DomainError, ScaledFormRequired

SQRT_PI = math.sqrt(math.pi)


def _as_complex_array(z):
    arr = np.asarray(z, dtype=np.complex128)
    if not np.all(np.isfinite(arr)):
        raise DomainError("argument must be finite")
    return arr


def _restore(arr, scalar):
    return complex(arr.reshape(-1)[0]) if scalar else arr


def faddeeva_w(z):
    """Scaled complementary error function w(z) = exp(-z^2) erfc(-iz).

    Raises
    ------
    DomainError
        If any element of `z` is NaN or infinite.
    ScaledFormRequired
        If the value itself overflows (deep in the lower half plane).
    """
    scalar = np.ndim(z) == 0
    arr = _as_complex_array(z)
    out = kernels.faddeeva(np.ascontiguousarray(arr.reshape(-1))).reshape(arr.shape)
    if not np.all(np.isfinite(out)):
        raise ScaledFormRequired("w(z) overflows double precision at the given argument")
    return _restore(out, scalar)


def faddeeva_w_prime(z):
    """Derivative w'(z) = -2 z w(z) + 2i/sqrt(pi)."""
    return -2.0 * np.asarray(z) * faddeeva_w(z) + 2j / SQRT_PI


def erfc_complex(z):
    """Complex complementary error function.

    Uses ``exp(-z^2) w(iz)`` for Re z >= 0 and the reflection
    ``2 - erfc(-z)`` otherwise, so the scaled factor never overflows on its
    own. Raises :class:`ScaledFormRequired` when erfc itself is not
    representable.
    """
    scalar = np.ndim(z) == 0
    arr = _as_complex_array(z)
    flip = arr.real < 0
    za = np.where(flip, -arr, arr)
    x, y = za.real, za.imag
    with np.errstate(over="ignore", invalid="ignore"):
        expm = np.exp(-(x - y) * (x + y) - 2j * x * y)
        val = expm * kernels.faddeeva(np.ascontiguousarray((1j * za).reshape(-1))).reshape(za.shape)
        # exp underflow against a finite w gives an exact zero; keep it
        val = np.where(expm == 0, 0.0, val)
        out = np.where(flip, 2.0 - val, val)
    if not np.all(np.isfinite(out)):
        raise ScaledFormRequired(
            "erfc(z) overflows; compose with the scaled function faddeeva_w instead")
    return _restore(out, scalar)


def dawson(x):
    """Dawson's integral D(x) = exp(-x^2) * int_0^x exp(t^2) dt for real x."""
    scalar = np.ndim(x) == 0
    arr = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise DomainError("argument must be finite")
    w = kernels.faddeeva(np.ascontiguousarray(arr.reshape(-1).astype(np.complex128)))
    out = (0.5 * SQRT_PI * w.imag).reshape(arr.shape)
    return float(out.reshape(-1)[0]) if scalar else out
