"""The Stieltjes function F(z) = int exp(-2x^2) / (z + E x) dx and the resolvent.

With E > 0 the defining integral is, in terms of the Faddeeva function,

    F(z) = -(i pi / E) w( sqrt2 z / E)    for Im z > 0,
    F(z) =  (i pi / E) w(-sqrt2 z / E)    for Im z < 0.

The second expression is the printed closed form with erfc; it belongs to the
lower half plane. The continuation of the upper branch through the cut,
F_ell(z) = -(i pi / E) w(sqrt2 z / E), is entire and is what the pole
condition uses.
"""
import enum
import math

import numpy as np
from scipy import integrate

from .cerf import faddeeva_w, faddeeva_w_prime
from .errors import BoundaryValueError, PoleProximityError
from .model import SQRT_2_OVER_PI

SQRT2 = math.sqrt(2.0)
QUAD_HALF_WIDTH = 4.6
POLE_TOL = 1e-13


class SheetTag(enum.Enum):
    PHYSICAL = "physical"
    SECOND_SHEET = "second"


def _scalar_or_array(z):
    return np.ndim(z) == 0


def F(z, params):
    """F(z) on the half plane containing z. Raises BoundaryValueError on the real axis."""
    z = np.asarray(z, dtype=np.complex128)
    if np.any(z.imag == 0):
        raise BoundaryValueError("F is discontinuous on the real axis; use F_above or F_below")
    E = params.field_strength
    upper = z.imag > 0
    arg = np.where(upper, SQRT2 * z / E, -SQRT2 * z / E)
    sign = np.where(upper, -1.0, 1.0)
    out = sign * (1j * math.pi / E) * faddeeva_w(arg)
    return complex(out) if out.ndim == 0 else out


def F_ell(z, params):
    """Entire continuation of the upper-half-plane branch of F."""
    E = params.field_strength
    out = -(1j * math.pi / E) * faddeeva_w(SQRT2 * np.asarray(z, dtype=np.complex128) / E)
    return complex(out) if np.ndim(out) == 0 else out


def F_ell_prime(z, params):
    E = params.field_strength
    zeta = SQRT2 * np.asarray(z, dtype=np.complex128) / E
    out = -(1j * math.pi / E) * (SQRT2 / E) * faddeeva_w_prime(zeta)
    return complex(out) if np.ndim(out) == 0 else out


def F_jump(xi, params):
    """F(xi + i0) - F(xi - i0) = -(2 pi i / E) exp(-2 xi^2 / E^2)."""
    E = params.field_strength
    out = -(2j * math.pi / E) * np.exp(-2.0 * np.square(np.asarray(xi, dtype=float)) / E**2)
    return complex(out) if np.ndim(out) == 0 else out


def F_boundary(xi, params, side):
    """Boundary value of F at real energy xi from above (side=+1) or below (side=-1)."""
    E = params.field_strength
    xi = np.asarray(xi, dtype=float)
    if side > 0:
        out = -(1j * math.pi / E) * faddeeva_w(SQRT2 * xi / E)
    else:
        out = (1j * math.pi / E) * faddeeva_w(-SQRT2 * xi / E)
    return complex(out) if np.ndim(out) == 0 else out


def F_by_quadrature(z, params, epsabs=1e-12):
    """Adaptive Gauss-Kronrod evaluation of the defining integral on |x| <= 4.6.

    Test oracle only; independent of the Faddeeva path.
    """
    z = complex(z)
    E = params.field_strength
    L = QUAD_HALF_WIDTH

    def re(x):
        return (np.exp(-2 * x * x) / (z + E * x)).real

    def im(x):
        return (np.exp(-2 * x * x) / (z + E * x)).imag

    # the integrand peaks near x = -Re z / E when z is close to the axis
    peak = -z.real / E
    pts = [peak] if -L < peak < L else None
    r = integrate.quad(re, -L, L, epsabs=epsabs, epsrel=1e-13, limit=400, points=pts)[0]
    i = integrate.quad(im, -L, L, epsabs=epsabs, epsrel=1e-13, limit=400, points=pts)[0]
    return complex(r, i)


def _check_denominator(den, coupled):
    den = np.asarray(den)
    if np.any(np.abs(den) < POLE_TOL * (1.0 + np.abs(coupled))):
        raise PoleProximityError("1 - lambda sqrt(2/pi) F(z) vanishes: z is at a pole")


def G_kernel(x, xp, z, params):
    """Resolvent kernel <x|G(z)|x'>.

    Returns ``(delta_coefficient, smooth)`` where the distributional part is
    ``delta_coefficient * delta(x - x')``.
    """
    x = np.asarray(x, dtype=float)
    xp = np.asarray(xp, dtype=float)
    E = params.field_strength
    a = params.strength
    Fz = F(z, params)
    den = 1.0 - a * Fz
    _check_denominator(den, a * Fz)
    delta_coef = 1.0 / (z + E * x)
    smooth = a * np.exp(-(x * x + xp * xp)) / ((z + E * x) * (z + E * xp) * den)
    if smooth.ndim == 0:
        return complex(delta_coef), complex(smooth)
    return delta_coef, smooth


def phi_G_phi(z, params, sheet=SheetTag.PHYSICAL):
    """(phi|G(z)|phi) = sqrt(2/pi) F / (1 - lambda sqrt(2/pi) F).

    On the second sheet F is replaced by its continuation F_ell.
    """
    z = np.asarray(z, dtype=np.complex128)
    if sheet is SheetTag.PHYSICAL:
        Fz = F(z, params)
    else:
        Fz = F_ell(z, params)
    a = params.strength
    den = 1.0 - a * Fz
    _check_denominator(den, a * Fz)
    out = SQRT_2_OVER_PI * np.asarray(Fz) / den
    return complex(out) if np.ndim(out) == 0 else out
