"""Lax-Phillips layer of the Stark model.

Positions x double as unperturbed energies sigma = -E x. Boundary values of F
at sigma are taken in closed form from :mod:`starklp.resolvent`; no small-eps
numerics are used outside the tests.

S-matrix sign: with the boundary value F(-Ex + i0) in the denominator,

    S(x) = 1 - (2 pi i / E) lambda sqrt(2/pi) exp(-2x^2) / (1 - lambda sqrt(2/pi) F(-Ex + i0))

is unimodular. The alternative "+" sign is kept selectable for the
adjudication test; see ``SMATRIX_SIGN``.
"""
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate

from . import kernels
from .cerf import faddeeva_w, faddeeva_w_prime
from .errors import (BoundStateError, LedgerMismatch, PoleOnAxisError, StarkError,
                     QuadratureError)
from .poles import find_pole, g, residue_at_pole
from .resolvent import F_boundary, SQRT2

SMATRIX_SIGN = -1
DENOMINATOR_FLOOR = 1e-13
POLE_CHECK_TOL = 1e-10
GAUSS_CUT = 6.5  # exp(-6.5^2) ~ 4.5e-19
PV_CHUNK = 128   # rows per padded principal-value batch


# ---------------------------------------------------------------------------
# boundary values

def F_below(xp, params):
    """lim_{eps->0+} F(-E x' - i eps) = (i pi/E) w(sqrt2 x')."""
    E = params.field_strength
    out = (1j * math.pi / E) * faddeeva_w(SQRT2 * np.asarray(xp, dtype=np.complex128))
    return complex(out) if np.ndim(out) == 0 else out


def F_above(xp, params):
    """lim_{eps->0+} F(-E x' + i eps), from the upper-branch closed form."""
    return F_boundary(-params.field_strength * np.asarray(xp, dtype=float), params, +1)


# ---------------------------------------------------------------------------
# S-matrix

@dataclass
class SMatrixSample:
    x: np.ndarray
    value: np.ndarray

    @property
    def modulus_defect(self):
        return np.abs(np.abs(self.value) - 1.0)

    @property
    def phase(self):
        return np.unwrap(np.angle(self.value))


def smatrix(x, params, sign=SMATRIX_SIGN):
    """Diagonal S-matrix S(x) on the real axis."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    a = params.strength
    E = params.field_strength
    den = 1.0 - a * np.asarray(F_above(x, params))
    if np.any(np.abs(den) < DENOMINATOR_FLOOR):
        raise PoleOnAxisError("S-matrix denominator vanishes on the real axis (bound state)")
    val = 1.0 + sign * (2j * math.pi / E) * a * np.exp(-2.0 * x * x) / den
    return SMatrixSample(x=x, value=val)


def smatrix_continued(z, params, sign=SMATRIX_SIGN):
    """S as a meromorphic function of complex energy z (S(x) at z = -E x)."""
    z = np.asarray(z, dtype=np.complex128)
    E = params.field_strength
    return 1.0 + sign * (2j * math.pi / E) * params.strength * np.exp(-2.0 * z * z / E**2) / g(z, params)


def continued_denominator(z, params):
    """1 - lambda sqrt(2/pi) F_ell at energy z, composed from the boundary value below
    the axis and the jump: F_below(x') - (2 pi i/E) exp(-2 x'^2), x' = -z/E."""
    E = params.field_strength
    xp = -np.asarray(z, dtype=np.complex128) / E
    Fl = (1j * math.pi / E) * faddeeva_w(SQRT2 * xp) - (2j * math.pi / E) * np.exp(-2.0 * xp * xp)
    return 1.0 - params.strength * Fl


def _continued_denominator_prime(z, params):
    E = params.field_strength
    xp = -complex(z) / E
    dF_dxp = (1j * math.pi / E) * SQRT2 * faddeeva_w_prime(SQRT2 * xp) \
        + (2j * math.pi / E) * 4.0 * xp * np.exp(-2.0 * xp * xp)
    return -params.strength * dF_dxp * (-1.0 / E)


def denominator_zero(params, seed, max_iter=100):
    """Zero of the boundary-value denominator, started at `seed`.

    Complex Newton; when the width is below the resolution of the real part
    the real zero of Re D is refined first and one off-axis step is taken.
    """
    z = complex(seed)
    for _ in range(max_iter):
        step = complex(continued_denominator(z, params)) / _continued_denominator_prime(z, params)
        z -= step
        if abs(step) <= 1e-15 * (1.0 + abs(z)):
            break
    if abs(z.imag) < 1e-10 * abs(z.real):
        x = z.real
        for _ in range(max_iter):
            step = (complex(continued_denominator(x, params)).real
                    / _continued_denominator_prime(x, params).real)
            x -= step
            if abs(step) <= 1e-16 * (1.0 + abs(x)):
                break
        z = x - complex(continued_denominator(x, params)) / _continued_denominator_prime(x, params)
    return z


def smatrix_pole_check(pole, params):
    """The S-matrix pole is the Wigner-Weisskopf pole: verify and report.

    Returns a dict with the denominator magnitude at z0, the independently
    located zero of the boundary-value denominator and both residues.
    Raises LedgerMismatch if the denominator does not vanish at z0.
    """
    if params.coupling == 0 or pole is None:
        return {}
    den = abs(complex(continued_denominator(pole.z0, params)))
    if den > POLE_CHECK_TOL:
        raise LedgerMismatch(f"S-matrix denominator is {den:.3g} at the located pole {pole.z0}")
    z_s = denominator_zero(params, pole.z0)
    report = {"denominator_at_z0": den, "smatrix_zero": z_s,
              "zero_distance": abs(z_s - pole.z0)}
    try:
        res = residue_at_pole(pole, params)
        report.update(residue_formula=res.formula, residue_contour=res.contour,
                      residue_relative_discrepancy=res.relative_discrepancy)
    except StarkError as exc:  # degenerate residue is reported, not fatal
        report["residue_error"] = str(exc)
    return report


# ---------------------------------------------------------------------------
# wave operators

def graded_panels(a, b, centers=(), scale=1e-3, coarse=0.25):
    """Breakpoints on [a, b]: uniform panels of width <= coarse, refined
    geometrically (factor 2) down to `scale` around each center."""
    pts = set(np.linspace(a, b, max(2, int(math.ceil((b - a) / coarse)) + 1)).tolist())
    for c in centers:
        if not (a < c < b):
            continue
        pts.add(c)
        d = scale
        while d < coarse:
            for p in (c - d, c + d):
                if a < p < b:
                    pts.add(p)
            d *= 2.0
    return np.array(sorted(pts))


@lru_cache(maxsize=8)
def _leggauss(order):
    return leggauss(order)


def gauss_nodes(breaks, order=16):
    t, w = _leggauss(order)
    lo, hi = breaks[:-1, None], breaks[1:, None]
    half = 0.5 * (hi - lo)
    nodes = (0.5 * (hi + lo) + half * t).ravel()
    weights = (half * w).ravel()
    return nodes, weights


def _resonance_centers(params, pole):
    if pole is None:
        return (), 1e-3
    x_r = -pole.z0.real / params.field_strength
    width = max(abs(pole.z0.imag) / params.field_strength, 1e-12)
    return (x_r,), min(1e-3, 0.1 * width)


def _h(xp, f, params, sign):
    # e^{-x'^2} f(x') / (1 - a F(-E x' -/+ i0))
    Fb = F_below(xp, params) if sign > 0 else F_above(xp, params)
    return np.exp(-xp * xp) * f(xp) / (1.0 - params.strength * np.asarray(Fb))


def _pv_rows(xs, f, params, sign, centers, scale, order):
    # principal value of int h(x') / (x - x') dx' for every x, in padded batches
    if len(xs) > PV_CHUNK:
        return np.concatenate([_pv_rows(xs[i:i + PV_CHUNK], f, params, sign, centers, scale, order)
                               for i in range(0, len(xs), PV_CHUNK)])
    rows = []
    for x in xs:
        U = abs(x) + GAUSS_CUT
        u_centers = [abs(x - c) for c in centers] + [0.0]
        rows.append(gauss_nodes(graded_panels(0.0, U, u_centers, scale=scale), order))
    m = max(len(u) for u, _ in rows)
    u = np.ones((len(xs), m))
    w = np.zeros((len(xs), m))
    for i, (ui, wi) in enumerate(rows):
        u[i, :len(ui)] = ui
        w[i, :len(wi)] = wi
    xcol = np.asarray(xs)[:, None]
    hm = _h((xcol - u).ravel(), f, params, sign).reshape(u.shape).astype(np.complex128)
    hp = _h((xcol + u).ravel(), f, params, sign).reshape(u.shape).astype(np.complex128)
    return kernels.pv_pair_sum(hm, hp, u, w)


def wave_op_apply(sign, f, x_grid, params, pole=None, tol=1e-8):
    """(Omega_plus f)(x) for sign=+1, (Omega_minus f)(x) for sign=-1.

    The singular factor 1/(E(x - x') -/+ i0) is split into a principal value,
    computed by pairing nodes symmetrically about x' = x, and +/- i pi delta/E,
    added analytically. Panels are graded around the resonance position
    (pass the located `pole`; it is found automatically otherwise).
    """
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    x_grid = np.asarray(x_grid, dtype=float)
    fx = np.asarray(f(x_grid), dtype=np.complex128)
    if params.coupling == 0:
        return fx.copy()
    if pole is None:
        try:
            pole = find_pole(params)
        except StarkError:
            pole = None
    centers, scale = _resonance_centers(params, pole)
    a, E = params.strength, params.field_strength
    xs = x_grid.ravel()
    pv = _pv_rows(xs, f, params, sign, centers, scale, 16)
    pv_check = _pv_rows(xs, f, params, sign, centers, scale, 24)
    err = np.abs(pv - pv_check)
    bad = err > tol * np.maximum(1.0, np.abs(pv_check))
    if np.any(bad):
        i = int(np.argmax(bad))
        raise QuadratureError("principal-value quadrature did not converge",
                              {"x": float(xs[i]), "estimate": float(err[i])})
    hx = _h(xs, f, params, sign)
    out = fx.ravel() + (a / E) * np.exp(-xs * xs) * (pv_check + sign * 1j * math.pi * hx)
    out = out.reshape(x_grid.shape)
    tail = np.abs(f(np.array([x_grid.min() - 50.0, x_grid.max() + 50.0])))
    if not np.all(np.isfinite(tail)):
        raise QuadratureError("test function is not finite far from the grid")
    return out


def wave_op_apply_oracle(sign, f, x, params, pole=None):
    """Single-point reference for (Omega f)(x) via QUADPACK's Cauchy-weight rule."""
    a, E = params.strength, params.field_strength
    centers, _ = _resonance_centers(params, pole)
    L = abs(x) + GAUSS_CUT + 1.0

    def h_re(t):
        return _h(np.array([t]), f, params, sign)[0].real

    def h_im(t):
        return _h(np.array([t]), f, params, sign)[0].imag

    def pv(fun):
        # PV int h(x')/(x - x') dx' = -PV int h(x')/(x' - x) dx'
        lo, hi = x - 1.0, x + 1.0
        pts = [c for c in centers if -L < c < L]
        core = integrate.quad(fun, lo, hi, weight="cauchy", wvar=x, epsabs=1e-13, limit=500)[0]
        left = integrate.quad(lambda t: fun(t) / (t - x), -L, lo, epsabs=1e-13, limit=500,
                              points=[p for p in pts if -L < p < lo] or None)[0]
        right = integrate.quad(lambda t: fun(t) / (t - x), hi, L, epsabs=1e-13, limit=500,
                               points=[p for p in pts if hi < p < L] or None)[0]
        return -(core + left + right)

    pv_val = complex(pv(h_re), pv(h_im))
    hx = complex(_h(np.array([x]), f, params, sign)[0])
    return complex(f(np.array([x]))[0]) + (a / E) * math.exp(-x * x) * (pv_val + sign * 1j * math.pi * hx)


# ---------------------------------------------------------------------------
# resonance state

@dataclass
class ResonanceProfile:
    center: float
    half_width: float
    norm_constant: float = 1.0

    def intensity(self, x):
        """|f_out(x)|^2 = ||n||^2 / ((x - Re z0)^2 + Im z0^2)."""
        x = np.asarray(x, dtype=float)
        return self.norm_constant / ((x - self.center) ** 2 + self.half_width**2)

    @property
    def fwhm(self):
        return 2.0 * self.half_width

    @property
    def mass(self):
        return math.pi * self.norm_constant / self.half_width

    def sample_grid(self, x_min, x_max, points=4001):
        """Nodes uniform in u = asinh((x - center)/half_width) over [x_min, x_max].

        In u the profile mass density is sech(u), smooth with bounded node
        ratios, so the trapezoid rule on these nodes converges fast."""
        u0 = math.asinh((x_min - self.center) / self.half_width)
        u1 = math.asinh((x_max - self.center) / self.half_width)
        return self.center + self.half_width * np.sinh(np.linspace(u0, u1, points))


def resonance_profile(pole, norm_constant=1.0):
    if not pole.converged:
        raise BoundStateError("pole is not converged")
    z0 = pole.z0
    if not z0.imag < 0:
        raise BoundStateError(f"pole {z0} has zero width; no Cauchy profile")
    return ResonanceProfile(center=z0.real, half_width=-z0.imag, norm_constant=norm_constant)


def semigroup_eigenfunction(pole, s_grid, norm_constant=1.0):
    """Outgoing eigenfunction e^{-i mu s} n on s > 0, zero for s < 0 (mu = z0)."""
    s = np.asarray(s_grid, dtype=float)
    n = math.sqrt(norm_constant)
    out = np.where(s > 0, n * np.exp(-1j * pole.z0 * np.where(s > 0, s, 0.0)), 0.0)
    return out.astype(np.complex128)


def outgoing_energy_form(pole, x, norm_constant=1.0):
    """i n / (x - mu), the Fourier image of the semigroup eigenfunction."""
    return 1j * math.sqrt(norm_constant) / (np.asarray(x, dtype=float) - pole.z0)
