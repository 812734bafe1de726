"""Survival amplitude A(t) = (phi, exp(-iHt) phi) by three independent routes.

Contour
    Inverse-Laplace integral of (phi|G(z)|phi) along the horizontal line
    Im z = eta > 0. A rational function with poles at a = lambda - i b that
    matches the first five spectral moments is subtracted first; its
    transform is exact, and the remainder decays like |xi|^-6, so a finite
    window with adaptive Gauss-Kronrod captures it.
PoleApprox
    c exp(-i z0 t) with c the residue of (phi|G|phi) on the second sheet.
Oracle
    Dense eigendecomposition of the grid Hamiltonian; A(t) = sum_k w_k exp(-i e_k t).
"""
import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from . import kernels
from .errors import ConfigurationError, GridError, QuadratureError
from .model import SQRT_2_OVER_PI, GridSpec, grid_state, hamiltonian_grid
from .poles import g_prime
from .resolvent import F_ell, SheetTag, phi_G_phi

CONTOUR_HEIGHT = 0.1
SUBTRACTION_DEPTH = 1.0     # b in a = lambda - i b, in units of E
ENDPOINT_TOL = 1e-12
CONTOUR_TOL = 1e-10
DEFAULT_HALF_WIDTH = 6.0
DEFAULT_POINTS = 801
NODE_RTOL = 1e-12


class AmplitudeMethod(enum.Enum):
    CONTOUR = "Contour"
    POLE = "PoleApprox"
    ORACLE = "Oracle"


@dataclass(frozen=True)
class OracleSpectrum:
    eigenvalues: np.ndarray
    weights: np.ndarray
    grid: GridSpec = None

    def __post_init__(self):
        if self.eigenvalues.shape != self.weights.shape:
            raise ValueError("eigenvalues and weights differ in length")

    @property
    def total_weight(self):
        return float(np.sum(self.weights))

    def local_spacing(self):
        return np.gradient(self.eigenvalues)

    def density(self):
        """Weight per unit energy at each eigenvalue."""
        return self.weights / self.local_spacing()


@dataclass
class AmplitudeSeries:
    times: np.ndarray
    values: np.ndarray
    method: AmplitudeMethod
    diagnostics: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.times.shape != self.values.shape:
            raise ValueError("times and values differ in length")
        if np.any(self.times < 0):
            raise ValueError("times must be >= 0")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("non-finite amplitude")
        if self.method is AmplitudeMethod.ORACLE and np.max(np.abs(self.values), initial=0) > 1 + 1e-6:
            raise ValueError("oracle amplitude exceeds the unitarity bound")

    def at(self, t):
        """Value at an exact node; no interpolation."""
        idx = np.nonzero(np.abs(self.times - t) <= NODE_RTOL * max(1.0, abs(t)))[0]
        if idx.size == 0:
            raise GridError(f"t = {t!r} is not a node of the series")
        return self.values[idx[0]]


# ---------------------------------------------------------------------------
# grids and the oracle

def default_grid(params, z0=None):
    """Frozen L = 6, N = 801 for E = 1, |lambda| <= 4; otherwise the scaling rule
    L >= max(3.8, 3|z0|/E) at the same energy spacing."""
    E, lam = params.field_strength, params.coupling
    if E == 1.0 and abs(lam) <= 4.0:
        return GridSpec(DEFAULT_HALF_WIDTH, DEFAULT_POINTS)
    scale = abs(z0) if z0 is not None else abs(lam) + E
    L = max(3.8, 3.0 * scale / E, DEFAULT_HALF_WIDTH)
    dx = 2.0 * DEFAULT_HALF_WIDTH / (DEFAULT_POINTS - 1) / E
    n = int(math.ceil(2.0 * L / dx)) + 1
    return GridSpec(L, n | 1)


def oracle_spectrum(params, grid=None):
    grid = grid or default_grid(params)
    H = hamiltonian_grid(params, grid)
    try:
        vals, vecs = np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:
        raise ArithmeticError(f"eigensolver failed: {exc}") from exc
    amp = vecs.T @ grid_state(grid)
    return OracleSpectrum(eigenvalues=vals, weights=amp * amp, grid=grid)


def survival_oracle(spectrum, times):
    t = np.ascontiguousarray(times, dtype=float)
    vals = kernels.spectral_sum(np.ascontiguousarray(spectrum.weights),
                                np.ascontiguousarray(spectrum.eigenvalues), t)
    return AmplitudeSeries(t, vals, AmplitudeMethod.ORACLE)


def spectral_peak(spectrum, window=None):
    """Eigenvalue with the largest weight density, optionally inside (lo, hi)."""
    dens = spectrum.density()
    e = spectrum.eigenvalues
    mask = np.ones_like(e, dtype=bool)
    if window is not None:
        mask = (e >= window[0]) & (e <= window[1])
    if not mask.any():
        raise GridError("no eigenvalues inside the requested window")
    k = np.flatnonzero(mask)[np.argmax(dens[mask])]
    return float(e[k]), float(abs(spectrum.local_spacing()[k]))


def peak_weight(spectrum, center, half_window):
    """Total weight of eigenvalues within half_window of center."""
    e = spectrum.eigenvalues
    return float(np.sum(spectrum.weights[np.abs(e - center) <= half_window]))


def smoothed_density(spectrum, energies, width):
    """Gaussian-smoothed weight density, for refinement studies."""
    e = np.asarray(energies, dtype=float)[:, None]
    kern = np.exp(-0.5 * ((e - spectrum.eigenvalues[None, :]) / width) ** 2)
    return kern @ spectrum.weights / (width * math.sqrt(2.0 * math.pi))


# ---------------------------------------------------------------------------
# contour route

def central_moments(params):
    """<phi|(H - lambda)^k|phi> for k = 0..4.

    With K = H - lambda one has K phi = -E x phi, which gives the closed forms."""
    E, lam = params.field_strength, params.coupling
    return np.array([1.0, 0.0, E**2 / 4.0, -lam * E**2 / 4.0,
                     3.0 * E**4 / 16.0 + lam**2 * E**2 / 4.0])


def _subtraction(params):
    """Coefficients m_k of sum_k m_k / (z - a)^(k+1) matching the moments about a."""
    b = SUBTRACTION_DEPTH * params.field_strength
    a = complex(params.coupling, -b)
    c = central_moments(params)
    shift = params.coupling - a   # = i b
    m = np.zeros(len(c), dtype=complex)
    for k in range(len(c)):
        m[k] = sum(math.comb(k, j) * c[j] * shift ** (k - j) for j in range(k + 1))
    return a, m


def _rational(z, a, m):
    d = 1.0 / (z - a)
    out = np.zeros_like(d)
    p = d
    for mk in m:
        out = out + mk * p
        p = p * d
    return out


def _rational_transform(t, a, m):
    """-(1/2 pi i) int over the line of the rational part times exp(-izt), closed below."""
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape, dtype=complex)
    for k, mk in enumerate(m):
        out += mk * (-1j * t) ** k / math.factorial(k)
    return out * np.exp(-1j * a * t)


def _remainder(xi, params, eta, a, m):
    z = xi + 1j * eta
    return phi_G_phi(z, params, SheetTag.PHYSICAL) - _rational(z, a, m)


def contour_cutoff(params, eta=CONTOUR_HEIGHT, start=40.0):
    """Smallest X = start * 2^k with |remainder| < 1e-12 at both endpoints."""
    a, m = _subtraction(params)
    X = max(start, 4.0 * (abs(params.coupling) + params.field_strength))
    for _ in range(20):
        ends = _remainder(np.array([-X, X]), params, eta, a, m)
        if np.max(np.abs(ends)) < ENDPOINT_TOL:
            return X
        X *= 2.0
    raise QuadratureError("no cutoff met the endpoint tolerance", {"last_cutoff": X})


def survival_contour(params, times, contour_height=CONTOUR_HEIGHT, cutoff=None, tol=CONTOUR_TOL):
    if not contour_height > 0:
        raise ConfigurationError("contour height must be > 0")
    t = np.asarray(times, dtype=float)
    if np.any(t < 0):
        raise ConfigurationError("times must be >= 0")
    a, m = _subtraction(params)
    X = contour_cutoff(params, contour_height) if cutoff is None else float(cutoff)
    ends = np.abs(_remainder(np.array([-X, X]), params, contour_height, a, m))
    if np.max(ends) >= ENDPOINT_TOL:
        raise QuadratureError(f"integrand {np.max(ends):.2e} at the cutoff {X}",
                              {"cutoff": X, "endpoint_magnitude": float(np.max(ends))})
    eta = contour_height
    nt = t.size

    def integrand(xi):
        r = complex(_remainder(xi, params, eta, a, m))
        v = r * np.exp(-1j * xi * t)
        return np.concatenate([v.real, v.imag])

    # break points where the remainder has structure on the scale of eta
    pts = sorted({params.coupling, 0.0} | _resonance_guess(params))
    pts = [p for p in pts if -X < p < X]
    val, err, info = integrate.quad_vec(integrand, -X, X, epsabs=tol, epsrel=0.0,
                                        points=pts, limit=20000, full_output=True)
    diag = {"cutoff": X, "error_estimate": float(err), "intervals": int(info.intervals.shape[0]),
            "contour_height": eta, "endpoint_magnitude": float(np.max(ends))}
    if not info.success or err > tol * max(1.0, X):
        raise QuadratureError(f"contour quadrature unconverged: estimate {err:.3g}", diag)
    line = val[:nt] + 1j * val[nt:]
    # z = xi + i eta: dz = d xi, and the exp(eta t) factor of exp(-izt)
    amp = -(1.0 / (2j * math.pi)) * line * np.exp(eta * t) + _rational_transform(t, a, m)
    return AmplitudeSeries(t, amp, AmplitudeMethod.CONTOUR, diag)


def _resonance_guess(params):
    # Re z0 ~ lambda + E^2/(4 lambda) for the narrow branch
    lam, E = params.coupling, params.field_strength
    if lam == 0:
        return set()
    return {lam + E * E / (4.0 * lam)}


# ---------------------------------------------------------------------------
# pole approximation

def pole_weight(pole, params):
    """Residue of (phi|G|phi) on the second sheet: sqrt(2/pi) F_ell(z0) / g'(z0)."""
    z0 = pole.z0
    return complex(SQRT_2_OVER_PI * F_ell(z0, params) / g_prime(z0, params))


def survival_pole(pole, params, times):
    if not pole.converged:
        raise ValueError("pole approximation needs a converged pole")
    t = np.asarray(times, dtype=float)
    c = pole_weight(pole, params)
    return AmplitudeSeries(t, c * np.exp(-1j * pole.z0 * t), AmplitudeMethod.POLE,
                           {"residue_weight": [c.real, c.imag]})


# ---------------------------------------------------------------------------
# diagnostics

def semigroup_defect(series, t, tp):
    a0 = series.at(0.0)
    return float(abs(series.at(t) * series.at(tp) / a0 - series.at(t + tp)))


def short_time_slope(series):
    """Second-order one-sided estimate of d|A|^2/dt at t = 0."""
    times = series.times
    if times.size < 3 or times[0] != 0.0:
        raise GridError("series must start at t = 0 with at least three nodes")
    h = times[1]
    if not (0 < h <= 1e-3):
        raise GridError(f"first step {h} must lie in (0, 1e-3]")
    p = np.abs(np.array([series.at(0.0), series.at(h), series.at(2 * h)])) ** 2
    return float((-3.0 * p[0] + 4.0 * p[1] - p[2]) / (2.0 * h))


def decay_fit(series, t_lo, t_hi):
    """Least-squares slope of log|A(t)| on [t_lo, t_hi]."""
    sel = (series.times >= t_lo) & (series.times <= t_hi)
    if sel.sum() < 2:
        raise GridError("fewer than two nodes in the fit window")
    return float(np.polyfit(series.times[sel], np.log(np.abs(series.values[sel])), 1)[0])


def free_amplitude(params, times):
    """|A(t)| for lambda = 0: exp(-E^2 t^2 / 8)."""
    t = np.asarray(times, dtype=float)
    return np.exp(-params.field_strength**2 * t * t / 8.0)
