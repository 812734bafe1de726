"""Resonance poles: zeros of g(z) = 1 - lambda sqrt(2/pi) F_ell(z).

Two locators are provided. Complex Newton (``NEWTON_DIRECT``) works for
resonances whose width is resolvable next to their energy. For ultra-narrow
resonances, where |Im z0| sits far below the rounding error of Re z0, the
two-stage method first solves Re g(x) = 0 on the real axis and then takes one
Newton step off the axis; the imaginary part then comes out with full
relative precision because Im g(x) = kappa exp(-2x^2/E^2) on the axis.

Root sets are certified with the argument principle (``count_zeros``).
"""
import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .errors import (ContourError, DegenerateResidueError, NoPoleError,
                     ScaledFormRequired, SearchError, TrackingError)
from .model import ModelParams
from .resolvent import F_ell, F_ell_prime

MAX_ITER = 200
G_TOL = 1e-12
NARROW_RATIO = 1e-10
SCAN_POINTS = 2000


class PoleMethod(enum.Enum):
    NEWTON_DIRECT = "NewtonDirect"
    TWO_STAGE = "TwoStagePerturbative"
    ARGUMENT_PRINCIPLE = "ArgumentPrinciple"


@dataclass
class PoleResult:
    z0: complex
    residue: complex | None
    iterations: int
    converged: bool
    final_g_magnitude: float
    method: PoleMethod
    trajectory: list = field(default_factory=list, repr=False)

    def as_dict(self):
        return {
            "z0": [self.z0.real, self.z0.imag],
            "residue": None if self.residue is None else [self.residue.real, self.residue.imag],
            "iterations": self.iterations,
            "converged": self.converged,
            "final_g_magnitude": self.final_g_magnitude,
            "method": self.method.value,
        }


def g(z, params):
    """Pole function 1 - lambda sqrt(2/pi) F_ell(z); entire in z."""
    out = 1.0 - params.strength * np.asarray(F_ell(z, params))
    return complex(out) if np.ndim(out) == 0 else out


def g_prime(z, params):
    out = -params.strength * np.asarray(F_ell_prime(z, params))
    return complex(out) if np.ndim(out) == 0 else out


def residue_formula(z0, params):
    """Residue prefactor as printed for the S-matrix pole:
    (8 pi i / E^3) lambda sqrt(2/pi) exp(-2 z0^2/E^2) / (z0 - lambda)."""
    E, lam = params.field_strength, params.coupling
    gap = z0 - lam
    if abs(gap) < 1e-14 * (1.0 + abs(lam)):
        raise DegenerateResidueError("pole coincides with z = lambda")
    return (8j * math.pi / E**3) * params.strength * np.exp(-2.0 * z0 * z0 / E**2) / gap


def _require_coupling(params):
    if params.coupling == 0:
        raise NoPoleError("no pole: lambda = 0 makes g identically 1")


def _formula_or_none(z0, params):
    try:
        return complex(residue_formula(z0, params))
    except DegenerateResidueError:
        return None


def real_axis_brackets(params, window=None, points=SCAN_POINTS):
    """Sign changes of Re g on the real axis, as (lo, hi) pairs.

    The default window is [-3|lambda|, 3|lambda|] widened to at least
    [-3E, 3E] so weak couplings are not scanned on a vanishing interval.
    """
    if window is None:
        half = 3.0 * max(abs(params.coupling), params.field_strength)
        window = (-half, half)
    x = np.linspace(window[0], window[1], points)
    re = np.asarray(g(x.astype(complex), params)).real
    s = np.sign(re)
    idx = np.nonzero(s[:-1] * s[1:] < 0)[0]
    return [(float(x[i]), float(x[i + 1])) for i in idx]


def _newton(params, z, max_iter=MAX_ITER):
    traj = [complex(z)]
    try:
        gz = g(z, params)
    except ScaledFormRequired:
        raise SearchError(f"seed {z} lies in the overflow region of w", traj) from None
    for it in range(1, max_iter + 1):
        d = g_prime(z, params)
        if d == 0:
            raise SearchError("g' vanished during Newton iteration", traj)
        step = gz / d
        z = z - step
        traj.append(complex(z))
        if not np.isfinite(z):
            raise SearchError("Newton iterate left the finite plane", traj)
        try:
            gz = g(z, params)
        except ScaledFormRequired:
            raise SearchError(f"Newton iterate {z} reached the overflow region of w", traj) from None
        if abs(step) <= 1e-14 * (1.0 + abs(z)) or abs(gz) <= 1e-13:
            return z, it, traj
    raise SearchError(f"Newton did not converge in {max_iter} iterations", traj)


def _real_root(params, x_seed, bracket=None):
    """Root of Re g on the real axis by Brent's method on a bracket."""

    def re_g(x):
        return g(complex(x, 0.0), params).real

    if bracket is None:
        bracket = _local_bracket(re_g, x_seed)
    return optimize.brentq(re_g, bracket[0], bracket[1], xtol=1e-15, rtol=1e-15, maxiter=MAX_ITER)


def _local_bracket(fun, x, step=None):
    """Sign-change bracket around x, widening geometrically."""
    f0 = fun(x)
    if f0 == 0:
        return (x, x + 1e-15 * (1 + abs(x)))
    step = step or 1e-9 * (1.0 + abs(x))
    for _ in range(80):
        for y in (x - step, x + step):
            if np.sign(fun(y)) != np.sign(f0):
                return (min(x, y), max(x, y))
        step *= 2.0
    raise SearchError(f"no sign change of Re g found near {x}")


def _off_axis_step(params, x0):
    gx = g(complex(x0, 0.0), params)
    return complex(x0, 0.0) - gx / g_prime(complex(x0, 0.0), params)


def _finish(params, z0, iterations, method, traj):
    gm = abs(g(z0, params))
    converged = gm <= G_TOL
    return PoleResult(z0=complex(z0), residue=_formula_or_none(complex(z0), params),
                      iterations=iterations, converged=converged,
                      final_g_magnitude=float(gm), method=method, trajectory=traj)


def two_stage_from(params, x_seed, bracket=None):
    """Stage 1: real root x0 of Re g. Stage 2: one Newton step off the axis."""
    x0 = _real_root(params, x_seed, bracket)
    z0 = _off_axis_step(params, x0)
    return _finish(params, z0, 1, PoleMethod.TWO_STAGE, [complex(x0, 0.0), z0])


def find_pole(params, seed=None, method="auto", spectral_peak=None):
    """Locate the resonance pole.

    Parameters
    ----------
    seed : complex, optional
        Starting point. Without one, seeds come from the sign changes of
        Re g on the real axis and the converged roots are ranked (nearest to
        `spectral_peak` when given, otherwise narrowest width).
    method : {"auto", "newton"}
        "auto" replaces a Newton root whose width is unresolvable
        (|Im z0| < 1e-10 |Re z0|) by the two-stage estimate. "newton" returns
        the raw Newton iterate.
    """
    _require_coupling(params)
    if seed is None:
        roots = scan_roots(params, method=method)
        if not roots:
            raise SearchError("no root of g found from the real-axis scan")
        return select_resonance(roots, spectral_peak)
    seed = complex(seed)
    if not np.isfinite(seed):
        raise SearchError("seed must be finite")
    z, it, traj = _newton(params, seed)
    result = _finish(params, z, it, PoleMethod.NEWTON_DIRECT, traj)
    if method == "auto" and abs(z.imag) < NARROW_RATIO * abs(z.real):
        refined = two_stage_from(params, z.real)
        refined.iterations += it
        refined.trajectory = traj + refined.trajectory
        result = refined
    if result.z0.imag > 0:
        # the physical sheet has no zeros in Im z > 0; report rather than reflect
        raise SearchError(f"Newton converged to {result.z0} in the upper half plane", traj)
    if not result.converged:
        raise SearchError(f"root estimate {result.z0} leaves |g| = {result.final_g_magnitude:.3g}", traj)
    return result


def find_pole_two_stage(params, window=None):
    """Two-stage perturbative locator, using the narrowest real-axis candidate."""
    _require_coupling(params)
    brackets = real_axis_brackets(params, window)
    if not brackets:
        raise SearchError("no sign change of Re g in the real-axis scan window")
    best = None
    for b in brackets:
        cand = two_stage_from(params, 0.5 * (b[0] + b[1]), bracket=b)
        if best is None or cand.final_g_magnitude < best.final_g_magnitude:
            best = cand
    return best


def scan_roots(params, window=None, method="auto"):
    """All distinct converged roots reachable from real-axis brackets (Im z0 <= 0)."""
    _require_coupling(params)
    found = []
    for lo, hi in real_axis_brackets(params, window):
        x0 = _real_root(params, 0.5 * (lo + hi), (lo, hi))
        for seed in (complex(x0, 0.0), complex(x0, -0.01)):
            try:
                r = find_pole(params, seed, method=method)
            except SearchError:
                continue
            if not any(abs(r.z0 - q.z0) <= 1e-9 * (1 + abs(q.z0)) for q in found):
                found.append(r)
            break
    return sorted(found, key=lambda r: r.z0.real)


def select_resonance(roots, spectral_peak=None):
    if spectral_peak is not None:
        return min(roots, key=lambda r: abs(r.z0.real - spectral_peak))
    return min(roots, key=lambda r: abs(r.z0.imag))


# ---------------------------------------------------------------------------
# argument principle

def _rectangle_nodes(a, b, n):
    """Counter-clockwise closed polygon of the rectangle with corners a, b."""
    x0, x1 = sorted((a.real, b.real))
    y0, y1 = sorted((a.imag, b.imag))
    t = np.linspace(0.0, 1.0, n + 1)
    edges = [
        x0 + (x1 - x0) * t + 1j * y0,
        x1 + 1j * (y0 + (y1 - y0) * t),
        x1 + (x0 - x1) * t + 1j * y1,
        x0 + 1j * (y1 + (y0 - y1) * t),
    ]
    return edges


def _winding_integral(params, a, b, n):
    total = 0.0j
    gmin = np.inf
    for z in _rectangle_nodes(a, b, n):
        gz = np.asarray(g(z, params))
        gmin = min(gmin, float(np.min(np.abs(gz))))
        f = np.asarray(g_prime(z, params)) / gz
        dz = np.diff(z)
        total += np.sum(0.5 * (f[1:] + f[:-1]) * dz)
    return total / (2j * math.pi), gmin


def count_zeros(params, corner_a, corner_b, contour_floor=1e-10, max_nodes=2**16):
    """Number of zeros of g inside the rectangle, by the argument principle.

    Trapezoidal integration of g'/g along each edge, doubling the node count
    until the result is stably within 0.05 of the same integer.
    """
    if params.coupling == 0:
        return 0
    a, b = complex(corner_a), complex(corner_b)
    if a.real == b.real or a.imag == b.imag:
        raise ContourError("degenerate rectangle")
    n = 64
    prev = None
    while n <= max_nodes:
        val, gmin = _winding_integral(params, a, b, n)
        if gmin < contour_floor:
            raise ContourError(
                f"|g| = {gmin:.3g} on the contour; perturb the rectangle slightly")
        k = round(val.real)
        if prev is not None and abs(val - k) < 0.05 and abs(val - prev) < 0.05:
            return int(k)
        prev = val
        n *= 2
    raise ContourError(f"winding integral did not settle (last value {prev})")


def enumerate_roots(params, corner_a, corner_b, max_depth=24):
    """Certified list of all zeros of g inside the rectangle.

    Recursive bisection with the argument principle; each leaf holding
    exactly one zero is solved by Newton (with the two-stage refinement for
    unresolvable widths) and the root is verified to lie in the leaf.
    Returns ``(roots, total_count)``.
    """
    _require_coupling(params)
    a, b = complex(corner_a), complex(corner_b)
    total = count_zeros(params, a, b)
    roots = []
    _bisect(params, a, b, total, roots, max_depth)
    if len(roots) != total:
        raise SearchError(f"argument principle counts {total} zeros but {len(roots)} were solved")
    return sorted(roots, key=lambda r: r.z0.real), total


def _inside(z, a, b, pad=0.0):
    x0, x1 = sorted((a.real, b.real))
    y0, y1 = sorted((a.imag, b.imag))
    return x0 - pad <= z.real <= x1 + pad and y0 - pad <= z.imag <= y1 + pad


def _solve_leaf(params, a, b):
    x0, x1 = sorted((a.real, b.real))
    y0, y1 = sorted((a.imag, b.imag))
    cx, cy = 0.5 * (x0 + x1), 0.5 * (y0 + y1)
    seeds = [complex(cx, cy), complex(cx, y0 + 0.25 * (y1 - y0)), complex(cx, min(y1, 0.0)),
             complex(x0 + 0.25 * (x1 - x0), cy), complex(x0 + 0.75 * (x1 - x0), cy)]
    for s in seeds:
        try:
            r = find_pole(params, s)
        except SearchError:
            continue
        if _inside(r.z0, a, b, pad=1e-12 * (1 + abs(r.z0))):
            r.method = PoleMethod.ARGUMENT_PRINCIPLE if r.method is PoleMethod.NEWTON_DIRECT else r.method
            return r
    return None


def _split(params, a, b, frac=0.5137):
    x0, x1 = sorted((a.real, b.real))
    y0, y1 = sorted((a.imag, b.imag))
    for f in (frac, 0.4621, 0.5419, 0.3877):
        try:
            if (x1 - x0) >= (y1 - y0):
                xm = x0 + f * (x1 - x0)
                parts = [(complex(x0, y0), complex(xm, y1)), (complex(xm, y0), complex(x1, y1))]
            else:
                ym = y0 + f * (y1 - y0)
                parts = [(complex(x0, y0), complex(x1, ym)), (complex(x0, ym), complex(x1, y1))]
            return [(p, q, count_zeros(params, p, q)) for p, q in parts]
        except ContourError:
            continue
    raise ContourError("could not place a zero-free split line")


def _bisect(params, a, b, count, roots, depth):
    if count == 0:
        return
    if count == 1:
        r = _solve_leaf(params, a, b)
        if r is not None:
            roots.append(r)
            return
    if depth == 0:
        raise SearchError(f"subdivision limit reached with {count} zeros in {a}..{b}")
    for p, q, c in _split(params, a, b):
        _bisect(params, p, q, c, roots, depth - 1)


def certify(pole, params, half_size=None):
    """Argument-principle count on a small square around a located pole."""
    if half_size is None:
        half_size = max(1e-3, 0.25 * abs(pole.z0.imag))
    d = complex(half_size, half_size)
    return count_zeros(params, pole.z0 - d, pole.z0 + d)


# ---------------------------------------------------------------------------
# residues and field dependence

@dataclass
class ResidueReport:
    formula: complex
    contour: complex
    radius: float
    nodes: int

    @property
    def relative_discrepancy(self):
        return abs(self.formula - self.contour) / abs(self.contour)

    @property
    def ratio(self):
        return self.formula / self.contour


def residue_at_pole(pole, params, radius=1e-2, nodes=512):
    """Printed residue formula next to the contour residue of the continued S(z)."""
    from .laxphillips import smatrix_continued

    if not pole.converged:
        raise SearchError("residue requested for an unconverged pole")
    formula = complex(residue_formula(pole.z0, params))
    theta = 2.0 * math.pi * np.arange(nodes) / nodes
    z = pole.z0 + radius * np.exp(1j * theta)
    # (1/2 pi i) \oint S dz with dz = i r e^{i theta} dtheta, periodic trapezoid
    contour = complex(np.mean(smatrix_continued(z, params) * radius * np.exp(1j * theta)))
    return ResidueReport(formula=formula, contour=contour, radius=radius, nodes=nodes)


def field_scan(coupling, E_values, seed=None):
    """Track the pole across field strengths by continuation.

    The first pole is found with `seed` (or the default seeding); each later
    one starts from the previous root. A jump larger than ten times the local
    trend raises TrackingError.
    """
    E_values = [float(e) for e in E_values]
    if any(e <= 0 for e in E_values) or any(b <= a for a, b in zip(E_values, E_values[1:])):
        raise ValueError("E_values must be positive and strictly increasing")
    results = []
    for i, E in enumerate(E_values):
        params = ModelParams(E, coupling)
        start = seed if i == 0 else results[-1].z0
        if i >= 2:
            # linear extrapolation of the track as the Newton seed
            d1 = (results[-1].z0 - results[-2].z0) / (E_values[i - 1] - E_values[i - 2])
            start = results[-1].z0 + d1 * (E - E_values[i - 1])
        res = find_pole(params, start)
        if i >= 2:
            prev_step = abs(results[-1].z0 - results[-2].z0) / (E_values[i - 1] - E_values[i - 2])
            step = abs(res.z0 - results[-1].z0) / (E - E_values[i - 1])
            if step > 10.0 * prev_step + 1e-12:
                raise TrackingError(
                    f"pole jumped from {results[-1].z0} to {res.z0} at E = {E}")
        results.append(res)
    return results


def scan_monotonicity(results):
    """Counts of violations of Re z0 decreasing and |Im z0| increasing along a scan."""
    re = np.array([r.z0.real for r in results])
    im = np.array([abs(r.z0.imag) for r in results])
    return {
        "re_decreasing_violations": int(np.sum(np.diff(re) >= 0)),
        "abs_im_increasing_violations": int(np.sum(np.diff(im) <= 0)),
    }
