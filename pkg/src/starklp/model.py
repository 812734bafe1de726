"""Stark Hamiltonian H = -E x + lambda P0 with a Gaussian rank-one projector.

The defect state is phi(x) = (2/pi)^(1/4) exp(-x^2), normalized to one, so
that P0 = |phi><phi| has kernel sqrt(2/pi) exp(-(x^2 + x'^2)). Units: hbar = 1.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, GridError

SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)
PHI_AMPLITUDE = (2.0 / math.pi) ** 0.25
MIN_GRID_POINTS = 16
MIN_HALF_WIDTH = 3.8


@dataclass(frozen=True)
class ModelParams:
    """Field strength E > 0 and nonzero coupling lambda.

    ``allow_zero_coupling`` admits lambda = 0 for the free-model limits used
    throughout the test-suite; pole searches still reject it.
    """

    field_strength: float
    coupling: float
    allow_zero_coupling: bool = True

    def __post_init__(self):
        E, lam = self.field_strength, self.coupling
        if not (math.isfinite(E) and E > 0):
            raise ConfigurationError(f"field_strength must be finite and > 0, got {E!r}")
        if not math.isfinite(lam):
            raise ConfigurationError(f"coupling must be finite, got {lam!r}")
        if lam == 0 and not self.allow_zero_coupling:
            raise ConfigurationError("coupling must be nonzero")
        object.__setattr__(self, "field_strength", float(E))
        object.__setattr__(self, "coupling", float(lam))

    @property
    def E(self):
        return self.field_strength

    @property
    def lam(self):
        return self.coupling

    @property
    def strength(self):
        """lambda * sqrt(2/pi), the prefactor of F in every denominator."""
        return self.coupling * SQRT_2_OVER_PI

    @property
    def kappa(self):
        """Dimensionless coupling lambda*sqrt(2 pi)/E; g(z) = 1 + i kappa w(sqrt2 z/E)."""
        return self.coupling * math.sqrt(2.0 * math.pi) / self.field_strength


@dataclass(frozen=True)
class GridSpec:
    half_width: float
    points: int

    def __post_init__(self):
        if self.points < MIN_GRID_POINTS:
            raise ConfigurationError(f"grid needs at least {MIN_GRID_POINTS} points, got {self.points}")
        if not (math.isfinite(self.half_width) and self.half_width > 0):
            raise GridError("half_width must be positive")
        if math.exp(-2.0 * self.half_width**2) >= 1e-12:
            raise GridError(f"half_width {self.half_width} too small: need L >= {MIN_HALF_WIDTH}")

    @property
    def spacing(self):
        return 2.0 * self.half_width / (self.points - 1)

    def nodes(self):
        return np.linspace(-self.half_width, self.half_width, self.points)


def phi(x):
    """Unit-norm defect state (2/pi)^(1/4) exp(-x^2)."""
    return PHI_AMPLITUDE * np.exp(-np.square(x))


def p0_kernel(x, xp):
    """<x|P0|x'> = sqrt(2/pi) exp(-(x^2 + x'^2))."""
    x = np.asarray(x, dtype=float)
    xp = np.asarray(xp, dtype=float)
    out = SQRT_2_OVER_PI * np.exp(-(x * x + xp * xp))
    return float(out) if out.ndim == 0 else out


def hamiltonian_grid(params, grid):
    """Dense H[m, n] = -E x_m delta_mn + lambda p0(x_m, x_n) dx on a uniform grid."""
    if grid.points < MIN_GRID_POINTS:
        raise ConfigurationError("grid too small")
    x = grid.nodes()
    v = phi(x) * math.sqrt(grid.spacing)
    H = params.coupling * np.outer(v, v)
    # outer(v, v) is symmetric bit-for-bit; the diagonal add keeps it so
    H[np.diag_indices_from(H)] += -params.field_strength * x
    return H


def grid_state(grid):
    """phi sampled on the grid with the sqrt(dx) quadrature weight."""
    return phi(grid.nodes()) * math.sqrt(grid.spacing)
