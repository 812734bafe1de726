"""Resonances of the Stark Hamiltonian H = -E x + lambda |phi><phi|.

Wigner-Weisskopf side: resolvent, second-sheet pole, survival amplitude.
Lax-Phillips side: S-matrix, its pole and residue, wave operators, and the
Cauchy profile of the resonance state.
"""
__version__ = "0.1.0"

from .model import GridSpec, ModelParams  # noqa: E402
from .poles import PoleMethod, PoleResult, find_pole, find_pole_two_stage  # noqa: E402

__all__ = ["__version__", "GridSpec", "ModelParams", "PoleMethod", "PoleResult",
           "find_pole", "find_pole_two_stage"]
