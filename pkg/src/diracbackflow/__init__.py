"""Quantum backflow of a relativistic Dirac fermion on a ring."""

__version__ = "0.1.0"

from .current import CurrentTrace, current_trace, window_integral
from .eig import EigenPair, EigenSolverError, min_eigpair
from .extrapolate import ACCURATE_SCHEDULE, FAST_SCHEDULE, ExtrapolationResult, quad_extrapolate
from .extremal import (
    ExtremalResult,
    ScanSurface,
    backflow_infimum,
    global_minimum,
    massless_estimates,
    minimize_alpha,
    scan_alpha,
)
from .kernel import FluxKernel, build_kernel, nonrel_kernel, sinc
from .line import LineParams, gamma_of_z, line_infimum, line_kernel, line_min_eig
from .model import ModeTable, ParameterError, RingParams, eigenstate_flux, epsilon, norm_const
from .two_mode import TwoModeCoeffs, two_mode_coeffs, two_mode_min, two_mode_prob
