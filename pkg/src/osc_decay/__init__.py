"""Oscillatory integrals with Mittag-Leffler kernels and their decay rates.

Modules: ``ml_special`` (E_{alpha,beta}), ``phase_algebra`` (phases and
amplitudes), ``newton_geometry`` (Newton polyhedron invariants),
``integrator`` (adaptive quadrature), ``decay_lab`` (sweeps, fits and
verdicts) and ``cli``.
"""

from .decay_lab import (
    DecayReport,
    SublevelReport,
    epsilon_sweep,
    fit_decay,
    lambda_sweep,
    morse_case_check,
    verify_theorem1,
)
from .integrator import (
    QuadConfig,
    QuadratureResult,
    dyadic_envelope_bound,
    integrate_classical,
    integrate_envelope,
    integrate_ml,
)
from .ml_special import ImagAxisKernel, MLParams, ml_bound_ratio, ml_eval, ml_series
from .newton_geometry import NewtonInvariants, analyze
from .phase_algebra import Amplitude, PolynomialPhase, parse_amplitude, parse_phase
from .sublevel import sublevel_measure

__version__ = "0.1.0"
