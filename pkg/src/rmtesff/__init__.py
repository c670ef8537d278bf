"""Spectral form factor of interacting chaotic subsystems.

Monte Carlo simulation of the extended random matrix transition ensemble
and of coupled kicked rotors, together with the closed-form large-N
predictions for the spectral form factor and its moments.
"""
__version__ = "0.1.0"

from .errors import (BudgetError, ConfigurationError, DimensionError, NumericError,
                     RegimeError)
from .rand_unitary import PhaseDistribution, RngStream, sample_cue, sample_phases
from .ensemble import EnsembleParams, build_rmte, eigenphases, kron_all, trace_powers
from .rotor import (RotorParams, bessel_j0, build_coupled_rotors, build_rotor_coupling,
                    build_rotor_subsystem, rotor_effective_theory)
from .estimator import MomentAccumulator, RescaledCurve, SffCurve, finalize, rescale, smooth
from .theory import (chi_abs, cue_sff_moment, ehrenfest_time, epsilon_for_gamma,
                     moment2_prediction, perturbative_sff, scaled_sff_prediction,
                     scaling_gamma, sff_prediction, theory_curve, thouless_time)
from .experiment import (ExperimentConfig, emit_results, make_config, read_results,
                         run_experiment)
