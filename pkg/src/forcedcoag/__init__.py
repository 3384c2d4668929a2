"""Forced discrete coagulation: truncated simulation, moment bounds, equilibria."""
from .analytic import (ExampleParams, example_decay_rate, exact_c1, exact_c2, exact_ck,
                       exact_equilibrium, exact_state, riccati_constants, smallness_gap_demo)
from .contraction import (SmallnessCertificate, c_mu, contraction_rate, detect_contraction_time,
                          pairwise_distance, smallness_certificate, technical_inequality_check,
                          technical_inequality_scan)
from .equilibrium import (ConvergenceReport, EquilibriumResult, convergence_analysis,
                          fixed_point_sweep, solve_equilibrium, stationarity_drift,
                          stationary_residual)
from .errors import (CertificationError, CoagulationError, ConfigError, ConvergenceError,
                     DimensionError, InsufficientDataError, KernelIndexError, ParameterError,
                     StiffnessError, ToleranceError)
from .kernels import (KernelModel, RateModel, SourceModel, evaluate_kernel, evaluate_removal,
                      fit_envelope, source_moment)
from .moments import (Coefficients, GronwallBound, MomentReport, audit_trajectory,
                      general_moment_bound, gronwall_bound, large_time_entry_times,
                      large_time_moment_bounds, moment,
                      total_mass_bound, total_mass_entry_time)
from .truncated import (CoagulationSystem, IntegratorConfig, StateVector, Trajectory, integrate,
                        rhs, weak_form_residual)

__version__ = "0.1.0"
