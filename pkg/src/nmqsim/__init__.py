"""nmqsim: idle-time qubit dynamics beyond the Markov approximation.

Simulates a transversely coupled superconducting qubit: time-dependent
decay rates and Lamb shift from a bath spectral density, the Choi-matrix
dynamical map with complete-positivity certificates, and the observable
signatures (non-exponential decay, extra precession frequencies, and the
Ramsey X/Y probability imbalance). Internally omega_q = 1 and time is
measured in 1/omega_q; couplings enter through a single dimensionless
group applied once in the propagator.
"""

__version__ = "0.1.0"

from .baths import (
    BathSpectrum,
    KernelSamples,
    impedance_to_spectral_density,
    kernel_samples,
    kernel_transforms,
    spectral_density,
    symmetrized_psd,
)
from .circuit import TransmonCircuit, coupling_eta, qubit_frequency
from .errors import (
    ConfigError,
    DomainError,
    GridError,
    NumericalError,
    StiffnessError,
)
from .experiments import (
    ExperimentResult,
    precession_spectrum,
    ramsey_delta_p,
    ramsey_protocol_direct,
    sigma_expectations,
)
from .oracle import (
    OracleReport,
    integrate_master_equation,
    map_vs_direct,
    pv_crosscheck,
    quadrature_crosscheck,
    run_verification,
)
from .propagator import (
    CPReport,
    PropagatorState,
    QubitState,
    Trajectory,
    apply_map,
    choi_from_functions,
    choi_matrix,
    constant_rate_table,
    cp_certificate,
    decay_function,
    markovian_propagator,
    markovian_trajectory,
    phase_function,
    relaxation_function,
    solve_coherence,
)
from .rates import (
    RateTable,
    build_rate_table,
    canonical_rates,
    decoherence_matrix,
    gamma_pm,
    lamb_shift,
    markovian_limits,
)

__all__ = [
    "BathSpectrum",
    "KernelSamples",
    "impedance_to_spectral_density",
    "kernel_samples",
    "kernel_transforms",
    "spectral_density",
    "symmetrized_psd",
    "TransmonCircuit",
    "coupling_eta",
    "qubit_frequency",
    "ConfigError",
    "DomainError",
    "GridError",
    "NumericalError",
    "StiffnessError",
    "ExperimentResult",
    "precession_spectrum",
    "ramsey_delta_p",
    "ramsey_protocol_direct",
    "sigma_expectations",
    "OracleReport",
    "integrate_master_equation",
    "map_vs_direct",
    "pv_crosscheck",
    "quadrature_crosscheck",
    "run_verification",
    "CPReport",
    "PropagatorState",
    "QubitState",
    "Trajectory",
    "apply_map",
    "choi_from_functions",
    "choi_matrix",
    "constant_rate_table",
    "cp_certificate",
    "decay_function",
    "markovian_propagator",
    "markovian_trajectory",
    "phase_function",
    "relaxation_function",
    "solve_coherence",
    "RateTable",
    "build_rate_table",
    "canonical_rates",
    "decoherence_matrix",
    "gamma_pm",
    "lamb_shift",
    "markovian_limits",
]
