"""Single-shot Bell tests from one joint noisy measurement of two qubits.

Workflow: pick a two-qubit state and four measurement directions, build
the sixteen-outcome joint unsharp measurement, invert its statistics
through the exact quasi-stochastic kernel, then evaluate CHSH and CH
quantities either in ensemble form or shot by shot.
"""

from .belltests import (
    ChReport,
    ChshReport,
    Verdict,
    ch_report,
    ch_verdict,
    chsh_report,
    chsh_verdict,
    classical_bounds_check,
    ensemble_ch,
    ensemble_chsh,
    ensemble_from_shots,
    single_shot_ch,
    single_shot_ch_table,
    single_shot_chsh,
    single_shot_chsh_table,
    s_of_xi,
)
from .errors import (
    BellshotError,
    ConfigError,
    ConsistencyError,
    EmptyShotList,
    GammaOutOfRange,
    InvalidDistribution,
    NotHermitian,
    NotPSD,
    NotPositive,
    NotUnitTrace,
    OutOfRange,
)
from .inversion import (
    InversionKernel,
    QuasiDistribution,
    build_kernel,
    cross_marginal,
    invert_distribution,
    kernel_1d,
    reconstructed_sharp_povm,
    single_marginal,
)
from .measurement import (
    OUTCOMES,
    GammaSet,
    JointPovm,
    OutcomeIndex,
    joint_povm,
    observed_statistics,
)
from .observables import (
    ObservableLabel,
    ObservableSet,
    ObservableSpec,
    SharpPovm,
    bloch_operator,
    chsh_optimal_angles,
    observable_set,
    sharp_povm,
)
from .sampler import (
    RngConfig,
    ShotRecord,
    convergence_report,
    empirical_frequencies,
    sample_shots,
    shot_records,
    write_shot_csv,
)
from .states import (
    BellState,
    DensityMatrix,
    bell_state,
    custom_state,
    random_density_matrix,
    werner_state,
)
from .validate import ValidationReport, validate_all

__version__ = "0.1.0"

__all__ = [
    "BellState",
    "BellshotError",
    "ChReport",
    "ChshReport",
    "ConfigError",
    "ConsistencyError",
    "DensityMatrix",
    "EmptyShotList",
    "GammaOutOfRange",
    "GammaSet",
    "InvalidDistribution",
    "InversionKernel",
    "JointPovm",
    "NotHermitian",
    "NotPSD",
    "NotPositive",
    "NotUnitTrace",
    "OUTCOMES",
    "ObservableLabel",
    "ObservableSet",
    "ObservableSpec",
    "OutOfRange",
    "OutcomeIndex",
    "QuasiDistribution",
    "RngConfig",
    "SharpPovm",
    "ShotRecord",
    "ValidationReport",
    "Verdict",
    "bell_state",
    "bloch_operator",
    "build_kernel",
    "ch_report",
    "ch_verdict",
    "chsh_optimal_angles",
    "chsh_report",
    "chsh_verdict",
    "classical_bounds_check",
    "convergence_report",
    "cross_marginal",
    "custom_state",
    "empirical_frequencies",
    "ensemble_ch",
    "ensemble_chsh",
    "ensemble_from_shots",
    "invert_distribution",
    "joint_povm",
    "kernel_1d",
    "observable_set",
    "observed_statistics",
    "random_density_matrix",
    "reconstructed_sharp_povm",
    "sample_shots",
    "sharp_povm",
    "shot_records",
    "single_marginal",
    "single_shot_ch",
    "single_shot_ch_table",
    "single_shot_chsh",
    "single_shot_chsh_table",
    "s_of_xi",
    "validate_all",
    "werner_state",
    "write_shot_csv",
]
