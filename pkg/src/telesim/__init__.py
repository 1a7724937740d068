"""telesim: teleportation and remote-state-preparation at finite precision.

Simulates quantum teleportation (QT) and remote state preparation (RSP) of
qubit states drawn from an m-bit-precision grid of projective Hilbert
space, verifies transmitted states against the 1 - 2**-m success bound,
and keeps an information ledger showing that the classical channel's c
bits cannot account for the m bits of preparation information.

Hot sampling loops run on a compiled kernel backend when available, with a
pure-Python twin producing bit-identical results (see telesim._kernels).
"""
from ._kernels import BACKEND as kernel_backend
from .errors import (
    ConfigError,
    DomainError,
    ProtocolOrderError,
    TelesimError,
    ValidationError,
)
from .experiments import (
    EXPERIMENTS,
    ExperimentConfig,
    run_experiment,
    validate_config,
)
from .ledger import (
    CvPhaseSpace,
    LedgerRecord,
    account,
    classical_cost_bound,
    cv_prep_info,
)
from .precision import (
    GridMode,
    GridPoint,
    PrecisionSpec,
    ResolutionReport,
    dequantize,
    ensemble_entropy_bits,
    grid_cardinality,
    prep_info,
    quantize,
    resolution,
    truncate,
    uniform_ensemble,
)
from .protocol import (
    REFERENCE_STATE,
    ClassicalMessage,
    EprResource,
    Protocol,
    RunRecord,
    bell_branches,
    bell_measure,
    no_signaling_probe,
    prepare,
    qt_correct,
    qt_run,
    rsp_branches,
    rsp_run,
)
from .qmath import (
    DensityOp,
    Operator2,
    PureQubit,
    TwoQubitState,
    apply,
    fidelity,
    fs_angle,
    partial_trace_A,
    rotation_y,
    von_neumann_entropy,
)
from .rng import make_rng, substream
from .stats import (
    FrequencyEstimate,
    consistency_test,
    estimate,
    frequency_cdf,
    frequency_density,
    required_sample_size,
)
from .verify import (
    VerificationOp,
    VerificationReport,
    measure_verify,
    rotate_then_measure,
    success_bound,
    truncation_experiment,
    verification_experiment,
    verification_op,
)

__version__ = "0.1.0"

__all__ = [
    "ClassicalMessage",
    "ConfigError",
    "CvPhaseSpace",
    "DensityOp",
    "DomainError",
    "EXPERIMENTS",
    "EprResource",
    "ExperimentConfig",
    "FrequencyEstimate",
    "GridMode",
    "GridPoint",
    "LedgerRecord",
    "Operator2",
    "PrecisionSpec",
    "Protocol",
    "ProtocolOrderError",
    "PureQubit",
    "REFERENCE_STATE",
    "ResolutionReport",
    "RunRecord",
    "TelesimError",
    "TwoQubitState",
    "ValidationError",
    "VerificationOp",
    "VerificationReport",
    "account",
    "apply",
    "bell_branches",
    "bell_measure",
    "classical_cost_bound",
    "consistency_test",
    "cv_prep_info",
    "dequantize",
    "ensemble_entropy_bits",
    "estimate",
    "fidelity",
    "frequency_cdf",
    "frequency_density",
    "fs_angle",
    "grid_cardinality",
    "kernel_backend",
    "make_rng",
    "measure_verify",
    "no_signaling_probe",
    "partial_trace_A",
    "prep_info",
    "prepare",
    "qt_correct",
    "qt_run",
    "quantize",
    "required_sample_size",
    "resolution",
    "rotate_then_measure",
    "rotation_y",
    "rsp_branches",
    "rsp_run",
    "run_experiment",
    "substream",
    "success_bound",
    "truncate",
    "truncation_experiment",
    "uniform_ensemble",
    "validate_config",
    "verification_experiment",
    "verification_op",
    "von_neumann_entropy",
]
