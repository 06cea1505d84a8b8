"""Rational Gaussian wavelets, variable projection, and heartbeat classification."""

from .cwt import (
    AdmissibilityReport,
    Scalogram,
    admissibility_check,
    quadrature_coefficient,
    ricker,
    scale_grid,
    scalogram,
)
from .data import (
    Dataset,
    HeartbeatRecord,
    load_heartbeats,
    normalize,
    save_heartbeats,
    synthesize_dataset,
    synthesize_heartbeat,
)
from .derivatives import JacobianBlock, build_jacobian, finite_difference_oracle
from .network import (
    Metrics,
    ModelState,
    NetworkConfig,
    evaluate,
    forward,
    load_model,
    save_model,
    train,
)
from .varpro import (
    BoundReport,
    FitResult,
    VPDecomposition,
    bound_convergence_study,
    decompose,
    error_bound,
    fit_signal,
    input_jacobian,
    pseudoinverse,
    vp_jacobian,
)
from .wavelets import (
    EtaVector,
    MotherShape,
    PolePair,
    SampleGrid,
    WaveletMatrix,
    build_wavelet_matrix,
    compute_norm_constant,
    eval_dilated,
    eval_mother,
    random_eta,
)

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityReport",
    "BoundReport",
    "Dataset",
    "EtaVector",
    "FitResult",
    "HeartbeatRecord",
    "JacobianBlock",
    "Metrics",
    "ModelState",
    "MotherShape",
    "NetworkConfig",
    "PolePair",
    "SampleGrid",
    "Scalogram",
    "VPDecomposition",
    "WaveletMatrix",
    "admissibility_check",
    "bound_convergence_study",
    "build_jacobian",
    "build_wavelet_matrix",
    "compute_norm_constant",
    "decompose",
    "error_bound",
    "eval_dilated",
    "eval_mother",
    "evaluate",
    "finite_difference_oracle",
    "fit_signal",
    "forward",
    "input_jacobian",
    "load_heartbeats",
    "load_model",
    "normalize",
    "pseudoinverse",
    "quadrature_coefficient",
    "random_eta",
    "ricker",
    "save_heartbeats",
    "save_model",
    "scale_grid",
    "scalogram",
    "synthesize_dataset",
    "synthesize_heartbeat",
    "train",
    "vp_jacobian",
]
