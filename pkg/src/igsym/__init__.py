"""Symmetry groups of feed-forward networks and the attribution attacks they enable.

The core objects: networks of the form f(Wx + b), the Lie algebras of linear
maps fixing the row space of W (and translations along its kernel), and
integrated-gradients attribution with controlled quadrature. On top of those
sit epsilon-bounded adversarial constructions that provably preserve the
network output, plus a seeded harness that verifies every numerical claim.
"""

__version__ = "0.1.0"

from .attack import (
    AttackResult,
    AttackSpec,
    BaselineChoice,
    DatasetStats,
    attack_rotation,
    attack_translation,
    check_equivariance_orthogonal,
    check_equivariance_translation,
    exponent_scale_bound,
    make_baseline,
    rotation_identity_residual,
    run_attack,
    translation_identity_residual,
    verify_adversarial,
)
from .attribution import (
    AttributionVector,
    DivergenceReport,
    PathSpec,
    QuadratureSpec,
    attribution_distance,
    completeness_residual,
    integrated_gradients,
    path_attribution,
    path_attribution_component,
    path_attribution_components,
)
from .errors import EmptyAlgebra, IgsymError, InvalidInput
from .harness import (
    AttackBatchConfig,
    DatasetConfig,
    ExperimentConfig,
    NetworkConfig,
    SweepConfig,
    VerifyConfig,
    generate_dataset,
    generate_network,
    run_attack_batch,
    run_equivariance_sweep,
    run_invariant_suite,
)
from .linalg import (
    SubspaceBasis,
    kernel_basis,
    matrix_exp,
    operator_norm_upper,
    orthogonal_complement,
    rank_one,
    row_space_basis,
)
from .network import (
    MlpNetwork,
    TailLayer,
    act_linear,
    act_translation,
    forward,
    from_json_dict,
    gradient,
    load_network,
    save_network,
    to_json_dict,
)
from .symmetry import (
    LieAlgebraBasis,
    SymmetryCheck,
    SymmetryElement,
    adapted_block_residuals,
    sample_group_element,
    sample_kernel_translation,
    skew_stabilizer_algebra,
    stabilizer_algebra,
    verify_symmetry,
)

__all__ = [
    "__version__",
    "AttackBatchConfig",
    "AttackResult",
    "AttackSpec",
    "AttributionVector",
    "BaselineChoice",
    "DatasetConfig",
    "DatasetStats",
    "DivergenceReport",
    "EmptyAlgebra",
    "ExperimentConfig",
    "IgsymError",
    "InvalidInput",
    "LieAlgebraBasis",
    "MlpNetwork",
    "NetworkConfig",
    "PathSpec",
    "QuadratureSpec",
    "SubspaceBasis",
    "SweepConfig",
    "SymmetryCheck",
    "SymmetryElement",
    "TailLayer",
    "VerifyConfig",
    "act_linear",
    "act_translation",
    "adapted_block_residuals",
    "attack_rotation",
    "attack_translation",
    "attribution_distance",
    "check_equivariance_orthogonal",
    "check_equivariance_translation",
    "completeness_residual",
    "exponent_scale_bound",
    "forward",
    "from_json_dict",
    "generate_dataset",
    "generate_network",
    "gradient",
    "integrated_gradients",
    "kernel_basis",
    "load_network",
    "make_baseline",
    "matrix_exp",
    "operator_norm_upper",
    "orthogonal_complement",
    "path_attribution",
    "path_attribution_component",
    "path_attribution_components",
    "rank_one",
    "rotation_identity_residual",
    "row_space_basis",
    "run_attack",
    "run_attack_batch",
    "run_equivariance_sweep",
    "run_invariant_suite",
    "sample_group_element",
    "sample_kernel_translation",
    "save_network",
    "skew_stabilizer_algebra",
    "stabilizer_algebra",
    "to_json_dict",
    "translation_identity_residual",
    "verify_adversarial",
    "verify_symmetry",
]
