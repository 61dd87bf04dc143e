"""Learning under privileged information, from concept classes to benchmarks.

Subpackages group into three layers: number-theoretic concept classes and
their exact learners (groups, eek, learning, dcr), kernel machines with and
without privileged inputs (kernels, svm, svmplus), and the quantum-chain
benchmark that ties them together (rydberg, bench, cli).
"""

from .exceptions import (
    CapacityError,
    ConvergenceError,
    DegenerateDataError,
    InconsistentSampleError,
    LearningFailureError,
    LuqpiError,
    MembershipError,
    StratificationError,
)
from .groups import GroupDescription, discrete_log, gen_group, gen_safe_prime, is_prime
from .eek import (
    BeekSample,
    CircularTuple,
    EekConcept,
    EekSample,
    beek_from_eek,
    embed,
    eval_beek,
    eval_eek,
    iota,
    rerandomize,
    sample_beek,
    sample_circular,
    sample_eek,
    sample_preimage,
    sentinel_label,
)
from .learning import (
    ExtendedExample,
    Hypothesis,
    evaluate_hypothesis,
    extract_features_beek,
    extract_features_eek,
    learn_beek,
    learn_eek,
    recover_key,
)
from .dcr import DcrConcept, dcr_feature_extract, dcr_semisupervised_learn, eval_dcr, gen_3rsa
from .kernels import KernelSpec, kernel_matrix
from .svm import OneVsAllClassifier, SvmClassifier, solve_svm_dual
from .svmplus import SvmPlusClassifier, solve_svmplus_dual
from .rydberg import (
    GroundState,
    PhaseSample,
    RydbergParams,
    assign_phase,
    build_hamiltonian,
    builtin_grid,
    generate_dataset,
    ground_state,
    order_parameters,
    read_dataset,
    write_jsonl,
)
from .bench import (
    ExperimentConfig,
    PhaseDataset,
    ResultRow,
    SamplingStrategy,
    cv_select,
    emit_report,
    make_strategy,
    run_experiment,
    sample_training_set,
)

__version__ = "0.1.0"

__all__ = [
    "BeekSample",
    "CapacityError",
    "CircularTuple",
    "ConvergenceError",
    "DcrConcept",
    "DegenerateDataError",
    "EekConcept",
    "EekSample",
    "ExperimentConfig",
    "ExtendedExample",
    "GroundState",
    "GroupDescription",
    "Hypothesis",
    "InconsistentSampleError",
    "KernelSpec",
    "LearningFailureError",
    "LuqpiError",
    "MembershipError",
    "OneVsAllClassifier",
    "PhaseDataset",
    "PhaseSample",
    "ResultRow",
    "RydbergParams",
    "SamplingStrategy",
    "StratificationError",
    "SvmClassifier",
    "SvmPlusClassifier",
    "assign_phase",
    "beek_from_eek",
    "build_hamiltonian",
    "builtin_grid",
    "cv_select",
    "dcr_feature_extract",
    "dcr_semisupervised_learn",
    "discrete_log",
    "embed",
    "emit_report",
    "eval_beek",
    "eval_dcr",
    "eval_eek",
    "evaluate_hypothesis",
    "extract_features_beek",
    "extract_features_eek",
    "gen_3rsa",
    "gen_group",
    "gen_safe_prime",
    "generate_dataset",
    "ground_state",
    "iota",
    "is_prime",
    "kernel_matrix",
    "learn_beek",
    "learn_eek",
    "make_strategy",
    "order_parameters",
    "read_dataset",
    "recover_key",
    "rerandomize",
    "run_experiment",
    "sample_beek",
    "sample_circular",
    "sample_eek",
    "sample_preimage",
    "sample_training_set",
    "sentinel_label",
    "solve_svm_dual",
    "solve_svmplus_dual",
    "write_jsonl",
]
