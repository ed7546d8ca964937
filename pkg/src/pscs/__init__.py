"""Uniqueness conditions and exact solvers for weighted-norm sparse recovery
with prior support information."""
from .conditions import (
    ConditionVerdict,
    check_candes_l0,
    check_candes_l1,
    check_coherence_l1,
    check_vaswani_corollary,
    check_vaswani_l0,
    check_vaswani_l1,
    check_weighted_l0,
    check_weighted_l1,
    check_weighted_l1_ric_only,
    rho_k,
)
from .core import (
    SensingMatrix,
    SupportDecomposition,
    WeightedNormParams,
    coherence,
    decompose_support,
    submatrix_columns,
    weighted_norm,
)
from .harness import ExperimentConfig, gen_instance, gen_matrix, run_experiment
from .ric import RicReport, delta_exact, delta_sampled, theta_exact, theta_sampled
from .solvers import (
    DualCertificate,
    RecoveryResult,
    Uniqueness,
    build_certificate,
    certificate_bound,
    solve_weighted_l0,
    solve_weighted_l1,
    verify_l1_uniqueness,
)

__version__ = "0.1.0"
