"""Switched-linear system identification toolkit.

Identify the per-subsystem parameters and the switching sequence of a
switched linear regression from data: a block-coordinate descent solver for
the penalty-relaxed assignment problem, excitation certificates that decide
when the noise-free problem has a unique solution, an exhaustive oracle for
small instances, and penalized model-order selection.
"""

from .bcd import (
    SolveReport,
    SolverConfig,
    SolverFailure,
    assign_step,
    bcd_solve,
    fit_cluster_params,
    stationarity_check,
)
from .dataio import load_dataset, load_model, save_dataset, save_model
from .metrics import classification_error, nmse
from .model import (
    Assignment,
    Dataset,
    NoiseSpec,
    RelaxedMembership,
    SLModel,
    generate_random_scenario,
    objective_integer,
    objective_relaxed,
    simulate,
)
from .oracle import (
    EnumerationLimitError,
    SolutionClass,
    oracle_global,
    oracle_unique,
)
from .order import (
    OrderSelectConfig,
    OrderSelectReport,
    SweepScenario,
    consistency_sweep,
    select_order,
)
from .pe import (
    Limits,
    PEReport,
    SampleCounts,
    check_cluster_pe,
    check_distinct_params,
    check_genericity_sufficient,
    check_no_separating_regressor,
    check_partition_condition,
    min_samples_bako,
    min_samples_ours,
    min_samples_table,
    min_samples_vidal,
    pe_report,
)

__all__ = [
    "Assignment",
    "Dataset",
    "EnumerationLimitError",
    "Limits",
    "NoiseSpec",
    "OrderSelectConfig",
    "OrderSelectReport",
    "PEReport",
    "RelaxedMembership",
    "SLModel",
    "SampleCounts",
    "SolutionClass",
    "SolveReport",
    "SolverConfig",
    "SolverFailure",
    "SweepScenario",
    "assign_step",
    "bcd_solve",
    "check_cluster_pe",
    "check_distinct_params",
    "check_genericity_sufficient",
    "check_no_separating_regressor",
    "check_partition_condition",
    "classification_error",
    "consistency_sweep",
    "fit_cluster_params",
    "generate_random_scenario",
    "load_dataset",
    "load_model",
    "min_samples_bako",
    "min_samples_ours",
    "min_samples_table",
    "min_samples_vidal",
    "nmse",
    "objective_integer",
    "objective_relaxed",
    "oracle_global",
    "oracle_unique",
    "pe_report",
    "save_dataset",
    "save_model",
    "select_order",
    "simulate",
    "stationarity_check",
]

__version__ = "0.1.0"
