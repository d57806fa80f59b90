"""Discrete portfolio pricing under margin constraints with budgeted
demand uncertainty, solved through an exact hull-greedy LP relaxation of
the induced multiple-choice knapsack and certified discrete recovery."""

from .instance_model import (
    DiscreteSolution,
    InstanceFormatError,
    ItemSpec,
    MenuPoint,
    PricingInstance,
    Violation,
    from_json,
    solution_from_json,
    solution_to_json,
    to_json,
    validate,
)
from .generators import RetailConfig, SyntheticConfig, gen_retail, gen_synthetic, prefix
from .driver import SolveReport, frontier, nested_prefix_run, solve
from .robust_core import beta, beta_dual, candidate_thetas, certificate, solve_box
from .stress import StressConfig, StressReport, tightness_matrix, worst_case_margin

__version__ = "0.1.0"

__all__ = [
    "DiscreteSolution",
    "InstanceFormatError",
    "ItemSpec",
    "MenuPoint",
    "PricingInstance",
    "RetailConfig",
    "SolveReport",
    "StressConfig",
    "StressReport",
    "SyntheticConfig",
    "Violation",
    "beta",
    "beta_dual",
    "candidate_thetas",
    "certificate",
    "from_json",
    "frontier",
    "gen_retail",
    "gen_synthetic",
    "nested_prefix_run",
    "prefix",
    "solution_from_json",
    "solution_to_json",
    "solve",
    "solve_box",
    "tightness_matrix",
    "to_json",
    "validate",
    "worst_case_margin",
]
