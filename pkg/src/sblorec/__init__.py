"""Recommendation algorithms coupling social ties with interaction history,
plus the benchmark harness to evaluate them."""

__version__ = "0.1.0"

from .graphdata import Dataset, InteractionNetwork, SocialNetwork, compute_stats
from .protocol import cold_start_split, degree_ccdf, label_users, random_split
from .sblo import SbloParams, objective_value, score_sblo, solve_blo, solve_sblo

__all__ = [
    "Dataset",
    "InteractionNetwork",
    "SocialNetwork",
    "compute_stats",
    "cold_start_split",
    "degree_ccdf",
    "label_users",
    "random_split",
    "SbloParams",
    "objective_value",
    "score_sblo",
    "solve_blo",
    "solve_sblo",
    "__version__",
]
