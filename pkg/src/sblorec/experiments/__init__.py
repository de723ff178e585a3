from .config import ExperimentConfig, load_config
from .runner import RunRecord, emit_results, grid_search, run_benchmark

__all__ = [
    "ExperimentConfig",
    "load_config",
    "RunRecord",
    "emit_results",
    "grid_search",
    "run_benchmark",
]
