"""Experiment configuration: TOML files with a strict schema.

Sections and keys are validated against the schema below; unknown keys are
hard errors so typos cannot silently change a run.  Parameter grids default
to ranges centered on the reported optimum of the joint recommender.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from ..errors import ConfigError

ALGORITHMS = ("sblo", "blo", "md", "hhp", "pd", "cosra_t", "socmd", "rwr", "grm")

#: Algorithms that stay defined for users with zero training interactions.
COLD_START_ALGORITHMS = ("sblo", "socmd", "rwr", "grm")

#: Algorithms without tunable parameters.
UNTUNED = ("md", "grm")


def _decade_grid() -> list[float]:
    return [c * 10.0 ** e for e in (-4, -3, -2, -1) for c in (1, 2, 4, 6, 8)]


DEFAULT_GRIDS: dict[str, dict[str, list[float]]] = {
    "sblo": {"lambda1": _decade_grid(), "lambda2": _decade_grid()},
    "blo": {"lambda2": _decade_grid()},
    "hhp": {"hhp_lambda": [round(0.1 * k, 1) for k in range(0, 11)]},
    "pd": {"pd_epsilon": [round(-1.0 + 0.1 * k, 1) for k in range(0, 11)]},
    "cosra_t": {"cosra_theta": [round(0.1 * k, 1) for k in range(1, 21)]},
    "socmd": {"socmd_p": [round(0.1 * k, 1) for k in range(0, 11)]},
    "rwr": {
        "rwr_theta1": [0.0, 0.5, 1.0, 2.0],
        "rwr_theta2": [0.0, 0.5, 1.0, 2.0],
        "rwr_theta3": [round(0.1 * k, 1) for k in range(1, 10)],
    },
}

DEFAULT_PARAMS: dict[str, dict[str, float]] = {
    "sblo": {"lambda1": 6e-3, "lambda2": 4e-2},
    "blo": {"lambda2": 4e-2},
    "hhp": {"hhp_lambda": 0.7},
    "pd": {"pd_epsilon": -0.8},
    "cosra_t": {"cosra_theta": 0.5},
    "socmd": {"socmd_p": 0.8},
    "rwr": {"rwr_theta1": 0.5, "rwr_theta2": 1.0, "rwr_theta3": 0.5},
    "md": {},
    "grm": {},
}

_SCHEMA: dict[str, dict[str, type | tuple]] = {
    "dataset": {
        "name": str,
        "social_path": str,
        "ratings_path": str,
        "rating_threshold": (int, float),
    },
    "split": {
        "probe_fraction": (int, float),
        "seed_base": int,
        "seed_count": int,
        "tuning_seed_base": int,
    },
    "classes": {
        "cold_max": int,
        "inactive_max": int,
        "active_min": int,
        "evaluated": list,
    },
    "evaluation": {
        "list_lengths": list,
        "mask_trained": bool,
        "hamming_pair_sample": int,
        "solver_tolerance": (int, float),
    },
    "algorithms": {
        "selected": list,
    },
    "params": dict,  # per-algorithm tables
    "grids": dict,
    "analysis": {
        "sigma_grid": list,
        "rewire_seed_count": int,
        "rewire_seed_base": int,
        "max_attempts_factor": int,
        "histogram_bins": int,
    },
    "output": {
        "dir": str,
    },
}

_CLASS_CHOICES = ("all", "active", "inactive", "cold_start")


@dataclass
class ExperimentConfig:
    """Validated, fully-defaulted experiment description."""

    name: str
    social_path: Path
    ratings_path: Path
    rating_threshold: float = 3.0
    probe_fraction: float = 0.1
    seed_base: int = 0
    seed_count: int = 20
    # optional disjoint seed set for grid search; by default tuning reuses
    # the evaluation splits
    tuning_seed_base: int | None = None
    cold_max: int = 3
    inactive_max: int = 4
    active_min: int = 30
    evaluated_classes: tuple[str, ...] = _CLASS_CHOICES
    list_lengths: tuple[int, ...] = (50,)
    mask_trained: bool = True
    hamming_pair_sample: int | None = None
    solver_tolerance: float = 1e-10
    algorithms: tuple[str, ...] = ALGORITHMS
    params: dict = field(default_factory=dict)
    grids: dict = field(default_factory=dict)
    sigma_grid: tuple[float, ...] = (0.0, 0.25, 0.5, 0.75, 1.0)
    rewire_seed_count: int = 5
    rewire_seed_base: int = 1000
    max_attempts_factor: int = 100
    histogram_bins: int = 20
    output_dir: Path = Path("results")

    @property
    def seeds(self) -> list[int]:
        return [self.seed_base + k for k in range(self.seed_count)]

    @property
    def tuning_seeds(self) -> list[int]:
        base = self.tuning_seed_base
        if base is None:
            return self.seeds
        return [base + k for k in range(self.seed_count)]

    @property
    def rewire_seeds(self) -> list[int]:
        return [self.rewire_seed_base + k for k in range(self.rewire_seed_count)]

    def algo_params(self, algo: str) -> dict[str, float]:
        merged = dict(DEFAULT_PARAMS.get(algo, {}))
        merged.update(self.params.get(algo, {}))
        return merged

    def algo_grid(self, algo: str) -> list[dict[str, float]]:
        """Cartesian-product grid as a list of parameter dicts, in order."""
        axes = dict(DEFAULT_GRIDS.get(algo, {}))
        axes.update(self.grids.get(algo, {}))
        if not axes:
            return [{}]
        names = list(axes)
        points: list[dict[str, float]] = [{}]
        for name in names:
            points = [dict(p, **{name: v}) for p in points for v in axes[name]]
        return points

    def canonical_json(self) -> str:
        payload = {
            "name": self.name,
            "social_path": str(self.social_path),
            "ratings_path": str(self.ratings_path),
            "rating_threshold": self.rating_threshold,
            "probe_fraction": self.probe_fraction,
            "seed_base": self.seed_base,
            "seed_count": self.seed_count,
            "tuning_seed_base": self.tuning_seed_base,
            "cold_max": self.cold_max,
            "inactive_max": self.inactive_max,
            "active_min": self.active_min,
            "evaluated_classes": list(self.evaluated_classes),
            "list_lengths": list(self.list_lengths),
            "mask_trained": self.mask_trained,
            "hamming_pair_sample": self.hamming_pair_sample,
            "solver_tolerance": self.solver_tolerance,
            "algorithms": list(self.algorithms),
            "params": self.params,
            "grids": self.grids,
            "sigma_grid": list(self.sigma_grid),
            "rewire_seed_count": self.rewire_seed_count,
            "rewire_seed_base": self.rewire_seed_base,
            "max_attempts_factor": self.max_attempts_factor,
            "histogram_bins": self.histogram_bins,
        }
        return json.dumps(payload, sort_keys=True)

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()[:16]


def _check_unknown(section: str, table: dict, allowed) -> None:
    unknown = set(table) - set(allowed)
    if unknown:
        raise ConfigError(
            f"unknown key(s) in [{section}]: {', '.join(sorted(unknown))}"
        )


def _check_types(section: str, table: dict, schema: dict) -> None:
    for key, value in table.items():
        expected = schema[key]
        if expected is list:
            if not isinstance(value, list):
                raise ConfigError(f"[{section}] {key} must be a list")
        elif not isinstance(value, expected):
            raise ConfigError(f"[{section}] {key} has the wrong type")


def parse_config(raw: dict, base_dir: Path) -> ExperimentConfig:
    """Validate a parsed TOML document and apply defaults."""
    _check_unknown("<root>", raw, _SCHEMA)
    for section, table in raw.items():
        if not isinstance(table, dict):
            raise ConfigError(f"top-level key {section!r} must be a section")
        if section in ("params", "grids"):
            for algo, sub in table.items():
                if algo not in ALGORITHMS:
                    raise ConfigError(f"[{section}.{algo}]: unknown algorithm")
                if not isinstance(sub, dict):
                    raise ConfigError(f"[{section}.{algo}] must be a table")
                known = set(DEFAULT_PARAMS[algo]) | set(DEFAULT_GRIDS.get(algo, {}))
                _check_unknown(f"{section}.{algo}", sub, known)
        else:
            _check_unknown(section, table, _SCHEMA[section])
            _check_types(section, table, _SCHEMA[section])

    dataset = raw.get("dataset", {})
    for required in ("social_path", "ratings_path"):
        if required not in dataset:
            raise ConfigError(f"[dataset] {required} is required")

    def resolve(p: str) -> Path:
        path = Path(p)
        return path if path.is_absolute() else base_dir / path

    social_path = resolve(dataset["social_path"])
    ratings_path = resolve(dataset["ratings_path"])
    for path in (social_path, ratings_path):
        if not path.exists():
            raise ConfigError(f"dataset file does not exist: {path}")

    split = raw.get("split", {})
    classes = raw.get("classes", {})
    evaluation = raw.get("evaluation", {})
    algorithms = raw.get("algorithms", {})
    analysis = raw.get("analysis", {})
    output = raw.get("output", {})

    selected = tuple(algorithms.get("selected", ALGORITHMS))
    for algo in selected:
        if algo not in ALGORITHMS:
            raise ConfigError(f"[algorithms] unknown algorithm {algo!r}")
    evaluated = tuple(classes.get("evaluated", _CLASS_CHOICES))
    for cls in evaluated:
        if cls not in _CLASS_CHOICES:
            raise ConfigError(f"[classes] unknown user class {cls!r}")

    cfg = ExperimentConfig(
        name=dataset.get("name", ratings_path.stem),
        social_path=social_path,
        ratings_path=ratings_path,
        rating_threshold=float(dataset.get("rating_threshold", 3.0)),
        probe_fraction=float(split.get("probe_fraction", 0.1)),
        seed_base=split.get("seed_base", 0),
        seed_count=split.get("seed_count", 20),
        tuning_seed_base=split.get("tuning_seed_base"),
        cold_max=classes.get("cold_max", 3),
        inactive_max=classes.get("inactive_max", 4),
        active_min=classes.get("active_min", 30),
        evaluated_classes=evaluated,
        list_lengths=tuple(int(l) for l in evaluation.get("list_lengths", [50])),
        mask_trained=evaluation.get("mask_trained", True),
        hamming_pair_sample=evaluation.get("hamming_pair_sample"),
        solver_tolerance=float(evaluation.get("solver_tolerance", 1e-10)),
        algorithms=selected,
        params=raw.get("params", {}),
        grids=raw.get("grids", {}),
        sigma_grid=tuple(float(s) for s in analysis.get("sigma_grid", [0.0, 0.25, 0.5, 0.75, 1.0])),
        rewire_seed_count=analysis.get("rewire_seed_count", 5),
        rewire_seed_base=analysis.get("rewire_seed_base", 1000),
        max_attempts_factor=analysis.get("max_attempts_factor", 100),
        histogram_bins=analysis.get("histogram_bins", 20),
        output_dir=resolve(output.get("dir", "results")),
    )
    if not 0.0 < cfg.probe_fraction < 1.0:
        raise ConfigError("probe_fraction must be in (0, 1)")
    if cfg.seed_count < 1:
        raise ConfigError("seed_count must be >= 1")
    if not cfg.cold_max <= cfg.inactive_max < cfg.active_min:
        raise ConfigError("need cold_max <= inactive_max < active_min")
    if any(l < 1 for l in cfg.list_lengths):
        raise ConfigError("list lengths must be >= 1")
    for algo in selected:
        if algo not in UNTUNED and not cfg.algo_grid(algo):
            raise ConfigError(f"empty parameter grid for {algo!r}")
    return cfg


def load_config(path) -> ExperimentConfig:
    """Read and validate a TOML experiment config."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file does not exist: {path}")
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return parse_config(raw, base_dir=path.parent.resolve())
