"""End-to-end benchmark orchestration.

One benchmark run: for every seed, split the interactions, fit every selected
algorithm on the train side, rank, and aggregate the seven metrics per user
class; the cold-start class uses its own deterministic split and only the
algorithms that stay defined for users without training interactions.  All
outputs are pure functions of (config, seeds): rerunning a config hash
reproduces every byte.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..analysis import ContributionCurve
from ..baselines import (
    score_cosra_t,
    score_grm,
    score_hhp,
    score_md,
    score_pd,
    score_rwr,
    score_socmd,
)
from ..errors import DataError, SblorecError
from ..graphdata import Dataset
from ..metrics import MetricReport, aggregate, evaluate_users
from ..protocol import EvaluationSplit, UserClassLabels, cold_start_split, label_users, random_split
from ..sblo import SbloParams, solve_blo, solve_sblo, score_sblo
from ..scores import ScoreMatrix
from .config import COLD_START_ALGORITHMS, ExperimentConfig

METRIC_COLUMNS = ("AUPR", "Pre", "Rec", "F", "I", "H", "Pop")


def fit_and_score(algo: str, dataset: Dataset, split: EvaluationSplit,
                  params: dict[str, float], mask_trained: bool = True,
                  tolerance: float = 1e-10) -> ScoreMatrix:
    """Fit one algorithm on the train side of a split and score all users."""
    train = split.train
    social = dataset.social
    if algo == "sblo":
        sp = SbloParams(lambda1=params["lambda1"], lambda2=params["lambda2"],
                        tolerance=tolerance)
        return score_sblo(solve_sblo(social, train, sp), train, mask_trained)
    if algo == "blo":
        factors = solve_blo(train, params["lambda2"], tolerance=tolerance)
        return score_sblo(factors, train, mask_trained)
    if algo == "md":
        return score_md(train, mask_trained)
    if algo == "hhp":
        return score_hhp(train, params["hhp_lambda"], mask_trained)
    if algo == "pd":
        return score_pd(train, params["pd_epsilon"], mask_trained)
    if algo == "cosra_t":
        return score_cosra_t(social, train, params["cosra_theta"], mask_trained)
    if algo == "socmd":
        return score_socmd(social, train, params["socmd_p"], mask_trained)
    if algo == "rwr":
        return score_rwr(social, train, params["rwr_theta1"],
                         params["rwr_theta2"], params["rwr_theta3"], mask_trained)
    if algo == "grm":
        return score_grm(train, mask_trained)
    raise ValueError(f"unknown algorithm {algo!r}")


@dataclass
class MetricRow:
    """One (algorithm, class, L, seed) cell of the benchmark."""

    algorithm: str
    user_class: str
    length: int
    seed: int
    status: str  # "ok" | "not_applicable" | "failed" | "empty_class"
    report: MetricReport | None = None
    error: str = ""

    def as_csv_row(self) -> list:
        base = [self.algorithm, self.user_class, self.length, self.seed, self.status]
        if self.report is None:
            return base + [""] * (len(METRIC_COLUMNS) + 1)
        r = self.report
        return base + [
            r.n_users,
            _fmt(r.aupr), _fmt(r.precision), _fmt(r.recall), _fmt(r.f_score),
            _fmt(r.intra_similarity), _fmt(r.hamming), _fmt(r.popularity),
        ]


@dataclass
class RunRecord:
    """Everything produced by one benchmark run."""

    config_hash: str
    dataset_name: str
    rows: list[MetricRow]
    chosen_params: dict[str, dict]
    class_fractions: dict[str, float]
    empty_train_users: dict[int, int]  # seed -> users with no train edges left
    timings: dict[str, float] = field(default_factory=dict)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float) and np.isnan(value):
        return "nan"
    return repr(float(value))


def _evaluate_cell(algo: str, dataset: Dataset, split: EvaluationSplit,
                   labels: UserClassLabels, params: dict, classes, lengths,
                   seed: int, cfg: ExperimentConfig) -> list[MetricRow]:
    rows: list[MetricRow] = []
    try:
        scores = fit_and_score(algo, dataset, split, params,
                               mask_trained=cfg.mask_trained,
                               tolerance=cfg.solver_tolerance)
        for length in lengths:
            per_user = evaluate_users(scores, split, length)
            for user_class in classes:
                report = aggregate(per_user, labels, user_class, length,
                                   seed=seed,
                                   hamming_pair_sample=cfg.hamming_pair_sample)
                if report is None:
                    rows.append(MetricRow(algo, user_class, length, seed,
                                          "empty_class"))
                else:
                    rows.append(MetricRow(algo, user_class, length, seed,
                                          "ok", report=report))
    except (SblorecError, ValueError) as exc:
        for length in lengths:
            for user_class in classes:
                rows.append(MetricRow(algo, user_class, length, seed,
                                      "failed", error=str(exc)))
    return rows


def run_benchmark(cfg: ExperimentConfig, dataset: Dataset | None = None,
                  chosen_params: dict[str, dict] | None = None) -> RunRecord:
    """Execute the full multi-seed benchmark described by a config."""
    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    if dataset is None:
        dataset = Dataset.from_files(cfg.social_path, cfg.ratings_path,
                                     cfg.rating_threshold, name=cfg.name)
    timings["ingest"] = time.perf_counter() - t0

    labels = label_users(dataset.interactions, cfg.cold_max, cfg.inactive_max,
                         cfg.active_min)
    params = {algo: dict(cfg.algo_params(algo)) for algo in cfg.algorithms}
    if chosen_params:
        for algo, p in chosen_params.items():
            params.setdefault(algo, {}).update(p)

    rows: list[MetricRow] = []
    empty_train: dict[int, int] = {}
    random_classes = [c for c in cfg.evaluated_classes if c != "cold_start"]

    if random_classes:
        for seed in cfg.seeds:
            split = random_split(dataset.interactions, cfg.probe_fraction, seed)
            empty_train[seed] = split.n_users_empty_train()
            for algo in cfg.algorithms:
                t_fit = time.perf_counter()
                rows.extend(_evaluate_cell(
                    algo, dataset, split, labels, params[algo],
                    random_classes, cfg.list_lengths, seed, cfg,
                ))
                timings[f"{algo}/seed{seed}"] = time.perf_counter() - t_fit

    if "cold_start" in cfg.evaluated_classes:
        try:
            split = cold_start_split(dataset.interactions, labels)
        except SblorecError as exc:
            for algo in cfg.algorithms:
                for length in cfg.list_lengths:
                    rows.append(MetricRow(algo, "cold_start", length, -1,
                                          "failed", error=str(exc)))
            split = None
        if split is not None:
            for algo in cfg.algorithms:
                if algo not in COLD_START_ALGORITHMS:
                    for length in cfg.list_lengths:
                        rows.append(MetricRow(algo, "cold_start", length, -1,
                                              "not_applicable"))
                    continue
                t_fit = time.perf_counter()
                rows.extend(_evaluate_cell(
                    algo, dataset, split, labels, params[algo],
                    ["cold_start"], cfg.list_lengths, -1, cfg,
                ))
                timings[f"{algo}/cold_start"] = time.perf_counter() - t_fit

    return RunRecord(
        config_hash=cfg.config_hash(),
        dataset_name=cfg.name,
        rows=rows,
        chosen_params=params,
        class_fractions=labels.fractions(),
        empty_train_users=empty_train,
        timings=timings,
    )


@dataclass
class GridPoint:
    params: dict[str, float]
    mean_aupr: float | None
    status: str  # "ok" | "failed"
    error: str = ""


@dataclass
class GridResult:
    algorithm: str
    user_class: str
    best_params: dict[str, float]
    points: list[GridPoint]


def grid_search(algo: str, grid: list[dict[str, float]], dataset: Dataset,
                splits: list[EvaluationSplit], labels: UserClassLabels,
                user_class: str, length: int,
                cfg: ExperimentConfig) -> GridResult:
    """Mean AUPR over the splits for each grid point; argmax wins, ties
    broken by grid order.  Failed points are recorded and skipped."""
    if not grid:
        raise ValueError("parameter grid is empty")
    points: list[GridPoint] = []
    best_idx = None
    best_aupr = -np.inf
    for idx, point in enumerate(grid):
        merged = dict(cfg.algo_params(algo))
        merged.update(point)
        values = []
        failure = None
        for split in splits:
            try:
                scores = fit_and_score(algo, dataset, split, merged,
                                       mask_trained=cfg.mask_trained,
                                       tolerance=cfg.solver_tolerance)
                per_user = evaluate_users(scores, split, length)
                report = aggregate(per_user, labels, user_class, length,
                                   hamming_pair_sample=cfg.hamming_pair_sample)
                if report is None:
                    raise DataError(f"no evaluated users in class {user_class!r}")
                values.append(report.aupr)
            except (SblorecError, ValueError) as exc:
                failure = str(exc)
                break
        if failure is not None:
            points.append(GridPoint(params=point, mean_aupr=None,
                                    status="failed", error=failure))
            continue
        mean = float(np.mean(values))
        points.append(GridPoint(params=point, mean_aupr=mean, status="ok"))
        if mean > best_aupr:  # strict: first occurrence wins ties
            best_aupr = mean
            best_idx = idx
    if best_idx is None:
        raise DataError(f"every grid point failed for {algo!r}")
    return GridResult(algorithm=algo, user_class=user_class,
                      best_params=grid[best_idx], points=points)


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc}") from exc


def emit_results(record: RunRecord, out_dir, config_text: str | None = None) -> dict[str, Path]:
    """Write results CSV, per-seed detail, metadata, and the config snapshot.

    File contents are byte-stable for identical inputs: floats are written
    with repr, row order follows the deterministic run order, and wall-clock
    timings go to the metadata file only.
    """
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise DataError(f"cannot create {out_dir}: {exc}") from exc

    files: dict[str, Path] = {}
    detail_path = out_dir / "results.csv"
    header = ["dataset", "algorithm", "class", "L", "seed", "status", "n_users",
              *METRIC_COLUMNS]
    _write_csv(detail_path, header,
               [[record.dataset_name, *row.as_csv_row()] for row in record.rows])
    files["results"] = detail_path

    # summary: mean over seeds per (algorithm, class, L), ok rows only
    groups: dict[tuple, list[MetricRow]] = {}
    for row in record.rows:
        groups.setdefault((row.algorithm, row.user_class, row.length), []).append(row)
    summary_rows = []
    for (algo, user_class, length), cell_rows in groups.items():
        ok = [r.report for r in cell_rows if r.status == "ok"]
        if not ok:
            summary_rows.append([record.dataset_name, algo, user_class, length,
                                 cell_rows[0].status, len(cell_rows),
                                 *[""] * len(METRIC_COLUMNS)])
            continue
        hamming_vals = [r.hamming for r in ok if r.hamming is not None]
        summary_rows.append([
            record.dataset_name, algo, user_class, length, "ok", len(ok),
            _fmt(np.mean([r.aupr for r in ok])),
            _fmt(np.mean([r.precision for r in ok])),
            _fmt(np.mean([r.recall for r in ok])),
            _fmt(np.mean([r.f_score for r in ok])),
            _fmt(np.mean([r.intra_similarity for r in ok])),
            _fmt(np.mean(hamming_vals)) if hamming_vals else "",
            _fmt(np.mean([r.popularity for r in ok])),
        ])
    summary_path = out_dir / "summary.csv"
    _write_csv(summary_path,
               ["dataset", "algorithm", "class", "L", "status", "n_runs",
                *METRIC_COLUMNS],
               summary_rows)
    files["summary"] = summary_path

    meta_path = out_dir / "run_meta.json"
    meta = {
        "config_hash": record.config_hash,
        "dataset": record.dataset_name,
        "chosen_params": record.chosen_params,
        "class_fractions": record.class_fractions,
        "empty_train_users": {str(k): v for k, v in record.empty_train_users.items()},
        "timings_seconds": {k: round(v, 6) for k, v in record.timings.items()},
    }
    try:
        with open(meta_path, "w", encoding="utf-8") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise DataError(f"cannot write {meta_path}: {exc}") from exc
    files["meta"] = meta_path

    if config_text is not None:
        snap_path = out_dir / "config_snapshot.toml"
        snap_path.write_text(config_text, encoding="utf-8")
        files["config"] = snap_path
    return files


def emit_grid(result: GridResult, out_dir) -> Path:
    """Persist the full grid table beside the winner."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    names = sorted({name for p in result.points for name in p.params})
    rows = []
    for p in result.points:
        rows.append([
            *[_fmt(p.params.get(name)) if p.params.get(name) is not None else ""
              for name in names],
            p.status,
            _fmt(p.mean_aupr) if p.mean_aupr is not None else "",
            "best" if p.params == result.best_params else "",
        ])
    path = out_dir / f"grid_{result.algorithm}_{result.user_class}.csv"
    _write_csv(path, [*names, "status", "mean_AUPR", "winner"], rows)
    return path


def emit_curve(curve: ContributionCurve, out_dir) -> Path:
    """Rewiring-fraction vs accuracy table, with the social-free reference."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for point in curve.points:
        rows.append([
            _fmt(point.sigma),
            _fmt(point.aupr_mean),
            _fmt(point.aupr_std),
            _fmt(point.improvement_over_blo),
            _fmt(curve.blo_aupr),
            ";".join(_fmt(a) for a in point.achieved_fractions),
        ])
    path = out_dir / "rewire_curve.csv"
    _write_csv(path, ["sigma", "AUPR_mean", "AUPR_std", "improvement_over_blo",
                      "BLO_AUPR", "achieved_fractions"], rows)
    return path
