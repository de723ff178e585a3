"""HTTP face of the benchmark harness.

All heavy state (parsed datasets) lives in a small server-side cache keyed by
file identity, so repeated requests against the same config skip re-ingestion.
Errors map to structured payloads: config -> 400, data -> 422, numerical -> 500.
"""

from __future__ import annotations

import dataclasses
import time
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..analysis import common_object_stats, conversion_rates, social_contribution_curve
from ..errors import ConfigError, DataError, NumericalError, SblorecError
from ..experiments.config import ExperimentConfig, load_config
from ..experiments.runner import (
    MetricRow,
    emit_curve,
    emit_grid,
    emit_results,
    fit_and_score,
    grid_search,
    run_benchmark,
)
from ..graphdata import Dataset
from ..protocol import cold_start_split, label_users, random_split
from ..sblo import SbloParams, solve_blo, solve_sblo
from ..scores import dump_matrix
from . import schemas

app = FastAPI(title="sblorec", version=__version__)

_dataset_cache: dict[tuple, Dataset] = {}


def _file_key(path: Path) -> tuple:
    stat = path.stat()
    return (str(path), stat.st_size, stat.st_mtime_ns)


def _get_dataset(cfg: ExperimentConfig) -> Dataset:
    key = (_file_key(cfg.social_path), _file_key(cfg.ratings_path),
           cfg.rating_threshold)
    dataset = _dataset_cache.get(key)
    if dataset is None:
        dataset = Dataset.from_files(cfg.social_path, cfg.ratings_path,
                                     cfg.rating_threshold, name=cfg.name)
        _dataset_cache.clear()  # one dataset resident at a time
        _dataset_cache[key] = dataset
    return dataset


@app.exception_handler(SblorecError)
async def _handle_package_error(request: Request, exc: SblorecError):
    if isinstance(exc, ConfigError):
        kind, status = "config", 400
    elif isinstance(exc, NumericalError):
        kind, status = "numerical", 500
    else:
        kind, status = "data", 422
    payload = schemas.ErrorPayload(kind=kind, message=str(exc))
    return JSONResponse(status_code=status, content={"error": payload.model_dump()})


@app.exception_handler(ValueError)
async def _handle_value_error(request: Request, exc: ValueError):
    payload = schemas.ErrorPayload(kind="config", message=str(exc))
    return JSONResponse(status_code=400, content={"error": payload.model_dump()})


@app.get("/health")
def health():
    return {"status": "ok", "version": __version__}


@app.post("/ingest", response_model=schemas.IngestResponse)
def ingest(req: schemas.ConfigRequest):
    cfg = load_config(req.config_path)
    dataset = _get_dataset(cfg)
    stats = dataset.stats()
    labels = label_users(dataset.interactions, cfg.cold_max, cfg.inactive_max,
                         cfg.active_min)
    return schemas.IngestResponse(
        dataset=cfg.name,
        stats=schemas.StatsPayload(**stats.__dict__),
        class_fractions=labels.fractions(),
    )


def _write_mappings(cfg: ExperimentConfig, dataset: Dataset) -> None:
    """Persist id<->index mappings so per-user results stay traceable."""
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    dataset.users.write_mapping(cfg.output_dir / "users.tsv")
    dataset.objects.write_mapping(cfg.output_dir / "objects.tsv")


def _make_split(cfg: ExperimentConfig, dataset: Dataset, seed: int | None,
                cold_start: bool):
    if cold_start:
        labels = label_users(dataset.interactions, cfg.cold_max,
                             cfg.inactive_max, cfg.active_min)
        return cold_start_split(dataset.interactions, labels)
    actual_seed = cfg.seed_base if seed is None else seed
    return random_split(dataset.interactions, cfg.probe_fraction, actual_seed)


@app.post("/split", response_model=schemas.SplitResponse)
def split(req: schemas.SplitRequest):
    cfg = load_config(req.config_path)
    dataset = _get_dataset(cfg)
    result = _make_split(cfg, dataset, req.seed, req.cold_start)
    _write_mappings(cfg, dataset)
    out_dir = cfg.output_dir / "splits"
    out_dir.mkdir(parents=True, exist_ok=True)
    tag = "cold_start" if req.cold_start else f"seed{result.seed}"
    train_path = out_dir / f"train_{tag}.txt"
    probe_path = out_dir / f"probe_{tag}.txt"
    meta_path = out_dir / f"split_{tag}.json"
    result.export(train_path, probe_path, meta_path)
    return schemas.SplitResponse(
        kind=result.kind,
        seed=result.seed,
        n_train=result.train.n_edges,
        n_probe=result.n_probe,
        n_users_empty_train=result.n_users_empty_train(),
        files={"train": str(train_path), "probe": str(probe_path),
               "meta": str(meta_path)},
    )


@app.post("/fit", response_model=schemas.FitResponse)
def fit(req: schemas.FitRequest):
    cfg = load_config(req.config_path)
    dataset = _get_dataset(cfg)
    result = _make_split(cfg, dataset, req.seed, cold_start=False)
    params = cfg.algo_params(req.algo)
    t0 = time.perf_counter()
    residual = None
    files: dict[str, str] = {}
    if req.algo in ("sblo", "blo"):
        if req.algo == "sblo":
            factors = solve_sblo(dataset.social, result.train,
                                 SbloParams(params["lambda1"], params["lambda2"],
                                            tolerance=cfg.solver_tolerance))
        else:
            factors = solve_blo(result.train, params["lambda2"],
                                tolerance=cfg.solver_tolerance)
        residual = factors.residual
        scores = fit_and_score(req.algo, dataset, result, params,
                               mask_trained=cfg.mask_trained,
                               tolerance=cfg.solver_tolerance)
        if req.dump:
            out_dir = cfg.output_dir / "fits"
            out_dir.mkdir(parents=True, exist_ok=True)
            lam = (factors.params.lambda1, factors.params.lambda2)
            f_path = out_dir / f"{req.algo}_factors_seed{result.seed}.bin"
            s_path = out_dir / f"{req.algo}_scores_seed{result.seed}.bin"
            dump_matrix(f_path, factors.values, kind="factors", params=lam)
            dump_matrix(s_path, scores.values, kind="scores", params=lam)
            files = {"factors": str(f_path), "scores": str(s_path)}
    else:
        scores = fit_and_score(req.algo, dataset, result, params,
                               mask_trained=cfg.mask_trained,
                               tolerance=cfg.solver_tolerance)
        if req.dump:
            out_dir = cfg.output_dir / "fits"
            out_dir.mkdir(parents=True, exist_ok=True)
            s_path = out_dir / f"{req.algo}_scores_seed{result.seed}.bin"
            dump_matrix(s_path, scores.values, kind="scores")
            files = {"scores": str(s_path)}
    seconds = time.perf_counter() - t0
    return schemas.FitResponse(
        algo=req.algo, params={k: float(v) for k, v in params.items()},
        seed=result.seed, residual=residual, seconds=seconds, files=files,
    )


def _row_payload(row: MetricRow) -> schemas.MetricRowPayload:
    payload = schemas.MetricRowPayload(
        algorithm=row.algorithm, user_class=row.user_class, length=row.length,
        seed=row.seed, status=row.status,
    )
    if row.report is not None:
        r = row.report
        payload.n_users = r.n_users
        payload.aupr = r.aupr
        payload.precision = r.precision
        payload.recall = r.recall
        payload.f_score = r.f_score
        payload.intra_similarity = (None if np.isnan(r.intra_similarity)
                                    else r.intra_similarity)
        payload.hamming = r.hamming
        payload.popularity = r.popularity
    return payload


def _apply_overrides(cfg: ExperimentConfig, algo=None, seed=None,
                     list_length=None) -> ExperimentConfig:
    if algo is not None:
        cfg = dataclasses.replace(cfg, algorithms=(algo,))
    if seed is not None:
        cfg = dataclasses.replace(cfg, seed_base=seed, seed_count=1)
    if list_length is not None:
        cfg = dataclasses.replace(cfg, list_lengths=(list_length,))
    return cfg


@app.post("/evaluate", response_model=schemas.EvaluateResponse)
def evaluate(req: schemas.EvaluateRequest):
    cfg = load_config(req.config_path)
    cfg = _apply_overrides(cfg, algo=req.algo, seed=req.seed,
                           list_length=req.list_length)
    dataset = _get_dataset(cfg)
    record = run_benchmark(cfg, dataset=dataset)
    config_text = Path(req.config_path).read_text(encoding="utf-8")
    files = emit_results(record, cfg.output_dir, config_text=config_text)
    _write_mappings(cfg, dataset)
    return schemas.EvaluateResponse(
        config_hash=record.config_hash,
        rows=[_row_payload(row) for row in record.rows],
        files={k: str(v) for k, v in files.items()},
    )


@app.post("/grid", response_model=schemas.GridResponse)
def grid(req: schemas.GridRequest):
    cfg = load_config(req.config_path)
    dataset = _get_dataset(cfg)
    labels = label_users(dataset.interactions, cfg.cold_max, cfg.inactive_max,
                         cfg.active_min)
    if req.user_class == "cold_start":
        splits = [cold_start_split(dataset.interactions, labels)]
    else:
        splits = [random_split(dataset.interactions, cfg.probe_fraction, s)
                  for s in cfg.tuning_seeds]
    length = req.list_length or cfg.list_lengths[0]
    result = grid_search(req.algo, cfg.algo_grid(req.algo), dataset, splits,
                         labels, req.user_class, length, cfg)
    table = emit_grid(result, cfg.output_dir)
    return schemas.GridResponse(
        algo=result.algorithm,
        user_class=result.user_class,
        best_params=result.best_params,
        n_points=len(result.points),
        points=[schemas.GridPointPayload(params=p.params, mean_aupr=p.mean_aupr,
                                         status=p.status)
                for p in result.points],
        table_file=str(table),
    )


@app.post("/rewire-curve", response_model=schemas.RewireCurveResponse)
def rewire_curve(req: schemas.RewireCurveRequest):
    cfg = load_config(req.config_path)
    dataset = _get_dataset(cfg)
    labels = label_users(dataset.interactions, cfg.cold_max, cfg.inactive_max,
                         cfg.active_min)
    seed = cfg.seed_base if req.seed is None else req.seed
    split_obj = random_split(dataset.interactions, cfg.probe_fraction, seed)
    params = cfg.algo_params("sblo")
    sblo_params = SbloParams(params["lambda1"], params["lambda2"],
                             tolerance=cfg.solver_tolerance)
    sigma_grid = [req.sigma] if req.sigma is not None else list(cfg.sigma_grid)
    length = req.list_length or cfg.list_lengths[0]
    curve = social_contribution_curve(
        dataset.social, split_obj, sblo_params, sigma_grid, cfg.rewire_seeds,
        length=length, labels=labels, user_class=req.user_class,
    )
    path = emit_curve(curve, cfg.output_dir)
    return schemas.RewireCurveResponse(
        blo_aupr=curve.blo_aupr,
        user_class=curve.user_class,
        points=[schemas.CurvePointPayload(
            sigma=p.sigma, aupr_mean=p.aupr_mean, aupr_std=p.aupr_std,
            improvement_over_blo=p.improvement_over_blo) for p in curve.points],
        curve_file=str(path),
    )


@app.post("/analyze", response_model=schemas.AnalyzeResponse)
def analyze(req: schemas.AnalyzeRequest):
    cfg = load_config(req.config_path)
    dataset = _get_dataset(cfg)
    rates = conversion_rates(dataset.social, dataset.interactions,
                             n_bins=cfg.histogram_bins)
    seed = cfg.seed_base if req.seed is None else req.seed
    commons = common_object_stats(dataset.social, dataset.interactions, seed=seed)

    out_dir = cfg.output_dir / "analysis"
    out_dir.mkdir(parents=True, exist_ok=True)
    hist_path = out_dir / "conversion_hist.csv"
    with open(hist_path, "w", encoding="utf-8", newline="") as fh:
        fh.write("bin_left,bin_right,proportion\n")
        for left, right, prop in zip(rates.bins[:-1], rates.bins[1:],
                                     rates.proportions):
            fh.write(f"{left!r},{right!r},{prop!r}\n")
    common_path = out_dir / "common_objects.csv"
    with open(common_path, "w", encoding="utf-8", newline="") as fh:
        fh.write("pair_kind,common_objects,proportion\n")
        for kind in ("linked", "unlinked"):
            for value, prop in sorted(commons.distribution(kind).items()):
                fh.write(f"{kind},{value},{prop!r}\n")
    neighbors_path = out_dir / "common_by_neighbors.csv"
    with open(neighbors_path, "w", encoding="utf-8", newline="") as fh:
        fh.write("pair_kind,common_social_neighbors,mean_common_objects\n")
        for kind, table in (("linked", commons.linked_by_common_neighbors),
                            ("unlinked", commons.unlinked_by_common_neighbors)):
            for key in sorted(table):
                fh.write(f"{kind},{key},{table[key]!r}\n")

    return schemas.AnalyzeResponse(
        n_rates=len(rates.rates),
        n_undefined=rates.n_undefined,
        zero_share=rates.zero_share,
        share_above_02=rates.share_above(0.2),
        files={"conversion_hist": str(hist_path),
               "common_objects": str(common_path),
               "common_by_neighbors": str(neighbors_path)},
    )
