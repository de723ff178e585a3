"""Request/response models of the HTTP service."""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field


class ConfigRequest(BaseModel):
    """Base request: every operation is driven by a server-side config file."""

    config_path: str


class StatsPayload(BaseModel):
    m: int
    n: int
    n_social_edges: int
    n_interactions: int
    mean_social_degree: float
    mean_interaction_degree: float
    sparsity_social: float
    sparsity_interactions: float


class IngestResponse(BaseModel):
    dataset: str
    stats: StatsPayload
    class_fractions: dict[str, float]


class SplitRequest(ConfigRequest):
    seed: Optional[int] = None
    cold_start: bool = False


class SplitResponse(BaseModel):
    kind: str
    seed: int
    n_train: int
    n_probe: int
    n_users_empty_train: int
    files: dict[str, str]


class FitRequest(ConfigRequest):
    algo: str = "sblo"
    seed: Optional[int] = None
    dump: bool = True


class FitResponse(BaseModel):
    algo: str
    params: dict[str, float]
    seed: int
    residual: Optional[float] = None
    seconds: float
    files: dict[str, str] = Field(default_factory=dict)


class EvaluateRequest(ConfigRequest):
    algo: Optional[str] = None
    seed: Optional[int] = None
    list_length: Optional[int] = None


class MetricRowPayload(BaseModel):
    algorithm: str
    user_class: str
    length: int
    seed: int
    status: str
    n_users: Optional[int] = None
    aupr: Optional[float] = None
    precision: Optional[float] = None
    recall: Optional[float] = None
    f_score: Optional[float] = None
    intra_similarity: Optional[float] = None
    hamming: Optional[float] = None
    popularity: Optional[float] = None


class EvaluateResponse(BaseModel):
    config_hash: str
    rows: list[MetricRowPayload]
    files: dict[str, str]


class GridRequest(ConfigRequest):
    algo: str
    user_class: str = "all"
    list_length: Optional[int] = None


class GridPointPayload(BaseModel):
    params: dict[str, float]
    mean_aupr: Optional[float] = None
    status: str


class GridResponse(BaseModel):
    algo: str
    user_class: str
    best_params: dict[str, float]
    n_points: int
    points: list[GridPointPayload]
    table_file: str


class RewireCurveRequest(ConfigRequest):
    sigma: Optional[float] = None  # single-sigma override of the config grid
    seed: Optional[int] = None
    user_class: str = "all"
    list_length: Optional[int] = None


class CurvePointPayload(BaseModel):
    sigma: float
    aupr_mean: float
    aupr_std: float
    improvement_over_blo: float


class RewireCurveResponse(BaseModel):
    blo_aupr: float
    user_class: str
    points: list[CurvePointPayload]
    curve_file: str


class AnalyzeRequest(ConfigRequest):
    seed: Optional[int] = None


class AnalyzeResponse(BaseModel):
    n_rates: int
    n_undefined: int
    zero_share: float
    share_above_02: float
    files: dict[str, str]


class ErrorPayload(BaseModel):
    kind: str  # "config" | "data" | "numerical"
    message: str
