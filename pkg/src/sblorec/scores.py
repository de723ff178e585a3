"""Dense recommendation score matrices and their binary dump format."""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError
from .graphdata import InteractionNetwork

#: Masked (train-set) entries are set to -inf so they can never be ranked.
MASKED = -np.inf

_MAGIC = b"SBRM"
_VERSION = 1
_HEADER = struct.Struct("<4sBBQQdd")  # magic, version, kind, rows, cols, p1, p2
_KIND_FACTORS = 0
_KIND_SCORES = 1


@dataclass
class ScoreMatrix:
    """m x n real-valued scores for every (user, object) pair.

    When ``masked`` is set, entries for train-set interactions hold ``MASKED``
    and are excluded from rankings; all other entries are finite.
    """

    values: np.ndarray
    masked: bool
    algorithm: str = ""
    params: dict = field(default_factory=dict)

    @property
    def m(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1]

    def row(self, user: int) -> np.ndarray:
        return self.values[user]


def apply_train_mask(values: np.ndarray, train: InteractionNetwork) -> np.ndarray:
    """Set train-set entries to the mask sentinel, in place."""
    edges = train.edges
    if edges.size:
        values[edges[:, 0], edges[:, 1]] = MASKED
    return values


def dump_matrix(path, values: np.ndarray, kind: str = "scores",
                params: tuple[float, float] = (0.0, 0.0)) -> None:
    """Row-major float64 dump with a fixed-size header (dims + two params)."""
    arr = np.ascontiguousarray(values, dtype=np.float64)
    kind_code = _KIND_FACTORS if kind == "factors" else _KIND_SCORES
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, _VERSION, kind_code,
                              arr.shape[0], arr.shape[1],
                              float(params[0]), float(params[1])))
        fh.write(arr.tobytes(order="C"))


def load_matrix(path):
    """Inverse of :func:`dump_matrix`; returns (values, kind, params)."""
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) != _HEADER.size:
            raise DataError(f"{path}: truncated matrix dump header")
        magic, version, kind_code, rows, cols, p1, p2 = _HEADER.unpack(header)
        if magic != _MAGIC:
            raise DataError(f"{path}: not a matrix dump (bad magic)")
        if version != _VERSION:
            raise DataError(f"{path}: unsupported dump version {version}")
        data = np.frombuffer(fh.read(), dtype=np.float64)
    if data.size != rows * cols:
        raise DataError(f"{path}: dump payload size mismatch")
    kind = "factors" if kind_code == _KIND_FACTORS else "scores"
    return data.reshape(rows, cols).copy(), kind, (p1, p2)
