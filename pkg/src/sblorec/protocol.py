"""Train/probe splits and user-class labelling.

The random split partitions interaction edges uniformly (deterministic given
the seed).  The cold-start split moves every interaction of a cold-start user
into the probe, leaving those users with zero training degree.  User classes
are predicates on the degree in the *full* interaction network: a class is a
set of users, and the cold-start set is contained in the inactive set.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ConsistencyError, DataError
from .graphdata import InteractionNetwork

CLASS_NAMES = ("all", "active", "inactive", "cold_start")


@dataclass
class EvaluationSplit:
    """Disjoint train/probe partition of an interaction network."""

    train: InteractionNetwork
    probe: frozenset  # of (user, object) pairs
    seed: int
    probe_fraction: float
    kind: str = "random"  # "random" | "cold_start"
    full_fingerprint: str = ""

    def __post_init__(self):
        self._probe_by_user: dict[int, list[int]] = {}
        for u, o in self.probe:
            self._probe_by_user.setdefault(u, []).append(o)
        for u in self._probe_by_user:
            self._probe_by_user[u].sort()

    @property
    def n_probe(self) -> int:
        return len(self.probe)

    def probe_items(self, user: int) -> list[int]:
        return self._probe_by_user.get(user, [])

    def users_with_probe(self) -> np.ndarray:
        return np.array(sorted(self._probe_by_user), dtype=np.int64)

    def n_users_empty_train(self) -> int:
        """Users that lost every interaction to the probe."""
        lost = [u for u in self._probe_by_user if self.train.user_degrees[u] == 0]
        return len(lost)

    def export(self, train_path, probe_path, meta_path) -> None:
        """Two edge-list files plus a metadata record for exact reproduction."""
        net = self.train
        uids = net.users.ids() if net.users is not None else [str(i) for i in range(net.m)]
        oids = net.objects.ids() if net.objects is not None else [str(a) for a in range(net.n)]
        with open(train_path, "w", encoding="utf-8") as fh:
            for u, o in net.edges:
                fh.write(f"{uids[u]} {oids[o]}\n")
        with open(probe_path, "w", encoding="utf-8") as fh:
            for u, o in sorted(self.probe):
                fh.write(f"{uids[u]} {oids[o]}\n")
        meta = {
            "kind": self.kind,
            "seed": self.seed,
            "probe_fraction": self.probe_fraction,
            "n_train": self.train.n_edges,
            "n_probe": self.n_probe,
            "full_fingerprint": self.full_fingerprint,
        }
        with open(meta_path, "w", encoding="utf-8") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")


def random_split(interactions: InteractionNetwork, probe_fraction: float,
                 seed: int) -> EvaluationSplit:
    """Uniform random edge partition; |probe| = round(fraction * |E|)."""
    if not 0.0 < probe_fraction < 1.0:
        raise ValueError(f"probe_fraction must be in (0, 1), got {probe_fraction}")
    n_edges = interactions.n_edges
    if n_edges == 0:
        raise DataError("cannot split an empty interaction network")
    n_probe = int(round(probe_fraction * n_edges))
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n_edges)
    probe_idx = np.zeros(n_edges, dtype=bool)
    probe_idx[perm[:n_probe]] = True
    probe = frozenset(
        (int(u), int(o)) for u, o in interactions.edges[probe_idx]
    )
    train = interactions.subset(~probe_idx)
    return EvaluationSplit(
        train=train, probe=probe, seed=seed, probe_fraction=probe_fraction,
        kind="random", full_fingerprint=interactions.fingerprint(),
    )


@dataclass
class UserClassLabels:
    """Degree-derived user classes plus the thresholds that produced them.

    Classes are predicates on the full-network interaction degree, so the
    cold-start set is a subset of the inactive set and is reported as such;
    ``primary`` carries one label per user for display (cold_start wins over
    inactive).
    """

    cold_max: int
    inactive_max: int
    active_min: int
    degrees: np.ndarray = field(repr=False)
    full_fingerprint: str = ""

    def __post_init__(self):
        k = self.degrees
        self._members = {
            "all": np.arange(len(k), dtype=np.int64),
            "cold_start": np.flatnonzero(k <= self.cold_max),
            "inactive": np.flatnonzero(k <= self.inactive_max),
            "active": np.flatnonzero(k >= self.active_min),
        }

    def members(self, class_name: str) -> np.ndarray:
        if class_name not in self._members:
            raise ValueError(f"unknown user class {class_name!r}")
        return self._members[class_name]

    def fractions(self) -> dict[str, float]:
        m = len(self.degrees)
        return {name: len(idx) / m for name, idx in self._members.items()}

    def primary(self) -> np.ndarray:
        """One label per user; cold_start < inactive < ordinary < active."""
        out = np.full(len(self.degrees), "ordinary", dtype=object)
        out[self._members["active"]] = "active"
        out[self._members["inactive"]] = "inactive"
        out[self._members["cold_start"]] = "cold_start"
        return out


def label_users(interactions: InteractionNetwork, cold_max: int,
                inactive_max: int, active_min: int) -> UserClassLabels:
    """Label users by interaction degree in the full network."""
    if not cold_max <= inactive_max < active_min:
        raise ValueError(
            f"need cold_max <= inactive_max < active_min, got "
            f"({cold_max}, {inactive_max}, {active_min})"
        )
    return UserClassLabels(
        cold_max=int(cold_max),
        inactive_max=int(inactive_max),
        active_min=int(active_min),
        degrees=interactions.user_degrees.copy(),
        full_fingerprint=interactions.fingerprint(),
    )


def cold_start_split(interactions: InteractionNetwork,
                     labels: UserClassLabels) -> EvaluationSplit:
    """Probe = every interaction of a cold-start user; train = the rest."""
    if labels.full_fingerprint != interactions.fingerprint():
        raise ConsistencyError("labels were computed on a different network")
    cold = set(int(u) for u in labels.members("cold_start"))
    is_probe = np.array([int(u) in cold for u, _ in interactions.edges], dtype=bool)
    probe = frozenset(
        (int(u), int(o)) for u, o in interactions.edges[is_probe]
    )
    if not probe:
        raise DataError("no cold-start user has any interaction; nothing to evaluate")
    train = interactions.subset(~is_probe)
    fraction = len(probe) / interactions.n_edges
    return EvaluationSplit(
        train=train, probe=probe, seed=-1, probe_fraction=fraction,
        kind="cold_start", full_fingerprint=interactions.fingerprint(),
    )


def degree_ccdf(interactions: InteractionNetwork) -> list[tuple[int, float]]:
    """P(k >= k_obs) for each observed interaction degree, non-increasing."""
    degrees = interactions.user_degrees
    if len(degrees) == 0:
        raise DataError("empty network has no degree distribution")
    values, counts = np.unique(degrees, return_counts=True)
    total = counts.sum()
    # P(k >= v) = 1 - P(k < v) = (total - cumulative count below v) / total
    below = np.concatenate([[0], np.cumsum(counts)[:-1]])
    return [(int(v), float((total - b) / total)) for v, b in zip(values, below)]
