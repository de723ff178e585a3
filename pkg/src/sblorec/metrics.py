"""Per-user evaluation metrics and per-class aggregation.

Accuracy: precision, recall, F-score at list length L, and AUPR over the full
eligible ranking.  Diversity: intra-similarity (mean Salton similarity inside
one list), system Hamming distance (pairwise list overlap across users), and
popularity (mean train degree of recommended objects).

Eligible objects for ranking = all objects minus the user's train items when
the score matrix is masked.  Ranking ties break by ascending object index.
AUPR integrates the precision-recall curve by trapezoids over the points
where recall increases, flat-extended to recall 0 at the first such point
(so a perfect ranking scores 1, and a single relevant object at rank N among
N scores 1/N).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError
from .graphdata import InteractionNetwork
from .protocol import EvaluationSplit, UserClassLabels
from .scores import ScoreMatrix


@dataclass(frozen=True)
class RecommendationList:
    """Top-L objects for one user, deterministically ordered."""

    user: int
    objects: np.ndarray
    length: int


@dataclass
class MetricReport:
    """Aggregate of the seven metrics for one user class."""

    user_class: str
    n_users: int
    length: int
    aupr: float
    precision: float
    recall: float
    f_score: float
    intra_similarity: float
    hamming: float | None
    popularity: float
    seed: int = 0

    def as_row(self) -> dict:
        return {
            "class": self.user_class,
            "L": self.length,
            "seed": self.seed,
            "n_users": self.n_users,
            "AUPR": self.aupr,
            "Pre": self.precision,
            "Rec": self.recall,
            "F": self.f_score,
            "I": self.intra_similarity,
            "H": self.hamming,
            "Pop": self.popularity,
        }


def rank_eligible(score_row: np.ndarray, eligible: np.ndarray) -> np.ndarray:
    """Eligible objects ordered by descending score, ties by ascending index."""
    scores = score_row[eligible]
    order = np.lexsort((eligible, -scores))
    return eligible[order]


def eligible_objects(scores: ScoreMatrix, train: InteractionNetwork,
                     user: int) -> np.ndarray:
    """All objects, minus the user's train items when the matrix is masked."""
    if not scores.masked:
        return np.arange(scores.n, dtype=np.int64)
    mask = np.ones(scores.n, dtype=bool)
    mask[train.user_items(user)] = False
    return np.flatnonzero(mask)


def top_l_list(scores: ScoreMatrix, train: InteractionNetwork, user: int,
               length: int) -> RecommendationList:
    """Top-L recommendation for one user."""
    if length < 1:
        raise ValueError("list length must be >= 1")
    eligible = eligible_objects(scores, train, user)
    ranked = rank_eligible(scores.row(user), eligible)
    take = min(length, len(ranked))
    return RecommendationList(user=user, objects=ranked[:take], length=length)


def precision_recall_f(rec_list: RecommendationList,
                       probe_objects: set[int]) -> tuple[float, float, float]:
    """Hits over list length, hits over probe size, and their harmonic mean."""
    if not probe_objects:
        raise DataError("user has no probe interactions; skip upstream")
    hits = sum(1 for o in rec_list.objects if int(o) in probe_objects)
    pre = hits / rec_list.length
    rec = hits / len(probe_objects)
    f = 0.0 if pre + rec == 0 else 2.0 * pre * rec / (pre + rec)
    return pre, rec, f


def aupr(score_row: np.ndarray, probe_objects: set[int],
         eligible: np.ndarray) -> float:
    """Area under the precision-recall curve over the full eligible ranking."""
    if len(eligible) == 0:
        raise DataError("no eligible objects to rank")
    relevant = probe_objects & {int(o) for o in eligible}
    if not relevant:
        raise DataError("no probe object among eligible objects")
    ranked = rank_eligible(score_row, eligible)
    is_hit = np.fromiter((int(o) in relevant for o in ranked), dtype=bool,
                         count=len(ranked))
    positions = np.flatnonzero(is_hit) + 1  # 1-based ranks of the hits
    n_rel = len(relevant)
    recall_pts = np.arange(1, n_rel + 1) / n_rel
    precision_pts = np.arange(1, n_rel + 1) / positions
    # flat extension to recall 0 at the first hit's precision
    recall_pts = np.concatenate([[0.0], recall_pts])
    precision_pts = np.concatenate([[precision_pts[0]], precision_pts])
    return float(np.trapezoid(precision_pts, recall_pts))


def intra_similarity(rec_list: RecommendationList,
                     train: InteractionNetwork) -> float:
    """Mean Salton similarity over distinct object pairs in one list."""
    objects = np.asarray(rec_list.objects, dtype=np.int64)
    if len(objects) < 2:
        raise DataError("intra-similarity needs a list of length >= 2")
    sub = train.matrix()[:, objects]
    overlap = (sub.T @ sub).toarray()
    degrees = train.object_degrees[objects].astype(np.float64)
    inv = np.zeros_like(degrees)
    inv[degrees > 0] = 1.0 / np.sqrt(degrees[degrees > 0])
    sim = overlap * np.outer(inv, inv)
    k = len(objects)
    off_diag_sum = sim.sum() - np.trace(sim)
    return float(off_diag_sum / (k * (k - 1)))


def hamming_system(lists: list[RecommendationList],
                   pair_sample: int | None = None,
                   seed: int = 0) -> float:
    """Mean over user pairs of 1 - |O_i cap O_j| / L.

    Exact over all unordered pairs by default; ``pair_sample`` switches to a
    uniform random sample of pairs for very large user counts.
    """
    if len(lists) < 2:
        raise DataError("system Hamming distance needs at least 2 lists")
    length = lists[0].length
    n_obj = int(max(obj.max(initial=-1) for obj in (l.objects for l in lists))) + 1
    if pair_sample is not None:
        rng = np.random.default_rng(seed)
        sets = [set(int(o) for o in l.objects) for l in lists]
        total = 0.0
        for _ in range(pair_sample):
            i, j = rng.choice(len(lists), size=2, replace=False)
            total += 1.0 - len(sets[i] & sets[j]) / length
        return total / pair_sample
    indicator = np.zeros((len(lists), n_obj), dtype=np.float64)
    for row, l in enumerate(lists):
        indicator[row, l.objects] = 1.0
    overlap = indicator @ indicator.T
    iu = np.triu_indices(len(lists), k=1)
    return float(np.mean(1.0 - overlap[iu] / length))


def popularity(rec_list: RecommendationList, train: InteractionNetwork) -> float:
    """Mean train degree of the recommended objects."""
    if len(rec_list.objects) == 0:
        return 0.0
    return float(np.mean(train.object_degrees[rec_list.objects]))


@dataclass
class UserMetrics:
    """Per-user metric values collected before aggregation."""

    user: int
    aupr: float
    precision: float
    recall: float
    f_score: float
    intra_similarity: float | None
    popularity: float
    rec_list: RecommendationList = field(repr=False)


def evaluate_users(scores: ScoreMatrix, split: EvaluationSplit, length: int,
                   users: np.ndarray | None = None) -> list[UserMetrics]:
    """Per-user metrics for every user with at least one probe interaction."""
    train = split.train
    candidates = split.users_with_probe() if users is None else users
    out = []
    for user in candidates:
        user = int(user)
        probe = set(split.probe_items(user))
        if not probe:
            continue
        eligible = eligible_objects(scores, train, user)
        if len(eligible) == 0:
            continue
        rec_list = top_l_list(scores, train, user, length)
        pre, rec, f = precision_recall_f(rec_list, probe)
        try:
            area = aupr(scores.row(user), probe, eligible)
        except DataError:
            continue  # no probe object rankable for this user
        intra = (intra_similarity(rec_list, train)
                 if len(rec_list.objects) >= 2 else None)
        out.append(UserMetrics(
            user=user, aupr=area, precision=pre, recall=rec, f_score=f,
            intra_similarity=intra, popularity=popularity(rec_list, train),
            rec_list=rec_list,
        ))
    return out


def aggregate(per_user: list[UserMetrics], labels: UserClassLabels,
              user_class: str, length: int, seed: int = 0,
              hamming_pair_sample: int | None = None) -> MetricReport | None:
    """Arithmetic means over the class members; Hamming over in-class pairs.

    Returns None (with a warning) when no evaluated user belongs to the class.
    """
    members = set(int(u) for u in labels.members(user_class))
    selected = [um for um in per_user if um.user in members]
    if not selected:
        warnings.warn(f"user class {user_class!r} has no evaluated users; omitted")
        return None
    intra_vals = [um.intra_similarity for um in selected
                  if um.intra_similarity is not None]
    lists = [um.rec_list for um in selected]
    hamming = (hamming_system(lists, pair_sample=hamming_pair_sample, seed=seed)
               if len(lists) >= 2 else None)
    return MetricReport(
        user_class=user_class,
        n_users=len(selected),
        length=length,
        aupr=float(np.mean([um.aupr for um in selected])),
        precision=float(np.mean([um.precision for um in selected])),
        recall=float(np.mean([um.recall for um in selected])),
        f_score=float(np.mean([um.f_score for um in selected])),
        intra_similarity=float(np.mean(intra_vals)) if intra_vals else float("nan"),
        hamming=hamming,
        popularity=float(np.mean([um.popularity for um in selected])),
        seed=seed,
    )
