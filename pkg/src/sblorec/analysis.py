"""Coupling analyses between social ties and interaction behavior.

Covers the per-edge behavioral conversion rates, common-object statistics of
linked vs unlinked user pairs, the degree-preserving social rewiring null
model (pairwise edge swaps), and the rewiring-vs-accuracy curve that probes
how much the social network contributes to recommendation quality.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError
from .graphdata import InteractionNetwork, SocialNetwork
from .metrics import aggregate, evaluate_users
from .protocol import EvaluationSplit, UserClassLabels, label_users
from .sblo import SbloParams, solve_blo, solve_sblo, score_sblo

log = logging.getLogger(__name__)


@dataclass
class ConversionRateTable:
    """Directed per-edge conversion rates h and their distribution.

    h_{j->i} = |O_i cap O_j| / |O_i| over full interaction profiles, defined
    only when the receiver i has a nonempty profile.
    """

    rates: dict[tuple[int, int], float]  # (source j, receiver i) -> h
    n_undefined: int
    bins: np.ndarray = field(repr=False)
    proportions: np.ndarray = field(repr=False)

    @property
    def zero_share(self) -> float:
        if not self.rates:
            return 0.0
        return sum(1 for h in self.rates.values() if h == 0.0) / len(self.rates)

    def share_above(self, threshold: float = 0.2) -> float:
        if not self.rates:
            return 0.0
        return sum(1 for h in self.rates.values() if h > threshold) / len(self.rates)


def conversion_rates(social: SocialNetwork, interactions: InteractionNetwork,
                     n_bins: int = 20) -> ConversionRateTable:
    """Conversion rate for both directions of every social edge."""
    if social.m != interactions.m:
        raise DataError("networks do not share a user universe")
    rates: dict[tuple[int, int], float] = {}
    undefined = 0
    profiles = [set(int(o) for o in interactions.user_items(i))
                for i in range(interactions.m)]
    for i, l in social.edges:
        i, l = int(i), int(l)
        common = len(profiles[i] & profiles[l])
        for source, receiver in ((l, i), (i, l)):
            size = len(profiles[receiver])
            if size == 0:
                undefined += 1
            else:
                rates[(source, receiver)] = common / size
    values = np.array(sorted(rates.values()), dtype=np.float64)
    edges = np.linspace(0.0, 1.0, n_bins + 1)
    counts, _ = np.histogram(values, bins=edges) if len(values) else (np.zeros(n_bins), edges)
    proportions = counts / max(len(values), 1)
    return ConversionRateTable(rates=rates, n_undefined=undefined,
                               bins=edges, proportions=proportions)


@dataclass
class CommonObjectStats:
    """Common-object counts for linked pairs vs a matched unlinked sample."""

    linked_counts: np.ndarray
    unlinked_counts: np.ndarray
    linked_by_common_neighbors: dict[int, float]
    unlinked_by_common_neighbors: dict[int, float]
    sample_seed: int

    def distribution(self, which: str = "linked") -> dict[int, float]:
        counts = self.linked_counts if which == "linked" else self.unlinked_counts
        if len(counts) == 0:
            return {}
        values, freq = np.unique(counts, return_counts=True)
        return {int(v): float(c / len(counts)) for v, c in zip(values, freq)}


def _mean_by_key(keys: np.ndarray, values: np.ndarray) -> dict[int, float]:
    out: dict[int, float] = {}
    for k in np.unique(keys):
        out[int(k)] = float(values[keys == k].mean())
    return out


def common_object_stats(social: SocialNetwork, interactions: InteractionNetwork,
                        seed: int = 0) -> CommonObjectStats:
    """Compare |O_i cap O_j| across socially linked and unlinked pairs.

    Unlinked pairs are a seeded uniform sample of the same size as the edge
    set (full enumeration is quadratic in m).
    """
    if social.m != interactions.m:
        raise DataError("networks do not share a user universe")
    m = social.m
    b = interactions.matrix()
    adj = social.matrix()

    def pair_stats(pairs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        if len(pairs) == 0:
            return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
        common_objects = np.asarray(
            b[pairs[:, 0]].multiply(b[pairs[:, 1]]).sum(axis=1)
        ).ravel().astype(np.int64)
        common_neighbors = np.asarray(
            adj[pairs[:, 0]].multiply(adj[pairs[:, 1]]).sum(axis=1)
        ).ravel().astype(np.int64)
        return common_objects, common_neighbors

    linked_objects, linked_neighbors = pair_stats(social.edges)

    rng = np.random.default_rng(seed)
    target = len(social.edges)
    unlinked: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    attempts = 0
    max_attempts = max(100 * target, 1000)
    while len(unlinked) < target and attempts < max_attempts and m >= 2:
        attempts += 1
        i, j = rng.integers(0, m, size=2)
        if i == j:
            continue
        pair = (min(int(i), int(j)), max(int(i), int(j)))
        if pair in seen or social.has_edge(*pair):
            continue
        seen.add(pair)
        unlinked.append(pair)
    unlinked_objects, unlinked_neighbors = pair_stats(
        np.array(unlinked, dtype=np.int64).reshape(-1, 2)
    )
    return CommonObjectStats(
        linked_counts=linked_objects,
        unlinked_counts=unlinked_objects,
        linked_by_common_neighbors=_mean_by_key(linked_neighbors, linked_objects.astype(np.float64)),
        unlinked_by_common_neighbors=_mean_by_key(unlinked_neighbors, unlinked_objects.astype(np.float64)),
        sample_seed=seed,
    )


@dataclass
class RewiringResult:
    """Outcome of degree-preserving edge swaps on a social network."""

    network: SocialNetwork
    sigma: float
    achieved_fraction: float
    swap_attempts: int
    seed: int
    reached_target: bool


def rewire_social(social: SocialNetwork, sigma: float, seed: int,
                  max_attempts_factor: int = 100) -> RewiringResult:
    """Randomize edges by pairwise swaps until ceil(sigma * |E|) edges differ
    from the original, keeping every degree and the simple-graph property.

    Swap candidates are drawn uniformly with replacement; invalid swaps
    (self-loop or duplicate) count toward the attempt budget.  Exhausting the
    budget yields a partial result with a warning, not a failure.
    """
    if not 0.0 <= sigma <= 1.0:
        raise ValueError(f"sigma must be in [0, 1], got {sigma}")
    n_edges = social.n_edges
    if sigma > 0 and n_edges < 2:
        raise DataError("rewiring needs at least 2 edges")
    edges = [tuple(int(v) for v in e) for e in social.edges]
    if sigma == 0.0 or n_edges == 0:
        return RewiringResult(network=social, sigma=sigma, achieved_fraction=0.0,
                              swap_attempts=0, seed=seed, reached_target=True)

    original = set(edges)
    current = set(edges)
    edge_list = list(edges)
    target = int(np.ceil(sigma * n_edges))
    budget = max_attempts_factor * n_edges
    rng = np.random.default_rng(seed)
    changed = 0
    attempts = 0

    def norm(a: int, b: int) -> tuple[int, int]:
        return (a, b) if a < b else (b, a)

    while changed < target and attempts < budget:
        attempts += 1
        i1, i2 = rng.integers(0, n_edges, size=2)
        if i1 == i2:
            continue
        a, b = edge_list[i1]
        c, d = edge_list[i2]
        if rng.integers(0, 2):  # random orientation of the second edge
            c, d = d, c
        # swap (a,b),(c,d) -> (a,d),(c,b)
        if a == d or c == b:
            continue
        new1, new2 = norm(a, d), norm(c, b)
        if new1 == new2 or new1 in current or new2 in current:
            continue
        old1, old2 = norm(a, b), norm(c, d)
        current.discard(old1)
        current.discard(old2)
        current.add(new1)
        current.add(new2)
        edge_list[i1] = new1
        edge_list[i2] = new2
        delta = 0
        delta -= old1 not in original
        delta -= old2 not in original
        delta += new1 not in original
        delta += new2 not in original
        changed += delta

    achieved = changed / n_edges
    reached = changed >= target
    if not reached:
        log.warning("rewiring stopped at %.3f of edges changed (target %.3f) "
                    "after %d attempts", achieved, sigma, attempts)
    perturbed = SocialNetwork(social.m, np.array(edge_list, dtype=np.int64),
                              users=social.users)
    if not np.array_equal(perturbed.degrees, social.degrees):
        raise DataError("rewiring changed the degree sequence")  # defensive
    return RewiringResult(network=perturbed, sigma=sigma,
                          achieved_fraction=achieved, swap_attempts=attempts,
                          seed=seed, reached_target=reached)


@dataclass
class ContributionPoint:
    """One rewiring fraction on the social-contribution curve."""

    sigma: float
    aupr_mean: float
    aupr_std: float
    improvement_over_blo: float
    achieved_fractions: list[float]


@dataclass
class ContributionCurve:
    points: list[ContributionPoint]
    blo_aupr: float
    user_class: str
    length: int


def social_contribution_curve(social: SocialNetwork, split: EvaluationSplit,
                              params: SbloParams, sigma_grid: list[float],
                              seeds: list[int], length: int = 50,
                              labels: UserClassLabels | None = None,
                              user_class: str = "all") -> ContributionCurve:
    """Mean AUPR of the joint fit after rewiring each sigma fraction of the
    social edges, on a fixed split, plus the social-free reference value."""
    if labels is None:
        labels = label_users(split.train, 0, 0, 1)

    def fit_aupr(net: SocialNetwork) -> float:
        factors = solve_sblo(net, split.train, params)
        scores = score_sblo(factors, split.train, mask_trained=True)
        per_user = evaluate_users(scores, split, length)
        report = aggregate(per_user, labels, user_class, length)
        if report is None:
            raise DataError(f"no evaluated users in class {user_class!r}")
        return report.aupr

    blo_factors = solve_blo(split.train, params.lambda2, tolerance=params.tolerance)
    blo_scores = score_sblo(blo_factors, split.train, mask_trained=True)
    blo_report = aggregate(evaluate_users(blo_scores, split, length),
                           labels, user_class, length)
    if blo_report is None:
        raise DataError(f"no evaluated users in class {user_class!r}")
    blo_aupr = blo_report.aupr

    points = []
    for sigma in sigma_grid:
        values = []
        achieved = []
        if sigma == 0.0:
            values.append(fit_aupr(social))
            achieved.append(0.0)
        else:
            for seed in seeds:
                result = rewire_social(social, sigma, seed)
                achieved.append(result.achieved_fraction)
                values.append(fit_aupr(result.network))
        mean = float(np.mean(values))
        points.append(ContributionPoint(
            sigma=float(sigma),
            aupr_mean=mean,
            aupr_std=float(np.std(values)),
            improvement_over_blo=mean - blo_aupr,
            achieved_fractions=[float(a) for a in achieved],
        ))
    return ContributionCurve(points=points, blo_aupr=blo_aupr,
                             user_class=user_class, length=length)
