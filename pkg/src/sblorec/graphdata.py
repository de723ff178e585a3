"""Edge-list ingestion and the two adjacency structures.

Raw inputs are line-oriented text files: a social file with two user ids
per line (directed duplicates allowed, symmetrized on ingest) and a rating
file with ``user object rating`` per line (edge kept iff the max rating over
duplicates reaches the threshold).  Identifiers are mapped to dense integer
indices in first-appearance order, so re-ingesting the same files yields the
same indexing.  Networks are immutable after construction; storage is sparse
(CSR adjacency + edge arrays), dense matrices are materialized only inside
solvers.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .errors import ConsistencyError, DataError, ParseError


class Index:
    """Bijection between source identifiers and dense integer indices.

    Assignment order is first appearance, which makes the mapping a pure
    function of the input files.
    """

    def __init__(self):
        self._to_id: list[str] = []
        self._to_idx: dict[str, int] = {}

    def __len__(self) -> int:
        return len(self._to_id)

    def __contains__(self, identifier: str) -> bool:
        return identifier in self._to_idx

    def add(self, identifier: str) -> int:
        """Return the index for ``identifier``, registering it if new."""
        idx = self._to_idx.get(identifier)
        if idx is None:
            idx = len(self._to_id)
            self._to_idx[identifier] = idx
            self._to_id.append(identifier)
        return idx

    def index_of(self, identifier: str) -> int:
        return self._to_idx[identifier]

    def id_of(self, idx: int) -> str:
        return self._to_id[idx]

    def ids(self) -> list[str]:
        return list(self._to_id)

    def write_mapping(self, path) -> None:
        """Persist ``index<TAB>identifier`` lines so results stay traceable."""
        with open(path, "w", encoding="utf-8") as fh:
            for i, ident in enumerate(self._to_id):
                fh.write(f"{i}\t{ident}\n")


def _iter_data_lines(path):
    """Yield (line_no, tokens) for non-blank, non-comment lines."""
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            yield line_no, line.split()


class SocialNetwork:
    """Symmetric 0/1 user-user adjacency without self-loops."""

    def __init__(self, m: int, edges: np.ndarray, users: Index | None = None):
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if edges.size:
            lo = np.minimum(edges[:, 0], edges[:, 1])
            hi = np.maximum(edges[:, 0], edges[:, 1])
            keep = lo != hi  # drop self-loops
            edges = np.unique(np.column_stack([lo[keep], hi[keep]]), axis=0)
        else:
            edges = edges.reshape(0, 2)
        if edges.size and (edges.min() < 0 or edges.max() >= m):
            raise DataError(f"social edge index out of range for m={m}")
        self.m = int(m)
        self.edges = edges  # (E, 2), i < l, lexicographically sorted
        self.users = users
        data = np.ones(len(edges), dtype=np.float64)
        adj = sp.coo_matrix(
            (np.concatenate([data, data]),
             (np.concatenate([edges[:, 0], edges[:, 1]]),
              np.concatenate([edges[:, 1], edges[:, 0]]))),
            shape=(m, m),
        )
        self._adj = adj.tocsr()
        self.degrees = np.asarray(self._adj.sum(axis=1)).ravel().astype(np.int64)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def matrix(self) -> sp.csr_matrix:
        """Sparse symmetric adjacency (float64)."""
        return self._adj

    def neighbors(self, i: int) -> np.ndarray:
        return self._adj.indices[self._adj.indptr[i]:self._adj.indptr[i + 1]]

    def has_edge(self, i: int, l: int) -> bool:
        nbrs = self.neighbors(i)
        pos = np.searchsorted(nbrs, l)
        return pos < len(nbrs) and nbrs[pos] == l

    def fingerprint(self) -> str:
        h = hashlib.blake2b(digest_size=16)
        h.update(np.int64(self.m).tobytes())
        h.update(np.ascontiguousarray(self.edges).tobytes())
        return h.hexdigest()

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SocialNetwork)
            and self.m == other.m
            and np.array_equal(self.edges, other.edges)
        )

    def export(self, path) -> None:
        """Write the edge list back out, sorted by (first, second) index."""
        ids = self.users.ids() if self.users is not None else [str(i) for i in range(self.m)]
        with open(path, "w", encoding="utf-8") as fh:
            for i, l in self.edges:
                fh.write(f"{ids[i]} {ids[l]}\n")


class InteractionNetwork:
    """0/1 user-object bipartite adjacency."""

    def __init__(self, m: int, n: int, edges: np.ndarray,
                 users: Index | None = None, objects: Index | None = None):
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if edges.size:
            edges = np.unique(edges, axis=0)
            if edges[:, 0].min() < 0 or edges[:, 0].max() >= m:
                raise DataError(f"user index out of range for m={m}")
            if edges[:, 1].min() < 0 or edges[:, 1].max() >= n:
                raise DataError(f"object index out of range for n={n}")
        self.m = int(m)
        self.n = int(n)
        self.edges = edges  # (E, 2) = (user, object), lexicographically sorted
        self.users = users
        self.objects = objects
        data = np.ones(len(edges), dtype=np.float64)
        self._mat = sp.coo_matrix(
            (data, (edges[:, 0], edges[:, 1])), shape=(m, n)
        ).tocsr()
        self._mat_t = self._mat.T.tocsr()
        self.user_degrees = np.asarray(self._mat.sum(axis=1)).ravel().astype(np.int64)
        self.object_degrees = np.asarray(self._mat.sum(axis=0)).ravel().astype(np.int64)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def matrix(self) -> sp.csr_matrix:
        """Sparse user x object incidence (float64)."""
        return self._mat

    def user_items(self, i: int) -> np.ndarray:
        return self._mat.indices[self._mat.indptr[i]:self._mat.indptr[i + 1]]

    def object_users(self, a: int) -> np.ndarray:
        return self._mat_t.indices[self._mat_t.indptr[a]:self._mat_t.indptr[a + 1]]

    def has_edge(self, i: int, a: int) -> bool:
        items = self.user_items(i)
        pos = np.searchsorted(items, a)
        return pos < len(items) and items[pos] == a

    def edge_set(self) -> set[tuple[int, int]]:
        return {(int(u), int(o)) for u, o in self.edges}

    def fingerprint(self) -> str:
        h = hashlib.blake2b(digest_size=16)
        h.update(np.int64(self.m).tobytes())
        h.update(np.int64(self.n).tobytes())
        h.update(np.ascontiguousarray(self.edges).tobytes())
        return h.hexdigest()

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, InteractionNetwork)
            and self.m == other.m
            and self.n == other.n
            and np.array_equal(self.edges, other.edges)
        )

    def subset(self, keep: np.ndarray) -> "InteractionNetwork":
        """New network over the same universe keeping ``edges[keep]``."""
        return InteractionNetwork(self.m, self.n, self.edges[keep],
                                  users=self.users, objects=self.objects)

    def export(self, path, rating_value: int = 5) -> None:
        """Write ``user object rating`` lines; the stored graph is 0/1 so a
        constant rating at the top of the scale is used (round-trips for any
        threshold <= rating_value)."""
        uids = self.users.ids() if self.users is not None else [str(i) for i in range(self.m)]
        oids = self.objects.ids() if self.objects is not None else [str(a) for a in range(self.n)]
        with open(path, "w", encoding="utf-8") as fh:
            for u, o in self.edges:
                fh.write(f"{uids[u]} {oids[o]} {rating_value}\n")


@dataclass(frozen=True)
class DatasetStats:
    """The eight structural statistics of a dataset."""

    m: int
    n: int
    n_social_edges: int
    n_interactions: int
    mean_social_degree: float
    mean_interaction_degree: float
    sparsity_social: float
    sparsity_interactions: float


def _parse_pairs(path) -> list[tuple[str, str]]:
    pairs = []
    seen_any = False
    for line_no, tokens in _iter_data_lines(path):
        seen_any = True
        if len(tokens) != 2:
            raise ParseError(path, line_no, f"expected 2 tokens, got {len(tokens)}")
        pairs.append((tokens[0], tokens[1]))
    if not seen_any:
        raise DataError(f"{path}: empty social edge list")
    return pairs


def _parse_ratings(path) -> list[tuple[str, str, float]]:
    triples = []
    seen_any = False
    for line_no, tokens in _iter_data_lines(path):
        seen_any = True
        if len(tokens) != 3:
            raise ParseError(path, line_no, f"expected 3 tokens, got {len(tokens)}")
        try:
            rating = float(tokens[2])
        except ValueError:
            raise ParseError(path, line_no, f"non-numeric rating {tokens[2]!r}") from None
        triples.append((tokens[0], tokens[1], rating))
    if not seen_any:
        raise DataError(f"{path}: empty rating edge list")
    return triples


def _social_from_pairs(pairs, users: Index) -> np.ndarray:
    edges = np.empty((len(pairs), 2), dtype=np.int64)
    for k, (a, b) in enumerate(pairs):
        edges[k, 0] = users.add(a)
        edges[k, 1] = users.add(b)
    return edges


def _interactions_from_triples(triples, threshold, users: Index, objects: Index):
    best: dict[tuple[int, int], float] = {}
    for u, o, r in triples:
        key = (users.add(u), objects.add(o))
        prev = best.get(key)
        if prev is None or r > prev:  # duplicates: keep the max rating
            best[key] = r
    edges = np.array(
        [key for key, r in best.items() if r >= threshold], dtype=np.int64
    ).reshape(-1, 2)
    return edges


def ingest_social(path, users: Index | None = None) -> SocialNetwork:
    """Read a social edge list into a symmetrized, deduplicated network."""
    users = users if users is not None else Index()
    edges = _social_from_pairs(_parse_pairs(path), users)
    return SocialNetwork(len(users), edges, users=users)


def ingest_ratings(path, threshold: float = 3.0,
                   users: Index | None = None,
                   objects: Index | None = None) -> InteractionNetwork:
    """Read a rating edge list, keeping (user, object) pairs whose max rating
    over duplicate lines is >= threshold."""
    users = users if users is not None else Index()
    objects = objects if objects is not None else Index()
    edges = _interactions_from_triples(_parse_ratings(path), threshold, users, objects)
    return InteractionNetwork(len(users), len(objects), edges,
                              users=users, objects=objects)


class Dataset:
    """Social + interaction networks over one shared user index.

    Users present in only one of the two files stay registered with degree 0
    in the other network; objects live only in the interaction network.
    """

    def __init__(self, social: SocialNetwork, interactions: InteractionNetwork,
                 users: Index, objects: Index, name: str = "dataset"):
        if social.m != interactions.m:
            raise ConsistencyError(
                f"social m={social.m} != interactions m={interactions.m}"
            )
        self.social = social
        self.interactions = interactions
        self.users = users
        self.objects = objects
        self.name = name

    @classmethod
    def from_files(cls, social_path, ratings_path, rating_threshold: float = 3.0,
                   name: str | None = None) -> "Dataset":
        users = Index()
        objects = Index()
        # Register users from the social file first, then the rating file,
        # so indexing is a pure function of the two files.
        pairs = _parse_pairs(social_path)
        social_edges = _social_from_pairs(pairs, users)
        triples = _parse_ratings(ratings_path)
        inter_edges = _interactions_from_triples(triples, rating_threshold, users, objects)
        m, n = len(users), len(objects)
        social = SocialNetwork(m, social_edges, users=users)
        inter = InteractionNetwork(m, n, inter_edges, users=users, objects=objects)
        return cls(social, inter, users, objects,
                   name=name or Path(ratings_path).stem)

    def stats(self) -> DatasetStats:
        return compute_stats(self.social, self.interactions)


def compute_stats(social: SocialNetwork, interactions: InteractionNetwork) -> DatasetStats:
    """Structural statistics of a (social, interaction) pair."""
    if social.m != interactions.m:
        raise ConsistencyError(
            f"social m={social.m} != interactions m={interactions.m}"
        )
    m, n = interactions.m, interactions.n
    ea, eb = social.n_edges, interactions.n_edges
    return DatasetStats(
        m=m,
        n=n,
        n_social_edges=ea,
        n_interactions=eb,
        mean_social_degree=2.0 * ea / m,
        mean_interaction_degree=eb / m,
        sparsity_social=2.0 * ea / (m * m),
        sparsity_interactions=eb / (m * n),
    )
