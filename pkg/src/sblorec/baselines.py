"""The seven comparison recommenders.

Interaction-only: MD (two-hop resource allocation), HHP (its hybrid with
local heat conduction), PD (preferential diffusion), GRM (global degree
ranking).  Social-aware: the RWR-based similarity product, CosRA+T (social
ties reshape the user-to-user resource), SocMD (mixture of interaction and
social diffusion).

All scorers are pure functions of their inputs.  Degree-zero nodes follow a
universal 0/0 := 0 convention: no resource in, no resource out.  Object-object
weights are built from sparse co-collection products, never dense n x n
storage.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .graphdata import InteractionNetwork, SocialNetwork
from .scores import ScoreMatrix, apply_train_mask

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class BaselineParams:
    """Tunable knobs of the comparison recommenders, with bundled defaults."""

    hhp_lambda: float = 0.7
    pd_epsilon: float = -0.8
    cosra_theta: float = 0.5
    socmd_p: float = 0.8
    rwr_theta1: float = 0.5
    rwr_theta2: float = 1.0
    rwr_theta3: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.hhp_lambda <= 1.0:
            raise ValueError("hhp_lambda must be in [0, 1]")
        if not 0.0 <= self.socmd_p <= 1.0:
            raise ValueError("socmd_p must be in [0, 1]")
        if not 0.0 <= self.rwr_theta3 < 1.0:
            raise ValueError("rwr_theta3 must be in [0, 1)")
        if self.rwr_theta1 < 0 or self.rwr_theta2 < 0:
            raise ValueError("rwr similarity exponents must be nonnegative")


def _safe_inv(values: np.ndarray) -> np.ndarray:
    """1/x for x > 0, else 0."""
    out = np.zeros(len(values), dtype=np.float64)
    pos = values > 0
    out[pos] = 1.0 / values[pos]
    return out


def _safe_pow(base: np.ndarray, exponent: float) -> np.ndarray:
    """base**exponent for base > 0, else 0 (covers 0^0 and negative exponents)."""
    base = np.asarray(base, dtype=np.float64)
    out = np.zeros_like(base)
    pos = base > 0
    out[pos] = base[pos] ** exponent
    return out


def _diag(values: np.ndarray) -> sp.dia_matrix:
    return sp.diags(values)


def _finish(values: np.ndarray, train: InteractionNetwork, mask_trained: bool,
            algorithm: str, params: dict) -> ScoreMatrix:
    values = np.asarray(values, dtype=np.float64)
    if mask_trained:
        apply_train_mask(values, train)
    return ScoreMatrix(values=values, masked=mask_trained,
                       algorithm=algorithm, params=params)


def _co_collection(train: InteractionNetwork,
                   user_weights: np.ndarray) -> sp.csr_matrix:
    """Sparse C with C[a, b] = sum_l w_l b_la b_lb."""
    b = train.matrix()
    return (b.T @ _diag(user_weights) @ b).tocsr()


def score_md(train: InteractionNetwork, mask_trained: bool = True) -> ScoreMatrix:
    """Two-hop resource allocation on the bipartite train graph."""
    b = train.matrix()
    inv_ku = _safe_inv(train.user_degrees)
    inv_ko = _safe_inv(train.object_degrees)
    co = _co_collection(train, inv_ku)
    # f = B diag(1/k_obj) C  (C symmetric, columns of W scaled by 1/k_beta)
    values = (b @ _diag(inv_ko) @ co).toarray()
    return _finish(values, train, mask_trained, "md", {})


def score_hhp(train: InteractionNetwork, hybrid_lambda: float,
              mask_trained: bool = True) -> ScoreMatrix:
    """Hybrid of mass diffusion and local heat conduction."""
    if not 0.0 <= hybrid_lambda <= 1.0:
        raise ValueError(f"hybridization weight must be in [0, 1], got {hybrid_lambda}")
    b = train.matrix()
    ko = train.object_degrees
    co = _co_collection(train, _safe_inv(train.user_degrees))
    # W = diag(k^(lambda-1)) C diag(k^-lambda); f = B W^T
    left = _safe_pow(ko, hybrid_lambda - 1.0)
    right = _safe_pow(ko, -hybrid_lambda)
    values = (b @ _diag(right) @ co @ _diag(left)).toarray()
    return _finish(values, train, mask_trained, "hhp", {"hhp_lambda": hybrid_lambda})


def score_pd(train: InteractionNetwork, epsilon: float,
             mask_trained: bool = True) -> ScoreMatrix:
    """Preferential diffusion: received resource proportional to k_alpha^epsilon."""
    b = train.matrix()
    ko = train.object_degrees
    k_eps = _safe_pow(ko, epsilon)
    # per-user normalizer M_l = sum_r b_lr k_r^epsilon
    norm = np.asarray(b @ k_eps).ravel()
    co = _co_collection(train, _safe_inv(norm))
    values = (b @ _diag(_safe_inv(ko)) @ co @ _diag(k_eps)).toarray()
    return _finish(values, train, mask_trained, "pd", {"pd_epsilon": epsilon})


def score_grm(train: InteractionNetwork, mask_trained: bool = True) -> ScoreMatrix:
    """Global ranking: every user scores objects by train object degree."""
    values = np.tile(train.object_degrees.astype(np.float64), (train.m, 1))
    return _finish(values, train, mask_trained, "grm", {})


def score_rwr(social: SocialNetwork, train: InteractionNetwork,
              theta1: float, theta2: float, theta3: float,
              mask_trained: bool = True) -> ScoreMatrix:
    """Product of restart-walk social similarity and Salton interaction
    similarity, diffused to objects."""
    if not 0.0 <= theta3 < 1.0:
        raise ValueError(f"restart damping must be in [0, 1), got {theta3}")
    if theta1 < 0 or theta2 < 0:
        raise ValueError("similarity exponents must be nonnegative")
    m = social.m
    # Row-normalized transition T_ij = 1/k_i^A over social edges; rows of
    # isolated users are zero, so I - theta3 T stays nonsingular for theta3 < 1.
    t = _diag(_safe_inv(social.degrees)) @ social.matrix()
    # Row i of the social similarity is (1-theta3)(I - theta3 T)^{-1} e_i,
    # i.e. the matrix is (1-theta3) (I - theta3 T^T)^{-1}.
    system = np.eye(m) - theta3 * t.T.toarray()
    lu = sla.lu_factor(system, check_finite=False)
    sim_a = (1.0 - theta3) * sla.lu_solve(lu, np.eye(m), check_finite=False)

    overlap = (train.matrix() @ train.matrix().T).toarray()
    inv_sqrt = np.sqrt(_safe_inv(train.user_degrees))
    sim_b = overlap * np.outer(inv_sqrt, inv_sqrt)

    weights = _safe_pow(sim_a, theta1) * _safe_pow(sim_b, theta2)
    values = weights @ train.matrix().toarray()
    return _finish(values, train, mask_trained, "rwr",
                   {"rwr_theta1": theta1, "rwr_theta2": theta2, "rwr_theta3": theta3})


def _cosra_resource(train: InteractionNetwork) -> tuple[np.ndarray, sp.csr_matrix]:
    """t_ij = sum_beta b_i,beta b_j,beta / sqrt(k_j k_beta) and the
    receiver-normalized incidence used for the final diffusion step."""
    b = train.matrix()
    inv_sqrt_u = np.sqrt(_safe_inv(train.user_degrees))
    inv_sqrt_o = np.sqrt(_safe_inv(train.object_degrees))
    b_norm = (_diag(inv_sqrt_u) @ b @ _diag(inv_sqrt_o)).tocsr()
    resource = (b @ b_norm.T).toarray()
    return resource, b_norm


def score_cosra(train: InteractionNetwork, mask_trained: bool = True) -> ScoreMatrix:
    """CosRA without the social reweighting (the theta = 1 reduction)."""
    resource, b_norm = _cosra_resource(train)
    values = resource @ b_norm.toarray()
    return _finish(values, train, mask_trained, "cosra", {})


def score_cosra_t(social: SocialNetwork, train: InteractionNetwork,
                  theta: float, mask_trained: bool = True) -> ScoreMatrix:
    """CosRA with social ties raising the received resource to power theta."""
    resource, b_norm = _cosra_resource(train)
    adj = social.matrix().toarray().astype(bool)
    if theta <= 0 and np.any(resource[adj] == 0):
        log.warning("theta=%g with zero resources on social ties; "
                    "0 stays 0 by convention", theta)
    reweighted = np.where(adj, _safe_pow(resource, theta), resource)
    values = reweighted @ b_norm.toarray()
    return _finish(values, train, mask_trained, "cosra_t", {"cosra_theta": theta})


def score_socmd(social: SocialNetwork, train: InteractionNetwork, p: float,
                mask_trained: bool = True) -> ScoreMatrix:
    """Mixture of two-hop interaction diffusion (weight p) and two-step
    social diffusion into neighbors' items (weight 1-p)."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"diffusion probability must be in [0, 1], got {p}")
    b = train.matrix()
    inv_ku = _safe_inv(train.user_degrees)
    inv_ko = _safe_inv(train.object_degrees)
    values = np.zeros((train.m, train.n), dtype=np.float64)
    if p > 0:
        co = _co_collection(train, inv_ku)
        values += p * (_diag(inv_ku) @ b @ _diag(inv_ko) @ co).toarray()
    if p < 1:
        walk = _diag(_safe_inv(social.degrees)) @ social.matrix()
        spread = _diag(inv_ku) @ b
        values += (1.0 - p) * (walk @ (walk @ spread)).toarray()
    return _finish(values, train, mask_trained, "socmd", {"socmd_p": p})
