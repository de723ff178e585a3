"""Joint social/behavioral linear-optimization recommender (SBLO) and its
social-free degenerate form (BLO).

Both learn a dense m x m implicit user-user factor matrix S minimizing

    ||S||_F^2 + lambda1 ||A - S A||_F^2 + lambda2 ||B - S B||_F^2

whose unique minimizer has the closed form S* = M (M + I)^{-1} with
M = lambda1 A A^T + lambda2 B B^T.  M is positive semidefinite, so M + I is
symmetric positive definite and the solve uses one Cholesky factorization
with all m right-hand sides back-substituted at once.  Recommendation scores
are R = S* B over the training interactions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import ConsistencyError, SolverError
from .graphdata import InteractionNetwork, SocialNetwork
from .scores import ScoreMatrix, apply_train_mask


@dataclass(frozen=True)
class SbloParams:
    """Regularization weights and the linear-solve residual bound."""

    lambda1: float
    lambda2: float
    tolerance: float = 1e-10

    def __post_init__(self):
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise ValueError("lambda1 and lambda2 must be nonnegative")
        if self.lambda1 == 0 and self.lambda2 == 0:
            raise ValueError("lambda1 and lambda2 cannot both be zero")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")


@dataclass
class ImplicitFactorMatrix:
    """Dense m x m user-user factor matrix with fit provenance."""

    values: np.ndarray
    params: SbloParams
    social_fingerprint: str = ""
    train_fingerprint: str = ""
    residual: float = 0.0
    algorithm: str = "sblo"
    extras: dict = field(default_factory=dict)

    @property
    def m(self) -> int:
        return self.values.shape[0]


def _coupling_matrix(social: SocialNetwork | None,
                     interactions: InteractionNetwork,
                     params: SbloParams) -> np.ndarray:
    """Dense M = lambda1 A A^T + lambda2 B B^T from sparse products."""
    m = interactions.m
    out = np.zeros((m, m), dtype=np.float64)
    if params.lambda1 > 0 and social is not None:
        a = social.matrix()
        out += params.lambda1 * (a @ a.T).toarray()
    if params.lambda2 > 0:
        b = interactions.matrix()
        out += params.lambda2 * (b @ b.T).toarray()
    return out


def _solve_factors(coupling: np.ndarray, params: SbloParams) -> tuple[np.ndarray, float]:
    """S* = M (M + I)^{-1} via a Cholesky solve of (M + I) X = M."""
    m = coupling.shape[0]
    system = coupling + np.eye(m)
    try:
        cho = sla.cho_factor(system, lower=True, check_finite=False)
        x = sla.cho_solve(cho, coupling, check_finite=False)
    except (sla.LinAlgError, ValueError) as exc:
        raise SolverError(f"Cholesky solve failed: {exc}") from exc
    # X = (M+I)^{-1} M, and M(M+I)^{-1} is its transpose.
    factors = np.ascontiguousarray(x.T)
    norm_m = np.linalg.norm(coupling)
    residual = np.linalg.norm(factors @ system - coupling) / max(norm_m, 1e-300)
    if not np.isfinite(residual) or residual > params.tolerance:
        raise SolverError("stationarity residual above tolerance", residual=residual)
    return factors, float(residual)


def solve_sblo(social: SocialNetwork, interactions: InteractionNetwork,
               params: SbloParams) -> ImplicitFactorMatrix:
    """Fit the implicit factor matrix from both relation types."""
    if social.m != interactions.m:
        raise ConsistencyError(
            f"social m={social.m} != interactions m={interactions.m}"
        )
    coupling = _coupling_matrix(social, interactions, params)
    factors, residual = _solve_factors(coupling, params)
    return ImplicitFactorMatrix(
        values=factors,
        params=params,
        social_fingerprint=social.fingerprint(),
        train_fingerprint=interactions.fingerprint(),
        residual=residual,
        algorithm="sblo",
    )


def solve_blo(interactions: InteractionNetwork, lambda2: float,
              tolerance: float = 1e-10) -> ImplicitFactorMatrix:
    """Degenerate fit ignoring the social network (lambda1 = 0)."""
    if lambda2 <= 0:
        raise ValueError("lambda2 must be positive for the behavioral-only fit")
    params = SbloParams(lambda1=0.0, lambda2=lambda2, tolerance=tolerance)
    coupling = _coupling_matrix(None, interactions, params)
    factors, residual = _solve_factors(coupling, params)
    return ImplicitFactorMatrix(
        values=factors,
        params=params,
        train_fingerprint=interactions.fingerprint(),
        residual=residual,
        algorithm="blo",
    )


def objective_value(factors: np.ndarray, social: SocialNetwork | None,
                    interactions: InteractionNetwork, params: SbloParams) -> float:
    """||S||_F^2 + lambda1 ||A - SA||_F^2 + lambda2 ||B - SB||_F^2.

    Each penalty is evaluated through its Gram matrix:
    ||A - SA||_F^2 = tr(G) - 2 tr(S G) + tr(S G S^T) with G = A A^T.
    """
    s = np.asarray(factors, dtype=np.float64)
    m = interactions.m
    if s.shape != (m, m):
        raise ValueError(f"factor matrix must be {m}x{m}, got {s.shape}")
    if social is not None and social.m != m:
        raise ConsistencyError("social and interaction networks disagree on m")
    total = float(np.sum(s * s))

    def penalty(gram: np.ndarray) -> float:
        sg = s @ gram
        return float(np.trace(gram) - 2.0 * np.sum(s * gram) + np.sum(sg * s))

    if params.lambda1 > 0:
        if social is None:
            raise ValueError("social network required when lambda1 > 0")
        a = social.matrix()
        total += params.lambda1 * penalty((a @ a.T).toarray())
    if params.lambda2 > 0:
        b = interactions.matrix()
        total += params.lambda2 * penalty((b @ b.T).toarray())
    return total


def score_sblo(factors: ImplicitFactorMatrix, train: InteractionNetwork,
               mask_trained: bool = True) -> ScoreMatrix:
    """R = S* B over the train network the factors were fit on."""
    if factors.train_fingerprint != train.fingerprint():
        raise ConsistencyError("factor matrix was fit on a different train network")
    values = factors.values @ train.matrix().toarray()
    if mask_trained:
        apply_train_mask(values, train)
    return ScoreMatrix(
        values=values,
        masked=mask_trained,
        algorithm=factors.algorithm,
        params={"lambda1": factors.params.lambda1, "lambda2": factors.params.lambda2},
    )


def social_reconstruction(factors: ImplicitFactorMatrix,
                          social: SocialNetwork) -> np.ndarray:
    """Diagnostic S* A: reconstructed user-user relation scores."""
    if factors.social_fingerprint and factors.social_fingerprint != social.fingerprint():
        raise ConsistencyError("factor matrix was fit on a different social network")
    return factors.values @ social.matrix().toarray()
