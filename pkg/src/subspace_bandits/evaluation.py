"""Exact loss evaluation against known moments, and coin-identification scoring.

For a projector P and moments (C, E||x||^2) the expected squared distance is
E||x - P x||^2 = E||x||^2 - <P, C>, an identity for exact moments, so the
excess over the optimal projector is computed without sampling error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import ProjectionMatrix, top_k_projector
from .errors import DimMismatch, MissingBasis
from .oracles import DistributionSpec, Moments
from .spectral import frob_inner, sym_eig

# Excess this far below zero is floating-point noise and reported as 0;
# anything lower indicates inconsistent inputs.
NEG_EXCESS_TOL = 1e-9


@dataclass(frozen=True)
class LossReport:
    loss: float
    optimal_loss: float
    excess: float


@dataclass(frozen=True, eq=False)
class CoinReport:
    """Overlap scores for a coin fixture.

    ``theta[j]`` is the squared projection mass the candidate basis puts on
    direction j; coin j counts as identified when the mass favors the biased
    side; ``beta`` is the identified fraction.
    """

    theta: np.ndarray
    identified: frozenset[int]
    beta: float


def loss(pi: ProjectionMatrix, mom: Moments) -> float:
    """Expected squared distance E||x||^2 - <P, C>; never below -1e-9."""
    if pi.dim != mom.dim:
        raise DimMismatch(f"projector dimension {pi.dim} != moments dimension {mom.dim}")
    return mom.mean_sq_norm - frob_inner(pi.matrix, mom.C)


def optimal_projection(mom: Moments, k: int) -> tuple[ProjectionMatrix, float]:
    """The top-k projector of C and its loss (the optimum over all projectors)."""
    if not 1 <= k < mom.dim:
        raise DimMismatch(f"k={k} out of range for dimension {mom.dim}")
    eig = sym_eig(mom.C)
    pi = top_k_projector(eig, k)
    return pi, mom.mean_sq_norm - float(np.sum(eig.values[:k]))


def excess_loss(pi: ProjectionMatrix, mom: Moments, k: int) -> LossReport:
    """Loss of ``pi`` minus the optimal loss; tiny negatives report as 0."""
    value = loss(pi, mom)
    _, best = optimal_projection(mom, k)
    excess = value - best
    if excess < -NEG_EXCESS_TOL:
        raise ValueError(
            f"excess {excess:.3g} below -{NEG_EXCESS_TOL}: projector beats the exact optimum, "
            "inputs are inconsistent"
        )
    return LossReport(loss=value, optimal_loss=best, excess=max(excess, 0.0))


def identified_fraction(pi_hat: ProjectionMatrix, fixture: DistributionSpec) -> CoinReport:
    """Score a projector against a coin fixture.

    For each of the 2k fixture directions u_j, theta[j] sums the squared
    normalized overlaps |<u_hat_i, u_j>| / (||u_hat_i|| ||u_j||) over the
    projector's basis vectors.  Coin j is identified when the overlap mass
    sits on the side its bias favors: theta[j] > theta[j+k] for a +1 sign,
    theta[j] < theta[j+k] for a -1 sign.
    """
    if fixture.coin is None:
        raise MissingBasis(f"distribution {fixture.tag!r} carries no coin structure")
    meta = fixture.coin
    basis = pi_hat.orthonormal_basis()  # (d, k_hat)
    if basis.shape[0] != fixture.d:
        raise DimMismatch(f"projector dimension {basis.shape[0]} != fixture dimension {fixture.d}")

    u_norms = np.linalg.norm(meta.basis, axis=1)
    b_norms = np.linalg.norm(basis, axis=0)
    overlaps = np.abs(meta.basis @ basis) / (u_norms[:, None] * b_norms[None, :])
    theta = np.sum(overlaps**2, axis=1)  # (2k,)

    k = meta.k
    identified = set()
    for j in range(k):
        if meta.signs[j] > 0 and theta[j] > theta[j + k]:
            identified.add(j)
        elif meta.signs[j] < 0 and theta[j] < theta[j + k]:
            identified.add(j)
    return CoinReport(theta=theta, identified=frozenset(identified), beta=len(identified) / k)
