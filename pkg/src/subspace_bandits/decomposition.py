"""Decompose a hull element into a convex combination of rank-k projectors.

Any symmetric matrix with spectrum in [0, 1] and trace k is a convex
combination of at most d rank-k projectors sharing its eigenbasis.  The
procedure works on the spectrum normalized by k: repeatedly take the k
largest entries J, peel off weight

    alpha_i = min( k * min_{j in J} lambda_j,  sum(lambda) - k * max_{j not in J} lambda_j )

with the corresponding projector onto the J-eigenvectors, and subtract.  The
loop terminates in at most d iterations, the weights are a probability
vector, and the weighted projector sum reconstructs the input.  Sampling a
component with its weight yields a random projector whose expectation is the
input element.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .domain import HullElement, ProjectionMatrix, projector_from_basis
from .errors import NonTermination, NotInHull
from .spectral import sym_eig

# Residual spectrum entries at or below this count as zero.
ZERO_TOL = 1e-10
# Eigenvalues may leave [0, 1] by at most this much before decomposition refuses.
INPUT_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class MixtureDecomposition:
    """Convex weights over at most d projectors sharing one eigenbasis."""

    components: tuple[tuple[float, ProjectionMatrix], ...]

    def __post_init__(self):
        w = np.array([weight for weight, _ in self.components])
        if w.size == 0:
            raise NotInHull("decomposition must have at least one component")
        if float(w.min()) < -1e-12:
            raise NotInHull(f"negative mixture weight {w.min():.3g}")
        if abs(float(w.sum()) - 1.0) > 1e-9:
            raise NotInHull(f"mixture weights sum to {w.sum():.12g}, not 1")

    @property
    def size(self) -> int:
        return len(self.components)

    @property
    def weights(self) -> np.ndarray:
        return np.array([weight for weight, _ in self.components])

    def reconstruct(self) -> np.ndarray:
        out = np.zeros_like(self.components[0][1].matrix)
        for weight, proj in self.components:
            out += weight * proj.matrix
        return out


@dataclass
class DecompositionTrace:
    """Per-iteration weights and residual l1 norms (before each subtraction)."""

    weights: list[float] = field(default_factory=list)
    residual_l1: list[float] = field(default_factory=list)


def decompose(w, k: int | None = None, return_trace: bool = False):
    """Decompose a hull element into at most d weighted rank-k projectors.

    ``w`` is a :class:`HullElement` or a symmetric matrix with ``k`` given.
    Eigenvalues outside [0, 1] by at most 1e-8 are clipped and the spectrum
    rescaled to trace exactly k before the loop; larger violations raise
    :class:`NotInHull`.  Failure of the residual to vanish within d
    iterations raises :class:`NonTermination` (an internal tolerance bug,
    never silent truncation).
    """
    if isinstance(w, HullElement):
        matrix, k = w.matrix, w.k
    else:
        if k is None:
            raise ValueError("k is required when w is not a HullElement")
        matrix = w
    eig = sym_eig(matrix)
    d = eig.dim
    vals = eig.values
    if float(vals.min()) < -INPUT_TOL or float(vals.max()) > 1 + INPUT_TOL:
        raise NotInHull(
            f"spectrum [{vals.min():.6g}, {vals.max():.6g}] leaves [0, 1] by more than {INPUT_TOL}"
        )
    if abs(float(vals.sum()) - k) > INPUT_TOL:
        raise NotInHull(f"trace {vals.sum():.12g} differs from k={k} by more than {INPUT_TOL}")

    clipped = np.clip(vals, 0.0, 1.0)
    clipped *= k / clipped.sum()
    lam = clipped / k  # normalized spectrum, sums to 1

    basis = eig.vectors
    components: list[tuple[float, ProjectionMatrix]] = []
    trace = DecompositionTrace() if return_trace else None

    for _ in range(d):
        if float(lam.max()) <= ZERO_TOL:
            break
        top = np.argsort(-lam, kind="stable")[:k]  # ties broken by lowest index
        s = float(lam[top].min())
        outside = np.delete(lam, top)
        ell = float(outside.max()) if outside.size else 0.0
        alpha = min(s * k, float(lam.sum()) - ell * k)
        if alpha <= ZERO_TOL:
            raise NonTermination(
                f"stalled with residual l1={lam.sum():.3g} and step weight {alpha:.3g}"
            )
        if trace is not None:
            trace.weights.append(alpha)
            trace.residual_l1.append(float(lam.sum()))
        lam[top] -= alpha / k
        np.clip(lam, 0.0, None, out=lam)
        components.append((alpha, projector_from_basis(basis[:, np.sort(top)])))
    if float(lam.max()) > ZERO_TOL:
        raise NonTermination(f"residual spectrum did not vanish in {d} iterations")

    mix = MixtureDecomposition(components=tuple(components))
    return (mix, trace) if return_trace else mix


def sample_component(mix: MixtureDecomposition, rng: np.random.Generator) -> ProjectionMatrix:
    """Draw one projector with the mixture's law (weights clipped at 0, renormalized)."""
    w = np.clip(mix.weights, 0.0, None)
    cum = np.cumsum(w / w.sum())
    cum[-1] = 1.0
    pos = min(int(np.searchsorted(cum, rng.random(), side="right")), mix.size - 1)
    return mix.components[pos][1]
