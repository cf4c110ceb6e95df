"""Problem parameters and solution-space types shared by all modules.

The instance domain is ``{x in R^d : ||x||^2 <= G, ||x||_inf <= 1}``.  A
learner outputs a rank-k projection matrix; its iterates live in the convex
hull of those projectors, i.e. symmetric matrices with spectrum in [0, 1]
and trace k.  Coordinate indices are 0-based throughout the package.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimMismatch,
    InfNormViolation,
    InvalidMatrix,
    NormViolation,
    NotInHull,
    NotOrthonormal,
)
from .spectral import EigenSystem, sym_eig, sym_matrix

# Structural invariants (idempotence, trace) are checked at 1e-8; hull
# membership at 1e-9.  Both sit well above double-precision eig residuals.
STRUCT_TOL = 1e-8
MEMBER_TOL = 1e-9


@dataclass(frozen=True)
class DomainSpec:
    """Instance-domain and budget parameters.

    d: ambient dimension (>= 2); k: subspace dimension (1 <= k < d);
    r: attribute budget, the number of coordinates revealed per draw
    (1 <= r <= d); G: squared-norm bound (0 < G <= d).
    """

    d: int
    k: int
    r: int
    G: float

    def __post_init__(self):
        if self.d < 2:
            raise ValueError(f"d must be >= 2, got {self.d}")
        if not 1 <= self.k < self.d:
            raise ValueError(f"k must satisfy 1 <= k < d, got k={self.k}, d={self.d}")
        if not 1 <= self.r <= self.d:
            raise ValueError(f"r must satisfy 1 <= r <= d, got r={self.r}, d={self.d}")
        if not 0 < self.G <= self.d:
            raise ValueError(f"G must satisfy 0 < G <= d, got G={self.G}")
        if self.k > math.sqrt(self.d):
            # Sample-size heuristics are calibrated for k <= sqrt(d); larger k
            # is well-defined but outside that regime.
            warnings.warn(
                f"k={self.k} exceeds sqrt(d)={math.sqrt(self.d):.3f}; "
                "sample-size heuristics assume k <= sqrt(d)",
                stacklevel=2,
            )


@dataclass(frozen=True, eq=False)
class Instance:
    """A validated domain vector; construct via :func:`validate_instance`."""

    x: np.ndarray


def validate_instance(x, spec: DomainSpec) -> Instance:
    """Check a vector against the domain constraints.

    Raises :class:`NormViolation` (carrying the squared norm) or
    :class:`InfNormViolation`; returns an :class:`Instance` on success.
    """
    v = np.asarray(x, dtype=float)
    if v.shape != (spec.d,):
        raise DimMismatch(f"expected a length-{spec.d} vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InvalidMatrix("instance entries must be finite")
    sq = float(v @ v)
    if sq > spec.G + 1e-9:
        raise NormViolation(sq, spec.G)
    inf = float(np.max(np.abs(v))) if v.size else 0.0
    if inf > 1 + 1e-12:
        raise InfNormViolation(f"coordinate magnitude {inf:.12g} exceeds 1")
    return Instance(x=v)


@dataclass(frozen=True, eq=False)
class ProjectionMatrix:
    """Rank-k orthogonal projector.

    ``basis`` (d x k, orthonormal columns spanning the range) is carried when
    known so overlap statistics can be computed without re-factorizing.
    """

    matrix: np.ndarray
    rank: int
    basis: np.ndarray | None = None

    def __post_init__(self):
        m = self.matrix
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidMatrix(f"projector must be square, got shape {m.shape}")
        if np.max(np.abs(m - m.T)) > STRUCT_TOL:
            raise InvalidMatrix("projector is not symmetric")
        if np.max(np.abs(m @ m - m)) > STRUCT_TOL:
            raise InvalidMatrix("projector is not idempotent to tolerance")
        if abs(float(np.trace(m)) - self.rank) > STRUCT_TOL:
            raise InvalidMatrix(
                f"trace {np.trace(m):.12g} differs from rank {self.rank} by more than {STRUCT_TOL}"
            )
        if self.basis is not None:
            b = self.basis
            if b.shape != (m.shape[0], self.rank):
                raise DimMismatch(f"basis shape {b.shape} incompatible with rank {self.rank}")
            if np.max(np.abs(b.T @ b - np.eye(self.rank))) > STRUCT_TOL:
                raise NotOrthonormal("projector basis columns are not orthonormal")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def orthonormal_basis(self) -> np.ndarray:
        """Return a d x k orthonormal basis of the range (recovered if absent)."""
        if self.basis is not None:
            return self.basis
        eig = sym_eig(self.matrix)
        return eig.vectors[:, : self.rank]


@dataclass(frozen=True, eq=False)
class HullElement:
    """Symmetric matrix with spectrum in [0, 1] and trace k (a projector mixture)."""

    matrix: np.ndarray
    k: int

    def __post_init__(self):
        report = check_hull_membership(self.matrix, self.k)
        if not report.passed:
            raise NotInHull(str(report))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class HullMembershipReport:
    """Diagnostic from :func:`check_hull_membership`."""

    trace_error: float
    min_eigenvalue: float
    max_eigenvalue: float
    tol: float
    trace_tol: float
    passed: bool

    def __str__(self):
        return (
            f"hull membership {'pass' if self.passed else 'FAIL'}: "
            f"trace error {self.trace_error:.3e} (tol {self.trace_tol:.1e}), "
            f"eigenvalues in [{self.min_eigenvalue:.6g}, {self.max_eigenvalue:.6g}] "
            f"(overshoot tol {self.tol:.1e})"
        )


def check_hull_membership(
    w, k: int, tol: float = MEMBER_TOL, trace_tol: float = STRUCT_TOL
) -> HullMembershipReport:
    """Report how far a symmetric matrix is from {spectrum in [0,1], trace k}.

    Purely diagnostic: never raises for a failing matrix.
    """
    a = sym_matrix(w)
    vals = np.linalg.eigvalsh(a)
    trace_error = abs(float(np.sum(vals)) - k)
    lo = float(vals.min())
    hi = float(vals.max())
    passed = (trace_error <= trace_tol) and (lo >= -tol) and (hi <= 1 + tol)
    return HullMembershipReport(
        trace_error=trace_error,
        min_eigenvalue=lo,
        max_eigenvalue=hi,
        tol=tol,
        trace_tol=trace_tol,
        passed=passed,
    )


def projector_from_basis(v) -> ProjectionMatrix:
    """Build the projector V V^T from a d x k column-orthonormal matrix."""
    b = np.asarray(v, dtype=float)
    if b.ndim == 1:
        b = b[:, None]
    d, k = b.shape
    if k > d:
        raise DimMismatch(f"basis has more columns ({k}) than rows ({d})")
    if np.max(np.abs(b.T @ b - np.eye(k))) > STRUCT_TOL:
        raise NotOrthonormal("basis columns are not orthonormal to 1e-8")
    m = b @ b.T
    return ProjectionMatrix(matrix=0.5 * (m + m.T), rank=k, basis=b)


def top_k_projector(source, k: int) -> ProjectionMatrix:
    """Projector onto the span of the k leading eigenvectors.

    ``source`` is a symmetric matrix or an :class:`EigenSystem`; eigenvalue
    ties at the cut are resolved by the deterministic order of ``sym_eig``.
    """
    eig = source if isinstance(source, EigenSystem) else sym_eig(source)
    if not 1 <= k <= eig.dim:
        raise DimMismatch(f"k={k} out of range for dimension {eig.dim}")
    return projector_from_basis(eig.vectors[:, :k])
