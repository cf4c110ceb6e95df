"""Dense symmetric-matrix kernels.

Everything downstream (learners, projections, loss evaluation) goes through
these few primitives: symmetric ingest, eigendecomposition with a
deterministic ordering, spectral application of exp/log, Frobenius inner
product, and the spectral norm.  Matrices are plain float64 ``numpy``
arrays; ``sym_matrix`` is the single ingest point that symmetrizes once.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimMismatch, InvalidMatrix, SingularLog

# Eigenvalues closer than this are treated as tied for ordering purposes.
TIE_TOL = 1e-12
# Spectrum floor applied before log: strictly positive iterates can underflow,
# and the clamp is invisible after any subsequent spectrum projection.
LOG_FLOOR = 1e-300


def sym_matrix(entries) -> np.ndarray:
    """Ingest a square array as symmetric storage: returns (A + A^T)/2.

    Raises :class:`InvalidMatrix` for non-square or non-finite input.
    """
    a = np.array(entries, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidMatrix(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidMatrix("matrix entries must be finite")
    return 0.5 * (a + a.T)


@dataclass(frozen=True, eq=False)
class EigenSystem:
    """Eigendecomposition with ``values`` non-increasing.

    ``vectors[:, j]`` pairs with ``values[j]``.  Within a group of eigenvalues
    tied to within ``TIE_TOL`` the pairing is interchangeable; the group is
    ordered deterministically (see :func:`sym_eig`).
    """

    values: np.ndarray
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.values.size

    def reconstruct(self) -> np.ndarray:
        m = (self.vectors * self.values) @ self.vectors.T
        return 0.5 * (m + m.T)


def _canonicalize_signs(vecs: np.ndarray) -> None:
    """Flip each column so its first non-negligible component is positive."""
    for j in range(vecs.shape[1]):
        col = vecs[:, j]
        nz = np.flatnonzero(np.abs(col) > TIE_TOL)
        if nz.size and col[nz[0]] < 0:
            vecs[:, j] = -col


def sym_eig(m) -> EigenSystem:
    """Eigendecomposition of a symmetric matrix with a deterministic order.

    Eigenvalues are returned non-increasing.  Every eigenvector is
    sign-canonicalized (first non-negligible component positive), and groups
    of eigenvalues tied to within ``TIE_TOL`` have their eigenvectors sorted
    in descending lexicographic order, so repeated runs and reordered inputs
    produce the same basis for degenerate spectra (e.g. the identity yields
    the standard basis e_1, ..., e_d in order).
    """
    a = sym_matrix(m)
    vals, vecs = np.linalg.eigh(a)
    vals = vals[::-1].copy()
    vecs = vecs[:, ::-1].copy()
    _canonicalize_signs(vecs)

    d = vals.size
    start = 0
    while start < d:
        stop = start + 1
        while stop < d and vals[stop - 1] - vals[stop] <= TIE_TOL:
            stop += 1
        if stop - start > 1:
            order = sorted(range(start, stop), key=lambda j: tuple(vecs[:, j]), reverse=True)
            vecs[:, start:stop] = vecs[:, order]
        start = stop
    return EigenSystem(values=vals, vectors=vecs)


_SPECTRAL_FNS = {"exp": np.exp, "log": np.log}


def sym_fn(m, fn: str, clamp_log: bool = True) -> np.ndarray:
    """Apply ``exp`` or ``log`` to a symmetric matrix through its spectrum.

    For ``log`` the eigenvalues are clamped at ``LOG_FLOOR`` unless
    ``clamp_log=False``, in which case a spectrum below the floor raises
    :class:`SingularLog`.  The result is re-symmetrized.
    """
    if fn not in _SPECTRAL_FNS:
        raise ValueError(f"fn must be one of {sorted(_SPECTRAL_FNS)}, got {fn!r}")
    eig = sym_eig(m)
    lam = eig.values
    if fn == "log":
        if clamp_log:
            lam = np.maximum(lam, LOG_FLOOR)
        elif lam.min() < LOG_FLOOR:
            raise SingularLog(f"minimum eigenvalue {lam.min():.3g} is below the log floor")
    out = (eig.vectors * _SPECTRAL_FNS[fn](lam)) @ eig.vectors.T
    return 0.5 * (out + out.T)


def frob_inner(a, b) -> float:
    """Entrywise inner product sum_ij A_ij B_ij (= tr(AB) for symmetric A, B)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DimMismatch(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.sum(a * b))


def spectral_norm(m) -> float:
    """Largest absolute eigenvalue of a symmetric matrix."""
    a = sym_matrix(m)
    vals = np.linalg.eigvalsh(a)
    return float(np.max(np.abs(vals)))
