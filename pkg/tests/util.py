"""Shared test helpers: independent brute-force oracles and random generators.

The oracles here deliberately take different algorithmic routes from the
library code they check (exhaustive active-set enumeration instead of
thresholding; scalar root bisection instead of cap counting).
"""

import itertools

import numpy as np

from subspace_bandits.domain import HullElement, projector_from_basis


def random_orthonormal(rng, d, k):
    """d x k matrix with orthonormal columns (QR of a Gaussian)."""
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    q = q * np.sign(np.where(np.diag(r) == 0, 1.0, np.diag(r)))
    return q[:, :k]


def random_projector(rng, d, k):
    return projector_from_basis(random_orthonormal(rng, d, k))


def random_hull_spectrum(rng, d, k):
    """Spectrum in [0, 1] summing to k, sampled away from the extreme points."""
    from subspace_bandits.learners import capped_simplex_project

    return capped_simplex_project(rng.random(d) * 1.5, k)


def random_hull_element(rng, d, k):
    v = random_orthonormal(rng, d, d)
    lam = random_hull_spectrum(rng, d, k)
    m = (v * lam) @ v.T
    return HullElement(matrix=0.5 * (m + m.T), k=k)


def brute_force_capped_projection(lam, k):
    """Euclidean projection onto {0 <= v <= 1, sum v = k} by exhaustive active sets.

    Every coordinate is assigned capped (v=1), zeroed (v=0), or free
    (v = lam - theta); consistent assignments are enumerated and the closest
    candidate wins.  Exponential in d; fine for d <= 6.
    """
    lam = np.asarray(lam, dtype=float)
    d = lam.size
    best = None
    best_obj = np.inf
    for pattern in itertools.product((0, 1, 2), repeat=d):
        capped = [i for i in range(d) if pattern[i] == 0]
        zeroed = [i for i in range(d) if pattern[i] == 1]
        free = [i for i in range(d) if pattern[i] == 2]
        v = np.zeros(d)
        v[capped] = 1.0
        if free:
            theta = (lam[free].sum() + len(capped) - k) / len(free)
            vals = lam[free] - theta
            if vals.min() < -1e-9 or vals.max() > 1 + 1e-9:
                continue
            # consistency of the inactive constraints
            if capped and (lam[capped] - theta).min() < 1 - 1e-9:
                continue
            if zeroed and (lam[zeroed] - theta).max() > 1e-9:
                continue
            v[free] = np.clip(vals, 0.0, 1.0)
        else:
            if len(capped) != k:
                continue
            lo = lam[zeroed].max() if zeroed else -np.inf  # need theta >= lo and theta <= hi
            hi = lam[capped].min() - 1 if capped else np.inf
            if lo > hi + 1e-9:
                continue
        obj = float(np.sum((v - lam) ** 2))
        if obj < best_obj - 1e-15:
            best_obj = obj
            best = v
    assert best is not None, "no consistent active set found"
    return best


def brute_force_scaled_simplex(lam, k):
    """Euclidean projection onto {v >= 0, sum v = k} by active-set enumeration."""
    lam = np.asarray(lam, dtype=float)
    d = lam.size
    best = None
    best_obj = np.inf
    for pattern in itertools.product((0, 1), repeat=d):
        free = [i for i in range(d) if pattern[i] == 1]
        zeroed = [i for i in range(d) if pattern[i] == 0]
        if not free:
            continue
        theta = (lam[free].sum() - k) / len(free)
        vals = lam[free] - theta
        if vals.min() < -1e-9:
            continue
        if zeroed and (lam[zeroed] - theta).max() > 1e-9:
            continue
        v = np.zeros(d)
        v[free] = np.maximum(vals, 0.0)
        obj = float(np.sum((v - lam) ** 2))
        if obj < best_obj - 1e-15:
            best_obj = obj
            best = v
    assert best is not None
    return best


def entropic_objective(v, mu):
    """sum v log(v/mu) - v + mu with the v log v -> 0 limit at zero."""
    v = np.asarray(v, dtype=float)
    mu = np.asarray(mu, dtype=float)
    terms = np.where(v > 0, v * (np.log(np.maximum(v, 1e-300)) - np.log(mu)), 0.0)
    return float(np.sum(terms - v + mu))


def bisection_entropic(mu, k, iters=300):
    """Relative-entropy projection onto the capped simplex via scalar bisection.

    The minimizer has the form v = min(t * mu, 1); the trace sum(min(t mu, 1))
    is nondecreasing in t, so bisect t until it matches k.
    """
    mu = np.asarray(mu, dtype=float)
    lo = 0.0
    hi = 1.0
    while np.minimum(hi * mu, 1.0).sum() < k:
        hi *= 2.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if np.minimum(mid * mu, 1.0).sum() < k:
            lo = mid
        else:
            hi = mid
    return np.minimum(0.5 * (lo + hi) * mu, 1.0)
