"""Budgeted subspace learners and the spectrum projections they need.

Four learners, all consuming a finite-support distribution through the
partial-information oracle (except the full-information baseline):

* ``bandit_pca`` -- averages split-half cross estimates and returns the top-k
  projector of the symmetrized average.
* ``mbgd`` (matrix bandit gradient descent) -- lazy additive updates with the
  symmetric split-half estimate; one spectrum projection onto the capped
  simplex at the end, then randomized rounding to a projector.
* ``mbeg`` (matrix bandit exponentiated gradient) -- non-uniform pair
  sampling biased toward strong diagonal directions, multiplicative update
  exp(log W + eta C_hat), spectrum projection onto the capped simplex in
  relative entropy, rounding applied to the iterate average.
* ``full_info_pca`` -- top-k projector of the empirical correlation matrix.

Default step sizes: mbgd uses eta = sqrt(k / (d^2 G^2 m)); mbeg uses
eta = sqrt(log(d/k) / (d m G^2)) with mixing weight alpha = eta d^2 / 2,
which requires m >= d^3 log(d/k) / G^2 so that alpha <= 1/2.

Each learner owns a counter-based generator stream derived from its config
seed; index draws, oracle draws, and the final component sampling all consume
from that one stream, so runs are reproducible end to end and independent
runs can execute concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .decomposition import decompose, sample_component
from .domain import DomainSpec, HullElement, ProjectionMatrix, top_k_projector
from .errors import (
    AlphaTooLarge,
    BudgetNotTwo,
    DimMismatch,
    EmptySample,
    InfeasibleK,
    NotInHull,
    OddBudget,
)
from .estimators import (
    draw_uniform_indices,
    estimate_asym,
    estimate_sym,
    mbeg_estimate,
    mbeg_pair_probs,
    draw_pair,
    split_halves,
)
from .oracles import DistributionSpec, observe
from .seeding import make_rng
from .spectral import LOG_FLOOR, spectral_norm, sym_eig


# ---------------------------------------------------------------------------
# Spectrum projections
# ---------------------------------------------------------------------------

def simplex_project_scaled(lam, k: float) -> np.ndarray:
    """Euclidean projection onto the scaled simplex {v >= 0, sum(v) = k}.

    Threshold form: find the largest prefix size rho of the sorted values for
    which the shifted value stays positive, set theta to the prefix mean
    excess, and return max(lam - theta, 0).
    """
    v = np.asarray(lam, dtype=float)
    sorted_desc = np.sort(v)[::-1]
    cumsum = np.cumsum(sorted_desc)
    js = np.arange(1, v.size + 1)
    positive = sorted_desc - (cumsum - k) / js > 0
    rho = int(js[positive][-1])
    theta = (cumsum[rho - 1] - k) / rho
    return np.maximum(v - theta, 0.0)


def capped_simplex_project(lam, k: float) -> np.ndarray:
    """Euclidean projection onto the capped simplex {0 <= v <= 1, sum(v) = k}.

    The plain scaled-simplex projection can emit entries above 1 when k >= 2
    (e.g. (10, 0, 0) with k = 2 maps to (2, 0, 0)), which is outside the
    spectrum set of projector mixtures; the cap restores membership and the
    two projections coincide whenever the cap is inactive.  Solved by
    bisection on the shift theta in v = clip(lam - theta, 0, 1).
    """
    v = np.asarray(lam, dtype=float)
    if k > v.size:
        raise InfeasibleK(f"target trace {k} exceeds dimension {v.size}")
    lo = float(v.min()) - 1.0  # all capped: sum = d >= k
    hi = float(v.max())        # all zeroed: sum = 0 <= k
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if np.clip(v - mid, 0.0, 1.0).sum() >= k:
            lo = mid
        else:
            hi = mid
    return np.clip(v - 0.5 * (lo + hi), 0.0, 1.0)


def entropic_project(mu, k: int) -> np.ndarray:
    """Relative-entropy projection of a positive spectrum onto the capped simplex.

    Minimizes sum_j (v_j log(v_j / mu_j) - v_j + mu_j) subject to
    0 <= v <= 1, sum(v) = k.  The minimizer is v = min(t * mu, 1) for the
    scale t matching the trace; equivalently, cap the largest c entries at 1
    for the smallest c that leaves every rescaled remaining entry at most 1.
    Output entries are strictly positive and order-preserving.
    """
    v = np.asarray(mu, dtype=float)
    d = v.size
    if not 1 <= k <= d:
        raise InfeasibleK(f"target trace {k} must lie in [1, {d}]")
    if float(v.min()) <= 0:
        raise ValueError(f"spectrum must be strictly positive, got min {v.min():.3g}")
    order = np.argsort(-v, kind="stable")
    sorted_desc = v[order]
    tail = np.cumsum(sorted_desc[::-1])[::-1]  # tail[c] = sum over sorted_desc[c:]
    # c = k - 1 always satisfies the cap condition, so the loop cannot fall through.
    for c in range(k):
        t = (k - c) / tail[c]
        if t * sorted_desc[c] <= 1 + 1e-15:
            out_sorted = np.concatenate([np.ones(c), t * sorted_desc[c:]])
            out = np.empty(d)
            out[order] = out_sorted
            return out
    raise AssertionError("cap search failed on a positive spectrum")


# ---------------------------------------------------------------------------
# Learner configuration and diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LearnerConfig:
    """Domain, sample budget, optional step-size overrides, and the trial seed."""

    spec: DomainSpec
    m: int
    eta_override: float | None = None
    alpha_override: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.m < 0:
            raise ValueError(f"sample budget must be nonnegative, got {self.m}")
        if self.eta_override is not None and not self.eta_override > 0:
            raise ValueError(f"eta override must be positive, got {self.eta_override}")
        if self.alpha_override is not None and not 0 < self.alpha_override <= 0.5:
            raise ValueError(f"alpha override must lie in (0, 1/2], got {self.alpha_override}")


def mbgd_step_size(spec: DomainSpec, m: int) -> float:
    return math.sqrt(spec.k / (spec.d**2 * spec.G**2 * m))


def mbeg_step_size(spec: DomainSpec, m: int) -> float:
    return math.sqrt(math.log(spec.d / spec.k) / (spec.d * m * spec.G**2))


def mbeg_mixing_weight(spec: DomainSpec, eta: float) -> float:
    return 0.5 * eta * spec.d**2


def mbeg_min_budget(spec: DomainSpec) -> int:
    """Smallest m for which the default mixing weight stays at or below 1/2."""
    return math.ceil(spec.d**3 * math.log(spec.d / spec.k) / spec.G**2)


@dataclass
class StepDiagnostics:
    step: int
    indices: tuple[int, ...]
    estimate_terms: tuple[tuple[int, int, float], ...]
    estimate_spectral_norm: float
    iterate_trace_error: float | None = None
    iterate_min_eig: float | None = None
    iterate_max_eig: float | None = None


@dataclass
class LearnerTrace:
    """Optional per-step diagnostics; collected only when requested."""

    steps: list[StepDiagnostics] = field(default_factory=list)
    final_matrix: np.ndarray | None = None        # hull element handed to the rounding step
    pre_projection_matrix: np.ndarray | None = None  # mbgd: W before the spectrum projection


def _check_oracle_setup(dist: DistributionSpec, cfg: LearnerConfig) -> None:
    if dist.d != cfg.spec.d:
        raise DimMismatch(f"distribution dimension {dist.d} != domain dimension {cfg.spec.d}")


# ---------------------------------------------------------------------------
# Learners
# ---------------------------------------------------------------------------

def bandit_pca(dist: DistributionSpec, cfg: LearnerConfig, return_trace: bool = False):
    """Average m split-half cross estimates, symmetrize, return the top-k projector."""
    _check_oracle_setup(dist, cfg)
    spec = cfg.spec
    if spec.r % 2 != 0:
        raise OddBudget(f"bandit-pca needs an even attribute budget, got r={spec.r}")
    if cfg.m < 1:
        raise ValueError(f"bandit-pca needs m >= 1, got {cfg.m}")
    rng = make_rng(cfg.seed)
    trace = LearnerTrace() if return_trace else None

    acc = np.zeros((spec.d, spec.d))
    for i in range(cfg.m):
        idx = draw_uniform_indices(spec.d, spec.r, rng)
        obs = observe(dist, idx, rng)
        est = estimate_asym(split_halves(obs, spec))
        for a, b, v in est.terms:
            acc[a, b] += v
        if trace is not None:
            trace.steps.append(
                StepDiagnostics(
                    step=i,
                    indices=tuple(int(t) for t in idx),
                    estimate_terms=est.terms,
                    estimate_spectral_norm=spectral_norm(est.to_dense()),
                )
            )
    acc /= cfg.m
    symmetrized = 0.5 * (acc + acc.T)
    if trace is not None:
        trace.final_matrix = symmetrized
    pi = top_k_projector(symmetrized, spec.k)
    return (pi, trace) if return_trace else pi


def mbgd(dist: DistributionSpec, cfg: LearnerConfig, return_trace: bool = False):
    """Matrix bandit gradient descent with lazy updates.

    The loss is linear in the iterate, so all m additive updates commute and
    only the final matrix W = (k/d) I + eta * sum_i C_hat_i is projected:
    eigendecompose, project the spectrum onto the capped simplex, rebuild,
    decompose into projectors, and sample one.  m = 0 degenerates to
    decomposing the initializer (k/d) I.
    """
    _check_oracle_setup(dist, cfg)
    spec = cfg.spec
    if spec.r % 2 != 0:
        raise OddBudget(f"mbgd needs an even attribute budget, got r={spec.r}")
    rng = make_rng(cfg.seed)
    eta = cfg.eta_override if cfg.eta_override is not None else (
        mbgd_step_size(spec, cfg.m) if cfg.m > 0 else 0.0
    )
    trace = LearnerTrace() if return_trace else None

    acc = np.zeros((spec.d, spec.d))
    running_trace = 0.0
    for i in range(cfg.m):
        idx = draw_uniform_indices(spec.d, spec.r, rng)
        obs = observe(dist, idx, rng)
        est = estimate_sym(split_halves(obs, spec))
        for a, b, v in est.terms:
            acc[a, b] += v
            if a != b:
                acc[b, a] += v
            else:
                running_trace += v
        if trace is not None:
            trace.steps.append(
                StepDiagnostics(
                    step=i,
                    indices=tuple(int(t) for t in idx),
                    estimate_terms=est.terms,
                    estimate_spectral_norm=spectral_norm(est.to_dense()),
                    iterate_trace_error=abs(eta * running_trace),
                )
            )
    w_end = (spec.k / spec.d) * np.eye(spec.d) + eta * acc
    if trace is not None:
        trace.pre_projection_matrix = w_end.copy()

    eig = sym_eig(w_end)
    lam = capped_simplex_project(eig.values, spec.k)
    w_proj = (eig.vectors * lam) @ eig.vectors.T
    hull = HullElement(matrix=0.5 * (w_proj + w_proj.T), k=spec.k)
    if trace is not None:
        trace.final_matrix = hull.matrix
    pi = sample_component(decompose(hull), rng)
    return (pi, trace) if return_trace else pi


def mbeg(dist: DistributionSpec, cfg: LearnerConfig, return_trace: bool = False):
    """Matrix bandit exponentiated gradient with non-uniform pair sampling.

    Supports attribute budget r = 2 only.  Each step draws an ordered pair
    (s, q) from the iterate-weighted table, queries the oracle at (s, q),
    forms the importance-weighted estimate, applies the multiplicative update
    U = exp(log W + eta C_hat) and projects U's spectrum back onto the capped
    simplex in relative entropy.  The returned projector is sampled from the
    decomposition of the iterate average.
    """
    _check_oracle_setup(dist, cfg)
    spec = cfg.spec
    if spec.r != 2:
        raise BudgetNotTwo(f"mbeg supports r = 2 only, got r={spec.r}")
    if cfg.m < 1:
        raise ValueError(f"mbeg needs m >= 1, got {cfg.m}")
    eta = cfg.eta_override if cfg.eta_override is not None else mbeg_step_size(spec, cfg.m)
    alpha = cfg.alpha_override if cfg.alpha_override is not None else mbeg_mixing_weight(spec, eta)
    if alpha > 0.5:
        raise AlphaTooLarge(
            f"default alpha = {alpha:.4f} exceeds 1/2; need m >= {mbeg_min_budget(spec)} "
            f"(got m={cfg.m}) or an explicit alpha override"
        )
    rng = make_rng(cfg.seed)
    trace = LearnerTrace() if return_trace else None

    d, k = spec.d, spec.k
    w = np.full(d, k / d)      # iterate spectrum
    basis = np.eye(d)          # iterate eigenbasis
    w_bar = np.zeros((d, d))

    for i in range(cfg.m):
        w_bar += (basis * w) @ basis.T  # average runs over W_1 .. W_m, pre-update
        diag = (basis**2) @ w
        probs = mbeg_pair_probs(diag, alpha, k=k)
        s, q = draw_pair(probs, rng)
        obs = observe(dist, (s, q), rng)
        est = mbeg_estimate(s, q, obs.values[0], obs.values[1], float(probs.table[s, q]), d=d)

        log_w = np.log(np.maximum(w, LOG_FLOOR))
        m_update = (basis * log_w) @ basis.T
        m_update = 0.5 * (m_update + m_update.T)
        for a, b, v in est.terms:
            m_update[a, b] += eta * v
            if a != b:
                m_update[b, a] += eta * v
        eig = sym_eig(m_update)
        mu = np.maximum(np.exp(eig.values), LOG_FLOOR)
        w = entropic_project(mu, k)
        basis = eig.vectors

        trace_err = abs(float(w.sum()) - k)
        if trace_err > 1e-8 or w.min() < -1e-8 or w.max() > 1 + 1e-8:
            raise NotInHull(
                f"iterate left the hull at step {i}: trace error {trace_err:.3g}, "
                f"spectrum [{w.min():.6g}, {w.max():.6g}]"
            )
        if trace is not None:
            x_s, x_q = float(obs.values[0]), float(obs.values[1])
            p = float(probs.table[s, q])
            norm = abs(x_s * x_q) / p if s == q else abs(x_s * x_q) / (2 * p)
            trace.steps.append(
                StepDiagnostics(
                    step=i,
                    indices=(s, q),
                    estimate_terms=est.terms,
                    estimate_spectral_norm=norm,
                    iterate_trace_error=trace_err,
                    iterate_min_eig=float(w.min()),
                    iterate_max_eig=float(w.max()),
                )
            )

    w_bar /= cfg.m
    hull = HullElement(matrix=0.5 * (w_bar + w_bar.T), k=k)
    if trace is not None:
        trace.final_matrix = hull.matrix
    pi = sample_component(decompose(hull), rng)
    return (pi, trace) if return_trace else pi


def full_info_pca(samples, k: int) -> ProjectionMatrix:
    """Top-k projector of the empirical correlation matrix (1/m) sum x x^T.

    ``samples`` is an (m, d) array or a list of instances/vectors.
    """
    if hasattr(samples, "__len__") and len(samples) == 0:
        raise EmptySample("batch PCA needs at least one sample")
    rows = [getattr(s, "x", s) for s in samples]
    x = np.asarray(rows, dtype=float)
    if x.ndim != 2:
        raise DimMismatch(f"samples must form an (m, d) array, got shape {x.shape}")
    c = x.T @ x / x.shape[0]
    return top_k_projector(0.5 * (c + c.T), k)
