"""Experiment runner and CLI.

A sweep runs ``trials`` seeded repetitions of a learner at each sample budget
in ``m_values`` and writes one CSV row per trial.  The excess-loss column is
a pure function of (config, base seed): each trial's seed is derived as
``mix64(base_seed, m, trial_index)``, the trial owns its generator stream,
and trials never share mutable state, so serial and parallel executions are
bit-identical and adding sweep points never perturbs existing trials.

CLI subcommands:

* ``run``   -- run a sweep from a JSON config and/or inline flags, emit CSV.
* ``fixtures`` -- materialize a named fixture distribution to JSON.
* ``demo-lower-bounds`` -- the two lower-bound demonstrations: the
  single-attribute marginal-identity check and the dyadic no-signal
  failure-rate run.

Exit code 0 on success, 2 on configuration/usage errors.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .domain import DomainSpec
from .errors import ConfigError, SubspaceBanditError
from .evaluation import excess_loss
from .learners import (
    LearnerConfig,
    bandit_pca,
    full_info_pca,
    mbeg,
    mbeg_min_budget,
    mbgd,
)
from .oracles import (
    DistributionSpec,
    coin_fixture,
    default_coin_basis,
    dyadic_fixture,
    exact_moments,
    impossibility_fixture,
    load_distribution,
    make_finite_support,
    observe,
    sample_instances,
    save_distribution,
    to_jsonable,
    validate_distribution,
)
from .seeding import make_rng, mix64

ALGORITHMS = ("bandit-pca", "mbgd", "mbeg", "pca")

CSV_HEADER = "algo,d,k,r,G,m,trial,seed,excess_loss,loss,wall_ms"


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    """One sweep: domain, distribution, algorithm, budgets, trials, seeding."""

    domain: DomainSpec
    distribution: DistributionSpec
    algo: str
    m_values: tuple[int, ...]
    trials: int
    base_seed: int
    eta_override: float | None = None
    alpha_override: float | None = None
    output_path: str | None = None

    def __post_init__(self):
        if self.algo not in ALGORITHMS:
            raise ConfigError(f"unknown algo {self.algo!r}; choose from {ALGORITHMS}")
        if not self.m_values:
            raise ConfigError("m_values must be non-empty")
        if any(m < 1 for m in self.m_values):
            raise ConfigError(f"sample budgets must be >= 1, got {self.m_values}")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        try:
            validate_distribution(self.distribution, self.domain)
        except SubspaceBanditError as exc:
            raise ConfigError(f"distribution incompatible with domain: {exc}") from exc
        if self.algo in ("bandit-pca", "mbgd") and self.domain.r % 2 != 0:
            raise ConfigError(f"{self.algo} needs an even attribute budget, got r={self.domain.r}")
        if self.algo == "mbeg":
            if self.domain.r != 2:
                raise ConfigError(f"mbeg supports r = 2 only, got r={self.domain.r}")
            if self.alpha_override is None:
                floor = mbeg_min_budget(self.domain)
                bad = [m for m in self.m_values if m < floor]
                if bad:
                    raise ConfigError(
                        f"mbeg default mixing weight exceeds 1/2 for m in {bad}; "
                        f"need m >= {floor} or an alpha override"
                    )


@dataclass
class TrialRecord:
    algo: str
    d: int
    k: int
    r: int
    G: float
    m: int
    trial: int
    seed: int
    excess_loss: float
    loss: float
    wall_ms: float
    error: str | None = None


def run_trial(cfg: ExperimentConfig, m: int, trial_index: int) -> TrialRecord:
    """Run one seeded trial; learner errors become a failed record, not a crash."""
    seed = mix64(cfg.base_seed, m, trial_index)
    spec = cfg.domain
    lcfg = LearnerConfig(
        spec=spec,
        m=m,
        eta_override=cfg.eta_override,
        alpha_override=cfg.alpha_override,
        seed=seed,
    )
    start = time.perf_counter()
    excess = math.nan
    value = math.nan
    error = None
    try:
        if cfg.algo == "pca":
            rng = make_rng(seed)
            samples = sample_instances(cfg.distribution, m, rng)
            pi = full_info_pca(samples, spec.k)
        elif cfg.algo == "bandit-pca":
            pi = bandit_pca(cfg.distribution, lcfg)
        elif cfg.algo == "mbgd":
            pi = mbgd(cfg.distribution, lcfg)
        else:
            pi = mbeg(cfg.distribution, lcfg)
        report = excess_loss(pi, exact_moments(cfg.distribution), spec.k)
        excess = report.excess
        value = report.loss
    except SubspaceBanditError as exc:
        error = f"{type(exc).__name__}: {exc}"
    wall_ms = (time.perf_counter() - start) * 1e3
    return TrialRecord(
        algo=cfg.algo,
        d=spec.d,
        k=spec.k,
        r=spec.r,
        G=spec.G,
        m=m,
        trial=trial_index,
        seed=seed,
        excess_loss=excess,
        loss=value,
        wall_ms=wall_ms,
        error=error,
    )


def _sweep_task(args) -> TrialRecord:
    cfg, m, trial_index = args
    return run_trial(cfg, m, trial_index)


def run_sweep(cfg: ExperimentConfig, workers: int | None = None) -> list[TrialRecord]:
    """All (m, trial) cells, optionally across processes; output sorted by (m, trial).

    Parallelism is across trials only; each trial owns its generator stream,
    so the records are identical whatever the execution order.
    """
    tasks = [(cfg, m, t) for m in cfg.m_values for t in range(cfg.trials)]
    if workers is not None and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_sweep_task, tasks, chunksize=8))
    else:
        records = [_sweep_task(task) for task in tasks]
    records.sort(key=lambda rec: (rec.m, rec.trial))
    return records


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def emit_csv(records, path) -> None:
    """Write records with the fixed header; reals carry 17 significant digits."""
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(CSV_HEADER + "\n")
            for rec in records:
                fh.write(
                    f"{rec.algo},{rec.d},{rec.k},{rec.r},{_fmt(rec.G)},{rec.m},{rec.trial},"
                    f"{rec.seed},{_fmt(rec.excess_loss)},{_fmt(rec.loss)},{_fmt(rec.wall_ms)}\n"
                )
    except OSError as exc:
        raise ConfigError(f"cannot write CSV to {path!r}: {exc}") from exc


def parse_csv(path) -> list[TrialRecord]:
    """Read back a CSV produced by :func:`emit_csv`."""
    records = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise ConfigError(f"unexpected CSV header in {path!r}: {header}")
        for line in fh:
            if not line.strip():
                continue
            algo, d, k, r, g, m, trial, seed, excess, value, wall = line.strip().split(",")
            records.append(
                TrialRecord(
                    algo=algo,
                    d=int(d),
                    k=int(k),
                    r=int(r),
                    G=float(g),
                    m=int(m),
                    trial=int(trial),
                    seed=int(seed),
                    excess_loss=float(excess),
                    loss=float(value),
                    wall_ms=float(wall),
                )
            )
    return records


# ---------------------------------------------------------------------------
# Distribution references and config files
# ---------------------------------------------------------------------------

def _parse_kv(argstr: str) -> dict:
    out = {}
    if argstr:
        for part in argstr.split(","):
            key, _, value = part.partition("=")
            if not _:
                raise ConfigError(f"malformed distribution argument {part!r}")
            out[key.strip()] = value.strip()
    return out


def parse_dist_ref(ref: str, domain: DomainSpec) -> DistributionSpec:
    """Resolve a distribution reference.

    Accepts a path to a fixture JSON file, or an inline form:
    ``pointmass[:coord=I]``, ``impossibility:s=I``,
    ``dyadic:s=I,eps=X[,c=X]``, ``coin:alpha=X[,b=+-...]``.
    Coordinates are 0-based.
    """
    if ref.endswith(".json") or os.path.exists(ref):
        return load_distribution(ref)
    name, _, argstr = ref.partition(":")
    kv = _parse_kv(argstr)
    try:
        if name == "pointmass":
            coord = int(kv.pop("coord", 0))
            x = np.zeros(domain.d)
            x[coord] = min(1.0, math.sqrt(domain.G))
            dist = make_finite_support([(x, 1.0)], domain, tag=f"pointmass(coord={coord})")
        elif name == "impossibility":
            dist = impossibility_fixture(domain.d, domain.G, s=int(kv.pop("s")))
        elif name == "dyadic":
            dist = dyadic_fixture(
                domain.d, s=int(kv.pop("s")), eps=float(kv.pop("eps")), c=float(kv.pop("c", 4.0))
            )
        elif name == "coin":
            alpha = float(kv.pop("alpha"))
            b_str = kv.pop("b", "+" * domain.k)
            signs = [1.0 if ch == "+" else -1.0 for ch in b_str]
            basis = default_coin_basis(domain.d, domain.k, domain.G)
            dist = coin_fixture(domain.d, domain.k, domain.G, alpha, signs, basis)
        else:
            raise ConfigError(f"unknown distribution reference {ref!r}")
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad distribution reference {ref!r}: {exc}") from exc
    if kv:
        raise ConfigError(f"unused distribution arguments {sorted(kv)} in {ref!r}")
    return dist


def config_from_dict(doc: dict) -> ExperimentConfig:
    """Build a config from a JSON-style dict mirroring the field names."""
    try:
        dom = doc["domain"]
        domain = DomainSpec(d=int(dom["d"]), k=int(dom["k"]), r=int(dom["r"]), G=float(dom["G"]))
        dist_doc = doc["distribution"]
        if isinstance(dist_doc, str):
            dist = parse_dist_ref(dist_doc, domain)
        else:
            from .oracles import from_jsonable

            dist = from_jsonable(dist_doc)
        overrides = doc.get("overrides", {})
        return ExperimentConfig(
            domain=domain,
            distribution=dist,
            algo=str(doc["algo"]),
            m_values=tuple(int(m) for m in doc["m_values"]),
            trials=int(doc["trials"]),
            base_seed=int(doc["base_seed"]),
            eta_override=None if overrides.get("eta") is None else float(overrides["eta"]),
            alpha_override=None if overrides.get("alpha") is None else float(overrides["alpha"]),
            output_path=doc.get("output_path"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad config document: {exc}") from exc


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return config_from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# Lower-bound demonstrations
# ---------------------------------------------------------------------------

def marginal_identity_check(d: int = 4, G: float = 1.0, mc_draws: int = 20000, seed: int = 0):
    """Single-attribute no-information check.

    Exact part: enumerate the two-point support of every planted coordinate s
    and verify that each single-coordinate marginal is uniform on
    {-sqrt(G/d), +sqrt(G/d)}, identical across s.  Monte-Carlo part: observe
    one coordinate at a time and compare frequencies to 1/2.
    """
    level = math.sqrt(G / d)
    exact_ok = True
    for s in range(d):
        dist = impossibility_fixture(d, G, s)
        for i in range(d):
            marginal = {}
            for point, p in zip(dist.points, dist.probs):
                key = round(point[i], 15)
                marginal[key] = marginal.get(key, 0.0) + p
            expected = {round(level, 15): 0.5, round(-level, 15): 0.5}
            if marginal != expected:
                exact_ok = False
    worst_dev = 0.0
    rng = make_rng(seed)
    for s in range(d):
        dist = impossibility_fixture(d, G, s)
        for i in range(d):
            hits = sum(
                1 for _ in range(mc_draws) if observe(dist, (i,), rng).values[0] > 0
            )
            worst_dev = max(worst_dev, abs(hits / mc_draws - 0.5))
    return {"exact_identical": exact_ok, "mc_worst_deviation": worst_dev, "mc_draws": mc_draws}


def dyadic_no_signal_demo(
    d: int = 20,
    eps: float = 0.05,
    c: float = 4.0,
    m: int = 200,
    trials: int = 500,
    seed: int = 7,
    workers: int | None = None,
):
    """Failure rate of mbgd on the planted-coordinate distribution at a starved budget.

    With r = 2 the chance a single step observes an informative pair is
    (c*eps)/d^2, so at m << d^2/(r^2 eps) most runs see no signal at all and
    the sampled projector is essentially uniform over coordinates.
    """
    domain = DomainSpec(d=d, k=1, r=2, G=1.0)
    cfg = ExperimentConfig(
        domain=domain,
        distribution=dyadic_fixture(d, s=0, eps=eps, c=c),
        algo="mbgd",
        m_values=(m,),
        trials=trials,
        base_seed=seed,
    )
    records = run_sweep(cfg, workers=workers)
    failures = sum(1 for rec in records if rec.excess_loss > eps)
    p_no_signal = (1 - c * eps / d**2) ** m
    return {
        "trials": trials,
        "m": m,
        "failure_fraction": failures / trials,
        "predicted_no_signal_probability": p_no_signal,
        "threshold": eps,
    }


def run_lower_bound_demos(seed: int = 7, trials: int = 500, workers: int | None = None) -> int:
    summary_a = marginal_identity_check(seed=seed)
    summary_b = dyadic_no_signal_demo(trials=trials, seed=seed, workers=workers)
    print("lower-bound demonstrations")
    print("-" * 62)
    print(
        f"single-attribute marginals identical (exact enumeration): "
        f"{summary_a['exact_identical']}"
    )
    print(
        f"  MC frequency deviation from 1/2 over {summary_a['mc_draws']} draws: "
        f"{summary_a['mc_worst_deviation']:.4f}"
    )
    print(
        f"dyadic no-signal run (d=20, r=2, eps={summary_b['threshold']:g}, "
        f"m={summary_b['m']}, {summary_b['trials']} trials):"
    )
    print(f"  fraction of trials with excess > eps: {summary_b['failure_fraction']:.3f}")
    print(
        f"  predicted probability of an all-zero signal: "
        f"{summary_b['predicted_no_signal_probability']:.3f}"
    )
    ok = summary_a["exact_identical"] and summary_b["failure_fraction"] >= 0.75
    print("-" * 62)
    print("verdict:", "as predicted" if ok else "UNEXPECTED")
    return 0


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="subspace-bandits",
        description="Budgeted subspace-learning experiments (coordinates are 0-based).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a sweep and emit CSV")
    run_p.add_argument("--config", help="JSON config file; flags below override its fields")
    run_p.add_argument("--algo", choices=ALGORITHMS)
    run_p.add_argument("--d", type=int)
    run_p.add_argument("--k", type=int)
    run_p.add_argument("--r", type=int)
    run_p.add_argument("--G", type=float)
    run_p.add_argument("--m", type=int, nargs="+", help="one or more sample budgets")
    run_p.add_argument("--trials", type=int)
    run_p.add_argument("--seed", type=int)
    run_p.add_argument("--dist", help="fixture reference or JSON path")
    run_p.add_argument("--out", help="CSV output path (defaults to config output_path)")
    run_p.add_argument("--eta", type=float, help="step-size override")
    run_p.add_argument("--alpha", type=float, help="mixing-weight override (mbeg)")
    run_p.add_argument("--workers", type=int, default=1, help="parallel trial processes")

    fix_p = sub.add_parser("fixtures", help="materialize a named fixture to JSON")
    fix_p.add_argument("name", choices=("impossibility", "dyadic", "coin"))
    fix_p.add_argument("--d", type=int, required=True)
    fix_p.add_argument("--G", type=float, default=1.0)
    fix_p.add_argument("--s", type=int, default=0, help="planted coordinate (0-based)")
    fix_p.add_argument("--eps", type=float, default=0.1)
    fix_p.add_argument("--c", type=float, default=4.0)
    fix_p.add_argument("--k", type=int, default=1)
    fix_p.add_argument("--alpha", type=float, default=0.5)
    fix_p.add_argument("--b", default=None, help="coin signs as a +- string, default all +")
    fix_p.add_argument("--out", default=None, help="output path; '-' prints to stdout")

    demo_p = sub.add_parser("demo-lower-bounds", help="run the lower-bound demonstrations")
    demo_p.add_argument("--seed", type=int, default=7)
    demo_p.add_argument("--trials", type=int, default=500)
    demo_p.add_argument("--workers", type=int, default=1)
    return parser


def _cmd_run(args) -> int:
    doc = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            doc = json.load(fh)
    dom = doc.get("domain", {})
    for key in ("d", "k", "r", "G"):
        value = getattr(args, key)
        if value is not None:
            dom[key] = value
    doc["domain"] = dom
    if args.dist is not None:
        doc["distribution"] = args.dist
    if args.algo is not None:
        doc["algo"] = args.algo
    if args.m is not None:
        doc["m_values"] = args.m
    if args.trials is not None:
        doc["trials"] = args.trials
    if args.seed is not None:
        doc["base_seed"] = args.seed
    overrides = doc.get("overrides", {})
    if args.eta is not None:
        overrides["eta"] = args.eta
    if args.alpha is not None:
        overrides["alpha"] = args.alpha
    doc["overrides"] = overrides
    if args.out is not None:
        doc["output_path"] = args.out

    cfg = config_from_dict(doc)
    records = run_sweep(cfg, workers=args.workers)
    failed = [rec for rec in records if rec.error is not None]
    if cfg.output_path:
        emit_csv(records, cfg.output_path)
        print(f"wrote {len(records)} records to {cfg.output_path}")
    else:
        sys.stdout.write(CSV_HEADER + "\n")
        for rec in records:
            sys.stdout.write(
                f"{rec.algo},{rec.d},{rec.k},{rec.r},{_fmt(rec.G)},{rec.m},{rec.trial},"
                f"{rec.seed},{_fmt(rec.excess_loss)},{_fmt(rec.loss)},{_fmt(rec.wall_ms)}\n"
            )
    for rec in failed:
        print(f"trial (m={rec.m}, trial={rec.trial}) failed: {rec.error}", file=sys.stderr)
    return 0


def _cmd_fixtures(args) -> int:
    if args.name == "impossibility":
        dist = impossibility_fixture(args.d, args.G, args.s)
    elif args.name == "dyadic":
        dist = dyadic_fixture(args.d, args.s, args.eps, args.c)
    else:
        b_str = args.b if args.b is not None else "+" * args.k
        signs = [1.0 if ch == "+" else -1.0 for ch in b_str]
        basis = default_coin_basis(args.d, args.k, args.G)
        dist = coin_fixture(args.d, args.k, args.G, args.alpha, signs, basis)
    out = args.out if args.out is not None else f"{args.name}.json"
    if out == "-":
        json.dump(to_jsonable(dist), sys.stdout, indent=2)
        sys.stdout.write("\n")
    else:
        save_distribution(dist, out)
        print(f"wrote fixture {dist.tag} to {out}")
    return 0


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "fixtures":
            return _cmd_fixtures(args)
        return run_lower_bound_demos(seed=args.seed, trials=args.trials, workers=args.workers)
    except SubspaceBanditError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(cli_main())
