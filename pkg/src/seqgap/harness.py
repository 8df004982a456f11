"""Experiment runner: configuration, cells, reports, checks.

Each subcommand turns a JSON config into a deterministic list of result
cells (estimate + confidence half-width each) and a list of named checks.
Randomness is split off one root seed by cell index before any work starts,
so identical config + seed reproduces every number bit-for-bit regardless of
the worker-thread count; reduction order is fixed by cell index.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np

from . import __version__
from . import rng as rngmod
from .column_shrinkage import (
    inflated_count_probability,
    kn_law_check,
    measured_minimal_inflation,
    run_shrinkage,
    verify_column_in_rectangle,
    verify_rectangle_in_ellipsoid,
)
from .constants import EPS0, C_POINTS, hard_instance_m_threshold, inflation_radius
from .errors import SeqgapError
from .gaussian_core import tail_bound_check
from .hard_instance import build_spec, estimate_truncation_delta, mu_average_error
from .posterior import (
    GaussianMixtureModel,
    certificate_value,
    lower_bound_certificate,
    posterior,
)
from .recovery import RecoveryConfig, best_k_term_error, make_algorithm, measurement_budget
from .stats import Estimate, wilson
from .protocol import run_algorithm


class ConfigError(SeqgapError, ValueError):
    """Bad experiment configuration (CLI exit code 2)."""


_EXPERIMENTS = ("certify-lb", "gap", "recover", "lemma-check", "concentration")
_MATRIX_KINDS = ("gaussian", "rademacher", "ones")

_KNOWN_KEYS = {
    "experiment",
    "m",
    "n",
    "m_grid",
    "k",
    "eps",
    "budget",
    "algorithms",
    "matrices",
    "trials_prob",
    "trials_error",
    "seed",
    "norm",
    "allow_large_n",
    "inject_bug",
    "svg",
    "threads",
    "input_dist",
    "dims",
    "output_path",
}


@dataclass
class ExperimentConfig:
    experiment: str
    m: int | None = None
    n: int | None = None
    m_grid: list[int] | None = None
    k: int = 1
    eps: float = 0.5
    budget: int | None = None
    algorithms: list[str] = field(default_factory=lambda: ["zero", "bayes-mode"])
    matrices: list[str] = field(default_factory=lambda: ["gaussian"])
    trials_prob: int | None = None
    trials_error: int | None = None
    seed: int = 0
    norm: str = "linf"
    allow_large_n: bool = False
    inject_bug: bool = False
    svg: str | None = None
    threads: int = 1
    input_dist: str = "b1-uniform"
    dims: list[int] = field(default_factory=lambda: [1, 2, 4, 8])
    output_path: str | None = None

    def __post_init__(self):
        if self.experiment not in _EXPERIMENTS:
            raise ConfigError(
                f"unknown experiment {self.experiment!r}; pick one of {_EXPERIMENTS}"
            )
        if self.m_grid is not None:
            grid = list(self.m_grid)
            if any(b <= a for a, b in zip(grid, grid[1:])):
                raise ConfigError("m_grid must be strictly increasing")
        if self.norm not in ("linf", "l2"):
            raise ConfigError("norm must be 'linf' or 'l2'")
        for name in self.algorithms:
            if name not in (
                "zero",
                "gaussian-linear",
                "l1min",
                "greedy",
                "adaptive-ksparse",
                "bayes-mode",
            ):
                raise ConfigError(f"unregistered algorithm {name!r}")
        for kind in self.matrices:
            if kind not in _MATRIX_KINDS and not kind.startswith("file:"):
                raise ConfigError(f"unknown matrix family {kind!r}")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if self.trials_prob is not None and self.trials_prob < 1:
            raise ConfigError("trials_prob must be >= 1")
        if self.trials_error is not None and self.trials_error < 1:
            raise ConfigError("trials_error must be >= 1")

    @classmethod
    def from_json_dict(cls, doc: dict, experiment: str | None = None) -> "ExperimentConfig":
        unknown = set(doc) - _KNOWN_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        doc = dict(doc)
        if experiment is not None:
            stated = doc.get("experiment")
            if stated is not None and stated != experiment:
                raise ConfigError(
                    f"config says experiment {stated!r} but subcommand is {experiment!r}"
                )
            doc["experiment"] = experiment
        if "experiment" not in doc:
            raise ConfigError("config must name an experiment")
        return cls(**doc)


@dataclass(frozen=True)
class Cell:
    """One CSV row of a report."""

    experiment: str
    m: int | None
    n: int | None
    k: int | None
    algorithm: str
    estimate: float
    ci: float
    trials: int
    seed: int
    extra: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str


@dataclass
class ExperimentReport:
    config: dict
    cells: list[Cell]
    checks: list[Check]
    seed: int
    wall_clock: float
    version: str = __version__

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _fmt9(x: float) -> str:
    return f"{x:.9g}"


def report_to_csv(report: ExperimentReport) -> str:
    lines = ["experiment,m,n,k,algorithm,estimate,ci,trials,seed"]
    for c in report.cells:
        lines.append(
            ",".join(
                [
                    c.experiment,
                    "" if c.m is None else str(c.m),
                    "" if c.n is None else str(c.n),
                    "" if c.k is None else str(c.k),
                    c.algorithm,
                    _fmt9(c.estimate),
                    _fmt9(c.ci),
                    str(c.trials),
                    str(c.seed),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def report_to_json(report: ExperimentReport) -> str:
    doc = {
        "config": report.config,
        "cells": [asdict(c) for c in report.cells],
        "checks": [asdict(c) for c in report.checks],
        "seed": report.seed,
        "wall_clock": report.wall_clock,
        "version": report.version,
        "passed": report.passed,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def emit_report(report: ExperimentReport, path: str, fmt: str = "csv") -> str:
    """Write the report to ``path``; returns the path. CSV carries the fixed
    cell columns only (deterministic across runs); JSON is the full object."""
    if fmt == "csv":
        text = report_to_csv(report)
    elif fmt == "json":
        text = report_to_json(report)
    else:
        raise ConfigError("format must be 'csv' or 'json'")
    with open(path, "w") as fh:
        fh.write(text)
    return path


def load_report_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


# ---------------------------------------------------------------------------
# Matrix families
# ---------------------------------------------------------------------------


def build_matrix(kind: str, n: int, m: int, rng: np.random.Generator) -> np.ndarray:
    if kind == "gaussian":
        return rng.standard_normal((n, m))
    if kind == "rademacher":
        return rng.integers(0, 2, size=(n, m)).astype(float) * 2.0 - 1.0
    if kind == "ones":
        return np.ones((n, m))
    if kind.startswith("file:"):
        path = kind[5:]
        mat = np.load(path) if path.endswith(".npy") else np.loadtxt(path, ndmin=2)
        if mat.shape != (n, m):
            raise ConfigError(f"matrix file {path} has shape {mat.shape}, expected {(n, m)}")
        return mat
    raise ConfigError(f"unknown matrix family {kind!r}")


def _run_cells(tasks, threads: int):
    """Run cell tasks (index, fn) and return results ordered by index."""
    results = [None] * len(tasks)
    if threads <= 1 or len(tasks) <= 1:
        for i, fn in tasks:
            results[i] = fn()
        return results
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = {pool.submit(fn): i for i, fn in tasks}
        for fut, i in futures.items():
            results[i] = fut.result()
    return results


# ---------------------------------------------------------------------------
# certify-lb
# ---------------------------------------------------------------------------


def _require_small_n(config: ExperimentConfig, n: int):
    if n not in (1, 2) and not config.allow_large_n:
        raise ConfigError(
            f"hard-instance experiments need n in {{1, 2}} (threshold m >= "
            f"{C_POINTS:.4f} * (12 n 2^n + 3 sqrt(n))^n explodes past desk scale); "
            f"pass allow_large_n to override, expect m >= {hard_instance_m_threshold(n)}"
        )


def cmd_certify_lb(config: ExperimentConfig) -> ExperimentReport:
    t0 = time.perf_counter()
    if config.m is None or config.n is None:
        raise ConfigError("certify-lb needs m and n")
    m, n = config.m, config.n
    _require_small_n(config, n)
    trials_prob = config.trials_prob or 100_000
    trials_error = config.trials_error or 1_000
    spec = build_spec(m, n)
    root = rngmod.make_rng(config.seed)
    mat_streams = rngmod.split(root, len(config.matrices))
    cells: list[Cell] = []
    checks: list[Check] = []
    threshold = hard_instance_m_threshold(n)

    def run_matrix(kind: str, stream: np.random.Generator):
        s_mat, s_cert, *s_algs = rngmod.split(stream, 2 + len(config.algorithms))
        nmat = build_matrix(kind, n, m, s_mat)
        cert = lower_bound_certificate(spec, nmat, trials_prob, s_cert)
        rows = [
            Cell(config.experiment, m, n, None, f"delta[{kind}]",
                 cert.delta.value, cert.delta.halfwidth, cert.delta.trials, config.seed),
            Cell(config.experiment, m, n, None, f"prob-distinct[{kind}]",
                 cert.prob_distinct.value, cert.prob_distinct.halfwidth,
                 cert.prob_distinct.trials, config.seed),
            Cell(config.experiment, m, n, None, f"certificate[{kind}]",
                 cert.bound, 0.0, trials_prob, config.seed,
                 extra={"bound_point": cert.bound_point, "c": cert.c}),
        ]
        local_checks = []
        if m >= threshold:
            local_checks.append(Check(
                f"certificate[{kind}] >= eps0",
                cert.bound >= EPS0,
                f"bound={cert.bound:.6f} eps0={EPS0:.6f}",
            ))
        for a_i, name in enumerate(config.algorithms):
            alg = make_algorithm(name, {"budget": n, "spec": spec, "matrix": nmat,
                                        "k": config.k, "eps": config.eps})
            err = mu_average_error(spec, alg, config.norm, trials_error, s_algs[a_i], budget=n)
            rows.append(Cell(config.experiment, m, n, None, f"mu-error[{kind}][{name}]",
                             err.value, err.halfwidth, err.trials, config.seed))
            local_checks.append(Check(
                f"mu-error[{kind}][{name}] >= certificate - 3ci",
                err.value >= cert.bound - 3.0 * err.halfwidth,
                f"error={err.value:.6f} certificate={cert.bound:.6f} ci={err.halfwidth:.6f}",
            ))
        return rows, local_checks

    tasks = [
        (i, (lambda kind=kind, s=mat_streams[i]: run_matrix(kind, s)))
        for i, kind in enumerate(config.matrices)
    ]
    for rows, local_checks in _run_cells(tasks, config.threads):
        cells.extend(rows)
        checks.extend(local_checks)
    return ExperimentReport(
        config=asdict(config), cells=cells, checks=checks, seed=config.seed,
        wall_clock=time.perf_counter() - t0,
    )


# ---------------------------------------------------------------------------
# gap
# ---------------------------------------------------------------------------


def cmd_gap(config: ExperimentConfig) -> ExperimentReport:
    t0 = time.perf_counter()
    if not config.m_grid:
        raise ConfigError("gap needs an m_grid")
    n_hard = config.n or 1
    _require_small_n(config, n_hard)
    budget = config.budget if config.budget is not None else 20
    trials_prob = config.trials_prob or 10_000
    trials_error = config.trials_error or 200
    norm = "l2" if config.norm == "linf" else config.norm  # gap is an l2 story
    threshold = hard_instance_m_threshold(n_hard)
    algorithms = config.algorithms or ["zero", "gaussian-linear"]
    root = rngmod.make_rng(config.seed)
    grid_streams = rngmod.split(root, len(config.m_grid))
    recov = RecoveryConfig(k=config.k, eps=config.eps, num_candidate_sets=1)

    def run_point(m: int, stream: np.random.Generator):
        spec = build_spec(m, n_hard)
        s_mat, s_cert, s_adapt, *s_base = rngmod.split(stream, 3 + len(algorithms))
        nmat = build_matrix("gaussian", n_hard, m, s_mat)
        rows = []
        cert = None
        if m >= threshold:
            cert = lower_bound_certificate(spec, nmat, trials_prob, s_cert)
            rows.append(Cell(config.experiment, m, n_hard, None, "certificate",
                             cert.bound, 0.0, trials_prob, config.seed,
                             extra={"coupled_n": n_hard}))
        adaptive = make_algorithm("adaptive-ksparse", {"recovery_config": recov})
        err_a = mu_average_error(spec, adaptive, norm, trials_error, s_adapt, budget=budget)
        rows.append(Cell(config.experiment, m, budget, config.k, "adaptive-ksparse",
                         err_a.value, err_a.halfwidth, err_a.trials, config.seed))
        baselines = {}
        for b_i, name in enumerate(algorithms):
            if name == "adaptive-ksparse":
                continue
            alg = make_algorithm(name, {"budget": budget, "spec": spec, "matrix": nmat,
                                        "k": config.k, "eps": config.eps})
            err_b = mu_average_error(spec, alg, norm, trials_error, s_base[b_i], budget=budget)
            baselines[name] = err_b
            rows.append(Cell(config.experiment, m, budget, config.k, name,
                             err_b.value, err_b.halfwidth, err_b.trials, config.seed))
        ratio = None
        if "gaussian-linear" in baselines and err_a.value > 0:
            ratio = baselines["gaussian-linear"].value / err_a.value
            rows.append(Cell(config.experiment, m, budget, config.k,
                             "ratio[gaussian-linear/adaptive]", ratio, 0.0,
                             trials_error, config.seed))
        return rows, err_a.value, (cert.bound if cert else None), ratio

    tasks = [
        (i, (lambda m=m, s=grid_streams[i]: run_point(m, s)))
        for i, m in enumerate(config.m_grid)
    ]
    results = _run_cells(tasks, config.threads)

    cells: list[Cell] = []
    checks: list[Check] = []
    adaptive_errors = []
    ratios = []
    for rows, err_a, cert_bound, ratio in results:
        cells.extend(rows)
        adaptive_errors.append(err_a)
        if ratio is not None:
            ratios.append(ratio)
        if cert_bound is not None:
            checks.append(Check("certificate >= eps0", cert_bound >= EPS0,
                                f"bound={cert_bound:.6f} eps0={EPS0:.6f}"))
    if adaptive_errors:
        spread = max(adaptive_errors) / max(min(adaptive_errors), 1e-300)
        checks.append(Check(
            "adaptive error varies <= 2x across grid", spread <= 2.0,
            f"max/min = {spread:.3f} over m_grid={config.m_grid}",
        ))
    if len(ratios) >= 2:
        monotone = all(b > a for a, b in zip(ratios, ratios[1:]))
        checks.append(Check(
            "nonadaptive/adaptive ratio grows monotonically", monotone,
            "ratios: " + ", ".join(f"{r:.2f}" for r in ratios),
        ))
    return ExperimentReport(
        config=asdict(config), cells=cells, checks=checks, seed=config.seed,
        wall_clock=time.perf_counter() - t0,
    )


# ---------------------------------------------------------------------------
# recover
# ---------------------------------------------------------------------------


def _draw_input(kind: str, m: int, k: int, rng: np.random.Generator) -> np.ndarray:
    if kind == "ksparse":
        x = np.zeros(m)
        support = rngmod.sample_subset(m, k, rng)
        x[support] = rng.standard_normal(k)
        norm1 = np.abs(x).sum()
        return x / norm1 if norm1 > 0 else x
    if kind == "b1-uniform":
        # uniform on the l1 sphere: Dirichlet magnitudes with random signs
        mags = rng.dirichlet(np.ones(m))
        signs = rng.integers(0, 2, size=m) * 2.0 - 1.0
        return mags * signs
    if kind == "geometric":
        x = 2.0 ** (1.0 - np.arange(1, m + 1, dtype=float))
        return x / np.abs(x).sum()
    raise ConfigError(f"unknown input_dist {kind!r}")


def cmd_recover(config: ExperimentConfig) -> ExperimentReport:
    t0 = time.perf_counter()
    if config.m is None:
        raise ConfigError("recover needs m")
    m, k, eps = config.m, config.k, config.eps
    trials = config.trials_error or 200
    budget = config.budget if config.budget is not None else measurement_budget(m, k, eps)
    algorithms = [a for a in config.algorithms if a != "bayes-mode"] or ["adaptive-ksparse"]
    root = rngmod.make_rng(config.seed)
    cells: list[Cell] = []
    checks: list[Check] = []
    for name in algorithms:
        stream = rngmod.split(root, 1)[0]
        trial_streams = rngmod.split(stream, trials)
        successes = 0
        max_used = 0
        errs = np.zeros(trials)
        for t in range(trials):
            x = _draw_input(config.input_dist, m, k, trial_streams[t])
            alg = make_algorithm(name, {"budget": budget, "k": k, "eps": eps})
            out, used = run_algorithm(alg, x, budget, rng=trial_streams[t])
            max_used = max(max_used, used)
            err = float(np.linalg.norm(out - x))
            errs[t] = err
            if err <= 2.0 * best_k_term_error(x, k, "l2") + 1e-12:
                successes += 1
        rate = wilson(successes, trials)
        cells.append(Cell(config.experiment, m, budget, k, f"success-rate[{name}]",
                          rate.value, rate.halfwidth, trials, config.seed))
        cells.append(Cell(config.experiment, m, budget, k, f"l2-error[{name}]",
                          float(errs.mean()), 0.0, trials, config.seed))
        cells.append(Cell(config.experiment, m, budget, k, f"max-measurements[{name}]",
                          float(max_used), 0.0, trials, config.seed))
        checks.append(Check(f"measurements[{name}] <= budget", max_used <= budget,
                            f"max used {max_used} of {budget}"))
        if name == "adaptive-ksparse":
            checks.append(Check(
                "adaptive 2x l2/l2 guarantee rate >= 0.9", rate.value >= 0.9,
                f"rate={rate.value:.3f} over {trials} trials",
            ))
    return ExperimentReport(
        config=asdict(config), cells=cells, checks=checks, seed=config.seed,
        wall_clock=time.perf_counter() - t0,
    )


# ---------------------------------------------------------------------------
# lemma-check
# ---------------------------------------------------------------------------


def cmd_lemma_check(config: ExperimentConfig) -> ExperimentReport:
    t0 = time.perf_counter()
    trials_prob = config.trials_prob or 100_000
    root = rngmod.make_rng(config.seed)
    (s_conc, s_mix, s_trace, s_count, s_kn) = rngmod.split(root, 5)
    cells: list[Cell] = []
    checks: list[Check] = []

    # Gaussian norm concentration at desk dims
    conc_trials = min(trials_prob, 200_000)
    for dim in config.dims:
        for norm_kind in ("l2", "l1"):
            est, bound = tail_bound_check(dim, norm_kind, conc_trials, s_conc)
            w = wilson(int(round(est * conc_trials)), conc_trials)
            cells.append(Cell(config.experiment, None, dim, None,
                              f"tail-{norm_kind}[dim={dim}]", est, w.halfwidth,
                              conc_trials, config.seed, extra={"bound": bound}))
            checks.append(Check(
                f"tail-{norm_kind}[dim={dim}] <= exp(-2 dim) + 3ci",
                est <= bound + 3.0 * w.halfwidth,
                f"estimate={est:.6g} bound={bound:.6g}",
            ))

    # mixture distinctness floor at the calibrated cell: n=1, all centers
    # inside the inflation-radius ball, count at the size threshold
    r1 = inflation_radius(1)
    m_cell = int(np.ceil(C_POINTS * (r1 + 3.0)))
    centers = (s_mix.random((m_cell, 1)) * 2.0 - 1.0) * r1
    model = GaussianMixtureModel(centers=centers, covariance=np.eye(1))
    hits = 0
    chunk = 8192
    done = 0
    while done < trials_prob:
        b = min(chunk, trials_prob - done)
        idx = s_mix.integers(m_cell, size=b)
        ys = centers[idx] + s_mix.standard_normal((b, 1))
        for y in ys:
            if posterior(model, y).max_prob <= 0.5:
                hits += 1
        done += b
    prob = wilson(hits, trials_prob)
    cells.append(Cell(config.experiment, m_cell, 1, None, "distinctness-floor",
                      prob.value, prob.halfwidth, trials_prob, config.seed))
    checks.append(Check(
        "P(D <= 1/2) >= 0.2 - 3ci at the mixture-size threshold",
        prob.value >= 0.2 - 3.0 * prob.halfwidth,
        f"prob={prob.value:.4f} ci={prob.halfwidth:.4f} M={m_cell}",
    ))

    # deterministic shrinkage certificates
    inflation_scale = 0.9 if config.inject_bug else 1.0
    num_traces = 20
    all_cols_ok = True
    all_stages_ok = True
    inflations = []
    for t in range(num_traces):
        n_t = 1 + (t % 4)
        m_t = 50
        nmat = s_trace.standard_normal((n_t, m_t))
        subset = rngmod.sample_subset(m_t, 2 * n_t, s_trace)
        trace = run_shrinkage(nmat, subset)
        for j in trace.final_set:
            ok = verify_column_in_rectangle(trace, int(j))
            all_cols_ok = all_cols_ok and ok
        for stage in range(1, n_t + 1):
            ok = verify_rectangle_in_ellipsoid(trace, stage, inflation_scale)
            all_stages_ok = all_stages_ok and ok
        inflations.append(measured_minimal_inflation(trace))
    cells.append(Cell(config.experiment, 50, None, None, "mean-minimal-inflation",
                      float(np.mean(inflations)), 0.0, num_traces, config.seed))
    checks.append(Check("all surviving columns inside their rectangles",
                        all_cols_ok, f"{num_traces} traces"))
    if config.inject_bug:
        checks.append(Check(
            "injected 0.9x inflation makes the stage check fail (checker self-test)",
            not all_stages_ok, "deliberate failure mode",
        ))
    else:
        checks.append(Check("all rectangle stages inside the proven ellipsoids",
                            all_stages_ok, f"{num_traces} traces"))

    # column-count probability and the stage-count law
    count_prob = inflated_count_probability(
        s_count.standard_normal((2, 50)), 1000, s_count
    )
    cells.append(Cell(config.experiment, 50, 2, None, "count-geq-half",
                      count_prob.value, count_prob.halfwidth, 1000, config.seed))
    checks.append(Check(
        "P(count >= m/2) >= 1/2 - 3ci", count_prob.value >= 0.5 - 3 * count_prob.halfwidth,
        f"prob={count_prob.value:.3f}",
    ))
    tv = kn_law_check(8, 2, min(trials_prob, 100_000), s_kn)
    cells.append(Cell(config.experiment, 8, 2, None, "kn-law-tv", tv, 0.0,
                      min(trials_prob, 100_000), config.seed))
    checks.append(Check("stage-count law matches enumeration (TV <= 0.02)",
                        tv <= 0.02, f"tv={tv:.4f}"))
    return ExperimentReport(
        config=asdict(config), cells=cells, checks=checks, seed=config.seed,
        wall_clock=time.perf_counter() - t0,
    )


# ---------------------------------------------------------------------------
# concentration
# ---------------------------------------------------------------------------


def cmd_concentration(config: ExperimentConfig) -> ExperimentReport:
    t0 = time.perf_counter()
    trials = config.trials_prob or 1_000_000
    root = rngmod.make_rng(config.seed)
    streams = rngmod.split(root, 2 * len(config.dims))
    cells: list[Cell] = []
    checks: list[Check] = []
    for i, dim in enumerate(config.dims):
        for j, norm_kind in enumerate(("l2", "l1")):
            est, bound = tail_bound_check(dim, norm_kind, trials, streams[2 * i + j])
            w = wilson(int(round(est * trials)), trials)
            cells.append(Cell(config.experiment, None, dim, None,
                              f"tail-{norm_kind}[dim={dim}]", est, w.halfwidth,
                              trials, config.seed, extra={"bound": bound}))
            checks.append(Check(
                f"tail-{norm_kind}[dim={dim}] <= bound + 3ci",
                est <= bound + 3.0 * w.halfwidth,
                f"estimate={est:.6g} bound={bound:.6g}",
            ))
    return ExperimentReport(
        config=asdict(config), cells=cells, checks=checks, seed=config.seed,
        wall_clock=time.perf_counter() - t0,
    )


COMMANDS = {
    "certify-lb": cmd_certify_lb,
    "gap": cmd_gap,
    "recover": cmd_recover,
    "lemma-check": cmd_lemma_check,
    "concentration": cmd_concentration,
}


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    return COMMANDS[config.experiment](config)


# ---------------------------------------------------------------------------
# dependency-free SVG line chart (data is primary; this is a convenience)
# ---------------------------------------------------------------------------


def write_svg_lines(path: str, series: dict[str, list[tuple[float, float]]],
                    title: str = "", log_y: bool = True) -> None:
    width, height, pad = 720, 480, 60
    points = [p for pts in series.values() for p in pts]
    if not points:
        raise ValueError("no data to plot")
    xs = [p[0] for p in points]
    ys = [max(p[1], 1e-12) for p in points]
    if log_y:
        ys = [np.log10(y) for y in ys]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    x_span = (x_hi - x_lo) or 1.0
    y_span = (y_hi - y_lo) or 1.0

    def to_px(x, y):
        if log_y:
            y = np.log10(max(y, 1e-12))
        px = pad + (x - x_lo) / x_span * (width - 2 * pad)
        py = height - pad - (y - y_lo) / y_span * (height - 2 * pad)
        return px, py

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2}" y="24" text-anchor="middle" font-size="16">{title}</text>',
    ]
    for i, (label, pts) in enumerate(sorted(series.items())):
        color = colors[i % len(colors)]
        coords = " ".join(f"{to_px(x, y)[0]:.1f},{to_px(x, y)[1]:.1f}" for x, y in pts)
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{coords}"/>'
        )
        parts.append(
            f'<text x="{width - pad + 4}" y="{40 + 18 * i}" font-size="12" '
            f'fill="{color}">{label}</text>'
        )
    parts.append(
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" '
        'stroke="black"/>'
    )
    parts.append(f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")
