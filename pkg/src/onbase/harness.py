"""Seeded experiments: average-case ratio estimates, worst-case family sweeps and
the figure datasets.

Trial t of a run with master seed s draws its input from
``SeedSequence(s, spawn_key=(t, 0))`` and gives the algorithm
``SeedSequence(s, spawn_key=(t, 1))``, so results do not depend on how trials
are split across worker processes.  Different algorithms run with the same
master seed see the same inputs and arrival orders.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional, Union

import numpy as np

from . import __version__
from .adversaries import AdversaryFamily, RandomModel, log_space_ts, rank_transform, sample_random_model
from .errors import ConfigError
from .model import OnlineAlgorithm, WeightMatrix, run_online, ts_utility
from .offline import (
    BRUTE_FORCE_LIMIT,
    brute_force_optimal,
    greedy_matching,
    max_weight_matching,
    optimal_identical_offline,
)
from .online import REGISTRY, make_algorithm, online_greedy_reassign

BASELINES = ("brute-force", "prop1", "mwm-upper", "auto")

CSV_COLUMNS = (
    "run_id", "algorithm", "model", "n", "m", "r_or_p", "trials", "seed",
    "rho_mean", "rho_se", "eta_mean", "eta_se", "baseline", "eta_ratio_of_means",
)


@dataclass
class ExperimentConfig:
    algorithm: str
    n: int
    m: int
    trials: int = 1000
    seed: int = 0
    model: str = "iid-uniform"
    model_params: dict = field(default_factory=dict)
    weights: Optional[list] = None
    baseline: str = "auto"
    params: dict = field(default_factory=dict)
    threads: int = 1

    def validate(self) -> None:
        if self.algorithm not in REGISTRY:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}; valid names: {', '.join(sorted(REGISTRY))}")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if self.baseline not in BASELINES:
            raise ConfigError(f"unknown baseline {self.baseline!r}; valid: {', '.join(BASELINES)}")
        if self.weights is not None:
            w = WeightMatrix(np.asarray(self.weights, dtype=float))
            if (w.n, w.m) != (self.n, self.m):
                raise ConfigError(f"weights are {w.n}x{w.m} but config says {self.n}x{self.m}")
        else:
            self.random_model()
        base = self.resolved_baseline()
        if base == "prop1":
            if self.m >= self.n:
                raise ConfigError("prop1 baseline needs m < n")
            if self.weights is not None and not WeightMatrix(np.asarray(self.weights, dtype=float)).is_identical():
                raise ConfigError("prop1 baseline needs identical basestations")
            if self.weights is None and not self.random_model().identical:
                raise ConfigError("prop1 baseline needs an identical-basestation model")
        if base == "brute-force" and self.m**self.n > BRUTE_FORCE_LIMIT:
            raise ConfigError("brute-force baseline is too large for this n, m")

    def random_model(self) -> RandomModel:
        params = dict(self.model_params)
        if "means" in params and params["means"] is not None:
            params["means"] = tuple(params["means"])
        return RandomModel(kind=self.model, **params)

    def identical_input(self) -> bool:
        if self.weights is not None:
            return WeightMatrix(np.asarray(self.weights, dtype=float)).is_identical()
        return self.random_model().identical

    def resolved_baseline(self) -> str:
        if self.baseline != "auto":
            return self.baseline
        return "prop1" if self.identical_input() and self.m < self.n else "mwm-upper"

    def param_label(self) -> str:
        return ";".join(f"{k}={v}" for k, v in sorted(self.params.items()) if v is not None)

    def model_label(self) -> str:
        if self.weights is not None:
            return "fixed"
        label = self.model
        if self.model_params.get("identical"):
            label += "/identical"
        return label


@dataclass
class RatioEstimate:
    algorithm: str
    model: str
    n: int
    m: int
    r_or_p: str
    trials: int
    seed: int
    baseline: str
    rho_mean: float
    rho_se: float
    eta_mean: float
    eta_se: float
    eta_ratio_of_means: float
    alg_values: np.ndarray = field(repr=False)
    base_values: np.ndarray = field(repr=False)

    @property
    def is_bound(self) -> bool:
        """True when the baseline is the matching upper bound, not an optimum."""
        return self.baseline == "mwm-upper"

    @property
    def rho_samples(self) -> np.ndarray:
        return _ratio(self.alg_values, self.base_values)

    @property
    def eta_samples(self) -> np.ndarray:
        return _ratio(self.base_values, self.alg_values)

    def row(self, run_id: str) -> dict:
        out = {k: getattr(self, k) for k in CSV_COLUMNS if k != "run_id"}
        out["run_id"] = run_id
        return out


def _ratio(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    out = np.ones_like(num, dtype=float)
    nz = den > 0
    out[nz] = num[nz] / den[nz]
    out[~nz & (num > 0)] = np.inf
    return out


def _mean_se(x: np.ndarray):
    if np.any(~np.isfinite(x)):
        return math.inf, math.inf
    se = float(np.std(x, ddof=1) / math.sqrt(x.size)) if x.size > 1 else 0.0
    return float(np.mean(x)), se


def baseline_value(W: np.ndarray, baseline: str) -> float:
    if baseline == "prop1":
        _, alloc = optimal_identical_offline(W[:, 0], W.shape[1])
        # evaluated through ts_utility so an optimal online allocation ties exactly
        return ts_utility(alloc, W)
    if baseline == "brute-force":
        return brute_force_optimal(W)[0]
    return max_weight_matching(W).weight


def _run_trials(cfg: ExperimentConfig, start: int, stop: int):
    n, m = cfg.n, cfg.m
    base_kind = cfg.resolved_baseline()
    fixed = None if cfg.weights is None else np.asarray(cfg.weights, dtype=float)
    model = None if fixed is not None else cfg.random_model()
    alg_vals = np.empty(stop - start)
    base_vals = np.empty(stop - start)
    for k, t in enumerate(range(start, stop)):
        rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(t, 0)))
        W = fixed if fixed is not None else sample_random_model(model, n, m, rng)
        if base_kind == "prop1" and not np.all(W == W[:, :1]):
            raise ConfigError("prop1 baseline needs identical basestations")
        Wp = W[rng.permutation(n)]
        alg = make_algorithm(cfg.algorithm, **cfg.params)
        alg_rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(t, 1)))
        alloc, _ = run_online(alg, Wp, alg_rng, keep_trace=False)
        alg_vals[k] = ts_utility(alloc, Wp)
        base_vals[k] = baseline_value(W, base_kind)
    return alg_vals, base_vals


def run_average_case(cfg: ExperimentConfig) -> RatioEstimate:
    """Average the algorithm's ratio to the baseline over random arrival orders
    (and random weights, for a random model)."""
    cfg.validate()
    T = cfg.trials
    workers = max(1, min(cfg.threads, T))
    if workers == 1:
        alg_vals, base_vals = _run_trials(cfg, 0, T)
    else:
        bounds = np.linspace(0, T, workers + 1).astype(int)
        with ProcessPoolExecutor(workers) as pool:
            parts = list(pool.map(_run_trials, [cfg] * workers, bounds[:-1], bounds[1:]))
        alg_vals = np.concatenate([p[0] for p in parts])
        base_vals = np.concatenate([p[1] for p in parts])
    rho_mean, rho_se = _mean_se(_ratio(alg_vals, base_vals))
    eta_mean, eta_se = _mean_se(_ratio(base_vals, alg_vals))
    mean_alg = float(np.mean(alg_vals))
    eta_rm = float(np.mean(base_vals)) / mean_alg if mean_alg > 0 else math.inf
    return RatioEstimate(
        algorithm=cfg.algorithm, model=cfg.model_label(), n=cfg.n, m=cfg.m, r_or_p=cfg.param_label(),
        trials=T, seed=cfg.seed, baseline=cfg.resolved_baseline(), rho_mean=rho_mean, rho_se=rho_se,
        eta_mean=eta_mean, eta_se=eta_se, eta_ratio_of_means=eta_rm, alg_values=alg_vals, base_values=base_vals,
    )


@dataclass
class WorstCaseTable:
    family: AdversaryFamily
    algorithm: str
    rows: list

    @property
    def max_eta(self) -> float:
        return max(r["eta"] for r in self.rows)

    @property
    def argmax(self) -> int:
        return max(self.rows, key=lambda r: r["eta"])["l"]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=["l", "log_opt", "log_alg", "eta", "opt_exact"], lineterminator="\n")
        writer.writeheader()
        for r in self.rows:
            writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
        return buf.getvalue()


def run_worst_case_family(family: AdversaryFamily, algorithm: Union[str, OnlineAlgorithm],
                          seed: int = 0, params: Optional[dict] = None) -> WorstCaseTable:
    """Competitive ratio of one algorithm on every member of an adversarial family.

    Comparison-based algorithms run on the rank transform of the log weights so
    members with entries beyond double range are still executable; utilities
    are always evaluated in log space.
    """
    rows = []
    name = algorithm if isinstance(algorithm, str) else algorithm.name
    for l in family.members():
        alg = make_algorithm(algorithm, **(params or {})) if isinstance(algorithm, str) else algorithm
        L = family.log_weights(l)
        W_in = rank_transform(L) if alg.comparison_based else family.weights(l)
        alloc, _ = run_online(alg, W_in, seed, keep_trace=False)
        log_alg = log_space_ts(alloc, L)
        log_opt, exact = family.opt_log(l)
        eta = math.exp(log_opt - log_alg) if log_alg > -math.inf else math.inf
        rows.append({"l": l, "log_opt": log_opt, "log_alg": log_alg, "eta": eta, "opt_exact": exact})
    return WorstCaseTable(family, name, rows)


def greedy_reassign_agreement(trials: int, n: int, m: int, seed: int = 0) -> float:
    """Fraction of random instances where the one-eviction online matcher ends
    with exactly the greedy offline matching's edge set."""
    rng = np.random.default_rng(seed)
    same = 0
    for _ in range(trials):
        W = rng.uniform(0, 10, size=(n, m))
        same += online_greedy_reassign(W).edges == greedy_matching(W).edges
    return same / trials


# -- figure datasets -------------------------------------------------------------

FIGURES = ("ksec", "arbweights", "reassign")
FIGURE_NS = (20, 50, 100, 200, 500, 1000)
KSEC_ALPHAS = (0.1, 0.22, 0.37)


def _figure_configs(which: str, ns, m: int, trials: int, seed: int, threads: int) -> list:
    cfgs = []
    common = dict(m=m, trials=trials, seed=seed, threads=threads)
    if which == "ksec":
        for n in ns:
            for a in KSEC_ALPHAS:
                cfgs.append(ExperimentConfig("k-secretary", n, model_params={"identical": True},
                                             params={"alpha": a}, **common))
            cfgs.append(ExperimentConfig("least-loaded", n, model_params={"identical": True}, **common))
            for a in KSEC_ALPHAS:
                cfgs.append(ExperimentConfig("k-secretary", n, model="correlated", params={"alpha": a}, **common))
            cfgs.append(ExperimentConfig("max-weight", n, model="correlated", **common))
    elif which in ("arbweights", "reassign"):
        algs = ("hide-and-seek", "max-weight")
        if which == "reassign":
            algs = ("hide-and-seek-reassign",) + algs
        for model in ("iid-uniform", "correlated"):
            for n in ns:
                for alg in algs:
                    cfgs.append(ExperimentConfig(alg, n, model=model, baseline="mwm-upper", **common))
    else:
        raise ConfigError(f"unknown figure {which!r}; valid: {', '.join(FIGURES)}")
    return cfgs


def reproduce_figures(which: str, out=None, ns=FIGURE_NS, m: int = 10, trials: int = 200,
                      seed: int = 2024, threads: int = 1) -> list:
    """Ratio sweeps behind the three simulation figures, as CSV rows.

    ksec: k-secretary for several test fractions against load balancing on
    identical iid weights and against max-weight on the correlated model.
    arbweights: hide-and-seek vs max-weight on both random models.
    reassign: the reassigning hide-and-seek variant alongside the other two.
    """
    rows = []
    for k, cfg in enumerate(_figure_configs(which, ns, m, trials, seed, threads)):
        rows.append(run_average_case(cfg).row(f"{which}-{k:03d}"))
    if out is not None:
        write_csv(rows, out)
    return rows


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(CSV_COLUMNS), lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
    return buf.getvalue()


def write_csv(rows, out) -> None:
    text = rows_to_csv(rows)
    if hasattr(out, "write"):
        out.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def write_manifest(path: str, config: dict) -> None:
    manifest = {"artifact": "onbase", "version": __version__, "config": config}
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=str)


def config_dict(cfg: ExperimentConfig) -> dict:
    d = asdict(cfg)
    d["resolved_baseline"] = cfg.resolved_baseline()
    if cfg.weights is None:
        d["model_resolved"] = cfg.random_model().describe()
    return d


def default_threads() -> int:
    return os.cpu_count() or 1
