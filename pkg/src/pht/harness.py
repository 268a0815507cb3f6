"""Monte Carlo engine for size and power experiments.

Replicates are embarrassingly parallel: replicate r always uses the RNG
substream (seed, r), every requested method sees the same generated data
within a replicate, and results are aggregated in replicate order, so a
report is a pure function of (config, seed) regardless of worker count.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, asdict

import numpy as np
from joblib import Parallel, delayed
from scipy.stats import norm

from .baselines import calibrate, dht_statistic_two, uht_statistic_two
from .core import kendall_tau_matrix
from .datagen import CovModel, MeanSpec, build_sigma, generate_pair
from .errors import ConfigError, DataValidationError
from .screening import screen_two_sample
from .tau_select import TauSelectConfig, select_tau0
from .two_sample import phi_factor, t2_and_trace

KNOWN_METHODS = ("PHT", "UHT", "DHT")


@dataclass(frozen=True)
class SimConfig:
    n1: int
    n2: int
    p: int
    model: CovModel
    dist: str = "normal"
    kappa: float = 0.0
    beta: float = 0.0
    alpha: float = 0.05
    reps: int = 1000
    tau0: float | str = 0.8
    methods: tuple[str, ...] = ("PHT",)
    seed: int = 0
    n_resamples: int = 199
    threads: int = 1

    def validate(self) -> None:
        if min(self.n1, self.n2) < 5:
            raise ConfigError("group sizes must be >= 5")
        if self.reps < 100:
            raise ConfigError("reps must be >= 100 for a reported rate")
        if not 0.0 < self.alpha <= 1.0:
            raise ConfigError("alpha must be in (0, 1]")
        if self.tau0 != "auto" and not 0.0 <= float(self.tau0) <= 1.0:
            raise ConfigError("tau0 must be in [0, 1] or 'auto'")
        for m in self.methods:
            if m not in KNOWN_METHODS:
                raise ConfigError(f"unknown method {m!r}; known: {KNOWN_METHODS}")
        if self.dist not in ("normal", "double-pareto"):
            raise ConfigError(f"unknown dist {self.dist!r}")
        self.model.validate()
        if self.model.p != self.p:
            raise ConfigError("model.p must match p")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["methods"] = list(self.methods)
        return d

    def with_kappa(self, kappa: float) -> "SimConfig":
        return SimConfig(**{**self.to_dict(), "kappa": kappa,
                            "model": self.model, "methods": self.methods})


@dataclass(frozen=True)
class SimReport:
    """Rejection rates with Monte Carlo standard errors for one design."""

    rates: dict
    mc_se: dict
    reps: int
    seed: int
    config: dict
    wall_time_s: float = field(compare=False, default=0.0)

    def to_stable_dict(self) -> dict:
        """Serialization content; excludes wall time and worker count so that
        report files are byte-identical across machines and runs."""
        config = {k: v for k, v in self.config.items() if k != "threads"}
        return {
            "schema_version": 1,
            "config": config,
            "seed": self.seed,
            "reps": self.reps,
            "rates": self.rates,
            "mc_se": self.mc_se,
        }


def _mc_se(rate: float, reps: int) -> float:
    return float(np.sqrt(rate * (1.0 - rate) / reps))


def _replicate_seed(seed: int, r: int, tag: int) -> int:
    # Deterministic 63-bit schedule for nested per-replicate consumers.
    return int((seed * 1_000_003 + r * 97 + tag) % (2**63 - 1))


def _run_methods(config: SimConfig, x, y, r: int) -> dict:
    """Rejection indicators for one generated replicate (paired seeds)."""
    out = {}
    z_alpha = norm.isf(config.alpha)
    for method in config.methods:
        if method == "PHT":
            if config.tau0 == "auto":
                tau0 = select_tau0(
                    x, y=y, cfg=TauSelectConfig(seed=_replicate_seed(config.seed, r, 1))
                )
            else:
                tau0 = float(config.tau0)
            sets = screen_two_sample(kendall_tau_matrix(x), kendall_tau_matrix(y),
                                     config.n1, config.n2, tau0)
            t2, tr = t2_and_trace(x, y, sets)
            z = t2 / np.sqrt(phi_factor(config.n1, config.n2) * tr)
            out[method] = bool(z > z_alpha)
        elif method == "UHT":
            res = calibrate(uht_statistic_two, x, y=y, n_resamples=config.n_resamples,
                            seed=_replicate_seed(config.seed, r, 2), method="UHT")
            out[method] = bool(res.p_value <= config.alpha)
        elif method == "DHT":
            res = calibrate(dht_statistic_two, x, y=y, n_resamples=config.n_resamples,
                            seed=_replicate_seed(config.seed, r, 3), method="DHT")
            out[method] = bool(res.p_value <= config.alpha)
    return out


def _map_replicates(fn, reps: int, threads: int):
    if threads and threads > 1:
        return Parallel(n_jobs=threads, prefer="processes")(
            delayed(fn)(r) for r in range(reps)
        )
    return [fn(r) for r in range(reps)]


def _aggregate(config: SimConfig, results: list[dict], elapsed: float) -> SimReport:
    rates = {}
    se = {}
    for method in results[0]:
        rate = float(np.mean([res[method] for res in results]))
        rates[method] = rate
        se[method] = _mc_se(rate, config.reps)
    return SimReport(rates=rates, mc_se=se, reps=config.reps, seed=config.seed,
                     config=config.to_dict(), wall_time_s=elapsed)


def run_size(config: SimConfig) -> SimReport:
    """Type I error rates under the null (requires kappa = 0)."""
    config.validate()
    if config.kappa != 0.0:
        raise ConfigError("size runs require kappa = 0")
    return _run(config)


def run_power(config: SimConfig, kappa_grid) -> list[SimReport]:
    """One report per signal strength on the grid."""
    config.validate()
    reports = []
    for kappa in kappa_grid:
        if kappa != 0.0 and config.beta <= 0.0:
            raise ConfigError("power runs with kappa > 0 need beta > 0")
        reports.append(_run(config.with_kappa(float(kappa))))
    return reports


def _run(config: SimConfig) -> SimReport:
    config.validate()
    _, sqrt, _ = build_sigma(config.model, config.seed)
    mean_spec = MeanSpec(kappa=config.kappa, beta=config.beta)
    mean_spec.validate()

    def one(r: int) -> dict:
        rng = np.random.default_rng([config.seed, r])
        x, y = generate_pair(sqrt, config.dist, mean_spec, config.n1, config.n2, rng)
        return _run_methods(config, x, y, r)

    start = time.perf_counter()
    results = _map_replicates(one, config.reps, config.threads)
    return _aggregate(config, results, time.perf_counter() - start)


def run_false_true_positive(x_pool, y_pool, config: SimConfig,
                            size_a: int = 30, size_b: int = 17) -> SimReport:
    """Resampled rejection rates on real pooled data.

    The false positive rate partitions the combined pool into two pseudo
    groups; the true positive rate subsamples each true group.
    """
    config.validate()
    x_pool = np.asarray(x_pool, dtype=float)
    y_pool = np.asarray(y_pool, dtype=float)
    if min(size_a, size_b) < 5:
        raise ConfigError("subclass sizes must be >= 5")
    pool = np.vstack([x_pool, y_pool])
    if pool.shape[0] < size_a + size_b:
        raise DataValidationError("pooled data smaller than the requested subclasses")
    if x_pool.shape[0] < size_a or y_pool.shape[0] < size_b:
        raise DataValidationError("a group pool is smaller than its subclass size")

    cfg = SimConfig(**{**config.to_dict(), "n1": size_a, "n2": size_b,
                       "model": config.model, "methods": config.methods})

    def one(r: int) -> dict:
        rng = np.random.default_rng([config.seed, r])
        idx = rng.choice(pool.shape[0], size=size_a + size_b, replace=False)
        fp = _run_methods(cfg, pool[idx[:size_a]], pool[idx[size_a:]], r)
        ia = rng.choice(x_pool.shape[0], size=size_a, replace=False)
        ib = rng.choice(y_pool.shape[0], size=size_b, replace=False)
        tp = _run_methods(cfg, x_pool[ia], y_pool[ib], r)
        return {**{f"false_positive_{m}": v for m, v in fp.items()},
                **{f"true_positive_{m}": v for m, v in tp.items()}}

    start = time.perf_counter()
    results = _map_replicates(one, config.reps, config.threads)
    return _aggregate(config, results, time.perf_counter() - start)
