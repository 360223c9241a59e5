"""Replication engine for the bias / RMSE studies of the tail and premium estimators."""
from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import AllReplicationsFailed, EstimationError
from .models import LossModel, ParetoMixture, random_stream, sample_model, true_premium
from .premium import premium_ph_hill, premium_ph_thill
from .tail_estimation import LossSample, hill_estimator, t_hill_estimator
from .threshold import DEFAULT_THETA, reiss_thomas_select

log = logging.getLogger(__name__)

ESTIMATORS = ("thill_gamma", "thill_premium", "hill_gamma", "hill_premium")


@dataclass(frozen=True)
class SimulationStudy:
    model: LossModel
    sizes: tuple[int, ...]
    replications: int = 1000
    rho: float = 1.12
    theta: float = DEFAULT_THETA
    seed: int = 0
    eps_grid: tuple[float, ...] | None = None
    estimators: tuple[str, ...] = ESTIMATORS

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if any(n < 10 for n in self.sizes):
            raise ValueError("every sample size must be >= 10")
        if not self.rho >= 1:
            raise ValueError("rho must be >= 1")
        if not (0 <= self.theta < 1):
            raise ValueError("theta must lie in [0, 1)")
        if self.eps_grid is not None and not isinstance(self.model, ParetoMixture):
            raise ValueError("an eps grid needs a mixture model")
        unknown = set(self.estimators) - set(ESTIMATORS)
        if unknown:
            raise ValueError(f"unknown estimators {sorted(unknown)}")

    @property
    def eps_values(self) -> tuple[float, ...]:
        if self.eps_grid is not None:
            return tuple(self.eps_grid)
        return (self.model.eps,) if isinstance(self.model, ParetoMixture) else (0.0,)

    def model_at(self, eps: float) -> LossModel:
        if isinstance(self.model, ParetoMixture):
            return replace(self.model, eps=eps)
        return self.model

    def truth(self) -> tuple[float, float]:
        """Targets ``(gamma, premium)`` of the uncontaminated model."""
        core = self.model.core() if isinstance(self.model, ParetoMixture) else self.model
        return core.gamma, true_premium(core, self.rho)


@dataclass(frozen=True)
class ReplicationRecord:
    n: int
    eps: float
    rep: int
    k_thill: int | None = None
    k_hill: int | None = None
    thill_gamma: float | None = None
    hill_gamma: float | None = None
    thill_premium: float | None = None
    hill_premium: float | None = None
    errors: tuple[str, ...] = ()

    def value(self, estimator: str) -> float | None:
        return getattr(self, estimator)

    def k_for(self, estimator: str) -> int | None:
        return self.k_thill if estimator.startswith("thill") else self.k_hill


@dataclass(frozen=True)
class Cell:
    n: int
    eps: float
    estimator: str
    k_star_mean: float
    bias: float
    rmse: float
    failures: int
    replications: int


@dataclass
class SimulationReport:
    cells: list[Cell]
    records: list[ReplicationRecord] | None = field(default=None, repr=False)

    def cell(self, n: int, estimator: str, eps: float = 0.0) -> Cell:
        for c in self.cells:
            if c.n == n and c.estimator == estimator and c.eps == eps:
                return c
        raise KeyError((n, eps, estimator))

    def failed_cells(self) -> list[Cell]:
        return [c for c in self.cells if c.failures >= c.replications]


def run_replication(study: SimulationStudy, n: int, rep_index: int, eps: float | None = None,
                    sample: LossSample | None = None) -> ReplicationRecord:
    """One draw and both estimator paths; estimator errors are recorded, not raised.

    The draw uses stream ``(seed, n, rep_index)``, shared across contamination
    levels. ``sample`` bypasses the draw.
    """
    eps = study.eps_values[0] if eps is None else eps
    if sample is None:
        sample = sample_model(study.model_at(eps), n, random_stream(study.seed, n, rep_index))
    fields: dict = {}
    errors = []
    for method, prefix in (("t_hill", "thill"), ("hill", "hill")):
        try:
            k = reiss_thomas_select(sample, method, study.theta).k_star
            fields[f"k_{prefix}"] = k
            est = t_hill_estimator if method == "t_hill" else hill_estimator
            fields[f"{prefix}_gamma"] = est(sample, k).gamma_hat
            prem = premium_ph_thill if method == "t_hill" else premium_ph_hill
            fields[f"{prefix}_premium"] = prem(sample, k, study.rho).value
        except EstimationError as exc:
            errors.append(f"{prefix}: {type(exc).__name__}")
    return ReplicationRecord(n=n, eps=eps, rep=rep_index, errors=tuple(errors), **fields)


def bias_rmse(values, truth: float) -> tuple[float, float]:
    """Bias and RMSE of the non-missing values; ``None``/NaN entries are failures."""
    vals = np.array([np.nan if v is None else v for v in values], dtype=float)
    vals = vals[np.isfinite(vals)]
    if vals.size == 0:
        raise AllReplicationsFailed("no successful replication to aggregate")
    err = vals - truth
    return float(np.mean(err)), float(math.sqrt(np.mean(err**2)))


def _run_chunk(args):
    study, tasks = args
    return [run_replication(study, n, rep, eps) for n, eps, rep in tasks]


def _tasks(study: SimulationStudy) -> list[tuple[int, float, int]]:
    return [(n, eps, rep) for n in study.sizes for eps in study.eps_values
            for rep in range(study.replications)]


def run_study(study: SimulationStudy, workers: int = 1, keep_records: bool = False,
              strict: bool = False, chunk: int = 50) -> SimulationReport:
    """Run every (size, eps, replication) and aggregate per (size, eps, estimator).

    Records are gathered in task order before reduction, so the report does
    not depend on ``workers``. Cells where every replication failed carry NaN
    bias/RMSE, or raise :class:`AllReplicationsFailed` when ``strict``.
    """
    tasks = _tasks(study)
    chunks = [(study, tasks[i : i + chunk]) for i in range(0, len(tasks), chunk)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, chunks))
    else:
        parts = [_run_chunk(c) for c in chunks]
    records = [r for part in parts for r in part]

    gamma_true, premium_true = study.truth()
    cells = []
    for n in study.sizes:
        for eps in study.eps_values:
            group = [r for r in records if r.n == n and r.eps == eps]
            for est in study.estimators:
                truth = gamma_true if est.endswith("gamma") else premium_true
                values = [r.value(est) for r in group]
                ks = [r.k_for(est) for r in group if r.value(est) is not None]
                failures = sum(v is None for v in values)
                try:
                    bias, rmse = bias_rmse(values, truth)
                except AllReplicationsFailed:
                    if strict:
                        raise AllReplicationsFailed(f"cell n={n}, eps={eps}, {est}: all failed")
                    bias = rmse = math.nan
                k_mean = float(np.mean(ks)) if ks else math.nan
                cells.append(Cell(n, eps, est, k_mean, bias, rmse, failures, len(group)))
                if failures:
                    log.info("n=%d eps=%g %s: %d/%d replications failed",
                             n, eps, est, failures, len(group))
    return SimulationReport(cells, records if keep_records else None)


def table1_study(replications: int = 1000, seed: int = 0) -> SimulationStudy:
    from .models import Lomax

    return SimulationStudy(Lomax(0.6), (100, 200, 500, 1000), replications, 1.12, 0.3, seed)


def table2_study(replications: int = 1000, seed: int = 0) -> SimulationStudy:
    return SimulationStudy(ParetoMixture(0.6, 2.0, 0.05), (100, 200, 1000), replications, 1.12,
                           0.3, seed, eps_grid=(0.05, 0.10, 0.15, 0.25))
