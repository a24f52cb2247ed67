"""
Monte Carlo harness.

Replica r runs on the stream keyed by (seed, r), so its result does not depend
on how many replicas run or on which worker runs it. Results are folded in
replica order; serial and pooled runs produce identical reports.
"""

import logging
import multiprocessing
import os
from dataclasses import dataclass
from typing import List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from hlflock.utils.analysis.bounds import (
    BoundParams,
    derive_bound_params,
    leader_follower_speed_bound,
    lemma2_bound_critical,
    lemma2_bound_subcritical,
    lemma2_product_bound,
)
from hlflock.utils.analysis.flocking import detect_flocking
from hlflock.utils.analysis.theorem import markov_exceedance_bound
from hlflock.utils.config.config import SimConfig
from hlflock.utils.core.diagnostics import contraction_factors
from hlflock.utils.core.dynamics import to_relative
from hlflock.utils.core.simulate import simulate
from hlflock.utils.ensemble.report import (
    BoundComparison,
    EnsembleReport,
    ExceedanceRow,
    QuantilePoint,
    SeriesPoint,
    mean_se,
)
from hlflock.utils.errors import BoundInapplicable, FlockError, InvariantBreach, ReplicaError
from hlflock.utils.interactions.rng import RngStream
from hlflock.utils.writer.csv_writer import save_csv, trajectory_frame

logger = logging.getLogger(__name__)

LOW_CONFIDENCE_REPLICAS = 100
ROUNDING_ALLOWANCE = 1e-12

Statistic = Literal["speed", "product", "sup_norm"]


class EnsembleSpec(BaseModel):
    """
    Attributes:
        config (SimConfig): Flock, model and initial conditions.
        replicas (int): R >= 1.
        horizon (int): T >= 1.
        seed (int): Master seed.
        workers (int): Processes; 1 runs in-process.
        statistics (list): Time series to keep in the report.
        traces_dir (str | None): Where to spill per-replica CSVs.
    """

    model_config = ConfigDict(frozen=True)

    config: SimConfig
    replicas: int = Field(ge=1)
    horizon: int = Field(ge=1)
    seed: int = Field(ge=0, lt=2**64)
    workers: int = Field(default=1, ge=1)
    statistics: List[Statistic] = ["speed", "product", "sup_norm"]
    traces_dir: Optional[str] = None

    @classmethod
    def from_config(cls, config: SimConfig, replicas=None, horizon=None, workers=None, traces_dir=None):
        return cls(
            config=config,
            replicas=replicas or config.ensemble.replicas,
            horizon=horizon or config.horizon,
            seed=config.seed,
            workers=workers or config.ensemble.workers,
            traces_dir=traces_dir,
        )


@dataclass(frozen=True, eq=False)
class ReplicaResult:
    replica: int
    speeds: np.ndarray
    factors: np.ndarray
    sup_x: np.ndarray
    flocking: bool
    bounds: BoundParams


@dataclass(frozen=True, eq=False)
class EnsembleRun:
    """
    Raw replica data stacked in replica order.

    Attributes:
        speeds (np.ndarray): |v_l[t]|, shape (R, T + 1, k).
        factors (np.ndarray): 1 - h sum_j a_lj[s], shape (R, T, k).
        sup_x (np.ndarray): |x[t]|_inf, shape (R, T + 1).
        flocking (np.ndarray): Per-replica verdict, shape (R,).
        bounds (list): Per-replica BoundParams.
    """

    spec: EnsembleSpec
    speeds: np.ndarray
    factors: np.ndarray
    sup_x: np.ndarray
    flocking: np.ndarray
    bounds: List[BoundParams]

    @property
    def replicas(self):
        return self.speeds.shape[0]

    @property
    def sup_v(self):
        return self.speeds.max(axis=2)

    def products(self, bird, tau, t):
        """Per-replica prod_{s=tau+1}^{t+1} of bird's contraction factors."""
        if not 0 <= tau <= t + 1 or t + 1 > self.factors.shape[1]:
            raise ValueError(f"need 0 <= tau <= t + 1 <= T, got tau={tau}, t={t}")
        return np.prod(self.factors[:, tau : t + 1, bird - 1], axis=1)


def _simulate_replica(job):
    spec, replica = job
    config = spec.config
    try:
        stream = RngStream(seed=spec.seed, replica=replica)
        hierarchy = config.build_hierarchy()
        initial = to_relative(config.initial_state(stream))
        trajectory = simulate(initial, hierarchy, config.model, config.h, spec.horizon, stream)
        window = min(config.flocking.window, spec.horizon + 1)
        verdict = detect_flocking(trajectory, config.flocking.epsilon, window)
        certificate = config.model.certificate
        bounds = derive_bound_params(initial, hierarchy, config.h, certificate.p, certificate.alpha)
        if spec.traces_dir is not None:
            save_csv(
                trajectory_frame(trajectory.x, trajectory.v),
                os.path.join(spec.traces_dir, f"replica_{replica:05d}.csv"),
            )
    except FlockError as e:
        if isinstance(e, InvariantBreach):
            logger.error("replica %d breached an invariant at step %s: %s", replica, e.step, e.message)
        raise ReplicaError(replica, e) from e
    return ReplicaResult(
        replica=replica,
        speeds=trajectory.speeds(),
        factors=contraction_factors(trajectory),
        sup_x=trajectory.sup_x(),
        flocking=verdict.flocking,
        bounds=bounds,
    )


# Function to simulate every replica of an ensemble
def run_replicas(spec: EnsembleSpec) -> EnsembleRun:
    """
    Runs R replicas, serially or on a process pool, and stacks their data.

    Args:
        spec (EnsembleSpec): What to run.

    Returns:
        EnsembleRun: Raw data in replica order.
    """
    jobs = [(spec, r) for r in range(spec.replicas)]
    step = max(1, spec.replicas // 10)
    results = []

    def collect(iterator):
        for result in iterator:
            results.append(result)
            if len(results) % step == 0:
                logger.info("ensemble progress: %d/%d replicas", len(results), spec.replicas)

    if spec.workers == 1:
        collect(map(_simulate_replica, jobs))
    else:
        chunksize = max(1, spec.replicas // (4 * spec.workers))
        with multiprocessing.Pool(processes=spec.workers) as pool:
            collect(pool.imap(_simulate_replica, jobs, chunksize=chunksize))

    return EnsembleRun(
        spec=spec,
        speeds=np.stack([r.speeds for r in results]),
        factors=np.stack([r.factors for r in results]),
        sup_x=np.stack([r.sup_x for r in results]),
        flocking=np.array([r.flocking for r in results], dtype=bool),
        bounds=[r.bounds for r in results],
    )


def _product_bound(bp: BoundParams, bird, tau, t):
    if bp.alpha < 1.0:
        return lemma2_bound_subcritical(tau, t, bp, bp.h, bp.p, bp.alpha)
    if bp.alpha == 1.0:
        return lemma2_bound_critical(tau, t, bp, bp.h, bird)
    raise BoundInapplicable(f"no contraction bound for alpha = {bp.alpha} > 1")


def _compare(statistic, bird, tau, t, samples, bounds, margin):
    mean, se = mean_se(samples)
    mean, se = float(mean), float(se)
    bound = float(np.mean(bounds))
    allowance = margin * se + ROUNDING_ALLOWANCE * max(1.0, abs(bound))
    return BoundComparison(
        statistic=statistic,
        bird=bird,
        tau=tau,
        t=t,
        mean=mean,
        se=se,
        bound=bound,
        margin_se=(bound - mean) / se if se > 0.0 else None,
        passed=mean <= bound + allowance,
    )


class ProductEstimate(BaseModel):
    model_config = ConfigDict(frozen=True)

    mean: float
    se: float
    bound: Optional[float]
    replicas: int
    low_confidence: bool


def estimate_product_expectation(run, bird, tau, t) -> ProductEstimate:
    """
    Estimates E[prod_{s=tau+1}^{t+1} (1 - h sum_j a_lj[s])] and pairs it with
    the contraction bound averaged over the replicas' initial constants.

    Args:
        run (EnsembleRun | EnsembleSpec): Replica data, or a spec to run first.
        bird (int): Bird l >= 2.
        tau (int): Conditioning step.
        t (int): The product runs up to step t + 1 <= T.

    Returns:
        ProductEstimate: Mean, SE, averaged bound (None if inapplicable).
    """
    if isinstance(run, EnsembleSpec):
        run = run_replicas(run)
    samples = run.products(bird, tau, t)
    mean, se = mean_se(samples)
    try:
        bound = float(np.mean([_product_bound(bp, bird, tau, t) for bp in run.bounds]))
    except BoundInapplicable as e:
        logger.info("no bound for bird %d at (%d, %d): %s", bird, tau, t, e)
        bound = None
    if run.replicas < LOW_CONFIDENCE_REPLICAS:
        logger.warning("only %d replicas; estimates are low-confidence", run.replicas)
    return ProductEstimate(
        mean=float(mean),
        se=float(se),
        bound=bound,
        replicas=run.replicas,
        low_confidence=run.replicas < LOW_CONFIDENCE_REPLICAS,
    )


def _series(name, samples):
    mean, se = mean_se(samples)
    n = samples.shape[0]
    return name, [SeriesPoint(t=t, mean=float(m), se=float(s), n=n) for t, (m, s) in enumerate(zip(mean, se))]


def _checkpoints(horizon):
    points, t = [], 1
    while t < horizon:
        points.append(t)
        t *= 2
    return points + [horizon]


def summarize(run: EnsembleRun) -> EnsembleReport:
    """Folds raw replica data into the report, in replica order."""
    spec = run.spec
    config = spec.config
    k, horizon = config.k, spec.horizon
    margin = config.ensemble.margin_se
    sup_v = run.sup_v

    ones = np.ones((run.replicas, 1, k))
    running_products = np.concatenate([ones, np.cumprod(run.factors, axis=1)], axis=1)

    series = {}
    if "speed" in spec.statistics:
        series.update(_series(f"speed[{bird}]", run.speeds[:, :, bird - 1]) for bird in range(1, k + 1))
    if "product" in spec.statistics:
        series.update(_series(f"product[{bird}]", running_products[:, :, bird - 1]) for bird in range(2, k + 1))
    if "sup_norm" in spec.statistics:
        series.update([_series("sup_v", sup_v), _series("sup_x", run.sup_x)])

    q10, q50, q90 = np.quantile(sup_v, [0.1, 0.5, 0.9], axis=0)
    quantiles = [
        QuantilePoint(t=t, q10=float(a), q50=float(b), q90=float(c))
        for t, (a, b, c) in enumerate(zip(q10, q50, q90))
    ]
    mean_sup_v, _ = mean_se(sup_v)
    partial_sums = np.cumsum(mean_sup_v).tolist()

    comparisons, skipped = [], []
    for tau, t in config.ensemble.pairs:
        if t + 1 > horizon or tau > t + 1:
            skipped.append(f"pair ({tau}, {t}) lies outside the horizon {horizon}")
            continue
        for bird in range(2, k + 1):
            samples = run.products(bird, tau, t)
            try:
                bounds = [_product_bound(bp, bird, tau, t) for bp in run.bounds]
                comparisons.append(_compare("product", bird, tau, t, samples, bounds, margin))
            except BoundInapplicable as e:
                skipped.append(f"product bird {bird} ({tau}, {t}): {e}")
            sharp = [lemma2_product_bound(tau, t, bp, bp.h, bp.p, bp.alpha) for bp in run.bounds]
            comparisons.append(_compare("product_sharp", bird, tau, t, samples, sharp, margin))

    try:
        for t in range(1, horizon + 1):
            bounds = [leader_follower_speed_bound(t, bp, bp.h, bp.p, bp.alpha) for bp in run.bounds]
            comparisons.append(_compare("speed", 2, None, t, run.speeds[:, t, 1], bounds, margin))
    except BoundInapplicable as e:
        skipped.append(f"speed bird 2: {e}")

    exceedance = []
    delta = config.ensemble.exceedance_delta
    if delta is not None:
        for t in _checkpoints(horizon):
            exceedance.append(
                ExceedanceRow(
                    t=t,
                    delta=delta,
                    frequency=float(np.mean(sup_v[:, t] >= delta)),
                    markov_bound=markov_exceedance_bound(float(mean_sup_v[t]), delta),
                )
            )

    final_mean, final_se = mean_se(sup_v[:, -1])
    failures = np.flatnonzero(~run.flocking).tolist()
    if failures:
        logger.warning("%d of %d replicas did not flock by T = %d", len(failures), run.replicas, horizon)

    return EnsembleReport(
        replicas=run.replicas,
        horizon=horizon,
        seed=spec.seed,
        low_confidence=run.replicas < LOW_CONFIDENCE_REPLICAS,
        series=series,
        sup_v_quantiles=quantiles,
        partial_sums=partial_sums,
        comparisons=comparisons,
        skipped=skipped,
        exceedance=exceedance,
        flocking_fraction=float(np.mean(run.flocking)),
        flocking_failures=failures,
        final_mean_sup_v=float(final_mean),
        final_mean_sup_v_se=float(final_se),
    )


def run_ensemble(spec: EnsembleSpec) -> EnsembleReport:
    return summarize(run_replicas(spec))
