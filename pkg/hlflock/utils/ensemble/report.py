from typing import Dict, List, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict


class _Report(BaseModel):
    model_config = ConfigDict(frozen=True, ser_json_inf_nan="constants")


class SeriesPoint(_Report):
    t: int
    mean: float
    se: float
    n: int


class QuantilePoint(_Report):
    t: int
    q10: float
    q50: float
    q90: float


class BoundComparison(_Report):
    """
    Empirical mean of a statistic against its theoretical bound.

    ``passed`` iff mean <= bound + margin * se (plus a rounding allowance).
    ``margin_se`` is (bound - mean) / se, None when se = 0.
    """

    statistic: str
    bird: int
    tau: Optional[int] = None
    t: int
    mean: float
    se: float
    bound: float
    margin_se: Optional[float] = None
    passed: bool


class ExceedanceRow(_Report):
    t: int
    delta: float
    frequency: float
    markov_bound: float


class EnsembleReport(_Report):
    replicas: int
    horizon: int
    seed: int
    low_confidence: bool
    series: Dict[str, List[SeriesPoint]]
    sup_v_quantiles: List[QuantilePoint]
    partial_sums: List[float]
    comparisons: List[BoundComparison]
    skipped: List[str]
    exceedance: List[ExceedanceRow]
    flocking_fraction: float
    flocking_failures: List[int]
    final_mean_sup_v: float
    final_mean_sup_v_se: float

    @property
    def all_passed(self):
        return all(row.passed for row in self.comparisons)

    def comparison(self, statistic, bird, t, tau=None):
        for row in self.comparisons:
            if row.statistic == statistic and row.bird == bird and row.t == t and row.tau == tau:
                return row
        raise KeyError((statistic, bird, tau, t))

    def series_frame(self) -> pd.DataFrame:
        """Long table: statistic, t, mean, se, n."""
        rows = [
            {"statistic": name, **point.model_dump()}
            for name, points in self.series.items()
            for point in points
        ]
        return pd.DataFrame(rows, columns=["statistic", "t", "mean", "se", "n"])


def mean_se(samples):
    """
    Sample mean and standard error over axis 0.

    Columns whose samples are all identical get exactly that value and SE 0.
    """
    samples = np.asarray(samples, dtype=np.float64)
    n = samples.shape[0]
    mean = samples.mean(axis=0)
    constant = np.all(samples == samples[0], axis=0)
    mean = np.where(constant, samples[0], mean)
    if n < 2:
        return mean, np.zeros_like(mean)
    se = samples.std(axis=0, ddof=1) / np.sqrt(n)
    return mean, np.where(constant, 0.0, se)
