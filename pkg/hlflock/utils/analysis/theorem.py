import logging
import math
from enum import Enum
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from hlflock.utils.analysis.bounds import BoundParams
from hlflock.utils.errors import BoundInapplicable

logger = logging.getLogger(__name__)


class TheoremVerdict(str, Enum):
    GUARANTEED_SUBCRITICAL = "GuaranteedSubcritical"
    GUARANTEED_CRITICAL = "GuaranteedCritical"
    # the theorem is silent; this does not mean the flock fails to flock
    NOT_GUARANTEED = "NotGuaranteed"


class ConditionRow(BaseModel):
    """One bird's line of the critical-case condition table."""

    model_config = ConfigDict(frozen=True, ser_json_inf_nan="constants")

    bird: int
    gamma: float
    threshold: float
    holds: bool
    w0: float
    delta: float
    degenerate: bool


def condition_threshold(bird, k):
    """gamma_2 must exceed k - 1; gamma_l, l >= 3, must exceed k - l + 2."""
    return float(k - 1) if bird == 2 else float(k - bird + 2)


def condition_table(bp: BoundParams, k: int) -> List[ConditionRow]:
    rows = []
    for bird in range(2, k + 1):
        threshold = condition_threshold(bird, k)
        gamma = bp.gamma[bird]
        rows.append(
            ConditionRow(
                bird=bird,
                gamma=gamma,
                threshold=threshold,
                holds=gamma > threshold,
                w0=bp.w0[bird],
                delta=bp.delta[bird],
                degenerate=bp.w0[bird] == 0.0,
            )
        )
    return rows


# Function to decide which case of the flocking theorem applies
def check_theorem1(bp: BoundParams, alpha, k) -> TheoremVerdict:
    """
    Args:
        bp (BoundParams): Constants of the flock.
        alpha (float): Certificate exponent.
        k (int): Number of birds.

    Returns:
        TheoremVerdict: Sub-critical when alpha < 1; critical when alpha = 1
        and every gamma clears its threshold; otherwise not guaranteed.
    """
    if alpha < 1.0:
        return TheoremVerdict.GUARANTEED_SUBCRITICAL
    if alpha == 1.0 and all(row.holds for row in condition_table(bp, k)):
        return TheoremVerdict.GUARANTEED_CRITICAL
    return TheoremVerdict.NOT_GUARANTEED


def check_corollary2(v0, p, k) -> bool:
    """True iff v0 < p / (2 (k - 1))."""
    return v0 < p / (2.0 * (k - 1))


def delta_flocking(bp: BoundParams):
    """``{bird: delta_l > 1}``: the first l birds flock when delta_l exceeds 1."""
    return {bird: delta > 1.0 for bird, delta in sorted(bp.delta.items())}


def corollary1_series_term(t, delta_t, bp: BoundParams, h, p, alpha, k):
    """
    delta_t^-1 t^(k-2) exp(-p / ((2 v0)^alpha (1 - alpha)) (h t)^(1-alpha)).

    Accepts scalars or arrays for ``t`` and ``delta_t``.
    """
    if alpha >= 1.0:
        raise BoundInapplicable(f"the series needs alpha < 1, got {alpha}")
    if bp.v0 == 0.0:
        raise BoundInapplicable("v0 = 0: the flock has no relative velocity")
    t = np.asarray(t, dtype=np.float64)
    delta_t = np.asarray(delta_t, dtype=np.float64)
    rate = p / ((2.0 * bp.v0) ** alpha * (1.0 - alpha))
    with np.errstate(divide="ignore", over="ignore"):
        term = t ** (k - 2) * np.exp(-rate * (h * t) ** (1.0 - alpha)) / delta_t
    return float(term) if term.ndim == 0 else term


class SeriesDiagnosis(BaseModel):
    model_config = ConfigDict(frozen=True, ser_json_inf_nan="constants")

    converged: bool
    partial_sum: float
    terms: int
    last_block_ratio: Optional[float]


def corollary1_series(delta, bp: BoundParams, h, p, alpha, k, block=10, rtol=1e-6, cap=100_000) -> SeriesDiagnosis:
    """
    Sums ``corollary1_series_term`` block by block.

    The series is declared convergent once the latest ``block`` terms add less
    than ``rtol`` of the running sum; reaching ``cap`` terms first is reported
    as non-convergence.

    Args:
        delta (callable | float): ``delta(t)`` vectorized over t = 1, 2, ...,
            or a constant.
        bp (BoundParams): Constants of the flock.
        h, p, alpha (float): Run parameters, alpha < 1.
        k (int): Number of birds.
        block (int): Terms per block.
        rtol (float): Relative contribution below which summing stops.
        cap (int): Maximum number of terms.

    Returns:
        SeriesDiagnosis: Verdict, partial sum and terms used.
    """
    t = np.arange(1, cap + 1, dtype=np.float64)
    delta_t = delta(t) if callable(delta) else np.full_like(t, float(delta))
    terms = corollary1_series_term(t, delta_t, bp, h, p, alpha, k)
    n_blocks = cap // block
    blocks = terms[: n_blocks * block].reshape(n_blocks, block).sum(axis=1)
    partials = np.cumsum(blocks)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(partials > 0.0, blocks / partials, 0.0)

    finite = np.isfinite(partials)
    settled = np.flatnonzero(finite & (ratios < rtol))
    broken = np.flatnonzero(~finite)
    if settled.size and (not broken.size or settled[0] < broken[0]):
        i = int(settled[0])
        return SeriesDiagnosis(
            converged=True, partial_sum=float(partials[i]), terms=(i + 1) * block, last_block_ratio=float(ratios[i])
        )
    if broken.size:
        i = int(broken[0])
        return SeriesDiagnosis(converged=False, partial_sum=float(partials[i]), terms=(i + 1) * block, last_block_ratio=None)
    logger.info("series still growing after %d terms (last block ratio %g)", cap, ratios[-1])
    return SeriesDiagnosis(
        converged=False, partial_sum=float(partials[-1]), terms=n_blocks * block, last_block_ratio=float(ratios[-1])
    )


def markov_exceedance_bound(mean_sup_v, delta):
    """P(|v[t]|_inf >= delta) <= E|v[t]|_inf / delta, capped at 1."""
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta}")
    return min(1.0, mean_sup_v / delta)
