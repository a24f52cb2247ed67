"""
Derived constants and the closed-form contraction bounds.

For a relative initial state with x0 = |x[0]|_inf and v0 = |v[0]|_inf:

    A0 = 1 + 2 x0,  B0 = 2 h v0,  kappa = h p / ((1 - alpha) B0)
    w0_l = min_{j in L(l)} |v_l[0] - v_j[0]|
    gamma_l = sum_{j in L(l)} p / |v_l[0] - v_j[0]|      (1/0 = inf)
    delta_2 = gamma_2,  delta_l = min(delta_{l-1}, gamma_l) - 1

kappa is taken positive so that exp(-kappa (...)) decays.
"""

import logging
import math
from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from hlflock.utils.core.state import FlockState, Frame, Hierarchy
from hlflock.utils.errors import BoundInapplicable, DegenerateBound, DimensionError

logger = logging.getLogger(__name__)


class BoundParams(BaseModel):
    """
    Constants feeding every bound. Per-bird maps are keyed by 1-based label
    and cover birds 2..k.
    """

    model_config = ConfigDict(frozen=True, ser_json_inf_nan="constants")

    k: int
    h: float
    p: float
    alpha: float
    x0: float
    v0: float
    A0: float
    B0: float
    kappa: Optional[float] = None
    w0: Dict[int, float]
    gamma: Dict[int, float]
    delta: Dict[int, float]
    speeds: Dict[int, float]

    @property
    def kappa_defined(self):
        return self.kappa is not None

    @property
    def degenerate(self) -> List[int]:
        """Birds whose gap to some leader is zero (w0 = 0, gamma = inf)."""
        return [bird for bird, w in sorted(self.w0.items()) if w == 0.0]


# Function to derive the bound constants of a flock
def derive_bound_params(initial: FlockState, hier: Hierarchy, h, p, alpha) -> BoundParams:
    """
    Computes A0, B0, kappa and the per-bird w0, gamma and delta.

    Args:
        initial (FlockState): Relative-frame state at t = 0.
        hier (Hierarchy): Leader sets.
        h (float): Timestep.
        p (float): Certificate level in (0, 1].
        alpha (float): Certificate exponent, >= 0.

    Returns:
        BoundParams: The derived constants.
    """
    if initial.frame is not Frame.RELATIVE:
        raise DimensionError("bound constants are defined on the relative frame")
    if hier.k != initial.k:
        raise DimensionError(f"hierarchy has {hier.k} birds but the state has {initial.k}")

    x0 = float(np.max(np.linalg.norm(initial.x, axis=1)))
    v0 = float(np.max(np.linalg.norm(initial.v, axis=1)))
    A0 = 1.0 + 2.0 * x0
    B0 = 2.0 * h * v0
    kappa = h * p / ((1.0 - alpha) * B0) if alpha < 1.0 and B0 > 0.0 else None

    w0, gamma, delta, speeds = {}, {}, {}, {}
    for bird in range(2, hier.k + 1):
        gaps = [float(np.linalg.norm(initial.velocity(bird) - initial.velocity(j))) for j in hier.leaders_of(bird)]
        w0[bird] = min(gaps)
        gamma[bird] = sum(math.inf if gap == 0.0 else p / gap for gap in gaps)
        if bird == 2:
            delta[bird] = gamma[bird]
        else:
            delta[bird] = min(delta[bird - 1], gamma[bird]) - 1.0
        speeds[bird] = float(np.linalg.norm(initial.velocity(bird)))

    params = BoundParams(
        k=hier.k, h=h, p=p, alpha=alpha, x0=x0, v0=v0, A0=A0, B0=B0, kappa=kappa,
        w0=w0, gamma=gamma, delta=delta, speeds=speeds,
    )
    if params.degenerate:
        logger.info("birds %s share a leader's initial velocity (gamma = inf)", params.degenerate)
    return params


def _check_window(tau, t):
    if tau < 0 or t < 0 or tau > t + 1:
        raise ValueError(f"need 0 <= tau <= t + 1, got tau={tau}, t={t}")


def lemma2_bound_subcritical(tau, t, bp: BoundParams, h, p, alpha):
    """
    exp[-kappa ((A0 + B0 t)^(1-alpha) - (A0 + B0 tau)^(1-alpha))], bounding
    E[prod_{s=tau+1}^{t+1} (1 - h sum_j a_lj[s]) | F_tau] for alpha < 1.

    ``tau = t + 1`` is the empty product and returns 1.
    """
    _check_window(tau, t)
    if alpha >= 1.0:
        raise BoundInapplicable(f"sub-critical bound needs alpha < 1, got {alpha}")
    if bp.B0 == 0.0:
        raise BoundInapplicable("B0 = 0: the flock has no relative velocity, flocking is trivial")
    if tau > t:
        return 1.0
    kappa = h * p / ((1.0 - alpha) * bp.B0)
    exponent = (bp.A0 + bp.B0 * t) ** (1.0 - alpha) - (bp.A0 + bp.B0 * tau) ** (1.0 - alpha)
    return math.exp(-kappa * exponent)


def lemma2_bound_critical(tau, t, bp: BoundParams, h, bird):
    """
    ((A0 + h w0 tau) / (A0 + h w0 (t + 1)))^gamma for alpha = 1.

    Raises DegenerateBound when w0 = 0. An infinite gamma with w0 > 0 (an
    overflowed sum) gives 0 for every non-empty product.
    """
    _check_window(tau, t)
    w = bp.w0[bird]
    if w == 0.0:
        raise DegenerateBound(bird)
    if tau > t:
        return 1.0
    gamma = bp.gamma[bird]
    if math.isinf(gamma):
        logger.debug("gamma of bird %d is infinite; bound collapses to 0", bird)
        return 0.0
    ratio = (bp.A0 + h * w * tau) / (bp.A0 + h * w * (t + 1))
    return ratio**gamma


def lemma2_product_bound(tau, t, bp: BoundParams, h, p, alpha):
    """
    prod_{s=tau}^{t} (1 - h p / (A0 + B0 s)^alpha): the step-by-step bound the
    exponential form is integrated from. Holds for every alpha >= 0.
    """
    _check_window(tau, t)
    if tau > t:
        return 1.0
    s = np.arange(tau, t + 1, dtype=np.float64)
    factors = 1.0 - h * p / (bp.A0 + bp.B0 * s) ** alpha
    return float(np.prod(factors))


def leader_follower_speed_bound(t, bp: BoundParams, h, p, alpha, speed0=None):
    """
    Bound on E|v_2[t]| for the first follower.

    alpha < 1: |v_2[0]| exp[kappa A0^(1-alpha)] exp[-kappa (A0 + B0 (t-1))^(1-alpha)];
    alpha = 1: |v_2[0]| (A0 / (A0 + h w0_2 t))^gamma_2. At t = 0 both are |v_2[0]|.

    Args:
        t (int): Step, >= 0.
        bp (BoundParams): Constants of the flock.
        h, p, alpha (float): Run parameters.
        speed0 (float, optional): |v_2[0]|; defaults to the value in ``bp``.

    Returns:
        float: The bound.
    """
    speed0 = bp.speeds[2] if speed0 is None else speed0
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}")
    if t == 0 or speed0 == 0.0:
        return speed0
    if alpha < 1.0:
        if bp.B0 == 0.0:
            return speed0
        kappa = h * p / ((1.0 - alpha) * bp.B0)
        exponent = (bp.A0 + bp.B0 * (t - 1)) ** (1.0 - alpha) - bp.A0 ** (1.0 - alpha)
        return speed0 * math.exp(-kappa * exponent)
    if alpha == 1.0:
        w = bp.w0[2]
        if w == 0.0:
            raise DegenerateBound(2)
        return speed0 * (bp.A0 / (bp.A0 + h * w * t)) ** bp.gamma[2]
    raise BoundInapplicable(f"no speed bound for alpha = {alpha} > 1")
