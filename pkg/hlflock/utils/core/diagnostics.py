"""
Pathwise properties every trajectory must satisfy.

With x0 = |x[0]|_inf and v0 = |v[0]|_inf, in either frame:

- the velocity sup norm never increases;
- |x[t]|_inf <= x0 + h v0 t;
- max_ij |x_i[t] - x_j[t]| <= 2 x0 + 2 h v0 t;
- bird 1 keeps its initial velocity (zero in the relative frame).
"""

import logging
from dataclasses import dataclass

import numpy as np

from hlflock.utils.core.dynamics import sup_norm
from hlflock.utils.errors import InvariantBreach

logger = logging.getLogger(__name__)

RELATIVE_TOLERANCE = 1e-12
EPS = np.finfo(np.float64).eps


def monotonicity_tolerance(v0):
    return RELATIVE_TOLERANCE * max(1.0, v0)


def growth_tolerance(bound, t):
    # positions accumulate one rounding per step
    return (RELATIVE_TOLERANCE + 4.0 * EPS * t) * max(1.0, bound)


def spread(x):
    """Largest distance between two birds."""
    diff = x[:, None, :] - x[None, :, :]
    return float(np.max(np.linalg.norm(diff, axis=2)))


class PathwiseMonitor:
    """
    Checks each new state of one trajectory against the pathwise properties.

    Args:
        initial (FlockState): State at t = 0.
        h (float): Timestep of the run.
    """

    def __init__(self, initial, h):
        self.h = h
        self.x0 = sup_norm(initial.x)
        self.v0 = sup_norm(initial.v)
        self.leader_velocity = initial.v[0].copy()
        self.last_sup_v = self.v0

    def observe(self, state):
        t = state.t
        sup_v = sup_norm(state.v)
        if sup_v > self.last_sup_v + monotonicity_tolerance(self.v0):
            raise InvariantBreach(
                f"velocity sup norm grew from {self.last_sup_v!r} to {sup_v!r}", t
            )
        self.last_sup_v = sup_v

        reach = self.x0 + self.h * self.v0 * t
        sup_x = sup_norm(state.x)
        if sup_x > reach + growth_tolerance(reach, t):
            raise InvariantBreach(f"position sup norm {sup_x!r} exceeds x0 + h v0 t = {reach!r}", t)
        width = spread(state.x)
        if width > 2.0 * reach + growth_tolerance(2.0 * reach, t):
            raise InvariantBreach(f"flock spread {width!r} exceeds 2 x0 + 2 h v0 t = {2.0 * reach!r}", t)

        if np.any(state.v[0] != self.leader_velocity):
            raise InvariantBreach("bird 1 changed its velocity", t)


@dataclass(frozen=True)
class Lemma1Report:
    """
    Pass flags and the smallest slack (bound minus observed) of each property.
    A negative slack within tolerance still passes.
    """

    velocity_monotone: bool
    position_growth: bool
    spread_growth: bool
    worst_velocity_slack: float
    worst_position_slack: float
    worst_spread_slack: float

    @property
    def passed(self):
        return self.velocity_monotone and self.position_growth and self.spread_growth


def check_lemma1(trajectory):
    """
    Evaluates the pathwise properties on a whole trajectory without raising.

    Args:
        trajectory (Trajectory): A simulated run, either frame.

    Returns:
        Lemma1Report: Flags and worst slacks.
    """
    sup_v = trajectory.sup_v()
    sup_x = trajectory.sup_x()
    widths = np.array([spread(x) for x in trajectory.x])
    t = np.arange(trajectory.horizon + 1, dtype=np.float64)
    x0, v0 = sup_x[0], sup_v[0]
    reach = x0 + trajectory.h * v0 * t

    velocity_slack = sup_v[:-1] - sup_v[1:]
    position_slack = reach - sup_x
    spread_slack = 2.0 * reach - widths
    tol_v = monotonicity_tolerance(v0)
    tol_x = (RELATIVE_TOLERANCE + 4.0 * EPS * t) * np.maximum(1.0, reach)

    return Lemma1Report(
        velocity_monotone=bool(np.all(velocity_slack >= -tol_v)),
        position_growth=bool(np.all(position_slack >= -tol_x)),
        spread_growth=bool(np.all(spread_slack >= -2.0 * tol_x)),
        worst_velocity_slack=float(velocity_slack.min()) if velocity_slack.size else 0.0,
        worst_position_slack=float(position_slack.min()),
        worst_spread_slack=float(spread_slack.min()),
    )


def contraction_factors(trajectory):
    """
    Per-step contraction factors 1 - h * sum_{j in L(l)} a_lj[s].

    Returns:
        np.ndarray: Shape (T, k); row s - 1 holds step s. Bird 1's column is 1.
    """
    return 1.0 - trajectory.h * trajectory.a.sum(axis=2)


def pathwise_decomposition_bound(trajectory, bird):
    """
    Right-hand side of the iterated inequality for one bird:
    prod_s (1 - h a[s]) |v_l[0]| + sum_tau |b[tau]| prod_{s > tau} (1 - h a[s]),
    with b[tau] = h sum_j a_lj[tau] v_j[tau - 1].

    Args:
        trajectory (Trajectory): A simulated run.
        bird (int): 1-based bird label.

    Returns:
        np.ndarray: Shape (T + 1,); entry t bounds |v_l[t]|.
    """
    row = bird - 1
    factors = contraction_factors(trajectory)[:, row]
    a = trajectory.a[:, row, :]
    drift = trajectory.h * np.einsum("sj,sjc->sc", a, trajectory.v[:-1])
    drift_norm = np.linalg.norm(drift, axis=1)

    bound = np.empty(trajectory.horizon + 1, dtype=np.float64)
    bound[0] = np.linalg.norm(trajectory.v[0, row])
    for s in range(1, trajectory.horizon + 1):
        bound[s] = factors[s - 1] * bound[s - 1] + drift_norm[s - 1]
    return bound
