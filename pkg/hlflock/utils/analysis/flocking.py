import logging
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, computed_field

from hlflock.utils.core.state import Frame
from hlflock.utils.errors import DimensionError

logger = logging.getLogger(__name__)

DEFAULT_EPSILON = 1e-6
DEFAULT_WINDOW = 50


class FlockingVerdict(BaseModel):
    """
    Attributes:
        velocities_vanish (bool): |v[t]|_inf < eps over the whole final window.
        positions_converge (bool): positions settled over the final window.
        limit_positions (list): Estimate of the limit configuration, x[T].
        settled_step (int | None): First step from which |v|_inf stays below eps.
    """

    model_config = ConfigDict(frozen=True)

    velocities_vanish: bool
    positions_converge: bool
    limit_positions: List[List[float]]
    settled_step: Optional[int] = None

    @computed_field
    @property
    def flocking(self) -> bool:
        return self.velocities_vanish and self.positions_converge


# Function to decide whether a finite run shows flocking
def detect_flocking(trajectory, epsilon=DEFAULT_EPSILON, window=DEFAULT_WINDOW) -> FlockingVerdict:
    """
    Reads flocking off the tail of a relative-frame trajectory.

    Velocities vanish when |v[t]|_inf < epsilon for each of the last ``window``
    states; positions converge when every one of those states lies within
    ``epsilon * window * h`` of x[T] in sup norm.

    Args:
        trajectory (Trajectory): Relative-frame run.
        epsilon (float): Velocity tolerance, > 0.
        window (int): Number of final states inspected, >= 1.

    Returns:
        FlockingVerdict: The verdict with x[T] as limit estimate.
    """
    if trajectory.frame is not Frame.RELATIVE:
        raise DimensionError("flocking is read from relative-frame trajectories")
    if epsilon <= 0 or window < 1:
        raise ValueError(f"need epsilon > 0 and window >= 1, got {epsilon}, {window}")
    n_states = trajectory.horizon + 1
    if n_states < window:
        raise DimensionError(f"trajectory has {n_states} states, shorter than the window of {window}")

    sup_v = trajectory.sup_v()
    tail = slice(n_states - window, n_states)
    velocities_vanish = bool(np.all(sup_v[tail] < epsilon))

    final = trajectory.x[-1]
    drift = np.linalg.norm(trajectory.x[tail] - final, axis=2).max(axis=1)
    positions_converge = bool(drift.max() < epsilon * window * trajectory.h)

    below = sup_v < epsilon
    settled_step = None
    if below[-1]:
        # last step that was not below, plus one
        above = np.flatnonzero(~below)
        settled_step = int(above[-1] + 1) if above.size else 0

    return FlockingVerdict(
        velocities_vanish=velocities_vanish,
        positions_converge=positions_converge,
        limit_positions=final.tolist(),
        settled_step=settled_step,
    )


def two_bird_product_oracle(a21, v2_0, h):
    """
    Closed form v_2[t] = prod_{s=1}^{t} (1 - h a_21[s]) v_2[0] of a two-bird flock.

    Args:
        a21 (array-like): Realized a_21[1..T].
        v2_0 (array-like): Relative velocity of bird 2 at t = 0.
        h (float): Timestep.

    Returns:
        np.ndarray: Shape (T + 1, 3); row t is v_2[t].
    """
    a21 = np.asarray(a21, dtype=np.float64)
    v2_0 = np.asarray(v2_0, dtype=np.float64)
    products = np.concatenate(([1.0], np.cumprod(1.0 - h * a21)))
    return products[:, None] * v2_0[None, :]
