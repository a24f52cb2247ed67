import logging
from dataclasses import dataclass

import numpy as np

from hlflock.utils.core.diagnostics import PathwiseMonitor
from hlflock.utils.core.dynamics import step, validate_hierarchy
from hlflock.utils.core.state import FlockState, Frame, Hierarchy, WeightMatrix
from hlflock.utils.errors import DimensionError
from hlflock.utils.interactions.rng import RngStream
from hlflock.utils.interactions.sampler import sample_weights

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """
    A whole run: every state and every realized weight matrix.

    Attributes:
        h (float): Timestep.
        hierarchy (Hierarchy): Leader sets of the flock.
        frame (Frame): Frame of all stored states.
        x (np.ndarray): Positions, shape (T + 1, k, 3).
        v (np.ndarray): Velocities, shape (T + 1, k, 3).
        a (np.ndarray): Weights, shape (T, k, k); ``a[t - 1]`` drove step t.
    """

    h: float
    hierarchy: Hierarchy
    frame: Frame
    x: np.ndarray
    v: np.ndarray
    a: np.ndarray

    @property
    def horizon(self):
        return self.a.shape[0]

    @property
    def k(self):
        return self.x.shape[1]

    def state(self, t):
        return FlockState(t=t, x=self.x[t], v=self.v[t], frame=self.frame)

    def weights(self, t):
        return WeightMatrix(t=t, a=self.a[t - 1])

    def states(self):
        return [self.state(t) for t in range(self.horizon + 1)]

    def speeds(self):
        """|v_l[t]| for every step and bird, shape (T + 1, k)."""
        return np.linalg.norm(self.v, axis=2)

    def sup_v(self):
        return self.speeds().max(axis=1)

    def sup_x(self):
        return np.linalg.norm(self.x, axis=2).max(axis=1)


# Function to integrate one trajectory
def simulate(initial: FlockState, hier: Hierarchy, model, h: float, horizon: int, stream: RngStream, monitor=True) -> Trajectory:
    """
    Integrates ``horizon`` steps, drawing the weights of step t + 1 from the
    state at time t.

    Args:
        initial (FlockState): State at t = 0, either frame.
        hier (Hierarchy): Leader sets; must pass ``validate_hierarchy``.
        model (InteractionModel): Weight kernel.
        h (float): Timestep, 0 < h <= 1/(k-1).
        horizon (int): Number of steps T >= 1.
        stream (RngStream): Random stream of this replica.
        monitor (bool): Check the pathwise properties after every step.

    Returns:
        Trajectory: All T + 1 states and T weight matrices.
    """
    verdict = validate_hierarchy(hier)
    if not verdict:
        raise DimensionError(f"invalid hierarchy: {verdict.reason}")
    if hier.k != initial.k:
        raise DimensionError(f"hierarchy has {hier.k} birds but the state has {initial.k}")
    if horizon < 1:
        raise DimensionError(f"horizon must be at least 1, got {horizon}")
    if initial.t != 0:
        raise DimensionError(f"simulations start at t = 0, got t = {initial.t}")

    k = initial.k
    x = np.empty((horizon + 1, k, 3), dtype=np.float64)
    v = np.empty((horizon + 1, k, 3), dtype=np.float64)
    a = np.empty((horizon, k, k), dtype=np.float64)
    x[0], v[0] = initial.x, initial.v

    watcher = PathwiseMonitor(initial, h) if monitor else None
    state = initial
    for t in range(1, horizon + 1):
        weights = sample_weights(model, state, hier, stream)
        state = step(state, weights, h, hier)
        if watcher is not None:
            watcher.observe(state)
        x[t], v[t], a[t - 1] = state.x, state.v, weights.a

    logger.debug("simulated %d steps of a %d-bird flock (replica %d)", horizon, k, stream.replica)
    for array in (x, v, a):
        array.setflags(write=False)
    return Trajectory(h=h, hierarchy=hier, frame=initial.frame, x=x, v=v, a=a)
