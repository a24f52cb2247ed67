import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from hlflock.utils.core.state import FlockState, Frame, Hierarchy, WeightMatrix
from hlflock.utils.errors import DimensionError, InvariantBreach

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HierarchyVerdict:
    """
    Outcome of checking the two HL-flock conditions.

    Attributes:
        valid (bool): Both conditions hold.
        bird (int | None): First violating bird (1-based), if any.
        reason (str): Human-readable explanation, empty when valid.
    """

    valid: bool
    bird: Optional[int] = None
    reason: str = ""

    def __bool__(self):
        return self.valid


# Function to validate the leader structure of a flock
def validate_hierarchy(hier: Hierarchy) -> HierarchyVerdict:
    """
    Checks that every leader has a smaller label and that every bird but the
    first watches somebody.

    Args:
        hier (Hierarchy): The leader sets to check.

    Returns:
        HierarchyVerdict: Acceptance, or the first violating bird and why.
    """
    if hier.k < 2:
        return HierarchyVerdict(False, 1, "a flock needs at least two birds")
    if hier.leaders_of(1):
        return HierarchyVerdict(False, 1, "bird 1 is the overall leader and watches nobody")
    for i in range(2, hier.k + 1):
        leaders = hier.leaders_of(i)
        if not leaders:
            return HierarchyVerdict(False, i, f"bird {i} has an empty leader set")
        if len(set(leaders)) != len(leaders):
            return HierarchyVerdict(False, i, f"bird {i} lists a leader twice")
        for j in leaders:
            if not 1 <= j < i:
                return HierarchyVerdict(
                    False, i, f"bird {i} watches bird {j}, but leaders must have labels 1..{i - 1}"
                )
    return HierarchyVerdict(True)


def sup_norm(vectors) -> float:
    """Largest Euclidean norm among the birds' 3-vectors."""
    array = np.asarray(vectors, dtype=np.float64)
    if array.ndim != 2 or array.shape[0] == 0 or array.shape[1] != 3:
        raise DimensionError(f"expected a non-empty (k, 3) array, got shape {array.shape}")
    return float(np.max(np.linalg.norm(array, axis=1)))


def max_timestep(k):
    return 1.0 / (k - 1)


def step(state: FlockState, weights: WeightMatrix, h: float, hierarchy: Optional[Hierarchy] = None) -> FlockState:
    """
    Advances the flock by one step.

    Velocities move to the convex combination
    ``(1 - h * sum_j a_ij) v_i + h * sum_j a_ij v_j``; positions advance with
    the velocities held at time ``t``. The same recursion holds in both frames.

    Args:
        state (FlockState): State at time t.
        weights (WeightMatrix): Coefficients tagged t + 1.
        h (float): Timestep, 0 < h <= 1/(k-1).
        hierarchy (Hierarchy, optional): When given, the weights' support is
            checked against it.

    Returns:
        FlockState: State at time t + 1, same frame.
    """
    k = state.k
    if not h > 0.0:
        raise DimensionError(f"timestep must be positive, got {h}")
    if h > max_timestep(k):
        raise DimensionError(
            f"timestep {h} exceeds 1/(k-1) = {max_timestep(k)}; the update would not be a convex combination"
        )
    if weights.k != k:
        raise DimensionError(f"weights are {weights.k}x{weights.k} but the flock has {k} birds")
    if weights.t != state.t + 1:
        raise DimensionError(f"weights tagged t={weights.t} cannot drive state t={state.t}")
    if hierarchy is not None:
        problem = weights.problems(hierarchy)
        if problem is not None:
            raise DimensionError(problem)

    a = weights.a
    keep = 1.0 - h * a.sum(axis=1)
    if np.any(keep < 0.0) or np.any(keep > 1.0):
        bird = int(np.argmax((keep < 0.0) | (keep > 1.0))) + 1
        raise InvariantBreach(f"self-weight of bird {bird} is {keep[bird - 1]}, outside [0, 1]", weights.t)

    v_next = keep[:, None] * state.v + h * (a @ state.v)
    x_next = state.x + h * state.v
    return FlockState(t=state.t + 1, x=x_next, v=v_next, frame=state.frame)


def to_relative(state: FlockState) -> FlockState:
    """Moves the origin onto bird 1: x_i - x_1[t], v_i - v_1[0]."""
    if state.frame is Frame.RELATIVE:
        raise DimensionError("state is already in the relative frame")
    return FlockState(
        t=state.t,
        x=state.x - state.x[0],
        v=state.v - state.v[0],
        frame=Frame.RELATIVE,
    )


def to_absolute(state: FlockState, x1_origin, v1_origin, h: float) -> FlockState:
    """
    Inverse of ``to_relative`` given bird 1's initial position and velocity.

    Bird 1 moves with constant velocity, so at step t it sits at
    ``x1_origin + h * t * v1_origin``.
    """
    if state.frame is Frame.ABSOLUTE:
        raise DimensionError("state is already in the absolute frame")
    x1 = np.asarray(x1_origin, dtype=np.float64)
    v1 = np.asarray(v1_origin, dtype=np.float64)
    if x1.shape != (3,) or v1.shape != (3,):
        raise DimensionError("origin position and velocity must be 3-vectors")
    return FlockState(
        t=state.t,
        x=state.x + (x1 + h * state.t * v1),
        v=state.v + v1,
        frame=Frame.ABSOLUTE,
    )
