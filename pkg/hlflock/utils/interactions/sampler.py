import logging

import numpy as np

from hlflock.utils.core.state import FlockState, Hierarchy, WeightMatrix
from hlflock.utils.errors import DimensionError
from hlflock.utils.interactions.kernels import cs_weight, decay
from hlflock.utils.interactions.rng import RngStream

logger = logging.getLogger(__name__)


def pairwise_distances(x):
    """(k, k) matrix of Euclidean distances between the rows of ``x``."""
    diff = x[:, None, :] - x[None, :, :]
    return np.linalg.norm(diff, axis=2)


# Function to draw the weights of the next step
def sample_weights(model, state: FlockState, hier: Hierarchy, rng: RngStream) -> WeightMatrix:
    """
    Realizes a_ij[t+1] for every j in L(i) from the state at time t.

    Distances come from pairwise differences, which are the same in both
    frames. Random kinds draw from the (replica, t+1) blocks of ``rng``.

    Args:
        model (InteractionModel): Kernel parameters.
        state (FlockState): State at time t.
        hier (Hierarchy): Leader sets; the output is supported on them.
        rng (RngStream): Stream family of the current replica.

    Returns:
        WeightMatrix: Weights tagged t + 1.
    """
    if hier.k != state.k:
        raise DimensionError(f"hierarchy has {hier.k} birds but the state has {state.k}")
    k = state.k
    t = state.t + 1
    d = pairwise_distances(state.x)

    if model.kind == "deterministic_cs":
        a = cs_weight(d, model.K, model.sigma, model.beta)
    elif model.kind == "power_law":
        a = decay(d, model.alpha)
    elif model.kind == "bernoulli_failure":
        present = rng.link_uniforms(t, k) < model.p
        a = np.where(present, decay(d, model.alpha), 0.0)
    elif model.kind == "scaled_random":
        a = rng.scale_variates(t, k, model.variate) * decay(d, model.alpha)
    elif model.kind == "random_environment":
        present = rng.link_uniforms(t, k) < decay(d, model.alpha)
        a = np.where(present, model.p, 0.0)
    else:
        raise ValueError(f"unsupported interaction model: {model.kind}")

    a = np.where(hier.mask, a, 0.0)
    return WeightMatrix(t=t, a=a)
