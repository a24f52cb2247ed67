import json

import numpy as np
import pytest

from hlflock.utils.core.state import FlockState, Frame, Hierarchy
from hlflock.utils.interactions.models import (
    BernoulliFailure,
    DeterministicCS,
    PowerLaw,
    RandomEnvironment,
    ScaledRandom,
)

# One admissible model of every kind, at moderate decay.
MODELS = {
    "deterministic_cs": DeterministicCS(K=1.0, sigma=1.0, beta=0.5),
    "power_law": PowerLaw(alpha=0.5),
    "bernoulli_failure": BernoulliFailure(p=0.5, alpha=0.5),
    "scaled_random": ScaledRandom(p=0.5, alpha=0.5),
    "random_environment": RandomEnvironment(p=0.7, alpha=1.0),
}


def relative_state(velocities, positions=None, t=0):
    """Relative-frame state from follower rows; bird 1 is prepended at rest."""
    v = np.vstack([np.zeros(3), np.asarray(velocities, dtype=np.float64)])
    x = np.zeros_like(v) if positions is None else np.vstack([np.zeros(3), np.asarray(positions, dtype=np.float64)])
    return FlockState(t=t, x=x, v=v, frame=Frame.RELATIVE)


@pytest.fixture
def two_birds():
    return Hierarchy.chain(2)


@pytest.fixture
def config_data():
    """Factory for a small valid configuration mapping."""

    def make(**overrides):
        data = {
            "k": 2,
            "h": 0.5,
            "horizon": 60,
            "seed": 7,
            "hierarchy": {"preset": "chain"},
            "model": {"kind": "bernoulli_failure", "p": 0.5, "alpha": 0.5},
            "initial": {"mode": "sampled", "box_side": 1.0, "speed": 0.5},
        }
        data.update(overrides)
        return data

    return make


@pytest.fixture
def write_config(tmp_path):
    """Writes a configuration mapping to a JSON file and returns its path."""

    def write(data, name="flock.json"):
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return str(path)

    return write
