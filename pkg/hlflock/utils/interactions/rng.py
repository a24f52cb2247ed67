"""
Counter-based random streams.

Every block of variates is addressed by (seed, replica, t, channel) and drawn
from a freshly keyed Philox generator, so a draw never depends on which other
blocks were drawn before it. Inside a link block the variate of pair (i, j),
j < i, sits at the triangular index (i-1)(i-2)/2 + (j-1); it therefore does not
depend on the flock size either.
"""

from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from hlflock.utils.hash import mix_seed


class Channel(IntEnum):
    LINKS = 0
    SCALES = 1
    POSITIONS = 2
    VELOCITIES = 3


@dataclass(frozen=True)
class RngStream:
    """
    Stream family of one replica.

    Attributes:
        seed (int): Master seed, unsigned 64-bit.
        replica (int): Replica index; 0 for single runs.
    """

    seed: int
    replica: int = 0
    key: int = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "key", mix_seed(self.seed, self.replica))

    def for_replica(self, replica):
        return RngStream(seed=self.seed, replica=replica)

    def generator(self, t, channel=Channel.LINKS):
        if t < 0:
            raise ValueError(f"step index must be non-negative, got {t}")
        counter = np.array([0, t, int(channel), 0], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=self.key, counter=counter))

    def pair_block(self, t, k, draw):
        """
        Lays out one draw per ordered pair j < i as a (k, k) lower-triangular array.

        Args:
            t (int): Step coordinate.
            k (int): Number of birds.
            draw (callable): ``draw(n)`` returning n variates in pair order.

        Returns:
            np.ndarray: ``out[i-1, j-1]`` holds the variate of pair (i, j); zero elsewhere.
        """
        rows, cols = np.tril_indices(k, -1)
        out = np.zeros((k, k), dtype=np.float64)
        out[rows, cols] = draw(rows.size)
        return out

    def link_uniforms(self, t, k):
        generator = self.generator(t, Channel.LINKS)
        return self.pair_block(t, k, generator.random)

    def scale_variates(self, t, k, variate):
        generator = self.generator(t, Channel.SCALES)
        return self.pair_block(t, k, lambda n: variate.sample(generator, n))
