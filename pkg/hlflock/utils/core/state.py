"""
State types of an HL-flock: positions/velocities, the leader structure and
one step's realized interaction weights.

Bird indices are 1-based at every public interface. Arrays are stored
0-based, so bird ``i`` lives in row ``i - 1``.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
import numpy.typing as npt

from hlflock.utils.errors import DimensionError

Vec3 = npt.NDArray[np.float64]


class Frame(str, Enum):
    ABSOLUTE = "absolute"
    RELATIVE = "relative"


def _frozen_array(values, name):
    array = np.array(values, dtype=np.float64)
    if array.ndim != 2 or array.shape[1] != 3:
        raise DimensionError(f"{name} must have shape (k, 3), got {array.shape}")
    if not np.all(np.isfinite(array)):
        raise DimensionError(f"{name} contains non-finite entries")
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class FlockState:
    """
    Immutable snapshot of k birds in 3-space at step ``t``.

    Attributes:
        t (int): Step index, non-negative.
        x (np.ndarray): Positions, shape (k, 3).
        v (np.ndarray): Velocities, shape (k, 3).
        frame (Frame): Absolute coordinates, or relative to bird 1.
    """

    t: int
    x: Vec3
    v: Vec3
    frame: Frame = Frame.ABSOLUTE

    def __post_init__(self):
        if self.t < 0:
            raise DimensionError(f"step index must be non-negative, got {self.t}")
        x = _frozen_array(self.x, "positions")
        v = _frozen_array(self.v, "velocities")
        if x.shape != v.shape:
            raise DimensionError(
                f"positions {x.shape} and velocities {v.shape} differ in shape"
            )
        if x.shape[0] < 2:
            raise DimensionError("a flock needs at least two birds")
        frame = Frame(self.frame)
        if frame is Frame.RELATIVE and (np.any(x[0] != 0.0) or np.any(v[0] != 0.0)):
            raise DimensionError("relative frame requires bird 1 at the origin at rest")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "frame", frame)

    @property
    def k(self):
        return self.x.shape[0]

    def position(self, bird):
        return self.x[bird - 1]

    def velocity(self, bird):
        return self.v[bird - 1]


@dataclass(frozen=True)
class Hierarchy:
    """
    Leader sets L(i) of an HL-flock.

    ``leaders[i - 1]`` is the ordered tuple L(i); ``leaders[0]`` is L(1) and
    must be empty. Construction does not validate; see
    ``dynamics.validate_hierarchy``.
    """

    k: int
    leaders: Tuple[Tuple[int, ...], ...]
    _mask: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        leaders = tuple(tuple(int(j) for j in row) for row in self.leaders)
        if len(leaders) != self.k:
            raise DimensionError(
                f"expected leader sets for {self.k} birds, got {len(leaders)}"
            )
        object.__setattr__(self, "leaders", leaders)
        mask = np.zeros((self.k, self.k), dtype=bool)
        for i, row in enumerate(leaders):
            for j in row:
                if 1 <= j <= self.k:
                    mask[i, j - 1] = True
        mask.setflags(write=False)
        object.__setattr__(self, "_mask", mask)

    @classmethod
    def from_mapping(cls, k, mapping: Dict[int, Sequence[int]]):
        """Builds a hierarchy from ``{bird: leaders}``; unnamed birds get L = {}."""
        outside = sorted(bird for bird in mapping if not 1 <= bird <= k)
        if outside:
            raise DimensionError(f"leader sets name bird {outside[0]}, but the flock has birds 1..{k}")
        rows = [tuple(mapping.get(i, ())) for i in range(1, k + 1)]
        return cls(k=k, leaders=tuple(rows))

    @classmethod
    def chain(cls, k):
        return cls.from_mapping(k, {i: (i - 1,) for i in range(2, k + 1)})

    @classmethod
    def star(cls, k):
        return cls.from_mapping(k, {i: (1,) for i in range(2, k + 1)})

    def leaders_of(self, bird):
        return self.leaders[bird - 1]

    @property
    def mask(self):
        """Boolean (k, k) support: ``mask[i-1, j-1]`` iff j in L(i)."""
        return self._mask

    def as_mapping(self):
        return {i: list(self.leaders[i - 1]) for i in range(2, self.k + 1)}


@dataclass(frozen=True, eq=False)
class WeightMatrix:
    """
    Realized coefficients a_ij[t] of one step.

    Attributes:
        t (int): The step these weights drive (state t-1 -> t).
        a (np.ndarray): Shape (k, k); ``a[i-1, j-1]`` is a_ij, zero off-support.
    """

    t: int
    a: np.ndarray

    def __post_init__(self):
        a = np.array(self.a, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionError(f"weights must be square, got shape {a.shape}")
        a.setflags(write=False)
        object.__setattr__(self, "a", a)

    @property
    def k(self):
        return self.a.shape[0]

    def weight(self, i, j):
        return float(self.a[i - 1, j - 1])

    def problems(self, hierarchy: Hierarchy) -> Optional[str]:
        """Returns a description of the first violated constraint, or None."""
        if self.k != hierarchy.k:
            return f"weights are {self.k}x{self.k} but the flock has {hierarchy.k} birds"
        if not np.all(np.isfinite(self.a)):
            return "weights contain non-finite entries"
        if np.any(self.a < 0.0) or np.any(self.a > 1.0):
            return "weights must lie in [0, 1]"
        outside = (self.a != 0.0) & ~hierarchy.mask
        if np.any(outside):
            i, j = np.argwhere(outside)[0] + 1
            return f"weight a_{i}{j} is nonzero but {j} is not a leader of {i}"
        return None
