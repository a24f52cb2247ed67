"""
Run configuration.

A run is described by one JSON document, for example::

    {
      "k": 5, "h": 0.2, "horizon": 2000, "seed": 7,
      "hierarchy": {"preset": "chain"},
      "model": {"kind": "bernoulli_failure", "p": 0.5, "alpha": 0.5},
      "initial": {"mode": "sampled", "box_side": 1.0, "speed": 0.5}
    }

Unknown keys anywhere are rejected.
"""

from typing import Annotated, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from hlflock.utils.core.dynamics import max_timestep, validate_hierarchy
from hlflock.utils.core.initial import sample_initial_state
from hlflock.utils.core.state import FlockState, Frame, Hierarchy
from hlflock.utils.interactions.models import InteractionModel
from hlflock.utils.interactions.rng import RngStream

Triple = Tuple[float, float, float]


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class HierarchySpec(_Section):
    """Either a named preset or explicit leader sets ``{"2": [1], "3": [1, 2]}``."""

    preset: Optional[Literal["chain", "star"]] = None
    leaders: Optional[Dict[int, List[int]]] = None

    @model_validator(mode="after")
    def _one_source(self):
        if (self.preset is None) == (self.leaders is None):
            raise ValueError("hierarchy needs exactly one of 'preset' or 'leaders'")
        return self

    def build(self, k) -> Hierarchy:
        if self.preset == "chain":
            return Hierarchy.chain(k)
        if self.preset == "star":
            return Hierarchy.star(k)
        return Hierarchy.from_mapping(k, self.leaders)


class ExplicitInitial(_Section):
    mode: Literal["explicit"] = "explicit"
    positions: List[Triple]
    velocities: List[Triple]


class SampledInitial(_Section):
    mode: Literal["sampled"] = "sampled"
    box_side: float = Field(gt=0.0)
    speed: float = Field(ge=0.0)


InitialSpec = Annotated[Union[ExplicitInitial, SampledInitial], Field(discriminator="mode")]


class FlockingSection(_Section):
    epsilon: float = Field(default=1e-6, gt=0.0)
    window: int = Field(default=50, ge=1)


class EnsembleSection(_Section):
    replicas: int = Field(default=1000, ge=1)
    workers: int = Field(default=1, ge=1)
    pairs: List[Tuple[int, int]] = [(0, 4), (0, 64), (16, 64)]
    margin_se: float = Field(default=3.0, ge=0.0)
    traces: bool = False
    exceedance_delta: Optional[float] = Field(default=None, gt=0.0)


class VerifySection(_Section):
    series_delta: float = Field(default=1.0, gt=0.0)


class SweepSection(_Section):
    grid: Dict[str, List[float]] = {}


class OutputSection(_Section):
    directory: str = "out"
    trajectory: str = "trajectory.csv"
    summary: str = "summary.json"
    verify: str = "verify.json"
    report: str = "report.json"
    series: str = "series.csv"
    sweep: str = "sweep.csv"


class SimConfig(_Section):
    """
    Full description of a run.

    Attributes:
        k (int): Number of birds, >= 2.
        h (float): Timestep, 0 < h <= 1/(k-1).
        horizon (int): Steps T to integrate.
        hierarchy (HierarchySpec): Leader sets.
        model (InteractionModel): Weight kernel.
        initial (InitialSpec): Explicit or sampled initial conditions.
        seed (int): Master seed, unsigned 64-bit.
    """

    k: int = Field(ge=2)
    h: float = Field(gt=0.0)
    horizon: int = Field(ge=1)
    hierarchy: HierarchySpec
    model: InteractionModel
    initial: InitialSpec
    seed: int = Field(default=0, ge=0, lt=2**64)
    flocking: FlockingSection = FlockingSection()
    ensemble: EnsembleSection = EnsembleSection()
    sweep: SweepSection = SweepSection()
    verify: VerifySection = VerifySection()
    output: OutputSection = OutputSection()

    @model_validator(mode="after")
    def _consistent(self):
        if self.h > max_timestep(self.k):
            raise ValueError(f"h = {self.h} violates h <= 1/(k-1) = {max_timestep(self.k)}")
        if self.hierarchy.leaders is not None:
            outside = sorted(bird for bird in self.hierarchy.leaders if not 2 <= bird <= self.k)
            if outside:
                raise ValueError(f"hierarchy names bird {outside[0]}, but followers are birds 2..{self.k}")
        verdict = validate_hierarchy(self.hierarchy.build(self.k))
        if not verdict:
            raise ValueError(f"hierarchy rejected at bird {verdict.bird}: {verdict.reason}")
        if isinstance(self.initial, ExplicitInitial):
            for name in ("positions", "velocities"):
                count = len(getattr(self.initial, name))
                if count != self.k:
                    raise ValueError(f"initial {name} lists {count} birds, expected k = {self.k}")
        return self

    def build_hierarchy(self) -> Hierarchy:
        return self.hierarchy.build(self.k)

    def initial_state(self, stream: RngStream) -> FlockState:
        """Absolute-frame state at t = 0 for the stream's replica."""
        if isinstance(self.initial, ExplicitInitial):
            return FlockState(t=0, x=self.initial.positions, v=self.initial.velocities, frame=Frame.ABSOLUTE)
        return sample_initial_state(self.k, self.initial.box_side, self.initial.speed, stream)
