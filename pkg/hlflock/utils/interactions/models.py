"""
Interaction models: the parameter records behind ``sample_weights``.

Each model is a frozen pydantic record tagged by ``kind`` so that it can sit
inside a run configuration as ``{"kind": "bernoulli_failure", "p": 0.5,
"alpha": 0.5}``. Every model exposes a ``certificate``: constants (p, alpha)
for which E(a_ij[t+1] | F_t) >= p / (1 + |x_i - x_j|)^alpha holds.
"""

from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, model_validator


class Certificate(BaseModel):
    """Constants of the conditional-mean floor p / (1 + d)^alpha."""

    model_config = ConfigDict(frozen=True)

    p: float = Field(gt=0.0, le=1.0)
    alpha: float = Field(ge=0.0)


class _Record(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


# ----------------------------------------------------------------------------
# Scale distributions for ScaledRandom
# ----------------------------------------------------------------------------


class UniformVariate(_Record):
    family: Literal["uniform"] = "uniform"
    low: float = Field(ge=0.0, le=1.0)
    high: float = Field(ge=0.0, le=1.0)

    @model_validator(mode="after")
    def _ordered(self):
        if self.low > self.high:
            raise ValueError(f"uniform low {self.low} exceeds high {self.high}")
        return self

    @property
    def mean(self):
        return 0.5 * (self.low + self.high)

    def sample(self, generator, shape):
        return self.low + (self.high - self.low) * generator.random(shape)


class BetaVariate(_Record):
    family: Literal["beta"] = "beta"
    a: float = Field(gt=0.0)
    b: float = Field(gt=0.0)

    @property
    def mean(self):
        return self.a / (self.a + self.b)

    def sample(self, generator, shape):
        return generator.beta(self.a, self.b, size=shape)


Variate = Annotated[Union[UniformVariate, BetaVariate], Field(discriminator="family")]


def default_variate(p):
    """Uniform on [max(2p - 1, 0), 1]; its mean is max(p, 1/2) >= p."""
    return UniformVariate(low=max(2.0 * p - 1.0, 0.0), high=1.0)


# ----------------------------------------------------------------------------
# Models
# ----------------------------------------------------------------------------


class DeterministicCS(_Record):
    """a_ij = K / (sigma^2 + d^2)^beta, admitted only when K / sigma^(2 beta) <= 1."""

    kind: Literal["deterministic_cs"] = "deterministic_cs"
    K: float = Field(gt=0.0)
    sigma: float = Field(gt=0.0)
    beta: float = Field(gt=0.0)

    @model_validator(mode="after")
    def _bounded(self):
        peak = self.K / self.sigma ** (2.0 * self.beta)
        if peak > 1.0:
            raise ValueError(
                f"maximum weight K/sigma^(2 beta) = {peak} exceeds 1; weights must lie in [0, 1]"
            )
        return self

    @property
    def random(self):
        return False

    @property
    def certificate(self):
        # sigma^2 + d^2 <= max(1, sigma^2) (1 + d)^2
        p = min(1.0, self.K / max(1.0, self.sigma**2) ** self.beta)
        return Certificate(p=p, alpha=2.0 * self.beta)


class PowerLaw(_Record):
    """a_ij = (1 + d)^-alpha."""

    kind: Literal["power_law"] = "power_law"
    alpha: float = Field(ge=0.0)

    @property
    def random(self):
        return False

    @property
    def certificate(self):
        return Certificate(p=1.0, alpha=self.alpha)


class BernoulliFailure(_Record):
    """Links fail independently: a_ij = X (1 + d)^-alpha with X ~ Bernoulli(p)."""

    kind: Literal["bernoulli_failure"] = "bernoulli_failure"
    p: float = Field(gt=0.0, le=1.0)
    alpha: float = Field(ge=0.0)

    @property
    def random(self):
        return True

    @property
    def certificate(self):
        return Certificate(p=self.p, alpha=self.alpha)


class ScaledRandom(_Record):
    """a_ij = X (1 + d)^-alpha with X an independent [0, 1] variate of mean >= p."""

    kind: Literal["scaled_random"] = "scaled_random"
    p: float = Field(gt=0.0, le=1.0)
    alpha: float = Field(ge=0.0)
    variate: Variate

    @model_validator(mode="before")
    @classmethod
    def _fill_variate(cls, data):
        if isinstance(data, dict) and data.get("variate") is None and "p" in data:
            data = dict(data)
            data["variate"] = default_variate(float(data["p"])).model_dump()
        return data

    @model_validator(mode="after")
    def _certified(self):
        if self.variate.mean < self.p:
            raise ValueError(
                f"scale variate has mean {self.variate.mean} below the certified level p = {self.p}"
            )
        return self

    @property
    def random(self):
        return True

    @property
    def certificate(self):
        return Certificate(p=self.p, alpha=self.alpha)


class RandomEnvironment(_Record):
    """a_ij = p with probability (1 + d)^-alpha, else 0."""

    kind: Literal["random_environment"] = "random_environment"
    p: float = Field(gt=0.0, le=1.0)
    alpha: float = Field(ge=0.0)

    @property
    def random(self):
        return True

    @property
    def certificate(self):
        return Certificate(p=self.p, alpha=self.alpha)


InteractionModel = Annotated[
    Union[DeterministicCS, PowerLaw, BernoulliFailure, ScaledRandom, RandomEnvironment],
    Field(discriminator="kind"),
]

_model_adapter = TypeAdapter(InteractionModel)


def parse_model(data):
    """Builds an interaction model from its tagged-record form."""
    return _model_adapter.validate_python(data)
