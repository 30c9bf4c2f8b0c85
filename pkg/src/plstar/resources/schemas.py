"""
Configuration schemas for plstar.
"""

from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator

from ..interp.semantics import Domain, Fuel


class DomainConfig(BaseModel):
    """Finite value ranges used when enumerating semantics."""

    int_min: int = Field(default=-128, description="Smallest int value enumerated")
    int_max: int = Field(default=127, description="Largest int value enumerated")
    array_max: int = Field(default=3, ge=0, le=8, description="Longest array enumerated")
    array_min: int = Field(default=0, ge=0, description="Shortest array enumerated")
    array_min_value: int = Field(default=1, description="Smallest array element")
    array_max_value: int = Field(default=4, description="Largest array element")

    @model_validator(mode="after")
    def _nonempty(self) -> "DomainConfig":
        if self.int_min > self.int_max:
            raise ValueError("int_min must not exceed int_max")
        if self.array_min_value > self.array_max_value:
            raise ValueError("array_min_value must not exceed array_max_value")
        if self.array_min > self.array_max:
            raise ValueError("array_min must not exceed array_max")
        return self

    def to_domain(self) -> Domain:
        return Domain(
            int_range=(self.int_min, self.int_max),
            array_max=self.array_max,
            array_values=(self.array_min_value, self.array_max_value),
            array_min=self.array_min,
        )


class FuelConfig(BaseModel):
    """Evaluation limits."""

    max_unfoldings: int = Field(default=64, ge=1, description="Recursive unfoldings before giving up with fuel exhaustion")
    max_enumeration: int = Field(default=200_000, ge=1, description="Largest input space enumerated")

    def to_fuel(self) -> Fuel:
        return Fuel(self.max_unfoldings, self.max_enumeration)


class PlstarConfig(BaseModel):
    """Complete configuration, read from ``plstar.toml`` and overridden by flags."""

    domain: DomainConfig = Field(default_factory=DomainConfig)
    fuel: FuelConfig = Field(default_factory=FuelConfig)
    backend: Literal["c", "pseudo"] = Field(default="c", description="Default emission backend")
    signatures: Optional[str] = Field(default=None, description="Signature file used when a program has no sidecar")
    oracle: Literal["brute-force", "assumed"] = Field(
        default="brute-force", description="How proof side conditions are discharged"
    )
    implicit_padding: bool = Field(
        default=False, description="Treat data set mismatches across ';' as padded instead of reporting them"
    )
    toolchain: Literal["auto", "off"] = Field(default="auto", description="Host C compiler use for crosscheck")
    mu_as_subst: bool = Field(default=False, description="Print fix as its body with the used procedure renamed")
