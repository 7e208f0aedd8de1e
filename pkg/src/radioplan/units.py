"""Decibel arithmetic and thermal noise.

Every link-budget quantity inside the package is carried in dBW (powers)
or dB (ratios). dBm only appears at the configuration boundary.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

BOLTZMANN = 1.380649e-23  # J/K, exact SI value
T0 = 290.0  # K
SPEED_OF_LIGHT = 299_792_458.0  # m/s


class DomainError(ValueError):
    """Raised when an input lies outside the domain of a model or formula."""


@dataclass(frozen=True)
class PowerDb:
    """A decibel quantity tagged with its reference."""

    value: float
    unit: str = "dBW"  # dBW | dBm | dB

    def __post_init__(self):
        if self.unit not in ("dBW", "dBm", "dB"):
            raise DomainError(f"unknown decibel reference {self.unit!r}")

    def to_dbw(self) -> float:
        if self.unit == "dBW":
            return self.value
        if self.unit == "dBm":
            return dbm_to_dbw(self.value)
        raise DomainError("a dB ratio has no absolute power reference")

    def to_dbm(self) -> float:
        return self.to_dbw() + 30.0


@dataclass(frozen=True)
class NoiseParams:
    bandwidth: float  # Hz
    noise_figure: float = 0.0  # dB
    reference_temperature: float = T0  # K

    def __post_init__(self):
        if not self.bandwidth > 0:
            raise DomainError(f"bandwidth must be > 0 Hz, got {self.bandwidth}")
        if not self.noise_figure >= 0:
            raise DomainError(f"noise figure must be >= 0 dB, got {self.noise_figure}")
        if not self.reference_temperature > 0:
            raise DomainError("reference temperature must be > 0 K")


def _finite(x: float, name: str = "value") -> float:
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x}")
    return x


def db_to_linear(x: float) -> float:
    return 10.0 ** (_finite(x) / 10.0)


def linear_to_db(r: float) -> float:
    r = float(r)
    if not r > 0 or not math.isfinite(r):
        raise DomainError(f"linear ratio must be finite and > 0, got {r}")
    return 10.0 * math.log10(r)


def dbm_to_dbw(p: float) -> float:
    return float(p) - 30.0


def dbw_to_dbm(p: float) -> float:
    return float(p) + 30.0


def thermal_noise_dbw(n: NoiseParams) -> float:
    """Noise power kTB plus the receiver noise figure, in dBW."""
    return (
        10.0 * math.log10(BOLTZMANN * n.reference_temperature * n.bandwidth)
        + n.noise_figure
    )


def power_sum_db(terms: Iterable[float]) -> float:
    """Sum powers given in dB in the linear domain and return the result in dB.

    An empty collection is rejected: callers model "nothing received" explicitly
    instead of passing a -inf sentinel.
    """
    values = [_finite(t, "power term") for t in terms]
    if not values:
        raise DomainError("power_sum_db needs at least one term")
    # factor out the maximum so very small or large levels do not under/overflow
    peak = max(values)
    total = math.fsum(10.0 ** ((v - peak) / 10.0) for v in values)
    return peak + 10.0 * math.log10(total)
