"""Satellite to ground-terminal geometry."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from radioplan.units import SPEED_OF_LIGHT, DomainError

EARTH_RADIUS_M = 6_371_000.0
GM_EARTH = 3.986004418e14  # m^3/s^2


def slant_range(altitude_m: float, elevation_deg: float,
                earth_radius_m: float = EARTH_RADIUS_M) -> float:
    """Line-of-sight distance in metres from a ground terminal to a satellite.

    Uses the spherical-Earth relation between altitude, elevation angle and
    Earth radius. At 90 degrees the result collapses to the altitude.
    """
    if not altitude_m > 0:
        raise DomainError(f"altitude must be > 0 m, got {altitude_m}")
    if not 0.0 < elevation_deg <= 90.0:
        raise DomainError(f"elevation must be in (0, 90] deg, got {elevation_deg}")
    if not earth_radius_m > 0:
        raise DomainError("earth radius must be > 0 m")
    if elevation_deg == 90.0:
        return float(altitude_m)
    s = math.sin(math.radians(elevation_deg))
    r = earth_radius_m
    h = altitude_m
    return math.sqrt(r * r * s * s + h * h + 2.0 * h * r) - r * s


@dataclass(frozen=True)
class LinkGeometry:
    altitude_m: float
    elevation_deg: float
    earth_radius_m: float = EARTH_RADIUS_M
    slant_range_m: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(
            self, "slant_range_m",
            slant_range(self.altitude_m, self.elevation_deg, self.earth_radius_m),
        )


@dataclass(frozen=True)
class OrbitKinematics:
    """Circular-orbit speed at a given altitude."""

    altitude_m: float
    earth_radius_m: float = EARTH_RADIUS_M

    @property
    def geocentric_radius_m(self) -> float:
        return self.earth_radius_m + self.altitude_m

    @property
    def orbital_velocity(self) -> float:
        return math.sqrt(GM_EARTH / self.geocentric_radius_m)


def one_way_delay(distance_m: float) -> float:
    if distance_m < 0:
        raise DomainError(f"distance must be >= 0 m, got {distance_m}")
    return distance_m / SPEED_OF_LIGHT


def max_doppler_shift(fc_hz: float, altitude_m: float,
                      earth_radius_m: float = EARTH_RADIUS_M) -> float:
    """Worst-case Doppler shift (Hz) seen by a static ground observer.

    The satellite speed is projected by R_E / (R_E + h0), the largest
    radial-velocity component reachable at the horizon.
    """
    if fc_hz < 0:
        raise DomainError(f"carrier frequency must be >= 0 Hz, got {fc_hz}")
    orbit = OrbitKinematics(altitude_m, earth_radius_m)
    radial = orbit.orbital_velocity * earth_radius_m / orbit.geocentric_radius_m
    return fc_hz / SPEED_OF_LIGHT * radial


def beam_footprint_diameter(distance_m: float, beamwidth_deg: float) -> float:
    # flat-Earth nadir approximation, only meant as a sanity check
    if not 0.0 < beamwidth_deg < 90.0:
        raise DomainError(f"beamwidth must be in (0, 90) deg, got {beamwidth_deg}")
    return 2.0 * distance_m * math.tan(math.radians(beamwidth_deg) / 2.0)
