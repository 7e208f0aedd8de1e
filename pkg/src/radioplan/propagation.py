"""Path-loss models: free space, the satellite loss chain, urban macro and the
RIS cascade.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from radioplan.units import SPEED_OF_LIGHT, DomainError

LOS = "LOS"
NLOS = "NLOS"
SCENARIOS = ("dense-urban", "urban", "suburban-rural")
ENV_COLUMNS = (
    "elevation_deg", "band", "sigma_los", "sigma_nlos", "clutter_db",
    "p_los_denseurban", "p_los_urban", "p_los_suburban",
)


class EnvLookupError(LookupError):
    """No environment row for the requested band / elevation."""


def fspl(d_m: float, fc_ghz: float) -> float:
    """Free-space path loss in dB with distance in metres and frequency in GHz."""
    if not d_m >= 1.0:
        raise DomainError(f"FSPL needs d >= 1 m, got {d_m}")
    if not fc_ghz > 0:
        raise DomainError(f"carrier frequency must be > 0 GHz, got {fc_ghz}")
    return 32.45 + 20.0 * math.log10(fc_ghz) + 20.0 * math.log10(d_m)


# --- satellite environment tables -------------------------------------------

@dataclass(frozen=True)
class NtnEnvRow:
    elevation_deg: float
    band: str  # "S" | "Ka"
    sigma_sf_los: float
    sigma_sf_nlos: float
    clutter_loss: float
    los_probability: Mapping[str, float]

    def __post_init__(self):
        if min(self.sigma_sf_los, self.sigma_sf_nlos) < 0:
            raise DomainError("shadow fading sigma must be >= 0 dB")
        if self.clutter_loss < 0:
            raise DomainError("clutter loss must be >= 0 dB")
        for name, p in self.los_probability.items():
            if not 0.0 <= p <= 1.0:
                raise DomainError(f"LOS probability for {name} outside [0, 1]: {p}")

    def sigma(self, state: str) -> float:
        if state == LOS:
            return self.sigma_sf_los
        if state == NLOS:
            return self.sigma_sf_nlos
        raise DomainError(f"state must be LOS or NLOS, got {state!r}")


@dataclass(frozen=True)
class NtnEnvironment:
    """Read-only table of environment rows keyed by (band, elevation)."""

    rows: tuple[NtnEnvRow, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        index = {}
        for row in self.rows:
            key = (row.band.lower(), float(row.elevation_deg))
            if key in index:
                raise DomainError(f"duplicate environment row {key}")
            index[key] = row
        object.__setattr__(self, "_index", index)

    def row(self, band: str, elevation_deg: float) -> NtnEnvRow:
        try:
            return self._index[(band.lower(), float(elevation_deg))]
        except KeyError:
            raise EnvLookupError(
                f"no environment row for band={band!r}, elevation={elevation_deg} deg"
            ) from None

    def elevations(self) -> list[float]:
        return sorted({e for _, e in self._index})

    @classmethod
    def from_csv(cls, path: str | Path) -> "NtnEnvironment":
        with open(path, newline="", encoding="utf-8") as fh:
            return cls._parse(fh, str(path))

    @classmethod
    def default(cls) -> "NtnEnvironment":
        ref = resources.files("radioplan").joinpath("data/ntn_environment.csv")
        with ref.open("r", encoding="utf-8", newline="") as fh:
            return cls._parse(fh, "ntn_environment.csv")

    @classmethod
    def _parse(cls, fh: Iterable[str], source: str) -> "NtnEnvironment":
        reader = csv.DictReader(fh)
        missing = set(ENV_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise DomainError(f"{source}: missing columns {sorted(missing)}")
        rows = []
        for lineno, rec in enumerate(reader, start=2):
            try:
                rows.append(NtnEnvRow(
                    elevation_deg=float(rec["elevation_deg"]),
                    band=rec["band"].strip(),
                    sigma_sf_los=float(rec["sigma_los"]),
                    sigma_sf_nlos=float(rec["sigma_nlos"]),
                    clutter_loss=float(rec["clutter_db"]),
                    los_probability={
                        "dense-urban": float(rec["p_los_denseurban"]),
                        "urban": float(rec["p_los_urban"]),
                        "suburban-rural": float(rec["p_los_suburban"]),
                    },
                ))
            except (TypeError, ValueError) as exc:
                raise DomainError(f"{source}:{lineno}: {exc}") from None
        return cls(tuple(rows))


_DEFAULT_ENV: NtnEnvironment | None = None


def default_environment() -> NtnEnvironment:
    global _DEFAULT_ENV
    if _DEFAULT_ENV is None:
        _DEFAULT_ENV = NtnEnvironment.default()
    return _DEFAULT_ENV


def los_probability(elevation_deg: float, scenario: str,
                    env: NtnEnvironment | None = None, band: str | None = None) -> float:
    """LOS probability from the environment table. No interpolation."""
    if scenario not in SCENARIOS:
        raise DomainError(f"scenario must be one of {SCENARIOS}, got {scenario!r}")
    env = env or default_environment()
    candidates = [r for r in env.rows if float(r.elevation_deg) == float(elevation_deg)
                  and (band is None or r.band.lower() == band.lower())]
    if not candidates:
        raise EnvLookupError(f"no LOS probability row at {elevation_deg} deg")
    return candidates[0].los_probability[scenario]


def ntn_basic_path_loss(d_m: float, fc_ghz: float, env: NtnEnvRow, state: str,
                        shadow_quantile_z: float = 0.0) -> float:
    """FSPL plus z standard deviations of shadow fading plus clutter loss.

    Clutter loss is only charged in NLOS. ``shadow_quantile_z=0`` gives the
    median.
    """
    sigma = env.sigma(state)
    clutter = env.clutter_loss if state == NLOS else 0.0
    return fspl(d_m, fc_ghz) + shadow_quantile_z * sigma + clutter


@dataclass(frozen=True)
class PathLossBreakdown:
    basic: float
    gases: float
    scintillation: float
    building_entry: float
    total: float


def ntn_total_path_loss(basic: float, gases: float = 0.0, scint: float = 0.0,
                        entry: float = 0.0) -> PathLossBreakdown:
    for name, v in (("basic", basic), ("gases", gases),
                    ("scintillation", scint), ("building_entry", entry)):
        if not v >= 0:
            raise DomainError(f"{name} loss must be >= 0 dB, got {v}")
    return PathLossBreakdown(basic, gases, scint, entry, basic + gases + scint + entry)


# --- terrestrial urban macro ------------------------------------------------

@dataclass(frozen=True)
class UmaCoefficients:
    """Urban-macro coefficient set.

    The defaults are the standard UMa constants. ``use_breakpoint`` switches
    on the far-field LOS slope beyond the breakpoint distance; venue-scale
    planning keeps the single near-field slope.
    """

    los_intercept: float = 28.0
    los_slope: float = 22.0
    los_far_slope: float = 40.0
    los_far_bp_coef: float = 9.0
    freq_slope: float = 20.0
    nlos_intercept: float = 13.54
    nlos_slope: float = 39.08
    nlos_ut_height_coef: float = 0.6
    effective_env_height: float = 1.0
    use_breakpoint: bool = False
    min_distance_m: float = 10.0
    max_distance_m: float = 5000.0


DEFAULT_UMA = UmaCoefficients()


@dataclass(frozen=True)
class UmaParams:
    d2d: float  # m
    fc: float  # GHz
    h_bs: float = 15.0  # m
    h_ut: float = 1.5  # m
    state: str = LOS
    coeffs: UmaCoefficients = DEFAULT_UMA


def uma_los_array(d2d, fc_ghz, h_bs, h_ut, c: UmaCoefficients = DEFAULT_UMA):
    d2d = np.asarray(d2d, dtype=float)
    d3d = np.hypot(d2d, h_bs - h_ut)
    near = c.los_intercept + c.los_slope * np.log10(d3d) + c.freq_slope * np.log10(fc_ghz)
    if not c.use_breakpoint:
        return near
    d_bp = (4.0 * (h_bs - c.effective_env_height) * (h_ut - c.effective_env_height)
            * fc_ghz * 1e9 / SPEED_OF_LIGHT)
    far = (c.los_intercept + c.los_far_slope * np.log10(d3d)
           + c.freq_slope * np.log10(fc_ghz)
           - c.los_far_bp_coef * np.log10(d_bp ** 2 + (h_bs - h_ut) ** 2))
    return np.where(d2d <= d_bp, near, far)


def uma_nlos_array(d2d, fc_ghz, h_bs, h_ut, c: UmaCoefficients = DEFAULT_UMA):
    d2d = np.asarray(d2d, dtype=float)
    d3d = np.hypot(d2d, h_bs - h_ut)
    nlos = (c.nlos_intercept + c.nlos_slope * np.log10(d3d)
            + c.freq_slope * np.log10(fc_ghz) - c.nlos_ut_height_coef * (h_ut - 1.5))
    return np.maximum(uma_los_array(d2d, fc_ghz, h_bs, h_ut, c), nlos)


def uma_path_loss(p: UmaParams) -> float:
    """Urban-macro path loss (dB) for one link."""
    c = p.coeffs
    if not c.min_distance_m <= p.d2d <= c.max_distance_m:
        raise DomainError(
            f"UMa valid for {c.min_distance_m} m <= d2D <= {c.max_distance_m} m, got {p.d2d}"
        )
    if not p.fc > 0:
        raise DomainError(f"carrier frequency must be > 0 GHz, got {p.fc}")
    if not (p.h_bs > 0 and p.h_ut > 0):
        raise DomainError("antenna heights must be > 0 m")
    if p.state == LOS:
        return float(uma_los_array(p.d2d, p.fc, p.h_bs, p.h_ut, c))
    if p.state == NLOS:
        return float(uma_nlos_array(p.d2d, p.fc, p.h_bs, p.h_ut, c))
    raise DomainError(f"state must be LOS or NLOS, got {p.state!r}")


# --- RIS cascade ------------------------------------------------------------

@dataclass(frozen=True)
class RisCascade:
    pl_bs_ris: float
    pl_ris_ue: float
    total: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "total", ris_cascade_path_loss(self.pl_bs_ris, self.pl_ris_ue))


def ris_cascade_path_loss(pl_br: float, pl_ru: float) -> float:
    # multiplying the two segment losses in linear terms is a dB sum
    if pl_br < 0 or pl_ru < 0:
        raise DomainError("segment path losses must be >= 0 dB")
    return pl_br + pl_ru
