"""Coverage and capacity dimensioning: NR peak rate, cell area, site counts
and cell-radius inversion.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from radioplan.propagation import DEFAULT_UMA, LOS, NLOS, UmaParams, uma_path_loss
from radioplan.units import DomainError

R_MAX = 948 / 1024
HEX_AREA_COEF = 2.6  # rounded hexagon factor used by the planning tables (3*sqrt(3)/2 = 2.598)


@dataclass(frozen=True)
class NrCarrierCapacityParams:
    numerology: int
    n_prb: int
    v_layers_dl: int = 4
    v_layers_ul: int = 4
    q_m_dl: int = 8
    q_m_ul: int = 8
    overhead_dl: float = 0.14
    overhead_ul: float = 0.08
    scaling: float = 1.0
    carriers: int = 1
    bandwidth: float = 0.0  # Hz, informational
    r_max: float = R_MAX

    def __post_init__(self):
        errors = []
        if self.numerology not in range(7):
            errors.append(f"numerology must be an integer in [0, 6], got {self.numerology}")
        if self.n_prb < 1:
            errors.append(f"n_prb must be >= 1, got {self.n_prb}")
        if self.carriers < 1:
            errors.append("carriers must be >= 1")
        for name in ("v_layers_dl", "v_layers_ul", "q_m_dl", "q_m_ul"):
            if not 1 <= getattr(self, name) <= 8:
                errors.append(f"{name} must be in [1, 8], got {getattr(self, name)}")
        for name in ("overhead_dl", "overhead_ul"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                errors.append(f"{name} must be in [0, 1], got {getattr(self, name)}")
        if self.r_max != R_MAX:
            errors.append(f"r_max is fixed at 948/1024, got {self.r_max}")
        if not self.scaling > 0:
            errors.append("scaling factor must be > 0")
        if errors:
            raise DomainError("; ".join(errors))

    @property
    def scs(self) -> float:
        return 15e3 * 2 ** self.numerology

    @property
    def symbol_duration(self) -> float:
        # average OFDM symbol duration incl. cyclic prefix, 14 symbols per slot
        return 1e-3 / (14 * 2 ** self.numerology)


def peak_data_rate(p: NrCarrierCapacityParams, direction: str = "DL") -> float:
    """Approximate NR peak data rate in bit/s, summed over aggregated carriers."""
    if direction == "DL":
        layers, qm, oh = p.v_layers_dl, p.q_m_dl, p.overhead_dl
    elif direction == "UL":
        layers, qm, oh = p.v_layers_ul, p.q_m_ul, p.overhead_ul
    else:
        raise DomainError(f"direction must be DL or UL, got {direction!r}")
    per_carrier = (layers * qm * p.scaling * p.r_max
                   * (12 * p.n_prb / p.symbol_duration) * (1.0 - oh))
    return p.carriers * per_carrier


def cell_area(radius_m: float) -> float:
    """Hexagonal cell area in km^2."""
    if radius_m < 0:
        raise DomainError(f"radius must be >= 0 m, got {radius_m}")
    return HEX_AREA_COEF * (radius_m / 1000.0) ** 2


def sites_for_coverage(target_area: float, cell_area_km2: float, policy: str = "ceil") -> int:
    """Sites needed to cover ``target_area`` km^2.

    ``ceil`` is the conservative choice. ``nearest`` rounds half up.
    Any positive target needs at least one site.
    """
    if not cell_area_km2 > 0:
        raise DomainError(f"cell area must be > 0 km^2, got {cell_area_km2}")
    if target_area < 0:
        raise DomainError("target area must be >= 0 km^2")
    if target_area == 0:
        return 0
    ratio = target_area / cell_area_km2
    if policy == "ceil":
        # guard against 2.0000000000000004 -> 3
        n = math.ceil(round(ratio, 9))
    elif policy == "nearest":
        n = math.floor(ratio + 0.5)
    else:
        raise DomainError(f"policy must be 'ceil' or 'nearest', got {policy!r}")
    return max(1, int(n))


def sites_for_capacity(simultaneous_users: int, max_users_per_site: int) -> int:
    if not max_users_per_site > 0:
        raise DomainError("max_users_per_site must be > 0")
    if simultaneous_users < 0:
        raise DomainError("simultaneous_users must be >= 0")
    return -(-int(simultaneous_users) // int(max_users_per_site))


@dataclass(frozen=True)
class TrafficProfile:
    per_user_busy_hour_rate: float  # bit/s
    duty_ratio: float
    connected_ratio: float
    overload_threshold: float
    simultaneous_users: int = 0
    max_users_per_site: int = 1

    def __post_init__(self):
        for name in ("duty_ratio", "connected_ratio", "overload_threshold"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise DomainError(f"{name} must be in (0, 1], got {v}")
        if not self.per_user_busy_hour_rate > 0:
            raise DomainError("per-user busy-hour rate must be > 0")
        if self.simultaneous_users < 0 or self.max_users_per_site < 0:
            raise DomainError("user counts must be >= 0")


def subscribers_supported(cell_rate: float, t: TrafficProfile) -> int:
    """Busy-hour subscriber count a cell carries below its overload threshold."""
    demand = t.per_user_busy_hour_rate * t.duty_ratio * t.connected_ratio
    return int(math.floor(round(cell_rate * t.overload_threshold / demand, 9)))


@dataclass(frozen=True)
class CoveragePlan:
    cell_radius: float  # m
    target_area: float  # km^2
    policy: str = "ceil"

    @property
    def cell_area(self) -> float:
        return cell_area(self.cell_radius)

    @property
    def sites_required(self) -> int:
        return sites_for_coverage(self.target_area, self.cell_area, self.policy)


class NoCoverageError(DomainError):
    """The available path loss is below the loss at the minimum valid distance."""


def max_cell_radius(apl: float, path_loss: Callable[[float], float],
                    d_min: float = 10.0, d_max: float = 5000.0, tol: float = 0.1) -> float:
    """Largest distance d (m) with path_loss(d) <= apl, by bisection.

    ``path_loss`` must be non-decreasing in d on [d_min, d_max]. When the
    budget exceeds the loss at ``d_max`` the upper bound is returned.
    """
    if path_loss(d_min) > apl:
        raise NoCoverageError(
            f"available path loss {apl:.2f} dB is below {path_loss(d_min):.2f} dB at {d_min} m"
        )
    if path_loss(d_max) <= apl:
        return d_max
    lo, hi = d_min, d_max
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if path_loss(mid) <= apl:
            lo = mid
        else:
            hi = mid
    return lo


RADIUS_MODELS = ("uma-los", "uma-nlos", "ris-cascade")


def model_path_loss(model: str, fc_ghz: float, h_tx: float = 15.0, h_ut: float = 1.5,
                    pl_bs_ris: float = 0.0, coeffs=None) -> Callable[[float], float]:
    """Forward path-loss function of distance for one of ``RADIUS_MODELS``.

    For ``ris-cascade`` the distance is RIS to UE, ``h_tx`` is the panel
    height and ``pl_bs_ris`` the fixed BS to RIS segment loss.
    """
    coeffs = coeffs or DEFAULT_UMA
    if model not in RADIUS_MODELS:
        raise DomainError(f"model must be one of {RADIUS_MODELS}, got {model!r}")
    state = NLOS if model == "uma-nlos" else LOS
    offset = pl_bs_ris if model == "ris-cascade" else 0.0

    def forward(d: float) -> float:
        return offset + uma_path_loss(UmaParams(d, fc_ghz, h_tx, h_ut, state, coeffs))

    return forward


def max_cell_radius_for(apl: float, model: str, fc_ghz: float, **kw) -> float:
    coeffs = kw.get("coeffs")
    d_min = coeffs.min_distance_m if coeffs else 10.0
    d_max = coeffs.max_distance_m if coeffs else 5000.0
    return max_cell_radius(apl, model_path_loss(model, fc_ghz, **kw), d_min, d_max)
