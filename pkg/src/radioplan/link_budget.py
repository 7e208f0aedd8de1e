"""Link budgets: satellite CNR, RIS/terrestrial MIL-to-GAP chain, and the
signal-to-interference-plus-noise combiner.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from radioplan.geometry import LinkGeometry
from radioplan.propagation import fspl
from radioplan.units import BOLTZMANN, DomainError, power_sum_db

# -10*log10(k), i.e. about 228.6 dBW/K/Hz
BOLTZMANN_DB = -10.0 * math.log10(BOLTZMANN)


@dataclass(frozen=True)
class NtnLosses:
    atmospheric: float = 0.0
    shadow_margin: float = 0.0
    scintillation: float = 0.0
    polarization: float = 0.0
    additional: float = 0.0

    def __post_init__(self):
        for name in ("atmospheric", "shadow_margin", "scintillation",
                     "polarization", "additional"):
            if not getattr(self, name) >= 0:
                raise DomainError(f"{name} loss must be >= 0 dB")

    @property
    def total(self) -> float:
        return (self.atmospheric + self.shadow_margin + self.scintillation
                + self.polarization + self.additional)


@dataclass(frozen=True)
class NtnLinkConfig:
    direction: str  # "DL" | "UL"
    fc: float  # GHz
    bandwidth: float  # Hz
    eirp: float  # dBW
    g_over_t: float  # dB/K
    geometry: LinkGeometry
    losses: NtnLosses = field(default_factory=NtnLosses)

    def __post_init__(self):
        if self.direction not in ("DL", "UL"):
            raise DomainError(f"direction must be DL or UL, got {self.direction!r}")
        if not self.bandwidth > 0:
            raise DomainError(f"bandwidth must be > 0 Hz, got {self.bandwidth}")
        if not self.fc > 0:
            raise DomainError(f"carrier frequency must be > 0 GHz, got {self.fc}")


@dataclass(frozen=True)
class CnrResult:
    fspl: float
    losses: float
    cnr: float


def cnr_breakdown(link: NtnLinkConfig) -> CnrResult:
    path = fspl(link.geometry.slant_range_m, link.fc)
    losses = link.losses.total
    value = (link.eirp + link.g_over_t - path - losses + BOLTZMANN_DB
             - 10.0 * math.log10(link.bandwidth))
    return CnrResult(path, losses, value)


def cnr(link: NtnLinkConfig) -> float:
    """Carrier-to-noise ratio in dB from EIRP, G/T, slant-range FSPL and losses."""
    return cnr_breakdown(link).cnr


# --- SINR -------------------------------------------------------------------

@dataclass(frozen=True)
class SinrBreakdown:
    p_signal: float
    n0: float
    i_ntn: tuple[float, ...] = ()
    i_ris: tuple[float, ...] = ()
    i_tn: tuple[float, ...] = ()
    sinr: float = field(init=False)

    def __post_init__(self):
        for name in ("i_ntn", "i_ris", "i_tn"):
            object.__setattr__(self, name, tuple(float(x) for x in getattr(self, name)))
        object.__setattr__(
            self, "sinr",
            sinr_db(self.p_signal, self.n0, self.i_ntn, self.i_ris, self.i_tn),
        )

    @property
    def snr(self) -> float:
        return self.p_signal - self.n0


def sinr_db(p_signal: float, n0: float, i_ntn: Sequence[float] = (),
            i_ris: Sequence[float] = (), i_tn: Sequence[float] = ()) -> float:
    """Signal over the linear sum of NTN, RIS and terrestrial interference plus noise.

    All powers in dBW. Empty interference lists mean no interferer of that kind.
    """
    if not math.isfinite(n0):
        raise DomainError("noise floor must be finite")
    return p_signal - power_sum_db([*i_ntn, *i_ris, *i_tn, n0])


# --- maximum isotropic loss and coverage gap --------------------------------

def mil(tx_power: float, tx_losses: float, rx_gain: float, rx_losses: float,
        noise_floor: float, required_snr: float) -> float:
    """Maximum isotropic loss (dB) a link tolerates at the required SNR."""
    return tx_power - tx_losses + rx_gain - rx_losses - noise_floor - required_snr


def available_path_loss(mil_db: float, shadow: float = 0.0, penetration: float = 0.0,
                        body: float = 0.0) -> float:
    if min(shadow, penetration, body) < 0:
        raise DomainError("margins must be >= 0 dB")
    return mil_db - shadow - penetration - body


def coverage_gap(apl: float, deployment_mpl: float) -> float:
    """Path-loss GAP of a link: deployment MPL minus available path loss.

    With this sign the direct UE-BS link of the stadium case is -1.84 dB
    and the RIS trigger below fires. ``link_margin`` gives the opposite sign.
    """
    return deployment_mpl - apl


def link_margin(apl: float, deployment_mpl: float) -> float:
    """Available path loss left over after the deployment MPL (dB)."""
    return apl - deployment_mpl


def ris_needed(gap_direct: float, threshold: float = 0.0) -> bool:
    """RIS deployment rule: add panels when the direct-link GAP is negative."""
    return gap_direct < threshold


@dataclass(frozen=True)
class RisLinkBudget:
    mil: float
    shadow_margin: float
    penetration_margin: float
    body_losses: float
    deployment_mpl: float
    available_path_loss: float = field(init=False)
    gap: float = field(init=False)

    def __post_init__(self):
        apl = available_path_loss(self.mil, self.shadow_margin,
                                  self.penetration_margin, self.body_losses)
        object.__setattr__(self, "available_path_loss", apl)
        object.__setattr__(self, "gap", coverage_gap(apl, self.deployment_mpl))

    @property
    def ris_needed(self) -> bool:
        return ris_needed(self.gap)
