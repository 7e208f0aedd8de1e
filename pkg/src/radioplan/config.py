"""Planning configuration: YAML with a unit suffix on every physical field.

Values are normalised on load (Hz, dBW, m, km^2, bit/s) and validation
collects every problem before raising, each tagged with its dotted path.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import yaml

from radioplan.dimensioning import RADIUS_MODELS, NrCarrierCapacityParams, TrafficProfile
from radioplan.geometry import LinkGeometry
from radioplan.link_budget import NtnLinkConfig, NtnLosses
from radioplan.propagation import LOS, NLOS, UmaCoefficients
from radioplan.units import DomainError

_NUMBER = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_QTY = re.compile(rf"^\s*({_NUMBER})\s*([A-Za-z/°²%0-9]*)\s*$")

# unit -> (kind, converter to the internal unit)
_UNITS: dict[str, tuple[str, Any]] = {
    "Hz": ("frequency", lambda v: v),
    "kHz": ("frequency", lambda v: v * 1e3),
    "MHz": ("frequency", lambda v: v * 1e6),
    "GHz": ("frequency", lambda v: v * 1e9),
    "dBW": ("power", lambda v: v),
    "dBm": ("power", lambda v: v - 30.0),
    "W": ("power", lambda v: 10.0 * math.log10(v)),
    "mW": ("power", lambda v: 10.0 * math.log10(v) - 30.0),
    "dB": ("db", lambda v: v),
    "dBi": ("db", lambda v: v),
    "dB/K": ("gt", lambda v: v),
    "m": ("length", lambda v: v),
    "km": ("length", lambda v: v * 1e3),
    "m2": ("area", lambda v: v * 1e-6),
    "m²": ("area", lambda v: v * 1e-6),
    "km2": ("area", lambda v: v),
    "km²": ("area", lambda v: v),
    "deg": ("angle", lambda v: v),
    "°": ("angle", lambda v: v),
    "bps": ("rate", lambda v: v),
    "kbps": ("rate", lambda v: v * 1e3),
    "Mbps": ("rate", lambda v: v * 1e6),
    "Gbps": ("rate", lambda v: v * 1e9),
}
# canonical spelling used when a config is written back out
CANONICAL = {"frequency": "Hz", "power": "dBW", "db": "dB", "gt": "dB/K",
             "length": "m", "area": "km2", "angle": "deg", "rate": "bps"}

COMMANDS = ("ntn-budget", "ris-budget", "coverage", "capacity", "map")


class ConfigError(Exception):
    """Configuration could not be parsed or validated.

    ``errors`` holds every ``(path, message)`` found.
    """

    def __init__(self, errors: list[tuple[str, str]], source: str = "<config>"):
        self.errors = list(errors)
        self.source = source
        lines = [f"{source}: {len(self.errors)} configuration error(s)"]
        lines += [f"  {p}: {m}" for p, m in self.errors]
        super().__init__("\n".join(lines))


def parse_quantity(value: Any, kind: str) -> float:
    """Parse ``"20 MHz"``-style text into the internal unit for ``kind``."""
    if isinstance(value, bool) or not isinstance(value, str):
        raise ValueError(f"expected a quantity with a {kind} unit, got {value!r}")
    m = _QTY.match(value)
    if not m:
        raise ValueError(f"cannot parse quantity {value!r}")
    number, unit = float(m.group(1)), m.group(2)
    if not unit:
        raise ValueError(f"missing {kind} unit in {value!r}")
    if unit not in _UNITS:
        raise ValueError(f"unknown unit {unit!r} in {value!r}")
    got_kind, conv = _UNITS[unit]
    if got_kind != kind:
        raise ValueError(f"unit mismatch: {value!r} is a {got_kind}, expected a {kind}")
    try:
        return float(conv(number))
    except ValueError as exc:
        raise ValueError(f"{value!r}: {exc}") from None


def format_quantity(value: float, kind: str) -> str:
    return f"{value!r} {CANONICAL[kind]}"


# --- typed sections ------------------------------------------------------------

@dataclass(frozen=True)
class NtnLinkSpec:
    case: str
    direction: str
    frequency: float  # Hz
    bandwidth: float  # Hz
    eirp: float  # dBW
    g_over_t: float
    altitude: float  # m
    elevation: float  # deg
    losses: NtnLosses

    def to_link(self) -> NtnLinkConfig:
        return NtnLinkConfig(self.direction, self.frequency / 1e9, self.bandwidth, self.eirp,
                             self.g_over_t, LinkGeometry(self.altitude, self.elevation),
                             self.losses)


@dataclass(frozen=True)
class MilInputs:
    tx_power: float  # dBW
    tx_losses: float
    rx_gain: float
    rx_losses: float
    noise_figure: float
    bandwidth: float  # Hz
    required_snr: float


@dataclass(frozen=True)
class RisLinkSpec:
    shadow_margin: float
    penetration_margin: float
    body_losses: float
    model: str  # uma-los | uma-nlos | ris-cascade
    mil: float | None = None
    mil_inputs: MilInputs | None = None
    distance: float | None = None  # m, for uma models
    segments: tuple[float, ...] = ()  # dB, for ris-cascade


@dataclass(frozen=True)
class RisBudgetSpec:
    frequency: float  # Hz
    bs_height: float
    ue_height: float
    links: dict[str, RisLinkSpec]
    direct_link: str


@dataclass(frozen=True)
class CoverageLinkSpec:
    radius: float  # m
    budget_link: str


@dataclass(frozen=True)
class CoverageSpec:
    target_area: float  # km^2
    policy: str
    links: dict[str, CoverageLinkSpec]


@dataclass(frozen=True)
class CapacitySpec:
    band: str
    frequency: float  # Hz
    params: NrCarrierCapacityParams
    simultaneous_users: int
    max_users_per_site: int
    traffic_dl: TrafficProfile
    traffic_ul: TrafficProfile


@dataclass(frozen=True)
class BsSpec:
    name: str
    position: tuple[float, float]
    tx_power: float  # dBW
    antenna_gain: float
    feeder_loss: float
    frequency: float  # Hz
    bandwidth: float
    height: float
    state: str
    capacity_set: str | None


@dataclass(frozen=True)
class RisPanelSpec:
    name: str
    position: tuple[float, float]
    serving_bs: str
    gain: float
    reflection_loss: float
    height: float
    state: str
    pl_bs_ris: float | None


@dataclass(frozen=True)
class OverlaySpec:
    link: str
    capacity_set: str | None
    co_channel: bool
    beamwidth: float | None  # deg


@dataclass(frozen=True)
class ScenarioSpec:
    polygon: tuple[tuple[float, float], ...]
    resolution: float
    ue_noise_figure: float
    ue_height: float
    bs_sites: tuple[BsSpec, ...]
    ris_panels: tuple[RisPanelSpec, ...]
    ntn_overlay: OverlaySpec | None
    rsrp_threshold: float  # dBW
    sinr_target: float  # dB


@dataclass(frozen=True)
class PlanningConfig:
    name: str
    ntn_links: dict[str, NtnLinkSpec] = field(default_factory=dict)
    ris_budget: RisBudgetSpec | None = None
    coverage: CoverageSpec | None = None
    capacity: dict[str, CapacitySpec] = field(default_factory=dict)
    scenario: ScenarioSpec | None = None
    uma: UmaCoefficients = UmaCoefficients()
    output_dir: str = "out"
    source: str = field(default="<config>", compare=False)


# --- parsing -------------------------------------------------------------------

class _Reader:
    """Pulls typed values out of nested dicts, recording errors instead of raising."""

    def __init__(self):
        self.errors: list[tuple[str, str]] = []

    def err(self, path: str, msg: str) -> None:
        self.errors.append((path, msg))

    def section(self, d: Any, key: str, path: str, required: bool = True) -> dict | None:
        if not isinstance(d, dict):
            return None
        v = d.get(key)
        if v is None:
            if required:
                self.err(_join(path, key), "missing section")
            return None
        if not isinstance(v, dict):
            self.err(_join(path, key), f"expected a mapping, got {type(v).__name__}")
            return None
        return v

    def qty(self, d: dict, key: str, kind: str, path: str, *, default: Any = ...,
            positive: bool = False, nonneg: bool = False) -> float:
        p = _join(path, key)
        if key not in d or d[key] is None:
            if default is ...:
                self.err(p, "missing field")
                return math.nan
            return default
        try:
            v = parse_quantity(d[key], kind)
        except ValueError as exc:
            self.err(p, str(exc))
            return math.nan
        if positive and not v > 0:
            self.err(p, f"must be > 0, got {d[key]!r}")
        if nonneg and not v >= 0:
            self.err(p, f"must be >= 0, got {d[key]!r}")
        return v

    def num(self, d: dict, key: str, path: str, *, default: Any = ..., integer: bool = False,
            lo: float | None = None, hi: float | None = None) -> Any:
        p = _join(path, key)
        if key not in d or d[key] is None:
            if default is ...:
                self.err(p, "missing field")
                return math.nan
            return default
        v = d[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            self.err(p, f"expected a plain number, got {v!r}")
            return math.nan
        if integer and int(v) != v:
            self.err(p, f"expected an integer, got {v!r}")
        if lo is not None and v < lo or hi is not None and v > hi:
            self.err(p, f"{v!r} outside [{lo}, {hi}]")
        return int(v) if integer else float(v)

    def text(self, d: dict, key: str, path: str, *, choices=None, default: Any = ...) -> Any:
        p = _join(path, key)
        if key not in d or d[key] is None:
            if default is ...:
                self.err(p, "missing field")
                return ""
            return default
        v = d[key]
        if not isinstance(v, str):
            self.err(p, f"expected text, got {v!r}")
            return ""
        if choices and v not in choices:
            self.err(p, f"{v!r} not one of {list(choices)}")
        return v

    def xy(self, d: dict, key: str, path: str) -> tuple[float, float]:
        p = _join(path, key)
        v = d.get(key)
        if not (isinstance(v, str) and "," in v):
            self.err(p, f"expected 'x m, y m', got {v!r}")
            return (math.nan, math.nan)
        a, b = v.split(",", 1)
        out = []
        for part, sub in ((a, "x"), (b, "y")):
            try:
                out.append(parse_quantity(part, "length"))
            except ValueError as exc:
                self.err(f"{p}.{sub}", str(exc))
                out.append(math.nan)
        return tuple(out)


def _join(path: str, key: Any) -> str:
    return f"{path}.{key}" if path else str(key)


def _ntn_links(r: _Reader, raw: dict) -> dict[str, NtnLinkSpec]:
    out = {}
    for name, d in raw.items():
        p = f"ntn_links.{name}"
        if not isinstance(d, dict):
            r.err(p, "expected a mapping")
            continue
        losses_raw = r.section(d, "losses", p, required=False) or {}
        lp = f"{p}.losses"
        losses = {k: r.qty(losses_raw, k, "db", lp, default=0.0, nonneg=True)
                  for k in ("atmospheric", "shadow_margin", "scintillation",
                            "polarization", "additional")}
        unknown = set(losses_raw) - set(losses)
        for k in sorted(unknown):
            r.err(f"{lp}.{k}", "unknown loss term")
        spec = dict(
            case=r.text(d, "case", p, default=name),
            direction=r.text(d, "direction", p, choices=("DL", "UL")),
            frequency=r.qty(d, "frequency", "frequency", p, positive=True),
            bandwidth=r.qty(d, "bandwidth", "frequency", p, positive=True),
            eirp=r.qty(d, "eirp", "power", p),
            g_over_t=r.qty(d, "g_over_t", "gt", p),
            altitude=r.qty(d, "altitude", "length", p, positive=True),
            elevation=r.qty(d, "elevation", "angle", p),
        )
        if not 0 < spec["elevation"] <= 90:
            r.err(f"{p}.elevation", "must be in (0, 90] deg")
        if all(not (isinstance(v, float) and math.isnan(v)) for v in spec.values()) and \
                all(math.isfinite(v) for v in losses.values()):
            out[name] = NtnLinkSpec(losses=NtnLosses(**losses), **spec)
    return out


def _ris_budget(r: _Reader, d: dict) -> RisBudgetSpec | None:
    p = "ris_budget"
    freq = r.qty(d, "frequency", "frequency", p, positive=True)
    bs_h = r.qty(d, "bs_height", "length", p, positive=True)
    ue_h = r.qty(d, "ue_height", "length", p, positive=True)
    links_raw = r.section(d, "links", p) or {}
    links = {}
    for name, ld in links_raw.items():
        lp = f"{p}.links.{name}"
        if not isinstance(ld, dict):
            r.err(lp, "expected a mapping")
            continue
        mil = r.qty(ld, "mil", "db", lp, default=None)
        mil_inputs = None
        mi = r.section(ld, "mil_inputs", lp, required=False)
        if mi is not None:
            mp = f"{lp}.mil_inputs"
            mil_inputs = MilInputs(
                tx_power=r.qty(mi, "tx_power", "power", mp),
                tx_losses=r.qty(mi, "tx_losses", "db", mp, default=0.0, nonneg=True),
                rx_gain=r.qty(mi, "rx_gain", "db", mp, default=0.0),
                rx_losses=r.qty(mi, "rx_losses", "db", mp, default=0.0, nonneg=True),
                noise_figure=r.qty(mi, "noise_figure", "db", mp, nonneg=True),
                bandwidth=r.qty(mi, "bandwidth", "frequency", mp, positive=True),
                required_snr=r.qty(mi, "required_snr", "db", mp),
            )
        if (mil is None) == (mil_inputs is None):
            r.err(lp, "give exactly one of 'mil' or 'mil_inputs'")
        dep = r.section(ld, "deployment", lp) or {}
        dp = f"{lp}.deployment"
        model = r.text(dep, "model", dp, choices=RADIUS_MODELS)
        distance = None
        segments: tuple[float, ...] = ()
        if model in ("uma-los", "uma-nlos"):
            distance = r.qty(dep, "distance", "length", dp, positive=True)
        elif model == "ris-cascade":
            segs = dep.get("segments")
            if not isinstance(segs, list) or len(segs) != 2:
                r.err(f"{dp}.segments", "expected [BS-RIS loss, RIS-UE loss]")
            else:
                segments = tuple(r.qty({i: s for i, s in enumerate(segs)}, i, "db",
                                       f"{dp}.segments", nonneg=True) for i in range(2))
        links[name] = RisLinkSpec(
            shadow_margin=r.qty(ld, "shadow_margin", "db", lp, default=0.0, nonneg=True),
            penetration_margin=r.qty(ld, "penetration_margin", "db", lp, default=0.0, nonneg=True),
            body_losses=r.qty(ld, "body_losses", "db", lp, default=0.0, nonneg=True),
            model=model, mil=mil, mil_inputs=mil_inputs, distance=distance, segments=segments,
        )
    direct = r.text(d, "direct_link", p)
    if direct and direct not in links:
        r.err(f"{p}.direct_link", f"dangling reference {direct!r}")
    return RisBudgetSpec(freq, bs_h, ue_h, links, direct)


def _coverage(r: _Reader, d: dict, ris: RisBudgetSpec | None) -> CoverageSpec:
    p = "coverage"
    target = r.qty(d, "target_area", "area", p, nonneg=True)
    policy = r.text(d, "policy", p, choices=("ceil", "nearest"), default="ceil")
    links = {}
    for name, ld in (r.section(d, "links", p) or {}).items():
        lp = f"{p}.links.{name}"
        if not isinstance(ld, dict):
            r.err(lp, "expected a mapping")
            continue
        ref = r.text(ld, "budget_link", lp)
        if ref and (ris is None or ref not in ris.links):
            r.err(f"{lp}.budget_link", f"dangling reference {ref!r}")
        links[name] = CoverageLinkSpec(r.qty(ld, "radius", "length", lp, nonneg=True), ref)
    return CoverageSpec(target, policy, links)


def _traffic(r: _Reader, d: dict, p: str, direction: str, users: int, per_site: int):
    key = direction.lower()
    rate = r.qty(d, f"user_rate_{key}", "rate", p, positive=True)
    duty = r.num(d, f"duty_{key}", p, lo=0.0, hi=1.0)
    connected = r.num(d, "connected_ratio", p, lo=0.0, hi=1.0)
    overload = r.num(d, "overload_threshold", p, lo=0.0, hi=1.0)
    try:
        return TrafficProfile(rate, duty, connected, overload, users, per_site)
    except (DomainError, TypeError) as exc:
        r.err(p, str(exc))
        return None


def _capacity(r: _Reader, raw: dict) -> dict[str, CapacitySpec]:
    out = {}
    for name, d in raw.items():
        p = f"capacity.{name}"
        if not isinstance(d, dict):
            r.err(p, "expected a mapping")
            continue
        n_err = len(r.errors)
        kw = dict(
            numerology=r.num(d, "numerology", p, integer=True, lo=0, hi=6),
            n_prb=r.num(d, "n_prb", p, integer=True, lo=1),
            v_layers_dl=r.num(d, "layers_dl", p, integer=True, lo=1, hi=8, default=4),
            v_layers_ul=r.num(d, "layers_ul", p, integer=True, lo=1, hi=8, default=4),
            q_m_dl=r.num(d, "qm_dl", p, integer=True, lo=1, hi=8, default=8),
            q_m_ul=r.num(d, "qm_ul", p, integer=True, lo=1, hi=8, default=8),
            overhead_dl=r.num(d, "overhead_dl", p, lo=0.0, hi=1.0),
            overhead_ul=r.num(d, "overhead_ul", p, lo=0.0, hi=1.0),
            scaling=r.num(d, "scaling", p, default=1.0),
            carriers=r.num(d, "carriers", p, integer=True, lo=1, default=1),
            bandwidth=r.qty(d, "bandwidth", "frequency", p, positive=True),
        )
        users = r.num(d, "simultaneous_users", p, integer=True, lo=0)
        per_site = r.num(d, "max_users_per_site", p, integer=True, lo=1)
        band = r.text(d, "band", p, default=name)
        freq = r.qty(d, "frequency", "frequency", p, positive=True)
        scs = r.qty(d, "scs", "frequency", p, default=None, positive=True)
        traffic_raw = r.section(d, "traffic", p) or {}
        if len(r.errors) > n_err:
            continue
        try:
            params = NrCarrierCapacityParams(**kw)
        except DomainError as exc:
            r.err(p, str(exc))
            continue
        if scs is not None and abs(scs - params.scs) > 1e-6:
            r.err(f"{p}.scs", f"{scs / 1e3:g} kHz does not match numerology "
                              f"{params.numerology} ({params.scs / 1e3:g} kHz)")
        tp = f"{p}.traffic"
        dl = _traffic(r, traffic_raw, tp, "DL", users, per_site)
        ul = _traffic(r, traffic_raw, tp, "UL", users, per_site)
        if dl is not None and ul is not None:
            out[name] = CapacitySpec(band, freq, params, users, per_site, dl, ul)
    return out


def _scenario(r: _Reader, d: dict, cfg_links, cfg_capacity) -> ScenarioSpec:
    p = "scenario"
    poly_raw = d.get("polygon")
    polygon: list[tuple[float, float]] = []
    if not isinstance(poly_raw, list) or len(poly_raw) < 3:
        r.err(f"{p}.polygon", "expected a list of at least three 'x m, y m' vertices")
    else:
        for i, v in enumerate(poly_raw):
            polygon.append(r.xy({i: v}, i, f"{p}.polygon"))
    ue = r.section(d, "ue", p) or {}
    bs_sites = []
    names: list[str] = []
    for i, b in enumerate(d.get("bs_sites") or []):
        bp = f"{p}.bs_sites[{i}]"
        if not isinstance(b, dict):
            r.err(bp, "expected a mapping")
            continue
        name = r.text(b, "name", bp, default=f"bs{i}")
        if name in names:
            r.err(f"{bp}.name", f"duplicate BS name {name!r}")
        names.append(name)
        cap = r.text(b, "capacity_set", bp, default=None)
        if cap is not None and cap not in cfg_capacity:
            r.err(f"{bp}.capacity_set", f"dangling reference {cap!r}")
        bs_sites.append(BsSpec(
            name=name, position=r.xy(b, "position", bp),
            tx_power=r.qty(b, "tx_power", "power", bp),
            antenna_gain=r.qty(b, "antenna_gain", "db", bp, default=0.0),
            feeder_loss=r.qty(b, "feeder_loss", "db", bp, default=0.0, nonneg=True),
            frequency=r.qty(b, "frequency", "frequency", bp, positive=True),
            bandwidth=r.qty(b, "bandwidth", "frequency", bp, positive=True),
            height=r.qty(b, "height", "length", bp, positive=True),
            state=r.text(b, "state", bp, choices=(LOS, NLOS), default=LOS),
            capacity_set=cap,
        ))
    if not d.get("bs_sites"):
        r.err(f"{p}.bs_sites", "at least one BS is required")
    panels = []
    for i, rp in enumerate(d.get("ris_panels") or []):
        pp = f"{p}.ris_panels[{i}]"
        if not isinstance(rp, dict):
            r.err(pp, "expected a mapping")
            continue
        serving = r.text(rp, "serving_bs", pp)
        if serving and serving not in names:
            r.err(f"{pp}.serving_bs", f"dangling reference {serving!r}")
        panels.append(RisPanelSpec(
            name=r.text(rp, "name", pp, default=f"ris{i}"),
            position=r.xy(rp, "position", pp), serving_bs=serving,
            gain=r.qty(rp, "gain", "db", pp, default=15.0),
            reflection_loss=r.qty(rp, "reflection_loss", "db", pp, default=1.0, nonneg=True),
            height=r.qty(rp, "height", "length", pp, positive=True),
            state=r.text(rp, "state", pp, choices=(LOS, NLOS), default=LOS),
            pl_bs_ris=r.qty(rp, "pl_bs_ris", "db", pp, default=None, nonneg=True),
        ))
    overlay = None
    ov = r.section(d, "ntn_overlay", p, required=False)
    if ov is not None:
        op = f"{p}.ntn_overlay"
        link = r.text(ov, "link", op)
        if link and link not in cfg_links:
            r.err(f"{op}.link", f"dangling reference {link!r}")
        cap = r.text(ov, "capacity_set", op, default=None)
        if cap is not None and cap not in cfg_capacity:
            r.err(f"{op}.capacity_set", f"dangling reference {cap!r}")
        co = ov.get("co_channel", False)
        if not isinstance(co, bool):
            r.err(f"{op}.co_channel", "expected true or false")
        overlay = OverlaySpec(link, cap, bool(co),
                              r.qty(ov, "beamwidth", "angle", op, default=None, positive=True))
    th = r.section(d, "thresholds", p, required=False) or {}
    return ScenarioSpec(
        polygon=tuple(polygon),
        resolution=r.qty(d, "resolution", "length", p, positive=True),
        ue_noise_figure=r.qty(ue, "noise_figure", "db", f"{p}.ue", nonneg=True),
        ue_height=r.qty(ue, "height", "length", f"{p}.ue", positive=True),
        bs_sites=tuple(bs_sites), ris_panels=tuple(panels), ntn_overlay=overlay,
        rsrp_threshold=r.qty(th, "rsrp", "power", f"{p}.thresholds", default=-130.0),
        sinr_target=r.qty(th, "sinr", "db", f"{p}.thresholds", default=10.0),
    )


def _uma(r: _Reader, d: dict | None) -> UmaCoefficients:
    if not d:
        return UmaCoefficients()
    base = UmaCoefficients()
    kw = {}
    for k, v in d.items():
        if not hasattr(base, k):
            r.err(f"uma.{k}", "unknown coefficient")
        elif k == "use_breakpoint":
            if not isinstance(v, bool):
                r.err(f"uma.{k}", "expected true or false")
            kw[k] = bool(v)
        elif k in ("min_distance_m", "max_distance_m", "effective_env_height"):
            kw[k] = r.qty(d, k, "length", "uma", positive=True)
        else:
            kw[k] = r.num(d, k, "uma")
    return UmaCoefficients(**kw)


def parse_config(data: Any, source: str = "<config>") -> PlanningConfig:
    if data is None:
        raise ConfigError([("", "empty configuration")], source)
    if not isinstance(data, dict):
        raise ConfigError([("", f"top level must be a mapping, got {type(data).__name__}")],
                          source)
    r = _Reader()
    known = {"name", "ntn_links", "ris_budget", "coverage", "capacity", "scenario", "uma",
             "output_dir"}
    for k in sorted(set(data) - known, key=str):
        r.err(str(k), "unknown section")
    name = r.text(data, "name", "", default="plan")
    uma = _uma(r, r.section(data, "uma", "", required=False))
    ntn_raw = r.section(data, "ntn_links", "", required=False) or {}
    ntn = _ntn_links(r, ntn_raw)
    ris_raw = r.section(data, "ris_budget", "", required=False)
    ris = _ris_budget(r, ris_raw) if ris_raw is not None else None
    cov_raw = r.section(data, "coverage", "", required=False)
    cov = _coverage(r, cov_raw, ris) if cov_raw is not None else None
    cap_raw = r.section(data, "capacity", "", required=False) or {}
    cap = _capacity(r, cap_raw)
    sc_raw = r.section(data, "scenario", "", required=False)
    # references resolve against declared names so an invalid entry is not
    # reported a second time as dangling
    sc = _scenario(r, sc_raw, set(ntn_raw), set(cap_raw)) if sc_raw is not None else None
    if r.errors:
        raise ConfigError(r.errors, source)
    return PlanningConfig(name=name, ntn_links=ntn, ris_budget=ris, coverage=cov,
                          capacity=cap, scenario=sc, uma=uma,
                          output_dir=str(data.get("output_dir", "out")), source=source)


def load_config(path: str | Path) -> PlanningConfig:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}, column {mark.column + 1}" if mark else "unknown position"
        problem = getattr(exc, "problem", None) or str(exc)
        raise ConfigError([(where, f"YAML parse error: {problem}")], str(path)) from None
    return parse_config(data, str(path))


def bundled_config_path(name: str = "quito-stadium") -> Path:
    return Path(str(resources.files("radioplan").joinpath(f"data/{name}.yaml")))


# --- serialisation ----------------------------------------------------------------

def _q(v: float, kind: str) -> str:
    return format_quantity(v, kind)


def _xy(p: tuple[float, float]) -> str:
    return f"{p[0]!r} m, {p[1]!r} m"


def config_to_dict(cfg: PlanningConfig) -> dict:
    """Canonical-unit mapping that ``parse_config`` reads back to an equal config."""
    out: dict[str, Any] = {"name": cfg.name, "output_dir": cfg.output_dir}
    if cfg.uma != UmaCoefficients():
        u = cfg.uma
        out["uma"] = {k: (_q(getattr(u, k), "length")
                          if k in ("min_distance_m", "max_distance_m", "effective_env_height")
                          else getattr(u, k)) for k in u.__dataclass_fields__}
    if cfg.ntn_links:
        out["ntn_links"] = {
            n: {"case": s.case, "direction": s.direction,
                "frequency": _q(s.frequency, "frequency"),
                "bandwidth": _q(s.bandwidth, "frequency"), "eirp": _q(s.eirp, "power"),
                "g_over_t": _q(s.g_over_t, "gt"), "altitude": _q(s.altitude, "length"),
                "elevation": _q(s.elevation, "angle"),
                "losses": {k: _q(getattr(s.losses, k), "db")
                           for k in ("atmospheric", "shadow_margin", "scintillation",
                                     "polarization", "additional")}}
            for n, s in cfg.ntn_links.items()}
    if cfg.ris_budget:
        rb = cfg.ris_budget
        links = {}
        for n, l in rb.links.items():
            e: dict[str, Any] = {"shadow_margin": _q(l.shadow_margin, "db"),
                                 "penetration_margin": _q(l.penetration_margin, "db"),
                                 "body_losses": _q(l.body_losses, "db")}
            if l.mil is not None:
                e["mil"] = _q(l.mil, "db")
            if l.mil_inputs is not None:
                m = l.mil_inputs
                e["mil_inputs"] = {"tx_power": _q(m.tx_power, "power"),
                                   "tx_losses": _q(m.tx_losses, "db"),
                                   "rx_gain": _q(m.rx_gain, "db"),
                                   "rx_losses": _q(m.rx_losses, "db"),
                                   "noise_figure": _q(m.noise_figure, "db"),
                                   "bandwidth": _q(m.bandwidth, "frequency"),
                                   "required_snr": _q(m.required_snr, "db")}
            dep: dict[str, Any] = {"model": l.model}
            if l.distance is not None:
                dep["distance"] = _q(l.distance, "length")
            if l.segments:
                dep["segments"] = [_q(x, "db") for x in l.segments]
            e["deployment"] = dep
            links[n] = e
        out["ris_budget"] = {"frequency": _q(rb.frequency, "frequency"),
                             "bs_height": _q(rb.bs_height, "length"),
                             "ue_height": _q(rb.ue_height, "length"),
                             "direct_link": rb.direct_link, "links": links}
    if cfg.coverage:
        c = cfg.coverage
        out["coverage"] = {"target_area": _q(c.target_area, "area"), "policy": c.policy,
                           "links": {n: {"radius": _q(l.radius, "length"),
                                         "budget_link": l.budget_link}
                                     for n, l in c.links.items()}}
    if cfg.capacity:
        caps = {}
        for n, s in cfg.capacity.items():
            pr = s.params
            caps[n] = {
                "band": s.band, "frequency": _q(s.frequency, "frequency"),
                "numerology": pr.numerology, "n_prb": pr.n_prb,
                "layers_dl": pr.v_layers_dl, "layers_ul": pr.v_layers_ul,
                "qm_dl": pr.q_m_dl, "qm_ul": pr.q_m_ul,
                "overhead_dl": pr.overhead_dl, "overhead_ul": pr.overhead_ul,
                "scaling": pr.scaling, "carriers": pr.carriers,
                "bandwidth": _q(pr.bandwidth, "frequency"),
                "simultaneous_users": s.simultaneous_users,
                "max_users_per_site": s.max_users_per_site,
                "traffic": {
                    "user_rate_dl": _q(s.traffic_dl.per_user_busy_hour_rate, "rate"),
                    "user_rate_ul": _q(s.traffic_ul.per_user_busy_hour_rate, "rate"),
                    "duty_dl": s.traffic_dl.duty_ratio, "duty_ul": s.traffic_ul.duty_ratio,
                    "connected_ratio": s.traffic_dl.connected_ratio,
                    "overload_threshold": s.traffic_dl.overload_threshold,
                },
            }
        out["capacity"] = caps
    if cfg.scenario:
        s = cfg.scenario
        sc: dict[str, Any] = {
            "polygon": [_xy(v) for v in s.polygon],
            "resolution": _q(s.resolution, "length"),
            "ue": {"noise_figure": _q(s.ue_noise_figure, "db"),
                   "height": _q(s.ue_height, "length")},
            "thresholds": {"rsrp": _q(s.rsrp_threshold, "power"),
                           "sinr": _q(s.sinr_target, "db")},
            "bs_sites": [
                {k: v for k, v in {
                    "name": b.name, "position": _xy(b.position),
                    "tx_power": _q(b.tx_power, "power"),
                    "antenna_gain": _q(b.antenna_gain, "db"),
                    "feeder_loss": _q(b.feeder_loss, "db"),
                    "frequency": _q(b.frequency, "frequency"),
                    "bandwidth": _q(b.bandwidth, "frequency"),
                    "height": _q(b.height, "length"), "state": b.state,
                    "capacity_set": b.capacity_set}.items() if v is not None}
                for b in s.bs_sites],
            "ris_panels": [
                {k: v for k, v in {
                    "name": rp.name, "position": _xy(rp.position), "serving_bs": rp.serving_bs,
                    "gain": _q(rp.gain, "db"), "reflection_loss": _q(rp.reflection_loss, "db"),
                    "height": _q(rp.height, "length"), "state": rp.state,
                    "pl_bs_ris": None if rp.pl_bs_ris is None else _q(rp.pl_bs_ris, "db"),
                }.items() if v is not None}
                for rp in s.ris_panels],
        }
        if s.ntn_overlay:
            o = s.ntn_overlay
            sc["ntn_overlay"] = {k: v for k, v in {
                "link": o.link, "capacity_set": o.capacity_set, "co_channel": o.co_channel,
                "beamwidth": None if o.beamwidth is None else _q(o.beamwidth, "angle"),
            }.items() if v is not None}
        out["scenario"] = sc
    return out


def dump_config(cfg: PlanningConfig) -> str:
    return yaml.safe_dump(config_to_dict(cfg), sort_keys=False, allow_unicode=True)
