"""Raster coverage evaluation for a venue served by terrestrial BSs, RIS
panels and an optional satellite overlay.

Every cell sees the direct UMa path of each BS and the cascaded path through
each RIS panel. A panel re-radiates the carrier of the BS that feeds it, so
its power adds to that BS's signal. The serving BS is the one with the
strongest combined power; co-channel BSs and their panels become
interference.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from radioplan import _kernels
from radioplan.propagation import DEFAULT_UMA, LOS, NLOS, UmaCoefficients
from radioplan.units import DomainError, NoiseParams, thermal_noise_dbw

EXPORT_HEADER = ("x", "y", "best_server", "rsrp_dbw", "sinr_db", "throughput_bps")


@dataclass(frozen=True)
class BsSite:
    position: tuple[float, float]
    eirp: float  # dBW
    fc: float  # GHz
    bandwidth: float  # Hz
    peak_rate: float = math.inf  # bit/s
    height: float = 15.0  # m
    state: str = LOS
    name: str = ""


@dataclass(frozen=True)
class RisPanel:
    position: tuple[float, float]
    serving_bs: int
    gain: float = 15.0  # dB
    reflection_loss: float = 1.0  # dB
    height: float = 15.0  # m
    pl_bs_ris: float | None = None  # dB; computed from geometry when None
    state: str = LOS
    name: str = ""


@dataclass(frozen=True)
class NtnOverlay:
    """Uniform satellite carrier over the footprint disk."""

    band: str
    cnr: float  # dB
    bandwidth: float  # Hz
    peak_rate: float = math.inf
    co_channel: bool = False
    footprint_center: tuple[float, float] = (0.0, 0.0)
    footprint_radius: float = math.inf  # m


@dataclass(frozen=True)
class UeParams:
    noise_figure: float = 5.0  # dB
    height: float = 1.5  # m


@dataclass(frozen=True)
class Scenario:
    polygon: tuple[tuple[float, float], ...]
    resolution: float
    bs_sites: tuple[BsSite, ...]
    ris_panels: tuple[RisPanel, ...] = ()
    ntn_overlay: NtnOverlay | None = None
    ue: UeParams = field(default_factory=UeParams)
    coeffs: UmaCoefficients = DEFAULT_UMA

    def __post_init__(self):
        object.__setattr__(self, "polygon", tuple(tuple(map(float, p)) for p in self.polygon))
        object.__setattr__(self, "bs_sites", tuple(self.bs_sites))
        object.__setattr__(self, "ris_panels", tuple(self.ris_panels))
        if not self.resolution > 0:
            raise DomainError(f"grid resolution must be > 0 m, got {self.resolution}")
        if len(self.polygon) < 3 or _polygon_area(self.polygon) <= 0:
            raise DomainError("target polygon is degenerate")
        if not self.bs_sites:
            raise DomainError("scenario has no base station")
        for i, bs in enumerate(self.bs_sites):
            if bs.state not in (LOS, NLOS):
                raise DomainError(f"bs_sites[{i}].state must be LOS or NLOS")
            if not bs.bandwidth > 0 or not bs.fc > 0:
                raise DomainError(f"bs_sites[{i}] needs positive frequency and bandwidth")
        for i, ris in enumerate(self.ris_panels):
            if not 0 <= ris.serving_bs < len(self.bs_sites):
                raise DomainError(
                    f"ris_panels[{i}].serving_bs={ris.serving_bs} does not name a BS"
                )
            if ris.state not in (LOS, NLOS):
                raise DomainError(f"ris_panels[{i}].state must be LOS or NLOS")

    def with_ris(self, panels: Sequence[RisPanel]) -> "Scenario":
        return Scenario(self.polygon, self.resolution, self.bs_sites, tuple(panels),
                        self.ntn_overlay, self.ue, self.coeffs)


def _polygon_area(poly) -> float:
    x = np.array([p[0] for p in poly])
    y = np.array([p[1] for p in poly])
    return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def _polygon_perimeter(poly) -> float:
    pts = np.asarray(poly, dtype=float)
    return float(np.hypot(*(np.roll(pts, -1, axis=0) - pts).T).sum())


@dataclass
class GridResult:
    x: np.ndarray
    y: np.ndarray
    source_names: tuple[str, ...]
    rsrp_per_source: np.ndarray  # dBW, cells x (BS + RIS)
    best_server: np.ndarray
    rsrp: np.ndarray  # dBW of the serving BS incl. its RIS paths
    snr: np.ndarray
    sinr: np.ndarray
    throughput: np.ndarray
    noise: np.ndarray  # dBW per cell
    i_tn: np.ndarray  # W
    i_ris: np.ndarray  # W
    i_ntn: np.ndarray  # W
    peak_rate: np.ndarray
    ntn_sinr: np.ndarray | None = None
    ntn_throughput: np.ndarray | None = None

    def __len__(self) -> int:
        return int(self.x.shape[0])


def raster_cells(polygon, resolution: float, backend: str | None = None):
    """Cell centres inside the polygon, row-major from the bounding-box origin."""
    pts = np.asarray(polygon, dtype=float)
    x0, y0 = pts.min(axis=0)
    x1, y1 = pts.max(axis=0)
    nx = max(1, math.ceil(round((x1 - x0) / resolution, 9)))
    ny = max(1, math.ceil(round((y1 - y0) / resolution, 9)))
    xs = x0 + (np.arange(nx) + 0.5) * resolution
    ys = y0 + (np.arange(ny) + 0.5) * resolution
    gx, gy = np.meshgrid(xs, ys)  # rows are y, so ravel() is row-major
    gx = gx.ravel()
    gy = gy.ravel()
    inside = _kernels.points_in_polygon(gx, gy, pts[:, 0].copy(), pts[:, 1].copy(), backend)
    return gx[inside], gy[inside]


def _ris_segment_loss(s: Scenario, ris: RisPanel) -> float:
    if ris.pl_bs_ris is not None:
        return float(ris.pl_bs_ris)
    bs = s.bs_sites[ris.serving_bs]
    d = math.dist(bs.position, ris.position)
    d = min(max(d, s.coeffs.min_distance_m), s.coeffs.max_distance_m)
    # the panel takes the UE role on the BS to RIS leg
    return _kernels._uma_scalar(d, bs.fc, bs.height, ris.height, ris.state == NLOS,
                                _kernels.pack_coeffs(s.coeffs))


def evaluate_grid(s: Scenario, backend: str | None = None) -> GridResult:
    """Per-cell received power, serving BS, SINR and capped Shannon throughput."""
    cx, cy = raster_cells(s.polygon, s.resolution, backend)
    if cx.size == 0:
        raise DomainError("polygon contains no grid cell centre; lower the resolution")
    n = cx.size
    bss = s.bs_sites
    riss = s.ris_panels

    # channels: BSs on the same carrier frequency and bandwidth interfere
    chan_ids: dict[tuple[float, float], int] = {}
    bs_chan = np.array([chan_ids.setdefault((b.fc, b.bandwidth), len(chan_ids)) for b in bss],
                       dtype=np.int64)
    f64 = lambda v: np.array(v, dtype=np.float64)  # noqa: E731
    args = (
        cx, cy, float(s.ue.height),
        f64([b.position[0] for b in bss]), f64([b.position[1] for b in bss]),
        f64([b.eirp for b in bss]), f64([b.fc for b in bss]), f64([b.height for b in bss]),
        np.array([b.state == NLOS for b in bss], dtype=np.bool_), bs_chan,
        f64([r.position[0] for r in riss]), f64([r.position[1] for r in riss]),
        f64([r.height for r in riss]), np.array([r.serving_bs for r in riss], dtype=np.int64),
        f64([r.gain - r.reflection_loss for r in riss]),
        f64([_ris_segment_loss(s, r) for r in riss]),
        np.array([r.state == NLOS for r in riss], dtype=np.bool_),
        _kernels.pack_coeffs(s.coeffs),
    )
    direct = np.empty((n, len(bss)))
    via_ris = np.empty((n, len(riss)))
    serving = np.empty(n, dtype=np.int64)
    signal = np.empty(n)
    i_tn = np.empty(n)
    i_ris = np.empty(n)
    _kernels.evaluate_cells(*args, direct, via_ris, serving, signal, i_tn, i_ris,
                            backend=backend)

    ue_nf = s.ue.noise_figure
    noise_bs = np.array([thermal_noise_dbw(NoiseParams(b.bandwidth, ue_nf)) for b in bss])
    noise = noise_bs[serving]
    n0_lin = 10.0 ** (noise / 10.0)
    rsrp = 10.0 * np.log10(signal)

    ov = s.ntn_overlay
    i_ntn = np.zeros(n)
    ntn_sinr = ntn_tput = None
    if ov is not None:
        in_beam = np.hypot(cx - ov.footprint_center[0], cy - ov.footprint_center[1]) \
            <= ov.footprint_radius
        n0_ntn = thermal_noise_dbw(NoiseParams(ov.bandwidth, ue_nf))
        p_ntn = ov.cnr + n0_ntn
        if ov.co_channel:
            i_ntn = np.where(in_beam, 10.0 ** (p_ntn / 10.0), 0.0)
            tn_total = 10.0 ** (direct / 10.0)
            if riss:
                tn_total = np.concatenate([tn_total, 10.0 ** (via_ris / 10.0)], axis=1)
            tn_lin = tn_total.sum(axis=1)
        else:
            tn_lin = np.zeros(n)
        ntn_sinr = np.where(
            in_beam,
            p_ntn - 10.0 * np.log10(tn_lin + 10.0 ** (n0_ntn / 10.0)),
            np.nan,
        )
        ntn_tput = np.where(
            in_beam,
            np.minimum(ov.bandwidth * np.log2(1.0 + 10.0 ** (np.nan_to_num(ntn_sinr) / 10.0)),
                       ov.peak_rate),
            0.0,
        )

    sinr = rsrp - 10.0 * np.log10(i_tn + i_ris + i_ntn + n0_lin)
    snr = rsrp - noise
    bw = np.array([b.bandwidth for b in bss])[serving]
    peak = np.array([b.peak_rate for b in bss])[serving]
    tput = np.minimum(bw * np.log2(1.0 + 10.0 ** (sinr / 10.0)), peak)

    names = tuple(b.name or f"bs{i}" for i, b in enumerate(bss)) + \
        tuple(r.name or f"ris{i}" for i, r in enumerate(riss))
    return GridResult(
        x=cx, y=cy, source_names=names,
        rsrp_per_source=np.concatenate([direct, via_ris], axis=1),
        best_server=serving, rsrp=rsrp, snr=snr, sinr=sinr, throughput=tput,
        noise=noise, i_tn=i_tn, i_ris=i_ris, i_ntn=i_ntn, peak_rate=peak,
        ntn_sinr=ntn_sinr, ntn_throughput=ntn_tput,
    )


def nearest_rank(values: np.ndarray, pct: float) -> float:
    v = np.sort(np.asarray(values, dtype=float))
    if v.size == 0:
        raise DomainError("percentile of an empty set")
    rank = max(1, math.ceil(pct / 100.0 * v.size))
    return float(v[rank - 1])


def coverage_stats(g: GridResult, rsrp_threshold: float, sinr_target: float) -> dict:
    """Coverage fractions and throughput statistics for a grid."""
    if len(g) == 0:
        raise DomainError("empty grid")
    out = {
        "cells": len(g),
        "rsrp_threshold_dbw": float(rsrp_threshold),
        "sinr_target_db": float(sinr_target),
        "fraction_rsrp": float(np.mean(g.rsrp >= rsrp_threshold)),
        "fraction_sinr": float(np.mean(g.sinr >= sinr_target)),
        "mean_sinr_db": float(np.mean(g.sinr)),
        "mean_throughput_bps": float(np.mean(g.throughput)),
        "p5_throughput_bps": nearest_rank(g.throughput, 5),
        "p50_throughput_bps": nearest_rank(g.throughput, 50),
        "p95_throughput_bps": nearest_rank(g.throughput, 95),
    }
    if g.ntn_throughput is not None:
        out["ntn_mean_cnr_db"] = float(np.nanmean(g.ntn_sinr)) if np.any(
            np.isfinite(g.ntn_sinr)) else float("nan")
        out["ntn_mean_throughput_bps"] = float(np.mean(g.ntn_throughput))
    return out


def convergence_bound(polygon, resolution: float) -> float:
    """Perimeter-to-area bound on how much a coverage fraction can move under refinement."""
    return _polygon_perimeter(polygon) * resolution / _polygon_area(polygon)


def export_grid(g: GridResult, path: str | Path) -> Path:
    """Write the per-cell raster as CSV with four decimals."""
    path = Path(path)
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(EXPORT_HEADER)
            for row in zip(g.x, g.y, g.best_server, g.rsrp, g.sinr, g.throughput):
                w.writerow([f"{row[0]:.4f}", f"{row[1]:.4f}", int(row[2]),
                            f"{row[3]:.4f}", f"{row[4]:.4f}", f"{row[5]:.4f}"])
    except OSError as exc:
        raise OSError(f"cannot write grid export {path}: {exc.strerror or exc}") from exc
    return path


def read_grid_export(path: str | Path) -> dict[str, np.ndarray]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    return {k: np.array([float(r[k]) for r in rows]) for k in EXPORT_HEADER}
