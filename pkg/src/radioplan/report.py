"""Run planning commands against a validated config and render the tables."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from radioplan import coverage as cov
from radioplan.config import COMMANDS, PlanningConfig
from radioplan.dimensioning import (
    NoCoverageError,
    cell_area,
    max_cell_radius_for,
    model_path_loss,
    peak_data_rate,
    sites_for_capacity,
    sites_for_coverage,
    subscribers_supported,
)
from radioplan.geometry import beam_footprint_diameter, slant_range
from radioplan.link_budget import RisLinkBudget, cnr_breakdown, mil, ris_needed
from radioplan.propagation import ris_cascade_path_loss
from radioplan.units import DomainError, NoiseParams, thermal_noise_dbw


class PlanError(Exception):
    """A computation failed; ``path`` points at the config entry responsible."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


@dataclass(frozen=True)
class Column:
    name: str
    fmt: str = ".4f"  # format spec, or "" for text/int


@dataclass
class Table:
    name: str
    title: str
    columns: tuple[Column, ...]
    rows: list[tuple] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def formatted_rows(self) -> list[list[str]]:
        return [[_fmt(v, c.fmt) for v, c in zip(row, self.columns)] for row in self.rows]

    def column(self, name: str) -> list:
        i = [c.name for c in self.columns].index(name)
        return [r[i] for r in self.rows]

    def row(self, key) -> dict:
        for r in self.rows:
            if r[0] == key:
                return dict(zip((c.name for c in self.columns), r))
        raise KeyError(key)


def _fmt(v, spec: str) -> str:
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    if isinstance(v, bool):
        return "yes" if v else "no"
    if spec and isinstance(v, (int, float)):
        return format(v, spec)
    return str(v)


@dataclass
class PlanningReport:
    name: str
    tables: dict[str, Table] = field(default_factory=dict)
    grid: cov.GridResult | None = None
    files: list[Path] = field(default_factory=list)


# --- individual commands --------------------------------------------------------

def ntn_budget_table(cfg: PlanningConfig) -> Table:
    t = Table("ntn_budget", "NTN link budget", (
        Column("link", ""), Column("case", ""), Column("direction", ""),
        Column("frequency_ghz", ".2f"), Column("eirp_dbm", ".2f"),
        Column("g_over_t_db_per_k", ".2f"), Column("bandwidth_mhz", ".3f"),
        Column("slant_range_km", ".3f"), Column("fspl_db", ".4f"),
        Column("atmospheric_db", ".2f"), Column("shadow_margin_db", ".2f"),
        Column("scintillation_db", ".2f"), Column("polarization_db", ".2f"),
        Column("additional_db", ".2f"), Column("cnr_db", ".4f"),
    ))
    for name, spec in cfg.ntn_links.items():
        try:
            link = spec.to_link()
            res = cnr_breakdown(link)
        except DomainError as exc:
            raise PlanError(f"ntn_links.{name}", str(exc)) from exc
        lo = spec.losses
        t.rows.append((
            name, spec.case, spec.direction, spec.frequency / 1e9, spec.eirp + 30.0,
            spec.g_over_t, spec.bandwidth / 1e6, link.geometry.slant_range_m / 1e3, res.fspl,
            lo.atmospheric, lo.shadow_margin, lo.scintillation, lo.polarization,
            lo.additional, res.cnr,
        ))
    return t


def _link_mil(spec, path: str) -> float:
    if spec.mil is not None:
        return spec.mil
    m = spec.mil_inputs
    try:
        floor = thermal_noise_dbw(NoiseParams(m.bandwidth, m.noise_figure))
    except DomainError as exc:
        raise PlanError(f"{path}.mil_inputs", str(exc)) from exc
    return mil(m.tx_power, m.tx_losses, m.rx_gain, m.rx_losses, floor, m.required_snr)


def _deployment_mpl(cfg: PlanningConfig, spec, path: str) -> float:
    rb = cfg.ris_budget
    try:
        if spec.model == "ris-cascade":
            return ris_cascade_path_loss(*spec.segments)
        forward = model_path_loss(spec.model, rb.frequency / 1e9, rb.bs_height, rb.ue_height,
                                  coeffs=cfg.uma)
        return forward(spec.distance)
    except DomainError as exc:
        raise PlanError(f"{path}.deployment", str(exc)) from exc


def ris_budgets(cfg: PlanningConfig) -> dict[str, RisLinkBudget]:
    out = {}
    for name, spec in cfg.ris_budget.links.items():
        path = f"ris_budget.links.{name}"
        try:
            out[name] = RisLinkBudget(
                _link_mil(spec, path), spec.shadow_margin, spec.penetration_margin,
                spec.body_losses, _deployment_mpl(cfg, spec, path))
        except DomainError as exc:
            raise PlanError(path, str(exc)) from exc
    return out


def ris_gap_table(cfg: PlanningConfig) -> Table:
    t = Table("ris_gap", "RIS-TN link budget and path-loss GAP", (
        Column("link", ""), Column("deployment_model", ""), Column("mil_db", ".4f"),
        Column("shadow_margin_db", ".2f"), Column("penetration_margin_db", ".2f"),
        Column("body_losses_db", ".2f"), Column("available_path_loss_db", ".4f"),
        Column("deployment_mpl_db", ".7f"), Column("gap_db", ".4f"), Column("ris_needed", ""),
    ))
    if cfg.ris_budget is None:
        raise PlanError("ris_budget", "section missing from config")
    budgets = ris_budgets(cfg)
    direct = cfg.ris_budget.direct_link
    for name, b in budgets.items():
        spec = cfg.ris_budget.links[name]
        # the deployment rule only applies to the direct link
        verdict = ris_needed(b.gap) if name == direct else None
        t.rows.append((name, spec.model, b.mil, b.shadow_margin, b.penetration_margin,
                       b.body_losses, b.available_path_loss, b.deployment_mpl, b.gap, verdict))
    g = budgets[direct].gap
    verdict = "RIS must be added" if ris_needed(g) else "no RIS needed"
    t.notes.append(f"Verdict: {verdict} (direct link {direct} GAP {g:+.4f} dB; "
                   "GAP = deployment MPL - available path loss, RIS added when GAP < 0)")
    return t


def coverage_table(cfg: PlanningConfig, policy: str | None = None) -> Table:
    if cfg.coverage is None:
        raise PlanError("coverage", "section missing from config")
    c = cfg.coverage
    policy = policy or c.policy
    t = Table("coverage", "Coverage planning", (
        Column("link", ""), Column("cell_radius_m", ".1f"), Column("path_loss_db", ".4f"),
        Column("cell_area_km2", ".6f"), Column("target_area_km2", ".6f"),
        Column("sites_ceil", "d"), Column("sites_nearest", "d"),
        Column("sites_required", "d"), Column("radius_from_apl_m", ".1f"),
    ))
    budgets = ris_budgets(cfg) if cfg.ris_budget else {}
    for name, link in c.links.items():
        path = f"coverage.links.{name}"
        try:
            area = cell_area(link.radius)
            n_ceil = sites_for_coverage(c.target_area, area, "ceil")
            n_near = sites_for_coverage(c.target_area, area, "nearest")
        except DomainError as exc:
            raise PlanError(path, str(exc)) from exc
        b = budgets[link.budget_link]
        spec = cfg.ris_budget.links[link.budget_link]
        radius_apl = math.nan
        if spec.model != "ris-cascade":
            rb = cfg.ris_budget
            try:
                radius_apl = max_cell_radius_for(b.available_path_loss, spec.model,
                                                 rb.frequency / 1e9, h_tx=rb.bs_height,
                                                 h_ut=rb.ue_height, coeffs=cfg.uma)
            except NoCoverageError:
                pass
        t.rows.append((name, link.radius, b.deployment_mpl, area, c.target_area, n_ceil,
                       n_near, n_ceil if policy == "ceil" else n_near, radius_apl))
    t.notes.append(f"Site rounding policy: {policy} (both ceil and nearest counts reported)")
    return t


def capacity_table(cfg: PlanningConfig) -> Table:
    t = Table("capacity", "Capacity planning", (
        Column("set", ""), Column("band", ""), Column("frequency_ghz", ".2f"),
        Column("peak_dl_gbps", ".4f"), Column("peak_ul_gbps", ".4f"),
        Column("simultaneous_ues", "d"), Column("max_users_per_site", "d"),
        Column("bs_required", "d"), Column("subscribers_dl", "d"), Column("subscribers_ul", "d"),
    ))
    for name, s in cfg.capacity.items():
        try:
            dl = peak_data_rate(s.params, "DL")
            ul = peak_data_rate(s.params, "UL")
            t.rows.append((
                name, s.band, s.frequency / 1e9, dl / 1e9, ul / 1e9, s.simultaneous_users,
                s.max_users_per_site, sites_for_capacity(s.simultaneous_users,
                                                         s.max_users_per_site),
                subscribers_supported(dl, s.traffic_dl), subscribers_supported(ul, s.traffic_ul),
            ))
        except DomainError as exc:
            raise PlanError(f"capacity.{name}", str(exc)) from exc
    return t


def build_scenario(cfg: PlanningConfig) -> tuple[cov.Scenario, float, float]:
    """Scenario plus (rsrp threshold dBW, SINR target dB) from the config."""
    sc = cfg.scenario
    if sc is None:
        raise PlanError("scenario", "section missing from config")
    names = [b.name for b in sc.bs_sites]
    bss = []
    for i, b in enumerate(sc.bs_sites):
        peak = math.inf
        if b.capacity_set is not None:
            peak = peak_data_rate(cfg.capacity[b.capacity_set].params, "DL")
        bss.append(cov.BsSite(
            position=b.position, eirp=b.tx_power + b.antenna_gain - b.feeder_loss,
            fc=b.frequency / 1e9, bandwidth=b.bandwidth, peak_rate=peak, height=b.height,
            state=b.state, name=b.name))
    panels = [cov.RisPanel(position=r.position, serving_bs=names.index(r.serving_bs),
                           gain=r.gain, reflection_loss=r.reflection_loss, height=r.height,
                           pl_bs_ris=r.pl_bs_ris, state=r.state, name=r.name)
              for r in sc.ris_panels]
    overlay = None
    if sc.ntn_overlay is not None:
        o = sc.ntn_overlay
        spec = cfg.ntn_links[o.link]
        try:
            res = cnr_breakdown(spec.to_link())
            radius = math.inf
            if o.beamwidth is not None:
                d = slant_range(spec.altitude, spec.elevation)
                radius = beam_footprint_diameter(d, o.beamwidth) / 2.0
        except DomainError as exc:
            raise PlanError("scenario.ntn_overlay", str(exc)) from exc
        peak = math.inf
        if o.capacity_set is not None:
            peak = peak_data_rate(cfg.capacity[o.capacity_set].params, spec.direction)
        xs = [p[0] for p in sc.polygon]
        ys = [p[1] for p in sc.polygon]
        overlay = cov.NtnOverlay(
            band=spec.case, cnr=res.cnr, bandwidth=spec.bandwidth, peak_rate=peak,
            co_channel=o.co_channel,
            footprint_center=(0.5 * (min(xs) + max(xs)), 0.5 * (min(ys) + max(ys))),
            footprint_radius=radius)
    try:
        scenario = cov.Scenario(sc.polygon, sc.resolution, tuple(bss), tuple(panels), overlay,
                                cov.UeParams(sc.ue_noise_figure, sc.ue_height), cfg.uma)
    except DomainError as exc:
        raise PlanError("scenario", str(exc)) from exc
    return scenario, sc.rsrp_threshold, sc.sinr_target


_SUMMARY_FMT = {
    "cells": "d", "fraction_rsrp": ".4f", "fraction_sinr": ".4f",
}


def grid_summary_table(stats: dict) -> Table:
    t = Table("grid_summary", "Coverage raster summary",
              (Column("metric", ""), Column("value", "")))
    for k, v in stats.items():
        if isinstance(v, int):
            t.rows.append((k, v))
        else:
            t.rows.append((k, format(v, _SUMMARY_FMT.get(k, ".4f"))))
    return t


def run_map(cfg: PlanningConfig, out_dir: Path | None) -> tuple[Table, cov.GridResult, Path | None]:
    scenario, rsrp_th, sinr_t = build_scenario(cfg)
    try:
        grid = cov.evaluate_grid(scenario)
        stats = cov.coverage_stats(grid, rsrp_th, sinr_t)
    except DomainError as exc:
        raise PlanError("scenario", str(exc)) from exc
    path = None
    if out_dir is not None:
        path = cov.export_grid(grid, Path(out_dir) / "grid.csv")
    return grid_summary_table(stats), grid, path


def run_plan(cfg: PlanningConfig, commands: Iterable[str] = COMMANDS,
             out_dir: str | Path | None = None, policy: str | None = None) -> PlanningReport:
    """Run the selected commands in a fixed order; ``map`` also writes grid.csv."""
    commands = set(commands)
    unknown = commands - set(COMMANDS)
    if unknown:
        raise ValueError(f"unknown commands {sorted(unknown)}")
    if out_dir is not None:
        Path(out_dir).mkdir(parents=True, exist_ok=True)
    rep = PlanningReport(cfg.name)
    if "ntn-budget" in commands:
        rep.tables["ntn_budget"] = ntn_budget_table(cfg)
    if "ris-budget" in commands:
        rep.tables["ris_gap"] = ris_gap_table(cfg)
    if "coverage" in commands:
        rep.tables["coverage"] = coverage_table(cfg, policy)
    if "capacity" in commands:
        rep.tables["capacity"] = capacity_table(cfg)
    if "map" in commands:
        table, grid, path = run_map(cfg, out_dir)
        rep.tables["grid_summary"] = table
        rep.grid = grid
        if path is not None:
            rep.files.append(path)
    return rep


# --- rendering ---------------------------------------------------------------------

def table_to_csv(t: Table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([c.name for c in t.columns])
    w.writerows(t.formatted_rows())
    return buf.getvalue()


def table_to_markdown(t: Table) -> str:
    head = [c.name for c in t.columns]
    rows = t.formatted_rows()
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
              for i, h in enumerate(head)]
    line = lambda cells: "| " + " | ".join(c.ljust(w) for c, w in zip(cells, widths)) + " |"  # noqa: E731
    out = [f"## {t.title}", "", line(head), "|" + "|".join("-" * (w + 2) for w in widths) + "|"]
    out += [line(r) for r in rows]
    if t.notes:
        out.append("")
        out += t.notes
    return "\n".join(out) + "\n"


def render_report(rep: PlanningReport, out_dir: str | Path, fmt: str = "csv") -> list[Path]:
    """Write one file per table; returns the paths written."""
    if fmt not in ("csv", "markdown"):
        raise ValueError(f"format must be csv or markdown, got {fmt!r}")
    out_dir = Path(out_dir)
    written = []
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        for name, t in rep.tables.items():
            if fmt == "csv":
                path = out_dir / f"{name}.csv"
                text = table_to_csv(t)
            else:
                path = out_dir / f"{name}.md"
                text = table_to_markdown(t)
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            written.append(path)
    except OSError as exc:
        target = getattr(exc, "filename", None) or out_dir
        raise OSError(f"cannot write report to {target}: {exc.strerror or exc}") from exc
    return written


def read_csv_table(path: str | Path) -> list[dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def summarize(rep: PlanningReport) -> Sequence[str]:
    lines = []
    for t in rep.tables.values():
        lines.append(f"{t.title}: {len(t.rows)} row(s)")
        lines += [f"  {n}" for n in t.notes]
    return lines
