"""Radio network planning for satellite (NTN) and RIS-assisted terrestrial links."""
from radioplan.config import ConfigError, PlanningConfig, load_config, parse_quantity
from radioplan.coverage import Scenario, coverage_stats, evaluate_grid
from radioplan.dimensioning import (
    cell_area,
    max_cell_radius,
    peak_data_rate,
    sites_for_capacity,
    sites_for_coverage,
    subscribers_supported,
)
from radioplan.geometry import max_doppler_shift, one_way_delay, slant_range
from radioplan.link_budget import cnr, coverage_gap, ris_needed, sinr_db
from radioplan.propagation import fspl, ris_cascade_path_loss, uma_path_loss
from radioplan.report import PlanError, render_report, run_plan
from radioplan.units import DomainError, db_to_linear, linear_to_db, power_sum_db

__version__ = "0.1.0"
