import math

import numpy as np
import pytest

from radioplan import _kernels
from radioplan.coverage import (
    EXPORT_HEADER, BsSite, NtnOverlay, RisPanel, Scenario, UeParams, convergence_bound,
    coverage_stats, evaluate_grid, export_grid, nearest_rank, raster_cells, read_grid_export,
)
from radioplan.propagation import UmaParams, uma_path_loss
from radioplan.units import DomainError, NoiseParams, thermal_noise_dbw

SQUARE = ((0.0, 0.0), (200.0, 0.0), (200.0, 200.0), (0.0, 200.0))
BACKENDS = ["numpy", "python"] + (["numba"] if _kernels.HAVE_NUMBA else [])


def _bs(x, y, fc=3.5, bw=100e6, **kw):
    return BsSite((x, y), eirp=34.0, fc=fc, bandwidth=bw, **kw)


def _two_bs(res=10.0, **kw):
    return Scenario(SQUARE, res, (_bs(-150, 100), _bs(350, 100)),
                    (RisPanel((100, 240), 0, height=35.0), RisPanel((60, -40), 1, height=35.0)),
                    **kw)


def test_raster_square_row_major():
    x, y = raster_cells(SQUARE, 50.0)
    assert len(x) == 16
    assert list(x[:4]) == [25.0, 75.0, 125.0, 175.0]
    assert np.all(y[:4] == 25.0)


def test_raster_triangle_excludes_outside():
    tri = ((0, 0), (100, 0), (0, 100))
    x, y = raster_cells(tri, 10.0)
    assert np.all(x + y < 100)
    assert len(x) == 45


@pytest.mark.parametrize("backend", BACKENDS)
def test_point_in_polygon_backends(backend):
    rng = np.random.default_rng(3)
    px, py = rng.uniform(-50, 250, 500), rng.uniform(-50, 250, 500)
    poly = np.array([[0, 0], [200, 0], [100, 80], [200, 200], [0, 200]], dtype=float)
    ref = _kernels.points_in_polygon(px, py, poly[:, 0].copy(), poly[:, 1].copy(), "python")
    got = _kernels.points_in_polygon(px, py, poly[:, 0].copy(), poly[:, 1].copy(), backend)
    assert np.array_equal(ref, got)
    assert ref.sum() > 0


def test_unknown_backend():
    with pytest.raises(ValueError):
        evaluate_grid(_two_bs(), backend="cuda")


@pytest.mark.parametrize("backend", BACKENDS)
def test_backends_agree(backend):
    ref = evaluate_grid(_two_bs(), backend="python")
    got = evaluate_grid(_two_bs(), backend=backend)
    assert np.array_equal(ref.best_server, got.best_server)
    for name in ("rsrp", "sinr", "throughput", "rsrp_per_source"):
        np.testing.assert_allclose(getattr(got, name), getattr(ref, name), rtol=1e-12)


def test_single_bs_sinr_equals_snr_and_closed_form():
    s = Scenario(SQUARE, 20.0, (_bs(-100, 100),))
    g = evaluate_grid(s)
    np.testing.assert_allclose(g.sinr, g.snr, atol=1e-12)
    i = 0
    d = math.hypot(g.x[i] + 100, g.y[i] - 100)
    assert g.rsrp[i] == pytest.approx(34.0 - uma_path_loss(UmaParams(d, 3.5)), abs=1e-9)
    n0 = thermal_noise_dbw(NoiseParams(100e6, 5.0))
    assert g.snr[i] == pytest.approx(g.rsrp[i] - n0, abs=1e-9)


def test_two_bs_midpoint_closed_form():
    # cells on x = 100 are equidistant from both sites
    poly = ((95, 0), (105, 0), (105, 200), (95, 200))
    s = Scenario(poly, 10.0, (_bs(-150, 100), _bs(350, 100)))
    g = evaluate_grid(s)
    n0 = thermal_noise_dbw(NoiseParams(100e6, 5.0))
    p = g.rsrp
    expected = p - 10 * np.log10(10 ** (p / 10) + 10 ** (n0 / 10))
    np.testing.assert_allclose(g.sinr, expected, atol=1e-9)
    assert np.all(g.sinr < 0)


def test_different_channel_does_not_interfere():
    s = Scenario(SQUARE, 20.0, (_bs(-150, 100), _bs(350, 100, fc=3.6)))
    g = evaluate_grid(s)
    assert np.all(g.i_tn == 0)
    np.testing.assert_allclose(g.sinr, g.snr, atol=1e-12)


def test_ris_adds_power_to_served_cells():
    # blocked direct path, panel with a short dedicated feed from the BS
    base = Scenario(SQUARE, 10.0, (_bs(-150, 100, state="NLOS"),))
    with_ris = base.with_ris([RisPanel((100, 240), 0, height=35.0, pl_bs_ris=60.0)])
    a, b = evaluate_grid(base), evaluate_grid(with_ris)
    assert np.all(b.rsrp > a.rsrp)
    assert np.max(b.rsrp - a.rsrp) > 1.0
    np.testing.assert_allclose(b.sinr, b.snr, atol=1e-12)


def test_ris_of_other_bs_is_interference():
    g = evaluate_grid(_two_bs())
    served_by_0 = g.best_server == 0
    assert np.all(g.i_ris[served_by_0] > 0)  # RIS 1 feeds BS 1 which is co-channel


def test_grid_determinism(tmp_path):
    a = export_grid(evaluate_grid(_two_bs(5.0)), tmp_path / "a.csv")
    b = export_grid(evaluate_grid(_two_bs(5.0)), tmp_path / "b.csv")
    assert a.read_bytes() == b.read_bytes()


def test_export_round_trip(tmp_path):
    g = evaluate_grid(_two_bs())
    data = read_grid_export(export_grid(g, tmp_path / "grid.csv"))
    assert tuple(data) == EXPORT_HEADER
    np.testing.assert_allclose(data["sinr_db"], g.sinr, atol=5e-5)
    np.testing.assert_array_equal(data["best_server"], g.best_server)


def test_export_io_error_names_path(tmp_path):
    bad = tmp_path / "missing" / "grid.csv"
    with pytest.raises(OSError, match="missing"):
        export_grid(evaluate_grid(_two_bs(50.0)), bad)


def test_throughput_capped_by_peak():
    s = Scenario(SQUARE, 10.0, (_bs(-50, 100, peak_rate=1e8),))
    g = evaluate_grid(s)
    assert np.all(g.throughput <= 1e8)
    assert np.any(g.throughput == 1e8)


def test_refinement_within_bound():
    s1 = _two_bs(10.0)
    s2 = _two_bs(5.0)
    th = -100.0
    f1 = coverage_stats(evaluate_grid(s1), th, 0.0)
    f2 = coverage_stats(evaluate_grid(s2), th, 0.0)
    bound = convergence_bound(SQUARE, 10.0)
    assert bound == pytest.approx(0.2)
    assert abs(f1["fraction_rsrp"] - f2["fraction_rsrp"]) <= bound
    assert abs(f1["fraction_sinr"] - f2["fraction_sinr"]) <= bound


def test_ntn_overlay_non_co_channel():
    ov = NtnOverlay("Ka", cnr=8.5791, bandwidth=400e6, peak_rate=8.62e9)
    g = evaluate_grid(_two_bs(ntn_overlay=ov))
    np.testing.assert_allclose(g.ntn_sinr, 8.5791)
    expected = 400e6 * math.log2(1 + 10 ** 0.85791)
    np.testing.assert_allclose(g.ntn_throughput, expected)
    assert np.all(g.i_ntn == 0)


def test_ntn_overlay_co_channel_interferes():
    ov = NtnOverlay("S", cnr=6.6, bandwidth=100e6, co_channel=True)
    plain = evaluate_grid(_two_bs())
    g = evaluate_grid(_two_bs(ntn_overlay=ov))
    assert np.all(g.i_ntn > 0)
    assert np.all(g.sinr < plain.sinr)
    assert np.all(g.ntn_sinr < 6.6)


def test_ntn_footprint_limits_overlay():
    ov = NtnOverlay("Ka", cnr=8.0, bandwidth=400e6, footprint_center=(0, 0),
                    footprint_radius=100.0)
    g = evaluate_grid(_two_bs(ntn_overlay=ov))
    outside = np.hypot(g.x, g.y) > 100
    assert np.all(g.ntn_throughput[outside] == 0)
    assert np.all(g.ntn_throughput[~outside] > 0)


def test_coverage_stats_fields():
    st = coverage_stats(evaluate_grid(_two_bs()), -130.0, 10.0)
    assert st["cells"] == 400
    assert st["p5_throughput_bps"] <= st["p50_throughput_bps"] <= st["p95_throughput_bps"]
    assert "ntn_mean_throughput_bps" not in st


def test_nearest_rank():
    v = np.arange(1, 101, dtype=float)
    assert nearest_rank(v, 5) == 5.0
    assert nearest_rank(v, 50) == 50.0
    assert nearest_rank(v, 100) == 100.0
    with pytest.raises(DomainError):
        nearest_rank(np.array([]), 50)


@pytest.mark.parametrize("kw", [dict(resolution=0.0), dict(bs_sites=()),
                                dict(polygon=((0, 0), (1, 1), (2, 2)))])
def test_scenario_validation(kw):
    args = dict(polygon=SQUARE, resolution=10.0, bs_sites=(_bs(0, 0),))
    args.update(kw)
    with pytest.raises(DomainError):
        Scenario(**args)


def test_dangling_ris_index():
    with pytest.raises(DomainError):
        Scenario(SQUARE, 10.0, (_bs(0, 0),), (RisPanel((0, 0), 3),))


def test_ue_noise_figure_shifts_snr():
    a = evaluate_grid(Scenario(SQUARE, 50.0, (_bs(0, 0),), ue=UeParams(5.0)))
    b = evaluate_grid(Scenario(SQUARE, 50.0, (_bs(0, 0),), ue=UeParams(8.0)))
    np.testing.assert_allclose(a.snr - b.snr, 3.0, atol=1e-9)
