import math

import pytest
from hypothesis import given, settings, strategies as st

from radioplan.dimensioning import (
    CoveragePlan, NoCoverageError, NrCarrierCapacityParams, TrafficProfile, cell_area,
    max_cell_radius, max_cell_radius_for, model_path_loss, peak_data_rate, sites_for_capacity,
    sites_for_coverage, subscribers_supported,
)
from radioplan.propagation import UmaParams, uma_path_loss
from radioplan.units import DomainError

N256 = NrCarrierCapacityParams(numerology=0, n_prb=106, bandwidth=20e6)
N78 = NrCarrierCapacityParams(numerology=1, n_prb=273, bandwidth=100e6)
N510 = NrCarrierCapacityParams(numerology=3, n_prb=264, bandwidth=400e6,
                               overhead_dl=0.18, overhead_ul=0.10)


@pytest.mark.parametrize("p, dl, ul", [
    (N256, 0.45370332, 0.48535704),
    (N78, 2.33700012, 2.50004664),
    (N510, 8.61936768, 9.4602816),
])
def test_peak_rates_frozen(p, dl, ul):
    assert peak_data_rate(p, "DL") / 1e9 == pytest.approx(dl, abs=1e-6)
    assert peak_data_rate(p, "UL") / 1e9 == pytest.approx(ul, abs=1e-6)


def test_scs_and_symbol():
    assert N78.scs == 30e3
    assert N78.symbol_duration == pytest.approx(1e-3 / 28)


@pytest.mark.parametrize("kw", [dict(numerology=7, n_prb=10), dict(numerology=0, n_prb=0),
                                dict(numerology=0, n_prb=10, overhead_dl=1.2),
                                dict(numerology=0, n_prb=10, v_layers_dl=0)])
def test_capacity_params_validation(kw):
    with pytest.raises(DomainError):
        NrCarrierCapacityParams(**kw)


def test_peak_rate_direction():
    with pytest.raises(DomainError):
        peak_data_rate(N78, "SL")


@given(st.integers(1, 275), st.integers(1, 8), st.integers(0, 4))
def test_peak_rate_linear(n_prb, layers, mu):
    a = NrCarrierCapacityParams(numerology=mu, n_prb=n_prb, v_layers_dl=layers)
    b = NrCarrierCapacityParams(numerology=mu, n_prb=2 * n_prb, v_layers_dl=layers)
    assert peak_data_rate(b) == pytest.approx(2 * peak_data_rate(a), rel=1e-12)


def test_cell_area_golden():
    assert cell_area(375.0) == pytest.approx(0.365625, abs=1e-15)
    assert cell_area(70.0) == pytest.approx(0.01274, abs=1e-15)
    assert cell_area(0.0) == 0.0
    with pytest.raises(DomainError):
        cell_area(-1.0)


def test_sites_for_coverage_policies():
    assert sites_for_coverage(0.041, cell_area(375.0), "ceil") == 1
    assert sites_for_coverage(0.041, cell_area(375.0), "nearest") == 1
    assert sites_for_coverage(0.041, cell_area(70.0), "ceil") == 4
    assert sites_for_coverage(0.041, cell_area(70.0), "nearest") == 3
    assert sites_for_coverage(0.0, 1.0) == 0
    # an exact multiple is not bumped up by float noise
    assert sites_for_coverage(0.3, 0.1, "ceil") == 3
    with pytest.raises(DomainError):
        sites_for_coverage(1.0, 0.0)
    with pytest.raises(DomainError):
        sites_for_coverage(1.0, 1.0, "floor")


@given(st.floats(0.001, 100.0), st.floats(10.0, 5000.0))
def test_ceil_sites_cover_target(area, radius):
    assert sites_for_coverage(area, cell_area(radius), "ceil") * cell_area(radius) >= area * (1 - 1e-9)


def test_coverage_plan():
    assert CoveragePlan(70.0, 0.041, "nearest").sites_required == 3


def test_sites_for_capacity():
    assert sites_for_capacity(15000, 10000) == 2
    assert sites_for_capacity(5000, 10000) == 1
    assert sites_for_capacity(20000, 10000) == 2
    assert sites_for_capacity(0, 10000) == 0
    with pytest.raises(DomainError):
        sites_for_capacity(10, 0)


def test_subscribers_supported():
    t = TrafficProfile(50e6, 0.1, 0.9, 0.9)
    assert subscribers_supported(peak_data_rate(N78), t) == 467
    assert subscribers_supported(5e6, t) == 1  # 4.5 Mbps allowed vs 4.5 Mbps per user
    assert subscribers_supported(4.5e6, t) == 0
    with pytest.raises(DomainError):
        TrafficProfile(50e6, 0.0, 0.9, 0.9)


def test_radius_inversion_golden():
    apl = 97.3538
    r = max_cell_radius_for(apl, "uma-los", 3.5)
    assert r == pytest.approx(454.6, abs=0.2)
    assert uma_path_loss(UmaParams(r, 3.5)) <= apl


def test_radius_inversion_errors_and_cap():
    with pytest.raises(NoCoverageError):
        max_cell_radius_for(10.0, "uma-los", 3.5)
    assert max_cell_radius_for(500.0, "uma-los", 3.5) == 5000.0
    with pytest.raises(DomainError):
        model_path_loss("free-space", 3.5)


@settings(max_examples=60)
@given(st.floats(12.0, 4900.0), st.sampled_from(["uma-los", "uma-nlos", "ris-cascade"]))
def test_radius_inversion_round_trip(d, model):
    forward = model_path_loss(model, 3.5, pl_bs_ris=80.0)
    assert abs(max_cell_radius(forward(d), forward) - d) <= 0.5


@pytest.mark.parametrize("rate, user, duty, expected", [
    (454e6, 50e6, 0.1, 90), (2.34e9, 10e6, 0.2, 1170)])
def test_subscribers_worked_examples(rate, user, duty, expected):
    assert subscribers_supported(rate, TrafficProfile(user, duty, 0.9, 0.9)) == expected
    assert subscribers_supported(7e6, TrafficProfile(7e6, 1.0, 1.0, 1.0)) == 1
