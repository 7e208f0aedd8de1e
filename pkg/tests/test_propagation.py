import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from radioplan.geometry import slant_range
from radioplan.propagation import (
    DEFAULT_UMA, LOS, NLOS, EnvLookupError, NtnEnvironment, RisCascade, UmaCoefficients,
    UmaParams, default_environment, fspl, los_probability, ntn_basic_path_loss,
    ntn_total_path_loss, ris_cascade_path_loss, uma_nlos_array, uma_path_loss,
)
from radioplan.units import DomainError

LEO_RANGE = slant_range(600e3, 30.0)


@pytest.mark.parametrize("fc, expected", [(2.0, 159.0995), (20.0, 179.0995), (30.0, 182.6213)])
def test_fspl_golden(fc, expected):
    assert fspl(LEO_RANGE, fc) == pytest.approx(expected, abs=1e-3)


def test_fspl_reference_point():
    assert fspl(1.0, 1.0) == pytest.approx(32.45)


@pytest.mark.parametrize("d, fc", [(0.5, 2.0), (100.0, 0.0), (100.0, -1.0)])
def test_fspl_domain(d, fc):
    with pytest.raises(DomainError):
        fspl(d, fc)


@given(st.floats(1.0, 1e8), st.floats(0.1, 100.0))
def test_fspl_doubling(d, fc):
    assert fspl(2 * d, fc) - fspl(d, fc) == pytest.approx(20 * math.log10(2), abs=1e-9)
    assert fspl(d, 2 * fc) - fspl(d, fc) == pytest.approx(20 * math.log10(2), abs=1e-9)


def test_environment_table():
    env = default_environment()
    s = env.row("S", 90)
    assert (s.sigma_sf_los, s.sigma_sf_nlos, s.clutter_loss) == (1.2, 9.2, 25.5)
    ka = env.row("ka", 90.0)
    assert (ka.sigma_sf_los, ka.sigma_sf_nlos, ka.clutter_loss) == (0.6, 12.3, 32.9)
    with pytest.raises(EnvLookupError):
        env.row("S", 45)


def test_los_probability():
    assert los_probability(90, "dense-urban") == 0.981
    assert los_probability(90, "urban") == 0.992
    assert los_probability(90, "suburban-rural") == 0.998
    with pytest.raises(EnvLookupError):
        los_probability(12.5, "urban")
    with pytest.raises(DomainError):
        los_probability(90, "jungle")


def test_basic_path_loss_components():
    row = default_environment().row("S", 90)
    d = 600e3
    assert ntn_basic_path_loss(d, 2.0, row, LOS) == pytest.approx(fspl(d, 2.0))
    assert ntn_basic_path_loss(d, 2.0, row, NLOS, 1.0) == pytest.approx(
        fspl(d, 2.0) + 9.2 + 25.5)


def test_total_path_loss_sum():
    r = ntn_total_path_loss(160.0, 0.5, 0.3, 10.0)
    assert r.total == pytest.approx(170.8)
    with pytest.raises(DomainError):
        ntn_total_path_loss(160.0, -0.1)


def test_env_csv_round_trip(tmp_path):
    p = tmp_path / "env.csv"
    p.write_text("elevation_deg,band,sigma_los,sigma_nlos,clutter_db,p_los_denseurban,"
                 "p_los_urban,p_los_suburban\n30,S,3.0,8.0,30.0,0.5,0.6,0.9\n")
    env = NtnEnvironment.from_csv(p)
    assert env.elevations() == [30.0]
    bad = tmp_path / "bad.csv"
    bad.write_text("elevation_deg,band\n30,S\n")
    with pytest.raises(DomainError):
        NtnEnvironment.from_csv(bad)


def test_uma_golden_375m():
    assert uma_path_loss(UmaParams(375.0, 3.5)) == pytest.approx(95.51623607, abs=1e-6)


def test_uma_nlos_not_below_los():
    los = uma_path_loss(UmaParams(200.0, 3.5))
    nlos = uma_path_loss(UmaParams(200.0, 3.5, state=NLOS))
    assert nlos >= los
    assert nlos == pytest.approx(13.54 + 39.08 * math.log10(math.hypot(200, 13.5))
                                 + 20 * math.log10(3.5))


def test_uma_breakpoint_switch():
    c = UmaCoefficients(use_breakpoint=True)
    # breakpoint at 4*(15-1)*(1.5-1)*3.5e9/c is about 653.8 m
    near = uma_path_loss(UmaParams(300.0, 3.5, coeffs=c))
    assert near == pytest.approx(uma_path_loss(UmaParams(300.0, 3.5)))
    far = uma_path_loss(UmaParams(2000.0, 3.5, coeffs=c))
    assert far > uma_path_loss(UmaParams(2000.0, 3.5))


@pytest.mark.parametrize("p", [UmaParams(5.0, 3.5), UmaParams(6000.0, 3.5),
                               UmaParams(100.0, 0.0), UmaParams(100.0, 3.5, state="X"),
                               UmaParams(100.0, 3.5, h_ut=0.0)])
def test_uma_domain(p):
    with pytest.raises(DomainError):
        uma_path_loss(p)


@given(st.floats(10.0, 4999.0), st.floats(0.5, 99.0), st.sampled_from([LOS, NLOS]),
       st.booleans())
def test_uma_monotone(d, fc, state, bp):
    c = UmaCoefficients(use_breakpoint=bp)
    base = uma_path_loss(UmaParams(d, fc, state=state, coeffs=c))
    assert uma_path_loss(UmaParams(min(d * 1.01, 5000.0), fc, state=state, coeffs=c)) >= base - 1e-9
    assert uma_path_loss(UmaParams(d, fc * 1.01, state=state, coeffs=c)) >= base - 1e-9


def test_uma_array_matches_scalar():
    d = np.array([20.0, 100.0, 375.0, 2000.0])
    arr = uma_nlos_array(d, 3.5, 15.0, 1.5, DEFAULT_UMA)
    for di, v in zip(d, arr):
        assert v == pytest.approx(uma_path_loss(UmaParams(di, 3.5, state=NLOS)))


def test_ris_cascade_golden():
    assert ris_cascade_path_loss(129.4434634, 101.5145492) == pytest.approx(230.9580126,
                                                                             abs=1e-6)
    assert RisCascade(10.0, 20.0).total == 30.0
    with pytest.raises(DomainError):
        ris_cascade_path_loss(-1.0, 10.0)


@given(st.floats(0, 200), st.floats(0, 200))
def test_cascade_is_linear_product(a, b):
    prod = 10 ** (a / 10) * 10 ** (b / 10)
    assert ris_cascade_path_loss(a, b) == pytest.approx(10 * math.log10(prod), abs=1e-9)


@pytest.mark.parametrize("parts, total", [((159.1, 0.1, 2.2, 0.0), 161.4),
                                          ((179.1, 0.5, 0.3, 0.0), 179.9)])
def test_total_path_loss_worked_examples(parts, total):
    assert ntn_total_path_loss(*parts).total == pytest.approx(total)
