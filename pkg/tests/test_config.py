import copy

import pytest
import yaml

from radioplan.config import (
    ConfigError, bundled_config_path, config_to_dict, dump_config, format_quantity,
    load_config, parse_config, parse_quantity,
)


@pytest.fixture()
def raw():
    return yaml.safe_load(bundled_config_path().read_text())


@pytest.mark.parametrize("text, kind, value", [
    ("20 MHz", "frequency", 20e6),
    ("360 kHz", "frequency", 360e3),
    ("3.5 GHz", "frequency", 3.5e9),
    ("33 dBm", "power", 3.0),
    ("-3 dBW", "power", -3.0),
    ("1 W", "power", 0.0),
    ("0.041 km2", "area", 0.041),
    ("41000 m2", "area", 0.041),
    ("600 km", "length", 600e3),
    ("30 deg", "angle", 30.0),
    ("50 Mbps", "rate", 50e6),
    ("15.9 dB/K", "gt", 15.9),
    ("1e-3 dB", "db", 1e-3),
])
def test_parse_quantity(text, kind, value):
    assert parse_quantity(text, kind) == pytest.approx(value)


@pytest.mark.parametrize("text, kind", [
    ("20", "frequency"), (20, "frequency"), ("20 MHz", "power"), ("20 furlongs", "length"),
    ("abc", "db"), (True, "db"),
])
def test_parse_quantity_rejects(text, kind):
    with pytest.raises(ValueError):
        parse_quantity(text, kind)


def test_format_quantity_round_trip():
    for v, kind in [(20e6, "frequency"), (-3.2, "power"), (0.041, "area"), (1e-7, "db")]:
        assert parse_quantity(format_quantity(v, kind), kind) == v


def test_bundled_config_loads(stadium):
    assert stadium.name == "quito-stadium"
    assert stadium.coverage.target_area == pytest.approx(0.041)
    assert set(stadium.ntn_links) == {"SC6-DL", "SC6-UL", "SC9-DL", "SC9-UL"}
    assert stadium.ntn_links["SC9-UL"].bandwidth == 360e3
    assert stadium.ntn_links["SC6-DL"].eirp == pytest.approx(30.0)
    assert stadium.ris_budget.direct_link == "UE-BS"
    assert stadium.scenario.rsrp_threshold == pytest.approx(-130.0)
    assert [p.serving_bs for p in stadium.scenario.ris_panels] == ["BS1", "BS1", "BS2"]


def test_empty_file_is_parse_error(tmp_path):
    p = tmp_path / "empty.yaml"
    p.write_text("")
    with pytest.raises(ConfigError) as e:
        load_config(p)
    assert "empty" in str(e.value)


def test_yaml_syntax_error_has_line(tmp_path):
    p = tmp_path / "bad.yaml"
    p.write_text("name: x\nntn_links: [unclosed\n")
    with pytest.raises(ConfigError) as e:
        load_config(p)
    assert "line" in e.value.errors[0][0]


def test_negative_bandwidth_names_field(raw):
    raw["ntn_links"]["SC9-UL"]["bandwidth"] = "-5 MHz"
    with pytest.raises(ConfigError) as e:
        parse_config(raw)
    assert [p for p, _ in e.value.errors] == ["ntn_links.SC9-UL.bandwidth"]


def test_all_errors_collected(raw):
    raw["ntn_links"]["SC6-DL"]["frequency"] = "20 dB"  # unit mismatch
    raw["coverage"]["links"]["UE-BS"]["budget_link"] = "nope"  # dangling
    raw["scenario"]["ris_panels"][0]["serving_bs"] = "BS9"  # dangling
    raw["capacity"]["n78"]["scs"] = "15 kHz"  # inconsistent with numerology 1
    raw["bogus"] = {}
    with pytest.raises(ConfigError) as e:
        parse_config(raw)
    paths = {p for p, _ in e.value.errors}
    assert paths == {"ntn_links.SC6-DL.frequency", "coverage.links.UE-BS.budget_link",
                     "scenario.ris_panels[0].serving_bs", "capacity.n78.scs", "bogus"}
    assert "unit mismatch" in str(e.value)


def test_missing_unit_is_error(raw):
    raw["scenario"]["resolution"] = 5
    with pytest.raises(ConfigError, match="scenario.resolution"):
        parse_config(raw)


def test_mil_exclusive(raw):
    raw["ris_budget"]["links"]["UE-BS"]["mil_inputs"] = {
        "tx_power": "46 dBm", "noise_figure": "5 dB", "bandwidth": "100 MHz",
        "required_snr": "0 dB"}
    with pytest.raises(ConfigError, match="exactly one"):
        parse_config(raw)


def test_round_trip(stadium):
    again = parse_config(yaml.safe_load(dump_config(stadium)))
    assert again == stadium
    assert config_to_dict(again) == config_to_dict(stadium)


def test_parse_does_not_mutate_input(raw):
    before = copy.deepcopy(raw)
    parse_config(raw)
    assert raw == before


def test_uma_override(raw):
    raw["uma"] = {"use_breakpoint": True, "min_distance_m": "20 m"}
    cfg = parse_config(raw)
    assert cfg.uma.use_breakpoint and cfg.uma.min_distance_m == 20.0
    assert parse_config(yaml.safe_load(dump_config(cfg))) == cfg
    raw["uma"] = {"slope": 3}
    with pytest.raises(ConfigError, match="uma.slope"):
        parse_config(raw)
