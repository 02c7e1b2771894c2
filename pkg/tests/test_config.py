import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kerrcoupler.config import DEFAULTS, SCENARIOS, ScenarioConfig, config_from_text, load_config, parse_number
from kerrcoupler.errors import ConfigError
from kerrcoupler.hilbert import ModeDims
from kerrcoupler.model import CouplerParams
from kerrcoupler.scenarios import run_scenario
from kerrcoupler.series import TimeSeries, fmt, read_csv

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"


def test_minimal_truncation_gets_defaults():
    cfg = config_from_text("scenario = truncation\n")
    assert cfg.params == CouplerParams(chi_a=25.0, chi_b=25.0, alpha=math.pi / 25, epsilon=math.pi / 25)
    assert cfg.dims == ModeDims(10, 10)
    assert (cfg.grid.t_start, cfg.grid.t_end, cfg.grid.n_steps) == (0.0, 50.0, 2000)
    assert cfg.method == "integrate" and cfg.initial == (2, 0)


@pytest.mark.parametrize("scenario", SCENARIOS)
def test_every_scenario_has_valid_defaults(scenario):
    cfg = config_from_text(f"scenario = {scenario}")
    assert cfg.scenario == scenario
    assert cfg.params.time_unit == DEFAULTS[scenario]["time_unit"]


def test_damped_defaults():
    cfg = config_from_text("scenario = damped")
    chi = 1e8
    assert cfg.params.chi_a == chi and cfg.params.alpha == chi / 20 and cfg.params.epsilon == chi / 40
    assert cfg.params.kappa_a == cfg.params.kappa_b == chi / 500
    assert cfg.dims == ModeDims(6, 6) and cfg.targets == ("B1", "B2")


def test_shorthands_and_per_mode_override():
    cfg = config_from_text("scenario = damped\nkappa = 1e8/75\nkappa_b = 0\ndims = 5,7\nchi = 2")
    assert cfg.params.kappa_a == pytest.approx(1e8 / 75) and cfg.params.kappa_b == 0.0
    assert cfg.dims == ModeDims(5, 7)
    assert cfg.params.chi_a == cfg.params.chi_b == 2.0


def test_comments_and_blank_lines():
    cfg = config_from_text("# header\n\nscenario = entropy   # trailing\n  epsilon = pi/5\n")
    assert cfg.params.epsilon == pytest.approx(math.pi / 5)


def test_unknown_key_is_named():
    with pytest.raises(ConfigError, match="epsilonn") as info:
        config_from_text("scenario = truncation\nepsilonn = 0.1\n")
    assert info.value.line == 2 and info.value.field == "epsilonn"


def test_negative_kappa_rejected():
    with pytest.raises(ConfigError) as info:
        config_from_text("scenario = damped\nkappa_a = -1\n")
    assert info.value.line == 2


@pytest.mark.parametrize(
    "text,line",
    [
        ("scenario = truncation\nalpha = pi/\n", 2),
        ("scenario = truncation\njust words\n", 2),
        ("scenario = truncation\n\n\nn_steps = ten\n", 4),
        ("scenario = truncation\nalpha = 1\nalpha = 2\n", 3),
        ("scenario = truncation\nalpha = __import__('os')\n", 2),
        ("scenario = bell_fidelities\ntargets = B1, B9\n", 2),
        ("scenario = truncation\ndim_a = 2\n", 2),
        ("scenario = truncation\nt_end = -1\n", 2),
        ("scenario = sideways\n", 1),
        ("scenario = probabilities\ntargets = 2,0; 11,0\n", 2),
    ],
)
def test_errors_carry_line_numbers(text, line):
    with pytest.raises(ConfigError) as info:
        config_from_text(text)
    assert info.value.line == line
    assert f"line {line}" in str(info.value)


def test_missing_scenario():
    with pytest.raises(ConfigError, match="scenario"):
        config_from_text("alpha = 1\n")


def test_semantic_checks():
    with pytest.raises(ConfigError):
        config_from_text("scenario = truncation\nalpha = 0.1+0.2j\n")
    with pytest.raises(ConfigError):
        config_from_text("scenario = truncation\ninitial = 0,2\n")
    with pytest.raises(ConfigError):
        config_from_text("scenario = chsh\nmethod = euler\n")
    with pytest.raises(ConfigError):
        config_from_text("scenario = truncation\nchi = 1j\n")


def test_config_is_validated_on_construction():
    with pytest.raises(ConfigError):
        ScenarioConfig(scenario="damped", targets=())


@pytest.mark.parametrize(
    "text,value",
    [("1e8/20", 5e6), ("pi/25", math.pi / 25), ("-2**3", -8.0), ("sqrt(2)/2", math.sqrt(0.5)), ("1+2j", 1 + 2j), ("3j-3j", 0.0)],
)
def test_parse_number(text, value):
    assert parse_number(text) == pytest.approx(value)


@pytest.mark.parametrize("text", ["open('x')", "a", "[1]", "1 if 1 else 2", "(1).real"])
def test_parse_number_rejects_code(text):
    with pytest.raises(ValueError):
        parse_number(text)


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nope.cfg")


@pytest.mark.parametrize("path", sorted(CONFIG_DIR.glob("*.cfg")), ids=lambda p: p.stem)
def test_shipped_configs_load(path):
    cfg = load_config(path)
    assert cfg.to_lines() == config_from_text("\n".join(cfg.to_lines())).to_lines()


@pytest.mark.parametrize("scenario", SCENARIOS)
def test_round_trip_through_csv_header(scenario, tmp_path):
    cfg = config_from_text(f"scenario = {scenario}\nn_steps = 4\nalpha = pi/7\ndims = 4,4")
    out = tmp_path / "run.csv"
    run_scenario(cfg).write_csv(out)
    back = load_config(out)
    assert back == cfg


# --- CSV formatting --------------------------------------------------------


def test_fmt_rules():
    assert fmt(0.0) == "0" and fmt(-0.0) == "0"
    assert fmt(float("nan")) == "null"
    assert fmt(0.1) == "0.10000000000000001"
    assert float(fmt(math.pi)) == math.pi


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_fmt_round_trips_exactly(x):
    assert float(fmt(x)) == x or (x == 0 and fmt(x) == "0")


def test_csv_round_trip(tmp_path):
    series = TimeSeries(("A", "B"), [0.0, 0.5, 1.0], np.array([[1.0, np.nan], [1 / 3, 2.0], [0.0, -1e-300]]), {"k": "v"}, ("scenario = chsh",))
    path = series.write_csv(tmp_path / "x.csv")
    text = path.read_bytes()
    assert b"\r" not in text
    assert text.splitlines()[0] == b"#@ scenario = chsh"
    back = read_csv(path)
    assert back.columns == ("A", "B") and back.metadata == {"k": "v"} and back.config_lines == ("scenario = chsh",)
    np.testing.assert_array_equal(back.times, series.times)
    np.testing.assert_array_equal(back.values, series.values)


def test_series_validation():
    with pytest.raises(ValueError):
        TimeSeries(("A",), [0.0, 0.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        TimeSeries(("A", "B"), [0.0, 1.0], [1.0, 2.0])
