import pytest
from hypothesis import given
from hypothesis import strategies as st

from afmllg.config import ConfigError, RunConfig, parse_config, parse_time
from afmllg.core import TABLE6

MINIMAL = """\
[run]
experiment = relax
[material]
alpha = 0.05
a = 0.5e-9
Ms = 4.0e5
Ku = 1.0e5
A = 5.0e-12
A_afm = 3.0e-12
gamma = 1.76e11
"""


def test_minimal_config_echoes_table6():
    cfg = parse_config(MINIMAL)
    assert cfg.material == TABLE6
    assert cfg.material.Ms == 4.0e5 and cfg.material.A_afm == 3.0e-12


def test_defaults():
    cfg = parse_config("")
    assert (cfg.scheme, cfg.s, cfg.seed, cfg.cadence) == ("scheme-a", 1.0, 42, 100)
    assert cfg.material == TABLE6
    assert cfg == RunConfig()


def test_negative_ms_names_key():
    with pytest.raises(ConfigError) as err:
        parse_config("[material]\n\nMs = -1\n")
    assert err.value.key == "Ms" and err.value.line == 3
    assert "Ms must be > 0" in str(err.value)


@pytest.mark.parametrize("text,line,key", [
    ("[run]\nschema = gspm\n", 2, "schema"),
    ("[run]\nscheme = rk4\n", 2, "scheme"),
    ("[runs]\n", 1, None),
    ("scheme = gspm\n", 1, None),
    ("[run]\ns = 1.5\n", 2, "s"),
    ("[run]\nseed = many\n", 2, "seed"),
    ("[grid]\ncells = 4 4\n", 2, "cells"),
    ("[time]\ndt = 0 fs\n", 2, "dt"),
    ("[time]\ndt = 1 fortnight\n", 2, "dt"),
    ("[run]\nscheme = gspm\nscheme = gspm\n", 3, "scheme"),
    ("[field]\ndirection = 0 0 0\n", 2, "direction"),
    ("[field]\ndB = -5\n", 2, "dB"),
    ("[material]\nKu = nan\n", 2, "Ku"),
])
def test_structured_errors(text, line, key):
    with pytest.raises(ConfigError) as err:
        parse_config(text)
    assert err.value.line == line
    assert err.value.key == key


def test_units():
    cfg = parse_config("[time]\ndt = 2 fs\nT = 20 ps\ncadence = 50\n[grid]\ncells = 25 25 3\ncell_size = 4 4 2 nm\n")
    assert cfg.dt == pytest.approx(2e-15) and cfg.T == pytest.approx(2e-11)
    assert cfg.cells == (25, 25, 3) and cfg.cell_size == pytest.approx((4e-9, 4e-9, 2e-9))
    cfg = parse_config("[time]\nunits = ps\ndt = 0.001\n[grid]\ncell_size = 2e-9 m\n")
    assert cfg.dt == pytest.approx(1e-15) and cfg.cell_size == pytest.approx((2e-9,) * 3)


def test_dimensionless_experiments():
    cfg = parse_config("[run]\nexperiment = converge\ndelta = 0.1, -0.1, 5\ndims = 3\n[time]\ndt = 1e-6\n")
    assert cfg.dimensionless_time and cfg.dt == 1e-6 and cfg.delta == (0.1, -0.1, 5.0)
    assert parse_config("[time]\ndt = 1e-4\n", experiment="exchange-limit").dt == 1e-4
    with pytest.raises(ConfigError):
        parse_config("[time]\ndt = 1e-4 fs\n", experiment="exchange-limit")
    with pytest.raises(ConfigError):
        parse_time("1 fs", dimensionless=True)


def test_parse_time():
    assert parse_time("1fs") == pytest.approx(1e-15)
    assert parse_time("3 ps") == pytest.approx(3e-12)
    assert parse_time("7") == pytest.approx(7e-15)
    assert parse_time("0.5", dimensionless=True) == 0.5


def test_field_block():
    cfg = parse_config("[run]\nexperiment = phase-diagram\n[field]\ndirection = perpendicular\nB_max = 300\n"
                       "dB = 25\nmax_steps = 200000\ntilt = 0.02\n")
    assert cfg.direction == "perpendicular"
    assert cfg.sweep == {"B_max": 300.0, "dB": 25.0, "max_steps": 200000, "tilt": 0.02}
    cfg = parse_config("[field]\ndirection = 0 1 0\nmagnitude = 2.5\n")
    assert cfg.direction == (0.0, 1.0, 0.0) and cfg.magnitude == 2.5


def test_comments_and_given():
    cfg = parse_config("# header\n[run]\nscheme = gspm   # inline\n; another\n")
    assert cfg.scheme == "gspm" and "run.scheme" in cfg.given


TOKENS = ["[run]", "[material]", "[grid]", "[time]", "[field]", "[x]", "experiment", "scheme", "Ms", "A_afm",
          "cells", "dt", "T", "units", "direction", "=", ":", " ", "\n", "\t", "1", "-3e-12", "fs", "ps", "nm",
          "nan", "inf", "1e999", "relax", "converge", "gspm", "parallel", "#", ";", "[", "]", "%", "\x00", "é",
          "0.5", "1 2 3", "seed", "s", "delta", "true", "B_max", "dB"]


@given(st.lists(st.sampled_from(TOKENS), max_size=60).map("".join))
def test_fuzz_token_soup(text):
    try:
        parse_config(text)
    except ConfigError:
        pass


@given(st.text(max_size=200))
def test_fuzz_arbitrary_text(text):
    try:
        parse_config(text)
    except ConfigError:
        pass
