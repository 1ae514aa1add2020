import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from stokesswim.config import ConfigError, default_config, load_config, parse_config, render_config
from stokesswim.errors import ConfigurationError


def test_empty_text_needs_mode():
    with pytest.raises(ConfigError, match="mode"):
        parse_config("")


def test_minimal_scallop_config_uses_defaults():
    cfg = parse_config("[run]\nmode = simulate-scallop\n")
    sim = cfg.simulation_config()
    assert sim.dt == pytest.approx(0.02)
    assert sim.t_final == pytest.approx(4.0)
    assert sim.params.tip_opening(sim.params.mean_opening) == pytest.approx(0.014, abs=1e-12)
    assert sim.snapshot_dir is None


def test_units_are_converted():
    cfg = parse_config("[run]\nmode = simulate-scallop\n[scallop]\ntip_opening = 12 mm\namplitude = 10 deg\n"
                       "[simulation]\nmu = 1 mPa*s\n")
    assert cfg["scallop"]["tip_opening"] == pytest.approx(0.012)
    assert cfg["scallop"]["amplitude"] == pytest.approx(math.radians(10))
    assert cfg["simulation"]["mu"] == pytest.approx(1e-3)


@pytest.mark.parametrize(
    "text, line",
    [
        ("[run]\nmode = simulate-scallop\n[simulation]\ndt = 2\n", 4),
        ("[run]\nmode = simulate-scallop\n[simulation]\ndt = 0.2 s\n", 4),
        ("[run]\nmode = forces-bench\nbogus = 1\n", 3),
        ("[run]\nmode = forces-bench\n[scallop]\nvalve_length = 3 deg\n", 4),
        ("[run]\nmode = forces-bench\n[nowhere]\n", 3),
        ("[run]\nmode = forces-bench\nmode = forces-bench\n", 3),
        ("mode = forces-bench\n", 1),
        ("[run]\nmode = dance\n", 2),
        ("[run]\nmode = forces-bench\n[forces]\nlevels = 8, 4, 16\n", 4),
        ("[run]\nmode = forces-bench\n[simulation]\ntarget_h = -1\n", 4),
    ],
)
def test_errors_carry_line(text, line):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.line == line
    assert isinstance(info.value, ConfigurationError)


def test_file_round_trip(tmp_path):
    cfg = default_config("validate-rigidbody")
    path = tmp_path / "c.ini"
    path.write_text(render_config(cfg))
    assert load_config(path) == cfg


lengths = st.floats(1e-4, 1e-2, allow_nan=False)


@given(
    tip=st.floats(1e-3, 0.019),
    amp=st.floats(0.01, 0.5),
    h=lengths,
    ratio=st.floats(1.0, 50.0),
    per=st.sampled_from([1.0, 2.0, 4.0]),
    steps=st.integers(11, 400),
    mu=st.floats(1e-4, 10.0),
    deform=st.booleans(),
    method=st.sampled_from(["volume", "surface"]),
)
def test_render_parse_round_trip(tip, amp, h, ratio, per, steps, mu, deform, method):
    text = (
        "[run]\nmode = simulate-scallop\n"
        f"[scallop]\ntip_opening = {tip!r}\namplitude = {amp!r}\nperiod = {per!r}\n"
        f"[simulation]\ntarget_h = {h!r}\nwall_ratio = {ratio!r}\ndt = {per / steps!r}\nmu = {mu!r}\n"
        f"deform = {str(deform).lower()}\nmethod = {method}\n"
    )
    cfg = parse_config(text)
    again = parse_config(render_config(cfg))
    assert again == cfg
    assert render_config(again) == render_config(cfg)
