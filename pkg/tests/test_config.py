import math

import pytest

from quup import cow
from quup.config import parse_config
from quup.core import DEFAULT_CONSTANTS, neutron_beam
from quup.errors import ConfigError

MINIMAL_DSLIT = """
experiment = "dslit"
[beam]
preset = "thermal-neutron"
[sweep]
parameter = "delta_s_m"
start = -1e-9
stop = 1e-9
n_points = 11
"""


def test_minimal_dslit():
    cfg = parse_config(MINIMAL_DSLIT)
    assert cfg.experiment == "dslit"
    assert cfg.beam == neutron_beam()
    assert cfg.sweep.n_points == 11
    assert cfg.geometry["mean_path_m"] == 1.0
    assert cfg.output.format == "csv" and cfg.output.precision == 12


def test_negative_gamma_names_field():
    text = """
experiment = "dslit"
[beam]
mass_kg = 1.6e-27
velocity_m_per_s = 2200.0
gamma_per_s = -1.0
[sweep]
parameter = "delta_s_m"
start = 0.0
stop = 1.0
n_points = 2
"""
    with pytest.raises(ConfigError, match=r"beam\.gamma"):
        parse_config(text)


def test_cow_estimate_case():
    text = """
experiment = "cow"
[beam]
preset = "thermal-neutron"
[geometry]
H0_m = 0.1
L0_m = 0.1
alpha_rad = 1.5707963267948966
[sweep]
parameter = "alpha_deg"
start = -90.0
stop = 90.0
n_points = 181
"""
    cfg = parse_config(text)
    geo = cow.CowGeometry(cfg.geometry["H0_m"], cfg.geometry["L0_m"], cfg.geometry["alpha_rad"])
    assert geo == cow.STANDARD_LOOP
    assert cfg.beam.v_g == 2200.0 and cfg.beam.tau == 879.4


def test_syntax_error_reports_position():
    with pytest.raises(ConfigError, match=r"line 3"):
        parse_config('experiment = "dslit"\n[beam]\npreset = \n')


@pytest.mark.parametrize("snippet, field", [
    ('colour = "red"\n', "colour"),
    ('[beam]\npreset = "thermal-neutron"\nspin = 0.5\n', "beam.spin"),
    ('[geometry]\nwidth_m = 1.0\n', "geometry.width_m"),
    ('[output]\ncompress = true\n', "output.compress"),
])
def test_unknown_keys_rejected(snippet, field):
    base = 'experiment = "dslit"\n'
    with pytest.raises(ConfigError, match=field.replace(".", r"\.")):
        parse_config(base + snippet)


@pytest.mark.parametrize("sweep, match", [
    ('parameter = "alpha_rad"\nstart = 0.0\nstop = 1.0\nn_points = 5', "sweep.parameter"),
    ('parameter = "delta_s_m"\nstart = 0.0\nstop = 1.0\nn_points = 1', "sweep.n_points"),
    ('parameter = "delta_s_m"\nstart = 1.0\nstop = 0.0\nn_points = 5', "stop"),
    ('parameter = "delta_s_m"\nstart = 0.0\nn_points = 5', "sweep.stop"),
])
def test_sweep_validation(sweep, match):
    text = 'experiment = "dslit"\n[beam]\npreset = "stable-neutron"\n[sweep]\n' + sweep + "\n"
    with pytest.raises(ConfigError, match=match.replace(".", r"\.")):
        parse_config(text)


def test_beam_variants():
    base = 'experiment = "dslit"\n[sweep]\nparameter = "delta_s_m"\nstart = 0.0\nstop = 1.0\nn_points = 2\n'
    cfg = parse_config(base + "[beam]\nmass_kg = 2.0\nmomentum_kg_m_per_s = 4.0\nlifetime_s = 0.5\n")
    assert cfg.beam.gamma == 2.0 and cfg.beam.p0 == 4.0
    cfg = parse_config(base + "[beam]\nmass_kg = 1.67492749804e-27\nvelocity_m_per_s = 2200.0\n"
                              "ell0_over_lambda0 = 10.0\n")
    assert cfg.beam.ell0 / cfg.beam.lambda0 == pytest.approx(10.0, rel=1e-12)
    with pytest.raises(ConfigError, match="mutually exclusive"):
        parse_config(base + "[beam]\nmass_kg = 1.0\nvelocity_m_per_s = 1.0\nlifetime_s = 1.0\ngamma_per_s = 1.0\n")
    with pytest.raises(ConfigError, match="exactly one"):
        parse_config(base + "[beam]\nmass_kg = 1.0\n")
    with pytest.raises(ConfigError, match="preset"):
        parse_config(base + '[beam]\npreset = "muon"\n')
    with pytest.raises(ConfigError, match=r"beam\.mass_kg"):
        parse_config(base + '[beam]\nmass_kg = "heavy"\nvelocity_m_per_s = 1.0\n')


def test_experiment_must_match_command():
    with pytest.raises(ConfigError, match="command"):
        parse_config(MINIMAL_DSLIT, experiment="cow")
    cfg = parse_config(MINIMAL_DSLIT.replace('experiment = "dslit"', ""), experiment="dslit")
    assert cfg.experiment == "dslit"


def test_geometry_validation():
    text = 'experiment = "cow"\n[beam]\npreset = "thermal-neutron"\n[geometry]\n{}\n' \
           '[sweep]\nparameter = "alpha_rad"\nstart = 0.0\nstop = 1.0\nn_points = 3\n'
    with pytest.raises(ConfigError, match=r"geometry\.H0_m"):
        parse_config(text.format("H0_m = -0.1"))
    with pytest.raises(ConfigError, match=r"geometry\.alpha_rad"):
        parse_config(text.format("alpha_rad = 2.0"))
    with pytest.raises(ConfigError, match="together"):
        parse_config(text.format("q_cow = 1.0"))


def test_output_validation():
    with pytest.raises(ConfigError, match=r"output\.format"):
        parse_config(MINIMAL_DSLIT + '[output]\nformat = "xml"\n')
    with pytest.raises(ConfigError, match=r"output\.precision"):
        parse_config(MINIMAL_DSLIT + "[output]\nprecision = 0\n")


def test_cow_with_q_values_needs_no_beam():
    text = ('experiment = "cow"\n[geometry]\nq_cow = 30.0\nq_ucow = 1.0\n'
            '[sweep]\nparameter = "alpha_rad"\nstart = -1.0\nstop = 1.0\nn_points = 3\n')
    cfg = parse_config(text)
    assert cfg.beam is None and cfg.geometry["q_ucow"] == 1.0


def test_constants_are_used():
    from dataclasses import replace
    heavy = replace(DEFAULT_CONSTANTS, m_neutron=2 * DEFAULT_CONSTANTS.m_neutron)
    cfg = parse_config(MINIMAL_DSLIT, heavy)
    assert cfg.beam.mass == heavy.m_neutron
