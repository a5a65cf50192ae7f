import math

import pytest

import oracles
from nrsat import channel as c
from nrsat.scenario import FIXTURE_DIR


def test_fsl_formula():
    assert c.free_space_loss(39.0, 511.159) == pytest.approx(
        20 * math.log10(4 * math.pi * 511.159e3 * 39e9 / 2.99792458e8), abs=1e-12)


def test_fsl_domain():
    with pytest.raises(ValueError):
        c.free_space_loss(0.0, 10.0)
    with pytest.raises(ValueError):
        c.free_space_loss(10.0, -1.0)


def test_flat_and_cosecant():
    assert c.atmospheric_loss(c.AttenuationModel.flat(5.0), 12.0) == 5.0
    cs = c.AttenuationModel.cosecant(1.0)
    assert c.atmospheric_loss(cs, 30.0) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        c.atmospheric_loss(cs, 2.0)


def test_table_from_shipped_csv():
    model = c.AttenuationModel.from_csv(FIXTURE_DIR / "attenuation_synthetic.csv")
    assert c.atmospheric_loss(model, 5.0) == 19.0
    assert c.atmospheric_loss(model, 90.0) == 2.4
    with pytest.raises(ValueError):
        c.atmospheric_loss(model, 4.0)


def test_table_validation():
    with pytest.raises(ValueError):
        c.AttenuationModel.from_table([(5, 1), (5, 2), (90, 1)])
    with pytest.raises(ValueError):
        c.AttenuationModel.from_table([(10, 1), (90, 1)])
    with pytest.raises(ValueError):
        c.AttenuationModel.from_table([(5, -1), (90, 1)])


def test_csv_errors_name_line(tmp_path):
    bad = tmp_path / "t.csv"
    bad.write_text("elevation_deg,loss_db\n5,1\n10,x\n90,1\n")
    with pytest.raises(ValueError, match=":3:"):
        c.AttenuationModel.from_csv(bad)
    bad.write_text("elev,loss\n5,1\n")
    with pytest.raises(ValueError, match=":1:"):
        c.AttenuationModel.from_csv(bad)


def test_shadow_margin_against_bisection_quantile():
    for p in (0.9, 0.95, 0.99, 0.999):
        assert c.shadow_margin(4.0, p) == pytest.approx(4.0 * oracles.normal_quantile_bisection(p), abs=1e-9)
    assert c.shadow_margin(4.0, 0.95) == pytest.approx(6.5794, abs=1e-4)
    assert c.shadow_margin(0.0, 0.95) == 0.0
    assert c.shadow_margin(4.0, 0.5) == 0.0
    with pytest.raises(ValueError):
        c.shadow_margin(4.0, 1.0)
    with pytest.raises(ValueError):
        c.shadow_margin(-1.0, 0.9)


def test_noise_values():
    assert c.noise_psd(7.0) == -167.0
    assert c.noise_power(-167.0, 400.0) == pytest.approx(-80.9794, abs=1e-4)
    assert c.receiver_noise_temperature_dbk(7.0) == pytest.approx(31.6, abs=1e-12)
    with pytest.raises(ValueError):
        c.noise_power(-167.0, 0.0)


def test_system_temperature_and_g_over_t():
    chain = c.NoiseChain(2.0, 300.0, 0.5, 300.0)
    t = c.system_noise_temperature(chain)
    assert t == pytest.approx(300 + 300 * (10 ** 0.25 - 1), abs=1e-9)
    assert c.g_over_t(40.9332, t) == pytest.approx(13.66, abs=0.01)
    with pytest.raises(ValueError):
        c.NoiseChain(-1.0, 300.0)
