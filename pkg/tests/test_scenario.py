import warnings

import pytest

from nrsat.scenario import (
    FIXTURE_DIR, ScenarioError, UnknownOverride, load_scenario, loads_scenario, valid_keys,
)

MINIMAL = "[satellite]\n[ue]\n"


def test_minimal_scenario_is_reference(reference_scenario):
    scn = loads_scenario(MINIMAL)
    assert scn.digest == reference_scenario.digest
    assert scn.payload == reference_scenario.payload


def test_fixtures_load():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for name in ("table9.scenario", "table10.scenario", "constellation2592.scenario"):
            assert load_scenario(FIXTURE_DIR / name).path.name == name


def test_missing_section():
    with pytest.raises(ScenarioError, match=r"missing required section \[satellite\]"):
        loads_scenario("")


def test_unknown_key_located():
    with pytest.raises(ScenarioError) as info:
        loads_scenario(MINIMAL + "\n[downlink]\nelevation = 40\n", path="s.scenario")
    assert info.value.line == 5
    assert "s.scenario:5:" in str(info.value)


def test_unknown_section():
    with pytest.raises(ScenarioError, match="unknown section"):
        loads_scenario(MINIMAL + "[orbit]\n")


def test_type_and_range_errors():
    with pytest.raises(ScenarioError, match="expected a number"):
        loads_scenario("[satellite]\naltitude_km = 'high'\n[ue]\n")
    with pytest.raises(ScenarioError) as info:
        loads_scenario("[satellite]\naltitude_km = -5\n[ue]\n")
    assert info.value.line == 2


def test_syntax_error():
    with pytest.raises(ScenarioError, match="parse error"):
        loads_scenario("[satellite\n")


def test_fcc_cap_error_points_at_line():
    with pytest.raises(ScenarioError, match="FCC cap of 43") as info:
        loads_scenario("[satellite]\n[ue]\nnoise_figure_db = 7.0\npeak_eirp_dbm = 50\n", path="x")
    assert info.value.line == 4


def test_overrides():
    scn = loads_scenario(MINIMAL, ["downlink.bandwidth_mhz=200", "ue.panel=[8, 8, 2, 1, 1]"])
    assert scn.downlink.bandwidth == 200.0
    assert scn.ue.panel.total_elements == 64
    with pytest.raises(UnknownOverride):
        loads_scenario(MINIMAL, ["downlink.bw=200"])
    with pytest.raises(ScenarioError):
        loads_scenario(MINIMAL, ["downlink.bandwidth_mhz"])


def test_override_error_has_no_line():
    with pytest.raises(ScenarioError) as info:
        loads_scenario(MINIMAL, ["satellite.altitude_km=-1"])
    assert info.value.line is None


def test_ue_range_warning_located():
    with pytest.warns(UserWarning, match="implementation_loss"):
        loads_scenario("[satellite]\n[ue]\nimplementation_loss_db = 0.0\n")


def test_table_channel_from_shipped_csv():
    scn = load_scenario(FIXTURE_DIR / "table9.scenario",
                        ["channel.kind='table'", "channel.table_file='attenuation_synthetic.csv'"])
    assert scn.atmosphere.kind == "table"
    assert scn.values["channel"]["table"][0] == [5.0, 19.0]
    with pytest.raises(ScenarioError, match="requires"):
        loads_scenario(MINIMAL, ["channel.kind='table'"])


def test_custom_mask():
    text = MINIMAL + """
[[masks]]
band_label = "test band"
segments = [{start = 0, stop = 90, base = -110}]
"""
    scn = loads_scenario(text, ["downlink.mask='test band'"])
    assert scn.mask()(45.0) == -110.0
    with pytest.raises(ScenarioError, match="duplicate"):
        loads_scenario(text.replace("test band", "37.5-40 GHz NGSO"))
    with pytest.raises(ScenarioError):
        loads_scenario(text.replace("stop = 90", "stop = 80"))


def test_unknown_mask_label():
    with pytest.raises(ScenarioError, match="available"):
        loads_scenario(MINIMAL, ["downlink.mask='60 GHz'"])


@pytest.mark.filterwarnings("ignore::UserWarning")
def test_digest_tracks_semantics():
    base = loads_scenario(MINIMAL).digest
    # comments, spacing and restating defaults do not alter the digest
    assert loads_scenario("# note\n[ue]\n\n[satellite]   # sat\naltitude_km = 340.0\n").digest == base
    assert loads_scenario(MINIMAL, ["satellite.altitude_km=340"]).digest == base
    for item in valid_keys():
        if item == "channel.table_file":  # only read when channel.kind is "table"
            continue
        changed = _perturb(item)
        assert changed is not None, item
        assert loads_scenario(MINIMAL, [changed]).digest != base, item


def _perturb(dotted):
    scn = loads_scenario(MINIMAL)
    section, _, key = dotted.rpartition(".")
    value = scn.values[section][key]
    if value is None:
        return f"{dotted}=13.5"
    if isinstance(value, bool):
        return f"{dotted}={'false' if value else 'true'}"
    if isinstance(value, int):
        if dotted == "constellation.planes":
            return f"{dotted}=72"
        if dotted == "constellation.total_satellites":
            return f"{dotted}=2628"
        if dotted == "constellation.phasing":
            return f"{dotted}=1"
        return f"{dotted}={value + 1}"
    if isinstance(value, float):
        if dotted == "constellation.raan_spread_deg":
            return f"{dotted}=180"
        if key in {"aperture_efficiency", "availability"}:
            return f"{dotted}={value * 0.99}"
        if dotted == "downlink.bandwidth_mhz":
            return f"{dotted}=200"
        return f"{dotted}={value + 0.5}"
    if dotted == "satellite.tx.lattice" or dotted == "satellite.rx.lattice":
        return f"{dotted}='rectangular'"
    if dotted == "ue.panel":
        return f"{dotted}=[8, 16, 2, 1, 1]"
    if dotted == "downlink.mask":
        return f"{dotted}='37.5-40 GHz GSO'"
    if dotted == "channel.kind":
        return f"{dotted}='cosecant'"
    if dotted == "mcs.rows":
        return f"{dotted}=[[-1.3, 0.5], [0.5, 0.66]]"
    if dotted == "downlink.allowed_bandwidths_mhz":
        return f"{dotted}=[50, 100, 400]"
    return None
