"""Randomized invariants for every module (hypothesis)."""
import math
import warnings
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

import oracles
from nrsat import antenna, channel, geometry, regulatory
from nrsat.antenna import UePanel
from nrsat.channel import AttenuationModel, NoiseChain
from nrsat.linkbudget import (
    LinkInputs, McsTable, UeRangeWarning, capacity_rollup, evaluate, reference_payload, select_mcs, vehicular_ue,
)

MATH = settings(max_examples=1000, deadline=None, suppress_health_check=[HealthCheck.too_slow])
HEAVY = settings(max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])

pytestmark = [
    pytest.mark.filterwarnings("ignore::nrsat.linkbudget.UeRangeWarning"),
    pytest.mark.criterion(8, "properties: round trips and invariances"),
]

altitudes = st.floats(100.0, 40000.0)
elevations = st.floats(0.0, 90.0)
frequencies = st.floats(0.1, 300.0)
distances = st.floats(1.0, 1e5)
bandwidths = st.floats(0.01, 5000.0)


# -- geometry ---------------------------------------------------------------

@MATH
@given(altitudes, elevations, elevations)
def test_slant_range_strictly_decreasing(h, e1, e2):
    assume(e1 != e2)
    lo, hi = sorted((e1, e2))
    assume(hi - lo > 1e-9)
    assert geometry.slant_range(h, lo) > geometry.slant_range(h, hi)


@MATH
@given(altitudes)
def test_slant_range_zenith_and_scan_at_horizon(h):
    assert geometry.slant_range(h, 90.0) == h
    assert geometry.nadir_scan_angle(h, 0.0) == geometry.earth_view_half_angle(h)


@MATH
@given(altitudes, elevations)
def test_central_angle_closure(h, e):
    psi = geometry.coverage_central_angle(h, e)
    assert psi == 90.0 - e - geometry.nadir_scan_angle(h, e)
    assert abs(psi + e + geometry.nadir_scan_angle(h, e) - 90.0) <= 1e-12


@MATH
@given(st.floats(150.0, 3000.0), st.floats(1.0, 89.0))
def test_slant_range_vs_vector_oracle(h, e):
    assert geometry.slant_range(h, e) == pytest.approx(oracles.slant_range_vectors(6371.0, h, e), rel=1e-9)


@st.composite
def walker_configs(draw):
    p = draw(st.integers(1, 12))
    s = draw(st.integers(1, 12))
    f = draw(st.integers(0, p - 1))
    return geometry.ConstellationConfig(
        p * s, p, phasing=f, inclination=draw(st.floats(0.0, 180.0)), altitude=draw(st.floats(200.0, 2000.0)),
        raan_spread=draw(st.sampled_from([180.0, 360.0])),
    )


@MATH
@given(walker_configs(), st.floats(0.0, 1e5))
def test_walker_structure(cfg, t):
    sats = geometry.walker_delta(cfg, t)
    pos = np.array([sat.position for sat in sats])
    assert np.abs(np.linalg.norm(pos, axis=1) - (6371.0 + cfg.altitude)).max() <= 1e-6
    s = cfg.sats_per_plane
    plane, slot, raan, anom = geometry.walker_elements(cfg)
    raan = np.degrees(raan).reshape(cfg.planes, s)
    anom = np.degrees(anom).reshape(cfg.planes, s)
    assert np.allclose(np.diff(raan[:, 0]), cfg.raan_spread / cfg.planes, atol=1e-9, rtol=0)
    assert np.allclose(np.diff(anom, axis=1), 360.0 / s, atol=1e-9, rtol=0)
    if s > 1:
        # neighbours in a plane stay 360/s apart as the shell moves
        unit = (pos / np.linalg.norm(pos, axis=1)[:, None]).reshape(cfg.planes, s, 3)
        gap = np.degrees(np.arccos(np.clip(np.einsum("psc,psc->ps", unit[:, 1:], unit[:, :-1]), -1, 1)))
        assert np.allclose(gap, 360.0 / s if s > 2 else 180.0, atol=1e-5)


@MATH
@given(st.floats(-89.9, 89.9), st.floats(-180.0, 179.9), st.floats(200.0, 2000.0))
def test_subsatellite_zenith(lat, lon, h):
    la, lo = math.radians(lat), math.radians(lon)
    r = 6371.0 + h
    sat = geometry.SatelliteState((r * math.cos(la) * math.cos(lo), r * math.cos(la) * math.sin(lo),
                                   r * math.sin(la)), 0, 0)
    sub = geometry.subsatellite_point(sat)
    assert abs(geometry.elevation_to(sub, sat) - 90.0) <= 1e-9
    assert sub.latitude == pytest.approx(lat, abs=1e-9)


@MATH
@given(st.floats(-80.0, 80.0), st.floats(-180.0, 179.9), st.floats(200.0, 2000.0),
       st.floats(5.0, 85.0), st.floats(0.0, 360.0))
def test_central_angle_round_trip(lat, lon, h, e, az):
    psi = geometry.coverage_central_angle(h, e)
    la, lo = math.radians(lat), math.radians(lon)
    r = 6371.0 + h
    sat = geometry.SatelliteState((r * math.cos(la) * math.cos(lo), r * math.cos(la) * math.sin(lo),
                                   r * math.sin(la)), 0, 0)
    point = geometry.destination_point(geometry.GroundPoint(lat, lon), psi, az)
    assert abs(geometry.elevation_to(point, sat) - e) <= 0.1


@HEAVY
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from([(24, 4), (36, 6), (60, 5)]))
def test_coverage_monotone(seed, tp):
    cfg = geometry.ConstellationConfig(tp[0], tp[1], inclination=80.0, altitude=1200.0, min_elevation=10.0)
    rng = np.random.default_rng(seed)
    keep = rng.random(cfg.total_satellites) < 0.8
    assume(keep.any())
    fewer = keep & (rng.random(keep.size) < 0.8)
    assume(fewer.any())
    a = geometry.coverage_check(cfg, 15.0, [0.0, 500.0], keep=keep).worst_best_elevation
    b = geometry.coverage_check(cfg, 15.0, [0.0, 500.0], keep=fewer).worst_best_elevation
    full = geometry.coverage_check(cfg, 15.0, [0.0, 500.0]).worst_best_elevation
    assert b <= a <= full


# -- regulatory -------------------------------------------------------------

MASKS = regulatory.builtin_masks()


def test_masks_continuous():
    for mask in MASKS:
        for left, right in zip(mask.segments, mask.segments[1:]):
            assert abs(left(left.stop) - right(right.start)) <= 1e-12


@MATH
@given(st.sampled_from(MASKS), elevations, elevations)
def test_masks_non_decreasing(mask, a, b):
    lo, hi = sorted((a, b))
    assert mask(lo) <= mask(hi)


@MATH
@given(st.floats(-200.0, 0.0), distances, bandwidths, st.floats(0.001, 10.0))
def test_eirp_pfd_round_trip(pfd, d, b, ref):
    eirp = regulatory.max_eirp_from_pfd(regulatory.PfdValue(pfd, ref), d, b)
    density = eirp - 10 * math.log10(b * 1e6)
    back = regulatory.pfd_from_eirp(density, d)
    # pfd_from_eirp reports per MHz
    assert abs(back.value - (pfd + 10 * math.log10(1.0 / ref))) <= 1e-9


@MATH
@given(st.floats(-200.0, 0.0), distances, distances, bandwidths, bandwidths)
def test_max_eirp_increasing(pfd, d1, d2, b1, b2):
    p = regulatory.PfdValue(pfd)
    # differences below a few ulps cannot move a logarithm
    if d2 > d1 * (1 + 1e-9):
        assert regulatory.max_eirp_from_pfd(p, d1, b1) < regulatory.max_eirp_from_pfd(p, d2, b1)
    if b2 > b1 * (1 + 1e-9):
        assert regulatory.max_eirp_from_pfd(p, d1, b1) < regulatory.max_eirp_from_pfd(p, d1, b2)


# -- antenna ----------------------------------------------------------------

@MATH
@given(st.integers(1, 10 ** 5), st.integers(1, 10 ** 4), st.floats(0.0, 15.0))
def test_gain_tiling(n, m, g):
    assert antenna.element_count_gain(n * m, g) == pytest.approx(
        antenna.element_count_gain(n, g) + 10 * math.log10(m), abs=1e-9)


@MATH
@given(st.floats(0.01, 5.0), frequencies, st.floats(0.05, 1.0), st.floats(1.001, 2.0))
def test_aperture_gain_increasing(d, f, eta, k):
    base = antenna.aperture_gain(antenna.ApertureArray(d, f, eta))
    assert antenna.aperture_gain(antenna.ApertureArray(d * k, f, eta)) > base
    assert antenna.aperture_gain(antenna.ApertureArray(d, f * k, eta)) > base
    if eta * k <= 1.0:
        assert antenna.aperture_gain(antenna.ApertureArray(d, f, eta * k)) > base


@MATH
@given(st.floats(0.01, 5.0), frequencies)
def test_beamwidth_times_aperture_constant(d, f):
    arr = antenna.ApertureArray(d, f)
    rad = math.radians(antenna.beamwidth_3db(arr)) * d / arr.wavelength
    assert rad == pytest.approx(0.886, rel=1e-12)


@MATH
@given(st.floats(0.01, 20.0), st.one_of(st.just(0.0), st.floats(1e-3, 89.0)))
def test_scanned_beamwidth_broadens(bw, s):
    # below about 1e-7 degrees cos(s) rounds to 1, so tiny nonzero scans are left out
    out = antenna.scanned_beamwidth(bw, s)
    assert out >= bw
    assert (out == bw) == (s == 0.0)


@MATH
@given(st.floats(0.0, 89.0))
def test_grating_lobe_lattices(s):
    assert antenna.max_grating_free_spacing(s, "triangular") == pytest.approx(
        2 / math.sqrt(3) * antenna.max_grating_free_spacing(s, "rectangular"), rel=1e-12)


@MATH
@given(st.floats(0.001, 0.5), st.floats(0.002, 0.05))
def test_hex_count_equals_enumeration(d, s):
    assume(d / s <= 60)
    assert antenna.hex_array_element_count(d, s) == oracles.hex_count_bruteforce(d, s)


# -- channel ----------------------------------------------------------------

@MATH
@given(frequencies, distances)
def test_fsl_doubling(f, d):
    base = channel.free_space_loss(f, d)
    assert channel.free_space_loss(2 * f, d) == pytest.approx(base + 20 * math.log10(2), abs=1e-9)
    assert channel.free_space_loss(2 * f, d) == pytest.approx(channel.free_space_loss(f, 2 * d), abs=1e-9)


@st.composite
def attenuation_tables(draw):
    inner = draw(st.lists(st.floats(5.5, 89.5), max_size=8, unique=True))
    elevs = [draw(st.floats(0.0, 5.0))] + sorted(e for e in inner) + [90.0]
    elevs = sorted(set(elevs))
    assume(all(b - a > 1e-6 for a, b in zip(elevs, elevs[1:])))
    losses = draw(st.lists(st.floats(0.0, 50.0), min_size=len(elevs), max_size=len(elevs)))
    return AttenuationModel.from_table(list(zip(elevs, losses)))


@MATH
@given(attenuation_tables(), st.data())
def test_table_interpolation(model, data):
    for e, loss in model.table:
        assert channel.atmospheric_loss(model, e) == loss
    i = data.draw(st.integers(0, len(model.table) - 2))
    (e0, l0), (e1, l1) = model.table[i], model.table[i + 1]
    e = data.draw(st.floats(e0, e1))
    v = channel.atmospheric_loss(model, e)
    assert min(l0, l1) - 1e-12 <= v <= max(l0, l1) + 1e-12


@MATH
@given(st.floats(0.0, 20.0), st.floats(0.0, 20.0), st.floats(0.5001, 0.9999), st.floats(0.5001, 0.9999))
def test_shadow_margin(s1, s2, p1, p2):
    assert channel.shadow_margin(s1 + s2, p1) == pytest.approx(
        channel.shadow_margin(s1, p1) + channel.shadow_margin(s2, p1), abs=1e-9)
    if p2 - p1 > 1e-9 and s1 > 1e-6:
        assert channel.shadow_margin(s1, p1) < channel.shadow_margin(s1, p2)


@MATH
@given(st.one_of(st.just(0.0), st.floats(1e-6, 15.0)), st.floats(1.0, 1000.0),
       st.one_of(st.just(0.0), st.floats(1e-6, 5.0)), st.floats(100.0, 400.0),
       st.sampled_from(["noise_figure", "antenna_temperature", "input_loss", "reference_temperature"]),
       st.floats(0.01, 5.0))
def test_system_temperature_monotone(nf, ta, il, tref, name, bump):
    chain = NoiseChain(nf, ta, il, tref)
    up = replace(chain, **{name: getattr(chain, name) + bump})
    t0, t1 = channel.system_noise_temperature(chain), channel.system_noise_temperature(up)
    if name == "reference_temperature" and nf + il == 0:
        assert t1 == t0
    else:
        assert t1 > t0
    assert channel.system_noise_temperature(NoiseChain(0.0, ta, 0.0, tref)) == ta


@MATH
@given(st.floats(0.0, 20.0), st.floats(0.0, 20.0), bandwidths)
def test_noise_power_offset(nf1, nf2, b):
    d1 = channel.noise_power(channel.noise_psd(nf1), b) - channel.noise_psd(nf1)
    d2 = channel.noise_power(channel.noise_psd(nf2), b) - channel.noise_psd(nf2)
    assert d1 == pytest.approx(d2, abs=1e-9)
    assert d1 == pytest.approx(10 * math.log10(b * 1e6), abs=1e-9)


# -- linkbudget -------------------------------------------------------------

PAYLOAD = reference_payload()
PAYLOAD_UL = reference_payload(13.5)
MASK = regulatory.find_mask(MASKS, regulatory.QV_NGSO)
with warnings.catch_warnings():
    warnings.simplefilter("ignore", UeRangeWarning)
    UE = vehicular_ue()


@st.composite
def downlinks(draw):
    panel = UePanel(draw(st.integers(1, 64)), draw(st.integers(1, 64)), element_gain=draw(st.floats(0.0, 15.0)))
    ue = replace(UE, panel=panel, noise_figure=draw(st.floats(0.0, 15.0)),
                 implementation_loss=draw(st.floats(0.0, 15.0)))
    return LinkInputs(
        PAYLOAD, ue, draw(st.floats(10.0, 90.0)), draw(st.floats(1.0, 2000.0)),
        AttenuationModel.flat(draw(st.floats(0.0, 30.0))), mask=draw(st.sampled_from(MASKS)),
        clutter_loss=draw(st.floats(0.0, 20.0)), allowed_bandwidths=None,
    )


@MATH
@given(downlinks())
def test_downlink_ledger_self_consistent(inputs):
    led = evaluate("dl", inputs)
    assert abs(led.recompute_cnr() - led.cnr) <= 1e-9


@MATH
@given(downlinks(), st.floats(1.0, 2000.0))
def test_downlink_bandwidth_invariance(inputs, b2):
    a = evaluate("dl", inputs)
    b = evaluate("dl", replace(inputs, bandwidth=b2))
    assert abs(a.cnr - b.cnr) <= 1e-9
    assert b.data_rate == pytest.approx(a.data_rate * b2 / inputs.bandwidth, rel=1e-12)


@MATH
@given(downlinks())
def test_downlink_respects_mask(inputs):
    led = evaluate("dl", replace(inputs, cap_to_payload=True))
    density = led["eirp_per_carrier"] - 10 * math.log10(inputs.bandwidth * 1e6)
    implied = regulatory.pfd_from_eirp(density, led["slant_range"]).value
    limit = regulatory.pfd_limit(inputs.mask, inputs.elevation).value
    assert implied <= limit + 1e-9
    if led["eirp_per_carrier"] == led["eirp_pfd_limited"]:
        assert implied == pytest.approx(limit, abs=1e-9)


@MATH
@given(st.floats(10.0, 90.0), st.floats(1.0, 1000.0), st.floats(1.0, 1000.0), st.floats(-10.0, 43.0))
def test_uplink_fixed_eirp(e, b1, b2, eirp):
    ue = replace(UE, peak_eirp=eirp)
    base = LinkInputs(PAYLOAD_UL, ue, e, b1, AttenuationModel.flat(5.0))
    a = evaluate("ul", base)
    b = evaluate("ul", replace(base, bandwidth=b2))
    assert a.cnr + 10 * math.log10(b1) == pytest.approx(b.cnr + 10 * math.log10(b2), abs=1e-9)
    assert abs(a.recompute_cnr() - a.cnr) <= 1e-9


@st.composite
def mcs_tables(draw):
    n = draw(st.integers(1, 8))
    cnrs = sorted(draw(st.lists(st.floats(-20.0, 30.0), min_size=n, max_size=n, unique=True)))
    ses = sorted(draw(st.lists(st.floats(0.05, 8.0), min_size=n, max_size=n, unique=True)))
    return McsTable(tuple(zip(cnrs, ses)))


@MATH
@given(mcs_tables(), st.floats(-40.0, 40.0), st.floats(-40.0, 40.0))
def test_select_mcs_monotone(table, c1, c2):
    lo, hi = sorted((c1, c2))
    (s1, f1), (s2, f2) = select_mcs(lo, table), select_mcs(hi, table)
    assert s1 <= s2
    assert f2 or not f1


@MATH
@given(st.floats(0.0, 1e4), st.integers(1, 50), st.integers(1, 50), st.integers(1, 10 ** 5))
def test_capacity_multiplicative(rate, c, b, n):
    r = capacity_rollup(rate, c, b, n)
    s = capacity_rollup(rate, b, c, n)
    assert r.per_satellite == pytest.approx(s.per_satellite, rel=1e-12)
    assert r.constellation == pytest.approx(rate * c * b * n / 1e6, rel=1e-12)
    assert capacity_rollup(rate, c * 2, b, n).constellation == pytest.approx(2 * r.constellation, rel=1e-12)
