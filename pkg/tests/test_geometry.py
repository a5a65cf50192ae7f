import math

import numpy as np
import pytest

import oracles
from nrsat import geometry as g


def test_slant_range_matches_vector_oracle():
    for h, e in [(340, 40), (340, 0), (550, 25), (1200, 10), (340, 89.5)]:
        assert g.slant_range(h, e) == pytest.approx(oracles.slant_range_vectors(6371.0, h, e), abs=1e-6)


def test_slant_range_frozen_values():
    # horizon and zenith closed forms
    assert g.slant_range(340, 0) == pytest.approx(2108.99976292, abs=1e-6)
    assert g.slant_range(340, 90) == 340.0


def test_slant_range_rejects_bad_elevation():
    for e in (-0.1, 90.1):
        with pytest.raises(ValueError):
            g.slant_range(340, e)


def test_scan_angle_matches_vector_oracle():
    for h, e in [(340, 40), (550, 25), (1200, 10)]:
        assert g.nadir_scan_angle(h, e) == pytest.approx(oracles.nadir_angle_vectors(6371.0, h, e), abs=1e-7)


def test_coverage_central_angle_example():
    psi = g.coverage_central_angle(340, 40)
    assert psi == pytest.approx(3.34, abs=0.01)
    point = g.destination_point(g.GroundPoint(10.0, 20.0), psi, 37.0)
    la, lo = math.radians(10.0), math.radians(20.0)
    sat = g.SatelliteState((6711.0 * math.cos(la) * math.cos(lo), 6711.0 * math.cos(la) * math.sin(lo),
                            6711.0 * math.sin(la)), 0, 0)
    assert g.elevation_to(point, sat) == pytest.approx(40.0, abs=0.1)


def test_elevation_examples():
    sat = g.SatelliteState((6711.0, 0.0, 0.0), 0, 0)
    assert g.elevation_to(g.GroundPoint(0.0, 0.0), sat) == pytest.approx(90.0, abs=1e-9)
    assert g.elevation_to(g.GroundPoint(0.0, -180.0), sat) < 0


def test_walker_against_rotation_matrix_oracle():
    cfg = g.ConstellationConfig(60, 6, phasing=2, inclination=53.0, altitude=550.0, raan_spread=360.0)
    ref = oracles.walker_positions_reference(60, 6, 2, 53.0, 360.0, 550.0, 6371.0, 777.0)
    assert np.abs(g.walker_positions(cfg, 777.0) - ref).max() < 1e-8


def test_walker_star_spread():
    cfg = g.ConstellationConfig(12, 3, raan_spread=180.0)
    ref = oracles.walker_positions_reference(12, 3, 0, 90.0, 180.0, 340.0, 6371.0, 0.0)
    assert np.abs(g.walker_positions(cfg) - ref).max() < 1e-8


def test_walker_delta_states():
    cfg = g.ConstellationConfig(8, 2, phasing=1)
    sats = g.walker_delta(cfg, 10.0)
    assert [(s.plane_index, s.slot_index) for s in sats[:5]] == [(0, 0), (0, 1), (0, 2), (0, 3), (1, 0)]
    assert all(s.epoch_offset == 10.0 for s in sats)


@pytest.mark.parametrize("kwargs", [
    dict(total_satellites=10, planes=3),
    dict(total_satellites=12, planes=3, phasing=3),
    dict(total_satellites=12, planes=3, raan_spread=90.0),
    dict(total_satellites=0, planes=1),
])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        g.ConstellationConfig(**kwargs)


def test_period():
    cfg = g.ConstellationConfig(12, 3)
    assert cfg.period() == pytest.approx(2 * math.pi * math.sqrt(6711.0 ** 3 / 398600.4418))


def test_grid_layout():
    lat, lon = g.coverage_grid(2.0)
    assert lat.size == 89 * 180 + 2
    assert (lat == 90).sum() == 1 and (lat == -90).sum() == 1
    assert lon.min() == -180.0 and lon.max() < 180.0
    with pytest.raises(ValueError):
        g.coverage_grid(0.0)


def test_single_satellite_zenith():
    cfg = g.ConstellationConfig(1, 1, inclination=0.0)
    pos = g.walker_positions(cfg, 0.0)
    best = g.best_elevations(pos, np.array([0.0]), np.array([0.0]))
    assert best[0] == pytest.approx(90.0, abs=1e-9)


def test_best_elevations_equal_brute_force_random_points():
    cfg = g.ConstellationConfig(120, 10, phasing=3, inclination=70.0, altitude=800.0)
    rng = np.random.default_rng(3)
    lat = np.degrees(np.arcsin(rng.uniform(-1, 1, 2000)))
    lon = rng.uniform(-180, 180, 2000)
    for t in (0.0, 1234.5):
        pos = g.walker_positions(cfg, t)
        got = g.best_elevations(pos, lat, lon)
        want = oracles.brute_force_best(pos, lat, lon, 6371.0)
        assert np.abs(got - want).max() < 1e-9


def test_coverage_tie_break_is_deterministic():
    # a single equatorial satellite: the worst points are the two antipodal-ish extremes
    cfg = g.ConstellationConfig(1, 1, inclination=0.0)
    rep = g.coverage_check(cfg, 30.0, [0.0, 0.0])
    assert rep.worst_time == 0.0
    lat, lon = g.coverage_grid(30.0)
    best = g.best_elevations(g.walker_positions(cfg), lat, lon)
    ties = [(la, lo) for la, lo, b in zip(lat, lon, best) if b == best.min()]
    assert (rep.worst_point.latitude, rep.worst_point.longitude) == min(ties)
    assert not rep.covered


def test_coverage_requires_samples():
    with pytest.raises(ValueError):
        g.coverage_check(g.ConstellationConfig(1, 1), 10.0, [])


def test_phasing_scan_tie_goes_to_smallest():
    cfg = g.ConstellationConfig(4, 4, inclination=0.0, altitude=340.0)
    scan = g.phasing_scan(cfg, 30.0, [0.0])
    top = scan.best.worst_best_elevation
    assert scan.best_phasing == min(f for f, r in scan.by_phasing.items() if r.worst_best_elevation == top)
