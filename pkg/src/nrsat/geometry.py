"""Circular-orbit constellations and Earth-satellite visibility geometry.

Angles are degrees at every public boundary and radians internally.
Distances are km. The Earth is a non-rotating sphere: positions are
expressed in an Earth-centred frame that coincides with the Earth-fixed
frame at epoch 0, and that coincidence is kept for all epochs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .constants import EARTH_RADIUS_KM, MU_EARTH


@dataclass(frozen=True)
class EarthModel:
    """Spherical Earth.

    ``ignore_rotation`` is recorded for reporting only; rotation is never
    modelled.
    """

    radius: float = EARTH_RADIUS_KM
    ignore_rotation: bool = True

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"earth radius must be positive, got {self.radius}")


EARTH = EarthModel()


@dataclass(frozen=True)
class GroundPoint:
    latitude: float
    longitude: float
    altitude_above_ellipsoid: float = 0.0

    def __post_init__(self):
        if not -90.0 <= self.latitude <= 90.0:
            raise ValueError(f"latitude {self.latitude} outside [-90, 90]")
        if not -180.0 <= self.longitude < 180.0:
            raise ValueError(f"longitude {self.longitude} outside [-180, 180)")

    def position(self, earth: EarthModel = EARTH) -> np.ndarray:
        r = earth.radius + self.altitude_above_ellipsoid
        return r * _unit_vector(math.radians(self.latitude), math.radians(self.longitude))


@dataclass(frozen=True)
class SatelliteState:
    position: tuple[float, float, float]
    plane_index: int
    slot_index: int
    epoch_offset: float = 0.0

    @property
    def radius(self) -> float:
        return math.sqrt(sum(c * c for c in self.position))


@dataclass(frozen=True)
class ConstellationConfig:
    """Walker constellation ``i: t/p/f`` at a common altitude."""

    total_satellites: int
    planes: int
    phasing: int = 0
    inclination: float = 90.0
    altitude: float = 340.0
    raan_spread: float = 360.0
    min_elevation: float = 40.0

    def __post_init__(self):
        if self.total_satellites < 1 or self.planes < 1:
            raise ValueError("total_satellites and planes must be >= 1")
        if self.total_satellites % self.planes:
            raise ValueError(
                f"total_satellites ({self.total_satellites}) must be divisible "
                f"by planes ({self.planes})"
            )
        if not 0 <= self.phasing <= self.planes - 1:
            raise ValueError(f"phasing must lie in [0, {self.planes - 1}], got {self.phasing}")
        if not self.altitude > 0:
            raise ValueError(f"altitude must be positive, got {self.altitude}")
        if not 0.0 <= self.min_elevation < 90.0:
            raise ValueError(f"min_elevation must lie in [0, 90), got {self.min_elevation}")
        if self.raan_spread not in (180.0, 360.0):
            raise ValueError(f"raan_spread must be 180 or 360, got {self.raan_spread}")

    @property
    def sats_per_plane(self) -> int:
        return self.total_satellites // self.planes

    def period(self, earth: EarthModel = EARTH) -> float:
        """Orbital period in seconds."""
        return 2.0 * math.pi / mean_motion(self.altitude, earth)


@dataclass(frozen=True)
class CoverageReport:
    worst_best_elevation: float
    worst_point: GroundPoint
    worst_time: float
    min_elevation: float
    grid_step: float
    n_times: int

    @property
    def covered(self) -> bool:
        return self.worst_best_elevation >= self.min_elevation


@dataclass(frozen=True)
class PhasingScan:
    best_phasing: int
    best: CoverageReport
    by_phasing: dict = field(default_factory=dict)


def _unit_vector(lat: float, lon: float) -> np.ndarray:
    return np.array([math.cos(lat) * math.cos(lon), math.cos(lat) * math.sin(lon), math.sin(lat)])


def _check_elevation(elevation: float) -> None:
    if not 0.0 <= elevation <= 90.0:
        raise ValueError(f"elevation {elevation} outside [0, 90] degrees")


def _check_altitude(altitude: float) -> None:
    if not altitude > 0:
        raise ValueError(f"altitude must be positive, got {altitude}")


def slant_range(altitude: float, elevation: float, earth: EarthModel = EARTH) -> float:
    """Distance from a ground user to a satellite seen at ``elevation``.

    Parameters
    ----------
    altitude : float
        Satellite altitude above the sphere, km.
    elevation : float
        Elevation of the satellite above the user's horizon, degrees.
    earth : EarthModel
        Earth radius provider.

    Returns
    -------
    float
        Slant range in km; equals ``altitude`` at zenith.
    """
    _check_elevation(elevation)
    _check_altitude(altitude)
    if elevation == 90.0:
        return float(altitude)
    re = earth.radius
    e = math.radians(elevation)
    return math.sqrt((re + altitude) ** 2 - (re * math.cos(e)) ** 2) - re * math.sin(e)


def nadir_scan_angle(altitude: float, elevation: float, earth: EarthModel = EARTH) -> float:
    """Off-nadir angle at the satellite towards a user at ``elevation``."""
    _check_elevation(elevation)
    _check_altitude(altitude)
    re = earth.radius
    return math.degrees(math.asin(re * math.cos(math.radians(elevation)) / (re + altitude)))


def earth_view_half_angle(altitude: float, earth: EarthModel = EARTH) -> float:
    """Half-cone angle under which the satellite sees the Earth's limb."""
    _check_altitude(altitude)
    return math.degrees(math.asin(earth.radius / (earth.radius + altitude)))


def coverage_central_angle(altitude: float, min_elevation: float, earth: EarthModel = EARTH) -> float:
    """Earth central angle of the coverage circle at ``min_elevation``."""
    return 90.0 - min_elevation - nadir_scan_angle(altitude, min_elevation, earth)


def mean_motion(altitude: float, earth: EarthModel = EARTH) -> float:
    """Circular-orbit mean motion in rad/s."""
    _check_altitude(altitude)
    return math.sqrt(MU_EARTH / (earth.radius + altitude) ** 3)


def walker_elements(config: ConstellationConfig) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Plane index, slot index, RAAN and initial argument of latitude (radians)."""
    t, p, s = config.total_satellites, config.planes, config.sats_per_plane
    plane = np.repeat(np.arange(p), s)
    slot = np.tile(np.arange(s), p)
    raan = plane * (config.raan_spread / p)
    anomaly = slot * (360.0 / s) + plane * config.phasing * (360.0 / t)
    return plane, slot, np.radians(raan), np.radians(anomaly)


def walker_positions(config: ConstellationConfig, epoch: float = 0.0, earth: EarthModel = EARTH) -> np.ndarray:
    """Satellite positions, shape ``(t, 3)`` in km, ordered plane by plane."""
    _, _, raan, u0 = walker_elements(config)
    r = earth.radius + config.altitude
    u = u0 + mean_motion(config.altitude, earth) * epoch
    inc = math.radians(config.inclination)
    cos_u, sin_u = np.cos(u), np.sin(u)
    cos_o, sin_o = np.cos(raan), np.sin(raan)
    x = cos_o * cos_u - sin_o * sin_u * math.cos(inc)
    y = sin_o * cos_u + cos_o * sin_u * math.cos(inc)
    z = sin_u * math.sin(inc)
    return r * np.column_stack([x, y, z])


def walker_delta(config: ConstellationConfig, epoch: float = 0.0, earth: EarthModel = EARTH) -> list[SatelliteState]:
    """Generate the Walker constellation at ``epoch`` seconds."""
    plane, slot, _, _ = walker_elements(config)
    pos = walker_positions(config, epoch, earth)
    return [
        SatelliteState(tuple(float(c) for c in pos[i]), int(plane[i]), int(slot[i]), float(epoch))
        for i in range(len(pos))
    ]


def subsatellite_point(sat: SatelliteState) -> GroundPoint:
    x, y, z = sat.position
    lat = math.degrees(math.atan2(z, math.hypot(x, y)))
    lon = math.degrees(math.atan2(y, x))
    if lon >= 180.0:
        lon -= 360.0
    return GroundPoint(lat, lon)


def destination_point(origin: GroundPoint, central_angle: float, azimuth: float) -> GroundPoint:
    """Point reached by travelling ``central_angle`` degrees along a great circle."""
    lat1, lon1 = math.radians(origin.latitude), math.radians(origin.longitude)
    d, az = math.radians(central_angle), math.radians(azimuth)
    lat2 = math.asin(math.sin(lat1) * math.cos(d) + math.cos(lat1) * math.sin(d) * math.cos(az))
    lon2 = lon1 + math.atan2(
        math.sin(az) * math.sin(d) * math.cos(lat1), math.cos(d) - math.sin(lat1) * math.sin(lat2)
    )
    lon2 = (math.degrees(lon2) + 180.0) % 360.0 - 180.0
    return GroundPoint(math.degrees(lat2), lon2, origin.altitude_above_ellipsoid)


def elevation_to(point: GroundPoint, sat: SatelliteState, earth: EarthModel = EARTH) -> float:
    """Elevation of ``sat`` above the local horizontal at ``point``. Negative below horizon."""
    g = point.position(earth)
    los = np.asarray(sat.position, dtype=float) - g
    up = g / np.linalg.norm(g)
    vertical = float(np.dot(los, up))
    # atan2 stays accurate near zenith where asin of the sine loses half the digits
    horizontal = float(np.linalg.norm(los - vertical * up))
    return math.degrees(math.atan2(vertical, horizontal))


def coverage_grid(grid_step: float) -> tuple[np.ndarray, np.ndarray]:
    """Flattened equiangular grid, latitude-major, each pole present once.

    Interior latitudes run from -90 + step upward; longitudes from -180
    (inclusive) to 180 (exclusive). Poles sit at longitude 0.
    """
    if not grid_step > 0:
        raise ValueError(f"grid_step must be positive, got {grid_step}")
    eps = 1e-9 * grid_step
    lats_in = np.arange(-90.0 + grid_step, 90.0 - eps, grid_step)
    lons = np.arange(-180.0, 180.0 - eps, grid_step)
    lat = np.concatenate([[-90.0], np.repeat(lats_in, lons.size), [90.0]])
    lon = np.concatenate([[0.0], np.tile(lons, lats_in.size), [0.0]])
    return lat, lon


def default_time_samples(config: ConstellationConfig, n: int = 20, earth: EarthModel = EARTH) -> list[float]:
    """``n`` epochs evenly spread over one orbital period."""
    period = config.period(earth)
    return [period * k / n for k in range(n)]


def best_elevations(positions: np.ndarray, lat: np.ndarray, lon: np.ndarray, earth: EarthModel = EARTH) -> np.ndarray:
    """Highest elevation over all satellites for each ground point (altitude 0).

    Every satellite must sit at the same radius: elevation from a ground
    point is then monotone in the central angle, so the nearest satellite
    in direction gives the maximum.
    """
    positions = np.asarray(positions, dtype=float)
    if positions.size == 0:
        raise ValueError("empty constellation")
    radii = np.linalg.norm(positions, axis=1)
    r = radii[0]
    if not np.allclose(radii, r, rtol=0, atol=1e-6):
        raise ValueError("best_elevations requires all satellites at one radius")
    la, lo = np.radians(lat), np.radians(lon)
    ground = np.column_stack([np.cos(la) * np.cos(lo), np.cos(la) * np.sin(lo), np.sin(la)])
    units = positions / radii[:, None]
    k = min(2, len(units))
    _, idx = cKDTree(units).query(ground, k=k)
    idx = np.asarray(idx).reshape(len(ground), k)
    cand = units[idx]
    # recompute from the (point, satellite) pair so the value does not depend on
    # which other satellites built the tree; two candidates absorb near-ties
    gx, gy, gz = (ground[:, None, i] for i in range(3))
    cx, cy, cz = cand[..., 0], cand[..., 1], cand[..., 2]
    cos_g = gx * cx + gy * cy + gz * cz
    sin_g = np.sqrt((gy * cz - gz * cy) ** 2 + (gz * cx - gx * cz) ** 2 + (gx * cy - gy * cx) ** 2)
    elev = np.arctan2(cos_g - earth.radius / radii[idx], sin_g)
    return np.degrees(elev.max(axis=1))


def _worst_of(values: np.ndarray, lat: np.ndarray, lon: np.ndarray, times: Sequence[float]) -> tuple[float, int, int]:
    # values: (n_times, n_points); ties -> lowest lat, lowest lon, earliest time
    worst = values.min()
    ti, pi = np.nonzero(values == worst)
    t_arr = np.asarray(times, dtype=float)[ti]
    order = np.lexsort((t_arr, lon[pi], lat[pi]))
    k = order[0]
    return float(worst), int(ti[k]), int(pi[k])


def coverage_check(
    config: ConstellationConfig,
    grid_step: float = 2.0,
    time_samples: Iterable[float] | None = None,
    earth: EarthModel = EARTH,
    keep=None,
) -> CoverageReport:
    """Worst-case, over grid points and epochs, of the best visible elevation.

    Parameters
    ----------
    config : ConstellationConfig
    grid_step : float
        Grid spacing in degrees.
    time_samples : iterable of float, optional
        Epochs in seconds; defaults to 20 samples over one period.
    earth : EarthModel
    keep : array-like, optional
        Boolean mask or index array selecting a subset of the satellites
        (in ``walker_delta`` order); used to study degraded constellations.
    """
    times = list(default_time_samples(config, earth=earth) if time_samples is None else time_samples)
    if not times:
        raise ValueError("at least one time sample is required")
    lat, lon = coverage_grid(grid_step)
    values = np.empty((len(times), lat.size))
    for i, t in enumerate(times):
        pos = walker_positions(config, t, earth)
        if keep is not None:
            pos = pos[np.asarray(keep)]
        values[i] = best_elevations(pos, lat, lon, earth)
    worst, ti, pi = _worst_of(values, lat, lon, times)
    return CoverageReport(
        worst_best_elevation=worst,
        worst_point=GroundPoint(float(lat[pi]), float(lon[pi])),
        worst_time=float(times[ti]),
        min_elevation=config.min_elevation,
        grid_step=grid_step,
        n_times=len(times),
    )


def phasing_scan(
    config: ConstellationConfig,
    grid_step: float = 2.0,
    time_samples: Iterable[float] | None = None,
    earth: EarthModel = EARTH,
    phasings: Iterable[int] | None = None,
) -> PhasingScan:
    """Run ``coverage_check`` for each phasing factor and keep the best.

    Ties on the worst-case elevation go to the smallest phasing factor.
    """
    times = None if time_samples is None else list(time_samples)
    candidates = range(config.planes) if phasings is None else phasings
    reports = {}
    for f in candidates:
        reports[int(f)] = coverage_check(replace(config, phasing=int(f)), grid_step, times, earth)
    best_f = max(reports, key=lambda f: (reports[f].worst_best_elevation, -f))
    return PhasingScan(best_phasing=best_f, best=reports[best_f], by_phasing=reports)
