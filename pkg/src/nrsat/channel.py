"""Propagation impairments and receiver noise."""
from __future__ import annotations

import bisect
import csv
import math
from dataclasses import dataclass
from pathlib import Path
from statistics import NormalDist

from .constants import BOLTZMANN_DBW_K_HZ, SPEED_OF_LIGHT, THERMAL_NOISE_DBM_HZ

ATTENUATION_KINDS = ("flat", "table", "cosecant")
_TABLE_MIN_SPAN = (5.0, 90.0)


@dataclass(frozen=True)
class AttenuationModel:
    """Atmospheric attenuation versus elevation.

    ``flat`` returns ``flat_value`` everywhere, ``table`` interpolates
    linearly between ``(elevation, loss)`` knots, and ``cosecant`` scales a
    zenith loss by ``1 / sin(elevation)``.
    """

    kind: str = "flat"
    flat_value: float = 0.0
    table: tuple[tuple[float, float], ...] = ()
    zenith_loss: float = 0.0

    def __post_init__(self):
        if self.kind not in ATTENUATION_KINDS:
            raise ValueError(f"attenuation kind must be one of {ATTENUATION_KINDS}, got {self.kind!r}")
        if self.kind == "flat" and self.flat_value < 0:
            raise ValueError("flat attenuation must be non-negative")
        if self.kind == "cosecant" and self.zenith_loss < 0:
            raise ValueError("zenith loss must be non-negative")
        if self.kind == "table":
            table = tuple((float(e), float(l)) for e, l in self.table)
            object.__setattr__(self, "table", table)
            elevs = [e for e, _ in table]
            if any(b <= a for a, b in zip(elevs, elevs[1:])):
                raise ValueError("attenuation table elevations must be strictly increasing")
            if not elevs or elevs[0] > _TABLE_MIN_SPAN[0] or elevs[-1] < _TABLE_MIN_SPAN[1]:
                raise ValueError("attenuation table must span at least [5, 90] degrees")
            if any(l < 0 for _, l in table):
                raise ValueError("attenuation table losses must be non-negative")

    @classmethod
    def flat(cls, value: float) -> "AttenuationModel":
        return cls(kind="flat", flat_value=value)

    @classmethod
    def cosecant(cls, zenith_loss: float) -> "AttenuationModel":
        return cls(kind="cosecant", zenith_loss=zenith_loss)

    @classmethod
    def from_table(cls, rows) -> "AttenuationModel":
        return cls(kind="table", table=tuple(rows))

    @classmethod
    def from_csv(cls, path) -> "AttenuationModel":
        """Read a two-column ``elevation_deg,loss_db`` file with a header row."""
        path = Path(path)
        with path.open(newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip() for h in header] != ["elevation_deg", "loss_db"]:
                raise ValueError(f"{path}:1: expected header 'elevation_deg,loss_db'")
            rows = []
            for lineno, row in enumerate(reader, start=2):
                if not row or not "".join(row).strip():
                    continue
                if len(row) != 2:
                    raise ValueError(f"{path}:{lineno}: expected 2 columns, got {len(row)}")
                try:
                    rows.append((float(row[0]), float(row[1])))
                except ValueError:
                    raise ValueError(f"{path}:{lineno}: non-numeric value in {row!r}") from None
        return cls.from_table(rows)

    @property
    def min_elevation(self) -> float:
        if self.kind == "table":
            return self.table[0][0]
        if self.kind == "cosecant":
            return _TABLE_MIN_SPAN[0]
        return 0.0


def free_space_loss(frequency: float, distance: float) -> float:
    """Free-space loss in dB for ``frequency`` in GHz and ``distance`` in km."""
    if not frequency > 0 or not distance > 0:
        raise ValueError("frequency and distance must be positive")
    return 20.0 * math.log10(4.0 * math.pi * distance * 1e3 * frequency * 1e9 / SPEED_OF_LIGHT)


def atmospheric_loss(model: AttenuationModel, elevation: float) -> float:
    if model.kind == "flat":
        return model.flat_value
    if model.kind == "cosecant":
        if not _TABLE_MIN_SPAN[0] <= elevation <= 90.0:
            raise ValueError(f"elevation {elevation} outside cosecant model domain [5, 90]")
        return model.zenith_loss / math.sin(math.radians(elevation))
    elevs = [e for e, _ in model.table]
    if not elevs[0] <= elevation <= elevs[-1]:
        raise ValueError(f"elevation {elevation} outside table domain [{elevs[0]}, {elevs[-1]}]")
    i = bisect.bisect_left(elevs, elevation)
    if elevs[i] == elevation:
        return model.table[i][1]
    (e0, l0), (e1, l1) = model.table[i - 1], model.table[i]
    return l0 + (l1 - l0) * (elevation - e0) / (e1 - e0)


def shadow_margin(sigma: float, availability: float) -> float:
    """Lognormal shadowing margin exceeded with probability ``1 - availability``."""
    if not 0.0 < availability < 1.0:
        raise ValueError(f"availability must lie in (0, 1), got {availability}")
    if sigma < 0:
        raise ValueError(f"sigma must be non-negative, got {sigma}")
    if availability <= 0.5 or sigma == 0:
        return 0.0
    return sigma * NormalDist().inv_cdf(availability)


def noise_psd(noise_figure: float) -> float:
    """Receiver noise PSD in dBm/Hz referred to the -174 dBm/Hz floor."""
    if noise_figure < 0:
        raise ValueError(f"noise figure must be non-negative, got {noise_figure}")
    return THERMAL_NOISE_DBM_HZ + noise_figure


def noise_power(psd: float, bandwidth: float) -> float:
    """Noise power in dBm over ``bandwidth`` MHz."""
    if not bandwidth > 0:
        raise ValueError(f"bandwidth must be positive, got {bandwidth}")
    return psd + 10.0 * math.log10(bandwidth * 1e6)


def receiver_noise_temperature_dbk(noise_figure: float) -> float:
    return noise_psd(noise_figure) - 30.0 - BOLTZMANN_DBW_K_HZ


@dataclass(frozen=True)
class NoiseChain:
    noise_figure: float
    antenna_temperature: float
    input_loss: float = 0.0
    reference_temperature: float = 300.0

    def __post_init__(self):
        if self.noise_figure < 0:
            raise ValueError("noise figure must be non-negative")
        if self.input_loss < 0:
            raise ValueError("input loss must be non-negative")
        if not self.antenna_temperature > 0 or not self.reference_temperature > 0:
            raise ValueError("temperatures must be positive")


def system_noise_temperature(chain: NoiseChain) -> float:
    """System temperature in K with the input loss lumped into the noise figure."""
    factor = 10.0 ** ((chain.noise_figure + chain.input_loss) / 10.0)
    return chain.antenna_temperature + chain.reference_temperature * (factor - 1.0)


def g_over_t(gain: float, system_temperature: float) -> float:
    if not system_temperature > 0:
        raise ValueError("system temperature must be positive")
    return gain - 10.0 * math.log10(system_temperature)
