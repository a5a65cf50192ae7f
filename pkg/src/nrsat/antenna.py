"""Phased-array sizing for satellite direct-radiating arrays and UE panels."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .constants import SPEED_OF_LIGHT

BEAMWIDTH_FACTOR = 0.886  # half-power width of a uniform aperture, in lambda/D
LATTICES = ("triangular", "rectangular")
PLAUSIBLE_ELEMENT_GAIN_DBI = (0.0, 15.0)


def wavelength(frequency: float) -> float:
    """Wavelength in m for a frequency in GHz."""
    if not frequency > 0:
        raise ValueError(f"frequency must be positive, got {frequency}")
    return SPEED_OF_LIGHT / (frequency * 1e9)


@dataclass(frozen=True)
class ApertureArray:
    """Planar array described by its aperture.

    ``element_spacing`` is in wavelengths; ``element_count`` overrides the
    lattice enumeration when the design fixes it.
    """

    diameter: float
    frequency: float
    aperture_efficiency: float = 1.0
    lattice: str = "triangular"
    element_spacing: float = 0.5
    element_count: Optional[int] = None

    def __post_init__(self):
        if not self.diameter > 0:
            raise ValueError(f"diameter must be positive, got {self.diameter}")
        if not self.frequency > 0:
            raise ValueError(f"frequency must be positive, got {self.frequency}")
        if not 0 < self.aperture_efficiency <= 1:
            raise ValueError(f"aperture efficiency must lie in (0, 1], got {self.aperture_efficiency}")
        if not self.element_spacing > 0:
            raise ValueError(f"element spacing must be positive, got {self.element_spacing}")
        if self.lattice not in LATTICES:
            raise ValueError(f"lattice must be one of {LATTICES}, got {self.lattice!r}")
        if self.element_count is not None and self.element_count < 1:
            raise ValueError(f"element count must be >= 1, got {self.element_count}")

    @property
    def wavelength(self) -> float:
        return wavelength(self.frequency)

    @property
    def elements(self) -> int:
        if self.element_count is not None:
            return self.element_count
        return hex_array_element_count(self.diameter, self.element_spacing * self.wavelength)


@dataclass(frozen=True)
class UePanel:
    """Panel grid ``(M, N, P, Mg, Ng)``: Mg x Ng panels of M x N elements in P polarizations."""

    m: int
    n: int
    p: int = 1
    mg: int = 1
    ng: int = 1
    element_gain: float = 8.0

    def __post_init__(self):
        for name in ("m", "n", "p", "mg", "ng"):
            if getattr(self, name) < 1:
                raise ValueError(f"panel count {name} must be >= 1, got {getattr(self, name)}")
        lo, hi = PLAUSIBLE_ELEMENT_GAIN_DBI
        if not lo <= self.element_gain <= hi:
            raise ValueError(f"element gain {self.element_gain} dBi outside plausible range [{lo}, {hi}]")

    @property
    def total_elements(self) -> int:
        # one polarization only
        return self.m * self.n * self.mg * self.ng

    @property
    def gain(self) -> float:
        return element_count_gain(self.total_elements, self.element_gain)

    def side_length(self, frequency: float, spacing: float = 0.5) -> float:
        """Side of the square aperture holding all elements at ``spacing`` wavelengths, in cm."""
        return math.sqrt(self.total_elements) * spacing_to_length(spacing, frequency)


@dataclass(frozen=True)
class TxRfChain:
    """Transmit RF section. ``beam_rolloff`` is a positive magnitude in dB."""

    per_element_power: float
    element_count: int
    output_losses: float = 0.0
    beam_rolloff: float = 0.0
    beams: int = 1
    bandwidth_per_beam: float = 0.5

    def __post_init__(self):
        if not self.per_element_power > 0:
            raise ValueError("per-element power must be positive")
        if self.element_count < 1:
            raise ValueError("element count must be >= 1")
        if self.output_losses < 0:
            raise ValueError("output losses must be non-negative")
        if self.beams < 1:
            raise ValueError("beams must be >= 1")
        if not self.bandwidth_per_beam > 0:
            raise ValueError("bandwidth per beam must be positive")

    @property
    def total_power(self) -> float:
        return self.per_element_power * self.element_count


def element_count_gain(n_elements: int, element_gain: float) -> float:
    """Array gain in dBi of ``n_elements`` coherently combined elements."""
    if n_elements < 1:
        raise ValueError(f"n_elements must be >= 1, got {n_elements}")
    return element_gain + 10.0 * math.log10(n_elements)


def aperture_gain(array: ApertureArray) -> float:
    """Boresight gain ``eta * (pi D / lambda)^2`` in dBi."""
    ratio = math.pi * array.diameter / array.wavelength
    return 10.0 * math.log10(array.aperture_efficiency * ratio * ratio)


def beamwidth_3db(array: ApertureArray) -> float:
    """Boresight half-power beamwidth in degrees."""
    return math.degrees(BEAMWIDTH_FACTOR * array.wavelength / array.diameter)


def scanned_beamwidth(boresight: float, scan_angle: float) -> float:
    """Beam broadening of a planar array steered ``scan_angle`` off boresight."""
    if not 0.0 <= scan_angle < 90.0:
        raise ValueError(f"scan angle must lie in [0, 90), got {scan_angle}")
    return boresight / math.cos(math.radians(scan_angle))


def max_grating_free_spacing(scan_angle: float, lattice: str = "triangular") -> float:
    """Largest element spacing (wavelengths) free of grating lobes up to ``scan_angle``."""
    if not 0.0 <= scan_angle < 90.0:
        raise ValueError(f"scan angle must lie in [0, 90), got {scan_angle}")
    if lattice not in LATTICES:
        raise ValueError(f"lattice must be one of {LATTICES}, got {lattice!r}")
    rect = 1.0 / (1.0 + math.sin(math.radians(scan_angle)))
    return rect * 2.0 / math.sqrt(3.0) if lattice == "triangular" else rect


def spacing_to_length(spacing: float, frequency: float) -> float:
    """Convert a spacing in wavelengths to cm at ``frequency`` GHz."""
    if not spacing > 0:
        raise ValueError(f"spacing must be positive, got {spacing}")
    return spacing * wavelength(frequency) * 100.0


def hex_array_element_count(diameter: float, spacing: float) -> int:
    """Triangular-lattice nodes inside the hexagon inscribed in a circle.

    The hexagon has two vertices on the x axis, so its top and bottom edges
    are parallel to the lattice rows. Rows sit at ``y = k * spacing * sqrt(3)/2``
    with odd rows shifted by half a spacing; a node sits at the centre.

    Parameters
    ----------
    diameter : float
        Diameter of the circumscribing circle, m.
    spacing : float
        Element pitch, m.
    """
    if not diameter > 0 or not spacing > 0:
        raise ValueError("diameter and spacing must be positive")
    radius = diameter / 2.0
    row_pitch = spacing * math.sqrt(3.0) / 2.0
    eps = 1e-9
    k_max = math.floor(radius * math.sqrt(3.0) / 2.0 / row_pitch + eps)
    count = 0
    for k in range(-k_max, k_max + 1):
        half_width = (radius - abs(k) * row_pitch / math.sqrt(3.0)) / spacing
        if k % 2 == 0:
            count += 2 * math.floor(half_width + eps) + 1
        else:
            count += 2 * math.floor(half_width + 0.5 + eps)
    return count


def eirp_total(chain: TxRfChain, gain: float) -> float:
    """Total radiated EIRP in dBW."""
    return 10.0 * math.log10(chain.total_power) + gain - chain.output_losses - abs(chain.beam_rolloff)


def eirp_density(chain: TxRfChain, eirp: float) -> float:
    """EIRP spectral density in dBW/Hz when ``eirp`` is split evenly over all beams."""
    return eirp - 10.0 * math.log10(chain.beams) - 10.0 * math.log10(chain.bandwidth_per_beam * 1e9)
