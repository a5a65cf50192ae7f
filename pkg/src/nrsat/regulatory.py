"""Article 21 style PFD masks and PFD/EIRP conversions.

A mask maps the angle of arrival above the horizontal plane to a PFD limit
in dBW/m^2 per reference bandwidth. The satellite elevation seen by the
protected receiver is used as the arrival angle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

_CONTINUITY_TOL = 1e-9


@dataclass(frozen=True)
class MaskSegment:
    """Limit ``base + slope * (angle - anchor)`` on ``[start, stop]`` degrees."""

    start: float
    stop: float
    base: float
    slope: float = 0.0
    anchor: float = 0.0

    def __call__(self, angle: float) -> float:
        return self.base + self.slope * (angle - self.anchor)


@dataclass(frozen=True)
class PfdValue:
    value: float
    reference_bandwidth: float = 1.0

    def __post_init__(self):
        if not self.reference_bandwidth > 0:
            raise ValueError("reference bandwidth must be positive")


@dataclass(frozen=True)
class RegulatoryMask:
    band_label: str
    segments: tuple[MaskSegment, ...]
    reference_bandwidth: float = 1.0
    service: str = ""

    def __post_init__(self):
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        if not segs:
            raise ValueError(f"mask {self.band_label!r} has no segments")
        if not self.reference_bandwidth > 0:
            raise ValueError(f"mask {self.band_label!r}: reference bandwidth must be positive")
        if segs[0].start != 0.0 or segs[-1].stop != 90.0:
            raise ValueError(f"mask {self.band_label!r}: segments must span [0, 90] degrees")
        for seg in segs:
            if not seg.stop > seg.start:
                raise ValueError(f"mask {self.band_label!r}: empty segment [{seg.start}, {seg.stop}]")
        for left, right in zip(segs, segs[1:]):
            if left.stop != right.start:
                raise ValueError(
                    f"mask {self.band_label!r}: gap or overlap between {left.stop} and {right.start}"
                )
            jump = abs(left(left.stop) - right(right.start))
            if jump > _CONTINUITY_TOL:
                raise ValueError(
                    f"mask {self.band_label!r}: discontinuous at {left.stop} deg (jump {jump:g} dB)"
                )

    @property
    def breakpoints(self) -> list[float]:
        return [s.start for s in self.segments] + [self.segments[-1].stop]

    def segment_for(self, angle: float) -> MaskSegment:
        """Segment containing ``angle``; boundaries resolve to the lower segment."""
        _check_angle(angle)
        for seg in self.segments:
            if angle <= seg.stop:
                return seg
        return self.segments[-1]

    def __call__(self, angle: float) -> float:
        return self.segment_for(angle)(angle)


def _check_angle(angle: float) -> None:
    if not 0.0 <= angle <= 90.0:
        raise ValueError(f"arrival angle {angle} outside [0, 90] degrees")


def _ngso_mask(label: str, service: str, low: float, slope: float) -> RegulatoryMask:
    return RegulatoryMask(
        band_label=label,
        service=service,
        segments=(
            MaskSegment(0.0, 5.0, low),
            MaskSegment(5.0, 25.0, low, slope, 5.0),
            MaskSegment(25.0, 90.0, -105.0),
        ),
    )


KA_LOW = "17.7-19.3 GHz"
KA_HIGH = "19.3-19.7 GHz"
QV_NGSO = "37.5-40 GHz NGSO"
QV_GSO = "37.5-40 GHz GSO"


def builtin_masks() -> list[RegulatoryMask]:
    """The four shared-band masks around 19 GHz and 39 GHz."""
    fss = "Fixed-satellite (space-to-Earth)"
    return [
        _ngso_mask(KA_LOW, fss, -115.0, 0.5),
        _ngso_mask(KA_HIGH, fss, -115.0, 0.5),
        _ngso_mask(QV_NGSO, "Fixed/mobile-satellite, non-geostationary", -120.0, 0.75),
        RegulatoryMask(
            band_label=QV_GSO,
            service="Fixed/mobile-satellite, geostationary",
            segments=(
                MaskSegment(0.0, 5.0, -127.0),
                MaskSegment(5.0, 20.0, -127.0, 4.0 / 3.0, 5.0),
                MaskSegment(20.0, 25.0, -107.0, 0.4, 20.0),
                MaskSegment(25.0, 90.0, -105.0),
            ),
        ),
    ]


def find_mask(masks, band_label: str) -> RegulatoryMask:
    for mask in masks:
        if mask.band_label == band_label:
            return mask
    known = ", ".join(repr(m.band_label) for m in masks)
    raise KeyError(f"unknown band {band_label!r}; available: {known}")


def pfd_limit(mask: RegulatoryMask, arrival_angle: float) -> PfdValue:
    return PfdValue(mask(arrival_angle), mask.reference_bandwidth)


def spreading_loss_db(distance: float) -> float:
    """10 log10 of the sphere area 4 pi d^2 (d in km, area in m^2)."""
    if not distance > 0:
        raise ValueError(f"distance must be positive, got {distance}")
    return 10.0 * math.log10(4.0 * math.pi * (distance * 1000.0) ** 2)


def max_eirp_from_pfd(pfd: PfdValue, distance: float, carrier_bandwidth: float) -> float:
    """Largest carrier EIRP (dBW) keeping the ground PFD at ``pfd``.

    Parameters
    ----------
    pfd : PfdValue
        Limit per reference bandwidth.
    distance : float
        Slant range, km.
    carrier_bandwidth : float
        Carrier bandwidth, MHz.
    """
    if not carrier_bandwidth > 0:
        raise ValueError(f"carrier bandwidth must be positive, got {carrier_bandwidth}")
    return (
        pfd.value
        + 10.0 * math.log10(carrier_bandwidth / pfd.reference_bandwidth)
        + spreading_loss_db(distance)
    )


def pfd_from_eirp(eirp_density: float, distance: float) -> PfdValue:
    """Ground PFD per MHz from an EIRP spectral density in dBW/Hz."""
    return PfdValue(eirp_density + 60.0 - spreading_loss_db(distance), 1.0)
