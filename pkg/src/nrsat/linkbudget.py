"""Downlink and uplink ledgers, MCS selection, capacity rollups and sweeps.

A ledger is an ordered list of named dB-domain lines. Lines carrying a
non-zero ``sign`` are the constituents of the C/N: summing ``sign * value``
over them reproduces the stored CNR. The remaining lines are informational
(intermediate quantities printed for cross-checking).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

from . import antenna, channel, geometry, regulatory
from .antenna import ApertureArray, TxRfChain, UePanel
from .channel import AttenuationModel, NoiseChain
from .constants import BOLTZMANN_DBW_K_HZ, FCC_PEAK_EIRP_DBM
from .geometry import EARTH, EarthModel
from .regulatory import RegulatoryMask

NR_FR2_BANDWIDTHS = (50.0, 100.0, 200.0, 400.0)
MIN_UPLINK_BANDWIDTH = 1.0  # one FR2 resource block (720 kHz) plus guard, MHz

# Typical handheld ranges; exceeding them warns, it does not fail.
UE_TYPICAL_RANGES = {
    "noise_figure": (5.0, 10.0),
    "implementation_loss": (3.0, 12.0),
    "element_gain": (5.0, 8.0),
}


class UeRangeWarning(UserWarning):
    """A UE parameter lies outside the typical handheld range."""


@dataclass(frozen=True)
class UeTerminal:
    panel: UePanel
    noise_figure: float = 7.0
    implementation_loss: float = 7.0
    peak_eirp: float = 29.0  # dBm
    fcc_eirp_cap: float = FCC_PEAK_EIRP_DBM

    def __post_init__(self):
        if self.peak_eirp > self.fcc_eirp_cap:
            raise ValueError(
                f"peak EIRP {self.peak_eirp:g} dBm exceeds the FCC cap of {self.fcc_eirp_cap:g} dBm"
            )
        if self.noise_figure < 0 or self.implementation_loss < 0:
            raise ValueError("noise figure and implementation loss must be non-negative")
        values = {
            "noise_figure": self.noise_figure,
            "implementation_loss": self.implementation_loss,
            "element_gain": self.panel.element_gain,
        }
        for name, value in values.items():
            lo, hi = UE_TYPICAL_RANGES[name]
            if not lo <= value <= hi:
                warnings.warn(f"UE {name} = {value:g} outside typical range [{lo:g}, {hi:g}]", UeRangeWarning)


@dataclass(frozen=True)
class SatellitePayload:
    """Transmit and receive sections of one satellite.

    Array frequencies size the antennas; ``downlink_frequency`` and
    ``uplink_frequency`` are the carriers used in the budgets. Setting
    ``rx_g_over_t`` bypasses the computed receive figure of merit.
    """

    tx_array: ApertureArray
    tx_chain: TxRfChain
    rx_array: ApertureArray
    rx_noise: NoiseChain
    altitude: float = 340.0
    downlink_frequency: float = 39.0
    uplink_frequency: float = 28.0
    rx_g_over_t: Optional[float] = None

    def __post_init__(self):
        if not self.altitude > 0:
            raise ValueError("payload altitude must be positive")
        if not self.downlink_frequency > 0 or not self.uplink_frequency > 0:
            raise ValueError("carrier frequencies must be positive")

    @property
    def tx_gain(self) -> float:
        return antenna.aperture_gain(self.tx_array)

    @property
    def tx_eirp(self) -> float:
        return antenna.eirp_total(self.tx_chain, self.tx_gain)

    @property
    def eirp_per_beam(self) -> float:
        return self.tx_eirp - 10.0 * math.log10(self.tx_chain.beams)

    @property
    def rx_gain(self) -> float:
        return antenna.aperture_gain(self.rx_array)

    @property
    def rx_system_temperature(self) -> float:
        return channel.system_noise_temperature(self.rx_noise)

    @property
    def computed_g_over_t(self) -> float:
        return channel.g_over_t(self.rx_gain, self.rx_system_temperature)

    @property
    def g_over_t(self) -> float:
        return self.computed_g_over_t if self.rx_g_over_t is None else self.rx_g_over_t


@dataclass(frozen=True)
class McsTable:
    """Step table of ``(required_cnr_db, spectral_efficiency)`` rows."""

    rows: tuple[tuple[float, float], ...]

    def __post_init__(self):
        rows = tuple((float(c), float(s)) for c, s in self.rows)
        object.__setattr__(self, "rows", rows)
        if not rows:
            raise ValueError("MCS table must not be empty")
        for (c0, s0), (c1, s1) in zip(rows, rows[1:]):
            if not c1 > c0:
                raise ValueError("MCS rows must be sorted by strictly increasing required CNR")
            if not s1 > s0:
                raise ValueError("spectral efficiency must increase strictly with required CNR")
        if rows[0][1] <= 0:
            raise ValueError("spectral efficiencies must be positive")


DEFAULT_MCS = McsTable(((-1.2, 0.5), (0.5, 0.66)))


@dataclass(frozen=True)
class ShadowSpec:
    sigma: float = 0.0
    availability: float = 0.95

    @property
    def margin(self) -> float:
        return channel.shadow_margin(self.sigma, self.availability)


@dataclass(frozen=True)
class LedgerLine:
    key: str
    label: str
    value: float
    unit: str
    sign: int = 0


@dataclass
class LinkLedger:
    direction: str
    lines: list[LedgerLine] = field(default_factory=list)
    cnr: float = float("nan")
    spectral_efficiency: float = 0.0
    data_rate: float = 0.0
    feasible: bool = False

    def add(self, key, label, value, unit, sign=0) -> float:
        self.lines.append(LedgerLine(key, label, float(value), unit, sign))
        return float(value)

    def line(self, key: str) -> LedgerLine:
        for ln in self.lines:
            if ln.key == key:
                return ln
        raise KeyError(key)

    def __getitem__(self, key: str) -> float:
        return self.line(key).value

    def recompute_cnr(self) -> float:
        return math.fsum(ln.sign * ln.value for ln in self.lines if ln.sign)

    def rows(self) -> list[LedgerLine]:
        """All lines followed by the terminal C/N, SE and rate lines."""
        tail = [
            LedgerLine("cnr", "C/N", self.cnr, "dB"),
            LedgerLine("spectral_efficiency", "Spectral efficiency", self.spectral_efficiency, "bps/Hz"),
            LedgerLine("data_rate", "Data rate", self.data_rate, "Mbps"),
            LedgerLine("feasible", "Feasible", 1.0 if self.feasible else 0.0, "flag"),
        ]
        return list(self.lines) + tail


def select_mcs(cnr: float, table: McsTable = DEFAULT_MCS) -> tuple[float, bool]:
    """Highest spectral efficiency whose required CNR is met."""
    best = 0.0
    for required, se in table.rows:
        if required <= cnr:
            best = se
    return best, best > 0.0


def _finish(ledger: LinkLedger, bandwidth: float, mcs: McsTable) -> LinkLedger:
    ledger.cnr = ledger.recompute_cnr()
    ledger.spectral_efficiency, ledger.feasible = select_mcs(ledger.cnr, mcs)
    ledger.data_rate = ledger.spectral_efficiency * bandwidth
    return ledger


def _check_elevation(elevation: float, model: AttenuationModel) -> None:
    if not 0.0 <= elevation <= 90.0:
        raise ValueError(f"elevation {elevation} outside [0, 90] degrees")
    if elevation < model.min_elevation:
        raise ValueError(
            f"elevation {elevation} below the {model.kind} channel model minimum of {model.min_elevation}"
        )


def downlink_budget(
    payload: SatellitePayload,
    ue: UeTerminal,
    mask: RegulatoryMask,
    elevation: float,
    bandwidth: float,
    atmosphere: AttenuationModel,
    shadow: ShadowSpec = ShadowSpec(),
    mcs: McsTable = DEFAULT_MCS,
    earth: EarthModel = EARTH,
    *,
    cap_to_payload: bool = False,
    eirp_override: Optional[float] = None,
    clutter_loss: float = 0.0,
    allowed_bandwidths: Optional[Sequence[float]] = NR_FR2_BANDWIDTHS,
) -> LinkLedger:
    """Satellite-to-UE budget with the EIRP set by the ground PFD limit.

    Parameters
    ----------
    payload, ue : SatellitePayload, UeTerminal
    mask : RegulatoryMask
        PFD mask evaluated at the elevation (taken as the arrival angle).
    elevation : float
        Elevation of the satellite seen from the UE, degrees.
    bandwidth : float
        Carrier bandwidth, MHz.
    atmosphere : AttenuationModel
    shadow : ShadowSpec
    mcs : McsTable
    earth : EarthModel
    cap_to_payload : bool
        Also limit the EIRP to what one beam of the payload can radiate.
    eirp_override : float, optional
        Fixed carrier EIRP in dBW replacing the PFD-derived value.
    clutter_loss : float
        Extra flat loss, dB.
    allowed_bandwidths : sequence of float, optional
        Permitted carrier bandwidths; ``None`` disables the check.
    """
    _check_elevation(elevation, atmosphere)
    if not bandwidth > 0:
        raise ValueError(f"bandwidth must be positive, got {bandwidth}")
    if allowed_bandwidths and bandwidth not in allowed_bandwidths:
        raise ValueError(f"downlink bandwidth {bandwidth:g} MHz not in {tuple(allowed_bandwidths)}")

    led = LinkLedger("downlink")
    f = payload.downlink_frequency
    led.add("frequency", "frequency", f, "GHz")
    led.add("wavelength", "wavelength", antenna.wavelength(f), "m")
    led.add("elevation", "elevation", elevation, "deg")
    led.add("altitude", "satellite altitude", payload.altitude, "km")
    d = led.add("slant_range", "Link distance", geometry.slant_range(payload.altitude, elevation, earth), "km")
    pfd = regulatory.pfd_limit(mask, elevation)
    led.add("pfd_limit", "Max PFD", pfd.value, f"dBW/m2/{pfd.reference_bandwidth:g}MHz")
    led.add("bandwidth", "bandwidth", bandwidth, "MHz")
    led.add(
        "pfd_over_bandwidth", "Max PFD over bandwidth",
        pfd.value + 10.0 * math.log10(bandwidth / pfd.reference_bandwidth), "dBW/m2",
    )
    eirp = led.add("eirp_pfd_limited", "PFD-limited EIRP per carrier", regulatory.max_eirp_from_pfd(pfd, d, bandwidth), "dBW")
    if cap_to_payload:
        eirp = min(eirp, led.add("eirp_payload_limit", "payload EIRP per beam", payload.eirp_per_beam, "dBW"))
    if eirp_override is not None:
        eirp = eirp_override
    led.add("eirp_per_carrier", "max EIRP per carrier", eirp, "dBW", +1)
    led.add("eirp_density", "EIRP density", eirp - 10.0 * math.log10(bandwidth * 1e6), "dBW/Hz")
    led.add("fsl", "FSL", channel.free_space_loss(f, d), "dB", -1)
    led.add("atmospheric_loss", "Atmospheric losses", channel.atmospheric_loss(atmosphere, elevation), "dB", -1)
    led.add("shadow_margin", f"Shadow fading margin (std={shadow.sigma:g}dB)", shadow.margin, "dB", -1)
    led.add("clutter_loss", "Clutter loss", clutter_loss, "dB", -1)
    led.add("n_elements", "number of terminal antenna elements", ue.panel.total_elements, "count")
    led.add("patch_dimension", "antenna patch single dimension", ue.panel.side_length(f), "cm")
    led.add("element_gain", "gain per element", ue.panel.element_gain, "dBi")
    led.add("ue_gain", "Rx terminal antenna gain", ue.panel.gain, "dBi", +1)
    led.add("noise_figure", "Noise Figure", ue.noise_figure, "dB")
    psd = led.add("noise_psd", "Noise PSD", channel.noise_psd(ue.noise_figure), "dBm/Hz")
    led.add("noise_power", "total noise power", channel.noise_power(psd, bandwidth), "dBm", -1)
    t_dbk = led.add("noise_temperature", "total receiver noise temp", channel.receiver_noise_temperature_dbk(ue.noise_figure), "dBK")
    led.add("g_over_t", "G/T", ue.panel.gain - t_dbk, "dB/K")
    led.add("dbw_to_dbm", "dBW to dBm", 30.0, "dB", +1)
    received = math.fsum(ln.sign * ln.value for ln in led.lines if ln.sign and ln.key != "noise_power")
    led.add("received_power", "received carrier power after user antenna", received, "dBm")
    led.add("implementation_loss", "implementation loss", ue.implementation_loss, "dB", -1)
    return _finish(led, bandwidth, mcs)


def uplink_budget(
    ue: UeTerminal,
    payload: SatellitePayload,
    elevation: float,
    bandwidth: float,
    atmosphere: AttenuationModel,
    shadow: ShadowSpec = ShadowSpec(),
    mcs: McsTable = DEFAULT_MCS,
    earth: EarthModel = EARTH,
    *,
    eirp_override: Optional[float] = None,
    clutter_loss: float = 0.0,
    min_bandwidth: float = MIN_UPLINK_BANDWIDTH,
) -> LinkLedger:
    """UE-to-satellite budget from the UE peak EIRP and the satellite G/T.

    ``eirp_override`` is in dBm, like the UE EIRP it replaces.
    """
    _check_elevation(elevation, atmosphere)
    if not bandwidth > 0 or bandwidth < min_bandwidth:
        raise ValueError(f"uplink bandwidth {bandwidth:g} MHz below the {min_bandwidth:g} MHz floor")

    led = LinkLedger("uplink")
    f = payload.uplink_frequency
    led.add("frequency", "frequency", f, "GHz")
    led.add("wavelength", "wavelength", antenna.wavelength(f), "m")
    led.add("elevation", "elevation", elevation, "deg")
    led.add("bandwidth", "bandwidth", bandwidth, "MHz")
    led.add("altitude", "satellite altitude", payload.altitude, "km")
    eirp_dbm = ue.peak_eirp if eirp_override is None else eirp_override
    led.add("eirp_dbm", "max EIRP per carrier", eirp_dbm, "dBm")
    led.add("eirp_per_carrier", "max EIRP per carrier", eirp_dbm - 30.0, "dBW", +1)
    d = led.add("slant_range", "Link distance", geometry.slant_range(payload.altitude, elevation, earth), "km")
    led.add("fsl", "FSL", channel.free_space_loss(f, d), "dB", -1)
    led.add("atmospheric_loss", "Atmospheric losses", channel.atmospheric_loss(atmosphere, elevation), "dB", -1)
    led.add("shadow_margin", f"Shadow fading margin (std={shadow.sigma:g}dB)", shadow.margin, "dB", -1)
    led.add("clutter_loss", "Clutter loss", clutter_loss, "dB", -1)
    led.add("g_over_t", "satellite G/T", payload.g_over_t, "dB/K", +1)
    led.add("boltzmann", "Boltzmann", BOLTZMANN_DBW_K_HZ, "dBW/K/Hz", -1)
    led.add("bandwidth_db", "bandwidth", 10.0 * math.log10(bandwidth * 1e6), "dBHz", -1)
    led.add("implementation_loss", "implementation loss", ue.implementation_loss, "dB", -1)
    return _finish(led, bandwidth, mcs)


@dataclass(frozen=True)
class CapacityRollup:
    per_satellite: float  # Gbps
    constellation: float  # Tbps


def capacity_rollup(rate_per_carrier: float, carriers_per_beam: int, beams: int, satellites: int) -> CapacityRollup:
    """Aggregate a per-carrier rate (Mbps) over beams and satellites."""
    for name, value in (("carriers_per_beam", carriers_per_beam), ("beams", beams), ("satellites", satellites)):
        if value < 1:
            raise ValueError(f"{name} must be >= 1, got {value}")
    per_sat_mbps = rate_per_carrier * carriers_per_beam * beams
    return CapacityRollup(per_sat_mbps / 1e3, per_sat_mbps * satellites / 1e6)


@dataclass(frozen=True)
class LinkInputs:
    """Every input of one budget evaluation, so a sweep can vary one field."""

    payload: SatellitePayload
    ue: UeTerminal
    elevation: float
    bandwidth: float
    atmosphere: AttenuationModel
    mask: Optional[RegulatoryMask] = None
    shadow: ShadowSpec = ShadowSpec()
    mcs: McsTable = DEFAULT_MCS
    earth: EarthModel = EARTH
    cap_to_payload: bool = False
    eirp_override: Optional[float] = None
    clutter_loss: float = 0.0
    allowed_bandwidths: Optional[tuple] = NR_FR2_BANDWIDTHS
    min_bandwidth: float = MIN_UPLINK_BANDWIDTH


def evaluate(direction: str, inputs: LinkInputs) -> LinkLedger:
    if direction in ("downlink", "dl"):
        if inputs.mask is None:
            raise ValueError("downlink budget needs a regulatory mask")
        return downlink_budget(
            inputs.payload, inputs.ue, inputs.mask, inputs.elevation, inputs.bandwidth,
            inputs.atmosphere, inputs.shadow, inputs.mcs, inputs.earth,
            cap_to_payload=inputs.cap_to_payload, eirp_override=inputs.eirp_override,
            clutter_loss=inputs.clutter_loss, allowed_bandwidths=inputs.allowed_bandwidths,
        )
    if direction in ("uplink", "ul"):
        return uplink_budget(
            inputs.ue, inputs.payload, inputs.elevation, inputs.bandwidth,
            inputs.atmosphere, inputs.shadow, inputs.mcs, inputs.earth,
            eirp_override=inputs.eirp_override, clutter_loss=inputs.clutter_loss,
            min_bandwidth=inputs.min_bandwidth,
        )
    raise ValueError(f"direction must be 'downlink' or 'uplink', got {direction!r}")


SWEEP_VARIABLES = ("elevation", "n_elements", "bandwidth", "eirp")


@dataclass(frozen=True)
class SweepRow:
    value: float
    cnr: float
    spectral_efficiency: float
    rate: float
    feasible: bool
    error: str = ""


def _vary(direction: str, base: LinkInputs, variable: str, value: float) -> LinkInputs:
    if variable == "elevation":
        return replace(base, elevation=value)
    if variable == "bandwidth":
        return replace(base, bandwidth=value)
    if variable == "n_elements":
        n = int(value)
        if n != value:
            raise ValueError(f"n_elements must be an integer, got {value}")
        panel = replace(base.ue.panel, m=n, n=1, mg=1, ng=1)
        return replace(base, ue=replace(base.ue, panel=panel))
    if variable == "eirp":
        if direction in ("uplink", "ul"):
            return replace(base, ue=replace(base.ue, peak_eirp=value))
        return replace(base, eirp_override=value)
    raise ValueError(f"unknown sweep variable {variable!r}; expected one of {SWEEP_VARIABLES}")


def sweep(direction: str, base: LinkInputs, variable: str, values: Sequence[float]) -> list[SweepRow]:
    """Evaluate one budget per value of ``variable``, all else held at ``base``.

    ``eirp`` is in dBW for the downlink (carrier EIRP) and dBm for the
    uplink (UE peak EIRP). A row whose inputs are invalid is reported as
    infeasible with the error text; the sweep itself never aborts.
    """
    if variable not in SWEEP_VARIABLES:
        raise ValueError(f"unknown sweep variable {variable!r}; expected one of {SWEEP_VARIABLES}")
    if not len(values):
        raise ValueError("sweep needs at least one value")
    rows = []
    for value in values:
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", UeRangeWarning)
                ledger = evaluate(direction, _vary(direction, base, variable, value))
        except ValueError as exc:
            rows.append(SweepRow(float(value), float("nan"), 0.0, 0.0, False, str(exc)))
            continue
        rows.append(SweepRow(float(value), ledger.cnr, ledger.spectral_efficiency, ledger.data_rate, ledger.feasible))
    return rows


def reference_payload(rx_g_over_t: Optional[float] = None) -> SatellitePayload:
    """The 340 km VLEO payload: 20 cm Tx array at 40 GHz, 40 cm Rx array at 28 GHz."""
    return SatellitePayload(
        tx_array=ApertureArray(0.20, 40.0, aperture_efficiency=0.916, element_spacing=0.69, element_count=977),
        tx_chain=TxRfChain(0.10, 997, output_losses=1.0, beam_rolloff=1.0, beams=8, bandwidth_per_beam=0.5),
        rx_array=ApertureArray(0.40, 28.0, aperture_efficiency=0.90, element_spacing=0.69, element_count=1915),
        rx_noise=NoiseChain(noise_figure=2.0, antenna_temperature=300.0, input_loss=0.5, reference_temperature=300.0),
        altitude=340.0,
        downlink_frequency=39.0,
        uplink_frequency=28.0,
        rx_g_over_t=rx_g_over_t,
    )


def vehicular_ue(peak_eirp: float = 29.0) -> UeTerminal:
    """High-end UE with 256 elements of 8 dBi, NF 7 dB and 7 dB implementation loss."""
    return UeTerminal(
        panel=UePanel(16, 16, 2, 1, 1, element_gain=8.0),
        noise_figure=7.0,
        implementation_loss=7.0,
        peak_eirp=peak_eirp,
    )
