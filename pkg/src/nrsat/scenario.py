"""Scenario files: TOML documents with nested sections and key = value leaves.

Every leaf has a default (see ``SCHEMA``), so a scenario only needs to
state what differs from the reference system. The ``[satellite]`` and
``[ue]`` sections must be present. Overrides given as ``section.key=value``
are applied after parsing and before validation.

Recognised layout::

    [defaults]            earth_radius_km, availability
    [satellite]           altitude_km, downlink_frequency_ghz, uplink_frequency_ghz,
                          rx_g_over_t_db_k (optional; computed when absent)
    [satellite.tx]        antenna + RF chain of the transmit array
    [satellite.rx]        antenna + noise chain of the receive array
    [ue]                  panel = [M, N, P, Mg, Ng], element_gain_dbi, ...
    [constellation]       total_satellites, planes, phasing, inclination_deg, ...
    [downlink] [uplink]   elevation_deg, bandwidth_mhz, ...
    [channel]             kind = "flat" | "table" | "cosecant", flat_db, zenith_db, table_file
    [shadow]              sigma_db
    [mcs]                 rows = [[required_cnr_db, spectral_efficiency], ...]
    [capacity]            carriers_per_beam
    [coverage]            grid_step_deg, time_samples
    [[masks]]             band_label, service, reference_bandwidth_mhz,
                          segments = [{start, stop, base, slope, anchor}, ...]
"""
from __future__ import annotations

import copy
import hashlib
import json
import re
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .antenna import ApertureArray, TxRfChain, UePanel
from .channel import AttenuationModel, NoiseChain
from .geometry import ConstellationConfig, EarthModel
from .linkbudget import LinkInputs, McsTable, SatellitePayload, ShadowSpec, UeTerminal
from .regulatory import MaskSegment, RegulatoryMask, builtin_masks, find_mask

FIXTURE_DIR = Path(__file__).parent / "scenarios"
REQUIRED_SECTIONS = ("satellite", "ue")


class ScenarioError(ValueError):
    """Parse or validation failure, located at ``path:line`` when known."""

    def __init__(self, message: str, path=None, line: Optional[int] = None):
        self.path, self.line, self.reason = path, line, message
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line else f"{path}: "
        super().__init__(where + message)


def _positive(v):
    return v > 0


def _non_negative(v):
    return v >= 0


def _fraction(v):
    return 0 < v <= 1


def _open_unit(v):
    return 0 < v < 1


# (default, type, check, constraint text). A default of None means optional.
SCHEMA: dict[str, dict[str, tuple]] = {
    "defaults": {
        "earth_radius_km": (6371.0, float, _positive, "must be positive"),
        "availability": (0.95, float, _open_unit, "must lie in (0, 1)"),
    },
    "satellite": {
        "altitude_km": (340.0, float, _positive, "must be positive"),
        "downlink_frequency_ghz": (39.0, float, _positive, "must be positive"),
        "uplink_frequency_ghz": (28.0, float, _positive, "must be positive"),
        "rx_g_over_t_db_k": (None, float, None, ""),
    },
    "satellite.tx": {
        "frequency_ghz": (40.0, float, _positive, "must be positive"),
        "diameter_m": (0.20, float, _positive, "must be positive"),
        "aperture_efficiency": (0.916, float, _fraction, "must lie in (0, 1]"),
        "lattice": ("triangular", str, lambda v: v in ("triangular", "rectangular"), "must be 'triangular' or 'rectangular'"),
        "element_spacing_wavelengths": (0.69, float, _positive, "must be positive"),
        "element_count": (977, int, _positive, "must be >= 1"),
        "per_element_power_w": (0.10, float, _positive, "must be positive"),
        "rf_element_count": (997, int, _positive, "must be >= 1"),
        "output_losses_db": (1.0, float, _non_negative, "must be non-negative"),
        "beam_rolloff_db": (1.0, float, None, ""),
        "beams": (8, int, _positive, "must be >= 1"),
        "bandwidth_per_beam_ghz": (0.5, float, _positive, "must be positive"),
    },
    "satellite.rx": {
        "frequency_ghz": (28.0, float, _positive, "must be positive"),
        "diameter_m": (0.40, float, _positive, "must be positive"),
        "aperture_efficiency": (0.90, float, _fraction, "must lie in (0, 1]"),
        "lattice": ("triangular", str, lambda v: v in ("triangular", "rectangular"), "must be 'triangular' or 'rectangular'"),
        "element_spacing_wavelengths": (0.69, float, _positive, "must be positive"),
        "element_count": (1915, int, _positive, "must be >= 1"),
        "antenna_temperature_k": (300.0, float, _positive, "must be positive"),
        "noise_figure_db": (2.0, float, _non_negative, "must be non-negative"),
        "input_loss_db": (0.5, float, _non_negative, "must be non-negative"),
        "reference_temperature_k": (300.0, float, _positive, "must be positive"),
    },
    "ue": {
        "panel": ([16, 16, 2, 1, 1], list, lambda v: len(v) == 5 and all(isinstance(x, int) and x >= 1 for x in v),
                  "must be five integers >= 1: [M, N, P, Mg, Ng]"),
        "element_gain_dbi": (8.0, float, None, ""),
        "noise_figure_db": (7.0, float, _non_negative, "must be non-negative"),
        "implementation_loss_db": (7.0, float, _non_negative, "must be non-negative"),
        "peak_eirp_dbm": (29.0, float, None, ""),
        "fcc_eirp_cap_dbm": (43.0, float, None, ""),
    },
    "constellation": {
        "total_satellites": (2592, int, _positive, "must be >= 1"),
        "planes": (36, int, _positive, "must be >= 1"),
        "phasing": (0, int, _non_negative, "must be >= 0"),
        "inclination_deg": (90.0, float, lambda v: 0 <= v <= 180, "must lie in [0, 180]"),
        "raan_spread_deg": (360.0, float, lambda v: v in (180, 360), "must be 180 or 360"),
        "min_elevation_deg": (40.0, float, lambda v: 0 <= v < 90, "must lie in [0, 90)"),
    },
    "downlink": {
        "elevation_deg": (40.0, float, lambda v: 0 <= v <= 90, "must lie in [0, 90]"),
        "bandwidth_mhz": (400.0, float, _positive, "must be positive"),
        "mask": ("37.5-40 GHz NGSO", str, None, ""),
        "cap_to_payload": (False, bool, None, ""),
        "clutter_loss_db": (0.0, float, _non_negative, "must be non-negative"),
        "allowed_bandwidths_mhz": ([50.0, 100.0, 200.0, 400.0], list,
                                   lambda v: all(isinstance(x, (int, float)) and x > 0 for x in v),
                                   "must be a list of positive numbers"),
    },
    "uplink": {
        "elevation_deg": (40.0, float, lambda v: 0 <= v <= 90, "must lie in [0, 90]"),
        "bandwidth_mhz": (1.0, float, _positive, "must be positive"),
        "clutter_loss_db": (0.0, float, _non_negative, "must be non-negative"),
        "min_bandwidth_mhz": (1.0, float, _positive, "must be positive"),
    },
    "channel": {
        "kind": ("flat", str, lambda v: v in ("flat", "table", "cosecant"), "must be 'flat', 'table' or 'cosecant'"),
        "flat_db": (5.0, float, _non_negative, "must be non-negative"),
        "zenith_db": (0.0, float, _non_negative, "must be non-negative"),
        "table_file": ("", str, None, ""),
    },
    "shadow": {
        "sigma_db": (0.0, float, _non_negative, "must be non-negative"),
    },
    "mcs": {
        "rows": ([[-1.2, 0.5], [0.5, 0.66]], list,
                 lambda v: len(v) > 0 and all(isinstance(r, list) and len(r) == 2 for r in v),
                 "must be a non-empty list of [required_cnr_db, spectral_efficiency] pairs"),
    },
    "capacity": {
        "carriers_per_beam": (1, int, _positive, "must be >= 1"),
    },
    "coverage": {
        "grid_step_deg": (2.0, float, _positive, "must be positive"),
        "time_samples": (20, int, _positive, "must be >= 1"),
    },
}

MASK_KEYS = {"band_label", "service", "reference_bandwidth_mhz", "segments"}
SEGMENT_KEYS = {"start", "stop", "base", "slope", "anchor"}


def valid_keys() -> list[str]:
    return [f"{section}.{key}" for section, keys in SCHEMA.items() for key in keys]


@dataclass(frozen=True)
class DownlinkSettings:
    elevation: float
    bandwidth: float
    mask: str
    cap_to_payload: bool
    clutter_loss: float
    allowed_bandwidths: tuple


@dataclass(frozen=True)
class UplinkSettings:
    elevation: float
    bandwidth: float
    clutter_loss: float
    min_bandwidth: float


@dataclass(frozen=True)
class Scenario:
    payload: SatellitePayload
    ue: UeTerminal
    constellation: ConstellationConfig
    masks: tuple
    atmosphere: AttenuationModel
    mcs: McsTable
    shadow: ShadowSpec
    earth: EarthModel
    downlink: DownlinkSettings
    uplink: UplinkSettings
    carriers_per_beam: int
    grid_step: float
    time_samples: int
    values: dict = field(repr=False)
    digest: str = ""
    path: Optional[Path] = None

    def mask(self, band_label: Optional[str] = None) -> RegulatoryMask:
        return find_mask(self.masks, band_label or self.downlink.mask)

    def link_inputs(self, direction: str) -> LinkInputs:
        if direction in ("dl", "downlink"):
            s = self.downlink
            return LinkInputs(
                payload=self.payload, ue=self.ue, elevation=s.elevation, bandwidth=s.bandwidth,
                atmosphere=self.atmosphere, mask=self.mask(), shadow=self.shadow, mcs=self.mcs,
                earth=self.earth, cap_to_payload=s.cap_to_payload, clutter_loss=s.clutter_loss,
                allowed_bandwidths=s.allowed_bandwidths or None,
            )
        if direction in ("ul", "uplink"):
            s = self.uplink
            return LinkInputs(
                payload=self.payload, ue=self.ue, elevation=s.elevation, bandwidth=s.bandwidth,
                atmosphere=self.atmosphere, shadow=self.shadow, mcs=self.mcs, earth=self.earth,
                clutter_loss=s.clutter_loss, min_bandwidth=s.min_bandwidth,
            )
        raise ValueError(f"direction must be 'dl' or 'ul', got {direction!r}")


class _Locator:
    """Maps dotted key paths to the line declaring them."""

    _header = re.compile(r"^\s*(\[\[?)\s*([A-Za-z0-9_.\-\"' ]+?)\s*\]\]?\s*(#.*)?$")
    _key = re.compile(r"^\s*([A-Za-z0-9_\-]+)\s*=")

    def __init__(self, text: str):
        self.lines: dict[str, int] = {}
        section = ""
        counts: dict[str, int] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            m = self._header.match(raw)
            if m:
                name = m.group(2).replace('"', "").replace("'", "").strip()
                if m.group(1) == "[[":
                    idx = counts.get(name, 0)
                    counts[name] = idx + 1
                    name = f"{name}[{idx}]"
                section = name
                self.lines.setdefault(section, lineno)
                continue
            k = self._key.match(raw)
            if k:
                self.lines.setdefault(f"{section}.{k.group(1)}" if section else k.group(1), lineno)

    def __call__(self, dotted: str) -> Optional[int]:
        while dotted:
            if dotted in self.lines:
                return self.lines[dotted]
            dotted = dotted.rpartition(".")[0]
        return None


def _parse_value(text: str) -> Any:
    try:
        return tomllib.loads(f"v = {text}")["v"]
    except tomllib.TOMLDecodeError:
        return text


def _section(doc: dict, dotted: str) -> Any:
    node = doc
    for part in dotted.split("."):
        if not isinstance(node, dict) or part not in node:
            return None
        node = node[part]
    return node


def _coerce(value, kind, where, err):
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise err(f"{where}: expected a number, got {value!r}")
        return float(value)
    if kind is int:
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        if isinstance(value, bool) or not isinstance(value, int):
            raise err(f"{where}: expected an integer, got {value!r}")
        return value
    if not isinstance(value, kind):
        raise err(f"{where}: expected {kind.__name__}, got {value!r}")
    return value


def _resolve(doc: dict, err, locate) -> dict:
    def fail(msg, key):
        raise err(msg, locate(key))

    known_sections = set(SCHEMA) | {"masks"}
    nested_parents = {s.split(".")[0] for s in SCHEMA if "." in s}
    for name, body in doc.items():
        if name not in known_sections:
            fail(f"unknown section [{name}]", name)
        if name == "masks":
            continue
        if not isinstance(body, dict):
            fail(f"[{name}] must be a section", name)
        for key, val in body.items():
            dotted = f"{name}.{key}"
            if name in nested_parents and dotted in SCHEMA:
                continue
            if key not in SCHEMA[name]:
                fail(f"unknown key {dotted!r}", dotted)
        for section in SCHEMA:
            if section.startswith(name + "."):
                sub = _section(doc, section)
                if sub is not None:
                    for key in sub:
                        if key not in SCHEMA[section]:
                            fail(f"unknown key '{section}.{key}'", f"{section}.{key}")

    resolved: dict[str, dict] = {}
    for section, keys in SCHEMA.items():
        given = _section(doc, section) or {}
        out = {}
        for key, (default, kind, check, text) in keys.items():
            dotted = f"{section}.{key}"
            if key not in given:
                out[key] = copy.deepcopy(default)
                continue
            value = _coerce(given[key], kind, dotted, lambda m: err(m, locate(dotted)))
            if check is not None and not check(value):
                fail(f"{dotted} = {value!r} {text}", dotted)
            out[key] = value
        resolved[section] = out
    return resolved


def _build_masks(doc: dict, err, locate) -> list[RegulatoryMask]:
    masks = builtin_masks()
    extra = doc.get("masks", [])
    if not isinstance(extra, list):
        raise err("masks must be an array of tables ([[masks]])", locate("masks"))
    for i, body in enumerate(extra):
        where = f"masks[{i}]"
        unknown = set(body) - MASK_KEYS
        if unknown:
            raise err(f"{where}: unknown keys {sorted(unknown)}", locate(where))
        if "band_label" not in body or "segments" not in body:
            raise err(f"{where}: band_label and segments are required", locate(where))
        try:
            segments = []
            for seg in body["segments"]:
                if set(seg) - SEGMENT_KEYS:
                    raise ValueError(f"unknown segment keys {sorted(set(seg) - SEGMENT_KEYS)}")
                segments.append(MaskSegment(float(seg["start"]), float(seg["stop"]), float(seg["base"]),
                                            float(seg.get("slope", 0.0)), float(seg.get("anchor", 0.0))))
            mask = RegulatoryMask(str(body["band_label"]), tuple(segments),
                                  float(body.get("reference_bandwidth_mhz", 1.0)), str(body.get("service", "")))
        except (ValueError, KeyError, TypeError) as exc:
            raise err(f"{where}: {exc}", locate(f"{where}.segments") or locate(where)) from None
        if any(m.band_label == mask.band_label for m in masks):
            raise err(f"{where}: duplicate band_label {mask.band_label!r}", locate(f"{where}.band_label"))
        masks.append(mask)
    return masks


def _mask_values(mask: RegulatoryMask) -> dict:
    return {
        "band_label": mask.band_label,
        "service": mask.service,
        "reference_bandwidth_mhz": mask.reference_bandwidth,
        "segments": [[s.start, s.stop, s.base, s.slope, s.anchor] for s in mask.segments],
    }


def digest_of(values: dict) -> str:
    blob = json.dumps(values, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def resolve_path(path) -> Path:
    """``path`` itself, or the shipped fixture of that name when no such file exists."""
    p = Path(path)
    if not p.exists() and (FIXTURE_DIR / p.name).exists():
        return FIXTURE_DIR / p.name
    return p


def apply_overrides(doc: dict, overrides, err) -> dict:
    doc = copy.deepcopy(doc)
    keys = set(valid_keys())
    for item in overrides or ():
        if "=" not in item:
            raise err(f"override {item!r} is not of the form section.key=value")
        dotted, _, text = item.partition("=")
        dotted = dotted.strip()
        if dotted not in keys:
            raise UnknownOverride(dotted)
        section, _, key = dotted.rpartition(".")
        node = doc
        for part in section.split("."):
            node = node.setdefault(part, {})
        node[key] = _parse_value(text.strip())
    return doc


class UnknownOverride(KeyError):
    def __init__(self, key):
        super().__init__(key)
        self.key = key


def load_scenario(path, overrides=()) -> Scenario:
    """Parse, override and validate a scenario file.

    Raises
    ------
    ScenarioError
        On syntax errors (with line and column), unknown sections or keys,
        type mismatches and violated invariants.
    UnknownOverride
        When an override names a key outside ``valid_keys()``.
    """
    path = resolve_path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario: {exc.strerror}", path) from None
    return loads_scenario(text, overrides, path=path)


def loads_scenario(text: str, overrides=(), path=None) -> Scenario:
    locate = _Locator(text)

    def err(message, line=None):
        return ScenarioError(message, path if path is not None else "<scenario>", line)

    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise err(f"parse error: {exc}") from None
    missing = [s for s in REQUIRED_SECTIONS if s not in doc]
    if missing:
        raise err(f"missing required section [{missing[0]}]")
    doc = apply_overrides(doc, overrides, err)
    overridden = {item.partition("=")[0].strip() for item in overrides or ()}

    def locate_any(dotted):
        # values coming from --set have no line in the file
        if dotted in overridden:
            return None
        return locate(dotted)

    values = _resolve(doc, err, locate_any)
    masks = _build_masks(doc, err, locate_any)

    def build(section_key, factory):
        try:
            return factory()
        except ValueError as exc:
            raise err(f"{section_key}: {exc}", locate_any(section_key)) from None

    d, sat, tx, rx, ue = (values[k] for k in ("defaults", "satellite", "satellite.tx", "satellite.rx", "ue"))
    earth = build("defaults.earth_radius_km", lambda: EarthModel(d["earth_radius_km"]))
    payload = build("satellite", lambda: SatellitePayload(
        tx_array=ApertureArray(tx["diameter_m"], tx["frequency_ghz"], tx["aperture_efficiency"], tx["lattice"],
                               tx["element_spacing_wavelengths"], tx["element_count"]),
        tx_chain=TxRfChain(tx["per_element_power_w"], tx["rf_element_count"], tx["output_losses_db"],
                           abs(tx["beam_rolloff_db"]), tx["beams"], tx["bandwidth_per_beam_ghz"]),
        rx_array=ApertureArray(rx["diameter_m"], rx["frequency_ghz"], rx["aperture_efficiency"], rx["lattice"],
                               rx["element_spacing_wavelengths"], rx["element_count"]),
        rx_noise=NoiseChain(rx["noise_figure_db"], rx["antenna_temperature_k"], rx["input_loss_db"],
                            rx["reference_temperature_k"]),
        altitude=sat["altitude_km"],
        downlink_frequency=sat["downlink_frequency_ghz"],
        uplink_frequency=sat["uplink_frequency_ghz"],
        rx_g_over_t=sat["rx_g_over_t_db_k"],
    ))
    if ue["peak_eirp_dbm"] > ue["fcc_eirp_cap_dbm"]:
        raise err(
            f"ue.peak_eirp_dbm = {ue['peak_eirp_dbm']:g} dBm exceeds the FCC cap of {ue['fcc_eirp_cap_dbm']:g} dBm",
            locate_any("ue.peak_eirp_dbm"),
        )
    panel = build("ue.element_gain_dbi", lambda: UePanel(*ue["panel"], element_gain=ue["element_gain_dbi"]))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        terminal = build("ue", lambda: UeTerminal(panel, ue["noise_figure_db"], ue["implementation_loss_db"],
                                                  ue["peak_eirp_dbm"], ue["fcc_eirp_cap_dbm"]))
    for w in caught:
        warnings.warn_explicit(w.message, w.category, str(path or "<scenario>"), locate_any("ue") or 0)
    c = values["constellation"]
    constellation = build("constellation", lambda: ConstellationConfig(
        c["total_satellites"], c["planes"], c["phasing"], c["inclination_deg"], sat["altitude_km"],
        c["raan_spread_deg"], c["min_elevation_deg"],
    ))
    ch = values["channel"]
    if ch["kind"] == "table":
        if not ch["table_file"]:
            raise err("channel.kind = 'table' requires channel.table_file", locate_any("channel.kind"))
        base = Path(path).parent if path is not None else Path.cwd()
        table_path = (base / ch["table_file"]).resolve()
        if not table_path.exists():
            raise err(f"attenuation table {ch['table_file']!r} not found", locate_any("channel.table_file"))
        atmosphere = build("channel.table_file", lambda: AttenuationModel.from_csv(table_path))
        values["channel"]["table"] = [list(r) for r in atmosphere.table]
    elif ch["kind"] == "cosecant":
        atmosphere = AttenuationModel.cosecant(ch["zenith_db"])
    else:
        atmosphere = AttenuationModel.flat(ch["flat_db"])
    mcs = build("mcs.rows", lambda: McsTable(tuple(tuple(r) for r in values["mcs"]["rows"])))
    shadow = ShadowSpec(values["shadow"]["sigma_db"], d["availability"])
    dl, ul = values["downlink"], values["uplink"]
    try:
        find_mask(masks, dl["mask"])
    except KeyError as exc:
        raise err(f"downlink.mask: {exc.args[0]}", locate_any("downlink.mask")) from None
    values["masks"] = [_mask_values(m) for m in masks]
    return Scenario(
        payload=payload,
        ue=terminal,
        constellation=constellation,
        masks=tuple(masks),
        atmosphere=atmosphere,
        mcs=mcs,
        shadow=shadow,
        earth=earth,
        downlink=DownlinkSettings(dl["elevation_deg"], dl["bandwidth_mhz"], dl["mask"], dl["cap_to_payload"],
                                  dl["clutter_loss_db"], tuple(float(b) for b in dl["allowed_bandwidths_mhz"])),
        uplink=UplinkSettings(ul["elevation_deg"], ul["bandwidth_mhz"], ul["clutter_loss_db"], ul["min_bandwidth_mhz"]),
        carriers_per_beam=values["capacity"]["carriers_per_beam"],
        grid_step=values["coverage"]["grid_step_deg"],
        time_samples=values["coverage"]["time_samples"],
        values=values,
        digest=digest_of(values),
        path=Path(path) if path is not None else None,
    )
