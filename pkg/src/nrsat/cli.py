"""Command-line entry point.

Exit codes: 0 success (feasible), 1 usage or validation error,
2 computed result infeasible (link does not close, coverage shortfall).
"""
from __future__ import annotations

import argparse
import math
import sys
import warnings
from pathlib import Path

from . import antenna, channel, geometry, linkbudget, regulatory
from .linkbudget import SWEEP_VARIABLES
from .report import FORMATS, Report
from .scenario import Scenario, ScenarioError, UnknownOverride, load_scenario, valid_keys

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE = 0, 1, 2
DIRECTIONS = {"dl": "downlink", "ul": "uplink"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_values(spec: str) -> list[float]:
    """``start:stop:step`` (stop inclusive) or a comma-separated list."""
    spec = spec.strip()
    try:
        if ":" in spec:
            parts = [float(p) for p in spec.split(":")]
            if len(parts) != 3:
                raise UsageError(f"range {spec!r} must be start:stop:step")
            start, stop, step = parts
            if step == 0 or (stop - start) * step < 0:
                raise UsageError(f"range {spec!r} is empty")
            n = int(math.floor((stop - start) / step + 1e-9)) + 1
            return [start + i * step for i in range(n)]
        values = [float(p) for p in spec.split(",") if p.strip()]
    except ValueError:
        raise UsageError(f"cannot parse values {spec!r}") from None
    if not values:
        raise UsageError("empty value list")
    return values


def _meta(scn: Scenario, **extra) -> dict:
    name = scn.path.name if scn.path is not None else "<scenario>"
    return {"scenario": name, "scenario_digest": scn.digest, **extra}


def _typed(value: float, unit: str):
    if unit == "count":
        return int(value)
    if unit == "flag":
        return bool(value)
    return value


def cmd_budget(scn: Scenario, direction: str) -> Report:
    ledger = linkbudget.evaluate(direction, scn.link_inputs(direction))
    rows = [[ln.key, ln.label, _typed(ln.value, ln.unit), ln.unit] for ln in ledger.rows()]
    cap = linkbudget.capacity_rollup(
        ledger.data_rate, scn.carriers_per_beam, scn.payload.tx_chain.beams, scn.constellation.total_satellites
    )
    rows.append(["capacity_per_satellite", "capacity per satellite", cap.per_satellite, "Gbps"])
    rows.append(["capacity_constellation", "constellation capacity", cap.constellation, "Tbps"])
    return Report(
        kind="ledger",
        columns=["key", "line", "value", "unit"],
        rows=rows,
        title=f"{DIRECTIONS[direction]} budget",
        metadata=_meta(scn, direction=DIRECTIONS[direction]),
        exit_code=EXIT_OK if ledger.feasible else EXIT_INFEASIBLE,
        notes=[] if ledger.feasible else ["# infeasible: no MCS row satisfied"],
    )


def cmd_sweep(scn: Scenario, direction: str, variable: str, values: list[float]) -> Report:
    if variable not in SWEEP_VARIABLES:
        raise UsageError(f"unknown sweep variable {variable!r}; valid: {', '.join(SWEEP_VARIABLES)}")
    rows = linkbudget.sweep(direction, scn.link_inputs(direction), variable, values)
    notes = [f"# {r.value:g}: {r.error}" for r in rows if r.error]
    return Report(
        kind="sweep",
        columns=["variable", "cnr_db", "spectral_efficiency", "rate_mbps", "feasible"],
        rows=[[r.value, r.cnr, r.spectral_efficiency, r.rate, r.feasible] for r in rows],
        title=f"{DIRECTIONS[direction]} sweep over {variable}",
        metadata=_meta(scn, direction=DIRECTIONS[direction], variable=variable),
        notes=notes,
    )


def cmd_coverage(scn: Scenario, grid_step: float, time_samples: int, phasing_scan: bool) -> Report:
    config = scn.constellation
    times = geometry.default_time_samples(config, time_samples, scn.earth)
    if phasing_scan:
        scan = geometry.phasing_scan(config, grid_step, times, scn.earth)
        reports, best_f = scan.by_phasing, scan.best_phasing
    else:
        reports = {config.phasing: geometry.coverage_check(config, grid_step, times, scn.earth)}
        best_f = config.phasing
    rows = []
    for f in sorted(reports):
        r = reports[f]
        rows.append([f, r.worst_best_elevation, r.worst_point.latitude, r.worst_point.longitude,
                     r.worst_time, r.covered, f == best_f])
    best = reports[best_f]
    verdict = "continuous coverage" if best.covered else (
        f"shortfall: best worst-case elevation {best.worst_best_elevation:.2f} deg "
        f"< {config.min_elevation:g} deg"
    )
    c = config
    return Report(
        kind="coverage",
        columns=["phasing", "worst_best_elevation_deg", "worst_lat_deg", "worst_lon_deg",
                 "worst_time_s", "covered", "best"],
        rows=rows,
        title=(f"coverage {c.inclination:g}: {c.total_satellites}/{c.planes}/f, {c.altitude:g} km, "
               f"raan spread {c.raan_spread:g}, grid {grid_step:g} deg, {time_samples} epochs"),
        metadata=_meta(scn, grid_step_deg=grid_step, time_samples=time_samples, best_phasing=best_f),
        notes=[f"# best phasing f={best_f}: {verdict}"],
        exit_code=EXIT_OK if best.covered else EXIT_INFEASIBLE,
    )


def cmd_mask(scn: Scenario, band_label: str, angles: list[float]) -> Report:
    try:
        mask = scn.mask(band_label)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    rows = []
    for a in angles:
        try:
            rows.append([a, regulatory.pfd_limit(mask, a).value])
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    return Report(
        kind="mask",
        columns=["angle_deg", "pfd_dbw_m2_mhz"],
        rows=rows,
        title=f"PFD mask {mask.band_label} ({mask.service}), per {mask.reference_bandwidth:g} MHz",
        metadata=_meta(scn, band=mask.band_label),
    )


def _array_rows(scn: Scenario, array: antenna.ApertureArray) -> list[list]:
    h = scn.payload.altitude
    min_el = scn.constellation.min_elevation
    view = geometry.earth_view_half_angle(h, scn.earth)
    scan = geometry.nadir_scan_angle(h, min_el, scn.earth)
    bw = antenna.beamwidth_3db(array)
    return [
        ["frequency", "Frequency", array.frequency, "GHz"],
        ["diameter", "DRA diameter", array.diameter, "m"],
        ["altitude", "NGSO altitude", h, "km"],
        ["min_elevation", "min elevation", min_el, "deg"],
        ["earth_view_angle", "Earth view angle", view, "deg"],
        ["scan_angle", "Scan angle", scan, "deg"],
        ["gain", "Antenna gain", antenna.aperture_gain(array), "dBi"],
        ["beamwidth", "3 dB beamwidth", bw, "deg"],
        ["beamwidth_scanned_edge", "3 dB beamwidth scanned to Earth edge", antenna.scanned_beamwidth(bw, view), "deg"],
        ["beamwidth_scanned_max", "3 dB beamwidth at max scan angle", antenna.scanned_beamwidth(bw, scan), "deg"],
        ["element_spacing", "DRA element spacing", array.element_spacing, "wavelengths"],
        ["element_spacing_cm", "DRA element spacing", antenna.spacing_to_length(array.element_spacing, array.frequency), "cm"],
        ["grating_free_spacing", "grating-lobe-free spacing at max scan",
         antenna.max_grating_free_spacing(scan, array.lattice), "wavelengths"],
        ["element_count", "N elements", array.elements, "count"],
        ["lattice_element_count", "N elements by lattice enumeration",
         antenna.hex_array_element_count(array.diameter, array.element_spacing * array.wavelength), "count"],
    ]


def cmd_antenna(scn: Scenario, which: str) -> Report:
    p = scn.payload
    if which == "tx":
        chain = p.tx_chain
        rows = _array_rows(scn, p.tx_array)
        d = geometry.slant_range(p.altitude, scn.constellation.min_elevation, scn.earth)
        density = antenna.eirp_density(chain, p.tx_eirp)
        rows += [
            ["beam_rolloff", "Max antenna rolloff", -abs(chain.beam_rolloff), "dB"],
            ["output_losses", "Output losses", chain.output_losses, "dB"],
            ["sspa_power", "SSPA RF power", chain.per_element_power, "W"],
            ["total_rf_power", "Total RF power", chain.total_power, "W"],
            ["eirp", "Total EIRP", p.tx_eirp, "dBW"],
            ["beams", "N beams", chain.beams, "count"],
            ["bandwidth_per_beam", "Band per beam", chain.bandwidth_per_beam, "GHz"],
            ["total_bandwidth", "Total bandwidth per satellite", chain.beams * chain.bandwidth_per_beam, "GHz"],
            ["max_slant_range", "Max slant range", d, "km"],
            ["eirp_density", "EIRP density", density, "dBW/Hz"],
            ["pfd", "PFD", regulatory.pfd_from_eirp(density, d).value, "dBW/m2/MHz"],
        ]
    elif which == "rx":
        rows = _array_rows(scn, p.rx_array)
        n = p.rx_noise
        rows += [
            ["antenna_temperature", "Antenna noise temperature", n.antenna_temperature, "K"],
            ["noise_figure", "Noise figure", n.noise_figure, "dB"],
            ["input_loss", "Input loss", n.input_loss, "dB"],
            ["system_noise_figure", "System noise figure", n.noise_figure + n.input_loss, "dB"],
            ["system_noise_temperature", "System noise temperature", p.rx_system_temperature, "K"],
            ["g_over_t", "G/T", p.computed_g_over_t, "dB/K"],
        ]
    elif which == "ue":
        ue = scn.ue
        panel = ue.panel
        t_dbk = channel.receiver_noise_temperature_dbk(ue.noise_figure)
        rows = [
            ["panel", "panel (M, N, P, Mg, Ng)", f"({panel.m}, {panel.n}, {panel.p}, {panel.mg}, {panel.ng})", ""],
            ["n_elements", "elements per polarization", panel.total_elements, "count"],
            ["element_gain", "gain per element", panel.element_gain, "dBi"],
            ["gain", "terminal antenna gain", panel.gain, "dBi"],
            ["patch_dimension", "antenna patch single dimension", panel.side_length(p.downlink_frequency), "cm"],
            ["noise_figure", "Noise figure", ue.noise_figure, "dB"],
            ["noise_psd", "Noise PSD", channel.noise_psd(ue.noise_figure), "dBm/Hz"],
            ["noise_temperature", "receiver noise temperature", t_dbk, "dBK"],
            ["g_over_t", "G/T", panel.gain - t_dbk, "dB/K"],
            ["peak_eirp", "peak EIRP", ue.peak_eirp, "dBm"],
            ["fcc_eirp_cap", "FCC peak EIRP cap", ue.fcc_eirp_cap, "dBm"],
        ]
    else:
        raise UsageError(f"antenna must be one of tx, rx, ue; got {which!r}")
    return Report(
        kind="antenna",
        columns=["key", "quantity", "value", "unit"],
        rows=rows,
        title=f"{which} antenna",
        metadata=_meta(scn, antenna=which),
    )


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default="text", help="output format")
    common.add_argument("--out", type=Path, help="write the report to this file instead of stdout")
    common.add_argument("--set", dest="overrides", action="append", default=[], metavar="SECTION.KEY=VALUE",
                        help="override a scenario value (repeatable)")

    parser = _Parser(prog="nrsat", description="NGSO-to-5G-UE mmWave feasibility calculator")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("budget", parents=[common], help="downlink or uplink link budget")
    p.add_argument("direction", choices=sorted(DIRECTIONS))
    p.add_argument("scenario")

    p = sub.add_parser("sweep", parents=[common], help="CNR sensitivity sweep")
    p.add_argument("direction", choices=sorted(DIRECTIONS))
    p.add_argument("scenario")
    p.add_argument("variable", help=f"one of {', '.join(SWEEP_VARIABLES)}")
    p.add_argument("values", help="start:stop:step (inclusive) or a comma-separated list")

    p = sub.add_parser("coverage", parents=[common], help="constellation coverage check")
    p.add_argument("scenario")
    p.add_argument("--grid-step", type=float, help="grid spacing in degrees (default: scenario)")
    p.add_argument("--time-samples", type=int, help="epochs over one period (default: scenario)")
    p.add_argument("--phasing-scan", action="store_true", help="try every Walker phasing factor")

    p = sub.add_parser("mask", parents=[common], help="evaluate a PFD mask")
    p.add_argument("scenario")
    p.add_argument("band", help="band label, e.g. '37.5-40 GHz NGSO'")
    p.add_argument("angles", nargs="?", default="0:90:5", help="arrival angles in degrees")

    p = sub.add_parser("antenna", parents=[common], help="antenna and RF sizing")
    p.add_argument("scenario")
    p.add_argument("which", choices=["tx", "rx", "ue"])
    return parser


def run(argv=None) -> tuple[int, str, Path | None]:
    """Execute a command; returns ``(exit_code, rendered_report, out_path)``.

    The report is written to ``out_path`` when ``--out`` is given.
    """
    args = build_parser().parse_args(argv)
    try:
        scn = load_scenario(args.scenario, args.overrides)
    except UnknownOverride as exc:
        raise UsageError(f"unknown override key {exc.key!r}; valid keys:\n  " + "\n  ".join(valid_keys())) from None
    try:
        if args.command == "budget":
            report = cmd_budget(scn, args.direction)
        elif args.command == "sweep":
            report = cmd_sweep(scn, args.direction, args.variable, parse_values(args.values))
        elif args.command == "coverage":
            grid = args.grid_step if args.grid_step is not None else scn.grid_step
            samples = args.time_samples if args.time_samples is not None else scn.time_samples
            if grid <= 0 or samples < 1:
                raise UsageError("grid step must be positive and time samples >= 1")
            report = cmd_coverage(scn, grid, samples, args.phasing_scan)
        elif args.command == "mask":
            report = cmd_mask(scn, args.band, parse_values(args.angles))
        else:
            report = cmd_antenna(scn, args.which)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = report.render(args.format)
    if args.out is not None:
        args.out.write_text(text)
    return report.exit_code, text, args.out


def _warning_line(message, category, filename, lineno, line=None):
    return f"nrsat: warning: {filename}:{lineno}: {message}\n"


def main(argv=None) -> int:
    warnings.formatwarning = _warning_line
    try:
        code, text, out = run(argv)
    except (UsageError, ScenarioError) as exc:
        print(f"nrsat: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        # argparse reports its own errors (and --help) this way
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if out is None:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
