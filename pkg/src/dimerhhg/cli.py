"""Batch command-line front-end.

One run = one output directory containing ``manifest.json`` (the fully
resolved configuration plus derived quantities) and plot-ready CSV files.
Re-running with ``--config <dir>/manifest.json`` reproduces every output
byte for byte; the manifest deliberately carries no timestamps, hostnames
or other run-specific state.
"""

import argparse
import copy
import csv
import json
import math
import os
import sys
from dataclasses import replace

import numpy as np

from . import adiabatic, laser, propagator, scans, spectrum
from .model import ModelSpec, build_geometry, build_h0, model_summary, solve_static

OUTPUT_ROOT_ENV = "DIMERHHG_OUT"
FLOAT_FMT = "%.17g"
MODES = ("spectrum", "polar-scan", "coupling-sweep", "adiabatic-compare")

DEFAULT_CONFIG = {
    "mode": "spectrum",
    "engine": "exact",
    "model": {
        "t0": -1.0,
        "t1": -0.02,
        "d": 9.2,
        "l": 5.5,
        "alpha_mol": 90.0,
        "alpha_inter": 20.0,
    },
    "pulse": {
        "E0": 0.15,
        "photon_fraction": 6.3,
        "omega0": None,  # derived from the gap unless set explicitly
        "n_cyc": 15,
        "phi": 0.0,
        "dt": 0.05,
    },
    "grids": {
        "phi_step": 1.0,
        "t1_min": 1e-4,
        "t1_max": 0.12,
        "points_per_decade": 4,
        "harmonics": [1, 3, 5, 7, 9, 11, 13, 15],
        "freeze_omega0": False,
        "refine_iters": 2,
    },
}

FIGURE_PRESETS = {
    # polarization dependence of the normalized harmonic yield, default model
    "fig2": {"mode": "polar-scan"},
    # spectrum for polarization perpendicular to the intermolecular axis
    "fig3": {"mode": "spectrum", "pulse": {"phi": 110.0}},
    # polar scan at ten times weaker intermolecular coupling
    "fig4": {"mode": "polar-scan", "model": {"t1": -0.002}},
    # harmonic intensities vs coupling strength at the two perpendicular angles
    "fig5": {"mode": "coupling-sweep", "grids": {"phi_step": 4.0}},
    # exact vs adiabatic spectra at the lower laser frequency
    "fig6": {
        "mode": "adiabatic-compare",
        "pulse": {"phi": 55.0, "photon_fraction": 12.6},
    },
    # polar scan for adiabatically following electrons
    "fig7": {"mode": "polar-scan", "engine": "adia-intra"},
    # flip map of the adiabatic approximation vs coupling strength
    "fig8": {
        "mode": "coupling-sweep",
        "engine": "adia-intra",
        "grids": {"phi_step": 4.0},
    },
}


class ConfigError(ValueError):
    """Carries the aggregated list of configuration problems."""

    def __init__(self, errors):
        super().__init__("; ".join(errors))
        self.errors = list(errors)


# ---------------------------------------------------------------- config ---


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def _parse_set_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(config: dict, assignments) -> dict:
    """Apply ``--set section.key=value`` assignments (values parsed as JSON
    with a plain-string fallback)."""
    config = copy.deepcopy(config)
    errors = []
    for item in assignments or []:
        if "=" not in item:
            errors.append(f"--set {item!r}: expected key=value")
            continue
        path, _, raw = item.partition("=")
        node = config
        parts = path.split(".")
        for part in parts[:-1]:
            if part in node and not isinstance(node[part], dict):
                errors.append(f"--set {path!r}: {part!r} is not a section")
                node = None
                break
            node = node.setdefault(part, {})
        if node is not None:
            node[parts[-1]] = _parse_set_value(raw)
    if errors:
        raise ConfigError(errors)
    return config


def load_config(path: str) -> dict:
    """Read a config file; a manifest (with its echoed ``config`` block) is
    accepted in place of a raw configuration."""
    with open(path, encoding="utf-8") as handle:
        data = json.load(handle)
    if not isinstance(data, dict):
        raise ConfigError([f"{path}: top level must be an object"])
    if "config" in data and "derived" in data:
        data = data["config"]
    return data


def _check_number(errors, section, key, value, positive=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        errors.append(f"{section}.{key} must be a number")
        return False
    if positive and value <= 0:
        errors.append(f"{section}.{key} must be positive")
        return False
    return True


def validate(config: dict):
    """Resolve a raw config against the defaults.

    Returns (resolved config, derived quantities); raises ConfigError with
    every problem found, not just the first.
    """
    errors = []
    config = copy.deepcopy(config)
    for key in list(config):
        if key not in DEFAULT_CONFIG:
            errors.append(f"unknown key {key!r}")
            del config[key]
    for section in ("model", "pulse", "grids"):
        sub = config.get(section, {})
        if not isinstance(sub, dict):
            errors.append(f"{section} must be an object")
            config[section] = {}
            continue
        for key in list(sub):
            if key not in DEFAULT_CONFIG[section]:
                errors.append(f"unknown key {section}.{key}")
                del sub[key]

    resolved = _merge(DEFAULT_CONFIG, config)

    if resolved["mode"] not in MODES:
        errors.append(f"mode must be one of {', '.join(MODES)}")
    if resolved["engine"] not in scans.ENGINES:
        errors.append(f"engine must be one of {', '.join(scans.ENGINES)}")

    model_cfg = resolved["model"]
    for key in ("t0", "t1", "alpha_mol", "alpha_inter"):
        _check_number(errors, "model", key, model_cfg[key])
    for key in ("d", "l"):
        _check_number(errors, "model", key, model_cfg[key], positive=True)

    pulse_cfg = resolved["pulse"]
    _check_number(errors, "pulse", "E0", pulse_cfg["E0"])
    _check_number(errors, "pulse", "phi", pulse_cfg["phi"])
    _check_number(errors, "pulse", "dt", pulse_cfg["dt"], positive=True)
    _check_number(errors, "pulse", "photon_fraction", pulse_cfg["photon_fraction"],
                  positive=True)
    if not isinstance(pulse_cfg["n_cyc"], int) or pulse_cfg["n_cyc"] < 1:
        errors.append("pulse.n_cyc must be an integer >= 1")
    if pulse_cfg["omega0"] is not None:
        _check_number(errors, "pulse", "omega0", pulse_cfg["omega0"], positive=True)

    grids = resolved["grids"]
    _check_number(errors, "grids", "phi_step", grids["phi_step"], positive=True)
    if isinstance(grids["phi_step"], (int, float)) and not 0 < grids["phi_step"] <= 90:
        errors.append("grids.phi_step must lie in (0, 90]")
    _check_number(errors, "grids", "t1_min", grids["t1_min"])
    _check_number(errors, "grids", "t1_max", grids["t1_max"])
    if resolved["mode"] == "coupling-sweep":
        if isinstance(grids["t1_min"], (int, float)) and grids["t1_min"] <= 0:
            errors.append("grids.t1_min must be positive (log grid excludes zero)")
        if (isinstance(grids["t1_max"], (int, float))
                and isinstance(grids["t1_min"], (int, float))
                and grids["t1_max"] <= grids["t1_min"]):
            errors.append("grids.t1_max must exceed grids.t1_min")
    if not isinstance(grids["points_per_decade"], int) or grids["points_per_decade"] < 1:
        errors.append("grids.points_per_decade must be an integer >= 1")
    if not isinstance(grids["refine_iters"], int) or grids["refine_iters"] < 0:
        errors.append("grids.refine_iters must be a non-negative integer")
    if not isinstance(grids["freeze_omega0"], bool):
        errors.append("grids.freeze_omega0 must be true or false")
    harmonics = grids["harmonics"]
    if (not isinstance(harmonics, list) or not harmonics
            or not all(isinstance(n, int) and n >= 1 for n in harmonics)):
        errors.append("grids.harmonics must be a non-empty list of integers >= 1")

    if errors:
        raise ConfigError(errors)

    model = ModelSpec(**model_cfg)
    eigensystem = solve_static(build_h0(model))
    if pulse_cfg["omega0"] is None:
        omega0 = eigensystem.gap / pulse_cfg["photon_fraction"]
    else:
        omega0 = float(pulse_cfg["omega0"])
    resolved["pulse"]["omega0"] = omega0
    pulse = laser.PulseSpec(E0=pulse_cfg["E0"], omega0=omega0,
                            n_cyc=pulse_cfg["n_cyc"], phi=pulse_cfg["phi"],
                            dt=pulse_cfg["dt"])
    derived = {
        "gap": eigensystem.gap,
        "omega0": omega0,
        "energies": eigensystem.energies.tolist(),
        "sites": build_geometry(model).sites.tolist(),
        "duration": pulse.duration,
        "n_steps": pulse.n_steps,
    }
    return resolved, derived


def _specs(resolved: dict):
    model = ModelSpec(**resolved["model"])
    p = resolved["pulse"]
    pulse = laser.PulseSpec(E0=p["E0"], omega0=p["omega0"], n_cyc=p["n_cyc"],
                            phi=p["phi"], dt=p["dt"])
    return model, pulse


# --------------------------------------------------------------- outputs ---


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return FLOAT_FMT % value


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _spectrum_outputs(out_dir, tag, spec, harmonics, log):
    """Spectrum curve (up to a few orders past the last requested harmonic)
    plus the per-order band intensities."""
    name_curve = f"spectrum{tag}.csv"
    name_table = f"harmonics{tag}.csv"
    cutoff = max(harmonics) + 5
    keep = spec.freq <= cutoff
    _write_csv(os.path.join(out_dir, name_curve),
               ["harmonic_order", "intensity"],
               zip(spec.freq[keep], spec.intensity[keep]))
    table = spectrum.harmonic_table(spec, harmonics)
    _write_csv(os.path.join(out_dir, name_table),
               ["n", "intensity"], sorted(table.items()))
    log(f"wrote {name_curve}, {name_table}")
    return [name_curve, name_table]


def _series_output(out_dir, tag, times, position, acceleration, log):
    name = f"series{tag}.csv"
    rows = zip(times, position[:, 0], position[:, 1],
               acceleration[:, 0], acceleration[:, 1])
    _write_csv(os.path.join(out_dir, name),
               ["t", "x", "y", "ax", "ay"], rows)
    log(f"wrote {name}")
    return [name]


def _run_spectrum(resolved, out_dir, jobs, dump_series, log, engines=None):
    model, pulse = _specs(resolved)
    harmonics = resolved["grids"]["harmonics"]
    outputs = []
    for engine in engines or (resolved["engine"],):
        tag = "" if engines is None else f"_{engine.replace('-', '_')}"
        log(f"run engine={engine} phi={pulse.phi}")
        position = scans.position_series(model, pulse, engine)
        accel = propagator.acceleration_from_position(position, pulse.dt)
        spec = spectrum.power_spectrum(accel, pulse.dt, pulse.omega0)
        outputs += _spectrum_outputs(out_dir, tag, spec, harmonics, log)
        if dump_series:
            outputs += _series_output(out_dir, tag, laser.time_grid(pulse),
                                      position, accel, log)
    return outputs


def _run_polar_scan(resolved, out_dir, jobs, dump_series, log):
    model, pulse = _specs(resolved)
    grids = resolved["grids"]
    harmonics = grids["harmonics"]
    phis = scans.default_phi_grid(grids["phi_step"])
    log(f"polar scan: {len(phis)} angles, engine={resolved['engine']}")
    scan = scans.polar_scan(model, pulse, phis, resolved["engine"], harmonics,
                            jobs=jobs)
    header = ["phi"] + [f"I{n}" for n in harmonics] + [f"I{n}_norm" for n in harmonics]
    rows = [
        [phi, *scan.intensities[:, k], *scan.normalized[:, k]]
        for k, phi in enumerate(scan.phis)
    ]
    _write_csv(os.path.join(out_dir, "polar.csv"), header, rows)
    peak_rows = [
        [n, scan.peak_angle[n], scans.lobe_width(scan, n),
         scans.classify_angle(scan.peak_angle[n], model.alpha_mol, model.alpha_inter)]
        for n in harmonics
    ]
    _write_csv(os.path.join(out_dir, "peaks.csv"),
               ["n", "peak_phi", "fwhm", "class"], peak_rows)
    log("wrote polar.csv, peaks.csv")
    return ["polar.csv", "peaks.csv"]


def _run_coupling_sweep(resolved, out_dir, jobs, dump_series, log):
    model, pulse = _specs(resolved)
    grids = resolved["grids"]
    harmonics = grids["harmonics"]
    ratios = scans.log_grid(grids["t1_min"], grids["t1_max"],
                            grids["points_per_decade"])
    phis = scans.default_phi_grid(grids["phi_step"])
    log(f"coupling sweep: {len(ratios)} couplings x {len(phis)} angles, "
        f"engine={resolved['engine']}")
    sweep = scans.coupling_sweep(
        model, pulse, ratios, resolved["engine"], phis, harmonics,
        photon_fraction=resolved["pulse"]["photon_fraction"],
        freeze_omega0=grids["freeze_omega0"], jobs=jobs,
        refine_iters=grids["refine_iters"])
    header = ["t1_ratio"]
    for n in harmonics:
        header += [f"peak_phi{n}", f"class{n}"]
    rows = []
    for k, ratio in enumerate(sweep.t1_ratios):
        row = [ratio]
        for i in range(len(harmonics)):
            row += [sweep.peak_angles[i, k], sweep.classes[i, k]]
        rows.append(row)
    _write_csv(os.path.join(out_dir, "sweep.csv"), header, rows)

    header = (["t1_ratio"] + [f"I{n}_perp_inter" for n in harmonics]
              + [f"I{n}_perp_mol" for n in harmonics])
    rows = [
        [ratio, *sweep.perp_inter[:, k], *sweep.perp_mol[:, k]]
        for k, ratio in enumerate(sweep.t1_ratios)
    ]
    _write_csv(os.path.join(out_dir, "perp.csv"), header, rows)

    rows = [[n, sweep.flip_threshold[n], sweep.crossings[n]] for n in harmonics]
    _write_csv(os.path.join(out_dir, "thresholds.csv"),
               ["n", "flip_threshold", "crossing"], rows)
    log("wrote sweep.csv, perp.csv, thresholds.csv")
    return ["sweep.csv", "perp.csv", "thresholds.csv"]


def _run_adiabatic_compare(resolved, out_dir, jobs, dump_series, log):
    return _run_spectrum(resolved, out_dir, jobs, dump_series, log,
                         engines=scans.ENGINES)


_MODE_RUNNERS = {
    "spectrum": _run_spectrum,
    "polar-scan": _run_polar_scan,
    "coupling-sweep": _run_coupling_sweep,
    "adiabatic-compare": _run_adiabatic_compare,
}


def run(resolved: dict, derived: dict, out_dir: str, jobs: int = 1,
        dump_model: bool = False, dump_series: bool = False,
        log=lambda msg: None) -> list:
    """Execute a resolved configuration; returns the list of files written
    (manifest last)."""
    os.makedirs(out_dir, exist_ok=True)
    outputs = _MODE_RUNNERS[resolved["mode"]](resolved, out_dir, jobs,
                                              dump_series, log)
    if dump_model:
        model, _ = _specs(resolved)
        with open(os.path.join(out_dir, "model.json"), "w", encoding="utf-8") as f:
            json.dump(model_summary(model), f, indent=2, sort_keys=True)
            f.write("\n")
        outputs.append("model.json")
        log("wrote model.json")
    manifest = {
        "config": resolved,
        "derived": derived,
        "outputs": sorted(outputs),
    }
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    log("wrote manifest.json")
    return sorted(outputs) + ["manifest.json"]


# ------------------------------------------------------------------ main ---


def _add_common_flags(parser):
    parser.add_argument("--config", help="JSON config file (a manifest.json works too)")
    parser.add_argument("--out", help="output directory (default: "
                        f"{OUTPUT_ROOT_ENV} or ./runs, plus the run name)")
    parser.add_argument("--set", action="append", metavar="KEY=VALUE", dest="sets",
                        help="dotted-path override, e.g. --set pulse.phi=110")
    parser.add_argument("--jobs", type=int, default=1,
                        help="worker processes for scans (default 1)")
    parser.add_argument("--dump-model", action="store_true",
                        help="also write model.json (geometry and eigensystem)")
    parser.add_argument("--dump-series", action="store_true",
                        help="also write the time series for spectrum runs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dimerhhg",
        description="Harmonic-generation runs for the coupled-dimer model.")
    sub = parser.add_subparsers(dest="command", required=True)
    for mode in MODES:
        p = sub.add_parser(mode, help=f"run in {mode} mode")
        _add_common_flags(p)
    p = sub.add_parser("reproduce", help="run a named figure preset")
    p.add_argument("figure", choices=sorted(FIGURE_PRESETS))
    _add_common_flags(p)
    p = sub.add_parser("validate", help="resolve and echo a config without running")
    _add_common_flags(p)
    return parser


def _output_dir(args, run_name: str) -> str:
    if args.out:
        return args.out
    root = os.environ.get(OUTPUT_ROOT_ENV, os.path.join(".", "runs"))
    return os.path.join(root, run_name)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    log = lambda msg: print(msg, flush=True)  # noqa: E731  (line-per-task log)

    try:
        config = load_config(args.config) if args.config else {}
        if args.command == "reproduce":
            config = _merge(FIGURE_PRESETS[args.figure], config)
        elif args.command in MODES:
            config["mode"] = args.command
        config = apply_overrides(config, args.sets)
        resolved, derived = validate(config)
    except ConfigError as exc:
        json.dump({"error": "invalid configuration", "details": exc.errors},
                  sys.stderr, indent=2)
        sys.stderr.write("\n")
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        json.dump({"error": "cannot read configuration", "details": [str(exc)]},
                  sys.stderr, indent=2)
        sys.stderr.write("\n")
        return 2

    if args.command == "validate":
        json.dump({"config": resolved, "derived": derived}, sys.stdout,
                  indent=2, sort_keys=True)
        sys.stdout.write("\n")
        return 0

    run_name = args.figure if args.command == "reproduce" else resolved["mode"]
    out_dir = _output_dir(args, run_name)
    try:
        run(resolved, derived, out_dir, jobs=args.jobs,
            dump_model=args.dump_model, dump_series=args.dump_series, log=log)
    except (propagator.NormDriftError, scans.ScanError, ValueError) as exc:
        json.dump({"error": "run failed", "details": [str(exc)]}, sys.stderr)
        sys.stderr.write("\n")
        return 1
    except OSError as exc:
        json.dump({"error": "output failure", "details": [str(exc)]}, sys.stderr)
        sys.stderr.write("\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
