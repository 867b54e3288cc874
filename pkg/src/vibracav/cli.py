"""Command line interface.

Every command reads one cavity configuration (defaults, then an
optional JSON file via --config, then KEY=VALUE overrides), runs one
analysis and writes a table to stdout or --out in CSV or JSON form.

Commands
--------
spectrum     photon numbers per mode from both engines
phase-scan   spectra along a grid of drive phase differences
freq-scan    spectra along a grid of right-wall frequency ratios
additivity   two-wall numeric spectrum against summed single-wall runs
convergence  raw fixed-step runs over a (k_max, steps) grid
compare      mode-by-mode cross-validation of the two engines
validate     echo the resolved configuration and its resonance flags

The CSV dialect is deterministic: '#'-prefixed "key = value" metadata
lines, a header line, comma-separated rows, floats at 17 significant
digits.  JSON output carries the same content as
{"metadata": ..., "rows": ...}.  Exit status: 0 on success, 1 when a
run completes but its validation or comparison fails, 2 for invalid
configurations or arguments.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .analytic import photon_spectrum, resonant_order, validity_flags
from .core import CavityConfig, Truncation, require_resolved
from .dynamics import IntegrationError
from .sweep import (
    ENGINES,
    ScanSpec,
    additivity_check,
    compare_engines,
    convergence_report,
    run_scan,
)

__all__ = [
    "RunManifest",
    "build_parser",
    "config_from_mapping",
    "config_to_mapping",
    "main",
    "parse_config",
    "render_csv",
    "render_json",
    "run",
]

_CONFIG_FLOAT_KEYS = ("epsilon", "t_final", "lam", "a_left", "a_right",
                      "gamma_left", "gamma_right", "phi_left", "phi_right")
_TRUNC_INT_KEYS = ("k_max", "steps_per_fastest_period")
_TRUNC_FLOAT_KEYS = ("rel_tolerance",)
_ALL_KEYS = _CONFIG_FLOAT_KEYS + _TRUNC_INT_KEYS + _TRUNC_FLOAT_KEYS

# CLI-level defaults for the two required config fields
_DEFAULTS = {"epsilon": 1e-4, "t_final": 1000.0}


def config_to_mapping(cfg: CavityConfig, trunc: Truncation) -> dict:
    """Flat mapping of every configuration key, defaults included."""
    out = {key: getattr(cfg, key) for key in _CONFIG_FLOAT_KEYS}
    for key in _TRUNC_INT_KEYS + _TRUNC_FLOAT_KEYS:
        out[key] = getattr(trunc, key)
    return out


def config_from_mapping(mapping: dict) -> tuple[CavityConfig, Truncation]:
    """Rebuild (config, truncation) from a mapping of known keys."""
    unknown = sorted(set(mapping) - set(_ALL_KEYS))
    if unknown:
        raise ValueError(f"unknown configuration keys: {', '.join(unknown)}")
    cfg_kw = dict(_DEFAULTS)
    trunc_kw = {}
    for key, value in mapping.items():
        if key in _CONFIG_FLOAT_KEYS:
            cfg_kw[key] = float(value)
        elif key in _TRUNC_INT_KEYS:
            numeric = float(value)
            if numeric != int(numeric):
                raise ValueError(f"{key} must be an integer, got {value!r}")
            trunc_kw[key] = int(numeric)
        else:
            trunc_kw[key] = float(value)
    cfg = CavityConfig(**cfg_kw)
    if "k_max" not in trunc_kw:
        trunc_kw["k_max"] = Truncation.default_for(cfg).k_max
    return cfg, Truncation(**trunc_kw)


def parse_config(source=None, overrides=()) -> tuple[CavityConfig, Truncation]:
    """Resolve a configuration from a file or mapping plus overrides.

    ``source`` may be None, a mapping, or a path to a JSON file holding
    a flat mapping; ``overrides`` are KEY=VALUE strings applied on top.
    Unknown keys and malformed values raise ValueError.
    """
    mapping = {}
    if source is not None:
        if isinstance(source, dict):
            mapping.update(source)
        else:
            with open(source, encoding="utf-8") as fh:
                try:
                    loaded = json.load(fh)
                except json.JSONDecodeError as exc:
                    raise ValueError(f"config file {source}: {exc}") from exc
            if not isinstance(loaded, dict):
                raise ValueError(f"config file {source} must hold an object")
            mapping.update(loaded)
    for item in overrides:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ValueError(f"override {item!r} is not of the form KEY=VALUE")
        mapping[key.strip()] = value.strip()
    return config_from_mapping(mapping)


@dataclass(frozen=True, kw_only=True)
class RunManifest:
    """Fully resolved description of one CLI invocation."""

    command: str
    cfg: CavityConfig
    trunc: Truncation
    fmt: str = "csv"
    out: str | None = None
    quiet: bool = False
    engine: str = "both"
    workers: int = 1
    options: dict = field(default_factory=dict)

    def metadata(self) -> dict:
        meta = {"command": self.command, "package_version": __version__}
        meta["config"] = {k: getattr(self.cfg, k) for k in _CONFIG_FLOAT_KEYS}
        meta["truncation"] = {
            k: getattr(self.trunc, k)
            for k in _TRUNC_INT_KEYS + _TRUNC_FLOAT_KEYS
        }
        return meta


def _engines_for(manifest: RunManifest) -> tuple[str, ...]:
    if manifest.engine == "both":
        return ENGINES
    return (manifest.engine,)


# ---------------------------------------------------------------------------
# command handlers: each returns (metadata, header, rows, passed)


def _cmd_spectrum(manifest: RunManifest):
    from .dynamics import evolve_fundamental, extract_bogoliubov, numeric_spectrum

    meta = manifest.metadata()
    meta["engine"] = manifest.engine
    rows = []
    flags = []
    for engine in _engines_for(manifest):
        if engine == "analytic":
            spec = photon_spectrum(manifest.cfg, k_max=manifest.trunc.k_max)
        else:
            require_resolved(manifest.cfg, manifest.trunc)
            spec = numeric_spectrum(extract_bogoliubov(
                evolve_fundamental(manifest.cfg, manifest.trunc)))
        flags.extend(f"{engine}:{f}" for f in spec.flags)
        rows.extend((k, engine, n)
                    for k, n in zip(spec.modes, spec.photon_numbers))
    meta["flags"] = "|".join(flags)
    return meta, ["k", "engine", "photon_number"], rows, None


def _scan_command(manifest: RunManifest, axis: str):
    values = manifest.options["values"]
    spec = ScanSpec(base=manifest.cfg, trunc=manifest.trunc, axis=axis,
                    values=values, engines=_engines_for(manifest))
    result = run_scan(spec, workers=manifest.workers)
    meta = manifest.metadata()
    meta["axis"] = axis
    meta["engine"] = manifest.engine
    meta["n_points"] = len(values)
    meta["failures"] = "|".join(result.failures)
    rows = [(r.axis_value, r.engine, r.k, r.photon_number)
            for r in result.rows]
    passed = None if rows else False
    return meta, [axis, "engine", "k", "photon_number"], rows, passed


def _cmd_phase_scan(manifest: RunManifest):
    return _scan_command(manifest, "phase_delta")


def _cmd_freq_scan(manifest: RunManifest):
    return _scan_command(manifest, "gamma_right")


def _cmd_additivity(manifest: RunManifest):
    report = additivity_check(manifest.cfg, manifest.trunc)
    meta = manifest.metadata()
    meta["tolerance"] = report.tolerance
    meta["max_rel_deviation"] = report.max_rel_deviation
    meta["passed"] = report.passed
    header = ["k", "n_both", "n_left", "n_right", "abs_deviation",
              "rel_deviation"]
    return meta, header, [tuple(r) for r in report.rows], report.passed


def _cmd_convergence(manifest: RunManifest):
    report = convergence_report(manifest.cfg,
                                manifest.options["k_max_values"],
                                manifest.options["steps_values"])
    meta = manifest.metadata()
    meta["finest"] = ("" if report.finest is None
                      else f"{report.finest[0]}x{report.finest[1]}")
    header = ["k_max", "steps_per_fastest_period", "peak_mode",
              "peak_photon_number", "max_defect", "drift_vs_finest",
              "runtime_s", "flags"]
    rows = []
    for r in report.rows:
        if r.photon_numbers is None:
            peak_mode, peak = 0, math.nan
        else:
            arr = np.asarray(r.photon_numbers)
            peak_mode = int(arr.argmax()) + 1
            peak = float(arr.max())
        rows.append((r.k_max, r.steps_per_fastest_period, peak_mode, peak,
                     r.max_defect, r.drift_vs_finest, r.runtime_s,
                     "|".join(r.flags)))
    return meta, header, rows, None


def _cmd_compare(manifest: RunManifest):
    report = compare_engines(manifest.cfg, manifest.trunc)
    meta = manifest.metadata()
    meta["rel_tol"] = report.rel_tol
    meta["empty_fraction"] = report.empty_fraction
    meta["reference"] = report.reference
    meta["passed"] = report.passed
    header = ["k", "n_analytic", "n_numeric", "deviation", "criterion",
              "within"]
    return meta, header, [tuple(r) for r in report.rows], report.passed


def _cmd_validate(manifest: RunManifest):
    cfg, trunc = manifest.cfg, manifest.trunc
    require_resolved(cfg, trunc)
    meta = manifest.metadata()
    flags = list(validity_flags(cfg))
    for side in ("left", "right"):
        gamma = cfg.gamma(side)
        order = resonant_order(gamma)
        if cfg.amplitude(side) == 0:
            flags.append(f"{side}_static")
        elif order is None:
            flags.append(f"{side}_off_resonance")
        else:
            flags.append(f"{side}_resonance_order_{order}")
    meta["flags"] = "|".join(flags)
    rows = [(k, v) for k, v in config_to_mapping(cfg, trunc).items()]
    return meta, ["key", "value"], rows, None


_COMMANDS = {
    "spectrum": _cmd_spectrum,
    "phase-scan": _cmd_phase_scan,
    "freq-scan": _cmd_freq_scan,
    "additivity": _cmd_additivity,
    "convergence": _cmd_convergence,
    "compare": _cmd_compare,
    "validate": _cmd_validate,
}


# ---------------------------------------------------------------------------
# rendering


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def render_csv(metadata: dict, header: list, rows: list) -> str:
    lines = []
    for key, value in metadata.items():
        if isinstance(value, dict):
            for sub, subval in value.items():
                lines.append(f"# {sub} = {_fmt(subval)}")
        else:
            lines.append(f"# {key} = {_fmt(value)}")
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(cell) for cell in row))
    return "\n".join(lines) + "\n"


def _jsonable(value):
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    return value


def render_json(metadata: dict, header: list, rows: list) -> str:
    payload = {
        "metadata": {k: ({sk: _jsonable(sv) for sk, sv in v.items()}
                         if isinstance(v, dict) else _jsonable(v))
                     for k, v in metadata.items()},
        "rows": [dict(zip(header, map(_jsonable, row))) for row in rows],
    }
    return json.dumps(payload, indent=2) + "\n"


def _emit(manifest: RunManifest, text: str) -> None:
    if manifest.out is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(manifest.out))
    fd, tmp_path = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp_path, manifest.out)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


def run(manifest: RunManifest) -> int:
    """Execute one resolved invocation; returns the exit status."""
    handler = _COMMANDS[manifest.command]
    metadata, header, rows, passed = handler(manifest)
    render = render_csv if manifest.fmt == "csv" else render_json
    _emit(manifest, render(metadata, header, rows))
    if not manifest.quiet:
        note = "" if passed is None else (" passed" if passed else " FAILED")
        print(f"[vibracav] {manifest.command}: {len(rows)} rows{note}",
              file=sys.stderr)
    return 0 if passed in (None, True) else 1


# ---------------------------------------------------------------------------
# argument parsing


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"expected a comma-separated list of numbers, got {text!r}"
        ) from exc


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"expected a comma-separated list of integers, got {text!r}"
        ) from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vibracav",
        description="Photon production in a cavity with vibrating walls.",
        epilog="Configuration keys: " + ", ".join(_ALL_KEYS)
               + ". Defaults give a weak benchmark drive with static walls.",
    )
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON file with configuration keys")
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--quiet", action="store_true",
                       help="suppress the stderr summary line")
        p.add_argument("overrides", nargs="*", metavar="KEY=VALUE",
                       help="configuration overrides")

    def add_engine(p):
        p.add_argument("--engine", choices=("both",) + ENGINES,
                       default="both")

    p = sub.add_parser("spectrum", help="photon numbers per mode")
    add_engine(p)
    add_common(p)

    p = sub.add_parser("phase-scan",
                       help="spectra over drive phase differences")
    add_engine(p)
    p.add_argument("--points", type=int, default=16,
                   help="grid size over [start, stop) (default 16)")
    p.add_argument("--start", type=float, default=0.0)
    p.add_argument("--stop", type=float, default=2.0 * math.pi)
    p.add_argument("--values", type=_float_list,
                   help="explicit comma-separated grid (overrides "
                        "--points/--start/--stop)")
    p.add_argument("--workers", type=int, default=1)
    add_common(p)

    p = sub.add_parser("freq-scan",
                       help="spectra over right-wall frequency ratios")
    add_engine(p)
    p.add_argument("--points", type=int, default=11,
                   help="grid size over [start, stop] (default 11)")
    p.add_argument("--start", type=float, default=1.0)
    p.add_argument("--stop", type=float, default=6.0)
    p.add_argument("--values", type=_float_list,
                   help="explicit comma-separated grid (overrides "
                        "--points/--start/--stop)")
    p.add_argument("--workers", type=int, default=1)
    add_common(p)

    p = sub.add_parser("additivity",
                       help="check distinct resonances superpose")
    add_common(p)

    p = sub.add_parser("convergence",
                       help="fixed-step runs over a resolution grid")
    p.add_argument("--k-max-values", type=_int_list, default=(8, 12, 16))
    p.add_argument("--steps-values", type=_int_list, default=(8, 16, 32))
    add_common(p)

    p = sub.add_parser("compare", help="cross-validate the two engines")
    add_common(p)

    p = sub.add_parser("validate", help="echo the resolved configuration")
    add_common(p)

    return parser


def _grid_values(args) -> tuple[float, ...]:
    if args.values:
        return tuple(args.values)
    if args.points < 1:
        raise ValueError("--points must be >= 1")
    if args.command == "phase-scan":
        # exclusive endpoint: the phase axis wraps
        step = (args.stop - args.start) / args.points
        return tuple(args.start + i * step for i in range(args.points))
    if args.points == 1:
        return (args.start,)
    step = (args.stop - args.start) / (args.points - 1)
    return tuple(args.start + i * step for i in range(args.points))


def _build_manifest(args) -> RunManifest:
    cfg, trunc = parse_config(args.config, args.overrides)
    options = {}
    if args.command in ("phase-scan", "freq-scan"):
        options["values"] = _grid_values(args)
    if args.command == "convergence":
        options["k_max_values"] = tuple(args.k_max_values)
        options["steps_values"] = tuple(args.steps_values)
    return RunManifest(
        command=args.command,
        cfg=cfg,
        trunc=trunc,
        fmt=args.format,
        out=args.out,
        quiet=args.quiet,
        engine=getattr(args, "engine", "both"),
        workers=getattr(args, "workers", 1),
        options=options,
    )


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        manifest = _build_manifest(args)
    except (ValueError, OSError) as exc:
        print(f"[vibracav] error: {exc}", file=sys.stderr)
        return 2
    try:
        return run(manifest)
    except ValueError as exc:
        print(f"[vibracav] error: {exc}", file=sys.stderr)
        return 2
    except IntegrationError as exc:
        print(f"[vibracav] integration failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
