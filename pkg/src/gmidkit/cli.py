"""Command-line front end: characterize, charts, size, verify.

Every command is deterministic and idempotent; output files are written via
temp file plus rename so a failure leaves no partial artifacts.  Exit codes:
0 success (and spec pass for verify), 1 infeasible or spec fail or I/O
failure, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from pathlib import Path

from .config import ToolConfig, load_config
from .device import generate_lut
from .errors import (
    ConfigError,
    GridRangeError,
    InfeasibleError,
    InvalidArgumentError,
    InvalidDesignError,
    KvParseError,
    LutParseError,
    SynthesisError,
)
from .kvio import (
    design_from_kv,
    design_kv_items,
    format_kv,
    parse_kv,
    report_kv_items,
    verdict_kv_items,
)
from .lut import chart_series_csv, emit_charts, load_lut, lut_to_csv
from .synth import synthesize
from .verify import bode, bode_csv, report

BODE_F_START = 1e3
BODE_F_STOP = 1e9
BODE_POINTS_PER_DECADE = 50

_PARSE_ERRORS = (ConfigError, LutParseError, KvParseError, InvalidArgumentError)
_INFEASIBLE_ERRORS = (InfeasibleError, SynthesisError, InvalidDesignError, GridRangeError)


def _write_outputs(out_dir: Path, files: dict[str, str]) -> None:
    """Write all files atomically; either every file lands or none does."""
    out_dir.mkdir(parents=True, exist_ok=True)
    staged: list[tuple[Path, Path]] = []
    try:
        for name, text in files.items():
            target = out_dir / name
            fd, tmp_name = tempfile.mkstemp(dir=out_dir, prefix=name + ".", suffix=".tmp")
            staged.append((Path(tmp_name), target))
            with os.fdopen(fd, "w", encoding="ascii", newline="") as fh:
                fh.write(text)
    except BaseException:
        for tmp, _ in staged:
            tmp.unlink(missing_ok=True)
        raise
    for tmp, target in staged:
        os.replace(tmp, target)


def _load_amp_config(path: str) -> ToolConfig:
    config = load_config(path)
    if config.amp is None:
        raise ConfigError(f"{path}: config.amp: block required for this command")
    return config


def cmd_characterize(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    sweep = config.sweep
    files = {}
    for name, params in (("nmos_lut.csv", config.nmos), ("pmos_lut.csv", config.pmos)):
        lut = generate_lut(
            params,
            l_min=sweep.l_min, l_max=sweep.l_max, n_l=sweep.n_l,
            vgs_min=sweep.vgs_min, vgs_max=sweep.vgs_max, n_vgs=sweep.n_vgs,
        )
        files[name] = lut_to_csv(lut)
    _write_outputs(Path(args.out), files)
    return 0


def cmd_charts(args: argparse.Namespace) -> int:
    lut = load_lut(args.lut)
    prefix = "pmos" if lut.polarity == "P" else "nmos"
    series = emit_charts(lut)
    files = {
        f"{prefix}_panel{panel}.csv": chart_series_csv(
            [s for s in series if s.panel == panel]
        )
        for panel in (1, 2, 3)
    }
    _write_outputs(Path(args.out), files)
    return 0


def cmd_size(args: argparse.Namespace) -> int:
    config = _load_amp_config(args.config)
    lut_n = load_lut(args.lut_n)
    lut_p = load_lut(args.lut_p)
    design = synthesize(config.amp, lut_n, lut_p)
    _write_outputs(Path(args.out), {"design.kv": format_kv(design_kv_items(design))})
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    config = _load_amp_config(args.config)
    design = design_from_kv(parse_kv(Path(args.design).read_text(encoding="ascii")))
    lut_n = load_lut(args.lut_n)
    lut_p = load_lut(args.lut_p)
    rep = report(design, lut_n, lut_p, config.amp)
    points = bode(rep, BODE_F_START, BODE_F_STOP, BODE_POINTS_PER_DECADE)
    _write_outputs(
        Path(args.out),
        {
            "report.kv": format_kv(report_kv_items(rep, config.amp)),
            "bode.csv": bode_csv(points),
            "verdicts.kv": format_kv(verdict_kv_items(rep)),
        },
    )
    return 0 if rep.overall_pass else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gmidkit",
        description="Sizing-chart driven synthesis and verification of a "
                    "two-stage Miller op-amp.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("characterize", help="generate N and P sizing-chart CSVs")
    p.add_argument("--config", required=True, help="tool config JSON")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_characterize)

    p = sub.add_parser("charts", help="emit the three chart panels of one LUT")
    p.add_argument("lut", help="sizing-chart CSV path")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_charts)

    p = sub.add_parser("size", help="synthesize a design from the spec and charts")
    p.add_argument("--config", required=True, help="tool config JSON (amp block required)")
    p.add_argument("--lut-n", required=True, help="N-device chart CSV")
    p.add_argument("--lut-p", required=True, help="P-device chart CSV")
    p.add_argument("--out", required=True, help="output directory (writes design.kv)")
    p.set_defaults(func=cmd_size)

    p = sub.add_parser("verify", help="verify a design and grade it against the spec")
    p.add_argument("--design", required=True, help="design.kv path")
    p.add_argument("--lut-n", required=True, help="N-device chart CSV")
    p.add_argument("--lut-p", required=True, help="P-device chart CSV")
    p.add_argument("--config", required=True, help="tool config JSON (amp block required)")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args)
    except _PARSE_ERRORS as exc:
        print(f"gmidkit: error: {exc}", file=sys.stderr)
        return 2
    except _INFEASIBLE_ERRORS as exc:
        print(f"gmidkit: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"gmidkit: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
