"""Command-line entry point ``nearfield-om``.

Exit status: 0 on success, 1 when a computation or a hard validation check
fails, 2 for configuration errors.
"""
import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from ._accel import backend_name
from .commands import COMMANDS
from .config import ConfigError, load_config
from .numerics import BracketError, QuadratureError, UnstableDynamicsError
from .output import jsonable, provenance, write_result
from .validation import report

log = logging.getLogger("nearfield_om")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
PHYSICS_ERRORS = (ValueError, ArithmeticError, QuadratureError, BracketError, UnstableDynamicsError)

HELP = {
    "modes": "membrane mode table (frequency, effective mass, zero-point amplitude)",
    "static": "static resonance shift and extra linewidth against the gap",
    "coupling": "g1, g2 and cooperativity across membrane sizes",
    "misalign": "|g1/g2| over a displacement or tilt grid, with unity crossings",
    "omit": "transparency peak against photon number, and the probe spectrum",
    "switch": "switching threshold and control photons against g1",
    "entangle": "logarithmic negativity against bath temperature",
    "validate": "run the reference checks and write a JSON report",
}


def _global_flags(parser):
    s = argparse.SUPPRESS
    parser.add_argument("--config", default=s, help="config JSON file or shipped preset name (default: flagship)")
    parser.add_argument("--out", default=s, help="output directory (default: output.path of the config)")
    parser.add_argument("--format", choices=("csv", "json"), default=s, help="data file format")
    parser.add_argument("--threads", type=int, default=s, help="worker threads for sweeps")
    parser.add_argument("--verbose", "-v", action="store_true", default=s, help="debug logging")


def build_parser():
    parser = argparse.ArgumentParser(prog="nearfield-om", description="Near-field membrane optomechanics calculator")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _global_flags(parser)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common)
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name, text in HELP.items():
        p = sub.add_parser(name, parents=[common], help=text, description=text)
        if name in ("coupling", "misalign"):
            p.add_argument("--mode", nargs=2, type=int, metavar=("J", "K"), help="mode indices (default: from config)")
    return parser


def _settings(args):
    return {
        "config": getattr(args, "config", None),
        "out": getattr(args, "out", None),
        "format": getattr(args, "format", None),
        "threads": getattr(args, "threads", 1),
        "verbose": getattr(args, "verbose", False),
    }


def _run_validate(cfg, out_dir):
    rep = jsonable(report(cfg))
    for c in rep["checks"]:
        print(f"{c['status']:>9}  {c['id']:<4} {c['name']}: computed={c['computed']!r} expected={c['expected']!r} "
              f"({c['tolerance']})")
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "validation.json"
    payload = {**provenance(cfg.hash), **rep}
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(path)
    if not rep["passed"]:
        log.error("hard checks failed: %s", ", ".join(rep["hard_failures"]))
        return EXIT_FAIL
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    opts = _settings(args)
    logging.basicConfig(level=logging.DEBUG if opts["verbose"] else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    logging.captureWarnings(True)

    if opts["threads"] < 1:
        log.error("--threads must be at least 1")
        return EXIT_CONFIG
    try:
        cfg = load_config(opts["config"])
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    log.debug("config sha256 %s, kernel backend %s", cfg.hash, backend_name())

    out_dir = Path(opts["out"] or cfg.raw.get("output", {}).get("path", "out"))
    fmt = opts["format"] or cfg.raw.get("output", {}).get("format", "csv")

    try:
        if args.command == "validate":
            return _run_validate(cfg, out_dir)
        kwargs = {"threads": opts["threads"]}
        if getattr(args, "mode", None):
            kwargs["mode"] = tuple(args.mode)
        results = COMMANDS[args.command](cfg, **kwargs)
    except PHYSICS_ERRORS as exc:
        log.error("%s failed: %s", args.command, exc)
        return EXIT_FAIL
    for res in results:
        print(write_result(res, out_dir, fmt, cfg.hash))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
