"""Command-line entry point: ``run``, ``list-presets`` and ``validate``.

Exit codes: 0 success, 2 configuration/schema violation, 3 numerical
failure (message tagged with the failing module).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
import traceback
from pathlib import Path

from . import artifacts
from .config import SchemaViolation, list_presets, load_config, resolve, validate
from .pipelines import run_config

log = logging.getLogger("photonic_sic")

OUT_ENV = "PHOTONIC_SIC_OUT"
EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3

_MODULE_TAGS = {
    "signals": "signal-gen",
    "channel": "channel-sim",
    "photonics": "photonic-model",
    "link": "photonic-model",
    "delay": "delay-estimation",
    "ga": "ga-optimizer",
    "ls": "ls-estimator",
    "metrics": "metrics",
}


def module_tag(exc):
    """Module of the innermost package frame that raised ``exc``."""
    tag = getattr(exc, "module", None)
    for frame in reversed(traceback.extract_tb(exc.__traceback__)):
        stem = Path(frame.filename).stem
        if "photonic_sic" in frame.filename and stem in _MODULE_TAGS:
            return _MODULE_TAGS[stem]
    return tag or "experiment-cli"


def write_outputs(result, out_dir: Path):
    out_dir.mkdir(parents=True, exist_ok=True)
    files = []
    for name, (header, rows) in sorted(result.tables.items()):
        artifacts.write_csv(out_dir / f"{name}.csv", header, rows)
        files.append(f"{name}.csv")
    for name, sig in sorted(result.spectra.items()):
        artifacts.write_psd_csv(out_dir / f"{name}.csv", sig)
        files.append(f"{name}.csv")
    for name, syms in sorted(result.constellations.items()):
        artifacts.write_constellation_csv(out_dir / f"{name}.csv", syms)
        files.append(f"{name}.csv")
    for name, doc in sorted(result.documents.items()):
        artifacts.write_json(out_dir / f"{name}.json", doc)
        files.append(f"{name}.json")
    return files


def _resolve(args):
    raw, text = load_config(args.config)
    cfg = resolve(raw, args.set or (), getattr(args, "seed", None))
    return cfg, text


def _print_diags(diags, stream):
    for d in diags:
        print(str(d), file=stream)


def cmd_run(args):
    cfg, text = _resolve(args)
    diags = validate(cfg, text)
    errors = [d for d in diags if d.severity == "error"]
    _print_diags([d for d in diags if d.severity == "warning"], sys.stderr)
    if errors:
        raise SchemaViolation(errors)
    out_root = Path(args.out or os.environ.get(OUT_ENV, "runs"))
    out_dir = out_root / cfg["name"]
    t0 = time.perf_counter()
    log.info("running %s (%s, seed %d)", cfg["name"], cfg["algorithm"], cfg["seed"])
    result = run_config(cfg)
    wall = time.perf_counter() - t0
    files = write_outputs(result, out_dir)
    summary = {
        "name": cfg["name"],
        "algorithm": cfg["algorithm"],
        "seed": cfg["seed"],
        "config": cfg,
        "results": result.summary,
        "files": sorted(files + ["summary.json"]),
    }
    artifacts.write_json(out_dir / "summary.json", summary)
    artifacts.write_json(out_dir / "run_meta.json", {
        "wall_clock_s": wall,
        "finished_at": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    })
    print(f"{cfg['name']}: wrote {len(files) + 2} files to {out_dir} in {wall:.1f} s")
    return EXIT_OK


def cmd_list(args):
    for name, desc in list_presets():
        print(f"{name:24s} {desc}")
    return EXIT_OK


def cmd_validate(args):
    cfg, text = _resolve(args)
    diags = validate(cfg, text)
    _print_diags(diags, sys.stdout)
    if any(d.severity == "error" for d in diags):
        return EXIT_CONFIG
    print(f"{cfg['name']}: valid")
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="photonic-sic", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a config file or preset")
    r.add_argument("config", help="path to a JSON config or a preset name")
    r.add_argument("--seed", type=int)
    r.add_argument("--out", help=f"output root (default ${OUT_ENV} or ./runs)")
    r.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key (dotted path)")
    r.set_defaults(func=cmd_run)
    lp = sub.add_parser("list-presets", help="list bundled presets")
    lp.set_defaults(func=cmd_list)
    v = sub.add_parser("validate", help="check a config against the schema and physics rules")
    v.add_argument("config")
    v.add_argument("--set", action="append", metavar="KEY=VALUE")
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except SchemaViolation as exc:
        _print_diags(exc.diagnostics, sys.stderr)
        return EXIT_CONFIG
    except (FileNotFoundError, ValueError, KeyError) as exc:
        if isinstance(exc, ValueError) and not isinstance(exc, SchemaViolation) and _raised_in_pipeline(exc):
            print(f"error [{module_tag(exc)}]: {exc}", file=sys.stderr)
            return EXIT_NUMERIC
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ArithmeticError, RuntimeError, Exception) as exc:  # noqa: BLE001 - top-level reporter
        print(f"error [{module_tag(exc)}]: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def _raised_in_pipeline(exc):
    return any(Path(f.filename).stem in _MODULE_TAGS or Path(f.filename).stem == "pipelines"
               for f in traceback.extract_tb(exc.__traceback__))


if __name__ == "__main__":
    sys.exit(main())
