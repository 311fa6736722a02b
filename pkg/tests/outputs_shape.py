"""Shape of a run directory: CSV headers and JSON keys per file."""

import csv
import json
from pathlib import Path


def describe(run_dir):
    run_dir = Path(run_dir)
    out = {}
    for f in sorted(run_dir.iterdir()):
        if f.suffix == ".csv":
            with open(f, newline="") as fh:
                out[f.name] = next(csv.reader(fh))
        elif f.name == "summary.json":
            doc = json.loads(f.read_text())
            out[f.name] = {"keys": sorted(doc), "results": sorted(doc["results"])}
        elif f.suffix == ".json":
            doc = json.loads(f.read_text())
            out[f.name] = sorted(doc) if isinstance(doc, dict) else type(doc).__name__
    return out
