"""Flat-file formats: CSV tables, JSON reports and potential files.

Floats are written with ``repr`` (shortest round-trip form), so every
number read back is bit-identical to the one written.
"""
import csv
import json
import math
from pathlib import Path

import numpy as np

from .construct import ConstructionConfig, PhiFunction, StageRecord
from .transfer import PeriodicPotential


def fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isfinite(x) and x == int(x) and abs(x) < 1e16:
            return str(int(x))
        return repr(x)
    return str(x)


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    return obj


def write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path):
    with open(path) as fh:
        return json.load(fh, parse_constant=float)


def read_values_file(path):
    """One period of a potential from a JSON list or a text file of numbers."""
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        data = [float(t) for t in text.replace(",", " ").split()]
    if isinstance(data, dict) and "values" in data:
        data = data["values"]
    return PeriodicPotential(data)


def stage_record_to_json(rec):
    d = rec.to_dict()
    d.pop("values")
    return d


def write_construction(report_path, potentials_path, V0, phi, cfg, records, failure=None):
    best_values = None
    if failure is not None:
        failure = dict(failure)
        best_values = failure.pop("best_values", None)
    report = {
        "status": "ok" if failure is None else "budget_exceeded",
        "config": cfg.to_dict(),
        "phi": phi.to_dict(),
        "potentials_file": Path(potentials_path).name,
        "stages": [stage_record_to_json(r) for r in records],
    }
    if failure is not None:
        report["failure"] = failure
    write_json(report_path, report)
    pots = {"V0": V0.values, "stages": [{"j": r.j, "values": r.potential.values} for r in records]}
    if best_values is not None:
        pots["best_candidate"] = best_values
    write_json(potentials_path, pots)


def read_construction(report_path, potentials_path=None):
    """Load ``(V0, phi, cfg, records)`` from a construction report and its potentials file."""
    report = read_json(report_path)
    if potentials_path is None:
        potentials_path = Path(report_path).parent / report["potentials_file"]
    pots = read_json(potentials_path)
    values = {s["j"]: s["values"] for s in pots["stages"]}
    records = []
    for s in report["stages"]:
        d = dict(s)
        for key in ("eps_j", "lhs", "rhs", "budget", "actual_step", "supnorm", "ids_error"):
            d[key] = float(d[key])
        d["values"] = values[d["j"]]
        records.append(StageRecord.from_dict(d))
    cfg = ConstructionConfig(**report["config"])
    phi = PhiFunction(**report["phi"])
    return PeriodicPotential(pots["V0"]), phi, cfg, records, report
