"""Write sweep outputs: records, timings, heat-map table, diagnosis, replay spec."""

import csv
from collections import defaultdict
from pathlib import Path

import numpy as np

from ..io import write_json
from .sweep import RunRecord

HEATMAP_COLUMNS = (
    "c", "epsilon", "delta", "init", "steps", "trials",
    "Q", "Q_std", "Q_mu", "Q_perm", "sweeps", "log_likelihood",
)


def _fmt(v):
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_records(records, path, timing=False):
    cols = RunRecord.columns(timing=timing)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for r in records:
            w.writerow([_fmt(getattr(r, c)) for c in cols])


def read_records(path):
    types = {f: type(getattr(RunRecord(0, 0, 0, 0, 0.0, 0.0, 0.0, False, 0, 0, ""), f))
             for f in RunRecord.columns(timing=True)}
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            kw = {}
            for k, v in row.items():
                t = types[k]
                kw[k] = (v == "1") if t is bool else t(v)
            out.append(RunRecord(**kw))
    return out


def heatmap_rows(records):
    """Per-cell means in long format, one row per (cell, init, steps)."""
    groups = defaultdict(list)
    for r in records:
        if not r.error:
            groups[(r.c, r.epsilon, r.delta, r.init, r.steps)].append(r)
    rows = []
    for key in sorted(groups):
        recs = groups[key]
        q = np.array([r.Q for r in recs])
        rows.append(dict(
            zip(HEATMAP_COLUMNS[:5], key),
            trials=len(recs),
            Q=float(q.mean()),
            Q_std=float(q.std(ddof=1)) if q.size > 1 else 0.0,
            Q_mu=float(np.mean([r.Q_mu for r in recs])),
            Q_perm=float(np.mean([r.Q_perm for r in recs])),
            sweeps=float(np.mean([r.sweeps for r in recs])),
            log_likelihood=float(np.mean([r.log_likelihood for r in recs])),
        ))
    return rows


def write_heatmap(records, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HEATMAP_COLUMNS)
        for row in heatmap_rows(records):
            w.writerow([_fmt(row[c]) for c in HEATMAP_COLUMNS])


def emit(records, diagnosis, path, spec=None):
    """Write everything under directory ``path``; returns the written paths.

    ``records.csv`` omits wall time so replays compare byte-for-byte;
    timings go to ``timings.csv``.
    """
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    files = {
        "records": out / "records.csv",
        "timings": out / "timings.csv",
        "heatmap": out / "heatmap.csv",
    }
    write_records(records, files["records"])
    with open(files["timings"], "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["i1", "i2", "trial", "branch", "init", "steps", "wall_time"])
        for r in records:
            w.writerow([r.i1, r.i2, r.trial, r.branch, r.init, r.steps, repr(r.wall_time)])
    write_heatmap(records, files["heatmap"])
    if diagnosis is not None:
        files["diagnosis"] = out / "diagnosis.json"
        payload = diagnosis.to_dict() if hasattr(diagnosis, "to_dict") else diagnosis
        write_json(payload, files["diagnosis"])
    if spec is not None:
        files["spec"] = out / "sweep.json"
        write_json(spec.to_dict() if hasattr(spec, "to_dict") else spec, files["spec"])
    return files
