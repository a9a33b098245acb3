"""Phase diagnostics over sweep records: coexistence, condensation, jumps."""

from collections import defaultdict
from dataclasses import asdict, dataclass, field

import numpy as np

from ..exceptions import InvalidParameterError

DEFAULT_GAP_THRESHOLD = 0.05
DEFAULT_NOISE_FACTOR = 3.0
MIN_ROW_CELLS = 10
_OTHER_AXIS = {"c": "delta", "epsilon": "delta", "delta": "epsilon"}


def _usable(records, init=None):
    return [
        r for r in records
        if r.steps == -1 and not r.error and (init is None or r.init == init)
    ]


def _cell_key(r):
    return (r.c, r.epsilon, r.delta)


@dataclass
class CellGap:
    c: float
    epsilon: float
    delta: float
    q_random: float
    q_planted: float
    gap: float
    coexistence: bool


def dual_init_gap(records, gap_threshold=DEFAULT_GAP_THRESHOLD, metric="Q"):
    """Per cell, mean ``metric`` of planted-init runs minus random-init runs."""
    groups = defaultdict(lambda: defaultdict(list))
    for r in _usable(records):
        groups[_cell_key(r)][r.init].append(getattr(r, metric))
    if not any("random" in g and "planted" in g for g in groups.values()):
        raise InvalidParameterError("records need both random and planted initializations")
    out = []
    for key in sorted(groups):
        g = groups[key]
        if "random" not in g or "planted" not in g:
            raise InvalidParameterError(f"cell {key} lacks one of the initializations")
        qr, qp = float(np.mean(g["random"])), float(np.mean(g["planted"]))
        out.append(CellGap(*key, qr, qp, qp - qr, bool(qp - qr > gap_threshold)))
    return out


@dataclass
class Crossing:
    row: float
    location: float = None
    span: tuple = None


def _row_series(records, axis, row_axis):
    rows = defaultdict(dict)
    for r in records:
        rows[getattr(r, row_axis)].setdefault(getattr(r, axis), []).append(r)
    return {row: dict(sorted(cells.items())) for row, cells in sorted(rows.items())}


def condensation_scan(records, axis="c", row_axis=None, gap_threshold=DEFAULT_GAP_THRESHOLD,
                      metric="Q"):
    """Where ``L(planted fixed point) - L(random fixed point)`` changes sign.

    Differences are paired per network (trial). A crossing is only reported
    between adjacent cells that are both in the coexistence region, located
    by linear interpolation.
    """
    row_axis = row_axis or _OTHER_AXIS[axis]
    gaps = {_cell_key(g): g.coexistence for g in dual_init_gap(records, gap_threshold, metric)}
    out = []
    for row, cells in _row_series(_usable(records), axis, row_axis).items():
        xs, diffs, flags = [], [], []
        for x, recs in cells.items():
            by_trial = defaultdict(dict)
            for r in recs:
                by_trial[r.trial][r.init] = r.log_likelihood
            paired = [
                v["planted"] - v["random"] for v in by_trial.values()
                if "planted" in v and "random" in v
            ]
            if not paired:
                continue
            xs.append(x)
            diffs.append(float(np.mean(paired)))
            flags.append(gaps[_cell_key(recs[0])])
        span = [x for x, f in zip(xs, flags) if f]
        found = Crossing(row, None, (min(span), max(span)) if span else None)
        for k in range(len(xs) - 1):
            if not (flags[k] and flags[k + 1]):
                continue
            d0, d1 = diffs[k], diffs[k + 1]
            if d0 == 0:
                found.location = xs[k]
                break
            if d0 * d1 < 0:
                found.location = xs[k] + (xs[k + 1] - xs[k]) * d0 / (d0 - d1)
                break
        out.append(found)
    return out


@dataclass
class RowTransition:
    """Jump and timing summary of one row of a sweep.

    ``raw_jump`` is the largest change between adjacent cells. ``jump_height``
    is the largest change in excess of the local trend (the step minus the
    mean of its neighboring steps), which separates a discontinuity from a
    steep but smooth slope. ``noise`` is the median inter-seed standard
    deviation of the metric over the row's cells.
    """

    row: float
    axis_values: list = field(default_factory=list)
    means: list = field(default_factory=list)
    raw_jump: float = 0.0
    raw_jump_location: float = None
    jump_height: float = 0.0
    jump_location: float = None
    time_peak_location: float = None
    noise: float = 0.0
    threshold: float = 0.0
    has_jump: bool = False
    locations_agree: bool = None


def transition_scan(records, axis, row_axis=None, init="random", metric="Q",
                    noise=None, noise_factor=DEFAULT_NOISE_FACTOR, min_cells=MIN_ROW_CELLS):
    row_axis = row_axis or _OTHER_AXIS[axis]
    out = []
    for row, cells in _row_series(_usable(records, init), axis, row_axis).items():
        xs = np.array(list(cells))
        if xs.size < min_cells:
            raise InvalidParameterError(
                f"row {row_axis}={row} has {xs.size} cells; need at least {min_cells}"
            )
        vals = [np.array([getattr(r, metric) for r in recs]) for recs in cells.values()]
        means = np.array([v.mean() for v in vals])
        stds = np.array([v.std(ddof=1) if v.size > 1 else np.nan for v in vals])
        sweeps = np.array([np.mean([r.sweeps for r in recs]) for recs in cells.values()])
        steps = np.diff(means)
        mid = 0.5 * (xs[1:] + xs[:-1])
        trend = np.empty_like(steps)
        for k in range(steps.size):
            nb = [steps[j] for j in (k - 1, k + 1) if 0 <= j < steps.size]
            trend[k] = np.mean(nb) if nb else 0.0
        excess = np.abs(steps - trend)
        row_noise = noise if noise is not None else (
            float(np.nanmedian(stds)) if np.any(np.isfinite(stds)) else 0.0
        )
        k_raw = int(np.argmax(np.abs(steps)))
        k_jump = int(np.argmax(excess))
        res = RowTransition(
            row=float(row),
            axis_values=xs.tolist(),
            means=means.tolist(),
            raw_jump=float(abs(steps[k_raw])),
            raw_jump_location=float(mid[k_raw]),
            jump_height=float(excess[k_jump]),
            jump_location=float(mid[k_jump]),
            time_peak_location=float(xs[int(np.argmax(sweeps))]),
            noise=row_noise,
            threshold=noise_factor * row_noise,
        )
        res.has_jump = bool(res.jump_height > res.threshold)
        if res.has_jump:
            grid = float(np.min(np.abs(np.diff(xs))))
            res.locations_agree = bool(
                abs(res.time_peak_location - res.jump_location) <= grid + 1e-9
            )
        out.append(res)
    return out


@dataclass
class PhaseDiagnosis:
    cells: list = field(default_factory=list)
    rows: list = field(default_factory=list)
    crossings: list = field(default_factory=list)

    def to_dict(self):
        return {
            "cells": [asdict(c) for c in self.cells],
            "rows": [asdict(r) for r in self.rows],
            "crossings": [asdict(c) for c in self.crossings],
        }


def diagnose(records, axis, row_axis=None, gap_threshold=DEFAULT_GAP_THRESHOLD,
             noise_factor=DEFAULT_NOISE_FACTOR, min_cells=MIN_ROW_CELLS, metric="Q"):
    """Run every diagnostic the records support.

    Use ``metric="Q_perm"`` when runs may settle on a relabeled partition,
    as happens with nearly equal groups.
    """
    inits = {r.init for r in _usable(records)}
    diag = PhaseDiagnosis()
    if {"random", "planted"} <= inits:
        diag.cells = dual_init_gap(records, gap_threshold, metric)
        diag.crossings = condensation_scan(records, axis, row_axis, gap_threshold, metric)
    if "random" in inits:
        try:
            diag.rows = transition_scan(records, axis, row_axis, metric=metric,
                                        noise_factor=noise_factor, min_cells=min_cells)
        except InvalidParameterError:
            diag.rows = []
    return diag
