"""Experiment records and the statistics over them.

A run record is one trained model instance: real-subset size r,
synthetic-subset size s, instance index i, its mean validation IoU, and
training cost.  Records aggregate into a matrix keyed by (r, s); the
statistics reported per cell are the mean, the percent increase over
the same-r baseline column s=0, and a one-sided Welch t-test against
that baseline (alternative: the augmented cell's mean is greater).

The replication rule stops adding instances to a cell once the
two-sided Student-t confidence interval of the mean is narrower than a
fraction of the mean, within [min_n, max_n] bounds.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.stats import t as student_t

from .errors import DataError, ParameterError

CONTINUE = "continue"
STOP = "stop"


@dataclass(frozen=True)
class ExperimentRecord:
    r: int
    s: int
    i: int
    iou: float
    seconds: float = 0.0
    epochs: int = 0

    def __post_init__(self):
        if not 0.0 <= self.iou <= 1.0:
            raise DataError(f"iou must be in [0, 1], got {self.iou}")

    def to_json(self) -> str:
        return json.dumps({"r": self.r, "s": self.s, "i": self.i, "iou": self.iou,
                           "seconds": self.seconds, "epochs": self.epochs},
                          separators=(",", ":"), sort_keys=True)


def read_run_records(path) -> list[ExperimentRecord]:
    records = []
    with open(Path(path), "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                d = json.loads(line)
                records.append(ExperimentRecord(r=int(d["r"]), s=int(d["s"]), i=int(d["i"]),
                                                iou=float(d["iou"]),
                                                seconds=float(d.get("seconds", 0.0)),
                                                epochs=int(d.get("epochs", 0))))
            except (json.JSONDecodeError, KeyError, ValueError) as e:
                raise DataError(f"bad run record at {path}:{line_no}: {e}") from None
    return records


def write_run_records(records, path) -> None:
    with open(Path(path), "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(rec.to_json() + "\n")


@dataclass(frozen=True)
class RunMatrix:
    cells: dict[tuple[int, int], tuple[ExperimentRecord, ...]]

    def mean_grid(self) -> dict[tuple[int, int], float]:
        return {key: float(np.mean([rec.iou for rec in recs]))
                for key, recs in self.cells.items()}

    def real_sizes(self) -> list[int]:
        return sorted({r for r, _ in self.cells})

    def synth_sizes(self) -> list[int]:
        return sorted({s for _, s in self.cells})


def aggregate_matrix(records) -> RunMatrix:
    records = list(records)
    if not records:
        raise DataError("no run records to aggregate")
    cells: dict[tuple[int, int], list[ExperimentRecord]] = {}
    for rec in records:
        cells.setdefault((rec.r, rec.s), []).append(rec)
    return RunMatrix({k: tuple(v) for k, v in cells.items()})


def percent_increase(matrix: RunMatrix) -> dict[tuple[int, int], float]:
    """Per cell: 100 * (mean(r,s) - mean(r,0)) / mean(r,0)."""
    means = matrix.mean_grid()
    out = {}
    for (r, s), m in means.items():
        if (r, 0) not in means:
            raise DataError(f"baseline cell ({r}, 0) missing")
        base = means[(r, 0)]
        if base == 0.0:
            raise DataError(f"baseline mean for r={r} is zero; percent increase undefined")
        out[(r, s)] = 100.0 * (m - base) / base
    return out


def welch_statistic(sample_a, sample_b) -> tuple[float, float]:
    """Welch t statistic and Welch-Satterthwaite degrees of freedom."""
    a = np.asarray(sample_a, dtype=np.float64)
    b = np.asarray(sample_b, dtype=np.float64)
    if a.size < 2 or b.size < 2:
        raise DataError("both samples need at least 2 values")
    va = a.var(ddof=1) / a.size
    vb = b.var(ddof=1) / b.size
    pooled = va + vb
    if pooled == 0.0:
        return 0.0, float(a.size + b.size - 2)
    t = float((a.mean() - b.mean()) / math.sqrt(pooled))
    df = float(pooled**2 / (va**2 / (a.size - 1) + vb**2 / (b.size - 1)))
    return t, df


def welch_ttest_one_sided(sample_a, sample_b) -> float:
    """Upper-tail p-value for the alternative mean(a) > mean(b)."""
    t, df = welch_statistic(sample_a, sample_b)
    return float(student_t.sf(t, df))


def ci_half_width(values, alpha: float = 0.95) -> float:
    """Half-width of the two-sided Student-t interval for the mean."""
    v = np.asarray(values, dtype=np.float64)
    if v.size < 2:
        raise DataError("confidence interval needs at least 2 values")
    crit = float(student_t.ppf((1.0 + alpha) / 2.0, v.size - 1))
    return crit * float(v.std(ddof=1)) / math.sqrt(v.size)


def ci_replication_rule(observed, alpha: float = 0.95, max_rel_width: float = 0.05,
                        min_n: int = 7, max_n: int = 30) -> str:
    """Decide whether a cell needs more instances: returns 'continue' or 'stop'.

    Stops once n >= min_n and the full CI width is below
    max_rel_width * mean, or unconditionally at n = max_n.
    """
    if min_n < 2:
        raise ParameterError("min_n must be >= 2")
    if max_n < min_n:
        raise ParameterError("max_n must be >= min_n")
    v = np.asarray(observed, dtype=np.float64)
    n = v.size
    if n >= max_n:
        return STOP
    if n < min_n:
        return CONTINUE
    width = 2.0 * ci_half_width(v, alpha)
    mean = float(v.mean())
    if mean <= 0.0:
        if width > 0.0:
            raise DataError("relative CI width undefined for non-positive mean")
        return CONTINUE
    return STOP if width < max_rel_width * mean else CONTINUE


@dataclass(frozen=True)
class RatioSeries:
    real_size: int
    points: tuple[tuple[float, float], ...]  # (s/r ratio, mean IoU), ordered by ratio

    def inflection_index(self) -> int:
        return inflection_index([m for _, m in self.points])


def inflection_index(values) -> int:
    """Index of the (first) maximum: where a rising trend turns down."""
    v = list(values)
    if not v:
        raise DataError("empty series")
    return int(np.argmax(v))


def ratio_view(matrix: RunMatrix) -> list[RatioSeries]:
    """Re-index cells by synthetic:real ratio; the r=0 row is excluded."""
    means = matrix.mean_grid()
    series = []
    for r in matrix.real_sizes():
        if r == 0:
            continue
        pts = sorted((s / r, means[(r, s)]) for (rr, s) in means if rr == r)
        series.append(RatioSeries(real_size=r, points=tuple(pts)))
    return series


@dataclass(frozen=True)
class CellStats:
    r: int
    s: int
    n: int
    mean: float
    std: float
    ci_half_width: float
    percent_increase: float | None
    p_value: float | None
    values: tuple[float, ...] = field(default=())


def compute_stats(matrix: RunMatrix, alpha: float = 0.95) -> list[CellStats]:
    """Per-cell summary ordered by (r, s); baseline comparisons use (r, 0)."""
    means = matrix.mean_grid()
    increases = percent_increase(matrix) if all((r, 0) in means for r, _ in means) else None
    out = []
    for (r, s) in sorted(matrix.cells):
        recs = matrix.cells[(r, s)]
        vals = np.asarray([rec.iou for rec in recs], dtype=np.float64)
        base = [rec.iou for rec in matrix.cells.get((r, 0), ())]
        p = None
        if s != 0 and len(vals) >= 2 and len(base) >= 2:
            p = welch_ttest_one_sided(vals, base)
        out.append(CellStats(
            r=r, s=s, n=int(vals.size), mean=float(vals.mean()),
            std=float(vals.std(ddof=1)) if vals.size > 1 else 0.0,
            ci_half_width=ci_half_width(vals, alpha) if vals.size > 1 else 0.0,
            percent_increase=None if increases is None else increases[(r, s)],
            p_value=p, values=tuple(float(x) for x in vals)))
    return out


def stats_to_dict(stats: list[CellStats], alpha: float = 0.95) -> dict:
    return {"alpha": alpha,
            "cells": [{"r": c.r, "s": c.s, "n": c.n, "mean": c.mean, "std": c.std,
                       "ci_half_width": c.ci_half_width,
                       "percent_increase": c.percent_increase,
                       "p_value": c.p_value, "values": list(c.values)}
                      for c in stats]}


def stats_from_dict(doc: dict) -> list[CellStats]:
    try:
        return [CellStats(r=int(c["r"]), s=int(c["s"]), n=int(c["n"]), mean=float(c["mean"]),
                          std=float(c["std"]), ci_half_width=float(c["ci_half_width"]),
                          percent_increase=None if c.get("percent_increase") is None
                          else float(c["percent_increase"]),
                          p_value=None if c.get("p_value") is None else float(c["p_value"]),
                          values=tuple(float(x) for x in c.get("values", ())))
                for c in doc["cells"]]
    except (KeyError, TypeError, ValueError) as e:
        raise DataError(f"bad stats document: {e}") from None
