"""Report emission: CSV/JSON tables, SVG heatmaps, SVG IQR plots.

Heatmaps annotate every cell with its value; the p-value heatmap marks
cells at or below the significance threshold with class="significant"
and a heavy outline.  IQR plots draw median, quartile box (linear
interpolation convention), and whiskers at the most extreme values
within 1.5 IQR of the box.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import ParameterError
from .stats import CellStats, stats_to_dict

REPORT_FORMATS = ("csv", "json", "svg-heatmap", "svg-iqr")

_CELL = 64
_PAD_L = 70
_PAD_T = 50
_FONT = "font-family='monospace' font-size='11'"


def _lerp_color(a, b, t):
    return tuple(round(x + (y - x) * t) for x, y in zip(a, b))


def _heat_color(t: float) -> str:
    t = min(max(t, 0.0), 1.0)
    lo, mid, hi = (40, 40, 90), (40, 120, 150), (250, 230, 80)
    c = _lerp_color(lo, mid, t * 2) if t < 0.5 else _lerp_color(mid, hi, (t - 0.5) * 2)
    return f"rgb({c[0]},{c[1]},{c[2]})"


def _grid(stats: list[CellStats]):
    rs = sorted({c.r for c in stats})
    ss = sorted({c.s for c in stats})
    by_key = {(c.r, c.s): c for c in stats}
    return rs, ss, by_key


def _svg_heatmap(stats: list[CellStats], value_of, fmt_value, title: str,
                 highlight=None) -> str:
    rs, ss, by_key = _grid(stats)
    width = _PAD_L + _CELL * len(ss) + 20
    height = _PAD_T + _CELL * len(rs) + 30
    vals = [value_of(c) for c in stats if value_of(c) is not None]
    vmin = min(vals) if vals else 0.0
    vmax = max(vals) if vals else 1.0
    span = (vmax - vmin) or 1.0
    parts = [f"<svg xmlns='http://www.w3.org/2000/svg' width='{width}' height='{height}'>",
             f"<text x='{_PAD_L}' y='20' {_FONT}>{title}</text>",
             f"<text x='8' y='{_PAD_T - 8}' {_FONT}>r \\ s</text>"]
    for j, s in enumerate(ss):
        parts.append(f"<text x='{_PAD_L + j * _CELL + 6}' y='{_PAD_T - 8}' {_FONT}>{s}</text>")
    for i, r in enumerate(rs):
        y = _PAD_T + i * _CELL
        parts.append(f"<text x='8' y='{y + _CELL // 2}' {_FONT}>{r}</text>")
        for j, s in enumerate(ss):
            x = _PAD_L + j * _CELL
            cell = by_key.get((r, s))
            v = None if cell is None else value_of(cell)
            if v is None:
                parts.append(f"<rect x='{x}' y='{y}' width='{_CELL - 2}' height='{_CELL - 2}' "
                             f"fill='rgb(230,230,230)'/>")
                continue
            marked = highlight is not None and highlight(cell)
            klass = " class='significant'" if marked else ""
            stroke = "stroke='rgb(200,30,30)' stroke-width='3'" if marked else "stroke='white' stroke-width='1'"
            parts.append(f"<rect{klass} x='{x}' y='{y}' width='{_CELL - 2}' height='{_CELL - 2}' "
                         f"fill='{_heat_color((v - vmin) / span)}' {stroke}/>")
            parts.append(f"<text x='{x + 4}' y='{y + _CELL // 2 + 4}' {_FONT}>{fmt_value(v)}</text>")
    parts.append("</svg>")
    return "\n".join(parts)


def _svg_iqr(stats: list[CellStats], title: str) -> str:
    cells = [c for c in sorted(stats, key=lambda c: (c.r, c.s)) if c.values]
    n = len(cells)
    width = _PAD_L + 40 * max(n, 1) + 20
    height = 360
    plot_h = 260
    y0 = _PAD_T + plot_h
    parts = [f"<svg xmlns='http://www.w3.org/2000/svg' width='{width}' height='{height}'>",
             f"<text x='{_PAD_L}' y='20' {_FONT}>{title}</text>"]
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        y = y0 - frac * plot_h
        parts.append(f"<line x1='{_PAD_L - 4}' y1='{y}' x2='{width - 12}' y2='{y}' "
                     f"stroke='rgb(220,220,220)'/>")
        parts.append(f"<text x='8' y='{y + 4}' {_FONT}>{frac:.2f}</text>")
    for k, c in enumerate(cells):
        v = np.asarray(c.values, dtype=np.float64)
        q1, med, q3 = (float(np.percentile(v, q)) for q in (25, 50, 75))
        iqr = q3 - q1
        lo = float(v[v >= q1 - 1.5 * iqr].min())
        hi = float(v[v <= q3 + 1.5 * iqr].max())
        x = _PAD_L + 40 * k + 10
        sy = lambda val: y0 - min(max(val, 0.0), 1.0) * plot_h
        parts.append(f"<g class='iqr' data-r='{c.r}' data-s='{c.s}'>")
        parts.append(f"<line x1='{x + 10}' y1='{sy(lo)}' x2='{x + 10}' y2='{sy(hi)}' stroke='black'/>")
        parts.append(f"<rect x='{x}' y='{sy(q3)}' width='20' height='{max(sy(q1) - sy(q3), 1)}' "
                     f"fill='rgb(120,160,200)' stroke='black'/>")
        parts.append(f"<line x1='{x}' y1='{sy(med)}' x2='{x + 20}' y2='{sy(med)}' "
                     f"stroke='black' stroke-width='2'/>")
        parts.append(f"<text x='{x - 4}' y='{y0 + 16}' {_FONT}>{c.r},{c.s}</text>")
        parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts)


def emit_reports(stats: list[CellStats], fmt: str, out_dir,
                 significance: float = 0.05, alpha: float = 0.95) -> list[Path]:
    """Write report files for one format; returns the paths written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        path = out / "stats.csv"
        lines = ["r,s,n,mean_iou,std,ci_half_width,percent_increase,p_value"]
        for c in sorted(stats, key=lambda c: (c.r, c.s)):
            pct = "" if c.percent_increase is None else f"{c.percent_increase:.6g}"
            p = "" if c.p_value is None else f"{c.p_value:.6g}"
            lines.append(f"{c.r},{c.s},{c.n},{c.mean:.6g},{c.std:.6g},"
                         f"{c.ci_half_width:.6g},{pct},{p}")
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return [path]
    if fmt == "json":
        path = out / "stats.json"
        path.write_text(json.dumps(stats_to_dict(stats, alpha), indent=2, sort_keys=True) + "\n",
                        encoding="utf-8")
        return [path]
    if fmt == "svg-heatmap":
        paths = []
        specs = [
            ("heatmap_mean_iou.svg", lambda c: c.mean, lambda v: f"{v:.3f}",
             "mean IoU by (r, s)", None),
            ("heatmap_percent_increase.svg", lambda c: c.percent_increase,
             lambda v: f"{v:+.1f}%", "percent increase over s=0 baseline", None),
            ("heatmap_p_value.svg", lambda c: c.p_value, lambda v: f"{v:.3f}",
             f"one-sided p-value vs s=0 (p <= {significance} highlighted)",
             lambda c: c.p_value is not None and c.p_value <= significance),
        ]
        for name, value_of, fmt_value, title, highlight in specs:
            path = out / name
            path.write_text(_svg_heatmap(stats, value_of, fmt_value, title, highlight),
                            encoding="utf-8")
            paths.append(path)
        return paths
    if fmt == "svg-iqr":
        path = out / "iqr_mean_iou.svg"
        path.write_text(_svg_iqr(stats, "mean IoU per (r, s) cell"), encoding="utf-8")
        return [path]
    raise ParameterError(f"unknown report format {fmt!r}; expected one of {REPORT_FORMATS}")
