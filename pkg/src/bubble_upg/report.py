"""CSV, Markdown and SVG serialization of study results."""
from __future__ import annotations

import csv
import io
import math
from typing import Optional, Sequence

import numpy as np

from .study import StudyResult

BASE_COLUMNS = (
    "n", "h", "epsilon", "disc_inf", "l2_full", "l2_sub", "h1_full", "h1_sub",
    "order_disc_inf", "order_l2_full", "order_l2_sub", "order_h1_full", "order_h1_sub",
    "disc_inf_sub", "order_disc_inf_sub", "thm_bound", "hypothesis_flag", "status",
)
PLOT_COLUMNS = ("disc_inf", "l2_full", "l2_sub", "h1_full", "h1_sub", "disc_inf_sub")
SVG_WIDTH, SVG_HEIGHT = 800, 600


def fmt(v) -> str:
    """Locale-free, round-trippable text; empty for missing values."""
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer, str)):
        return str(v)
    v = float(v)
    if not math.isfinite(v):
        return "" if math.isnan(v) else ("inf" if v > 0 else "-inf")
    return "%.17g" % v


def _extra_names(result: StudyResult) -> list:
    names = []
    for r in result.rows:
        for k in r.extra:
            if k not in names:
                names.append(k)
    return names


def _table(result: StudyResult):
    extra = _extra_names(result)
    header = list(BASE_COLUMNS)
    for k in extra:
        header += [k, f"order_{k}"]
    rows = []
    for i, r in enumerate(result.rows):
        def order(col):
            # the order between rows i-1 and i is reported on row i
            return result.orders.get(col, [])[i - 1] if i > 0 else None

        cells = {
            "n": r.n, "h": r.h, "epsilon": r.epsilon, "thm_bound": r.thm_bound,
            "hypothesis_flag": r.hypothesis_flag, "status": r.status,
        }
        for col in PLOT_COLUMNS:
            cells[col] = getattr(r, col)
            cells[f"order_{col}"] = order(col)
        for k in extra:
            cells[k] = r.extra.get(k)
            cells[f"order_{k}"] = order(k)
        rows.append([cells[c] for c in header])
    return header, rows


def to_csv(result: StudyResult) -> str:
    header, rows = _table(result)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _md_cell(v) -> str:
    if v is None or (isinstance(v, (float, np.floating)) and math.isnan(v)):
        return "-"
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return f"{v:.3e}" if v != 0 and (abs(v) < 1e-2 or abs(v) >= 1e3) else f"{v:.4g}"
    return fmt(v)


def markdown_table(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    for row in rows:
        lines.append("| " + " | ".join(_md_cell(v) for v in row) + " |")
    return "\n".join(lines) + "\n"


def to_markdown(result: StudyResult, title: Optional[str] = None) -> str:
    header, rows = _table(result)
    keep = [i for i, c in enumerate(header) if c in ("n", "h", "epsilon", "status")
            or any(row[i] is not None and not (isinstance(row[i], float) and math.isnan(row[i])) for row in rows)]
    spec = result.spec
    title = title or f"Study: {spec.problem}, {spec.bubble} bubble"
    out = [f"# {title}\n", f"- epsilon policy: {spec.epsilon_policy}" + (
        f" (epsilon = {spec.epsilon:g})" if spec.epsilon_policy == "fixed" else ""),
        f"- beta: {spec.beta}", f"- deltas: {', '.join(str(d) for d in spec.deltas)}", ""]
    out.append(markdown_table([header[i] for i in keep], [[row[i] for i in keep] for row in rows]))
    return "\n".join(out)


def _usable(v) -> bool:
    return v is not None and math.isfinite(v) and v > 0


def to_svg(result: StudyResult) -> str:
    """log2(h) against log2(error): one polyline per error column with data, plus slope-1 and slope-2 guides."""
    series = []
    for col in PLOT_COLUMNS + tuple(_extra_names(result)):
        pts = [(math.log2(r.h), math.log2(v)) for r, v in zip(result.rows, result.column(col)) if _usable(v)]
        if len(pts) >= 2:
            series.append((col, pts))
    xs = [math.log2(r.h) for r in result.rows]
    ys = [p[1] for _, pts in series for p in pts] or [0.0, 1.0]
    x0, x1 = min(xs), max(xs)
    if x1 == x0:
        x1 = x0 + 1.0
    # reference lines anchored at the coarsest mesh, at the top of the data
    top = max(ys)
    refs = [(f"slope {s}", [(x0, top - s * (x1 - x0)), (x1, top)]) for s in (1, 2)]
    all_y = ys + [p[1] for _, pts in refs for p in pts]
    y0, y1 = min(all_y), max(all_y)
    if y1 == y0:
        y1 = y0 + 1.0
    ml, mr, mt, mb = 80, 160, 40, 60
    pw, ph = SVG_WIDTH - ml - mr, SVG_HEIGHT - mt - mb

    def px(x, y):
        return ml + (x - x0) / (x1 - x0) * pw, mt + (y1 - y) / (y1 - y0) * ph

    def points(pts):
        return " ".join("%.2f,%.2f" % px(x, y) for x, y in pts)

    colors = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" '
        f'viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">',
        f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
        f'<text x="{ml + pw / 2:.0f}" y="{SVG_HEIGHT - 15}" text-anchor="middle">log2(h)</text>',
        f'<text x="20" y="{mt + ph / 2:.0f}" transform="rotate(-90 20 {mt + ph / 2:.0f})" '
        'text-anchor="middle">log2(error)</text>',
    ]
    for x in sorted(set(xs)):
        cx, _ = px(x, y0)
        out.append(f'<text x="{cx:.2f}" y="{mt + ph + 18}" text-anchor="middle" font-size="11">{x:g}</text>')
    for k in range(math.ceil(y0), math.floor(y1) + 1, max(1, round((y1 - y0) / 8))):
        _, cy = px(x0, k)
        out.append(f'<text x="{ml - 6}" y="{cy:.2f}" text-anchor="end" font-size="11">{k}</text>')
    for i, (name, pts) in enumerate(series):
        c = colors[i % len(colors)]
        out.append(f'<polyline class="data" data-column="{name}" fill="none" stroke="{c}" points="{points(pts)}"/>')
        out.append(f'<text x="{ml + pw + 8}" y="{mt + 16 * (i + 1)}" fill="{c}" font-size="12">{name}</text>')
    for name, pts in refs:
        out.append(f'<polyline class="reference" data-slope="{name[6:]}" fill="none" stroke="gray" '
                   f'stroke-dasharray="6,4" points="{points(pts)}"/>')
        lx, ly = px(*pts[0])
        out.append(f'<text x="{lx + 4:.2f}" y="{ly - 4:.2f}" fill="gray" font-size="11">{name}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
