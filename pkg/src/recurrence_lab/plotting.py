"""Plain-text SVG charts of return-time grids.

Left panel: one polyline per eps of the median log R_n against n, with the
fitted line dashed on top. Right panel: fitted slope against log2(eps).
The slopes come from :func:`~recurrence_lab.estimators.entropy_from_return_times`,
the same fit that produces the JSON report.
"""
from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from . import estimators as est
from .recurrence import read_grids_csv

WIDTH, HEIGHT = 960, 420
PANEL = (60, 50, 420, 320)          # x, y, w, h of the left panel
PANEL_R = (540, 50, 380, 320)
COLORS = ("#1b6ca8", "#d1495b", "#2e933c", "#edae49", "#6a4c93", "#00798c",
          "#8d6a9f", "#c5283d", "#3d5a80", "#7a9e7e")


def _scale(lo, hi, a, b):
    if hi == lo:
        hi = lo + 1.0
    return lambda v: a + (v - lo) * (b - a) / (hi - lo)


def _axes(x, y, w, h, xr, yr, xlabel, ylabel):
    parts = [f'<rect x="{x}" y="{y}" width="{w}" height="{h}" fill="none" stroke="#333"/>']
    for frac in (0.0, 0.5, 1.0):
        xv = xr[0] + frac * (xr[1] - xr[0])
        yv = yr[0] + frac * (yr[1] - yr[0])
        parts.append(f'<text x="{x + frac * w:.1f}" y="{y + h + 16}" font-size="11" '
                     f'text-anchor="middle">{xv:.3g}</text>')
        parts.append(f'<text x="{x - 6}" y="{y + h - frac * h + 4:.1f}" font-size="11" '
                     f'text-anchor="end">{yv:.3g}</text>')
    parts.append(f'<text x="{x + w / 2}" y="{y + h + 34}" font-size="12" '
                 f'text-anchor="middle">{escape(xlabel)}</text>')
    parts.append(f'<text x="{x - 44}" y="{y + h / 2}" font-size="12" text-anchor="middle" '
                 f'transform="rotate(-90 {x - 44} {y + h / 2})">{escape(ylabel)}</text>')
    return parts


def _polyline(points, color, dashed=False, cls=""):
    coords = " ".join(f"{px:.2f},{py:.2f}" for px, py in points)
    dash = ' stroke-dasharray="5,4"' if dashed else ""
    return (f'<polyline class="{cls}" points="{coords}" fill="none" stroke="{color}" '
            f'stroke-width="1.6"{dash}/>')


def grid_svg(grids, title: str = "return-time growth") -> str:
    """SVG text for a list of grids sharing their ladders."""
    report = est.entropy_from_return_times(grids, max_censored=1.0)
    fits = {f.eps: f for f in report.per_eps_fits}
    g0 = grids[0]
    ns = np.array(g0.n_ladder, dtype=float)
    medians = {}
    for b, eps in enumerate(g0.eps_ladder):
        vals, _ = est.pooled_log_returns(grids, b)
        med = np.median(vals, axis=0)
        keep = np.isfinite(med)
        if keep.any():
            medians[eps] = (ns[keep], med[keep])
    if not medians:
        raise ValueError("every cell is censored; nothing to plot")

    ys = np.concatenate([m for _, m in medians.values()])
    x0, y0, w, h = PANEL
    sx = _scale(ns.min(), ns.max(), x0, x0 + w)
    ylo, yhi = float(ys.min()), float(ys.max())
    sy = _scale(ylo, yhi, y0 + h, y0)

    slope_txt = "; ".join(f"eps={eps!r}: slope={fits[eps].slope!r}"
                          for eps in g0.eps_ladder if eps in fits)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'viewBox="0 0 {WIDTH} {HEIGHT}">',
           f"<title>{escape(title)} | {escape(slope_txt)}</title>",
           f'<text x="{WIDTH / 2}" y="24" font-size="15" text-anchor="middle">'
           f"{escape(title)}</text>"]
    out += _axes(x0, y0, w, h, (ns.min(), ns.max()), (ylo, yhi), "n",
                 "median log R_n")
    for i, eps in enumerate(g0.eps_ladder):
        if eps not in medians:
            continue
        color = COLORS[i % len(COLORS)]
        xs, ms = medians[eps]
        out.append(_polyline([(sx(a), sy(m)) for a, m in zip(xs, ms)], color,
                             cls="median"))
        if eps in fits:
            f = fits[eps]
            line = [(sx(a), sy(min(max(f.intercept + f.slope * a, ylo), yhi)))
                    for a in (ns.min(), ns.max())]
            out.append(_polyline(line, color, dashed=True, cls="fit"))
            out.append(f'<text x="{x0 + 8}" y="{y0 + 16 + 14 * i}" font-size="11" '
                       f'fill="{color}" data-eps="{eps!r}" data-slope="{f.slope!r}">'
                       f"eps={eps:.4g} slope={f.slope:.6f}</text>")

    if fits:
        x1, y1, w1, h1 = PANEL_R
        le = np.log2([f.eps for f in fits.values()])
        sl = np.array([f.slope for f in fits.values()])
        sx2 = _scale(le.min(), le.max(), x1, x1 + w1)
        sy2 = _scale(float(sl.min()) - 0.05, float(sl.max()) + 0.05, y1 + h1, y1)
        out += _axes(x1, y1, w1, h1, (le.min(), le.max()),
                     (float(sl.min()) - 0.05, float(sl.max()) + 0.05),
                     "log2 eps", "fitted slope")
        order = np.argsort(le)
        out.append(_polyline([(sx2(le[k]), sy2(sl[k])) for k in order], "#333",
                             cls="slope-vs-eps"))
    out.append("</svg>")
    return "\n".join(out) + "\n"


def plot(csv_path, out_path, title: str | None = None) -> Path:
    """Render the grids stored in ``csv_path`` to ``out_path``.

    Raises ``ValueError`` for an empty or malformed CSV; nothing is written
    in that case.
    """
    grids = read_grids_csv(csv_path)
    text = grid_svg(grids, title or Path(csv_path).name)
    out = Path(out_path)
    out.write_text(text, encoding="utf-8")
    return out


def title_slopes(svg_text: str) -> dict:
    """Parse the ``eps -> slope`` pairs back out of an SVG title."""
    start = svg_text.index("<title>") + len("<title>")
    body = svg_text[start:svg_text.index("</title>", start)]
    pairs = {}
    for item in body.rsplit(" | ", 1)[1].split(";"):
        item = item.strip()
        if not item:
            continue
        e, s = item.split(": ")
        pairs[float(e.split("=")[1])] = float(s.split("=")[1])
    return pairs


__all__ = ["grid_svg", "plot", "title_slopes"]
