"""SVG rendering of real loci in the surface chart."""

from __future__ import annotations

import numpy as np

from .quadric import chart_map

PALETTE = ("#1f5fa8", "#c0392b", "#2e8b57", "#8e44ad", "#d35400")


def _split_polyline(uv, jump):
    """Break a chart polyline where it wraps around the domain."""
    d = np.abs(np.diff(uv, axis=0)).max(axis=1)
    cuts = np.nonzero(d > jump)[0] + 1
    return np.split(uv, cuts)


def render_chart(X, loops, sections=(), aux_sections=(), orientation=None,
                 width: int = 640, height: int = 480, arrows_per_loop: int = 4) -> str:
    """Chart domain with loops, orientation arrows, D-sections (solid), auxiliary sections (dashed).

    ``orientation`` is an OrientationAssignment (signs relative to traversal)
    or None for the traversal direction.
    """
    chart = chart_map(X)
    (u0, u1), (v0, v1) = chart.domain
    pad = 20

    def to_px(uv):
        x = pad + (uv[:, 0] - u0) / (u1 - u0) * (width - 2 * pad)
        y = height - pad - (uv[:, 1] - v0) / (v1 - v0) * (height - 2 * pad)
        return np.stack([x, y], axis=1)

    def path(uv, style):
        out = []
        for piece in _split_polyline(uv, 0.5 * min(u1 - u0, v1 - v0)):
            if len(piece) < 2:
                continue
            pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in to_px(piece))
            out.append(f'<polyline points="{pts}" fill="none" {style}/>')
        return out

    body = [f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" '
            'fill="none" stroke="#888" stroke-width="1"/>']
    for sec in sections:
        body += path(sec.chart, 'stroke="#333" stroke-width="1.2"')
    for sec in aux_sections:
        body += path(sec.chart, 'stroke="#777" stroke-width="1" stroke-dasharray="5,4"')
    for k, lp in enumerate(loops):
        color = PALETTE[k % len(PALETTE)]
        body += path(lp.chart, f'stroke="{color}" stroke-width="2"')
        n = len(lp.chart)
        for j in range(arrows_per_loop):
            i = (j * n) // arrows_per_loop
            sgn = 1 if orientation is None else int(orientation.signs[k][i]) or 1
            a, b = lp.chart[i], lp.chart[(i + sgn * 3) % n]
            if np.abs(b - a).max() > 0.5 * min(u1 - u0, v1 - v0):
                continue
            pa, pb = to_px(np.array([a, b]))
            d = pb - pa
            if np.linalg.norm(d) == 0:
                continue
            d = d / np.linalg.norm(d) * 9
            nrm = np.array([-d[1], d[0]]) * 0.5
            tip = pa + d
            tri = [tip, pa - nrm, pa + nrm]
            pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in tri)
            body.append(f'<polygon points="{pts}" fill="{color}"/>')
        mid = to_px(lp.chart[n // 2:n // 2 + 1])[0]
        body.append(f'<text x="{mid[0] + 6:.1f}" y="{mid[1] - 6:.1f}" font-size="12" '
                    f'fill="{color}">c{k + 1}</text>')
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" '
            f'height="{height}" viewBox="0 0 {width} {height}">')
    title = f'<title>{X.kind} chart</title>'
    return "\n".join([head, title, *body, "</svg>"]) + "\n"
