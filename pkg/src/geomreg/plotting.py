"""Deterministic SVG figures built from lines, circles and polylines only.

Coordinates are written with three decimals so identical inputs give
byte-identical files.
"""

import numpy as np

from .errors import ValidationError

WIDTH = 480
HEIGHT = 480
PLOT_KINDS = ("sphere-geodesic", "shape-sequence", "dimension-bars", "energy-trace")


def ramp(t):
    """Blue (t = 0) to red (t = 1)."""
    t = min(max(float(t), 0.0), 1.0)
    return f"#{round(255 * t):02x}00{round(255 * (1 - t)):02x}"


def _n(v):
    s = f"{float(v):.3f}"
    return "0.000" if s == "-0.000" else s


class Svg:
    def __init__(self, width=WIDTH, height=HEIGHT, title=""):
        self.width, self.height = width, height
        self.items = []
        if title:
            self.text(width / 2, 20, title, anchor="middle", size=14)

    def line(self, x1, y1, x2, y2, stroke="#000000", width=1.0):
        self.items.append(f'<line x1="{_n(x1)}" y1="{_n(y1)}" x2="{_n(x2)}" y2="{_n(y2)}" '
                          f'stroke="{stroke}" stroke-width="{_n(width)}"/>')

    def circle(self, cx, cy, r, fill="#000000", stroke="none", width=1.0):
        self.items.append(f'<circle cx="{_n(cx)}" cy="{_n(cy)}" r="{_n(r)}" fill="{fill}" '
                          f'stroke="{stroke}" stroke-width="{_n(width)}"/>')

    def polyline(self, pts, stroke="#000000", width=1.0, closed=False):
        pts = np.asarray(pts, float)
        coords = " ".join(f"{_n(x)},{_n(y)}" for x, y in pts)
        tag = "polygon" if closed else "polyline"
        self.items.append(f'<{tag} points="{coords}" fill="none" stroke="{stroke}" '
                          f'stroke-width="{_n(width)}"/>')

    def rect(self, x, y, w, h, fill="#000000"):
        self.items.append(f'<rect x="{_n(x)}" y="{_n(y)}" width="{_n(w)}" height="{_n(h)}" '
                          f'fill="{fill}"/>')

    def text(self, x, y, s, anchor="start", size=11):
        s = str(s).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
        self.items.append(f'<text x="{_n(x)}" y="{_n(y)}" font-family="sans-serif" '
                          f'font-size="{size}" text-anchor="{anchor}">{s}</text>')

    def render(self):
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
                f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">')
        body = [head, f'<rect x="0" y="0" width="{self.width}" height="{self.height}" '
                      'fill="#ffffff"/>'] + self.items + ["</svg>"]
        return "\n".join(body) + "\n"

    def save(self, path):
        with open(path, "w", newline="\n") as f:
            f.write(self.render())


def _frame(lo, hi, margin=40, width=WIDTH, height=HEIGHT):
    """Affine map from data box [lo, hi] to the canvas, y pointing up."""
    lo, hi = np.asarray(lo, float), np.asarray(hi, float)
    span = np.where(hi - lo > 0, hi - lo, 1.0)

    def to_canvas(p):
        p = np.atleast_2d(np.asarray(p, float))
        x = margin + (p[:, 0] - lo[0]) / span[0] * (width - 2 * margin)
        y = height - margin - (p[:, 1] - lo[1]) / span[1] * (height - 2 * margin)
        return np.column_stack([x, y])

    return to_canvas


def _view_basis(center):
    """Two orthonormal screen axes perpendicular to the viewing direction."""
    c = center / np.linalg.norm(center)
    up = np.array([0.0, 0.0, 1.0])
    if abs(c @ up) > 0.9:
        up = np.array([0.0, 1.0, 0.0])
    e2 = up - (up @ c) * c
    e2 /= np.linalg.norm(e2)
    e1 = np.cross(e2, c)
    return c, e1, e2


def _trace(model, steps=60):
    """Geodesic of ``model`` as the first raw covariate runs over [0, 1]."""
    X = np.zeros((steps + 1, model.input_dim))
    X[:, 0] = np.linspace(0.0, 1.0, steps + 1)
    return model.predict(X)


def sphere_geodesic(data, estimate=None, truth=None, title="geodesic regression on S^2"):
    """Orthographic view of data on S^2 with the true and estimated geodesics.

    The view looks straight at the estimated (else true, else Frechet) base
    point; hidden points on the far hemisphere are drawn hollow.
    """
    if data.Y.shape[1] != 3:
        raise ValidationError(
            f"sphere-geodesic needs points on S^2 (ambient dimension 3), got {data.Y.shape[1]}")
    ref = estimate if estimate is not None else truth
    center = ref.mu if ref is not None else data.Y.mean(axis=0)
    c, e1, e2 = _view_basis(center)
    to_canvas = _frame([-1.1, -1.1], [1.1, 1.1])

    def project(P):
        P = np.atleast_2d(P)
        return to_canvas(np.column_stack([P @ e1, P @ e2])), P @ c

    svg = Svg(title=title)
    t = np.linspace(0.0, 2 * np.pi, 181)
    svg.polyline(to_canvas(np.column_stack([np.cos(t), np.sin(t)])), stroke="#808080")
    pts, depth = project(data.Y)
    for (x, y), z in zip(pts, depth):
        if z >= 0:
            svg.circle(x, y, 2.0, fill="#404040")
        else:
            svg.circle(x, y, 2.0, fill="none", stroke="#a0a0a0")
    for model, color in ((truth, "#0000ff"), (estimate, "#ff0000")):
        if model is not None:
            curve, _ = project(_trace(model))
            svg.polyline(curve, stroke=color, width=2.0)
            mx, my = project(model.mu)[0][0]
            svg.circle(mx, my, 4.0, fill=color)
    svg.text(40, HEIGHT - 12, "blue: truth   red: estimate")
    return svg


def shape_sequence(shapes, title="shapes colored by covariate"):
    """Closed outlines, colored on the blue to red ramp by the first covariate."""
    outlines = [np.asarray(s.points, float) for s in shapes.shapes]
    x = np.array([s.covariate[0] if s.covariate.size else i
                  for i, s in enumerate(shapes.shapes)], float)
    span = x.max() - x.min()
    tvals = (x - x.min()) / span if span > 0 else np.zeros_like(x)
    allp = np.vstack(outlines)
    half = np.max(np.abs(allp - allp.mean(axis=0))) * 1.05
    c = allp.mean(axis=0)
    to_canvas = _frame(c - half, c + half)
    svg = Svg(title=title)
    for pts, tv in zip(outlines, tvals):
        svg.polyline(to_canvas(pts), stroke=ramp(tv), width=1.0, closed=True)
    svg.text(40, HEIGHT - 12, f"blue: x = {x.min():g}   red: x = {x.max():g}")
    return svg


def dimension_bars(original, retained, candidates=None, title="dimensionality"):
    """Bars for the original dimension, the candidate columns and the retained columns."""
    bars = [("original", original, "#0000ff")]
    if candidates is not None:
        bars.append(("columns", candidates, "#808080"))
    bars.append(("retained", retained, "#ff0000"))
    top = max(b[1] for b in bars) or 1
    svg = Svg(title=title)
    base = HEIGHT - 60
    slot = (WIDTH - 80) / len(bars)
    svg.line(40, base, WIDTH - 40, base)
    for i, (name, val, color) in enumerate(bars):
        h = (base - 60) * val / top
        x = 40 + i * slot + slot * 0.2
        svg.rect(x, base - h, slot * 0.6, h, fill=color)
        svg.text(x + slot * 0.3, base - h - 6, str(int(val)), anchor="middle")
        svg.text(x + slot * 0.3, base + 18, name, anchor="middle")
    return svg


def energy_trace(trace, title="objective per iteration"):
    trace = np.asarray(trace, float)
    it = np.arange(trace.size, dtype=float)
    to_canvas = _frame([0.0, trace.min()], [max(trace.size - 1, 1), trace.max()], margin=60)
    svg = Svg(title=title)
    svg.line(60, HEIGHT - 60, WIDTH - 60, HEIGHT - 60)
    svg.line(60, HEIGHT - 60, 60, 60)
    pts = to_canvas(np.column_stack([it, trace]))
    svg.polyline(pts, stroke="#0000ff", width=1.5)
    for x, y in pts:
        svg.circle(x, y, 2.0, fill="#0000ff")
    svg.text(WIDTH / 2, HEIGHT - 24, "iteration", anchor="middle")
    svg.text(64, 54, f"max {trace.max():.6g}")
    svg.text(64, HEIGHT - 66, f"min {trace.min():.6g}")
    return svg
