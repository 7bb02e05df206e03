"""Tiny dependency-free SVG plotting: line charts and labeled scatters.

Enough for the experiment reports (error curves, kernel profiles, cluster
pictures); not a general plotting library.
"""

import math

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
           "#8c564b", "#17becf", "#7f7f7f")

_W, _H, _PAD = 640, 420, 54


def _ticks(lo, hi, count=6):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / count
    mag = 10.0 ** math.floor(math.log10(raw))
    step = min((m for m in (1, 2, 5, 10) if m * mag >= raw), default=10) * mag
    t = math.ceil(lo / step) * step
    out = []
    while t <= hi + 1e-12 * step:
        out.append(t)
        t += step
    return out


class _Frame:
    def __init__(self, xlo, xhi, ylo, yhi):
        self.xlo, self.xhi = xlo, xhi
        self.ylo, self.yhi = ylo, yhi

    def x(self, v):
        return _PAD + (v - self.xlo) / (self.xhi - self.xlo) * (_W - 2 * _PAD)

    def y(self, v):
        return _H - _PAD - (v - self.ylo) / (self.yhi - self.ylo) * (_H - 2 * _PAD)


def _header(title):
    return [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
            f'viewBox="0 0 {_W} {_H}">',
            f'<rect width="{_W}" height="{_H}" fill="white"/>',
            f'<text x="{_W/2}" y="20" text-anchor="middle" font-size="14" '
            f'font-family="sans-serif">{title}</text>']


def _axes(fr, xlabel, ylabel, ylog):
    parts = [f'<rect x="{_PAD}" y="{_PAD}" width="{_W-2*_PAD}" height="{_H-2*_PAD}" '
             'fill="none" stroke="#333"/>']
    for t in _ticks(fr.xlo, fr.xhi):
        parts.append(f'<line x1="{fr.x(t):.1f}" y1="{_H-_PAD}" x2="{fr.x(t):.1f}" '
                     f'y2="{_H-_PAD+4}" stroke="#333"/>')
        parts.append(f'<text x="{fr.x(t):.1f}" y="{_H-_PAD+16}" text-anchor="middle" '
                     f'font-size="10" font-family="sans-serif">{t:g}</text>')
    for t in _ticks(fr.ylo, fr.yhi):
        label = f"1e{t:g}" if ylog else f"{t:g}"
        parts.append(f'<line x1="{_PAD-4}" y1="{fr.y(t):.1f}" x2="{_PAD}" '
                     f'y2="{fr.y(t):.1f}" stroke="#333"/>')
        parts.append(f'<text x="{_PAD-6}" y="{fr.y(t)+3:.1f}" text-anchor="end" '
                     f'font-size="10" font-family="sans-serif">{label}</text>')
    parts.append(f'<text x="{_W/2}" y="{_H-10}" text-anchor="middle" font-size="11" '
                 f'font-family="sans-serif">{xlabel}</text>')
    parts.append(f'<text x="14" y="{_H/2}" text-anchor="middle" font-size="11" '
                 f'font-family="sans-serif" transform="rotate(-90 14 {_H/2})">{ylabel}</text>')
    return parts


def line_plot(path, xs, series, title="", xlabel="", ylabel="", ylog=False,
              floor=1e-16):
    """Write a multi-series line chart; series maps name -> y values."""
    xs = list(map(float, xs))
    ys_all = []
    cooked = {}
    for name, ys in series.items():
        vals = [math.log10(max(abs(v), floor)) if ylog else float(v) for v in ys]
        cooked[name] = vals
        ys_all.extend(vals)
    fr = _Frame(min(xs), max(xs), min(ys_all), max(ys_all))
    parts = _header(title) + _axes(fr, xlabel, ylabel, ylog)
    for i, (name, vals) in enumerate(cooked.items()):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{fr.x(x):.1f},{fr.y(v):.1f}" for x, v in zip(xs, vals))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                     'stroke-width="1.5"/>')
        parts.append(f'<text x="{_W-_PAD+4}" y="{_PAD+14*(i+1)}" font-size="11" '
                     f'font-family="sans-serif" fill="{color}">{name}</text>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts))


def scatter_plot(path, pts, labels=None, title="", xlabel="x", ylabel="y",
                 marks=None):
    """Write a 2-d scatter, colored by integer label; marks are ring overlays."""
    xs = [float(p[0]) for p in pts]
    ys = [float(p[1]) for p in pts]
    mx = (max(xs) - min(xs)) * 0.05 + 1e-9
    my = (max(ys) - min(ys)) * 0.05 + 1e-9
    fr = _Frame(min(xs) - mx, max(xs) + mx, min(ys) - my, max(ys) + my)
    parts = _header(title) + _axes(fr, xlabel, ylabel, False)
    for i, (x, y) in enumerate(zip(xs, ys)):
        lab = 0 if labels is None else int(labels[i])
        color = "#bbbbbb" if lab < 0 else PALETTE[lab % len(PALETTE)]
        parts.append(f'<circle cx="{fr.x(x):.1f}" cy="{fr.y(y):.1f}" r="1.8" '
                     f'fill="{color}"/>')
    for x, y in (marks or []):
        parts.append(f'<circle cx="{fr.x(float(x)):.1f}" cy="{fr.y(float(y)):.1f}" '
                     'r="6" fill="none" stroke="#000" stroke-width="1.5"/>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts))
