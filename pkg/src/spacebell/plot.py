"""Self-contained SVG line plot of the Bell ratio against detector distance."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 70, 20, 40, 60


def _linear_ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    return [lo + (hi - lo) * k / (n - 1) for k in range(n)]


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def decay_svg(z, ratio, log_x: bool, title: str = "Bell value vs detector distance") -> str:
    xs = [math.log10(v) for v in z] if log_x else [float(v) for v in z]
    ys = [float(v) if math.isfinite(v) else 0.0 for v in ratio]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = 0.0, max(1.0, max(ys))
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def px(x: float) -> float:
        return LEFT + (x - x_lo) / (x_hi - x_lo) * pw

    def py(y: float) -> float:
        return TOP + (1.0 - (y - y_lo) / (y_hi - y_lo)) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2}" y="22" text-anchor="middle" font-family="sans-serif" font-size="15">'
        f"{escape(title)}</text>",
        f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]

    if log_x:
        x_ticks = list(range(math.ceil(x_lo - 1e-9), math.floor(x_hi + 1e-9) + 1))
        if len(x_ticks) < 2:
            x_ticks = _linear_ticks(x_lo, x_hi)
        labels = [f"1e{t:g}" if float(t).is_integer() else f"{10**t:.3g}" for t in x_ticks]
    else:
        x_ticks = _linear_ticks(x_lo, x_hi)
        labels = [f"{t:.3g}" for t in x_ticks]
    for t, label in zip(x_ticks, labels):
        x = px(t)
        out.append(f'<line x1="{_fmt(x)}" y1="{TOP + ph}" x2="{_fmt(x)}" y2="{TOP + ph + 5}" stroke="black"/>')
        out.append(
            f'<text x="{_fmt(x)}" y="{TOP + ph + 20}" text-anchor="middle" font-family="sans-serif" '
            f'font-size="11">{escape(label)}</text>'
        )
    for t in _linear_ticks(y_lo, y_hi):
        y = py(t)
        out.append(f'<line x1="{LEFT - 5}" y1="{_fmt(y)}" x2="{LEFT}" y2="{_fmt(y)}" stroke="black"/>')
        out.append(
            f'<text x="{LEFT - 8}" y="{_fmt(y + 4)}" text-anchor="end" font-family="sans-serif" '
            f'font-size="11">{t:.3g}</text>'
        )
    out.append(
        f'<text x="{LEFT + pw / 2}" y="{HEIGHT - 15}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="12">z (um){" [log scale]" if log_x else ""}</text>'
    )
    out.append(
        f'<text x="18" y="{TOP + ph / 2}" text-anchor="middle" font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 18 {TOP + ph / 2})">S(z) / S(z_min)</text>'
    )
    pts = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in zip(xs, ys))
    out.append(f'<polyline points="{pts}" fill="none" stroke="#1f77b4" stroke-width="2"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
