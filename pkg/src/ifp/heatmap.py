"""Minimal self-rendered SVG heatmaps, no plotting dependency.

Good enough to eyeball reconstructed maps: one rect per pixel, a small
legend bar, and a title. Diverging palette for signed quantities (blue
through white to red), sequential for non-negative ones.
"""

import numpy as np

__all__ = ["render_heatmap_svg"]

_CELL = 28
_PAD = 14
_LEGEND_H = 46

_DIV_LOW = (38, 80, 180)
_DIV_MID = (245, 245, 245)
_DIV_HIGH = (185, 30, 40)
_SEQ_LOW = (247, 247, 247)
_SEQ_HIGH = (13, 110, 103)


def _lerp(a, b, t):
    return tuple(round(x + (y - x) * t) for x, y in zip(a, b))


def _color(value, vmin, vmax, diverging):
    span = vmax - vmin
    t = 0.5 if span == 0.0 else (value - vmin) / span
    t = min(1.0, max(0.0, t))
    if diverging:
        if t < 0.5:
            rgb = _lerp(_DIV_LOW, _DIV_MID, t * 2.0)
        else:
            rgb = _lerp(_DIV_MID, _DIV_HIGH, (t - 0.5) * 2.0)
    else:
        rgb = _lerp(_SEQ_LOW, _SEQ_HIGH, t)
    return "#%02x%02x%02x" % rgb


def render_heatmap_svg(values, title, vmin=None, vmax=None, diverging=False):
    """Render a 2D array as an SVG string.

    Parameters
    ----------
    values : array-like, shape (height, width)
    title : str
    vmin, vmax : float, optional
        Color range; defaults to the data range (symmetric about zero for
        diverging palettes).
    diverging : bool
        Use the signed blue-white-red palette.
    """
    grid = np.asarray(values, dtype=float)
    if grid.ndim != 2:
        raise ValueError(f"heatmap needs a 2D array, got shape {grid.shape}")
    h, w = grid.shape
    if vmin is None or vmax is None:
        lo, hi = float(grid.min()), float(grid.max())
        if diverging:
            bound = max(abs(lo), abs(hi), 1e-12)
            lo, hi = -bound, bound
        elif lo == hi:
            hi = lo + 1.0
        vmin = lo if vmin is None else vmin
        vmax = hi if vmax is None else vmax
    width_px = w * _CELL + 2 * _PAD
    height_px = h * _CELL + 2 * _PAD + 22 + _LEGEND_H
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width_px}" height="{height_px}" '
        f'viewBox="0 0 {width_px} {height_px}">',
        f'<rect width="{width_px}" height="{height_px}" fill="white"/>',
        f'<text x="{_PAD}" y="18" font-family="sans-serif" font-size="13">{title}</text>',
    ]
    top = 26
    for iy in range(h):
        for ix in range(w):
            color = _color(grid[iy, ix], vmin, vmax, diverging)
            x = _PAD + ix * _CELL
            y = top + iy * _CELL
            parts.append(
                f'<rect x="{x}" y="{y}" width="{_CELL}" height="{_CELL}" '
                f'fill="{color}" stroke="#888" stroke-width="0.5">'
                f"<title>({ix},{iy}) = {grid[iy, ix]:.6g}</title></rect>"
            )
    # legend: a strip of sample swatches plus range labels
    ly = top + h * _CELL + 12
    swatches = 24
    strip_w = w * _CELL
    for i in range(swatches):
        t = i / (swatches - 1)
        color = _color(vmin + t * (vmax - vmin), vmin, vmax, diverging)
        x = _PAD + i * strip_w / swatches
        parts.append(
            f'<rect x="{x:.1f}" y="{ly}" width="{strip_w / swatches + 0.5:.1f}" height="10" fill="{color}"/>'
        )
    parts.append(
        f'<text x="{_PAD}" y="{ly + 24}" font-family="sans-serif" font-size="11">{vmin:.3g}</text>'
    )
    parts.append(
        f'<text x="{_PAD + strip_w}" y="{ly + 24}" font-family="sans-serif" font-size="11" '
        f'text-anchor="end">{vmax:.3g}</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
