"""Static SVG rendering of trajectories over a state-space outline.

Orthographic projection onto a coordinate plane: the body outline is
the 2D convex hull of projected boundary samples, the trajectory a
polyline with a marked start point.  Output is a plain SVG string with
no external dependencies.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .statespace import StateSpace, boundary_samples

__all__ = ["trajectory_svg", "PLANES"]

PLANES = {"xy": (0, 1), "xz": (0, 2), "yz": (1, 2)}

_SIZE = 480
_MARGIN = 40


def trajectory_svg(space: StateSpace, states, plane: str = "xy") -> str:
    """Render projected states over the projected body outline."""
    if plane not in PLANES:
        raise ValueError(f"plane must be one of {sorted(PLANES)}, got {plane!r}")
    ix, iy = PLANES[plane]
    pts = np.asarray(states, dtype=float)[:, [ix, iy]]
    outline = _outline(space, ix, iy)

    extent = max(1.0, np.abs(outline).max(), np.abs(pts).max()) * 1.1
    scale = (_SIZE - 2 * _MARGIN) / (2 * extent)

    def to_px(xy):
        return (
            _SIZE / 2 + xy[0] * scale,
            _SIZE / 2 - xy[1] * scale,
        )

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SIZE}" height="{_SIZE}" '
        f'viewBox="0 0 {_SIZE} {_SIZE}">',
        f'<rect width="{_SIZE}" height="{_SIZE}" fill="white"/>',
        _polygon(outline, to_px, stroke="#999999", fill="#f2f2f2"),
        _polyline(pts, to_px, stroke="#1f77b4"),
    ]
    x0, y0 = to_px(pts[0])
    parts.append(f'<circle cx="{x0:.2f}" cy="{y0:.2f}" r="4" fill="#d62728"/>')
    labels = "xyz"
    parts.append(
        f'<text x="{_MARGIN}" y="{_SIZE - 12}" font-family="monospace" '
        f'font-size="14">{space.name}  plane {labels[ix]}{labels[iy]}</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _outline(space: StateSpace, ix: int, iy: int) -> np.ndarray:
    if space.vertices is not None:
        projected = space.vertices[:, [ix, iy]]
    else:
        projected = boundary_samples(space, 1500)[:, [ix, iy]]
    try:
        hull = ConvexHull(projected)
        return projected[hull.vertices]
    except QhullError:  # degenerate projection (a segment)
        lo, hi = projected.min(axis=0), projected.max(axis=0)
        return np.array([lo, hi])


def _polygon(points: np.ndarray, to_px, stroke: str, fill: str) -> str:
    coords = " ".join("{:.2f},{:.2f}".format(*to_px(p)) for p in points)
    return f'<polygon points="{coords}" stroke="{stroke}" fill="{fill}"/>'


def _polyline(points: np.ndarray, to_px, stroke: str) -> str:
    coords = " ".join("{:.2f},{:.2f}".format(*to_px(p)) for p in points)
    return (
        f'<polyline points="{coords}" stroke="{stroke}" stroke-width="1.5" '
        f'fill="none"/>'
    )
