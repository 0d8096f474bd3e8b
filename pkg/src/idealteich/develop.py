"""Planar development of a cusp link surface, written as SVG."""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

from .metrics import REGULAR_TOL, RealizedStructure
from .pattern import analyze
from .teich import InternalInconsistency

__all__ = ["DevelopmentLayout", "develop_layout", "layout_to_svg", "develop_svg"]

Point = tuple[float, float]
SIDE_TOL = 1e-9


@dataclass(frozen=True)
class DevelopmentLayout:
    cusp: int
    # (tet, vertex) -> {w: planar position of the corner on edge {vertex, w}}
    placements: dict
    order: tuple[tuple[int, int], ...]  # BFS order, seed first
    markers: tuple[tuple[Point, int, float], ...]  # (position, link vertex, theta)
    max_side_error: float


def _third_point(p: Point, q: Point, dp: float, dq: float, side: float) -> Point:
    """Point at distance dp from p and dq from q, left of p->q if side > 0."""
    bx, by = q[0] - p[0], q[1] - p[1]
    base = math.hypot(bx, by)
    a = (dp * dp - dq * dq + base * base) / (2 * base)
    h = math.sqrt(max(dp * dp - a * a, 0.0))
    ux, uy = bx / base, by / base
    s = 1.0 if side > 0 else -1.0
    return (p[0] + a * ux - s * h * uy, p[1] + a * uy + s * h * ux)


def _cross(p: Point, q: Point, r: Point) -> float:
    return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])


def develop_layout(rs: RealizedStructure, cusp: int, tol: float = REGULAR_TOL) -> DevelopmentLayout:
    """Lay the link triangles of one cusp out breadth first.

    The seed is the lowest (tet, vertex) slot; its corners w0 < w1 < w2 go to
    (0, 0), (|w0 w1|, 0) and above the axis.  Each later triangle is hung on a
    side shared with an already placed one, on the far side of that side.
    """
    p = rs.pattern
    cx = analyze(p)
    if not 0 <= cusp < len(cx.cusps):
        raise ValueError(f"cusp index {cusp} out of range (pattern has {len(cx.cusps)})")
    tris = sorted(cx.cusps[cusp].corners)

    def side_len(t: int, v: int, f: int) -> float:
        return rs.length(cx.side(t, v, f))

    seed = tris[0]
    t, v = seed
    w0, w1, w2 = (w for w in range(4) if w != v)
    d01 = side_len(t, v, w2)
    a = (0.0, 0.0)
    b = (d01, 0.0)
    c = _third_point(a, b, side_len(t, v, w1), side_len(t, v, w0), 1.0)
    placed = {seed: {w0: a, w1: b, w2: c}}
    order = [seed]
    queue = deque([seed])
    worst = 0.0
    while queue:
        t, v = queue.popleft()
        pos = placed[(t, v)]
        for f in range(4):
            if f == v:
                continue
            nb = p.neighbor(t, f)
            if nb is None:
                continue
            (t2, f2), perm = nb
            key = (t2, perm[v])
            if key in placed:
                continue
            # the shared side joins corners w, u of (t, v); they become perm[w], perm[u]
            w, u = (x for x in range(4) if x not in (v, f))
            v2 = perm[v]
            pw, pu = pos[w], pos[u]
            shared = math.hypot(pu[0] - pw[0], pu[1] - pw[1])
            worst = max(worst, abs(shared - side_len(t2, v2, f2)))
            # distances from the new corner f2 to perm[w] and perm[u]
            dw = side_len(t2, v2, perm[u])
            du = side_len(t2, v2, perm[w])
            away = -_cross(pw, pu, pos[f])
            pf = _third_point(pw, pu, dw, du, away)
            placed[key] = {perm[w]: pw, perm[u]: pu, f2: pf}
            order.append(key)
            queue.append(key)
    if worst > SIDE_TOL:
        raise InternalInconsistency(f"developed shared sides disagree by {worst:.3e}")

    markers = []
    for key in order:
        t, v = key
        for w, pt in sorted(placed[key].items()):
            lv = cx.lv_of[(t, v, w)]
            theta = rs.vertex_angles[lv]
            full = math.pi if cx.lv_boundary[lv] else 2.0 * math.pi
            if abs(theta - full) > tol:
                markers.append((pt, lv, theta))
    return DevelopmentLayout(cusp, placed, tuple(order), tuple(markers), worst)


def _f(x: float) -> str:
    s = f"{x:.6f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def layout_to_svg(layout: DevelopmentLayout) -> str:
    pts = [pt for tri in layout.placements.values() for pt in tri.values()]
    xs = [x for x, _ in pts]
    ys = [-y for _, y in pts]  # SVG y grows downwards
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    span = max(x1 - x0, y1 - y0)
    m = 0.05 * span
    stroke = span / 400.0
    radius = span / 120.0
    font = span / 40.0
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="{_f(x0 - m)} {_f(y0 - m)} {_f(x1 - x0 + 2 * m)} {_f(y1 - y0 + 2 * m)}">',
        f'<g fill="#dde6f0" stroke="#1f3550" stroke-width="{_f(stroke)}" stroke-linejoin="round">',
    ]
    for key in layout.order:
        tri = layout.placements[key]
        coords = " ".join(f"{_f(x)},{_f(-y)}" for _, (x, y) in sorted(tri.items()))
        out.append(f'<polygon data-triangle="{key[0]}:{key[1]}" points="{coords}"/>')
    out.append("</g>")
    if layout.markers:
        out.append(f'<g fill="#b3261e" font-family="sans-serif" font-size="{_f(font)}">')
        labelled = set()
        for (x, y), lv, theta in layout.markers:
            out.append(f'<circle cx="{_f(x)}" cy="{_f(-y)}" r="{_f(radius)}"/>')
            if lv not in labelled:
                labelled.add(lv)
                out.append(
                    f'<text x="{_f(x + 1.5 * radius)}" y="{_f(-y - 1.5 * radius)}">'
                    f"{theta / math.pi:.6f}π</text>"
                )
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def develop_svg(rs: RealizedStructure, cusp: int = 0, tol: float = REGULAR_TOL) -> str:
    return layout_to_svg(develop_layout(rs, cusp, tol))
