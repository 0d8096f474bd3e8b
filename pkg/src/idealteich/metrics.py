"""Concrete structures from kernel-chart points."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .pattern import Combinatorics, GluingPattern, analyze
from .shape import TetShape, triangle_angles
from .teich import KernelChart, chart_for

__all__ = [
    "DomainError",
    "EdgeEndMismatch",
    "CuspReport",
    "RealizedStructure",
    "ShiftEntry",
    "ShiftCoordinates",
    "EdgeReportRow",
    "realize",
    "gauss_bonnet_residuals",
    "edge_report",
    "shift_coordinates",
    "mostow_residual",
    "in_domain",
    "side_ratio_coefficients",
    "TRIANGLE_MARGIN",
    "REGULAR_TOL",
]

TRIANGLE_MARGIN = 1e-12
REGULAR_TOL = 1e-9
TWO_PI = 2.0 * math.pi


class DomainError(ValueError):
    """Some link triangle fails a strict triangle inequality."""

    def __init__(self, triangle: tuple[int, int], inequality: str, slack: float):
        self.triangle = triangle
        self.inequality = inequality
        self.slack = slack
        super().__init__(
            f"triangle at tet {triangle[0]} vertex {triangle[1]}: {inequality} fails (slack {slack:.3e})"
        )


class EdgeEndMismatch(AssertionError):
    pass


@dataclass(frozen=True)
class CuspReport:
    cusp: int
    euler_char: int
    residual: float  # signed: sum of defects minus pi * chi(double)


@dataclass(frozen=True)
class RealizedStructure:
    pattern: GluingPattern
    chart: KernelChart
    params: tuple[float, ...]
    log_lengths: tuple[float, ...]
    corner_angles: dict = field(repr=False)  # (tet, v, w) -> angle of triangle (tet, v) at edge vw
    tet_shapes: tuple[TetShape, ...]
    vertex_angles: tuple[float, ...]  # cone angle at each link vertex
    edge_angles: tuple[float, ...]  # measured at the tail end
    edge_angles_head: tuple[float, ...]
    cusp_reports: tuple[CuspReport, ...]
    similarity_defect: float

    @property
    def combinatorics(self) -> Combinatorics:
        return analyze(self.pattern)

    def length(self, side: int) -> float:
        return math.exp(self.log_lengths[side])

    def edge_kind(self, tol: float = REGULAR_TOL) -> tuple[str, ...]:
        return tuple("regular" if abs(t - TWO_PI) <= tol else "singular" for t in self.edge_angles)


def realize(
    p: GluingPattern,
    chart: Optional[KernelChart] = None,
    params: Sequence[float] = (),
) -> RealizedStructure:
    if chart is None:
        chart = chart_for(p)
    params = tuple(float(x) for x in params)
    if not all(math.isfinite(x) for x in params):
        raise ValueError("parameters must be finite")
    cx = analyze(p)
    logs = chart.log_lengths(params)
    lengths = [math.exp(x) for x in logs]

    corner = {}
    for t in range(p.tet_count):
        for v in range(4):
            others = [w for w in range(4) if w != v]
            # side on face w is opposite the corner on edge {v, w}
            sides = [lengths[cx.side(t, v, w)] for w in others]
            _check_triangle((t, v), sides)
            for w, ang in zip(others, triangle_angles(*sides)):
                corner[(t, v, w)] = ang

    shapes = []
    defect = 0.0
    for t in range(p.tet_count):
        per_pair = [[corner[(t, v, v ^ (q + 1))] for v in range(4)] for q in range(3)]
        defect = max(defect, max(max(a) - min(a) for a in per_pair))
        shapes.append(TetShape(per_pair[0][0], per_pair[1][0], per_pair[2][0]))

    vertex_angles = tuple(sum(corner[s] for s in grp) for grp in cx.link_vertices)
    tail = tuple(vertex_angles[e.ends[0]] for e in cx.edges)
    head = tuple(vertex_angles[e.ends[1]] for e in cx.edges)

    reports = []
    for link in cx.links:
        total = sum(
            (math.pi if cx.lv_boundary[lv] else TWO_PI) - vertex_angles[lv]
            for lv in link.link_vertices
        )
        reports.append(CuspReport(link.cusp, link.euler_char, total - TWO_PI * link.euler_char))

    return RealizedStructure(
        pattern=p,
        chart=chart,
        params=params,
        log_lengths=tuple(logs),
        corner_angles=corner,
        tet_shapes=tuple(shapes),
        vertex_angles=vertex_angles,
        edge_angles=tail,
        edge_angles_head=head,
        cusp_reports=tuple(reports),
        similarity_defect=defect,
    )


def _check_triangle(tri: tuple[int, int], sides: list[float]):
    top = max(sides)
    names = ("a < b + c", "b < a + c", "c < a + b")
    for i, name in enumerate(names):
        slack = sum(sides) - 2 * sides[i]
        if not slack > TRIANGLE_MARGIN * top:
            raise DomainError(tri, name, slack)


def in_domain(p: GluingPattern, chart: KernelChart, params: Sequence[float]) -> bool:
    try:
        realize(p, chart, params)
    except DomainError:
        return False
    return True


def side_ratio_coefficients(chart: KernelChart, num: int, den: int) -> tuple[float, ...]:
    """Coefficients c with log(|num| / |den|) = c . params, for two side classes.

    Used to line up the kernel coordinates with a hand-made chart: matching
    one ratio fixes the linear change of coordinates, the rest must follow.
    """
    return tuple(float(vec[num] - vec[den]) for vec in chart.normalized_basis)


def gauss_bonnet_residuals(rs: RealizedStructure) -> list[float]:
    return [abs(c.residual) for c in rs.cusp_reports]


@dataclass(frozen=True)
class EdgeReportRow:
    edge: int
    theta: float
    kind: str


def edge_report(rs: RealizedStructure, tol: float = REGULAR_TOL) -> list[EdgeReportRow]:
    rows = []
    for e, (a, b) in enumerate(zip(rs.edge_angles, rs.edge_angles_head)):
        if abs(a - b) > tol:
            raise EdgeEndMismatch(f"edge {e}: angle {a!r} at tail, {b!r} at head")
        rows.append(EdgeReportRow(e, a, "regular" if abs(a - TWO_PI) <= tol else "singular"))
    return rows


def mostow_residual(rs: RealizedStructure) -> float:
    return max((abs(t - TWO_PI) for t in rs.edge_angles), default=0.0)


# ---------------------------------------------------------------------------
# shift coordinates


@dataclass(frozen=True)
class ShiftEntry:
    edge: int
    position: int  # wedge index along the edge
    face_from: int
    face_to: int
    value: float


@dataclass(frozen=True)
class ShiftCoordinates:
    """Shifts between consecutive faces around each oriented edge.

    Every edge is oriented from its tail end to its head end (the tail is
    the end holding the smaller corner slot).  Within a wedge, the shift from
    the entry face to the exit face is the log of the ratio of the two link
    sides meeting at the head-end corner, exit side over entry side.
    """

    entries: tuple[ShiftEntry, ...]
    closed: tuple[bool, ...]

    def around(self, edge: int) -> list[ShiftEntry]:
        return [s for s in self.entries if s.edge == edge]

    def cycle_sum(self, edge: int) -> float:
        return math.fsum(s.value for s in self.around(edge))

    def telescoped(self, edge: int, start: int, stop: int) -> float:
        """Shift from the face entering wedge ``start`` to the face leaving wedge ``stop - 1``.

        Positions wrap around for closed edges; the walk always follows the
        orientation of the face cycle.
        """
        ring = self.around(edge)
        n = len(ring)
        if self.closed[edge]:
            k = (stop - start) % n if stop != start else 0
            return math.fsum(ring[(start + i) % n].value for i in range(k))
        if not 0 <= start <= stop <= n:
            raise IndexError("positions outside the open edge")
        return math.fsum(ring[i].value for i in range(start, stop))

    def value(self, face_from: int, face_to: int, edge: int) -> float:
        """x(T, T', e) for consecutive faces; antisymmetric in (T, T')."""
        for s in self.around(edge):
            if (s.face_from, s.face_to) == (face_from, face_to):
                return s.value
        for s in self.around(edge):
            if (s.face_from, s.face_to) == (face_to, face_from):
                return -s.value
        raise KeyError(f"faces {face_from}, {face_to} are not consecutive around edge {edge}")


def shift_coordinates(rs: RealizedStructure) -> ShiftCoordinates:
    cx = analyze(rs.pattern)
    entries = []
    for e in cx.edges:
        for k, w in enumerate(e.wedges):
            side_in = cx.side(w.tet, w.head, w.entry)
            side_out = cx.side(w.tet, w.head, w.exit)
            val = rs.log_lengths[side_out] - rs.log_lengths[side_in]
            entries.append(
                ShiftEntry(
                    e.id,
                    k,
                    cx.face_of[(w.tet, w.entry)],
                    cx.face_of[(w.tet, w.exit)],
                    val,
                )
            )
    return ShiftCoordinates(tuple(entries), tuple(e.closed for e in cx.edges))
