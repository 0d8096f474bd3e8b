"""Numerical studies over kernel charts.

Parameter sweeps to CSV, the closed-form angle functions of the
figure-eight and Whitehead examples, grid injectivity checks for the
params -> edge-angle map, and a Newton search for the complete structure.
"""
from __future__ import annotations

import csv
import io
import itertools
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
from scipy.spatial import cKDTree

from .metrics import (
    DomainError,
    RealizedStructure,
    gauss_bonnet_residuals,
    mostow_residual,
    realize,
    shift_coordinates,
    side_ratio_coefficients,
)
from .pattern import BUILTIN_NAMES, GluingPattern, PatternError, analyze, builtin, parse_pattern
from .teich import KernelChart, basis_edges, chart_for

__all__ = [
    "SweepSpec",
    "SweepResult",
    "AngleMapReport",
    "CompleteResult",
    "ConvergenceError",
    "LabeledChart",
    "FIGURE_EIGHT_CHART",
    "EXAMPLE3_CHART",
    "WHITEHEAD_CHART",
    "resolve_pattern",
    "grid_points",
    "sweep",
    "fig8_phi",
    "whitehead_phi",
    "whitehead_phi_dt",
    "whitehead_sin_half_y",
    "injectivity_grid",
    "find_complete",
    "bisect_domain",
]

log = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
GOLDEN_LO = (math.sqrt(5.0) - 1.0) / 2.0
GOLDEN_HI = (math.sqrt(5.0) + 1.0) / 2.0

Grid = Sequence[tuple[float, float, int]]


def resolve_pattern(source: Union[str, Path, GluingPattern]) -> GluingPattern:
    """A builtin name, a path to a pattern file, or a pattern itself."""
    if isinstance(source, GluingPattern):
        return source
    if isinstance(source, str) and source in BUILTIN_NAMES:
        return builtin(source)
    path = Path(source)
    if not path.is_file():
        raise PatternError(f"unknown pattern {str(source)!r} (not a builtin, no such file)")
    return parse_pattern(path.read_text(encoding="utf-8"))


def grid_points(grid: Grid) -> list[tuple[float, ...]]:
    """Lexicographic product of evenly spaced axes, first parameter slowest."""
    axes = []
    for lo, hi, steps in grid:
        if steps < 2:
            raise ValueError(f"grid axis needs at least 2 steps, got {steps}")
        axes.append([lo + (hi - lo) * i / (steps - 1) for i in range(steps)])
    return [tuple(pt) for pt in itertools.product(*axes)]


# ---------------------------------------------------------------------------
# sweeps

OUTPUTS = ("angles", "shifts", "residuals")


@dataclass(frozen=True)
class SweepSpec:
    pattern: str
    grid: tuple[tuple[float, float, int], ...] = ()
    outputs: tuple[str, ...] = ("angles",)

    def __post_init__(self):
        object.__setattr__(self, "grid", tuple((float(a), float(b), int(n)) for a, b, n in self.grid))
        for lo, hi, steps in self.grid:
            if steps < 2:
                raise ValueError(f"grid axis needs at least 2 steps, got {steps}")
        bad = [o for o in self.outputs if o not in OUTPUTS]
        if bad:
            raise ValueError(f"unknown sweep output(s) {bad}; choose from {OUTPUTS}")


@dataclass(frozen=True)
class SweepResult:
    header: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        w.writerows(self.rows)
        return buf.getvalue()

    def write(self, path: Union[str, Path]):
        Path(path).write_bytes(self.to_csv().encode("utf-8"))


def _num(x: float) -> str:
    return format(x, ".17g")


def sweep(spec: SweepSpec) -> SweepResult:
    p = resolve_pattern(spec.pattern)
    chart = chart_for(p)
    cx = analyze(p)
    if chart.dim == 0 and spec.grid:
        raise ValueError("pattern has a zero-dimensional chart; the grid must be empty")
    if chart.dim and len(spec.grid) != chart.dim:
        raise ValueError(f"grid has {len(spec.grid)} axes, chart has dimension {chart.dim}")
    points = grid_points(spec.grid) if spec.grid else [()]

    header = [f"param_{i + 1}" for i in range(chart.dim)]
    if "angles" in spec.outputs:
        header += [f"theta_{e.id}" for e in cx.edges]
    if "shifts" in spec.outputs:
        header += [f"shift_{e.id}_{k}" for e in cx.edges for k in range(e.valence)]
    if "residuals" in spec.outputs:
        header += [f"gauss_bonnet_{c.id}" for c in cx.cusps] + ["mostow"]
    header.append("flag")

    rows = []
    n_values = len(header) - chart.dim - 1
    for pt in points:
        row = [_num(x) for x in pt]
        try:
            rs = realize(p, chart, pt)
        except DomainError:
            rows.append(tuple(row + [""] * n_values + ["out_of_domain"]))
            continue
        if "angles" in spec.outputs:
            row += [_num(t) for t in rs.edge_angles]
        if "shifts" in spec.outputs:
            row += [_num(s.value) for s in shift_coordinates(rs).entries]
        if "residuals" in spec.outputs:
            row += [_num(r) for r in gauss_bonnet_residuals(rs)] + [_num(mostow_residual(rs))]
        rows.append(tuple(row + ["ok"]))
    return SweepResult(tuple(header), tuple(rows))


# ---------------------------------------------------------------------------
# closed forms


def fig8_phi(r: float) -> float:
    """z - y for the (1, r, 1/r) triangle: y opposite 1/r, z opposite r."""
    if not GOLDEN_LO < r < GOLDEN_HI:
        raise ValueError(f"r = {r!r} outside ((sqrt5-1)/2, (sqrt5+1)/2)")
    z = math.acos(0.5 * (r + 1.0 / r - r**3))
    y = math.acos(0.5 * (1.0 / r + r - 1.0 / r**3))
    return z - y


def _whitehead_check(t: float, x: float) -> float:
    if not (t > 0 and 0 < x < TWO_PI):
        raise ValueError(f"need t > 0 and 0 < x < 2pi, got t={t!r}, x={x!r}")
    d = t**4 + 1.0 - 2.0 * t * t * math.cos(x)
    if not d > 0:
        raise ValueError(f"t^4 + 1 - 2t^2 cos x = {d!r} is not positive")
    return d


def whitehead_phi(t: float, x: float) -> float:
    """Phi(t, x) = (t^3 - 1/t) / (2 sqrt(t^4 + 1 - 2 t^2 cos x))."""
    d = _whitehead_check(t, x)
    return 0.5 * (t**3 - 1.0 / t) / math.sqrt(d)


def whitehead_phi_dt(t: float, x: float) -> float:
    """d Phi / dt in the factored form (t^8 - 4t^6 cos x + 6t^4 - 4t^2 cos x + 1) / (2 t^2 d^1.5)."""
    d = _whitehead_check(t, x)
    c = math.cos(x)
    num = t**8 - 4 * t**6 * c + 6 * t**4 - 4 * t * t * c + 1.0
    return num / (2.0 * t * t * d**1.5)


def whitehead_sin_half_y(t: float, x: float) -> float:
    """sin(y/2) in the quadrilateral: Phi(t, x) for t >= 1, -Phi(1/t, x) below."""
    return whitehead_phi(t, x) if t >= 1.0 else -whitehead_phi(1.0 / t, x)


# ---------------------------------------------------------------------------
# hand-labelled charts of the builtin families


@dataclass(frozen=True)
class LabeledChart:
    """A chart given by side-length ratios, with named sides, corners and edges.

    ``coords`` lists (name, numerator side, denominator side); the chart
    coordinate is the ratio of the two lengths.  Sides are (tet, vertex, face)
    slots and corners (tet, vertex, w) end slots of one of the builtins.
    """

    builtin: str
    sides: dict
    corners: dict
    edges: dict
    coords: tuple[tuple[str, str, str], ...]

    @property
    def pattern(self) -> GluingPattern:
        return builtin(self.builtin)

    def side_id(self, name: str) -> int:
        return analyze(self.pattern).side(*self.sides[name])

    def calibration(self, chart: Optional[KernelChart] = None) -> np.ndarray:
        """Rows c_i with log(coord_i) = c_i . params."""
        chart = chart or chart_for(self.pattern)
        m = [side_ratio_coefficients(chart, self.side_id(a), self.side_id(b)) for _, a, b in self.coords]
        return np.array(m, dtype=float).reshape(len(self.coords), chart.dim)

    def to_params(self, *values: float) -> tuple[float, ...]:
        m = self.calibration()
        return tuple(float(v) for v in np.linalg.solve(m, [math.log(v) for v in values]))

    def from_params(self, params: Sequence[float]) -> tuple[float, ...]:
        m = self.calibration()
        return tuple(math.exp(v) for v in m @ np.asarray(params, dtype=float))

    def angle(self, rs: RealizedStructure, corner: str) -> float:
        return rs.corner_angles[self.corners[corner]]

    def theta(self, rs: RealizedStructure, edge: str) -> float:
        return rs.edge_angles[self.edges[edge]]


# Triangle KBA with |AB| = 1, |KB| = r, |AK| = 1/r; x, y, z at K, B, A.
FIGURE_EIGHT_CHART = LabeledChart(
    builtin="figure_eight",
    sides={"AB": (0, 0, 3), "KB": (0, 0, 2), "AK": (0, 0, 1)},
    corners={"x": (0, 0, 3), "y": (0, 0, 1), "z": (0, 0, 2)},
    edges={"b": 1, "c": 0},
    coords=(("r", "KB", "AB"),),
)

# Triangle IJH with |IH| = 1, |IJ| = 1/r, |JH| = r; x, y, z at J, H, I.
EXAMPLE3_CHART = LabeledChart(
    builtin="example3_genus3",
    sides={"IH": (0, 1, 3), "IJ": (0, 1, 0), "JH": (0, 1, 2)},
    corners={"x": (0, 1, 3), "y": (0, 1, 0), "z": (0, 1, 2)},
    edges={"b": 0, "c": 1},
    coords=(("r", "JH", "IH"),),
)

# Triangles P = T1T3T4 with (|T1T3|, |T3T4|, |T4T1|) = (s, t, 1) and
# Q = T1T2T3 with (|T1T2|, |T2T3|, |T3T1|) = (t, t^2, s); they share T1T3.
WHITEHEAD_CHART = LabeledChart(
    builtin="whitehead",
    sides={
        "T1T4": (0, 2, 0),
        "T3T4": (0, 2, 1),
        "T1T3": (0, 2, 3),
        "T1T2": (3, 3, 0),
        "T2T3": (3, 3, 1),
    },
    corners={
        "T1T4T3": (0, 2, 3),  # angle at T4 in P
        "T1T3T4": (0, 2, 0),  # angle at T3 in P
        "T1T2T3": (3, 3, 2),  # angle at T2 in Q
        "T2T1T3": (3, 3, 1),  # angle at T1 in Q
    },
    edges={"c": 2, "d": 0},
    coords=(("t", "T3T4", "T1T4"), ("s", "T1T3", "T1T4")),
)


def whitehead_xy(rs: RealizedStructure) -> tuple[float, float]:
    c = WHITEHEAD_CHART
    x = c.angle(rs, "T1T4T3") + c.angle(rs, "T1T2T3")
    y = c.angle(rs, "T2T1T3") - c.angle(rs, "T1T3T4")
    return x, y


__all__.append("whitehead_xy")


# ---------------------------------------------------------------------------
# injectivity on grids


@dataclass(frozen=True)
class AngleMapReport:
    edges: tuple[int, ...]
    samples: tuple[tuple[tuple[float, ...], tuple[float, ...]], ...]
    skipped: int  # grid points outside the legal domain
    min_distance: float
    witnesses: Optional[tuple[int, int]]  # sample indices attaining min_distance
    delta: float
    monotone: Optional[bool]  # 1-parameter grids: first angle strictly monotone
    verdict: str

    @property
    def injective_at_resolution(self) -> bool:
        return self.verdict != "collision"


def injectivity_grid(
    p: GluingPattern,
    chart: Optional[KernelChart] = None,
    grid: Union[Grid, Sequence[Sequence[float]]] = (),
    edges: Optional[Sequence[int]] = None,
    delta: float = 1e-6,
) -> AngleMapReport:
    """Sample params -> edge angles and look for near-collisions.

    ``grid`` is either per-parameter (min, max, steps) axes or an explicit
    list of points.  ``edges`` defaults to the basis edges.
    """
    chart = chart or chart_for(p)
    if edges is None:
        edges = basis_edges(p).basis if p.is_closed else tuple(range(len(analyze(p).edges)))
    edges = tuple(edges)
    if chart.dim == 0:
        points = [()]
    elif grid and all(len(g) == 3 and isinstance(g[2], int) for g in grid) and len(grid) == chart.dim:
        points = grid_points(grid)  # type: ignore[arg-type]
    else:
        points = [tuple(float(x) for x in pt) for pt in grid]

    samples, skipped = [], 0
    for pt in points:
        try:
            rs = realize(p, chart, pt)
        except DomainError:
            skipped += 1
            continue
        samples.append((tuple(pt), tuple(rs.edge_angles[e] for e in edges)))

    if len(samples) < 2 or not edges:
        return AngleMapReport(edges, tuple(samples), skipped, math.inf, None, delta, None, "vacuous")

    vecs = np.array([s[1] for s in samples])
    dist, idx = cKDTree(vecs).query(vecs, k=2)
    i = int(np.argmin(dist[:, 1]))
    j = int(idx[i, 1]) if idx[i, 1] != i else int(idx[i, 0])  # coincident points tie
    best = float(dist[i, 1])
    monotone = None
    if chart.dim == 1:
        seq = [s[1][0] for s in sorted(samples)]
        diffs = [b - a for a, b in zip(seq, seq[1:])]
        monotone = all(d > 0 for d in diffs) or all(d < 0 for d in diffs)
    verdict = f"no collision at resolution {delta:g}" if best > delta else "collision"
    if verdict == "collision":
        log.warning("angle vectors of samples %d and %d are %.3e apart", i, j, best)
    return AngleMapReport(edges, tuple(samples), skipped, best, (min(i, j), max(i, j)), delta, monotone, verdict)


# ---------------------------------------------------------------------------
# complete structure


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, best_params: tuple[float, ...], best_residual: float):
        self.best_params = best_params
        self.best_residual = best_residual
        super().__init__(f"{message} (best residual {best_residual:.3e})")


@dataclass(frozen=True)
class CompleteResult:
    params: tuple[float, ...]
    residual: float  # max over basis edges of |theta - 2pi|
    mostow_residual: float  # same over all edges
    iterations: int
    structure: RealizedStructure = field(repr=False)
    jacobian_warnings: int = 0


FD_STEP = 1e-6
FD_CHECK_STEP = 1e-5
FD_AGREEMENT = 1e-5
MIN_STEP = 1e-12


def _basis_residual(p, chart, params, basis) -> np.ndarray:
    rs = realize(p, chart, params)
    return np.array([rs.edge_angles[e] - TWO_PI for e in basis])


def _jacobian(p, chart, x: np.ndarray, basis, h: float) -> np.ndarray:
    n = len(x)
    jac = np.empty((len(basis), n))
    for k in range(n):
        e = np.zeros(n)
        e[k] = h
        try:
            jac[:, k] = (_basis_residual(p, chart, x + e, basis) - _basis_residual(p, chart, x - e, basis)) / (2 * h)
        except DomainError:
            # too close to the boundary for a central difference
            f0 = _basis_residual(p, chart, x, basis)
            try:
                jac[:, k] = (_basis_residual(p, chart, x + e, basis) - f0) / h
            except DomainError:
                jac[:, k] = (f0 - _basis_residual(p, chart, x - e, basis)) / h
    return jac


def find_complete(
    p: GluingPattern,
    chart: Optional[KernelChart] = None,
    start: Optional[Sequence[float]] = None,
    tol: float = 1e-10,
    max_iter: int = 100,
) -> CompleteResult:
    """Newton iteration for the point where every basis edge has angle 2pi.

    The Jacobian is a central difference with step 1e-6, checked against a
    1e-5 step.  Steps are halved until the new point is inside the domain
    and lowers the residual; giving up below a step factor of 1e-12.
    """
    chart = chart or chart_for(p)
    if chart.dim == 0:
        rs = realize(p, chart, ())
        res = mostow_residual(rs)
        if res > tol:
            raise ConvergenceError("zero-dimensional chart: the only structure is not complete", (), res)
        return CompleteResult((), res, res, 0, rs)

    basis = basis_edges(p).basis
    x = np.asarray(start if start is not None else chart.base_point, dtype=float)
    if x.shape != (chart.dim,):
        raise ValueError(f"start must have {chart.dim} coordinates")
    f = _basis_residual(p, chart, x, basis)  # DomainError if the start is illegal
    best = (tuple(map(float, x)), float(np.max(np.abs(f))))
    warnings = 0
    for it in range(max_iter + 1):
        norm = float(np.max(np.abs(f)))
        if norm < best[1]:
            best = (tuple(map(float, x)), norm)
        if norm < tol:
            rs = realize(p, chart, x)
            return CompleteResult(tuple(map(float, x)), norm, mostow_residual(rs), it, rs, warnings)
        if it == max_iter:
            break
        jac = _jacobian(p, chart, x, basis, FD_STEP)
        check = _jacobian(p, chart, x, basis, FD_CHECK_STEP)
        if np.max(np.abs(jac - check)) > FD_AGREEMENT * max(1.0, float(np.max(np.abs(jac)))):
            warnings += 1
            log.warning("finite-difference Jacobians disagree at %s", x)
        step = np.linalg.lstsq(jac, -f, rcond=None)[0]
        lam = 1.0
        while True:
            trial = x + lam * step
            try:
                ft = _basis_residual(p, chart, trial, basis)
                if float(np.max(np.abs(ft))) < norm or float(np.linalg.norm(ft)) < float(np.linalg.norm(f)):
                    break
            except DomainError:
                pass
            lam /= 2.0
            if lam < MIN_STEP:
                raise ConvergenceError("line search left the domain or stalled", *best)
        x, f = trial, ft
    raise ConvergenceError(f"no convergence after {max_iter} iterations", *best)


# ---------------------------------------------------------------------------
# domain boundary


def bisect_domain(
    p: GluingPattern,
    chart: Optional[KernelChart],
    inside: Sequence[float],
    outside: Sequence[float],
    tol: float = 1e-13,
) -> tuple[float, ...]:
    """Last legal point on the segment from ``inside`` to ``outside``."""
    chart = chart or chart_for(p)
    a = np.asarray(inside, dtype=float)
    b = np.asarray(outside, dtype=float)
    if not _legal(p, chart, a) or _legal(p, chart, b):
        raise ValueError("need a legal inside point and an illegal outside point")
    while float(np.max(np.abs(b - a))) > tol:
        mid = (a + b) / 2.0
        if _legal(p, chart, mid):
            a = mid
        else:
            b = mid
    return tuple(map(float, a))


def _legal(p, chart, x) -> bool:
    try:
        realize(p, chart, x)
    except DomainError:
        return False
    return True
