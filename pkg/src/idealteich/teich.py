"""Dimension of the structure space, its kernel chart, and the edge-angle relations.

The unknowns are the logs of the Euclidean side lengths of the cusp link
triangulations, one per side *class*, so glued sides share a variable.  The
four corner triangles of a tetrahedron must be similar, with the side on face
``f`` of corner ``v`` matching the side of corner ``u`` that lies opposite the
edge with the same dihedral angle.  Writing ``L[v][q]`` for the side of corner
``v`` opposite the corner on the edge of pair ``q``, similarity of corners 0
and u reads

    log L[0][0] - log L[u][0] = log L[0][k] - log L[u][k],   k = 1, 2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .linalg import bareiss_rank, mat_vec, nullspace, rref
from .pattern import GluingPattern, PatternError, analyze

__all__ = [
    "SimilaritySystem",
    "KernelChart",
    "AngleRelationSystem",
    "BasisEdges",
    "DimensionReport",
    "InternalInconsistency",
    "AngleRankFinding",
    "partner",
    "build_similarity_system",
    "kernel_basis",
    "dimension_formula",
    "dimension_skeleton",
    "angle_relation_system",
    "basis_edges",
    "chart_for",
]


class InternalInconsistency(AssertionError):
    """A construction invariant failed; never expected on a valid pattern."""


class AngleRankFinding(RuntimeError):
    """The cusp relations among edge angles are linearly dependent."""


def partner(v: int, q: int) -> int:
    """The vertex joined to ``v`` by the edge of opposite-pair ``q``.

    Pairs: q=0 is {01, 23}, q=1 is {02, 13}, q=2 is {03, 12}.
    """
    return v ^ (q + 1)


def pair_index(v: int, w: int) -> int:
    return (v ^ w) - 1


@dataclass(frozen=True)
class SimilaritySystem:
    pattern: GluingPattern
    n_vars: int
    rows: tuple[tuple[int, ...], ...]
    tags: tuple[tuple[int, int, int], ...]  # (tet, other corner u, ratio index k)

    @property
    def rank(self) -> int:
        return bareiss_rank(self.rows)

    @property
    def nullity(self) -> int:
        return self.n_vars - self.rank


def build_similarity_system(p: GluingPattern) -> SimilaritySystem:
    cx = analyze(p)
    n_vars = len(cx.sides)

    def var(t: int, v: int, q: int) -> int:
        return cx.side(t, v, partner(v, q))

    rows, tags = [], []
    for t in range(p.tet_count):
        for u in (1, 2, 3):
            for k in (1, 2):
                row = [0] * n_vars
                row[var(t, 0, 0)] += 1
                row[var(t, u, 0)] -= 1
                row[var(t, 0, k)] -= 1
                row[var(t, u, k)] += 1
                rows.append(tuple(row))
                tags.append((t, u, k))
    return SimilaritySystem(p, n_vars, tuple(rows), tuple(tags))


@dataclass(frozen=True)
class KernelChart:
    """Exact kernel of the similarity system, gauged per cusp.

    ``normalized_basis`` spans the solutions with the gauge side of every
    cusp held at log-length 0; realized log-lengths are
    ``sum(params[i] * normalized_basis[i])`` around the all-ones base point.
    """

    system: SimilaritySystem
    kernel_basis: tuple[tuple[Fraction, ...], ...]
    cusp_scale_vectors: tuple[tuple[int, ...], ...]
    gauge_sides: tuple[int, ...]
    normalized_basis: tuple[tuple[Fraction, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.normalized_basis)

    @property
    def nullity(self) -> int:
        return len(self.kernel_basis)

    @property
    def base_point(self) -> tuple[float, ...]:
        return (0.0,) * self.dim

    def log_lengths(self, params) -> list[float]:
        if len(params) != self.dim:
            raise ValueError(f"expected {self.dim} parameters, got {len(params)}")
        out = [0.0] * self.system.n_vars
        for x, vec in zip(params, self.normalized_basis):
            x = float(x)
            for i, c in enumerate(vec):
                if c:
                    out[i] += x * float(c)
        return out


def kernel_basis(sys: SimilaritySystem) -> KernelChart:
    cx = analyze(sys.pattern)
    n = sys.n_vars
    kernel = nullspace(sys.rows, n)
    scales = []
    for c in cx.cusps:
        scales.append(tuple(int(cx.side_cusp[s] == c.id) for s in range(n)))
    for c, vec in zip(cx.cusps, scales):
        if any(mat_vec(sys.rows, vec)):
            raise InternalInconsistency(f"cusp {c.id} scaling is not in the kernel")
    gauges = tuple(min(s for s in range(n) if cx.side_cusp[s] == c.id) for c in cx.cusps)
    augmented = list(sys.rows) + [tuple(int(i == g) for i in range(n)) for g in gauges]
    normalized = nullspace(augmented, n)
    if len(normalized) != len(kernel) - len(cx.cusps):
        raise InternalInconsistency("cusp scalings are not independent inside the kernel")
    return KernelChart(
        system=sys,
        kernel_basis=tuple(map(tuple, kernel)),
        cusp_scale_vectors=tuple(scales),
        gauge_sides=gauges,
        normalized_basis=tuple(map(tuple, normalized)),
    )


_CHARTS: dict = {}


def chart_for(p: GluingPattern) -> KernelChart:
    """Cached ``kernel_basis(build_similarity_system(p))``."""
    if p not in _CHARTS:
        _CHARTS[p] = kernel_basis(build_similarity_system(p))
    return _CHARTS[p]


def _require_closed(p: GluingPattern, what: str):
    if not p.is_closed:
        raise PatternError(f"{what} is defined for closed patterns only (free faces present)")


def dimension_formula(p: GluingPattern) -> int:
    """Number of edges minus number of vertices."""
    _require_closed(p, "the edges-minus-vertices formula")
    cx = analyze(p)
    return len(cx.edges) - len(cx.cusps)


@dataclass(frozen=True)
class DimensionReport:
    faces: int
    edges: int
    d0: int
    ranks: tuple[int, ...]  # rank of pi_1 of each link 1-skeleton
    dim: int


def dimension_skeleton(p: GluingPattern) -> DimensionReport:
    """Count through the 2-skeleton: d0 = 3F - E, then subtract each link graph's rank."""
    _require_closed(p, "the 2-skeleton count")
    cx = analyze(p)
    f, e = len(cx.faces), len(cx.edges)
    d0 = 3 * f - e
    ranks = tuple(len(s.sides) - len(s.link_vertices) + 1 for s in cx.links)
    return DimensionReport(f, e, d0, ranks, d0 - sum(ranks))


@dataclass(frozen=True)
class AngleRelationSystem:
    """One cone-defect relation per cusp, one column per edge class.

    Row i reads ``sum_e matrix[i][e] * phi_e = rhs_pi[i] * pi`` where
    ``phi_e = 2*pi - theta_e`` (``pi - theta_e`` for edges meeting free faces)
    and ``rhs_pi[i] = chi(double of link i)``, which is ``2 * chi(link i)``.
    """

    matrix: tuple[tuple[int, ...], ...]
    rhs_pi: tuple[int, ...]
    boundary_edges: tuple[bool, ...]

    @property
    def rank(self) -> int:
        return bareiss_rank(self.matrix)

    def theta_rhs_pi(self) -> tuple[int, ...]:
        """Right-hand sides (in units of pi) of the same rows written in theta."""
        out = []
        for row, rhs in zip(self.matrix, self.rhs_pi):
            const = sum(m * (1 if b else 2) for m, b in zip(row, self.boundary_edges))
            out.append(const - rhs)
        return tuple(out)


def angle_relation_system(p: GluingPattern) -> AngleRelationSystem:
    cx = analyze(p)
    n_e = len(cx.edges)
    matrix = []
    for link in cx.links:
        row = [0] * n_e
        for lv in link.link_vertices:
            row[cx.lv_edge[lv][0]] += 1
        matrix.append(tuple(row))
    boundary = tuple(not e.closed for e in cx.edges)
    rhs = tuple(2 * s.euler_char for s in cx.links)
    return AngleRelationSystem(tuple(matrix), rhs, boundary)


@dataclass(frozen=True)
class BasisEdges:
    basis: tuple[int, ...]
    # theta_e = const_pi * pi + sum(coeff * theta_b for b in basis)
    expressions: dict

    def evaluate(self, basis_angles) -> list[float]:
        vals = dict(zip(self.basis, basis_angles))
        out = []
        for e in sorted(self.expressions):
            const, coeffs = self.expressions[e]
            out.append(float(const) * math.pi + sum(float(c) * vals[b] for b, c in coeffs.items()))
        return out


def basis_edges(p: GluingPattern) -> BasisEdges:
    """Pick E - V edges whose angles determine all the others."""
    _require_closed(p, "basis edge selection")
    ars = angle_relation_system(p)
    n_cusps, n_e = len(ars.matrix), len(ars.matrix[0])
    if ars.rank != n_cusps:
        raise AngleRankFinding(
            f"cusp relations have rank {ars.rank} < {n_cusps} cusps: {ars.matrix}"
        )
    aug = [list(r) + [t] for r, t in zip(ars.matrix, ars.theta_rhs_pi())]
    red, pivots = rref(aug, n_e)
    free = tuple(c for c in range(n_e) if c not in pivots)
    expressions: dict = {}
    for b in free:
        expressions[b] = (Fraction(0), {b: Fraction(1)})
    for row, pc in zip(red, pivots):
        expressions[pc] = (row[n_e], {b: -row[b] for b in free if row[b] != 0})
    return BasisEdges(free, expressions)
