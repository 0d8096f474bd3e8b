"""Combinatorics of a gluing pattern of ideal tetrahedra.

Conventions used throughout the package:

* tetrahedron vertices are 0..3 and face ``f`` is the face opposite vertex ``f``;
* a gluing ``A:f -> B:g`` with permutation ``p`` sends vertex ``i`` of ``A``
  to vertex ``p[i]`` of ``B`` (so ``p[f] == g``);
* a *corner* is a slot ``(tet, v)``: the horospherical triangle cut off near
  vertex ``v``.  Its sides are indexed by the faces ``f != v`` through ``v``
  and its corners by the tetrahedron edges ``{v, w}``;
* an *end slot* ``(tet, v, w)`` is the corner of triangle ``(tet, v)`` lying
  on edge ``{v, w}``, i.e. the end at ``v`` of that edge.
"""
from __future__ import annotations

import functools
import random
import re
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional

from scipy.cluster.hierarchy import DisjointSet

__all__ = [
    "PatternError",
    "PatternSyntaxError",
    "FaceGluing",
    "GluingPattern",
    "EdgeClass",
    "VertexClass",
    "LinkSurface",
    "Combinatorics",
    "OrientationCheck",
    "parse_pattern",
    "serialize_pattern",
    "analyze",
    "compute_edge_classes",
    "compute_cusps",
    "build_link_surfaces",
    "check_orientable",
    "builtin",
    "BUILTIN_NAMES",
    "random_closed_pattern",
    "perm_parity",
]

Perm = tuple[int, int, int, int]
Slot = tuple[int, int]


class PatternError(ValueError):
    """Raised for an invalid gluing pattern."""


class PatternSyntaxError(PatternError):
    def __init__(self, message: str, line: int, column: int = 1):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


def perm_parity(perm: Iterable[int]) -> int:
    """+1 for an even permutation, -1 for an odd one."""
    p = list(perm)
    sign = 1
    seen = [False] * len(p)
    for i in range(len(p)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _invert(perm: Perm) -> Perm:
    inv = [0] * 4
    for i, j in enumerate(perm):
        inv[j] = i
    return tuple(inv)  # type: ignore[return-value]


@dataclass(frozen=True)
class FaceGluing:
    src: Slot
    dst: Slot
    perm: Perm

    def inverse(self) -> "FaceGluing":
        return FaceGluing(self.dst, self.src, _invert(self.perm))

    def canonical(self) -> "FaceGluing":
        return self if self.src <= self.dst else self.inverse()


@dataclass(frozen=True)
class GluingPattern:
    """Tetrahedra plus face pairings.

    Gluings are stored once per unordered pair of face slots, oriented so
    that ``src < dst`` and sorted by ``src``; construction validates and
    canonicalizes, so two patterns describing the same gluing compare equal.
    """

    tet_count: int
    gluings: tuple[FaceGluing, ...]
    allow_free: bool = False
    _neighbors: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if not isinstance(self.tet_count, int) or self.tet_count < 1:
            raise PatternError("tet_count must be a positive integer")
        used: dict[Slot, FaceGluing] = {}
        canon = []
        for g in self.gluings:
            if sorted(g.perm) != [0, 1, 2, 3]:
                raise PatternError(f"vertex map {g.perm} is not a permutation")
            for t, f in (g.src, g.dst):
                if not (0 <= t < self.tet_count and 0 <= f < 4):
                    raise PatternError(f"face slot {t}:{f} out of range")
            if g.src == g.dst:
                raise PatternError(f"face {g.src[0]}:{g.src[1]} glued to itself")
            if g.perm[g.src[1]] != g.dst[1]:
                raise PatternError(
                    f"vertex map {''.join(map(str, g.perm))} is not simplicial for "
                    f"{g.src[0]}:{g.src[1]} -> {g.dst[0]}:{g.dst[1]}"
                )
            for slot in (g.src, g.dst):
                if slot in used:
                    raise PatternError(f"face {slot[0]}:{slot[1]} appears in two gluings")
                used[slot] = g
            canon.append(g.canonical())
        if not self.allow_free and len(used) != 4 * self.tet_count:
            missing = [
                (t, f) for t in range(self.tet_count) for f in range(4) if (t, f) not in used
            ]
            raise PatternError(
                f"{len(missing)} unglued face(s) without allow_free, first {missing[0][0]}:{missing[0][1]}"
            )
        canon.sort(key=lambda g: (g.src, g.dst))
        object.__setattr__(self, "gluings", tuple(canon))
        nbrs = {}
        for g in canon:
            nbrs[g.src] = (g.dst, g.perm)
            nbrs[g.dst] = (g.src, _invert(g.perm))
        object.__setattr__(self, "_neighbors", nbrs)

    def neighbor(self, tet: int, face: int) -> Optional[tuple[Slot, Perm]]:
        """The face glued to ``tet:face`` and the vertex map, or None if free."""
        return self._neighbors.get((tet, face))

    def free_faces(self) -> list[Slot]:
        return [
            (t, f) for t in range(self.tet_count) for f in range(4) if (t, f) not in self._neighbors
        ]

    @property
    def is_closed(self) -> bool:
        return len(self._neighbors) == 4 * self.tet_count


# ---------------------------------------------------------------------------
# text format

_GLUE_RE = re.compile(r"^glue\s+(\d+):(\d+)\s+(\d+):(\d+)\s+perm=(\S+)$")
_FREE_RE = re.compile(r"^free\s+(\d+):(\d+)$")


def parse_pattern(text: str) -> GluingPattern:
    """Parse the line-based triangulation format.

    ::

        tetrahedra 2
        glue 0:0 1:3 perm=3120
        ...

    ``allow_free`` may follow the header; ``free A:f`` lines are then allowed.
    """
    header = None
    allow_free = False
    gluings: list[FaceGluing] = []
    free: list[tuple[Slot, int]] = []
    seen: dict[Slot, int] = {}

    def claim(slot: Slot, lineno: int, col: int):
        if slot in seen:
            raise PatternSyntaxError(
                f"duplicate face slot {slot[0]}:{slot[1]} (first used on line {seen[slot]})",
                lineno,
                col,
            )
        seen[slot] = lineno

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        col = raw.index(line[0]) + 1
        if header is None:
            m = re.match(r"^tetrahedra\s+(\d+)$", line)
            if not m:
                raise PatternSyntaxError("expected 'tetrahedra N'", lineno, col)
            header = int(m.group(1))
            if header < 1:
                raise PatternSyntaxError("tetrahedron count must be positive", lineno, col)
            continue
        if line == "allow_free":
            if gluings or free:
                raise PatternSyntaxError("'allow_free' must precede gluing lines", lineno, col)
            allow_free = True
            continue
        m = _GLUE_RE.match(line)
        if m:
            a, f, b, g = (int(m.group(i)) for i in range(1, 5))
            ptxt = m.group(5)
            if len(ptxt) != 4 or not ptxt.isdigit():
                raise PatternSyntaxError(
                    f"perm must be four digits, got {ptxt!r}", lineno, col + line.index("perm=") + 5
                )
            perm = tuple(int(c) for c in ptxt)
            if sorted(perm) != [0, 1, 2, 3]:
                raise PatternSyntaxError(
                    f"vertex map {ptxt} is not a permutation", lineno, col + line.index("perm=") + 5
                )
            if perm[f] != g:
                raise PatternSyntaxError(
                    f"vertex map {ptxt} is not simplicial: sends vertex {f} to {perm[f]}, not {g}",
                    lineno,
                    col + line.index("perm=") + 5,
                )
            for t, ff in ((a, f), (b, g)):
                if t >= header or ff > 3:
                    raise PatternSyntaxError(f"face slot {t}:{ff} out of range", lineno, col)
            if (a, f) == (b, g):
                raise PatternSyntaxError(f"face {a}:{f} glued to itself", lineno, col)
            claim((a, f), lineno, col)
            claim((b, g), lineno, col)
            gluings.append(FaceGluing((a, f), (b, g), perm))  # type: ignore[arg-type]
            continue
        m = _FREE_RE.match(line)
        if m:
            if not allow_free:
                raise PatternSyntaxError("'free' requires allow_free", lineno, col)
            a, f = int(m.group(1)), int(m.group(2))
            if a >= header or f > 3:
                raise PatternSyntaxError(f"face slot {a}:{f} out of range", lineno, col)
            claim((a, f), lineno, col)
            free.append(((a, f), lineno))
            continue
        raise PatternSyntaxError(f"unrecognized line {line!r}", lineno, col)

    if header is None:
        raise PatternSyntaxError("missing 'tetrahedra N' header", 1)
    if not allow_free and len(seen) != 4 * header:
        raise PatternError(
            f"face count mismatch: {len(seen)} of {4 * header} faces glued and allow_free not set"
        )
    return GluingPattern(header, tuple(gluings), allow_free)


def serialize_pattern(p: GluingPattern) -> str:
    lines = [f"tetrahedra {p.tet_count}"]
    if p.allow_free:
        lines.append("allow_free")
    for g in p.gluings:
        lines.append(
            f"glue {g.src[0]}:{g.src[1]} {g.dst[0]}:{g.dst[1]} perm={''.join(map(str, g.perm))}"
        )
    for t, f in p.free_faces():
        lines.append(f"free {t}:{f}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# orbit structures


@dataclass(frozen=True)
class Wedge:
    """One tetrahedron edge slot seen from inside an edge class.

    The wedge runs from ``tail`` to ``head`` (vertices of ``tet``); the
    traversal enters through face ``entry`` and leaves through face ``exit``.
    """

    tet: int
    tail: int
    head: int
    entry: int
    exit: int

    @property
    def slot(self) -> tuple[int, int, int]:
        a, b = sorted((self.tail, self.head))
        return (self.tet, a, b)


@dataclass(frozen=True)
class EdgeClass:
    id: int
    wedges: tuple[Wedge, ...]
    closed: bool
    ends: tuple[int, int]  # link-vertex ids of the tail end and the head end

    @property
    def valence(self) -> int:
        return len(self.wedges)


@dataclass(frozen=True)
class VertexClass:
    id: int
    corners: tuple[Slot, ...]


@dataclass(frozen=True)
class LinkSurface:
    cusp: int
    triangles: tuple[Slot, ...]
    sides: tuple[int, ...]
    link_vertices: tuple[int, ...]
    boundary_sides: tuple[int, ...]
    euler_char: int
    genus: Optional[int]

    @property
    def closed(self) -> bool:
        return not self.boundary_sides


@dataclass(frozen=True)
class Combinatorics:
    """Everything derived from a pattern by orbit enumeration.

    Side ids, link-vertex ids, face ids, cusp ids and edge ids are all
    assigned in order of the minimal slot of the class.
    """

    pattern: GluingPattern
    cusps: tuple[VertexClass, ...]
    edges: tuple[EdgeClass, ...]
    faces: tuple[tuple[Slot, ...], ...]
    sides: tuple[tuple[tuple[int, int, int], ...], ...]
    link_vertices: tuple[tuple[tuple[int, int, int], ...], ...]
    links: tuple[LinkSurface, ...]
    cusp_of: dict = field(repr=False, compare=False)
    edge_of: dict = field(repr=False, compare=False)
    face_of: dict = field(repr=False, compare=False)
    side_of: dict = field(repr=False, compare=False)
    lv_of: dict = field(repr=False, compare=False)
    lv_edge: tuple[tuple[int, int], ...] = field(repr=False, compare=False)
    lv_boundary: tuple[bool, ...] = field(repr=False, compare=False)
    side_cusp: tuple[int, ...] = field(repr=False, compare=False)

    def side(self, tet: int, vertex: int, face: int) -> int:
        return self.side_of[(tet, vertex, face)]

    def edge(self, tet: int, a: int, b: int) -> int:
        return self.edge_of[(tet, min(a, b), max(a, b))]

    def edge_end(self, tet: int, vertex: int, other: int) -> int:
        return self.lv_of[(tet, vertex, other)]

    @property
    def self_reversed_edges(self) -> list[int]:
        """Edges whose two ends fall in the same link vertex (edge glued to itself backwards)."""
        return [e.id for e in self.edges if e.ends[0] == e.ends[1]]


def _classes(items: list, unions: Iterable[tuple]) -> list[tuple]:
    ds = DisjointSet(items)
    for a, b in unions:
        ds.merge(a, b)
    groups = [tuple(sorted(s)) for s in ds.subsets()]
    groups.sort()
    return groups


def _trace_edge(p: GluingPattern, tet: int, a: int, b: int) -> tuple[list[Wedge], bool]:
    """Walk the faces around edge ``{a, b}`` of ``tet`` (a < b).

    Local convention: the starting wedge is oriented a -> b and leaves through
    the face opposite the smaller of the two remaining vertices.
    """
    c, d = [x for x in range(4) if x not in (a, b)]
    start = Wedge(tet, a, b, entry=d, exit=c)
    forward = [start]
    visited = {start.slot}
    cur = start
    closed = False
    while True:
        nb = p.neighbor(cur.tet, cur.exit)
        if nb is None:
            break
        (t2, f2), perm = nb
        tail, head = perm[cur.tail], perm[cur.head]
        other = [x for x in range(4) if x not in (tail, head, f2)][0]
        nxt = Wedge(t2, tail, head, entry=f2, exit=other)
        if nxt.slot in visited:
            # back at the start, or (degenerate) at a wedge seen in reverse
            closed = True
            break
        visited.add(nxt.slot)
        forward.append(nxt)
        cur = nxt
    if closed:
        return forward, True
    backward: list[Wedge] = []
    cur = start
    while True:
        nb = p.neighbor(cur.tet, cur.entry)
        if nb is None:
            break
        (t2, f2), perm = nb
        tail, head = perm[cur.tail], perm[cur.head]
        other = [x for x in range(4) if x not in (tail, head, f2)][0]
        prv = Wedge(t2, tail, head, entry=other, exit=f2)
        backward.append(prv)
        cur = prv
    return backward[::-1] + forward, False


@functools.lru_cache(maxsize=256)
def analyze(p: GluingPattern) -> Combinatorics:
    n = p.tet_count
    corner_slots = [(t, v) for t in range(n) for v in range(4)]
    end_slots = [(t, v, w) for t in range(n) for v in range(4) for w in range(4) if v != w]
    side_slots = [(t, v, f) for t in range(n) for v in range(4) for f in range(4) if v != f]

    corner_u, end_u, side_u = [], [], []
    for g in p.gluings:
        (a, f), (b, gg) = g.src, g.dst
        perm = g.perm
        for v in range(4):
            if v == f:
                continue
            corner_u.append(((a, v), (b, perm[v])))
            side_u.append(((a, v, f), (b, perm[v], gg)))
            for w in range(4):
                if w != f and w != v:
                    end_u.append(((a, v, w), (b, perm[v], perm[w])))

    cusp_groups = _classes(corner_slots, corner_u)
    cusps = tuple(VertexClass(i, grp) for i, grp in enumerate(cusp_groups))
    cusp_of = {s: c.id for c in cusps for s in c.corners}

    side_groups = _classes(side_slots, side_u)
    side_of = {s: i for i, grp in enumerate(side_groups) for s in grp}
    lv_groups = _classes(end_slots, end_u)
    lv_of = {s: i for i, grp in enumerate(lv_groups) for s in grp}

    face_groups = []
    face_seen = set()
    for t in range(n):
        for f in range(4):
            if (t, f) in face_seen:
                continue
            nb = p.neighbor(t, f)
            grp = ((t, f),) if nb is None else tuple(sorted([(t, f), nb[0]]))
            face_seen.update(grp)
            face_groups.append(grp)
    face_of = {s: i for i, grp in enumerate(face_groups) for s in grp}

    edges = []
    edge_of = {}
    for t in range(n):
        for a in range(4):
            for b in range(a + 1, 4):
                if (t, a, b) in edge_of:
                    continue
                wedges, closed = _trace_edge(p, t, a, b)
                eid = len(edges)
                for w in wedges:
                    edge_of[w.slot] = eid
                # ends are read off the wedge at which the walk started
                start = next(w for w in wedges if w.slot == (t, a, b) and w.tail == a)
                ends = (lv_of[(t, start.tail, start.head)], lv_of[(t, start.head, start.tail)])
                edges.append(EdgeClass(eid, tuple(wedges), closed, ends))

    lv_edge = []
    for i, grp in enumerate(lv_groups):
        t, v, w = grp[0]
        e = edges[edge_of[(t, min(v, w), max(v, w))]]
        lv_edge.append((e.id, 0 if e.ends[0] == i else 1))

    side_free = [len(grp) == 1 for grp in side_groups]
    lv_boundary = [False] * len(lv_groups)
    for i, grp in enumerate(lv_groups):
        for t, v, w in grp:
            # the two sides of triangle (t, v) meeting at this corner
            for f in range(4):
                if f not in (v, w) and side_free[side_of[(t, v, f)]]:
                    lv_boundary[i] = True

    orient = check_orientable(p)
    side_cusp = [cusp_of[grp[0][:2]] for grp in side_groups]
    links = []
    for c in cusps:
        tris = c.corners
        sides = tuple(sorted({side_of[(t, v, f)] for t, v in tris for f in range(4) if f != v}))
        lvs = tuple(sorted({lv_of[(t, v, w)] for t, v in tris for w in range(4) if w != v}))
        bnd = tuple(s for s in sides if side_free[s])
        chi = len(lvs) - len(sides) + len(tris)
        genus = None
        if not bnd and orient.orientable and chi % 2 == 0:
            genus = (2 - chi) // 2
        links.append(LinkSurface(c.id, tris, sides, lvs, bnd, chi, genus))

    return Combinatorics(
        pattern=p,
        cusps=cusps,
        edges=tuple(edges),
        faces=tuple(face_groups),
        sides=tuple(side_groups),
        link_vertices=tuple(lv_groups),
        links=tuple(links),
        cusp_of=cusp_of,
        edge_of=edge_of,
        face_of=face_of,
        side_of=side_of,
        lv_of=lv_of,
        lv_edge=tuple(lv_edge),
        lv_boundary=tuple(lv_boundary),
        side_cusp=tuple(side_cusp),
    )


def compute_edge_classes(p: GluingPattern) -> list[EdgeClass]:
    return list(analyze(p).edges)


def compute_cusps(p: GluingPattern) -> list[VertexClass]:
    return list(analyze(p).cusps)


def build_link_surfaces(p: GluingPattern) -> list[LinkSurface]:
    return list(analyze(p).links)


# ---------------------------------------------------------------------------
# orientation


@dataclass(frozen=True)
class OrientationCheck:
    orientable: bool
    signs: Optional[tuple[int, ...]] = None
    witness: tuple[FaceGluing, ...] = ()


def check_orientable(p: GluingPattern) -> OrientationCheck:
    """Assign a sign to every tetrahedron so that each gluing reverses orientation.

    A gluing is consistent when ``sign(src) * sign(dst) * parity(perm) == -1``.
    On failure the witness is a cycle of gluings along which the product of
    these constraints is inconsistent.
    """
    n = p.tet_count
    signs: list[Optional[int]] = [None] * n
    via: list[Optional[FaceGluing]] = [None] * n  # BFS tree edge into each tet
    adj: dict[int, list[FaceGluing]] = {t: [] for t in range(n)}
    for g in p.gluings:
        adj[g.src[0]].append(g)
        if g.dst[0] != g.src[0]:
            adj[g.dst[0]].append(g)

    def path_to_root(t: int) -> list[FaceGluing]:
        out = []
        while via[t] is not None:
            g = via[t]
            out.append(g)
            t = g.src[0] if g.dst[0] == t else g.dst[0]
        return out

    for root in range(n):
        if signs[root] is not None:
            continue
        signs[root] = 1
        queue = deque([root])
        while queue:
            t = queue.popleft()
            for g in adj[t]:
                other = g.dst[0] if g.src[0] == t else g.src[0]
                want = -signs[t] * perm_parity(g.perm)
                if signs[other] is None:
                    signs[other] = want
                    via[other] = g
                    queue.append(other)
                elif signs[other] != want:
                    pa, pb = path_to_root(t), path_to_root(other)
                    common = set(pa) & set(pb)
                    cycle = [x for x in pa if x not in common]
                    cycle += [x for x in pb if x not in common][::-1]
                    cycle.append(g)
                    return OrientationCheck(False, None, tuple(cycle))
    return OrientationCheck(True, tuple(signs))  # type: ignore[arg-type]


# ---------------------------------------------------------------------------
# builtins

# example1_thurston: two tetrahedra, all twelve edge slots in one class, one cusp.
# figure_eight: knot complement (two tetrahedra, edges b and c).
# example3_genus3: transcribed from the face list A1..D4 with A,B,C,D = 0,1,2,3.
# whitehead: link complement (four tetrahedra, two cusps).
_BUILTIN_TEXT = {
    "example1_thurston": """\
tetrahedra 2
glue 0:0 1:0 perm=0132
glue 0:1 1:1 perm=2103
glue 0:2 1:3 perm=1230
glue 0:3 1:2 perm=1302
""",
    "figure_eight": """\
tetrahedra 2
glue 0:0 1:0 perm=0213
glue 0:1 1:1 perm=2103
glue 0:2 1:3 perm=1230
glue 0:3 1:2 perm=1302
""",
    "example3_genus3": """\
# B1C1D1=C2D2B2, A1C1D1=C2D2A2, D2B2A2=B3A3D3, C2B2A2=B3A3C3,
# B3C3D3=C4D4B4, A3C3D3=C4D4A4, D4B4A4=B1A1D1, C4B4A4=B1A1C1
tetrahedra 4
glue 0:0 1:0 perm=0231
glue 0:1 1:1 perm=2130
glue 1:2 2:2 perm=3021
glue 1:3 2:3 perm=2013
glue 2:0 3:0 perm=0231
glue 2:1 3:1 perm=2130
glue 3:2 0:2 perm=3021
glue 3:3 0:3 perm=2013
""",
    "whitehead": """\
tetrahedra 4
glue 0:0 1:1 perm=1302
glue 0:1 2:1 perm=2103
glue 0:2 1:3 perm=0132
glue 0:3 3:2 perm=0132
glue 1:0 3:0 perm=0321
glue 1:2 2:3 perm=0132
glue 2:0 3:1 perm=1302
glue 2:2 3:3 perm=0132
""",
}

BUILTIN_NAMES = ("example1_thurston", "figure_eight", "example3_genus3", "whitehead")


def builtin_text(name: str) -> str:
    if name not in _BUILTIN_TEXT:
        raise KeyError(f"unknown builtin {name!r}; choose from {', '.join(BUILTIN_NAMES)}")
    return _BUILTIN_TEXT[name]


def builtin(name: str) -> GluingPattern:
    return parse_pattern(builtin_text(name))


# ---------------------------------------------------------------------------
# random patterns (property tests and surveys)


def _odd_perm_for(f: int, g: int, rng: random.Random) -> Perm:
    rest_src = [x for x in range(4) if x != f]
    rest_dst = [x for x in range(4) if x != g]
    while True:
        img = rest_dst[:]
        rng.shuffle(img)
        perm = [0] * 4
        perm[f] = g
        for a, b in zip(rest_src, img):
            perm[a] = b
        if perm_parity(perm) == -1:
            return tuple(perm)  # type: ignore[return-value]


def random_closed_pattern(
    tet_count: int, rng: random.Random, max_tries: int = 10_000
) -> GluingPattern:
    """A random connected, orientable, closed pattern.

    Every tetrahedron is given the same orientation and every vertex map is
    odd, so orientability holds by construction.  Disconnected patterns and
    patterns with an edge identified to itself backwards are rejected.
    """
    for _ in range(max_tries):
        slots = [(t, f) for t in range(tet_count) for f in range(4)]
        rng.shuffle(slots)
        gluings = []
        ok = True
        for i in range(0, len(slots), 2):
            a, b = slots[i], slots[i + 1]
            gluings.append(FaceGluing(a, b, _odd_perm_for(a[1], b[1], rng)))
        p = GluingPattern(tet_count, tuple(gluings))
        if not _connected(p):
            ok = False
        elif analyze(p).self_reversed_edges:
            ok = False
        if ok:
            return p
    raise RuntimeError("no valid random pattern found")


def _connected(p: GluingPattern) -> bool:
    ds = DisjointSet(range(p.tet_count))
    for g in p.gluings:
        ds.merge(g.src[0], g.dst[0])
    return ds.n_subsets == 1
