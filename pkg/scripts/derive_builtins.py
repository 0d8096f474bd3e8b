"""Search for gluing tables matching the example manifolds' invariants.

Two-tetrahedron patterns are enumerated exhaustively (all tetrahedra
positively oriented, all vertex maps odd).  Whitehead candidates are the
octahedra split into four tetrahedra around an axis, with the outer faces
paired in every orientable way; they are screened by edge and cusp counts,
first homology, the two-triangle angle identities and finally the full table
of link side lengths.

    python scripts/derive_builtins.py two
    python scripts/derive_builtins.py whitehead
"""
from __future__ import annotations

import argparse
import itertools
import math
import random

import numpy as np
import sympy
from sympy.matrices.normalforms import smith_normal_form

from idealteich.pattern import (
    FaceGluing,
    GluingPattern,
    analyze,
    perm_parity,
    serialize_pattern,
)
from idealteich.teich import chart_for
from idealteich.metrics import DomainError, realize, side_ratio_coefficients


def first_homology(p: GluingPattern) -> tuple[int, list[int]]:
    """(free rank, torsion coefficients) of the dual spine of the pattern."""
    cx = analyze(p)
    gl = list(p.gluings)
    index = {g.src: i for i, g in enumerate(gl)}
    index.update({g.dst: i for i, g in enumerate(gl)})
    d1 = sympy.zeros(p.tet_count, len(gl))
    for j, g in enumerate(gl):
        d1[g.dst[0], j] += 1
        d1[g.src[0], j] -= 1
    d2 = sympy.zeros(len(gl), len(cx.edges))
    for e in cx.edges:
        for w in e.wedges:
            g = gl[index[(w.tet, w.exit)]]
            d2[index[(w.tet, w.exit)], e.id] += 1 if g.src == (w.tet, w.exit) else -1
    kernel_rank = len(gl) - d1.rank()
    free = kernel_rank - d2.rank()
    snf = smith_normal_form(d2, domain=sympy.ZZ)
    diag = [abs(snf[i, i]) for i in range(min(snf.shape))]
    torsion = sorted(int(x) for x in diag if x not in (0, 1))
    return free, torsion


def odd_maps(f: int, g: int):
    src = [x for x in range(4) if x != f]
    for img in itertools.permutations([x for x in range(4) if x != g]):
        perm = [0] * 4
        perm[f] = g
        for a, b in zip(src, img):
            perm[a] = b
        if perm_parity(perm) == -1:
            yield tuple(perm)


def matchings(items):
    if not items:
        yield []
        return
    a = items[0]
    for i in range(1, len(items)):
        rest = items[1:i] + items[i + 1 :]
        for m in matchings(rest):
            yield [(a, items[i])] + m


def two_tet_patterns():
    slots = [(t, f) for t in range(2) for f in range(4)]
    for m in matchings(slots):
        for perms in itertools.product(*[list(odd_maps(a[1], b[1])) for a, b in m]):
            yield GluingPattern(2, tuple(FaceGluing(a, b, pm) for (a, b), pm in zip(m, perms)))


def survey_two():
    seen = {}
    for p in two_tet_patterns():
        cx = analyze(p)
        if cx.self_reversed_edges or len(cx.cusps) != 1:
            continue
        key = (len(cx.edges), tuple(sorted(e.valence for e in cx.edges)),
               tuple(l.euler_char for l in cx.links))
        if key[0] > 2:
            continue
        h1 = first_homology(p)
        seen.setdefault((key, tuple(h1[1]), h1[0]), []).append(p)
    for key, pats in sorted(seen.items(), key=lambda kv: str(kv[0])):
        print(key, len(pats))
        print(serialize_pattern(pats[0]))


def whitehead_identities(p: GluingPattern, rng: random.Random, trials: int = 4):
    """Look for two link triangles and two edges obeying the Whitehead formulas.

    Triangle P has corners (D, C, A) with |DC| = s, |CA| = t, |AD| = 1 and
    triangle Q has corners (C', A', B') with |C'A'| = t, |A'B'| = t^2,
    |B'C'| = s, where side DC of P and side B'C' of Q are the same link side
    with D = C' and C = B'.  With x = A + A' and y = C' - C the edges c, d
    must satisfy theta(c) = 2(pi + y) and theta(d) = 2x throughout the family.
    Returns tuples ((tP, vP, D, C, A), (tQ, vQ, C', A', B'), [(c, d), ...]).
    """
    cx = analyze(p)
    ch = chart_for(p)
    points = []
    while len(points) < trials:
        params = [rng.uniform(-0.3, 0.3) for _ in range(ch.dim)]
        try:
            points.append(realize(p, ch, params))
        except DomainError:
            continue
    hits = []
    tris = [(t, v) for t in range(p.tet_count) for v in range(4)]
    for (tp, vp), (tq, vq) in itertools.permutations(tris, 2):
        if cx.cusp_of[(tp, vp)] != cx.cusp_of[(tq, vq)]:
            continue
        op = [w for w in range(4) if w != vp]
        oq = [w for w in range(4) if w != vq]
        for d_, c_, a_ in itertools.permutations(op):
            for c2, a2, b2 in itertools.permutations(oq):
                # side DC of P (on face A) is side B'C' of Q (on face A')
                if cx.side(tp, vp, a_) != cx.side(tq, vq, a2):
                    continue
                if cx.lv_of[(tp, vp, d_)] != cx.lv_of[(tq, vq, c2)]:
                    continue
                ok_all = None
                for rs in points:
                    L = lambda t, v, f: rs.length(cx.side(t, v, f))
                    ang = lambda t, v, w: rs.corner_angles[(t, v, w)]
                    ca, ad = L(tp, vp, d_), L(tp, vp, c_)
                    ca2, ab2 = L(tq, vq, b2), L(tq, vq, c2)
                    if abs(ca - ca2) > 1e-9 * ca or abs(ad * ab2 - ca * ca) > 1e-9 * ca * ca:
                        ok_all = None
                        break
                    x = ang(tp, vp, a_) + ang(tq, vq, a2)
                    y = ang(tq, vq, c2) - ang(tp, vp, c_)
                    cands = set()
                    for e in range(len(cx.edges)):
                        for d in range(len(cx.edges)):
                            if e != d and abs(rs.edge_angles[e] - 2 * (math.pi + y)) < 1e-8 \
                                    and abs(rs.edge_angles[d] - 2 * x) < 1e-8:
                                cands.add((e, d))
                    ok_all = cands if ok_all is None else ok_all & cands
                    if not ok_all:
                        break
                if ok_all:
                    hits.append(((tp, vp, d_, c_, a_), (tq, vq, c2, a2, b2), sorted(ok_all)))
    return hits


def octahedral_patterns():
    """Closed orientable 4-tetrahedron patterns from an octahedron split along an axis.

    T_i has vertices (N, S, E_i, E_i+1); faces 2 and 3 are glued around the
    axis NS, the eight outer faces are paired in every odd way.
    """
    internal = tuple(FaceGluing((i, 2), ((i + 1) % 4, 3), (0, 1, 3, 2)) for i in range(4))
    outer = [(t, f) for t in range(4) for f in (0, 1)]
    for m in matchings(outer):
        options = []
        for a, b in m:
            va = [v for v in range(4) if v != a[1]]
            vb = [v for v in range(4) if v != b[1]]
            opts = []
            for img in itertools.permutations(vb):
                perm = [0] * 4
                perm[a[1]] = b[1]
                for x, y in zip(va, img):
                    perm[x] = y
                if perm_parity(perm) == -1:
                    opts.append(FaceGluing(a, b, tuple(perm)))
            options.append(opts)
        for combo in itertools.product(*options):
            try:
                yield GluingPattern(4, internal + combo)
            except ValueError:
                continue


def target_tables(t: float, s: float):
    """Side triples of the two cusp links in the target Whitehead structure."""
    big = [
        (1, t, s), (t * t, t**3 / s, t * t / s), (t, t * t / s, t / s),
        (t, t * t, s), (t / s, t * t / s, 1), (t * t / s, t**3 / s, t),
        (t * t / s, t, t**3 / s), (t, s, t * t), (t / s, 1, t * t / s),
        (t**3 / s, t * t, t * t / s), (t * t / s, t, t / s), (t, s, 1),
    ]
    small = [(1, t, s), (t, t * t, s), (t, s, t * t), (t, s, 1)]
    return small, big


def _normalized(triples):
    m = min(min(x) for x in triples)
    return sorted(tuple(round(y / m, 9) for y in sorted(x)) for x in triples)


def survey_whitehead(seed: int, t0: float = 1.13, s0: float = 1.41):
    """Screen octahedral patterns by invariants, homology, angle identities and side tables."""
    rng = random.Random(seed)
    small, big = target_tables(t0, s0)
    want = (_normalized(small), _normalized(big))
    matches = []
    for p in octahedral_patterns():
        cx = analyze(p)
        if len(cx.edges) != 4 or len(cx.cusps) != 2 or cx.self_reversed_edges:
            continue
        if any(l.euler_char != 0 for l in cx.links):
            continue
        if sorted(len(c.corners) for c in cx.cusps) != [4, 12]:
            continue
        if first_homology(p) != (2, []):
            continue
        hits = whitehead_identities(p, rng)
        if not hits:
            continue
        ch = chart_for(p)
        (tp, vp, d_, c_, a_), _, _ = hits[0]
        ad, ca, dc = cx.side(tp, vp, c_), cx.side(tp, vp, d_), cx.side(tp, vp, a_)
        m = [side_ratio_coefficients(ch, ca, ad), side_ratio_coefficients(ch, dc, ad)]
        rs = realize(p, ch, np.linalg.solve(np.array(m), [math.log(t0), math.log(s0)]))
        per = sorted(
            ([tuple(rs.length(cx.side(t, v, f)) for f in range(4) if f != v) for t, v in c.corners] for c in cx.cusps),
            key=len,
        )
        if (_normalized(per[0]), _normalized(per[1])) == want:
            matches.append(p)
            print(serialize_pattern(p))
            print("   valences", [e.valence for e in cx.edges], "identities", hits[0])
    print(f"{len(matches)} matching pattern(s)")
    return matches


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("what", choices=["two", "whitehead"])
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    if args.what == "two":
        survey_two()
    else:
        survey_whitehead(args.seed)


if __name__ == "__main__":
    main()
