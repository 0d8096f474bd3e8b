"""Whitehead link: the parameter origin, the complete point and injectivity.

    python scripts/whitehead_survey.py --steps 41
"""
import argparse
import math

import numpy as np

from idealteich.explore import WHITEHEAD_CHART as C, find_complete, injectivity_grid
from idealteich.metrics import edge_report, realize
from idealteich.pattern import builtin


def show(label, rs):
    t, s = C.from_params(rs.params)
    angles = " ".join(f"{th / math.pi:.6f}" for th in rs.edge_angles)
    kinds = " ".join(r.kind for r in edge_report(rs))
    print(f"{label}: t={t:.9f} s={s:.9f} theta/pi=[{angles}] {kinds}")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--steps", type=int, default=21)
    args = ap.parse_args()
    p = builtin("whitehead")
    show("origin", realize(p, None, (0.0, 0.0)))
    res = find_complete(p, start=C.to_params(1.05, 1.4))
    show("complete", res.structure)
    print("complete shapes:", [tuple(round(a / math.pi, 9) for a in s.as_tuple()) for s in res.structure.tet_shapes])
    pts = [C.to_params(t, s) for t in np.linspace(0.9, 1.1, args.steps) for s in np.linspace(1.3, 1.5, args.steps)]
    rep = injectivity_grid(p, grid=pts, edges=(C.edges["c"], C.edges["d"]))
    print(f"grid {args.steps}x{args.steps}: {rep.verdict}, min distance {rep.min_distance:.3e}, skipped {rep.skipped}")


if __name__ == "__main__":
    main()
