"""Walk the figure-eight family across its legal interval.

Prints r, the two edge angles over pi, the closed form 2pi - 2 phi(r) and the
difference; then the bisected domain boundary and the Newton result.

    python scripts/fig8_family.py --points 21
"""
import argparse
import math

import numpy as np

from idealteich.explore import FIGURE_EIGHT_CHART as C, GOLDEN_HI, GOLDEN_LO, bisect_domain, fig8_phi, find_complete
from idealteich.metrics import realize
from idealteich.pattern import builtin


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--points", type=int, default=21)
    args = ap.parse_args()
    p = builtin("figure_eight")
    print("r,theta_c/pi,theta_b/pi,closed_form/pi,diff")
    for r in np.linspace(GOLDEN_LO + 0.01, GOLDEN_HI - 0.01, args.points):
        rs = realize(p, None, C.to_params(r))
        tc, tb = C.theta(rs, "c"), C.theta(rs, "b")
        cf = 2 * math.pi - 2 * fig8_phi(r)
        print(f"{r:.6f},{tc / math.pi:.12f},{tb / math.pi:.12f},{cf / math.pi:.12f},{tc - cf:.2e}")
    lo = C.from_params(bisect_domain(p, None, (0.0,), C.to_params(0.55)))[0]
    hi = C.from_params(bisect_domain(p, None, (0.0,), C.to_params(1.7)))[0]
    print(f"# legal r in ({lo:.12f}, {hi:.12f}); golden ({GOLDEN_LO:.12f}, {GOLDEN_HI:.12f})")
    res = find_complete(p, start=C.to_params(1.4))
    print(f"# complete point r = {C.from_params(res.params)[0]:.12f} after {res.iterations} steps")


if __name__ == "__main__":
    main()
