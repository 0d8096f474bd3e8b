"""Compare the three dimension counts on random closed patterns.

    python scripts/dimension_survey.py --count 200 --max-tets 6 --seed 0
"""
import argparse
import random
from collections import Counter

from idealteich.pattern import analyze, random_closed_pattern
from idealteich.teich import angle_relation_system, chart_for, dimension_formula, dimension_skeleton


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--count", type=int, default=200)
    ap.add_argument("--max-tets", type=int, default=6)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    dims, mismatches = Counter(), 0
    for _ in range(args.count):
        p = random_closed_pattern(rng.randint(1, args.max_tets), rng)
        d = (dimension_formula(p), dimension_skeleton(p).dim, chart_for(p).dim)
        rank_ok = angle_relation_system(p).rank == len(analyze(p).cusps)
        if len(set(d)) != 1 or not rank_ok:
            mismatches += 1
            print("mismatch", d, rank_ok)
        dims[(p.tet_count, d[0])] += 1
    for (n, d), k in sorted(dims.items()):
        print(f"tetrahedra {n}, dim {d}: {k}")
    print(f"{mismatches} mismatch(es) in {args.count} patterns")


if __name__ == "__main__":
    main()
