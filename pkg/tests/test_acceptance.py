"""Acceptance criteria 1-9, each at its stated tolerance.

Every test records a PASS/FAIL line in ``RESULTS``; conftest prints them in
the terminal summary.  Run this file directly to print them without pytest.
"""
import math
import os
import random
import subprocess
import sys
import textwrap

import numpy as np

import oracles
from idealteich.explore import (
    EXAMPLE3_CHART,
    FIGURE_EIGHT_CHART,
    GOLDEN_HI,
    GOLDEN_LO,
    WHITEHEAD_CHART,
    bisect_domain,
    fig8_phi,
    find_complete,
    injectivity_grid,
    whitehead_sin_half_y,
    whitehead_xy,
)
from idealteich.metrics import DomainError, edge_report, gauss_bonnet_residuals, realize, shift_coordinates
from idealteich.pattern import (
    analyze,
    builtin,
    builtin_text,
    check_orientable,
    parse_pattern,
    random_closed_pattern,
    serialize_pattern,
)
from idealteich.shape import TetShape, angles_from_shifts, shifts_from_angles
from idealteich.teich import angle_relation_system, chart_for, dimension_formula, dimension_skeleton

RESULTS: dict[int, str] = {}
TWO_PI = 2 * math.pi


class Check:
    """Collects failed sub-clauses of one criterion."""

    def __init__(self, number: int):
        self.number = number
        self.failures: list[str] = []
        self.notes: list[str] = []

    def __call__(self, ok: bool, what: str):
        if not ok:
            self.failures.append(what)
        return ok

    def note(self, text: str):
        self.notes.append(text)

    def finish(self):
        status = "PASS" if not self.failures else "FAIL"
        detail = "; ".join(self.failures or self.notes)
        RESULTS[self.number] = f"criterion {self.number}: {status}" + (f" ({detail})" if detail else "")
        assert not self.failures, RESULTS[self.number]


def legal_point(p, chart, rng):
    x = [rng.uniform(-1.0, 1.0) for _ in range(chart.dim)]
    for _ in range(60):
        try:
            return realize(p, chart, x)
        except DomainError:
            x = [v / 2 for v in x]
    return realize(p, chart, [0.0] * chart.dim)


def test_criterion_1_dimension():
    chk = Check(1)
    want = {"example1_thurston": 0, "figure_eight": 1, "example3_genus3": 1, "whitehead": 2}
    for name, d in want.items():
        p = builtin(name)
        got = (dimension_formula(p), dimension_skeleton(p).dim, chart_for(p).dim)
        chk(got == (d, d, d) and all(isinstance(v, int) for v in got), f"{name}: {got} != {d}")
    chk.note("dims 0, 1, 1, 2 three ways")
    chk.finish()


def test_criterion_2_single_tetrahedron():
    chk = Check(2)
    ars = angle_relation_system(parse_pattern("tetrahedra 1\nallow_free\n"))
    chk(ars.rank == 4, f"rank {ars.rank}")
    chk(oracles.same_up_to_permutation(ars.matrix, oracles.single_tet_incidence()), "matrix differs")
    chk.finish()


def test_criterion_3_golden_family():
    chk = Check(3)
    p = builtin("figure_eight")
    c = FIGURE_EIGHT_CHART
    cx = analyze(p)
    ab = c.side_id("AB")
    worst = 0.0
    for r in np.linspace(GOLDEN_LO + 0.01, GOLDEN_HI - 0.01, 101):
        rs = realize(p, None, c.to_params(r))
        got = sorted(rs.length(s) / rs.length(ab) for s in range(len(cx.sides)))
        want = sorted(v for v, m in oracles.fig8_length_table(r).items() for _ in range(m))
        worst = max(worst, max(abs(a - b) for a, b in zip(got, want)))
    chk(worst < 1e-10, f"length table off by {worst:.2e}")
    hi = c.from_params(bisect_domain(p, None, (0.0,), c.to_params(1.7)))[0]
    lo = c.from_params(bisect_domain(p, None, (0.0,), c.to_params(0.55)))[0]
    chk(abs(hi - GOLDEN_HI) < 1e-6 and abs(lo - GOLDEN_LO) < 1e-6, f"boundary ({lo}, {hi})")
    chk.note(f"table {worst:.1e}, boundary ({lo:.9f}, {hi:.9f})")
    chk.finish()


def test_criterion_4_mostow_point():
    chk = Check(4)
    p = builtin("figure_eight")
    for r0 in (0.3, -0.5, 0.8, -0.8, 0.1):
        try:
            res = find_complete(p, start=(r0,))
        except Exception as exc:  # reported, not hidden
            chk(False, f"start {r0}: {exc}")
            continue
        chk(res.mostow_residual < 1e-9, f"start {r0}: residual {res.mostow_residual:.2e}")
        angles = [a for s in res.structure.tet_shapes for a in s.as_tuple()]
        chk(max(abs(a - math.pi / 3) for a in angles) < 1e-9, f"start {r0}: not equilateral")
    chk.finish()


def test_criterion_5_monotonicity():
    chk = Check(5)
    vals = [fig8_phi(r) for r in np.linspace(GOLDEN_LO + 1e-3, GOLDEN_HI - 1e-3, 200)]
    chk(all(b > a for a, b in zip(vals, vals[1:])), "fig8_phi not strictly increasing")
    c = FIGURE_EIGHT_CHART
    worst = 0.0
    for r in np.linspace(GOLDEN_LO + 0.01, GOLDEN_HI - 0.01, 101):
        rs = realize(builtin("figure_eight"), None, c.to_params(r))
        worst = max(worst, abs(c.theta(rs, "c") - (TWO_PI - 2 * fig8_phi(r))))
    chk(worst < 1e-9, f"theta(c) vs closed form off by {worst:.2e}")
    chk.note(f"closed form within {worst:.1e}")
    chk.finish()


def test_criterion_6_whitehead():
    chk = Check(6)
    p = builtin("whitehead")
    c = WHITEHEAD_CHART
    chk(chart_for(p).dim == 2, "dim != 2")
    rs0 = realize(p, None, (0.0, 0.0))
    kinds = [r.kind for r in edge_report(rs0)]
    chk(all(k == "regular" for k in kinds),
        "(0,0) not all regular: theta/pi = " + ", ".join(f"{t / math.pi:.4f}" for t in rs0.edge_angles))
    worst, pts = 0.0, []
    for t in np.linspace(0.9, 1.1, 21):
        for s in np.linspace(1.3, 1.5, 21):
            pts.append(c.to_params(t, s))
            rs = realize(p, None, pts[-1])
            x, _ = whitehead_xy(rs)
            y = 2 * math.asin(whitehead_sin_half_y(t, x))
            worst = max(worst, abs(c.theta(rs, "c") - 2 * (math.pi + y)), abs(c.theta(rs, "d") - 2 * x))
    chk(worst < 1e-8, f"closed form off by {worst:.2e}")
    rep = injectivity_grid(p, grid=pts, edges=(c.edges["c"], c.edges["d"]))
    chk(rep.skipped == 0 and rep.min_distance > 1e-6, f"min distance {rep.min_distance:.2e}")
    chk.note(f"grid closed form {worst:.1e}, min distance {rep.min_distance:.2e}")
    chk.finish()


def test_criterion_7_example3():
    chk = Check(7)
    p = builtin("example3_genus3")
    (link,) = analyze(p).links
    chk(link.closed and link.genus == 3 and check_orientable(p).orientable, "link is not closed genus 3")
    c = EXAMPLE3_CHART
    worst = 0.0
    for r in np.linspace(GOLDEN_LO + 0.01, GOLDEN_HI - 0.01, 101):
        rs = realize(p, None, c.to_params(r))
        x, y, z = (c.angle(rs, k) for k in "xyz")
        tb = c.theta(rs, "b")
        worst = max(worst, abs(tb - 4 * (x + 2 * y)), abs(tb - (4 * math.pi + 4 * (y - z))))
    chk(worst < 1e-9, f"theta(b) off by {worst:.2e}")
    chk.note(f"genus 3, relation within {worst:.1e} on 101 points")
    chk.finish()


def test_criterion_8_properties():
    chk = Check(8)
    rng = np.random.default_rng(8)
    eps = 1e-3
    worst = {"sum": 0.0, "trip": 0.0, "eq4": 0.0}
    for _ in range(1000):
        a = rng.uniform(eps, math.pi - 2 * eps)
        b = eps + rng.uniform() * (math.pi - a - 2 * eps)
        s = TetShape.from_two(a, b)
        k = shifts_from_angles(s)
        back = angles_from_shifts(k.kappa2, k.kappa3)
        worst["sum"] = max(worst["sum"], abs(sum(k.as_tuple())))
        worst["trip"] = max(worst["trip"], max(abs(x - y) for x, y in zip(back.as_tuple(), s.as_tuple())))
        eq4 = abs(math.exp(k.kappa2) - math.cos(s.beta) - math.cos(s.alpha) * math.exp(-k.kappa3))
        worst["eq4"] = max(worst["eq4"], eq4)
    chk(worst["sum"] < 1e-12, f"kappa sum {worst['sum']:.2e}")
    chk(worst["trip"] < 1e-12, f"round trip {worst['trip']:.2e}")
    chk(worst["eq4"] < 1e-12, f"shift relation {worst['eq4']:.2e}")

    prng = random.Random(8)
    bad = []
    for i in range(50):
        p = random_closed_pattern(prng.randint(1, 5), prng)
        cx = analyze(p)
        d = dimension_formula(p)
        ch = chart_for(p)
        if not (dimension_skeleton(p).dim == d == ch.dim == oracles.kernel_dimension(p)):
            bad.append(f"pattern {i}: dimensions disagree")
        if angle_relation_system(p).rank != len(cx.cusps):
            bad.append(f"pattern {i}: relation rank != #cusps")
        for rs in (realize(p, ch, [0.0] * ch.dim), legal_point(p, ch, prng)):
            if max(gauss_bonnet_residuals(rs)) >= 1e-9:
                bad.append(f"pattern {i}: gauss-bonnet")
            if max(abs(a - b) for a, b in zip(rs.edge_angles, rs.edge_angles_head)) >= 1e-9:
                bad.append(f"pattern {i}: edge ends disagree")
            sc = shift_coordinates(rs)
            if max(abs(sc.cycle_sum(e.id)) for e in cx.edges) >= 1e-9:
                bad.append(f"pattern {i}: shift cycle sum")
    for b in bad:
        chk(False, b)
    chk.note("1000 shapes, 50 patterns")
    chk.finish()


CLI_BATTERY = textwrap.dedent(
    """
    import contextlib, io, os, sys
    from idealteich.cli import run
    out = io.StringIO()
    tmp = "."  # outputs land in the working directory
    jobs = []
    for name in ("example1_thurston", "figure_eight", "example3_genus3", "whitehead"):
        for cmd in ("info", "links", "dim", "relations", "realize"):
            for fmt in ("text", "json"):
                jobs.append([cmd, "--builtin", name, "--format", fmt])
        jobs.append(["examples", name])
        jobs.append(["develop", "--builtin", name, "-o", os.path.join(tmp, "d.svg")])
    jobs += [
        ["examples"],
        ["complete", "--builtin", "figure_eight", "--start", "0.3"],
        ["complete", "--builtin", "whitehead", "--start", "0.05,0.3"],
        ["sweep", "--builtin", "figure_eight", "--grid=-1:1:9", "--outputs", "angles,shifts,residuals",
         "-o", os.path.join(tmp, "s.csv")],
        ["sweep", "--builtin", "whitehead", "--grid=-0.3:0.3:4", "--grid=-0.3:0.3:4", "-o", os.path.join(tmp, "s.csv")],
    ]
    for job in jobs:
        buf = io.StringIO()
        with contextlib.redirect_stdout(buf):
            code = run(job)
        sys.stdout.write(f"$ {' '.join(job)} -> {code}\\n" + buf.getvalue())
        if "-o" in job:
            with open(job[job.index("-o") + 1], "rb") as fh:
                sys.stdout.write(fh.read().decode("utf-8"))
    """
)


def test_criterion_9_determinism(tmp_path):
    chk = Check(9)
    outs = []
    for seed in ("1", "2"):
        env = dict(os.environ, PYTHONHASHSEED=seed)
        work = tmp_path / seed
        work.mkdir()
        proc = subprocess.run([sys.executable, "-c", CLI_BATTERY], capture_output=True, env=env, cwd=work)
        chk(proc.returncode == 0, f"battery exited {proc.returncode}: {proc.stderr[-300:]!r}")
        outs.append(proc.stdout)
    chk(outs[0] == outs[1] and len(outs[0]) > 0, "CLI output differs between runs")
    rng = random.Random(9)
    texts = [serialize_pattern(parse_pattern(builtin_text(n))) for n in
             ("example1_thurston", "figure_eight", "example3_genus3", "whitehead")]
    texts += [serialize_pattern(random_closed_pattern(rng.randint(1, 5), rng)) for _ in range(50)]
    for text in texts:
        p = parse_pattern(text)
        chk(serialize_pattern(p) == text and parse_pattern(serialize_pattern(p)) == p, "round trip changed a file")
    chk.note(f"{outs[0].count(b'$ ')} CLI runs identical, {len(texts)} files round-trip")
    chk.finish()


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_criterion_")]
    import pathlib
    import tempfile

    for fn in tests:
        try:
            if fn is test_criterion_9_determinism:
                fn(pathlib.Path(tempfile.mkdtemp()))
            else:
                fn()
        except AssertionError:
            pass
    for n in sorted(RESULTS):
        print(RESULTS[n])
