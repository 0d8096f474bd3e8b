"""Command line: ``python -m idealteich COMMAND [input | --builtin NAME] ...``.

Exit status is 0 on success, 1 for usage or domain errors and 2 when an
internal invariant fails.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

from .develop import develop_svg
from .explore import ConvergenceError, SweepSpec, find_complete, sweep
from .metrics import REGULAR_TOL, DomainError, EdgeEndMismatch, edge_report, mostow_residual, realize
from .pattern import (
    BUILTIN_NAMES,
    GluingPattern,
    PatternError,
    analyze,
    builtin,
    builtin_text,
    check_orientable,
    parse_pattern,
)
from .shape import ShapeError
from .teich import (
    AngleRankFinding,
    InternalInconsistency,
    angle_relation_system,
    basis_edges,
    chart_for,
    dimension_formula,
    dimension_skeleton,
)

USAGE_ERROR = 1
INTERNAL_ERROR = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError("parameters must be finite")
    return vals


def _axis(text: str) -> tuple[float, float, int]:
    parts = text.split(":")
    try:
        lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
        if len(parts) != 3:
            raise ValueError
    except (ValueError, IndexError):
        raise argparse.ArgumentTypeError(f"grid axis must be MIN:MAX:STEPS, got {text!r}")
    if steps < 2:
        raise argparse.ArgumentTypeError("grid axis needs at least 2 steps")
    return lo, hi, steps


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="idealteich", description="Structure spaces of glued ideal tetrahedra.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def cmd(name: str, help: str, output: bool = False, params: bool = False):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("input", nargs="?", help="pattern file")
        sp.add_argument("--builtin", metavar="NAME", choices=BUILTIN_NAMES)
        sp.add_argument("--tol", type=float, default=REGULAR_TOL, help="regular-edge tolerance")
        sp.add_argument("--format", choices=("text", "json"), default="text")
        sp.add_argument("-o", "--output", required=output, help="output path")
        if params:
            sp.add_argument("--params", type=_floats, default=None, help="comma-separated chart point")
        return sp

    cmd("info", "counts, edge valences, orientability")
    cmd("links", "cusp link surfaces")
    cmd("dim", "dimension computed three ways")
    cmd("relations", "cone-angle relations and basis edges")
    cmd("realize", "edge angles at a chart point", params=True)
    sp = cmd("sweep", "CSV sweep over a grid", output=True)
    sp.add_argument("--grid", type=_axis, action="append", default=[], metavar="MIN:MAX:STEPS")
    sp.add_argument("--outputs", default="angles", help="comma list of angles,shifts,residuals")
    sp = cmd("complete", "Newton search for the all-2pi point")
    sp.add_argument("--start", type=_floats, default=None)
    sp = cmd("develop", "SVG development of a cusp link", output=True, params=True)
    sp.add_argument("--cusp", type=int, default=0)
    sp = sub.add_parser("examples", help="list builtins or print one")
    sp.add_argument("name", nargs="?", choices=BUILTIN_NAMES)
    return ap


def _load(args) -> tuple[GluingPattern, str]:
    if (args.input is None) == (args.builtin is None):
        raise UsageError("give exactly one of an input file or --builtin NAME")
    if args.builtin:
        return builtin(args.builtin), args.builtin
    path = Path(args.input)
    if not path.is_file():
        raise UsageError(f"{args.input}: no such file")
    return parse_pattern(path.read_text(encoding="utf-8")), args.input


def _params(args, dim: int) -> list[float]:
    params = args.params if args.params is not None else [0.0] * dim
    if len(params) != dim:
        raise UsageError(f"chart has dimension {dim}, got {len(params)} parameter(s)")
    return params


def _emit(args, data: dict, text: str):
    out = json.dumps(data, indent=2, sort_keys=True) + "\n" if args.format == "json" else text
    if args.output:
        Path(args.output).write_bytes(out.encode("utf-8"))
    else:
        sys.stdout.write(out)


def _info(args):
    p, name = _load(args)
    cx = analyze(p)
    orient = check_orientable(p)
    data = {
        "pattern": name,
        "tetrahedra": p.tet_count,
        "gluings": len(p.gluings),
        "free_faces": len(p.free_faces()),
        "edges": [e.valence for e in cx.edges],
        "cusps": len(cx.cusps),
        "orientable": orient.orientable,
    }
    lines = [
        f"pattern: {name}",
        f"tetrahedra: {p.tet_count}",
        f"gluings: {len(p.gluings)}, free faces: {len(p.free_faces())}",
        f"edges: {len(cx.edges)} (valences {' '.join(map(str, data['edges']))})",
        f"cusps: {len(cx.cusps)}",
        f"orientable: {'yes' if orient.orientable else 'no'}",
    ]
    _emit(args, data, "\n".join(lines) + "\n")


def _links(args):
    p, _ = _load(args)
    cx = analyze(p)
    rows, lines = [], []
    for s in cx.links:
        row = {
            "cusp": s.cusp,
            "triangles": len(s.triangles),
            "sides": len(s.sides),
            "vertices": len(s.link_vertices),
            "boundary_sides": len(s.boundary_sides),
            "euler_char": s.euler_char,
            "genus": s.genus,
        }
        rows.append(row)
        genus = "-" if s.genus is None else str(s.genus)
        lines.append(
            f"cusp {s.cusp}: triangles {row['triangles']}, sides {row['sides']}, "
            f"vertices {row['vertices']}, boundary sides {row['boundary_sides']}, "
            f"chi {s.euler_char}, genus {genus}"
        )
    _emit(args, {"links": rows}, "\n".join(lines) + "\n")


def _dim(args):
    p, _ = _load(args)
    kernel = chart_for(p).dim
    if p.is_closed:
        formula = dimension_formula(p)
        skel = dimension_skeleton(p).dim
    else:
        formula = skel = None
    show = lambda v: "n/a" if v is None else str(v)
    data = {"formula": formula, "skeleton": skel, "kernel": kernel}
    _emit(args, data, f"E-V: {show(formula)}, skeleton: {show(skel)}, kernel: {kernel}\n")


def _relations(args):
    p, _ = _load(args)
    ars = angle_relation_system(p)
    lines = ["cone defect relations (phi = 2pi - theta):"]
    for i, (row, rhs) in enumerate(zip(ars.matrix, ars.rhs_pi)):
        terms = " + ".join(f"{m}*phi_{e}" for e, m in enumerate(row) if m)
        lines.append(f"  cusp {i}: {terms} = {rhs}pi")
    lines.append(f"rank: {ars.rank}")
    data = {"matrix": [list(r) for r in ars.matrix], "rhs_pi": list(ars.rhs_pi), "rank": ars.rank}
    if p.is_closed:
        be = basis_edges(p)
        lines.append(f"basis edges: {' '.join(map(str, be.basis))}")
        exprs = {}
        for e in sorted(be.expressions):
            const, coeffs = be.expressions[e]
            terms = [f"{const}pi"] + [f"{c}*theta_{b}" for b, c in sorted(coeffs.items())]
            lines.append(f"  theta_{e} = {' + '.join(terms)}")
            exprs[str(e)] = {"const_pi": str(const), "coeffs": {str(b): str(c) for b, c in coeffs.items()}}
        data["basis"] = list(be.basis)
        data["expressions"] = exprs
    _emit(args, data, "\n".join(lines) + "\n")


def _realize(args):
    p, _ = _load(args)
    chart = chart_for(p)
    rs = realize(p, chart, _params(args, chart.dim))
    report = edge_report(rs, args.tol)
    lines = ["params: " + ",".join(repr(x) for x in rs.params)]
    for r in report:
        lines.append(f"edge {r.edge}: theta {r.theta!r} ({r.theta / math.pi:.12f} pi) {r.kind}")
    for c in rs.cusp_reports:
        lines.append(f"cusp {c.cusp}: chi {c.euler_char}, gauss-bonnet residual {abs(c.residual):.3e}")
    for t, s in enumerate(rs.tet_shapes):
        lines.append(f"tet {t}: angles {s.alpha!r} {s.beta!r} {s.gamma!r}")
    lines.append(f"mostow residual: {mostow_residual(rs):.3e}")
    data = {
        "params": list(rs.params),
        "edges": [{"edge": r.edge, "theta": r.theta, "kind": r.kind} for r in report],
        "gauss_bonnet": [abs(c.residual) for c in rs.cusp_reports],
        "shapes": [list(s.as_tuple()) for s in rs.tet_shapes],
        "mostow_residual": mostow_residual(rs),
    }
    _emit(args, data, "\n".join(lines) + "\n")


def _sweep(args):
    p, name = _load(args)
    outputs = tuple(o.strip() for o in args.outputs.split(",") if o.strip())
    source = args.builtin or args.input
    res = sweep(SweepSpec(source, tuple(args.grid), outputs))
    res.write(args.output)


def _complete(args):
    p, _ = _load(args)
    chart = chart_for(p)
    start = args.start
    if start is not None and len(start) != chart.dim:
        raise UsageError(f"chart has dimension {chart.dim}, got {len(start)} start value(s)")
    res = find_complete(p, chart, start)
    lines = [
        "params: " + ",".join(repr(x) for x in res.params),
        f"iterations: {res.iterations}",
        f"basis residual: {res.residual:.3e}",
        f"mostow residual: {res.mostow_residual:.3e}",
    ]
    data = {"params": list(res.params), "iterations": res.iterations, "residual": res.residual,
            "mostow_residual": res.mostow_residual}
    _emit(args, data, "\n".join(lines) + "\n")


def _develop(args):
    p, _ = _load(args)
    chart = chart_for(p)
    rs = realize(p, chart, _params(args, chart.dim))
    svg = develop_svg(rs, args.cusp, args.tol)
    Path(args.output).write_bytes(svg.encode("utf-8"))


def _examples(args):
    if args.name:
        sys.stdout.write(builtin_text(args.name))
        return
    for name in BUILTIN_NAMES:
        p = builtin(name)
        cx = analyze(p)
        sys.stdout.write(
            f"{name}: tetrahedra {p.tet_count}, edges {len(cx.edges)}, cusps {len(cx.cusps)}, "
            f"dim {chart_for(p).dim}\n"
        )


COMMANDS = {
    "info": _info,
    "links": _links,
    "dim": _dim,
    "relations": _relations,
    "realize": _realize,
    "sweep": _sweep,
    "complete": _complete,
    "develop": _develop,
    "examples": _examples,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except (InternalInconsistency, EdgeEndMismatch, AngleRankFinding) as exc:
        print(f"idealteich: internal error: {exc}", file=sys.stderr)
        return INTERNAL_ERROR
    except (UsageError, PatternError, DomainError, ShapeError, ConvergenceError, ValueError, OSError) as exc:
        print(f"idealteich: error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
