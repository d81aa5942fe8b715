"""Command-line entry point: ``morsecube <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import cubecomplex, fiber, holonomy, morse, search
from .polytope import ParseError, PolytopeError, data_dir, orbifold_euler, read_polytope

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def resolve_polytope(name_or_path):
    path = Path(name_or_path)
    if not path.exists():
        name = name_or_path if name_or_path.endswith(".poly") else f"{name_or_path}.poly"
        path = data_dir() / name
        if not path.exists():
            raise UsageError(f"no polytope file {name_or_path!r} (looked in {data_dir()})")
    return read_polytope(path)


def read_state(args, facet_count):
    if args.bits is not None and args.state is not None:
        raise UsageError("give either --state or --bits, not both")
    if args.bits is not None:
        s = morse.parse_state(f"bits {args.bits}", facet_count)
    elif args.state is not None:
        s = morse.parse_state(Path(args.state).read_text(encoding="utf-8"), facet_count)
    else:
        raise UsageError("a state is required (--state FILE or --bits MASK)")
    return s.scaled(Fraction(args.scale))


def _fraction_str(x):
    return str(Fraction(x))


# -- subcommands --------------------------------------------------------------------

def cmd_info(args):
    p, col = resolve_polytope(args.polytope)
    data = {
        "name": p.name,
        "dimension": p.dim,
        "facets": p.facet_count,
        "f_vector": list(p.f_vector()),
        "finite_vertices": len(p.finite_vertices),
        "ideal_vertices": len(p.ideal_vertices),
        "colours": col.c,
        "colour_class_sizes": [len(c) for c in col.classes()],
        "orbifold_euler": _fraction_str(orbifold_euler(p)),
    }
    lines = [f"{k}: {v}" for k, v in data.items()]
    return data, lines, EXIT_OK


def cmd_invariants(args):
    p, col = resolve_polytope(args.polytope)
    cx = cubecomplex.build_cube_complex(p, col, args.budget or cubecomplex.DEFAULT_CELL_BUDGET)
    cusps = cubecomplex.cusp_census(p, col)
    data = {
        "name": p.name,
        "cells": list(cx.cell_counts()),
        "euler": cx.euler_characteristic(),
        "betti": list(cx.betti),
        "cusps": cusps.count,
        "cusps_per_ideal_vertex": cusps.per_vertex,
        "balanced_gap": cx.balanced_gap(),
    }
    betti = " ".join(str(b) for b in cx.betti)
    lines = [f"{p.name}  euler {data['euler']}  betti {betti}  cusps {cusps.count}",
             f"cells {' '.join(str(c) for c in data['cells'])}",
             f"balanced-state gap {data['balanced_gap']}"]
    return data, lines, EXIT_OK


def cmd_check_state(args):
    p, col = resolve_polytope(args.polytope)
    s = read_state(args, p.facet_count)
    verdict = morse.verify(p, col, s, args.restarts, args.seed)
    data = {
        "status": verdict.status,
        "critical_points": verdict.critical_points,
        "ideal_criterion": verdict.ideal.passed,
        "ideal_failing": verdict.ideal.failing,
        "outcomes": verdict.outcomes,
        "reason": verdict.reason,
    }
    lines = [f"status {verdict.status}", f"critical points {verdict.critical_points}",
             f"ideal criterion {'pass' if verdict.ideal.passed else 'fail'}",
             f"outcomes {verdict.outcomes}"]
    if verdict.reason:
        lines.append(f"reason {verdict.reason}")
    if args.periods:
        cx = cubecomplex.build_cube_complex(p, col)
        per = cubecomplex.periods_and_levels(cx, s)
        data["periods"] = [_fraction_str(x) for x in per.periods]
        data["integral"] = per.integral
        lines.append(f"periods {' '.join(data['periods'])} ({'integral' if per.integral else 'not integral'})")
        if per.integral:
            data["levels"] = {str(v): _fraction_str(x) for v, x in per.levels.items()}
            lines.append("levels " + " ".join(f"{v}:{x}" for v, x in data["levels"].items()))
    ok = verdict.status in (morse.PERFECT, morse.FIBRATION)
    return data, lines, EXIT_OK if ok else EXIT_FAILED


def cmd_census(args):
    p, col = resolve_polytope(args.polytope)
    census = search.enumerate_states(p, col, args.filter, args.budget, args.threads,
                                     args.restarts, args.seed)
    lines = census.lines(p.facet_count)
    data = {
        "group_order": census.group_order,
        "partial": census.partial,
        "stats": census.stats,
        "classes": [{"mask": hex(c.mask), "orbit_size": c.orbit_size, "status": c.status,
                     "critical_points": c.critical_points, "outcomes": c.outcomes}
                    for c in census.classes],
    }
    if census.partial:
        print(f"warning: budget reached, census is partial ({census.stats['examined']} masks)",
              file=sys.stderr)
    return data, lines, EXIT_OK


def _fiber_profile(report):
    return {
        "tetrahedra": report.tetrahedra,
        "components": report.components,
        "orientable": report.orientable,
        "valences": {str(k): v for k, v in report.valences.items()},
        "vertex_classes": report.kinds(),
        "all_tori": report.all_tori,
        "h1_rank": report.h1_rank,
        "h1_torsion": report.h1_torsion,
    }


def _profile_line(prefix, prof):
    val = " ".join(f"{k}x{v}" for k, v in prof["valences"].items())
    kinds = " ".join(f"{k}={v}" for k, v in prof["vertex_classes"].items())
    torsion = "".join(f"+Z/{t}" for t in prof["h1_torsion"])
    return (f"{prefix}tets {prof['tetrahedra']} components {prof['components']} "
            f"orientable {'yes' if prof['orientable'] else 'no'} valences {val} "
            f"vertices {kinds} tori {'yes' if prof['all_tori'] else 'no'} "
            f"H1 Z^{prof['h1_rank']}{torsion}")


def cmd_fiber(args):
    p, col = resolve_polytope(args.polytope)
    cx = cubecomplex.build_cube_complex(p, col)
    geometry = fiber.TriangleGeometry(p)
    level = Fraction(args.level)
    if args.from_census:
        masks = []
        for raw in Path(args.from_census).read_text(encoding="utf-8").splitlines():
            raw = raw.strip()
            if raw and not raw.startswith("#"):
                masks.append(int(raw.split()[0], 16))
        states = [(f"{m:#x}", morse.RealState.from_bits(m, p.facet_count).scaled(Fraction(args.scale)))
                  for m in masks]
    else:
        states = [("state", read_state(args, p.facet_count))]
    outdir = Path(args.output_dir) if args.output_dir else None
    if outdir:
        outdir.mkdir(parents=True, exist_ok=True)
    data, lines = [], []
    for name, s in states:
        tri = fiber.build_fiber(p, col, s, level, cx, geometry)
        prof = _fiber_profile(fiber.fiber_report(tri))
        prof["name"] = name
        if outdir:
            path = outdir / f"fiber_{name}_level{str(level).replace('/', '-')}.tri"
            fiber.export_triangulation(tri, path)
            prof["file"] = str(path)
        data.append(prof)
        lines.append(_profile_line(f"{name} " if len(states) > 1 else "", prof))
    return (data if len(data) > 1 else data[0]), lines, EXIT_OK


def cmd_holonomy(args):
    report = holonomy.verify_holonomy()
    data = {name: {"pass": ok, "detail": detail} for name, ok, detail in report.checks()}
    data["determinants"] = [str(report.det_a), str(report.det_b)]
    lines = [f"{'PASS' if ok else 'FAIL'} {name}: {detail}" for name, ok, detail in report.checks()]
    return data, lines, EXIT_OK if report.passed else EXIT_FAILED


COMMANDS = {
    "info": (cmd_info, "polytope and colouring census"),
    "invariants": (cmd_invariants, "Euler characteristic, Betti numbers and cusps"),
    "check-state": (cmd_check_state, "verify the collapse hypotheses for one state"),
    "census": (cmd_census, "enumerate ±1 states up to symmetry"),
    "fiber": (cmd_fiber, "build, report and export singular fibers"),
    "holonomy": (cmd_holonomy, "exact check of the two-generator holonomy"),
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print JSON instead of text")
    common.add_argument("--output", help="write the report to this file")
    common.add_argument("--threads", type=int, default=1, help="census worker processes")
    common.add_argument("--restarts", type=int, default=32, help="collapse restarts")
    common.add_argument("--seed", type=int, default=0, help="collapse seed")
    common.add_argument("--budget", type=int, default=None,
                        help="bitmask budget for census, cell budget for invariants")

    parser = argparse.ArgumentParser(prog="morsecube", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sp = sub.add_parser(name, parents=[common], help=help_text)
        if name != "holonomy":
            sp.add_argument("--polytope", required=True,
                            help="polytope file, or a bundled name (p4, cell24, cell120)")
        if name in ("check-state", "fiber"):
            sp.add_argument("--state", help="state file")
            sp.add_argument("--bits", help="±1 state as a bitmask (bit i set: facet i is +1)")
            sp.add_argument("--scale", default="1", help="multiply the state by this rational")
        if name == "check-state":
            sp.add_argument("--periods", action="store_true", help="also report periods and levels")
        if name == "census":
            sp.add_argument("--filter", default=search.ALL_CIRCLES, choices=search.FILTERS)
        if name == "fiber":
            sp.add_argument("--level", default="0", help="level in R/Z, e.g. 0 or 1/2")
            sp.add_argument("--from-census", help="census output; build one fiber per line")
            sp.add_argument("--output-dir", help="export triangulation files here")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = COMMANDS[args.command][0]
    try:
        data, lines, code = handler(args)
    except (UsageError, ParseError, PolytopeError, morse.StateFormatError,
            morse.VanishingStateError, fiber.FiberError, ValueError, OSError) as exc:
        print(f"morsecube {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = json.dumps(data, indent=2, sort_keys=True) + "\n" if args.json else "\n".join(lines) + "\n"
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
