"""Batch command-line frontend.

Subcommands: tau, geodesic, logmap, solve, brenier, interpolate,
right-translation, verify.  One command per process; all randomness is
seeded; numeric output uses 9 significant digits unless --digits overrides.

Exit codes: 0 success, 1 failed verification, 2 argument or file parse
error, 3 I/O error, 4 causally infeasible input.
"""

from __future__ import annotations

import argparse
import re
import sys
from types import SimpleNamespace

import numpy as np

from .brenier import (
    interpolate,
    potential_from_duals,
    transport_map_from_duals,
)
from .causality import classify, tau
from .errors import (
    NoCausalCoupling,
    NotChronological,
    ParseError,
    SubLorentzError,
    WeightError,
)
from .geodesics import GeodesicArc, geodesic_trace, log_map
from .heisenberg import FrameCovector, GroupPoint, energy, mul
from .measures_io import load_measure, save_measure, save_plan, save_trajectory
from .minkowski import right_translation_verdict
from .transport import (
    CostParams,
    DiscreteMeasure,
    check_cyclical_monotonicity,
    cost_matrix,
    duality_gap,
    solve_kantorovich,
    strengthen_duals,
)
from . import svg

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_PARSE = 2
EXIT_IO = 3
EXIT_INFEASIBLE = 4


def _triple(text: str):
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected three comma-separated numbers, got {text!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a numeric triple: {text!r}") from None


def _float_list(text: str):
    try:
        return [float(p) for p in text.split(",") if p != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {text!r}") from None


def _fmt(args, v: float) -> str:
    return f"{v:.{args.digits}g}"


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that accepts leading-negative triples like -1,0,1.

    Stock argparse only treats bare negative numbers as values; widen the
    matcher so comma lists starting with a negative number pass too.  The
    --cov=-1,0,1 spelling works either way.
    """

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self._negative_number_matcher = re.compile(
            r"^-(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?(,.*)?$"
        )


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=float, default=0.5, help="cost exponent in (0,1)")
    common.add_argument("--seed", type=int, default=0, help="seed for any randomized step")
    common.add_argument("--tol", type=float, default=None, help="tolerance override")
    common.add_argument("--out", default=None, help="output path or prefix")
    common.add_argument("--svg", default=None, help="write an SVG plot to this path")
    common.add_argument(
        "--digits", type=int, default=9, help="significant digits in printed numbers"
    )

    parser = _Parser(
        prog="sublorentz",
        description="Sub-Lorentzian geometry and causal optimal transport on the Heisenberg group.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p_tau = sub.add_parser("tau", parents=[common], help="time separation and causal relation")
    p_tau.add_argument("--from", dest="src", type=_triple, required=True, metavar="X,Y,Z")
    p_tau.add_argument("--to", dest="dst", type=_triple, required=True, metavar="X,Y,Z")
    p_tau.set_defaults(func=cmd_tau)

    p_geo = sub.add_parser("geodesic", parents=[common], help="sample a geodesic arc to CSV/SVG")
    p_geo.add_argument("--from", dest="src", type=_triple, default=(0.0, 0.0, 0.0), metavar="X,Y,Z")
    p_geo.add_argument("--cov", type=_triple, required=True, metavar="HX,HY,HZ",
                       help="initial covector in frame components")
    p_geo.add_argument("--t", type=float, default=1.0, help="duration")
    p_geo.add_argument("--n", type=int, default=100, help="number of sample rows")
    p_geo.set_defaults(func=cmd_geodesic)

    p_log = sub.add_parser("logmap", parents=[common], help="covector reaching a chronological target")
    p_log.add_argument("--from", dest="src", type=_triple, required=True, metavar="X,Y,Z")
    p_log.add_argument("--to", dest="dst", type=_triple, required=True, metavar="X,Y,Z")
    p_log.set_defaults(func=cmd_logmap)

    p_solve = sub.add_parser("solve", parents=[common], help="solve the causal transport LP")
    p_solve.add_argument("--mu", required=True, help="source measure file")
    p_solve.add_argument("--nu", required=True, help="target measure file")
    p_solve.set_defaults(func=cmd_solve)

    p_bren = sub.add_parser("brenier", parents=[common],
                            help="transport map from dual potentials, with interpolants")
    p_bren.add_argument("--mu", required=True)
    p_bren.add_argument("--nu", required=True)
    p_bren.add_argument("--t", type=_float_list, default=[],
                        help="comma-separated interpolation times in [0,1]")
    p_bren.set_defaults(func=cmd_brenier)

    p_interp = sub.add_parser("interpolate", parents=[common],
                              help="displacement interpolation of the optimal plan")
    p_interp.add_argument("--mu", required=True)
    p_interp.add_argument("--nu", required=True)
    p_interp.add_argument("--t", type=_float_list, required=True,
                          help="comma-separated interpolation times in [0,1]")
    p_interp.set_defaults(func=cmd_interpolate)

    p_rt = sub.add_parser("right-translation", parents=[common],
                          help="test q -> q*q0 for transport optimality")
    p_rt.add_argument("--mu", required=True)
    p_rt.add_argument("--q0", type=_triple, required=True, metavar="X,Y,Z")
    p_rt.set_defaults(func=cmd_right_translation)

    p_ver = sub.add_parser("verify", parents=[common], help="run the self-check suites")
    p_ver.set_defaults(func=cmd_verify)

    return parser


def cmd_tau(args) -> int:
    a, b = GroupPoint(*args.src), GroupPoint(*args.dst)
    print(f"tau {_fmt(args, tau(a, b))}")
    print(f"relation {classify(a, b).value}")
    return EXIT_OK


def cmd_geodesic(args) -> int:
    arc = GeodesicArc(GroupPoint(*args.src), FrameCovector(*args.cov), args.t)
    rows = geodesic_trace(arc, args.n)
    if args.out:
        save_trajectory(rows, args.out)
        print(f"wrote {args.out} ({len(rows)} rows)")
    else:
        print("t,x,y,z")
        for t, p in rows:
            print(f"{_fmt(args, t)},{_fmt(args, p.x)},{_fmt(args, p.y)},{_fmt(args, p.z)}")
    if args.svg:
        svg.write_trace_svg(args.svg, rows)
        print(f"wrote {args.svg}")
    return EXIT_OK


def cmd_logmap(args) -> int:
    a, b = GroupPoint(*args.src), GroupPoint(*args.dst)
    cov = log_map(a, b)
    print(f"hX {_fmt(args, cov.hX)}")
    print(f"hY {_fmt(args, cov.hY)}")
    print(f"hZ {_fmt(args, cov.hZ)}")
    e = energy(cov)
    print(f"energy {_fmt(args, e)}")
    print(f"tau {_fmt(args, (2.0 * e) ** 0.5)}")
    return EXIT_OK


def _load_pair(args):
    return load_measure(args.mu), load_measure(args.nu)


def cmd_solve(args) -> int:
    mu, nu = _load_pair(args)
    params = CostParams(args.p)
    plan, duals = solve_kantorovich(mu, nu, params)
    cm = cost_matrix(mu, nu, params)
    gap = duality_gap(plan, duals, mu, nu, cm)
    report = check_cyclical_monotonicity(plan, cm, max_cycle=6, seed=args.seed)
    print(f"value {_fmt(args, plan.value)}")
    print(f"ell_p {_fmt(args, (args.p * plan.value) ** (1.0 / args.p))}")
    print(f"duality_gap {_fmt(args, gap)}")
    print(f"monotonicity_worst_violation {_fmt(args, report.worst_violation)}")
    print(f"monotonicity_cycles_checked {report.cycles_checked}")
    print(f"monotonicity_exhaustive {report.exhaustive}")
    if args.out:
        save_plan(plan, cm, args.out)
        print(f"wrote {args.out}")
    if args.svg:
        svg.write_plan_svg(
            args.svg, mu, nu, [(i, j, float(plan.masses[i, j])) for i, j in plan.support()]
        )
        print(f"wrote {args.svg}")
    return EXIT_OK


def cmd_brenier(args) -> int:
    mu, nu = _load_pair(args)
    params = CostParams(args.p)
    plan, _ = solve_kantorovich(mu, nu, params)
    cm = cost_matrix(mu, nu, params)
    duals = strengthen_duals(plan, cm)
    pot = potential_from_duals(duals, nu, params)
    result = transport_map_from_duals(mu, pot, method="analytic")
    print(f"mapped {len(result.mapped)} of {len(mu.atoms)} atoms")
    for idx, reason in result.skipped:
        print(f"skipped {idx} {reason}")
    prefix = args.out or "brenier"
    w = np.array([mu.weights[i] for i in result.mapped], dtype=float)
    if w.size == 0:
        raise NoCausalCoupling("no atom admitted a transport map sample")
    w = w / w.sum()
    mapped_path = f"{prefix}_mapped.txt"
    save_measure(DiscreteMeasure([s.image for s in result.samples], w), mapped_path)
    print(f"wrote {mapped_path}")
    for t in args.t:
        pts = [interpolate(s, t) for s in result.samples]
        path = f"{prefix}_t{t:g}.txt"
        save_measure(DiscreteMeasure(pts, w.copy()), path)
        print(f"wrote {path}")
    if args.svg:
        images = SimpleNamespace(atoms=[s.image for s in result.samples], weights=w)
        sources = SimpleNamespace(
            atoms=[s.source for s in result.samples], weights=w
        )
        svg.write_plan_svg(
            args.svg,
            sources,
            images,
            [(k, k, float(w[k])) for k in range(len(result.samples))],
            title="Brenier map",
        )
        print(f"wrote {args.svg}")
    return EXIT_OK


def cmd_interpolate(args) -> int:
    mu, nu = _load_pair(args)
    params = CostParams(args.p)
    plan, _ = solve_kantorovich(mu, nu, params)
    support = plan.support()
    arcs = []
    for i, j in support:
        x, y = mu.atoms[i], nu.atoms[j]
        cov = log_map(x, y)
        arcs.append((float(plan.masses[i, j]), GeodesicArc(x, cov, 1.0)))
    prefix = args.out or "interpolate"
    total = sum(m for m, _ in arcs)
    for t in args.t:
        atoms = [arc.point(t) for _, arc in arcs]
        weights = np.array([m / total for m, _ in arcs])
        path = f"{prefix}_t{t:g}.txt"
        save_measure(DiscreteMeasure(atoms, weights), path)
        print(f"wrote {path}")
    return EXIT_OK


def cmd_right_translation(args) -> int:
    mu = load_measure(args.mu)
    params = CostParams(args.p)
    gap_tol = args.tol if args.tol is not None else 1e-8
    verdict = right_translation_verdict(mu, GroupPoint(*args.q0), params, gap_tol=gap_tol)
    print(f"verdict {'Optimal' if verdict.optimal else 'NotOptimal'}")
    print(f"predicate {verdict.predicate}")
    print(f"agrees {verdict.agrees}")
    print(f"map_value {_fmt(args, verdict.map_value)}")
    print(f"lp_value {_fmt(args, verdict.lp_value)}")
    print(f"gap {_fmt(args, verdict.gap)}")
    if args.out:
        nu = DiscreteMeasure([mul(a, GroupPoint(*args.q0)) for a in mu.atoms], mu.weights)
        save_measure(nu, args.out)
        print(f"wrote {args.out}")
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import run_suites

    results = run_suites(args.seed)
    width = max(len(r.name) for r in results)
    failures = 0
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status}  {r.name:<{width}}  {r.detail}")
        failures += 0 if r.passed else 1
    print(f"overall {'PASS' if failures == 0 else f'FAIL ({failures} suites)'}")
    return EXIT_OK if failures == 0 else EXIT_VERIFY_FAILED


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, WeightError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_PARSE
    except (NoCausalCoupling, NotChronological) as err:
        print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_IO
    except SubLorentzError as err:
        # remaining library errors are domain infeasibilities, not syntax
        print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
