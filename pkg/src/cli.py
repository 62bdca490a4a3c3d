"""
Command-line front end

Usage:
    python scripts/cfkit.py check tau-minus-one
    python scripts/cfkit.py orbit farey --node 0 --point "(-1 1 2 5)" --map jump
    python scripts/cfkit.py galois even --dmax 100 --mode jump --report even.json

Every subcommand is a thin wrapper over the library. Exit codes: 0 success,
1 verification failure, 2 input error.
"""

import argparse
import json
import logging
import sys
from typing import List, Optional

from src import __version__
from src.attractor import BASE, DUAL, GDIFS, REFUTED, attractor_report, verify_fixed_point
from src.cfspec import check_cf, spec_to_dict
from src.dynamics import (
    BASE_ONLY, DEFAULT_BUDGET, JUMP, SLOW, OrbitState, build_realization,
    classical_galois_check, dual_orbit, galois_verify, geometric_check, orbit,
    realization_check,
)
from src.errors import CFKitError, InvariantViolation
from src.exact import parse_qnum
from src.minkowski import conjugacy_check
from src.plotting import WHICH, PlotSpec, plot_map
from src.transducer import build_transducer, fiber, parse_stream, run_transducer
from src.utils import (
    format_report, get_default_config, list_presets, load_preset, save_results_to_file,
)


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2


def _fmt_vec(values) -> str:
    return "(" + ", ".join(str(v) for v in values) + ")"


def cmd_check(args) -> int:
    spec = load_preset(args.spec)
    report = check_cf(spec)
    rows = [
        ("Name", spec.name),
        ("Nodes", spec.nodes),
        ("Arrows", len(spec.code.arrows)),
        ("Code", report.code.is_code),
        ("Dual code", report.dual_code.is_code),
        ("Strongly connected", report.strongly_connected),
        ("G", "[" + ", ".join(_fmt_vec(row) for row in report.g) + "]"),
        ("Perron vector", _fmt_vec(report.perron.eigvec) if report.perron and report.perron.ok else "none"),
        ("Spectral radius", f"{report.spectral_radius:.6f}"),
    ]
    out = {"name": spec.name, "admissible": report.admissible, "failures": report.failures()}
    if report.admissible and spec.H is not None and spec.K is not None:
        h = verify_fixed_point(GDIFS(spec, BASE), spec.H)
        k = verify_fixed_point(GDIFS(spec, DUAL), spec.K)
        rows += [("H", h.status), ("K", k.status)]
        out.update({"H": h.to_json(), "K": k.to_json()})
        if h.verified and k.verified:
            realization = geometric_check(spec, spec.H, spec.K)
            rows.append(("Realization", realization))
            out["realization"] = realization
            if realization == BASE_ONLY:
                dual = realization_check(spec, DUAL, spec.K)
                rows.append(("Dual witness", f"{dual.witness} (lag {dual.lag})"))
                out["dual_check"] = dual.to_json()
    rows.append(("Admissible", report.admissible))
    if not report.admissible:
        rows.append(("Failures", "; ".join(report.failures())))
    print(format_report(f"Continued fraction check: {spec.name}", rows))
    if args.report:
        save_results_to_file(out, args.report)
    return EXIT_OK if report.admissible else EXIT_FAIL


def cmd_attractor(args) -> int:
    spec = load_preset(args.spec)
    report = attractor_report(spec, args.iterations)
    it = report["iterates"]
    rows = [("Iterations", it["steps"]), ("Exact fixed point", it["exact"]), ("Last gap", it["gap"])]
    for node, arcs in enumerate(it["state"]):
        rows.append((f"T_{node}", _arcs_text(arcs)))
    for key in ("H", "K"):
        if key in report:
            rows.append((f"{key} verdict", report[key]["verdict"]["status"]))
    if "open_set_condition" in report.get("H", {}):
        rows.append(("Open set condition", report["H"]["open_set_condition"]))
    if isinstance(report.get("R"), list):
        for node, arcs in enumerate(report["R"]):
            rows.append((f"R_{node}", _arcs_text(arcs)))
    elif "R" in report:
        rows.append(("R", report["R"]["error"]))
    print(format_report(f"Attractors: {spec.name}", rows))
    if args.report:
        save_results_to_file(report, args.report)
    refuted = any(report[key]["verdict"]["status"] == REFUTED for key in ("H", "K") if key in report)
    return EXIT_FAIL if refuted else EXIT_OK


def _arcs_text(arcs) -> str:
    if not arcs:
        return "{}"
    return " u ".join(f"[{a['lo']}, {a['hi']}]" for a in arcs)


def cmd_orbit(args) -> int:
    spec = load_preset(args.spec)
    r = build_realization(spec)
    mode = args.map or spec.default_mode
    start = OrbitState(args.node, parse_qnum(args.point))
    explore = dual_orbit if args.dual else orbit
    rep = explore(r, start, mode, args.steps)
    rows = [
        ("Start", str(start)),
        ("Map", f"{mode}{' (dual)' if args.dual else ''}"),
        ("States", len(rep.states)),
        ("Purely periodic", rep.purely_periodic),
        ("Preperiod", rep.preperiod if rep.preperiod is not None else "unknown"),
        ("Period", "".join(rep.period) or "-"),
        ("Blocks", " ".join("".join(b) for b in rep.blocks) or "-"),
        ("Multivalued points", rep.multivalued_points),
    ]
    print(format_report(f"Orbit: {spec.name}", rows))
    if args.report:
        save_results_to_file(rep.to_json(), args.report)
    return EXIT_OK


def cmd_transducer(args) -> int:
    spec = load_preset(args.spec)
    t = build_transducer(spec.code)
    if args.point is not None:
        paths = fiber(parse_qnum(args.point), args.node, spec, t, args.steps)
    else:
        paths = run_transducer(t, args.node, parse_stream(args.input), args.steps)
    print(json.dumps([p.to_json() for p in paths]))
    return EXIT_OK


def cmd_galois(args) -> int:
    spec = load_preset(args.spec)
    config = get_default_config()
    dmax = args.dmax if args.dmax is not None else config['dmax']
    f1max = args.f1max if args.f1max is not None else config['f1max']
    mode = args.mode or spec.default_mode
    r = build_realization(spec)
    report = galois_verify(r, args.dmin, dmax, f1max, mode, args.steps)
    out = report.to_json()
    rows = [
        ("Map", f"{spec.name} ({mode})"),
        ("Discriminants", f"{args.dmin}..{dmax}"),
        ("|f1| bound", f1max),
        ("Realization", report.geometric),
        ("Forms", len(report.records)),
        ("Purely periodic", sum(1 for rec in report.records if rec["purely_periodic"])),
        ("Counterexamples", len(report.counterexamples)),
        ("Duality failures", len(report.duality_failures)),
    ]
    failed = bool(report.counterexamples or report.duality_failures)
    if args.classical:
        checked, failures = classical_galois_check(report.records)
        rows.append(("Classical check", f"{checked - len(failures)}/{checked}"))
        out["classical"] = {"checked": checked, "failures": len(failures)}
        failed = failed or bool(failures)
    print(format_report(f"Galois sweep: {spec.name}", rows))
    print()
    print(report.summary().to_string(index=False))
    if args.report:
        save_results_to_file(out, args.report)
    if args.csv:
        report.frame().to_csv(args.csv, index=False)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_conjugacy(args) -> int:
    spec = load_preset(args.spec)
    report = conjugacy_check(spec, args.qmax)
    rows = [("Arrows", len(spec.code.arrows)), ("Checks", report.checked),
            ("Mismatches", len(report.mismatches)), ("Result", "PASS" if report.ok else "FAIL")]
    for label, x, lhs, rhs in report.mismatches[:5]:
        rows.append((f"  {label} at {x}", f"{lhs} != {rhs}"))
    print(format_report(f"Minkowski conjugacy: {spec.name}", rows))
    if args.report:
        save_results_to_file(report.to_json(), args.report)
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_plot(args) -> int:
    spec = load_preset(args.spec)
    resolution = args.resolution or get_default_config()['plot_resolution']
    fig = plot_map(spec, PlotSpec(args.which, resolution, args.circular), args.out, args.html)
    rows = [("Figure", fig.title), ("Domains", len(fig.domain_labels)),
            ("Curves", fig.curve_count), ("SVG", args.out)]
    if args.html:
        rows.append(("HTML", args.html))
    print(format_report("Plot", rows))
    return EXIT_OK


def cmd_preset(args) -> int:
    if args.action == "list":
        for name in list_presets():
            print(name)
        return EXIT_OK
    if not args.name:
        print("error: preset dump needs a name", file=sys.stderr)
        return EXIT_INPUT
    spec = load_preset(args.name)
    print(json.dumps(spec_to_dict(spec), indent=2, ensure_ascii=False))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cfkit", description="Abstract continued fractions, exactly")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="Log at DEBUG level")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="Admissibility, attractor verdicts and realization type")
    p.add_argument("spec", help="Preset name or definition file")
    p.add_argument("--report", help="Write the JSON report here")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("attractor", help="Hutchinson iterates and exact attractor verdicts")
    p.add_argument("spec")
    p.add_argument("--iterations", type=int, default=20)
    p.add_argument("--report")
    p.set_defaults(func=cmd_attractor)

    p = sub.add_parser("orbit", help="Orbit of one point under F or its jump transformation")
    p.add_argument("spec")
    p.add_argument("--node", type=int, required=True)
    p.add_argument("--point", required=True, help='Point as "inf", "p/q" or "(p q r D)"')
    p.add_argument("--map", choices=[SLOW, JUMP], help="Defaults to the preset's mode")
    p.add_argument("--dual", action="store_true", help="Use the dual map (first return in jump mode)")
    p.add_argument("--steps", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--report")
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("transducer", help="Symbolic orbits of an LR stream or a point")
    p.add_argument("spec")
    p.add_argument("--node", type=int, required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--input", help='LR stream such as "nl(ln)*"')
    group.add_argument("--point", help="Point whose fiber is computed")
    p.add_argument("--steps", type=int, default=200)
    p.set_defaults(func=cmd_transducer)

    p = sub.add_parser("galois", help="Pure periodicity against the conjugate criterion")
    p.add_argument("spec")
    p.add_argument("--dmin", type=int, default=5)
    p.add_argument("--dmax", type=int)
    p.add_argument("--f1max", type=int)
    p.add_argument("--mode", choices=[SLOW, JUMP])
    p.add_argument("--steps", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--classical", action="store_true",
                   help="Also compare -1/w' with the reversed period (Farey jump)")
    p.add_argument("--report", help="Write the JSON records here")
    p.add_argument("--csv", help="Write the records as CSV here")
    p.set_defaults(func=cmd_galois)

    p = sub.add_parser("conjugacy", help="Minkowski conjugacy with the affine twin")
    p.add_argument("spec")
    p.add_argument("--qmax", type=int, default=30)
    p.add_argument("--report")
    p.set_defaults(func=cmd_conjugacy)

    p = sub.add_parser("plot", help="SVG graph of a map or of the attractors")
    p.add_argument("spec")
    p.add_argument("--which", choices=WHICH, default="F")
    p.add_argument("--resolution", type=int)
    p.add_argument("--circular", action="store_true", help="Angle chart instead of the rational chart")
    p.add_argument("--out", required=True, help="SVG output path")
    p.add_argument("--html", help="Also write an interactive HTML version")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("preset", help="List or dump shipped presets")
    p.add_argument("action", choices=["list", "dump"])
    p.add_argument("name", nargs="?")
    p.set_defaults(func=cmd_preset)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        level = "DEBUG" if args.verbose else get_default_config()['log_level']
        logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                            format="%(levelname)s %(name)s: %(message)s")
        return args.func(args)
    except InvariantViolation as e:
        print(f"invariant violated: {e}", file=sys.stderr)
        return EXIT_FAIL
    except CFKitError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == '__main__':
    raise SystemExit(main())
