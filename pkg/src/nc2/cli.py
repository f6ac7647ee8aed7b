"""``nc2`` command-line front end.

Exit codes: 0 success, 1 verification failure, 2 input error,
3 internal construction/assertion failure.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from fractions import Fraction

from . import __version__
from .codegen import code_to_json, generate_valid_code
from .errors import ConstructionError, CycleError, LemmaAssertionError, ParseError, PreconditionError
from .netgraph import CutVector, cut_vector, normalize, parse_network
from .pipeline import analyze
from .regions import achievable_region, compare_with_ef09, fraction_json, render_svg
from .verify import MAX_DENOMINATOR, SimulationMismatch, verify_rate_point

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3
COMMANDS = ("cuts", "region", "code", "verify", "compare")


class InputError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nc2", description="Two-unicast network coding rate regions.")
    p.add_argument("--version", action="version", version=f"nc2 {__version__}")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("graph", nargs="?", help="graph description file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--q", type=int, default=None, help="starting field size (prime)")
    p.add_argument("--trials", type=int, default=100, help="random messages per verification block")
    p.add_argument("--no-exhaustive", action="store_true",
                   help="always use random trials; by default blocks with at most 10^6 "
                        "effective messages are checked exhaustively")
    p.add_argument("--timeshare-den", type=int, default=0,
                   help="also verify hull-edge points with this denominator (verify only)")
    p.add_argument("--max-den", type=int, default=MAX_DENOMINATOR)
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.add_argument("--json", dest="json_out", help="also write the JSON artifact here")
    p.add_argument("--svg", dest="svg_out", help="write an SVG plot of the region (region/compare)")
    p.add_argument("--cuts-only", help="k11,k22,k12,k21,k121,k122,k112,k212,k1212 (no graph)")
    p.add_argument("--timing", action="store_true", help="include elapsed times (not reproducible)")
    return p


def _load(args):
    """(network or None, cut vector, input hash)."""
    if args.cuts_only:
        try:
            cv = CutVector.from_sequence(args.cuts_only.split(","))
        except ValueError as exc:
            raise InputError(f"--cuts-only: {exc}") from None
        bad = cv.violations()
        if bad:
            raise InputError("--cuts-only: not a cut vector (" + "; ".join(bad) + ")")
        return None, cv, hashlib.sha256(args.cuts_only.encode()).hexdigest()
    if not args.graph:
        raise InputError("a graph file (or --cuts-only) is required")
    try:
        with open(args.graph, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(str(exc)) from None
    net = parse_network(text)
    return net, cut_vector(net), hashlib.sha256(text.encode()).hexdigest()


def _meta(args, digest, q):
    return {"tool": "nc2", "version": __version__, "input_sha256": digest, "seed": args.seed, "q": q}


def _emit(args, payload, table=None):
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.json_out:
        with open(args.json_out, "w", encoding="utf-8") as fh:
            fh.write(text)
    sys.stdout.write(table if args.format == "table" and table is not None else text)


def cmd_cuts(args) -> int:
    net, cv, digest = _load(args)
    if net is not None:
        cv = cut_vector(normalize(net))
    table = "".join(f"{k:<6} {v}\n" for k, v in cv.as_dict().items())
    _emit(args, {"meta": _meta(args, digest, None), "cut_vector": cv.as_dict()}, table)
    return EXIT_OK


def _region_payload(args):
    net, cv, digest = _load(args)
    if net is None:
        report = achievable_region(cv, seed=None)
        return {"meta": _meta(args, digest, None), "report": report.to_json()}, report, None
    analysis = analyze(net, seed=args.seed, q=args.q)
    report = analysis.report
    encoders = []
    for v in report.hull.vertices:
        cons = analysis.realize(v)
        encoders.append({"vertex": [fraction_json(x) for x in v], "region": cons.label,
                         "modes": list(cons.modes), **cons.encoders.as_dict()})
    payload = {"meta": _meta(args, digest, analysis.q), "report": report.to_json(),
               "encoders": encoders}
    return payload, report, analysis


def _region_table(report) -> str:
    lines = [f"classification: {report.classification}"]
    if report.flags:
        lines.append("flags: " + ", ".join(report.flags))
    lines.append("rank terms: " + json.dumps(report.rank_terms, sort_keys=True))
    for name, poly in report.regions.items():
        lines.append(f"{name:<9} {poly.as_list()}")
    lines.append(f"{'hull':<9} {report.hull.as_list()}")
    lines.append(f"{'ef09':<9} {report.ef09.as_list()}")
    return "\n".join(lines) + "\n"


def cmd_region(args) -> int:
    payload, report, _ = _region_payload(args)
    if args.svg_out:
        with open(args.svg_out, "w", encoding="utf-8") as fh:
            fh.write(render_svg(report))
    _emit(args, payload, _region_table(report))
    return EXIT_OK


def cmd_compare(args) -> int:
    payload, report, _ = _region_payload(args)
    payload["compare"] = compare_with_ef09(report)
    if args.svg_out:
        with open(args.svg_out, "w", encoding="utf-8") as fh:
            fh.write(render_svg(report))
    cmp = payload["compare"]
    table = (f"hull: {report.hull.as_list()}\nef09: {report.ef09.as_list()}\n"
             f"in EF09 only: {cmp['ef09_not_ours']}\nin ours only: {cmp['ours_not_ef09']}\n")
    _emit(args, payload, table)
    return EXIT_OK


def cmd_code(args) -> int:
    net, cv, digest = _load(args)
    if net is None:
        raise InputError("code needs a graph, not --cuts-only")
    norm = normalize(net)
    coded, tm = generate_valid_code(norm, args.seed, args.q)
    payload = {"meta": _meta(args, digest, coded.q), **code_to_json(coded),
               "transfer": tm.as_dict(), "cut_vector": cv.as_dict()}
    _emit(args, payload)
    return EXIT_OK


def _points_to_verify(report, den: int):
    verts = list(report.hull.vertices)
    pts = list(verts)
    if den > 1 and len(verts) > 1:
        edges = [(verts[i], verts[(i + 1) % len(verts)]) for i in range(len(verts))]
        if len(verts) == 2:
            edges = edges[:1]
        for a, b in edges:
            for i in range(1, den):
                lam = Fraction(i, den)
                p = (lam * a[0] + (1 - lam) * b[0], lam * a[1] + (1 - lam) * b[1])
                if p not in pts:
                    pts.append(p)
    return pts


def cmd_verify(args) -> int:
    net, cv, digest = _load(args)
    if net is None:
        raise InputError("verify needs a graph, not --cuts-only")
    analysis = analyze(net, seed=args.seed, q=args.q)
    exhaustive = False if args.no_exhaustive else None
    reports = []
    for p in _points_to_verify(analysis.report, args.timeshare_den):
        rep = verify_rate_point(analysis, p, trials=args.trials, seed=args.seed,
                                exhaustive=exhaustive, max_denominator=args.max_den)
        reports.append(rep)
    ok = all(r.passed for r in reports)
    payload = {"meta": _meta(args, digest, analysis.q), "status": "PASS" if ok else "FAIL",
               "classification": analysis.report.classification,
               "hull": analysis.report.hull.as_list(),
               "reports": [r.to_json(timing=args.timing) for r in reports]}
    table = "".join(f"{r.status} {r.to_json()['rate_point']} trials={r.trials} "
                    f"t1={r.modes[0]} t2={r.modes[1]}\n" for r in reports)
    _emit(args, payload, table)
    return EXIT_OK if ok else EXIT_FAIL


HANDLERS = {"cuts": cmd_cuts, "region": cmd_region, "code": cmd_code,
            "verify": cmd_verify, "compare": cmd_compare}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return HANDLERS[args.command](args)
    except (InputError, ParseError, CycleError) as exc:
        print(f"nc2: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PreconditionError as exc:
        print(f"nc2: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (LemmaAssertionError, SimulationMismatch, ConstructionError, AssertionError) as exc:
        print(f"nc2: internal failure: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
