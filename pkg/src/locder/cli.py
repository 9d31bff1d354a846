"""Command-line entry point.

Exit codes: 0 pass/success, 1 violation/rejection/infeasible/unresolved,
2 usage or input error (nothing written to stdout).
"""

from __future__ import annotations

import argparse
import logging
import random
import sys
import time

from .algebra import (
    CONSTRUCTIONS,
    AlgebraSpec,
    SpecError,
    antisymmetry_check,
    jacobi_check,
    resolve_spec,
    verify_construction,
)
from .engine import PROBE_FAMILIES, check_center, decompose, run_probe_family
from .formats import MapFileError, Report, parse_element, parse_map_file, parse_scalar, to_jsonable
from .maps import WindowedLinearMap, leibniz_check
from .sampling import random_derivation
from .solver import Infeasible, derivation_space, witness_solve

log = logging.getLogger("locder")


class UsageError(Exception):
    pass


def _spec(args) -> AlgebraSpec:
    if args.spec is None:
        raise UsageError("--spec is required")
    return resolve_spec(args.spec)


def _range(args, default: int | None = None) -> int:
    n = args.range if args.range is not None else default
    if n is None:
        raise UsageError("--range/-N is required")
    if n < 0:
        raise UsageError("--range must be non-negative")
    return n


def _candidate(args) -> WindowedLinearMap:
    """The map from --map, or a seeded random derivation on --spec/--range."""
    if args.map is not None:
        m = parse_map_file(args.map)
        if args.spec is not None and resolve_spec(args.spec) != m.spec:
            raise UsageError(f"--spec {args.spec} does not match the map's algebra {m.spec.name}")
        return m
    if args.seed is not None:
        spec = _spec(args)
        _, m = random_derivation(random.Random(args.seed), spec, _range(args, 8))
        return m
    raise UsageError("--map is required (or --seed to generate a random derivation)")


def _element(text: str | None, spec: AlgebraSpec, flag: str):
    if text is None:
        raise UsageError(f"{flag} is required")
    try:
        return parse_element(text, spec)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"{flag}: {exc}") from None


# -- commands -------------------------------------------------------------------


def cmd_verify_algebra(args) -> Report:
    spec, N = _spec(args), _range(args, 4)
    checks = [jacobi_check(spec, N), antisymmetry_check(spec, N)]
    ok = all(c.passed for c in checks)
    return Report("verify-algebra", spec.name, N, "pass" if ok else "violation",
                  [c.to_dict() for c in checks], 0 if ok else 1)


def cmd_verify_construction(args) -> Report:
    spec, N = _spec(args), _range(args, 6)
    if args.kind:
        kinds = [args.kind]
    else:
        kinds = {1: [], 2: ["Lprime"]}.get(spec.truncation_order, list(CONSTRUCTIONS))
        if not kinds:
            raise UsageError(f"{spec.name} has no key constructions")
    checks = [verify_construction(spec, k, N) for k in kinds]
    ok = all(c.passed for c in checks)
    return Report("verify-construction", spec.name, N, "pass" if ok else "violation",
                  [c.to_dict() for c in checks], 0 if ok else 1)


def cmd_check_derivation(args) -> Report:
    m = _candidate(args)
    rep = leibniz_check(m, stop_at_first=not args.audit_all)
    return Report("check-derivation", m.spec.name, m.window, "pass" if rep.passed else "violation",
                  to_jsonable(rep, m.spec), 0 if rep.passed else 1)


def cmd_find_witness(args) -> Report:
    spec = _spec(args)
    probe = _element(args.probe, spec, "--probe")
    target = _element(args.target, spec, "--target")
    if not probe:
        raise UsageError("--probe must be nonzero")
    out = witness_solve(probe, target, spec, support_window=args.support_window,
                        include_outer=not args.no_outer, slack=args.support_slack,
                        full_outer=args.full_outer)
    infeasible = isinstance(out, Infeasible)
    window = out.support_window if not infeasible else args.support_window
    return Report("find-witness", spec.name, window, "infeasible" if infeasible else "witness",
                  to_jsonable(out, spec), 1 if infeasible else 0)


def cmd_der_space(args) -> Report:
    spec, N = _spec(args), _range(args, 8)
    if args.degree is None:
        raise UsageError("--degree is required")
    if 2 * abs(args.degree) > N:
        raise UsageError("need 2*|degree| <= range")
    space = derivation_space(spec, args.degree, N)
    return Report("der-space", spec.name, N, "computed", to_jsonable(space, spec))


def cmd_decompose(args) -> Report:
    m = _candidate(args)
    rep = decompose(m, audit_all=args.audit_all, full_outer=args.full_outer, slack=args.support_slack)
    return Report("decompose", m.spec.name, m.window, rep.outcome, to_jsonable(rep, m.spec),
                  0 if rep.success else 1)


def cmd_check_center(args) -> Report:
    m = _candidate(args)
    if not m.spec.centered:
        raise UsageError(f"{m.spec.name} has no center")
    outer = parse_scalar(args.outer) if args.outer else 0
    rep = check_center(m, outer=outer, slack=args.support_slack, full_outer=args.full_outer)
    return Report("check-center", m.spec.name, m.window, "pass" if rep.passed else "violation",
                  to_jsonable(rep, m.spec), 0 if rep.passed else 1)


def cmd_probe(args) -> Report:
    m = _candidate(args)
    if args.family is None:
        raise UsageError(f"--family is required; one of {', '.join(PROBE_FAMILIES)}")
    samples = [parse_scalar(s) for s in args.samples.split(",")] if args.samples else None
    symbol = m.spec.parse_symbol(args.symbol) if args.symbol else None
    results = run_probe_family(m, args.family, m=args.m, samples=samples, layer=args.layer,
                               symbol=symbol, full_outer=args.full_outer)
    rejected = any(r.rejected for r in results)
    return Report("probe", m.spec.name, m.window, "rejected" if rejected else "witnessed",
                  to_jsonable(results, m.spec), 1 if rejected else 0)


COMMANDS = {
    "verify-algebra": (cmd_verify_algebra, "Jacobi and antisymmetry on a degree range"),
    "verify-construction": (cmd_verify_construction, "check the primed generator constructions"),
    "check-derivation": (cmd_check_derivation, "Leibniz check of a map file"),
    "find-witness": (cmd_find_witness, "solve [u, probe] + c*delta_t(probe) = target"),
    "der-space": (cmd_der_space, "homogeneous derivations of a given degree on a window"),
    "decompose": (cmd_decompose, "reduce a candidate local derivation or reject it"),
    "check-center": (cmd_check_center, "central-charge checks"),
    "probe": (cmd_probe, "run one probe family against a map"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", help="preset name or n=K[,centerless]")
    common.add_argument("--range", "-N", type=int, help="degree window")
    common.add_argument("--map", help="map file (JSON)")
    common.add_argument("--json", action="store_true", help="emit a JSON report")
    common.add_argument("--seed", type=int, help="generate a random derivation instead of reading --map")
    common.add_argument("--support-slack", type=int, default=2, help="extra degrees for witness support")
    common.add_argument("--full-outer", action="store_true", help="also allow t^j d/dt, j >= 2")
    common.add_argument("--audit-all", action="store_true", help="collect every failure")
    common.add_argument("--no-timing", action="store_true", help="omit timing from JSON")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="locder", description="Local derivations of truncated loop Virasoro algebras")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_)
        if name == "verify-construction":
            p.add_argument("--kind", choices=CONSTRUCTIONS)
        elif name == "find-witness":
            p.add_argument("--probe", help="element literal")
            p.add_argument("--target", help="element literal")
            p.add_argument("--support-window", type=int)
            p.add_argument("--no-outer", action="store_true")
        elif name == "der-space":
            p.add_argument("--degree", type=int)
        elif name == "check-center":
            p.add_argument("--outer", help="expected delta_t coefficient on centers")
        elif name == "probe":
            p.add_argument("--family", choices=PROBE_FAMILIES)
            p.add_argument("--m", type=int)
            p.add_argument("--samples", help="comma-separated scalars")
            p.add_argument("--layer", type=int)
            p.add_argument("--symbol")
    return parser


def render_text(report: Report) -> str:
    head = f"{report.command}: {report.outcome}"
    if report.spec:
        head += f" [{report.spec}"
        head += f", window {report.window}]" if report.window is not None else "]"
    lines = [head]
    r = report.result
    if report.command in ("verify-algebra", "verify-construction"):
        for c in r:
            lines.append(f"  {c['check']}: {'pass' if c['passed'] else 'FAIL'} ({c['checked']} checked)")
            if c["failure"]:
                lines.append(f"    {c['failure']}")
    elif report.command == "check-derivation":
        lines.append(f"  pairs checked {r['checked_pairs']}, skipped {r['skipped_pairs']}")
        for v in r["violations"]:
            lines.append(f"  violation at {v['pair'][0]}, {v['pair'][1]}")
    elif report.command == "decompose":
        lines.append(f"  scope: {r['scope']}")
        if r["descriptor"]:
            lines.append(f"  inner: {_fmt(r['descriptor']['inner'])}")
            lines.append(f"  outer (delta_t): {_scalar_text(r['descriptor']['outer_delta_t'])}")
        if r["failure"]:
            lines.append(f"  failed at stage {r['failure']['stage']} on {r['failure'].get('symbol')}")
        if r["rejection"]:
            lines.append(f"  rejected by probe {r['rejection']['probe']['name']}: "
                         f"{_fmt(r['rejection']['probe']['element'])}")
    elif report.command == "find-witness":
        if r["status"] == "witness":
            lines.append(f"  u = {_fmt(r['descriptor']['inner'])}")
            lines.append(f"  c = {_scalar_text(r['descriptor']['outer_delta_t'])}")
        else:
            lines.append(f"  certificate valid: {r.get('certificate_valid')}")
    elif report.command == "der-space":
        lines.append(f"  dimension {r['dimension']} ({r['unknowns']} unknowns, {r['equations']} equations)")
    elif report.command == "check-center":
        for v in r["violations"]:
            lines.append(f"  violation at {v['symbol']}: {_fmt(v['value'])}")
    elif report.command == "probe":
        for res in r:
            status = "rejected" if res["rejected"] else "witnessed"
            lines.append(f"  {res['probe']['name']} {_fmt(res['probe']['element'])}: {status}")
    return "\n".join(lines)


def _scalar_text(s: dict) -> str:
    from .formats import scalar_from_json
    return str(scalar_from_json(s))


def _fmt(elem: list) -> str:
    if not elem:
        return "0"
    parts = []
    for t in elem:
        c = _scalar_text(t["coeff"])
        parts.append(t["basis"] if c == "1" else f"({c})*{t['basis']}")
    return " + ".join(parts)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    fn = COMMANDS[args.command][0]
    start = time.perf_counter()
    try:
        report = fn(args)
    except (UsageError, MapFileError, SpecError, ValueError, OSError) as exc:
        print(f"locder {args.command}: error: {exc}", file=sys.stderr)
        return 2
    report.timing_ms = None if args.no_timing else round((time.perf_counter() - start) * 1000, 3)
    print(report.to_json() if args.json else render_text(report))
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
