"""Acceptance criteria AC1-AC8, all exact.

Each test records one PASS/FAIL line; the lines are printed in the pytest
terminal summary and when this file is run as a script.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest

from locder.algebra import (
    Central,
    Element,
    Graded,
    antisymmetry_check,
    bracket,
    jacobi_check,
    primed_basis,
    resolve_spec,
    verify_construction,
)
from locder.engine import check_center, decompose, evaluate_probe, probe_I0_sum, probe_J, probe_scaled
from locder.maps import WindowedLinearMap, ad_map, combine, delta_t, leibniz_check
from locder.sampling import random_derivation
from locder.scalars import QSqrt2
from locder.solver import Infeasible, Solution, derivation_space, solve

from oracles import bms3_table, consistent, dense_rank, mat_vec, random_system, table_element, w22_table

RESULTS: dict[str, tuple[bool, str]] = {}
PRESETS = ["witt", "virasoro", "w22", "w22-centerless", "bms3", "bms3-centerless", "n=4"]
G = lambda k, m, c=1: Element({Graded(k, m): c})


def record(ac: str, checks: list[tuple[str, bool]]):
    failed = [name for name, ok in checks if not ok]
    detail = "; ".join(failed) if failed else f"{len(checks)} check{'s' * (len(checks) != 1)}"
    RESULTS[ac] = (not failed, detail)
    assert not failed, f"{ac} failed: {detail}"


def ac_lines() -> list[str]:
    return [f"{ac} {'PASS' if ok else 'FAIL'}: {detail}" for ac, (ok, detail) in sorted(RESULTS.items())]


def test_ac1_presentation_validity():
    checks = []
    for name in PRESETS:
        spec = resolve_spec(name)
        checks.append((f"jacobi {name}", jacobi_check(spec, 4).passed))
        checks.append((f"antisymmetry {name}", antisymmetry_check(spec, 4).passed))
    for spec_name, letters, table in (("w22", "LI", w22_table), ("bms3", "LJI", bms3_table)):
        spec = resolve_spec(spec_name)
        ok = True
        for a, b in itertools.product(letters, repeat=2):
            for m, n in itertools.product(range(-3, 4), repeat=2):
                x, y = spec.parse_symbol(f"{a}:{m}"), spec.parse_symbol(f"{b}:{n}")
                got = bracket(Element({x: 1}), Element({y: 1}), spec)
                ok &= got == table_element(spec, table((a, m), (b, n)))
        checks.append((f"{spec_name} table", ok))
    record("AC1", checks)


def test_ac2_key_constructions():
    checks = []
    for name in ("w22-centerless", "w22"):
        checks.append((f"Lprime {name}", verify_construction(resolve_spec(name), "Lprime", 6).passed))
    for name in ("bms3-centerless", "bms3"):
        spec = resolve_spec(name)
        for kind in ("Ldoubleprime", "Jprime"):
            checks.append((f"{kind} {name}", verify_construction(spec, kind, 6).passed))
    spec = resolve_spec("bms3-centerless")
    irrational = any(c.irr for m in range(1, 7) for c in primed_basis(spec, "Ldoubleprime", m).values())
    checks.append(("sqrt2 coefficients present", irrational))
    record("AC2", checks)


def _classical_delta(spec_name: str, s):
    """The classical outer derivation, written from its defining values."""
    half = QSqrt2(Fraction(1, 2))
    if spec_name == "w22":
        values = {Graded: {0: 0, 1: 1}, Central: {0: 0, 1: 1}}
    else:
        # C1 -> C1/2 is forced by Leibniz on [L_m, J_-m]; see test below
        values = {Graded: {0: 0, 1: half, 2: 1}, Central: {0: 0, 1: half, 2: 1}}
    return Element({s: values[type(s)][s.layer]})


def test_ac3_outer_derivation():
    checks = []
    for name in PRESETS:
        rep = leibniz_check(delta_t(resolve_spec(name), 6))
        checks.append((f"leibniz {name}", rep.passed and rep.checked > 0))
    for name, factor in (("w22", 1), ("bms3", 2)):
        spec = resolve_spec(name)
        d = delta_t(spec, 6)
        checks.append((f"{name} = {factor} x classical delta",
                       all(d[s] == _classical_delta(name, s) * factor for s in d.domain)))
    record("AC3", checks)


def test_ac3_note_literal_C1_value_is_not_a_derivation():
    spec = resolve_spec("bms3")
    literal = WindowedLinearMap(spec, 4, {s: _classical_delta("bms3", s) for s in delta_t(spec, 4).domain})
    literal.entries[Central(1)] = Element({Central(1): 1})
    assert leibniz_check(delta_t(spec, 4)).passed
    assert not leibniz_check(literal).passed


def test_ac4_derivation_spaces():
    checks = []
    for name, dims in (("w22-centerless", {0: 3, 1: 2, 2: 2}), ("bms3-centerless", {0: 4, 1: 3, 2: 3})):
        spec = resolve_spec(name)
        for d in (0, 1, -1, 2, -2):
            space = derivation_space(spec, d, 8)
            expected = dims[abs(d)]
            checks.append((f"{name} d={d}: dim {space.dimension}, expected {expected}", space.dimension == expected))
            known = [ad_map(G(k, d), spec, 8) for k in spec.layers] + ([delta_t(spec, 8)] if d == 0 else [])
            checks.append((f"{name} d={d} contains known", all(space.contains(k) for k in known)))
    record("AC4", checks)


def _round_trips(spec_name: str, window: int, count: int, seed: int, support: int) -> int:
    spec = resolve_spec(spec_name)
    rng = random.Random(seed)
    ok = 0
    for _ in range(count):
        _, m = random_derivation(rng, spec, window, support=support, bound=100)
        rep = decompose(m)
        if rep.success and combine([1, -1], [m, rep.descriptor.to_map(spec, window)]).is_zero():
            ok += 1
    return ok


def test_ac5_round_trip():
    checks = []
    for name, seed in (("w22-centerless", 5001), ("bms3-centerless", 5002)):
        ok = _round_trips(name, 8, 100, seed, 3)
        checks.append((f"{name} {ok}/100", ok == 100))
    record("AC5", checks)


def test_ac6_proof_replay():
    checks = []
    w22cl, bms3cl, w22 = (resolve_spec(n) for n in ("w22-centerless", "bms3-centerless", "w22"))

    # (a) L_2 -> L_5 fails the scaled probes
    a = WindowedLinearMap(w22cl, 6, {Graded(0, 2): G(0, 5)})
    hits = [r for r in (evaluate_probe(a, p) for p in probe_scaled(2, [1, 2, 3])) if r.rejected]
    rep = decompose(a)
    checks.append(("(a) scaled certificate", bool(hits) and all(r.certificate_valid for r in hits)))
    checks.append(("(a) pipeline", rep.outcome == "rejected" and rep.rejection.probe.name == "scaled"
                   and rep.rejection.certificate_valid))

    # (b) I_0 -> I_0 alone fails I_0 + I_1 + I_2
    b = WindowedLinearMap(w22cl, 4, {Graded(1, 0): G(1, 0)})
    r = evaluate_probe(b, probe_I0_sum(w22cl))
    checks.append(("(b) I0-sum certificate", r.rejected and r.certificate_valid))

    # (c) J_m -> J_m and J_m -> I_m, one m each
    m = 2
    cj = WindowedLinearMap(bms3cl, 8, {Graded(1, m): G(1, m)})
    ci = WindowedLinearMap(bms3cl, 8, {Graded(1, m): G(2, m)})
    rj = [evaluate_probe(cj, p) for p in probe_J(m, bms3cl)]
    ri = [evaluate_probe(ci, p) for p in probe_J(m, bms3cl)]
    checks.append(("(c) J-only via J-square", rj[1].rejected and rj[1].certificate_valid))
    checks.append(("(c) I-only via J-shift", ri[0].rejected and ri[0].certificate_valid))

    # (d) L_m -> C fails the center check
    d = WindowedLinearMap(w22, 4, {Graded(0, 3): Element({Central(0): 1})})
    rep = check_center(d)
    checks.append(("(d) center certificate", not rep.passed and all(
        v.rejection is not None and v.rejection.certificate_valid for v in rep.violations)))
    record("AC6", checks)


def test_ac7_solver_audit():
    bad = []
    for seed in range(1000):
        system = random_system(random.Random(70000 + seed), max_dim=12)
        A, b = system.dense(), system.rhs
        out = solve(system)
        if isinstance(out, Solution):
            ok = (mat_vec(A, out.particular) == b
                  and all(not any(mat_vec(A, v)) for v in out.nullspace)
                  and len(out.nullspace) == system.shape[1] - dense_rank(A))
        else:
            zA, zb = system.left_apply(out.certificate)
            ok = not any(zA) and bool(zb) and not consistent(A, b)
        if not ok:
            bad.append(seed)
    record("AC7", [(f"1000 systems, bad seeds {bad}", not bad)])


def test_ac8_generic_n():
    spec = resolve_spec("n=4")
    checks = [
        ("jacobi n=4", jacobi_check(spec, 4).passed),
        ("delta_t leibniz n=4", leibniz_check(delta_t(spec, 4)).passed),
    ]
    ok = _round_trips("n=4", 4, 10, 8008, 2)
    checks.append((f"round trips {ok}/10", ok == 10))
    record("AC8", checks)


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_ac") and callable(fn):
            try:
                fn()
            except AssertionError:
                pass
    print("\n".join(ac_lines()))
