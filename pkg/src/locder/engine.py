"""Probe families and the local-derivation decomposition pipeline.

A candidate map is reduced stage by stage: an inner derivation is removed
so the map kills ``L_0``, degree-0 inner derivations normalize ``L_1``,
layer 0 must then vanish, the remaining layers must agree with one multiple
of ``delta_t`` and, for centered algebras, the central charges must follow.
Whenever a stage fails, probe elements modelled on the classical
arguments are tried; an infeasible witness system at a probe proves the
candidate is not a local derivation there (relative to the witness
support window) and is attached as the rejection certificate.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .algebra import (
    AlgebraSpec,
    Central,
    Element,
    Graded,
    SpecError,
    Symbol,
    primed_basis,
)
from .maps import (
    DerivationDescriptor,
    WindowError,
    WindowedLinearMap,
    ad_map,
    apply,
    combine,
    delta_t,
    loop_derivation,
)
from .scalars import QSqrt2
from .solver import Infeasible, Witness, witness_solve

__all__ = [
    "LocalDerCandidate",
    "ProbeSpec",
    "ProbeResult",
    "probe_scaled",
    "probe_shift",
    "probe_I0",
    "probe_I0_sum",
    "probe_J",
    "probe_primed_scaled",
    "probe_primed_shift",
    "probe_basis",
    "probe_center",
    "scaled_samples",
    "evaluate_probe",
    "run_probe_family",
    "PROBE_FAMILIES",
    "CenterViolation",
    "CenterReport",
    "check_center",
    "DecompositionReport",
    "decompose",
]

log = logging.getLogger(__name__)

# a candidate is just the windowed map under test
LocalDerCandidate = WindowedLinearMap

MAX_SAMPLES = 64


def _g(layer: int, degree: int) -> Element:
    return Element._from_clean({Graded(layer, degree): QSqrt2(1)})


@dataclass(frozen=True)
class ProbeSpec:
    name: str
    element: Element
    parameters: dict = field(default_factory=dict, hash=False)


# -- probe families -----------------------------------------------------------------


def probe_scaled(m: int, samples: Iterable) -> list[ProbeSpec]:
    """``L_m + x*L_0`` for each sample ``x``."""
    if m == 0:
        raise ValueError("probe_scaled needs m != 0")
    samples = list(samples)
    if any(not x for x in samples):
        raise ValueError("samples must be nonzero")
    if len(set(samples)) != len(samples):
        raise ValueError("samples must be pairwise distinct")
    return [ProbeSpec("scaled", _g(0, m) + _g(0, 0) * x, {"m": m, "x": x}) for x in samples]


def scaled_samples(value: Element, m: int) -> list[int]:
    """Sample points ``1..t-s+1`` where ``s..t`` is the graded degree range of ``value``."""
    degrees = value.graded_degrees()
    span = degrees[-1] - degrees[0] if degrees else 0
    return list(range(1, min(span + 1, MAX_SAMPLES) + 1))


def probe_shift(m: int) -> ProbeSpec:
    """``L_m + L_1``."""
    if m in (0, 1):
        raise ValueError("probe_shift needs m not in {0, 1}")
    return ProbeSpec("shift", _g(0, m) + _g(0, 1), {"m": m})


def probe_I0(candidate: WindowedLinearMap, layer: int | None = None) -> ProbeSpec:
    """``I_0 + L_p + L_q`` with ``p < s``, ``p < 0`` and ``p + q > t``.

    ``s``/``t`` are the min/max graded degrees of the candidate's value at
    ``I_0`` (0 when empty); ``p = min(s, 0) - 1``, ``q = max(t, 0) - p + 1``.
    """
    spec = candidate.spec
    k = spec.top_layer if layer is None else layer
    if k < 1:
        raise SpecError("probe_I0 needs a layer >= 1")
    degrees = candidate[Graded(k, 0)].graded_degrees()
    s, t = (degrees[0], degrees[-1]) if degrees else (0, 0)
    p = min(s, 0) - 1
    q = max(t, 0) - p + 1
    if max(-p, q) > candidate.window:
        raise WindowError(f"probe I0 + L{p} + L{q} needs window >= {max(-p, q)}")
    return ProbeSpec("I0", _g(k, 0) + _g(0, p) + _g(0, q), {"p": p, "q": q, "s": s, "t": t, "layer": k})


def probe_I0_sum(spec: AlgebraSpec, layer: int | None = None) -> ProbeSpec:
    """``I_0 + I_1 + I_2``."""
    k = spec.top_layer if layer is None else layer
    if k < 1:
        raise SpecError("probe_I0_sum needs truncation order >= 2")
    return ProbeSpec("I0-sum", _g(k, 0) + _g(k, 1) + _g(k, 2), {"layer": k})


def probe_J(m: int, spec: AlgebraSpec, layer: int = 1) -> list[ProbeSpec]:
    """``J_m + L_1 + L_2`` and ``J_m + I_2m`` (J = ``layer``, I = ``2*layer``)."""
    if spec.truncation_order < 3:
        raise SpecError("probe_J needs truncation order >= 3")
    out = [ProbeSpec("J-shift", _g(layer, m) + _g(0, 1) + _g(0, 2), {"m": m, "layer": layer})]
    if 2 * layer < spec.truncation_order:
        out.append(ProbeSpec("J-square", _g(layer, m) + _g(2 * layer, 2 * m), {"m": m, "layer": layer}))
    return out


def probe_primed_scaled(spec: AlgebraSpec, kind: str, m: int, samples: Iterable) -> list[ProbeSpec]:
    """Scaled probes in a key-construction basis: ``X_m + x*X_0`` for X = L', L''."""
    base = primed_basis(spec, kind, 0)
    return [ProbeSpec(f"{kind}-scaled", primed_basis(spec, kind, m) + base * x, {"m": m, "x": x})
            for x in samples]


def probe_primed_shift(spec: AlgebraSpec, kind: str, m: int) -> ProbeSpec:
    if m in (0, 1):
        raise ValueError("shift probe needs m not in {0, 1}")
    return ProbeSpec(f"{kind}-shift", primed_basis(spec, kind, m) + primed_basis(spec, kind, 1), {"m": m})


def probe_basis(symbol: Symbol) -> ProbeSpec:
    return ProbeSpec("basis", Element({symbol: 1}), {"symbol": symbol})


def probe_center(layer: int) -> ProbeSpec:
    """``g(layer, 0) + c(layer)``: separates the central value from delta_t."""
    return ProbeSpec("center", Element({Graded(layer, 0): 1, Central(layer): 1}), {"layer": layer})


# -- evaluating probes -----------------------------------------------------------------


@dataclass
class ProbeResult:
    probe: ProbeSpec
    target: Element
    outcome: Witness | Infeasible

    @property
    def rejected(self) -> bool:
        return isinstance(self.outcome, Infeasible)

    @property
    def certificate_valid(self) -> bool:
        return self.rejected and self.outcome.verify()


def evaluate_probe(candidate: WindowedLinearMap, probe: ProbeSpec,
                   full_outer: bool = False, slack: int = 2) -> ProbeResult:
    """Solve the witness problem ``D(probe) = candidate(probe)``."""
    target = apply(candidate, probe.element)
    outcome = witness_solve(probe.element, target, candidate.spec, slack=slack, full_outer=full_outer)
    return ProbeResult(probe, target, outcome)


def _run_battery(candidate, battery, full_outer, slack, tried: list):
    """Evaluate probes in order; returns the first rejecting ProbeResult."""
    for make in battery:
        try:
            probes = make()
        except (WindowError, ValueError, SpecError) as exc:
            tried.append({"probe": getattr(make, "label", "?"), "skipped": str(exc)})
            continue
        if isinstance(probes, ProbeSpec):
            probes = [probes]
        for probe in probes:
            try:
                result = evaluate_probe(candidate, probe, full_outer, slack)
            except WindowError as exc:
                tried.append({"probe": probe.name, "element": probe.element, "skipped": str(exc)})
                continue
            tried.append({"probe": probe.name, "element": probe.element, "rejected": result.rejected})
            if result.rejected:
                return result
    return None


def _labelled(label: str, fn: Callable):
    fn.label = label
    return fn


PROBE_FAMILIES = ("scaled", "shift", "I0", "I0-sum", "J", "Lprime-scaled", "Lprime-shift",
                  "Ldoubleprime-scaled", "Ldoubleprime-shift", "center", "basis")


def run_probe_family(candidate: WindowedLinearMap, family: str, m: int | None = None,
                     samples: Iterable | None = None, layer: int | None = None,
                     symbol: Symbol | None = None, full_outer: bool = False) -> list[ProbeResult]:
    """Evaluate every probe of a named family against the candidate."""
    spec = candidate.spec

    def need_m():
        if m is None:
            raise ValueError(f"probe family {family!r} needs m")
        return m

    if family == "scaled":
        mm = need_m()
        probes = probe_scaled(mm, samples or scaled_samples(candidate[Graded(0, mm)], mm))
    elif family == "shift":
        probes = [probe_shift(need_m())]
    elif family == "I0":
        probes = [probe_I0(candidate, layer)]
    elif family == "I0-sum":
        probes = [probe_I0_sum(spec, layer)]
    elif family == "J":
        probes = probe_J(need_m(), spec)
    elif family in ("Lprime-scaled", "Ldoubleprime-scaled"):
        probes = probe_primed_scaled(spec, family.split("-")[0], need_m(), samples or [1, 2, 3])
    elif family in ("Lprime-shift", "Ldoubleprime-shift"):
        probes = [probe_primed_shift(spec, family.split("-")[0], need_m())]
    elif family == "center":
        if not spec.centered:
            raise SpecError("center probes need a centered algebra")
        probes = [probe_center(k) for k in (spec.layers if layer is None else [layer])]
    elif family == "basis":
        if symbol is None:
            raise ValueError("basis probe needs a symbol")
        probes = [probe_basis(symbol)]
    else:
        raise ValueError(f"unknown probe family {family!r}; expected one of {PROBE_FAMILIES}")
    return [evaluate_probe(candidate, p, full_outer) for p in probes]


# -- central charges --------------------------------------------------------------------


@dataclass
class CenterViolation:
    symbol: Symbol
    value: Element
    expected: Element
    rejection: ProbeResult | None = None


@dataclass
class CenterReport:
    violations: list[CenterViolation]
    checked: int

    @property
    def passed(self) -> bool:
        return not self.violations


def _pure_central_images(candidate: WindowedLinearMap, slack: int = 2, full_outer: bool = False):
    """Graded symbols whose value is a nonzero central element no derivation can produce."""
    for s in candidate.domain:
        if type(s) is not Graded:
            continue
        v = candidate[s]
        if v and v.is_central():
            result = evaluate_probe(candidate, probe_basis(s), full_outer, slack)
            if result.rejected:
                yield CenterViolation(s, v, Element(), result)


def check_center(candidate: WindowedLinearMap, outer=0, slack: int = 2,
                 full_outer: bool = False) -> CenterReport:
    """Central-charge checks for a centered algebra.

    Each ``c(k)`` must map to ``outer * k * c(k)`` (``outer = 0`` by
    default, so the central column must vanish), and no graded symbol may
    map to a nonzero central element unless a witness exists.
    """
    spec = candidate.spec
    if not spec.centered:
        raise SpecError(f"{spec.name} has no center")
    violations = []
    checked = 0
    for k in spec.layers:
        c = Central(k)
        checked += 1
        expected = Element({c: QSqrt2(outer) * k if not isinstance(outer, QSqrt2) else outer * k})
        value = candidate[c]
        if value != expected:
            tried: list = []
            rejection = _run_battery(candidate, [_labelled("center", lambda k=k: probe_center(k))],
                                     full_outer, slack, tried)
            violations.append(CenterViolation(c, value, expected, rejection))
    for v in _pure_central_images(candidate, slack, full_outer):
        violations.append(v)
    checked += sum(1 for s in candidate.domain if type(s) is Graded)
    return CenterReport(violations, checked)


# -- the pipeline -----------------------------------------------------------------------


@dataclass
class DecompositionReport:
    outcome: str  # "success" | "rejected" | "unresolved"
    spec: AlgebraSpec
    window: int
    descriptor: DerivationDescriptor | None = None
    residual_zero: bool = False
    rejection: ProbeResult | None = None
    failure: dict | None = None
    trace: list[dict] = field(default_factory=list)
    audit: list[dict] = field(default_factory=list)

    @property
    def success(self) -> bool:
        return self.outcome == "success"

    @property
    def scope(self) -> str:
        return f"derivation on window [-{self.window}, {self.window}]" if self.success else \
            f"checked on window [-{self.window}, {self.window}] only"


class _Stop(Exception):
    pass


def _degree_order(window: int, with_zero: bool) -> list[int]:
    out = []
    for m in range(1, window + 1):
        out += [m, -m]
    return out + [0] if with_zero else out


def _layer_battery(candidate, k: int, m: int, residual: Element) -> list[Callable]:
    spec = candidate.spec
    n = spec.truncation_order
    top = n - 1
    samples = scaled_samples(residual, m) if m else [1]
    battery: list[Callable] = []
    if k == top:
        if m != 0:
            battery.append(_labelled("Lprime-scaled", lambda: probe_primed_scaled(spec, "Lprime", m, samples)))
            if m != 1:
                battery.append(_labelled("Lprime-shift", lambda: probe_primed_shift(spec, "Lprime", m)))
        else:
            i0 = _labelled("I0", lambda: probe_I0(candidate, k))
            i0_sum = _labelled("I0-sum", lambda: probe_I0_sum(spec, k))
            diagonal = set(residual) <= {Graded(k, 0)}
            battery += [i0_sum, i0] if diagonal else [i0, i0_sum]
    elif n == 3 and k == 1:
        battery.append(_labelled("J", lambda: probe_J(m, spec, k)))
        if m != 0:
            battery.append(_labelled("Ldoubleprime-scaled",
                                     lambda: probe_primed_scaled(spec, "Ldoubleprime", m, samples)))
            if m != 1:
                battery.append(_labelled("Ldoubleprime-shift",
                                         lambda: probe_primed_shift(spec, "Ldoubleprime", m)))
    else:
        battery.append(_labelled("J", lambda: probe_J(m, spec, k)))
    battery += _generic_battery(Graded(k, m), residual)
    return battery


def _generic_battery(symbol: Graded, residual: Element) -> list[Callable]:
    k, m = symbol.layer, symbol.degree
    samples = scaled_samples(residual, m) if m else [1]
    return [
        _labelled("basis", lambda: probe_basis(symbol)),
        _labelled("generic-shift", lambda: ProbeSpec("generic-shift", _g(k, m) + _g(0, 1) + _g(0, 2), {"symbol": symbol})),
        _labelled("generic-scaled", lambda: [ProbeSpec("generic-scaled", _g(k, m) + _g(0, 0) * x, {"symbol": symbol, "x": x})
                                             for x in samples]),
    ]


def decompose(candidate: WindowedLinearMap, audit_all: bool = False, full_outer: bool = False,
              slack: int = 2) -> DecompositionReport:
    """Reduce a candidate to ``ad(u) + e*delta_t`` or reject it with a probe certificate.

    With ``audit_all`` every failing symbol of stages 3-5 is probed and
    recorded in ``audit``; the outcome still reflects the first failure.
    With ``full_outer`` the outer part also allows ``t^j d/dt``, ``j >= 2``.
    """
    spec, N = candidate.spec, candidate.window
    if N < 3:
        raise WindowError("decompose needs a window of at least 3")
    n = spec.truncation_order
    report = DecompositionReport("unresolved", spec, N)
    trace = report.trace
    asserted = n >= 3  # the n >= 3 pipeline follows the n = 2 argument by analogy

    def fail(stage: str, symbol: Symbol, residual: Element, battery: list, fatal: bool):
        tried: list = []
        rejection = _run_battery(candidate, battery, full_outer, slack, tried)
        entry = {"stage": stage, "symbol": symbol, "residual": residual, "probes": tried,
                 "rejected": rejection is not None}
        if report.failure is None:
            report.failure = entry
            report.rejection = rejection
            report.outcome = "rejected" if rejection is not None else "unresolved"
        if audit_all:
            report.audit.append({**entry, "rejection": rejection})
        if fatal or not audit_all:
            raise _Stop

    try:
        # stage 0: graded symbols sent into the center
        if spec.centered:
            for v in _pure_central_images(candidate, slack, full_outer):
                fail("0-pure-central", v.symbol, v.value,
                     [_labelled("basis", lambda s=v.symbol: probe_basis(s))], fatal=False)
            trace.append({"stage": "0-pure-central", "passed": report.failure is None})

        # stage 1: remove an inner derivation so that L_0 is killed
        L0 = _g(0, 0)
        target = candidate[Graded(0, 0)]
        w = witness_solve(L0, target, spec, include_outer=False, slack=slack)
        if isinstance(w, Infeasible):
            report.failure = {"stage": "1-inner-at-L0", "symbol": Graded(0, 0), "residual": target,
                              "note": "[u, L_0] has no degree-0 or central component" if target else ""}
            report.rejection = ProbeResult(probe_basis(Graded(0, 0)), target, w)
            report.outcome = "rejected"
            raise _Stop
        u1 = w.descriptor.inner.graded_part()
        delta1 = combine([1, -1], [candidate, ad_map(u1, spec, N)])
        trace.append({"stage": "1-inner-at-L0", "u": u1, "asserted": asserted})

        # stage 2: normalize L_1 with degree-0 inner derivations
        v = delta1[Graded(0, 1)]
        aligned = {Graded(k, 1) for k in spec.layers}
        if not set(v) <= aligned:
            fail("2-normalize-L1", Graded(0, 1), v,
                 [_labelled("scaled", lambda: probe_scaled(1, scaled_samples(v, 1)))]
                 + _generic_battery(Graded(0, 1), v), fatal=True)
        coeffs = [v.coeff(Graded(k, 1)) for k in spec.layers]
        w0 = Element({Graded(k, 0): c for k, c in enumerate(coeffs)})
        delta2 = combine([1, 1], [delta1, ad_map(w0, spec, N)])
        trace.append({"stage": "2-normalize-L1", "coefficients": coeffs, "asserted": asserted})

        # stage 3: layer 0 must now vanish
        for m in _degree_order(N, with_zero=True):
            r = delta2[Graded(0, m)]
            if r:
                battery = []
                if m:
                    battery.append(_labelled("scaled", lambda m=m, r=r: probe_scaled(m, scaled_samples(r, m))))
                if m not in (0, 1):
                    battery.append(_labelled("shift", lambda m=m: probe_shift(m)))
                fail("3-layer0-vanishes", Graded(0, m), r, battery + _generic_battery(Graded(0, m), r), fatal=False)
        trace.append({"stage": "3-layer0-vanishes", "passed": report.failure is None, "asserted": asserted})

        # stage 4: higher layers follow one multiple of delta_t
        e = QSqrt2()
        higher: tuple = ()
        delta3 = delta2
        if n >= 2:
            top = n - 1
            e = delta2[Graded(top, 1)].coeff(Graded(top, 1)) / top
            outer_maps, outer_coeffs = [delta_t(spec, N)], [e]
            if full_outer:
                j1 = delta2[Graded(1, 1)]
                higher = tuple(j1.coeff(Graded(p, 1)) for p in range(2, n))
                outer_maps += [loop_derivation(spec, p, N) for p in range(2, n)]
                outer_coeffs += list(higher)
            delta3 = combine([1] + [-c for c in outer_coeffs], [delta2] + outer_maps)
            for k in [top] + list(range(top - 1, 0, -1)):
                eigen = {m: delta2[Graded(k, m)].coeff(Graded(k, m)) / k for m in _degree_order(N, True)}
                constant = len(set(eigen.values())) == 1
                for m in _degree_order(N, with_zero=True):
                    r = delta3[Graded(k, m)]
                    if r:
                        fail(f"4-pin-layer{k}", Graded(k, m), r, _layer_battery(candidate, k, m, r), fatal=False)
                trace.append({"stage": f"4-pin-layer{k}", "layer": k, "eigenvalues": eigen,
                              "constant": constant, "asserted": n >= 3 and k != 1 or n >= 4})
            trace.append({"stage": "4-outer", "e": e, "higher": list(higher)})

        # stage 5: central charges
        if spec.centered:
            for k in spec.layers:
                r = delta3[Central(k)]
                if r:
                    fail("5-center", Central(k), r, [_labelled("center", lambda k=k: probe_center(k))], fatal=False)
            trace.append({"stage": "5-center", "passed": report.failure is None})
    except _Stop:
        return report

    if report.failure is not None:
        return report

    descriptor = DerivationDescriptor(u1 - w0, e, higher)
    residual = combine([1, -1], [candidate, descriptor.to_map(spec, N)])
    report.descriptor = descriptor
    report.residual_zero = residual.is_zero()
    report.outcome = "success" if report.residual_zero else "unresolved"
    if not report.residual_zero:
        log.warning("pipeline passed every stage but the residual is nonzero")
        report.failure = {"stage": "6-residual", "symbol": None, "residual": None}
    trace.append({"stage": "6-descriptor", "inner": descriptor.inner, "outer": e,
                  "residual_zero": report.residual_zero})
    return report
