"""Linear maps on a finite degree window of a truncated loop algebra."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .algebra import (
    AlgebraSpec,
    Central,
    Element,
    Graded,
    SpecError,
    Symbol,
    basis_window,
    bracket,
    bracket_symbols,
    element_sum,
    symbol_key,
)
from .scalars import QSqrt2, as_scalar

__all__ = [
    "WindowError",
    "WindowedLinearMap",
    "DerivationDescriptor",
    "LeibnizViolation",
    "LeibnizReport",
    "apply",
    "ad_map",
    "delta_t",
    "loop_derivation",
    "combine",
    "leibniz_check",
    "restrict",
]


class WindowError(SpecError):
    """A symbol lies outside a map's domain window."""


class WindowedLinearMap:
    """A linear map given by its values on every basis symbol of a window.

    The domain is every graded symbol with ``|degree| <= window`` (all
    layers) plus every central symbol when the spec is centered.  Values
    may have support anywhere.
    """

    def __init__(self, spec: AlgebraSpec, window: int, entries: Mapping[Symbol, Element] | None = None):
        if window < 0:
            raise ValueError("window must be non-negative")
        self.spec = spec
        self.window = window
        self._domain = basis_window(spec, window)
        domain = set(self._domain)
        self.entries: dict[Symbol, Element] = {s: Element() for s in self._domain}
        for s, v in (entries or {}).items():
            if s not in domain:
                raise WindowError(f"{spec.format_symbol(s)} is outside the window [-{window}, {window}] of {spec.name}")
            for t in v:
                spec.check_symbol(t)
            self.entries[s] = v

    @property
    def domain(self) -> list[Symbol]:
        return list(self._domain)

    def __call__(self, x: Element | Symbol) -> Element:
        return apply(self, x)

    def __getitem__(self, s: Symbol) -> Element:
        try:
            return self.entries[s]
        except KeyError:
            raise WindowError(f"{self.spec.format_symbol(s)} is outside the window of this map") from None

    def in_domain(self, s: Symbol) -> bool:
        return s in self.entries

    def nonzero_entries(self) -> list[tuple[Symbol, Element]]:
        return sorted(((s, v) for s, v in self.entries.items() if v), key=lambda kv: symbol_key(kv[0]))

    def is_zero(self) -> bool:
        return not any(self.entries.values())

    def __eq__(self, other) -> bool:
        if not isinstance(other, WindowedLinearMap):
            return NotImplemented
        return (self.spec == other.spec and self.window == other.window
                and self.entries == other.entries)

    def __sub__(self, other: WindowedLinearMap) -> WindowedLinearMap:
        return combine([1, -1], [self, other])

    def __add__(self, other: WindowedLinearMap) -> WindowedLinearMap:
        return combine([1, 1], [self, other])

    def __repr__(self) -> str:
        shown = ", ".join(f"{self.spec.format_symbol(s)} -> {v.format(self.spec)}"
                          for s, v in self.nonzero_entries()[:6])
        return f"WindowedLinearMap({self.spec.name}, N={self.window}, {{{shown}}})"


def apply(map: WindowedLinearMap, x: Element | Symbol) -> Element:
    """Apply a windowed map by linearity; raises WindowError outside the window."""
    if not isinstance(x, Element):
        return map[x]
    return element_sum(map[s] * c for s, c in x.items())


def restrict(f, spec: AlgebraSpec, window: int) -> WindowedLinearMap:
    """Tabulate a callable ``Symbol -> Element`` on a window."""
    return WindowedLinearMap(spec, window, {s: f(s) for s in basis_window(spec, window)})


@dataclass(frozen=True)
class DerivationDescriptor:
    """The derivation ``ad(inner) + outer * delta_t``.

    ``higher[i]`` is the coefficient of ``t^(i+2) d/dt`` and is only
    populated when the extended outer ansatz is requested (n >= 3).
    """

    inner: Element
    outer: QSqrt2 = field(default_factory=QSqrt2)
    higher: tuple = ()

    def action(self, x: Element, spec: AlgebraSpec) -> Element:
        out = bracket(self.inner, x, spec)
        if self.outer:
            out = out + _delta_t_element(x) * self.outer
        for power, c in enumerate(self.higher, start=2):
            if c:
                out = out + _loop_derivation_element(x, power, spec) * c
        return out

    def to_map(self, spec: AlgebraSpec, window: int) -> WindowedLinearMap:
        coeffs = [1, self.outer, *self.higher]
        maps = [ad_map(self.inner, spec, window), delta_t(spec, window)]
        maps += [loop_derivation(spec, p, window) for p in range(2, 2 + len(self.higher))]
        return combine(coeffs, maps)


def ad_map(u: Element, spec: AlgebraSpec, window: int) -> WindowedLinearMap:
    """The inner derivation ``x -> [u, x]`` tabulated on the window."""
    for s in u:
        spec.check_symbol(s)
    entries = {}
    for s in basis_window(spec, window):
        if type(s) is Central:
            entries[s] = Element()
            continue
        entries[s] = element_sum(bracket_symbols(t, s, spec) * c for t, c in u.items())
    return WindowedLinearMap(spec, window, entries)


def _delta_t_element(x: Element) -> Element:
    return Element._from_clean({s: c * s.layer for s, c in x.items() if s.layer})


def delta_t(spec: AlgebraSpec, window: int) -> WindowedLinearMap:
    """The grading derivation scaling each layer-k symbol by k."""
    return WindowedLinearMap(spec, window, {
        s: Element({s: s.layer}) for s in basis_window(spec, window)})


def _shift_layer(s: Symbol, k: int) -> Symbol:
    return Graded(k, s.degree) if type(s) is Graded else Central(k)


def _loop_derivation_element(x: Element, power: int, spec: AlgebraSpec) -> Element:
    n = spec.truncation_order
    out = {}
    for s, c in x.items():
        k = s.layer + power - 1
        if s.layer and k < n:
            out[_shift_layer(s, k)] = c * s.layer
    return Element(out)


def loop_derivation(spec: AlgebraSpec, power: int, window: int) -> WindowedLinearMap:
    """The derivation induced by ``t^power d/dt`` on the loop variable.

    Layer-k symbols go to ``k`` times the layer ``k+power-1`` symbol of the
    same degree (zero past the truncation).  ``power == 1`` is delta_t.
    """
    if power < 1:
        raise ValueError("power must be >= 1")
    return WindowedLinearMap(spec, window, {
        s: _loop_derivation_element(Element({s: 1}), power, spec)
        for s in basis_window(spec, window)})


def combine(coeffs: Sequence, maps: Sequence[WindowedLinearMap],
            spec: AlgebraSpec | None = None, window: int | None = None) -> WindowedLinearMap:
    """Pointwise linear combination; the window is the smallest of the inputs.

    The empty combination is the zero map on ``spec``/``window``.
    """
    if len(coeffs) != len(maps):
        raise ValueError("need one coefficient per map")
    if not maps:
        if spec is None or window is None:
            raise ValueError("an empty combination needs spec and window")
        return WindowedLinearMap(spec, window)
    spec = maps[0].spec
    if any(m.spec != spec for m in maps):
        raise SpecError("cannot combine maps on different algebras")
    window = min(m.window for m in maps)
    coeffs = [as_scalar(c) for c in coeffs]
    entries = {s: element_sum(m.entries[s] * c for c, m in zip(coeffs, maps) if c)
               for s in basis_window(spec, window)}
    return WindowedLinearMap(spec, window, entries)


def zero_map(spec: AlgebraSpec, window: int) -> WindowedLinearMap:
    return WindowedLinearMap(spec, window)


@dataclass
class LeibnizViolation:
    x: Symbol
    y: Symbol
    lhs: Element
    rhs: Element


@dataclass
class LeibnizReport:
    violations: list[LeibnizViolation]
    checked: int
    skipped: int

    @property
    def passed(self) -> bool:
        return not self.violations


def leibniz_check(map: WindowedLinearMap, stop_at_first: bool = False) -> LeibnizReport:
    """Check ``D[x,y] = [Dx,y] + [x,Dy]`` on all pairs whose bracket stays in the window.

    Pairs whose bracket has a graded term outside the window are skipped
    and counted.
    """
    spec, N = map.spec, map.window
    syms = map.domain
    violations: list[LeibnizViolation] = []
    checked = skipped = 0
    for x, y in itertools.combinations(syms, 2):
        xy = bracket_symbols(x, y, spec)
        if any(type(s) is Graded and abs(s.degree) > N for s in xy):
            skipped += 1
            continue
        checked += 1
        ex = Element._from_clean({x: QSqrt2(1)})
        ey = Element._from_clean({y: QSqrt2(1)})
        lhs = apply(map, xy)
        rhs = bracket(map.entries[x], ey, spec) + bracket(ex, map.entries[y], spec)
        if lhs != rhs:
            violations.append(LeibnizViolation(x, y, lhs, rhs))
            if stop_at_first:
                break
    return LeibnizReport(violations, checked, skipped)
