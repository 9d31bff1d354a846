"""Truncated loop Virasoro algebras Vir ⊗ C[t, t^-1]/(t^n).

Basis: ``Graded(k, m)`` is the layer-``k`` (t-degree ``k``) generator of
degree ``m``; ``Central(k)`` is the layer-``k`` central charge.  With the
usual names, layer 0 is ``L``, the top layer of W(2,2) is ``I`` and the
deformed bms3 algebra has layers ``L, J, I``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Union

from .scalars import QSqrt2, SQRT2, as_scalar

__all__ = [
    "AlgebraSpec",
    "Graded",
    "Central",
    "Symbol",
    "Element",
    "SupportProfile",
    "SpecError",
    "PRESETS",
    "resolve_spec",
    "bracket",
    "bracket_symbols",
    "basis_window",
    "jacobi_check",
    "antisymmetry_check",
    "primed_basis",
    "verify_construction",
    "support_profile",
    "symbol_key",
]


class SpecError(ValueError):
    """A symbol, element or construction does not fit the algebra spec."""


@dataclass(frozen=True)
class Graded:
    layer: int
    degree: int

    def __repr__(self) -> str:
        return f"g:{self.layer}:{self.degree}"


@dataclass(frozen=True)
class Central:
    layer: int

    def __repr__(self) -> str:
        return f"c:{self.layer}"


Symbol = Union[Graded, Central]


def symbol_key(s: Symbol) -> tuple:
    """Total order on symbols: graded by (layer, degree), then centrals."""
    if type(s) is Graded:
        return (0, s.layer, s.degree)
    return (1, s.layer, 0)


# -- algebra presentations ----------------------------------------------------

_LETTERS = {1: ("L",), 2: ("L", "I"), 3: ("L", "J", "I")}
_CENTRAL_NAMES = ("C", "C1", "C2")


@dataclass(frozen=True)
class AlgebraSpec:
    truncation_order: int
    centered: bool = True
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.truncation_order < 1:
            raise SpecError("truncation order must be >= 1")
        if not self.name:
            label = f"n={self.truncation_order}" + ("" if self.centered else ",centerless")
            object.__setattr__(self, "name", _PRESET_NAMES.get(
                (self.truncation_order, self.centered), label))

    @property
    def n(self) -> int:
        return self.truncation_order

    @property
    def layers(self) -> range:
        return range(self.truncation_order)

    @property
    def top_layer(self) -> int:
        return self.truncation_order - 1

    def check_symbol(self, s: Symbol) -> None:
        if not 0 <= s.layer < self.truncation_order:
            raise SpecError(f"{s!r}: layer outside 0..{self.truncation_order - 1} of {self.name}")
        if type(s) is Central and not self.centered:
            raise SpecError(f"{s!r}: central symbol in centerless algebra {self.name}")

    def letter(self, layer: int) -> str | None:
        """Conventional letter for a layer (L, I, J), or None for generic n."""
        letters = _LETTERS.get(self.truncation_order)
        if letters is None:
            return "L" if layer == 0 else None
        return letters[layer]

    def central_name(self, layer: int) -> str | None:
        if self.truncation_order <= 3:
            return _CENTRAL_NAMES[layer]
        return "C" if layer == 0 else None

    def format_symbol(self, s: Symbol) -> str:
        if type(s) is Graded:
            letter = self.letter(s.layer)
            return f"{letter}:{s.degree}" if letter else f"g:{s.layer}:{s.degree}"
        name = self.central_name(s.layer)
        return name if name else f"c:{s.layer}"

    def parse_symbol(self, text: str) -> Symbol:
        """Parse ``L:m``/``I:m``/``J:m``, ``C``/``C1``/``C2``, ``g:k:m`` or ``c:k``."""
        t = text.strip()
        m = re.fullmatch(r"g:(\d+):([+-]?\d+)", t)
        if m:
            s: Symbol = Graded(int(m.group(1)), int(m.group(2)))
        elif (m := re.fullmatch(r"c:(\d+)", t)):
            s = Central(int(m.group(1)))
        elif (m := re.fullmatch(r"([A-Z])[:_]?([+-]?\d+)", t)) and m.group(1) != "C":
            letters = [self.letter(k) for k in self.layers]
            if m.group(1) not in letters:
                raise SpecError(f"basis alias {m.group(1)!r} is not defined for {self.name}")
            s = Graded(letters.index(m.group(1)), int(m.group(2)))
        elif t in _CENTRAL_NAMES:
            k = _CENTRAL_NAMES.index(t)
            if self.central_name(k) != t:
                raise SpecError(f"central alias {t!r} is not defined for {self.name}")
            s = Central(k)
        else:
            raise SpecError(f"cannot parse basis symbol {text!r}")
        self.check_symbol(s)
        return s


PRESETS: dict[str, tuple[int, bool]] = {
    "witt": (1, False),
    "virasoro": (1, True),
    "w22": (2, True),
    "w22-centerless": (2, False),
    "bms3": (3, True),
    "bms3-centerless": (3, False),
}
_PRESET_NAMES = {v: k for k, v in PRESETS.items()}


def resolve_spec(name: str | AlgebraSpec) -> AlgebraSpec:
    """Resolve a preset name or ``n=K[,centerless]`` to an AlgebraSpec."""
    if isinstance(name, AlgebraSpec):
        return name
    key = name.strip().lower()
    if key in PRESETS:
        n, centered = PRESETS[key]
        return AlgebraSpec(n, centered, key)
    m = re.fullmatch(r"n\s*=\s*(\d+)\s*(,\s*(centerless|centered))?", key)
    if not m:
        raise SpecError(f"unknown algebra {name!r}; expected one of {sorted(PRESETS)} or n=K[,centerless]")
    return AlgebraSpec(int(m.group(1)), m.group(3) != "centerless")


# -- elements -------------------------------------------------------------------


class Element(Mapping):
    """Finite linear combination of basis symbols with Q(sqrt 2) coefficients.

    Immutable; zero coefficients are never stored.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping | Iterable = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict = {}
        for s, c in items:
            c = as_scalar(c)
            if s in acc:
                c = acc[s] + c
            acc[s] = c
        self._terms = {s: c for s, c in acc.items() if c}

    @classmethod
    def _from_clean(cls, terms: dict) -> Element:
        obj = object.__new__(cls)
        obj._terms = terms
        return obj

    @classmethod
    def basis(cls, s: Symbol, coeff=1) -> Element:
        return cls({s: coeff})

    def __getitem__(self, s):
        return self._terms[s]

    def coeff(self, s: Symbol) -> QSqrt2:
        return self._terms.get(s, QSqrt2())

    def __iter__(self) -> Iterator:
        return iter(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, Element):
            return self._terms == other._terms
        if other == 0:
            return not self._terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def sorted_items(self) -> list:
        return sorted(self._terms.items(), key=lambda kv: symbol_key(kv[0]))

    def __add__(self, other: Element) -> Element:
        if not isinstance(other, Element):
            return NotImplemented
        out = dict(self._terms)
        for s, c in other._terms.items():
            v = out.get(s)
            v = c if v is None else v + c
            if v:
                out[s] = v
            else:
                out.pop(s, None)
        return Element._from_clean(out)

    def __neg__(self) -> Element:
        return Element._from_clean({s: -c for s, c in self._terms.items()})

    def __sub__(self, other: Element) -> Element:
        if not isinstance(other, Element):
            return NotImplemented
        return self + (-other)

    def __mul__(self, k) -> Element:
        k = as_scalar(k)
        if not k:
            return Element()
        return Element._from_clean({s: c * k for s, c in self._terms.items()})

    __rmul__ = __mul__

    def graded_degrees(self) -> list[int]:
        return sorted({s.degree for s in self._terms if type(s) is Graded})

    def graded_part(self) -> Element:
        return Element._from_clean({s: c for s, c in self._terms.items() if type(s) is Graded})

    def central_part(self) -> Element:
        return Element._from_clean({s: c for s, c in self._terms.items() if type(s) is Central})

    def is_central(self) -> bool:
        return all(type(s) is Central for s in self._terms)

    def __repr__(self) -> str:
        if not self._terms:
            return "0"
        return " + ".join(f"({c})*{s!r}" for s, c in self.sorted_items())

    def format(self, spec: AlgebraSpec) -> str:
        if not self._terms:
            return "0"
        parts = []
        for s, c in self.sorted_items():
            name = spec.format_symbol(s)
            if c == 1:
                parts.append(name)
            elif c == -1:
                parts.append(f"-{name}")
            elif c.irr and c.rat:
                parts.append(f"({c})*{name}")
            else:
                parts.append(f"{c}*{name}")
        return " + ".join(parts).replace("+ -", "- ")


def _sum(elements: Iterable[Element]) -> Element:
    acc: dict = {}
    for e in elements:
        for s, c in e._terms.items():
            v = acc.get(s)
            acc[s] = c if v is None else v + c
    return Element._from_clean({s: c for s, c in acc.items() if c})


def element_sum(elements: Iterable[Element]) -> Element:
    return _sum(elements)


# -- bracket ------------------------------------------------------------------


@lru_cache(maxsize=None)
def _bracket_graded(i: int, m: int, j: int, n: int, order: int, centered: bool) -> Element:
    k = i + j
    if k >= order:
        return Element()
    terms = {}
    if m != n:
        terms[Graded(k, m + n)] = QSqrt2(m - n)
    if centered and m + n == 0 and m * m * m != m:
        terms[Central(k)] = QSqrt2(Fraction(m**3 - m, 12))
    return Element._from_clean(terms)


def bracket_symbols(x: Symbol, y: Symbol, spec: AlgebraSpec) -> Element:
    """Bracket of two basis symbols (no validity check)."""
    if type(x) is Central or type(y) is Central:
        return Element()
    return _bracket_graded(x.layer, x.degree, y.layer, y.degree, spec.truncation_order, spec.centered)


def bracket(x: Element, y: Element, spec: AlgebraSpec) -> Element:
    """Lie bracket, bilinear extension of the truncated loop rule.

    ``[g(i,m), g(j,n)] = (m-n) g(i+j, m+n) + δ_{m+n,0} (m^3-m)/12 c(i+j)``,
    terms with layer ``i+j >= n`` dropped, central terms dropped when
    the spec is centerless.
    """
    for s in itertools.chain(x, y):
        spec.check_symbol(s)
    acc: dict = {}
    order, centered = spec.truncation_order, spec.centered
    for s, a in x._terms.items():
        if type(s) is Central:
            continue
        for t, b in y._terms.items():
            if type(t) is Central or s.layer + t.layer >= order:
                continue
            ab = a * b
            for u, c in _bracket_graded(s.layer, s.degree, t.layer, t.degree, order, centered)._terms.items():
                v = acc.get(u)
                acc[u] = ab * c if v is None else v + ab * c
    return Element._from_clean({u: c for u, c in acc.items() if c})


def basis_window(spec: AlgebraSpec, window: int, central: bool = True) -> list[Symbol]:
    """All graded symbols with ``|degree| <= window`` plus (optionally) centrals."""
    out: list[Symbol] = [Graded(k, m) for k in spec.layers for m in range(-window, window + 1)]
    if central and spec.centered:
        out.extend(Central(k) for k in spec.layers)
    return out


@dataclass
class CheckReport:
    name: str
    passed: bool
    checked: int
    failure: dict | None = None
    modulo_center: bool = False

    def to_dict(self) -> dict:
        out = {"check": self.name, "passed": self.passed, "checked": self.checked,
               "failure": self.failure}
        if self.modulo_center:
            out["modulo_center"] = True
        return out


def jacobi_check(spec: AlgebraSpec, degree_range: int) -> CheckReport:
    """Exhaustive Jacobi identity on basis triples with degrees in [-N, N]."""
    if degree_range < 1:
        raise ValueError("degree range must be >= 1")
    syms = basis_window(spec, degree_range)
    elems = [Element._from_clean({s: QSqrt2(1)}) for s in syms]
    count = 0
    for x, y, z in itertools.combinations_with_replacement(elems, 3):
        total = _sum((
            bracket(x, bracket(y, z, spec), spec),
            bracket(y, bracket(z, x, spec), spec),
            bracket(z, bracket(x, y, spec), spec),
        ))
        count += 1
        if total:
            triple = [spec.format_symbol(next(iter(e))) for e in (x, y, z)]
            return CheckReport("jacobi", False, count,
                               {"triple": triple, "cyclic_sum": total.format(spec)})
    return CheckReport("jacobi", True, count)


def antisymmetry_check(spec: AlgebraSpec, degree_range: int) -> CheckReport:
    syms = basis_window(spec, degree_range)
    count = 0
    for x, y in itertools.combinations_with_replacement(syms, 2):
        count += 1
        xy = bracket_symbols(x, y, spec)
        if xy != -bracket_symbols(y, x, spec):
            return CheckReport("antisymmetry", False, count,
                               {"pair": [spec.format_symbol(x), spec.format_symbol(y)]})
    return CheckReport("antisymmetry", True, count)


# -- key constructions ---------------------------------------------------------

CONSTRUCTIONS = ("Lprime", "Ldoubleprime", "Jprime")


def primed_basis(spec: AlgebraSpec, kind: str, m: int) -> Element:
    """Modified generators from the key constructions.

    ``Lprime``: L_m + m*I_m with I the top layer (n >= 2);
    ``Ldoubleprime``: L_m + sqrt2*m*J_m + m^2*I_m (n >= 3);
    ``Jprime``: J_m + sqrt2*m*I_m (n >= 3).  Here J is layer 1, I layer 2.
    """
    n = spec.truncation_order
    if kind == "Lprime":
        if n < 2:
            raise SpecError("Lprime needs truncation order >= 2")
        return Element({Graded(0, m): 1, Graded(n - 1, m): m})
    if kind in ("Ldoubleprime", "Jprime"):
        if n < 3:
            raise SpecError(f"{kind} needs truncation order >= 3")
        if kind == "Ldoubleprime":
            return Element({Graded(0, m): 1, Graded(1, m): SQRT2 * m, Graded(2, m): m * m})
        return Element({Graded(1, m): 1, Graded(2, m): SQRT2 * m})
    raise SpecError(f"unknown construction {kind!r}; expected one of {CONSTRUCTIONS}")


def _construction_relations(spec: AlgebraSpec, kind: str):
    """(name, left factory, right factory, result factory) for each relation."""
    n = spec.truncation_order
    lp = lambda m: primed_basis(spec, "Lprime", m)
    ldp = lambda m: primed_basis(spec, "Ldoubleprime", m)
    jp = lambda m: primed_basis(spec, "Jprime", m)
    top = lambda m: Element({Graded(n - 1, m): 1})
    if kind == "Lprime":
        return [("[L'm,L'n]", lp, lp, lp), ("[L'm,In]", lp, top, top)]
    if kind == "Ldoubleprime":
        i2 = lambda m: Element({Graded(2, m): 1})
        return [("[L''m,L''n]", ldp, ldp, ldp), ("[L''m,J'n]", ldp, jp, jp),
                ("[L''m,In]", ldp, i2, i2)]
    if kind == "Jprime":
        i2 = lambda m: Element({Graded(2, m): 1})
        return [("[L''m,J'n]", ldp, jp, jp), ("[J'm,J'n]", jp, jp, i2)]
    raise SpecError(f"unknown construction {kind!r}")


def verify_construction(spec: AlgebraSpec, kind: str, degree_range: int) -> CheckReport:
    """Check the primed generators satisfy the original bracket table on [-N, N].

    The constructions live in the centerless quotient, so for centered specs
    both sides are compared modulo the center.
    """
    primed_basis(spec, kind, 0)
    relations = _construction_relations(spec, kind)
    project = (lambda e: e.graded_part()) if spec.centered else (lambda e: e)
    count = 0
    for name, left, right, result in relations:
        for m in range(-degree_range, degree_range + 1):
            for k in range(-degree_range, degree_range + 1):
                count += 1
                lhs = project(bracket(left(m), right(k), spec))
                rhs = result(m + k) * (m - k)
                if lhs != rhs:
                    return CheckReport(f"construction:{kind}", False, count, {
                        "relation": name, "m": m, "n": k,
                        "lhs": lhs.format(spec), "rhs": rhs.format(spec)}, spec.centered)
    report = CheckReport(f"construction:{kind}", True, count)
    report.modulo_center = spec.centered
    return report


# -- residue support profile ---------------------------------------------------


@dataclass
class SupportProfile:
    """Graded support split by layer and residue class of the degree mod ``modulus``.

    ``classes[layer][residue] = (min_degree, max_degree)``.
    """

    modulus: int
    classes: dict[int, dict[int, tuple[int, int]]] = field(default_factory=dict)

    def residues(self, layer: int) -> set[int]:
        return set(self.classes.get(layer, {}))

    @property
    def F(self) -> set[int]:
        return self.residues(0)

    @property
    def E(self) -> set[int]:
        return self.residues(1)

    def span(self, layer: int, residue: int) -> int:
        """Number of steps of size |modulus| between min and max degree of a class."""
        lo, hi = self.classes[layer][residue]
        return (hi - lo) // abs(self.modulus)

    def max_span(self) -> int:
        spans = [self.span(k, r) for k, cls in self.classes.items() for r in cls]
        return max(spans, default=0)

    def is_empty(self) -> bool:
        return not self.classes


def support_profile(x: Element, modulus: int) -> SupportProfile:
    if modulus == 0:
        raise ValueError("modulus must be nonzero")
    prof = SupportProfile(modulus)
    mod = abs(modulus)
    for s in x:
        if type(s) is not Graded:
            continue
        per_layer = prof.classes.setdefault(s.layer, {})
        r = s.degree % mod
        lo, hi = per_layer.get(r, (s.degree, s.degree))
        per_layer[r] = (min(lo, s.degree), max(hi, s.degree))
    return prof
