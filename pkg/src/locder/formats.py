"""JSON formats, element literals and report serialization.

Scalars serialize as ``{"rat": ["num", "den"], "irr": ["num", "den"]}``
with decimal-string integers; elements as lists of ``{"basis", "coeff"}``
records; maps as ``{"algebra", "window", "entries"}``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from .algebra import AlgebraSpec, CheckReport, Element, SpecError, Symbol, resolve_spec, symbol_key
from .maps import DerivationDescriptor, LeibnizReport, WindowedLinearMap
from .scalars import QSqrt2
from .solver import Infeasible, LinearSystem, Solution, Witness

__all__ = [
    "MapFileError",
    "scalar_to_json",
    "scalar_from_json",
    "element_to_json",
    "element_from_json",
    "map_to_json",
    "map_from_json",
    "parse_map_file",
    "dump_map_file",
    "parse_scalar",
    "parse_element",
    "to_jsonable",
    "Report",
]


class MapFileError(ValueError):
    """Malformed map file or JSON payload; the message carries the location."""


# -- scalars --------------------------------------------------------------------


def _frac_to_json(f: Fraction) -> list[str]:
    return [str(f.numerator), str(f.denominator)]


def scalar_to_json(x: QSqrt2) -> dict:
    return {"rat": _frac_to_json(x.rat), "irr": _frac_to_json(x.irr)}


def _frac_from_json(v, where: str) -> Fraction:
    try:
        if isinstance(v, (list, tuple)) and len(v) == 2:
            num, den = int(v[0]), int(v[1])
            if den == 0:
                raise ZeroDivisionError
            return Fraction(num, den)
        if isinstance(v, (int, str)) and not isinstance(v, bool):
            return Fraction(v)
    except (ValueError, ZeroDivisionError):
        pass
    raise MapFileError(f"{where}: expected [numerator, denominator] with nonzero denominator, got {v!r}")


def scalar_from_json(obj, where: str = "coeff") -> QSqrt2:
    if isinstance(obj, (int, str)) and not isinstance(obj, bool):
        return parse_scalar(str(obj))
    if not isinstance(obj, dict):
        raise MapFileError(f"{where}: expected an object with 'rat'/'irr'")
    unknown = set(obj) - {"rat", "irr"}
    if unknown:
        raise MapFileError(f"{where}: unknown keys {sorted(unknown)}")
    return QSqrt2(_frac_from_json(obj.get("rat", ["0", "1"]), f"{where}.rat"),
                  _frac_from_json(obj.get("irr", ["0", "1"]), f"{where}.irr"))


# -- scalar / element literals ------------------------------------------------------

_RAT = r"\d+(?:/\d+)?"
_ROOT = r"(?:√2|sqrt2|sqrt\(2\)|r2)"
_IRR = rf"(?:{_RAT})?\s*\*?\s*{_ROOT}"
_COEF = rf"(?:\(\s*[+-]?\s*(?:{_RAT}\s*[+-]\s*{_IRR}|{_IRR}|{_RAT})\s*\)|{_RAT}\s*[+-]\s*{_IRR}|{_IRR}|{_RAT})"
_SYM = r"(?:g:\d+:[+-]?\d+|c:\d+|C[12]?(?![:\d])|[A-Z]:?[+-]?\d+)"
_TERM = re.compile(rf"\s*([+-])?\s*(?:({_COEF})\s*\*\s*)?({_SYM})\s*")


def _parse_rat(text: str) -> Fraction:
    return Fraction(text.replace(" ", "")) if text else Fraction(1)


def parse_scalar(text: str) -> QSqrt2:
    """Parse ``a``, ``a/b``, ``c/d√2`` or ``a/b+c/d√2`` (``sqrt2`` also accepted)."""
    t = text.strip().replace(" ", "")
    if t.startswith("(") and t.endswith(")"):
        t = t[1:-1]
    m = re.fullmatch(rf"([+-]?{_RAT})?(?:([+-])({_RAT})?\*?{_ROOT})?", t)
    if m and (m.group(1) or m.group(2)):
        rat = Fraction(m.group(1)) if m.group(1) else Fraction(0)
        irr = Fraction(0)
        if m.group(2):
            irr = _parse_rat(m.group(3) or "")
            if m.group(2) == "-":
                irr = -irr
        return QSqrt2(rat, irr)
    m = re.fullmatch(rf"([+-]?)({_RAT})?\*?{_ROOT}", t)
    if m:
        irr = _parse_rat(m.group(2) or "")
        return QSqrt2(0, -irr if m.group(1) == "-" else irr)
    raise ValueError(f"cannot parse scalar {text!r}")


def parse_element(text: str, spec: AlgebraSpec) -> Element:
    """Parse a sum of ``coeff*basis`` terms, e.g. ``1/3*L:3 - I:-2 + (1+√2)*J:1``."""
    pos, terms = 0, []
    text = text.strip()
    if text in ("", "0"):
        return Element()
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos or (terms and not m.group(1)):
            raise ValueError(f"cannot parse element literal at {text[pos:]!r}")
        sign, coef, sym = m.groups()
        c = parse_scalar(coef) if coef else QSqrt2(1)
        if sign == "-":
            c = -c
        terms.append((spec.parse_symbol(sym), c))
        pos = m.end()
    return Element(terms)


# -- elements and maps ----------------------------------------------------------


def element_to_json(x: Element, spec: AlgebraSpec) -> list[dict]:
    return [{"basis": spec.format_symbol(s), "coeff": scalar_to_json(c)} for s, c in x.sorted_items()]


def element_from_json(obj, spec: AlgebraSpec, where: str = "value") -> Element:
    if not isinstance(obj, list):
        raise MapFileError(f"{where}: expected a list of {{basis, coeff}} records")
    terms = []
    for i, rec in enumerate(obj):
        here = f"{where}[{i}]"
        if not isinstance(rec, dict) or "basis" not in rec:
            raise MapFileError(f"{here}: expected an object with 'basis' and 'coeff'")
        try:
            sym = spec.parse_symbol(str(rec["basis"]))
        except SpecError as exc:
            raise MapFileError(f"{here}.basis: {exc}") from None
        terms.append((sym, scalar_from_json(rec.get("coeff", {"rat": ["1", "1"]}), f"{here}.coeff")))
    return Element(terms)


def map_to_json(map: WindowedLinearMap) -> dict:
    """Normalized form: nonzero entries only, in symbol order."""
    return {
        "algebra": map.spec.name,
        "window": map.window,
        "entries": [{"basis": map.spec.format_symbol(s), "value": element_to_json(v, map.spec)}
                    for s, v in map.nonzero_entries()],
    }


def map_from_json(obj) -> WindowedLinearMap:
    if not isinstance(obj, dict):
        raise MapFileError("map file: top level must be an object")
    for key in ("algebra", "window"):
        if key not in obj:
            raise MapFileError(f"map file: missing field {key!r}")
    try:
        spec = resolve_spec(str(obj["algebra"]))
    except SpecError as exc:
        raise MapFileError(f"algebra: {exc}") from None
    window = obj["window"]
    if not isinstance(window, int) or isinstance(window, bool) or window < 0:
        raise MapFileError(f"window: expected a non-negative integer, got {window!r}")
    entries: dict[Symbol, Element] = {}
    raw = obj.get("entries", [])
    if not isinstance(raw, list):
        raise MapFileError("entries: expected a list")
    for i, rec in enumerate(raw):
        where = f"entries[{i}]"
        if not isinstance(rec, dict) or "basis" not in rec:
            raise MapFileError(f"{where}: expected an object with 'basis' and 'value'")
        try:
            sym = spec.parse_symbol(str(rec["basis"]))
        except SpecError as exc:
            raise MapFileError(f"{where}.basis: {exc}") from None
        if sym in entries:
            raise MapFileError(f"{where}.basis: duplicate entry for {rec['basis']}")
        entries[sym] = element_from_json(rec.get("value", []), spec, f"{where}.value")
    try:
        return WindowedLinearMap(spec, window, entries)
    except SpecError as exc:
        raise MapFileError(f"entries: {exc}") from None


def parse_map_file(path: str | Path) -> WindowedLinearMap:
    text = Path(path).read_text()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MapFileError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    try:
        return map_from_json(obj)
    except MapFileError as exc:
        raise MapFileError(f"{path}: {exc}") from None


def dump_map_file(map: WindowedLinearMap, path: str | Path) -> None:
    Path(path).write_text(json.dumps(map_to_json(map), indent=2, sort_keys=True) + "\n")


# -- generic report payloads -----------------------------------------------------


def _system_to_json(system: LinearSystem, spec: AlgebraSpec) -> dict:
    def label(x):
        if isinstance(x, tuple):
            return "/".join(str(p) for p in x)
        if isinstance(x, str):
            return x
        return spec.format_symbol(x)

    return {
        "columns": [label(x) for x in system.labels],
        "rows": [label(x) for x in system.row_labels],
        "matrix": [{label(system.labels[j]): scalar_to_json(c) for j, c in sorted(row.items())}
                   for row in system.rows],
        "rhs": [scalar_to_json(b) for b in system.rhs],
    }


def to_jsonable(obj: Any, spec: AlgebraSpec) -> Any:
    """Convert engine objects to JSON-native values (deterministic ordering)."""
    from .engine import CenterReport, CenterViolation, DecompositionReport, ProbeResult, ProbeSpec
    from .solver import DerivationSpace

    rec = lambda o: to_jsonable(o, spec)
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, Fraction):
        return _frac_to_json(obj)
    if isinstance(obj, QSqrt2):
        return scalar_to_json(obj)
    if isinstance(obj, Element):
        return element_to_json(obj, spec)
    if isinstance(obj, Symbol.__args__):
        return spec.format_symbol(obj)
    if isinstance(obj, (list, tuple)):
        return [rec(o) for o in obj]
    if isinstance(obj, dict):
        out = {}
        for k, v in obj.items():
            key = spec.format_symbol(k) if isinstance(k, Symbol.__args__) else str(k)
            out[key] = rec(v)
        return out
    if isinstance(obj, DerivationDescriptor):
        out = {"inner": rec(obj.inner), "outer_delta_t": rec(obj.outer)}
        if spec.truncation_order in (2, 3):
            # the classical outer derivation is delta_t on W(2,2) and delta_t/2 on bms3
            factor = 1 if spec.truncation_order == 2 else 2
            out["outer_classical_delta"] = rec(obj.outer * factor)
        if obj.higher:
            out["outer_higher"] = {f"t^{p}d/dt": rec(c) for p, c in enumerate(obj.higher, start=2)}
        return out
    if isinstance(obj, Witness):
        return {"status": "witness", "descriptor": rec(obj.descriptor),
                "support_window": obj.support_window, "free_dimension": obj.free_dimension}
    if isinstance(obj, Infeasible):
        out = {"status": "infeasible", "certificate": [scalar_to_json(z) for z in obj.certificate]}
        if obj.system is not None:
            out["system"] = _system_to_json(obj.system, spec)
            out["certificate_valid"] = obj.verify()
        return out
    if isinstance(obj, Solution):
        return {"particular": rec(obj.particular), "nullspace": rec(obj.nullspace), "rank": obj.rank}
    if isinstance(obj, ProbeSpec):
        return {"name": obj.name, "element": rec(obj.element), "parameters": rec(obj.parameters)}
    if isinstance(obj, ProbeResult):
        return {"probe": rec(obj.probe), "target": rec(obj.target), "outcome": rec(obj.outcome),
                "rejected": obj.rejected}
    if isinstance(obj, DecompositionReport):
        return {
            "outcome": obj.outcome,
            "scope": obj.scope,
            "descriptor": rec(obj.descriptor),
            "residual_zero": obj.residual_zero,
            "failure": rec(obj.failure),
            "rejection": rec(obj.rejection),
            "trace": rec(obj.trace),
            "audit": rec(obj.audit),
        }
    if isinstance(obj, CenterViolation):
        return {"symbol": rec(obj.symbol), "value": rec(obj.value), "expected": rec(obj.expected),
                "rejection": rec(obj.rejection)}
    if isinstance(obj, CenterReport):
        return {"passed": obj.passed, "checked": obj.checked, "violations": rec(obj.violations)}
    if isinstance(obj, LeibnizReport):
        return {"passed": obj.passed, "checked_pairs": obj.checked, "skipped_pairs": obj.skipped,
                "violations": [{"pair": [rec(v.x), rec(v.y)], "lhs": rec(v.lhs), "rhs": rec(v.rhs)}
                               for v in obj.violations]}
    if isinstance(obj, CheckReport):
        return obj.to_dict()
    if isinstance(obj, WindowedLinearMap):
        return map_to_json(obj)["entries"]
    if isinstance(obj, DerivationSpace):
        return {"degree": obj.degree, "window": obj.window, "dimension": obj.dimension,
                "unknowns": obj.unknowns, "equations": obj.equations,
                "basis": [rec(b) for b in obj.basis]}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


@dataclass
class Report:
    """One command's result; ``timing_ms`` is informational only."""

    command: str
    spec: str | None
    window: int | None
    outcome: str
    result: Any
    exit_code: int = 0
    timing_ms: float | None = field(default=None, compare=False)

    def to_dict(self, timing: bool = True) -> dict:
        out = {"command": self.command, "spec": self.spec, "window": self.window,
               "outcome": self.outcome, "exit_code": self.exit_code, "result": self.result}
        if timing and self.timing_ms is not None:
            out["timing_ms"] = self.timing_ms
        return out

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=True, ensure_ascii=False)

    @classmethod
    def from_dict(cls, obj: dict) -> Report:
        return cls(obj["command"], obj.get("spec"), obj.get("window"), obj["outcome"],
                   obj.get("result"), obj.get("exit_code", 0), obj.get("timing_ms"))

    @classmethod
    def from_json(cls, text: str) -> Report:
        return cls.from_dict(json.loads(text))
