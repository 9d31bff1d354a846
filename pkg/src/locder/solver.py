"""Exact linear solving over Q(sqrt 2), witness problems and derivation spaces.

Elimination works on sparse rows (``{column: coefficient}``).  Rows are
reduced one at a time against the pivots found so far, then back-reduced
to reduced row echelon form; since the RREF is unique, the particular
solution (free variables zero) and the nullspace basis do not depend on
row order.  An inconsistent row yields a certificate ``z`` with
``z.A = 0`` and ``z.b != 0``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Hashable, Sequence

from .algebra import (
    AlgebraSpec,
    Central,
    Element,
    Graded,
    Symbol,
    basis_window,
    bracket,
    bracket_symbols,
    symbol_key,
)
from .maps import DerivationDescriptor, WindowedLinearMap, _delta_t_element, _loop_derivation_element
from .scalars import QSqrt2, as_scalar

__all__ = [
    "LinearSystem",
    "Solution",
    "Infeasible",
    "solve",
    "Witness",
    "witness_solve",
    "default_support_window",
    "DerivationSpace",
    "derivation_space",
    "OUTER",
]

OUTER = "outer"
_ONE = QSqrt2(1)


@dataclass
class LinearSystem:
    """``A x = b`` with sparse rows; ``labels`` name the unknowns (columns)."""

    rows: list[dict[int, QSqrt2]]
    rhs: list[QSqrt2]
    labels: list[Hashable]
    row_labels: list[Hashable] = field(default_factory=list)

    def __post_init__(self):
        if len(self.rows) != len(self.rhs):
            raise ValueError("row count and rhs length differ")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("column labels must be unique")
        ncols = len(self.labels)
        for row in self.rows:
            if any(not 0 <= c < ncols for c in row):
                raise ValueError("column index out of range")

    @classmethod
    def from_dense(cls, matrix: Sequence[Sequence], rhs: Sequence, labels=None) -> LinearSystem:
        ncols = len(matrix[0]) if matrix else len(labels or [])
        rows = [{j: as_scalar(v) for j, v in enumerate(r) if v} for r in matrix]
        return cls(rows, [as_scalar(v) for v in rhs], list(labels) if labels else list(range(ncols)))

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.labels)

    def dense(self) -> list[list[QSqrt2]]:
        ncols = len(self.labels)
        return [[row.get(j, QSqrt2()) for j in range(ncols)] for row in self.rows]

    def residual(self, x: Sequence[QSqrt2]) -> list[QSqrt2]:
        """``A x - b``, exactly."""
        return [sum((c * x[j] for j, c in row.items()), QSqrt2()) - b
                for row, b in zip(self.rows, self.rhs)]

    def left_apply(self, z: Sequence[QSqrt2]) -> tuple[list[QSqrt2], QSqrt2]:
        """``(z A, z b)``."""
        zA = [QSqrt2() for _ in self.labels]
        for zi, row in zip(z, self.rows):
            if zi:
                for j, c in row.items():
                    zA[j] = zA[j] + zi * c
        zb = sum((zi * b for zi, b in zip(z, self.rhs) if zi), QSqrt2())
        return zA, zb


@dataclass
class Solution:
    particular: list[QSqrt2]
    nullspace: list[list[QSqrt2]]
    pivots: list[int]

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def assignment(self, labels: Sequence[Hashable]) -> dict:
        return {lab: v for lab, v in zip(labels, self.particular) if v}


@dataclass
class Infeasible:
    """No solution: ``certificate`` is a row vector with z.A = 0 and z.b != 0."""

    certificate: list[QSqrt2]
    system: LinearSystem | None = None

    def verify(self, system: LinearSystem | None = None) -> bool:
        system = system or self.system
        zA, zb = system.left_apply(self.certificate)
        return not any(zA) and bool(zb)

    @property
    def support(self) -> list[int]:
        return [i for i, z in enumerate(self.certificate) if z]


def _reduce(rows, rhs, track: bool):
    """Forward reduction; returns (pivots, None) or (None, failing combo)."""
    pivots: dict[int, tuple[dict, QSqrt2, dict | None]] = {}
    for i, (row0, b0) in enumerate(zip(rows, rhs)):
        row = {c: v for c, v in row0.items() if v}
        beta = b0
        combo = {i: _ONE} if track else None
        while row:
            c = min(row)
            piv = pivots.get(c)
            if piv is None:
                inv = row[c].inverse()
                row = {k: v * inv for k, v in row.items()}
                row[c] = _ONE
                beta = beta * inv
                if track:
                    combo = {k: v * inv for k, v in combo.items()}
                pivots[c] = (row, beta, combo)
                break
            prow, pbeta, pcombo = piv
            f = row[c]
            for k, v in prow.items():
                nv = row.get(k)
                nv = -f * v if nv is None else nv - f * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
            if pbeta:
                beta = beta - f * pbeta
            if track:
                for k, v in pcombo.items():
                    nv = combo.get(k)
                    nv = -f * v if nv is None else nv - f * v
                    if nv:
                        combo[k] = nv
                    else:
                        combo.pop(k, None)
        else:
            if beta:
                return None, combo
    return pivots, None


def solve(system: LinearSystem, certify: bool | None = None) -> Solution | Infeasible:
    """Solve exactly; returns the RREF particular solution and nullspace basis,
    or an infeasibility certificate.

    ``certify`` controls row-combination tracking (needed for certificates);
    by default it is on unless the right-hand side is zero.
    """
    nrows, ncols = system.shape
    if certify is None:
        certify = any(system.rhs)
    pivots, combo = _reduce(system.rows, system.rhs, certify)
    if pivots is None:
        if combo is None:
            _, combo = _reduce(system.rows, system.rhs, True)
        z = [combo.get(i, QSqrt2()) for i in range(nrows)]
        return Infeasible(z, system)

    # back-reduce to RREF
    order = sorted(pivots)
    for idx in range(len(order) - 1, -1, -1):
        c = order[idx]
        prow, pbeta, _ = pivots[c]
        for c2 in order[:idx]:
            row2, beta2, combo2 = pivots[c2]
            f = row2.get(c)
            if not f:
                continue
            for k, v in prow.items():
                nv = row2.get(k)
                nv = -f * v if nv is None else nv - f * v
                if nv:
                    row2[k] = nv
                else:
                    row2.pop(k, None)
            pivots[c2] = (row2, beta2 - f * pbeta, combo2)

    particular = [QSqrt2() for _ in range(ncols)]
    for c in order:
        particular[c] = pivots[c][1]
    free = [j for j in range(ncols) if j not in pivots]
    nullspace = []
    for f in free:
        vec = [QSqrt2() for _ in range(ncols)]
        vec[f] = _ONE
        for c in order:
            v = pivots[c][0].get(f)
            if v:
                vec[c] = -v
        nullspace.append(vec)
    return Solution(particular, nullspace, order)


# -- witness problems -------------------------------------------------------------


def default_support_window(probe: Element, target: Element, slack: int = 2, cap: int = 64) -> int:
    """Degrees reachable by ``[u, probe] = target``: |deg u| <= max|target| + max|probe|."""
    pd = [abs(d) for d in probe.graded_degrees()] or [0]
    td = [abs(d) for d in target.graded_degrees()] or [0]
    return min(max(td) + max(pd) + slack, cap)


@dataclass
class Witness:
    """A derivation ``ad(inner) + outer*delta_t`` mapping the probe to the target."""

    descriptor: DerivationDescriptor
    system: LinearSystem
    solution: Solution
    support_window: int

    @property
    def free_dimension(self) -> int:
        return len(self.solution.nullspace)


def witness_system(probe: Element, target: Element, spec: AlgebraSpec,
                   support_window: int, include_outer: bool = True,
                   full_outer: bool = False) -> LinearSystem:
    labels: list = basis_window(spec, support_window)
    images = []
    for s in labels:
        if type(s) is Central:
            images.append(Element())
        else:
            acc = Element()
            for t, c in probe.items():
                acc = acc + bracket_symbols(s, t, spec) * c
            images.append(acc)
    if include_outer:
        labels.append(OUTER)
        images.append(_delta_t_element(probe))
        if full_outer:
            for power in range(2, spec.truncation_order):
                labels.append((OUTER, power))
                images.append(_loop_derivation_element(probe, power, spec))
    row_syms = set(target)
    for img in images:
        row_syms.update(img)
    row_labels = sorted(row_syms, key=symbol_key)
    index = {s: i for i, s in enumerate(row_labels)}
    rows: list[dict] = [{} for _ in row_labels]
    for j, img in enumerate(images):
        for s, c in img.items():
            rows[index[s]][j] = c
    rhs = [target.coeff(s) for s in row_labels]
    return LinearSystem(rows, rhs, labels, row_labels)


def witness_solve(probe: Element, target: Element, spec: AlgebraSpec,
                  support_window: int | None = None, include_outer: bool = True,
                  slack: int = 2, cap: int = 64, full_outer: bool = False) -> Witness | Infeasible:
    """Find ``u`` (graded support within ``support_window``) and ``c`` with
    ``[u, probe] + c*delta_t(probe) = target``, or certify that none exists.

    With ``full_outer`` the ansatz also includes the derivations induced by
    ``t^j d/dt`` for ``2 <= j < n``.
    """
    if not probe:
        raise ValueError("probe must be nonzero")
    for s in itertools.chain(probe, target):
        spec.check_symbol(s)
    if support_window is None:
        support_window = default_support_window(probe, target, slack, cap)
    system = witness_system(probe, target, spec, support_window, include_outer, full_outer)
    outcome = solve(system, certify=True)
    if isinstance(outcome, Infeasible):
        return outcome
    values = dict(zip(system.labels, outcome.particular))
    outer = values.pop(OUTER, QSqrt2())
    higher = tuple(values.pop((OUTER, p)) for p in range(2, spec.truncation_order)
                   if (OUTER, p) in values)
    inner = Element({s: v for s, v in values.items() if v})
    descriptor = DerivationDescriptor(inner, outer, higher)
    if descriptor.action(probe, spec) != target:
        raise AssertionError("witness does not reproduce the target")
    return Witness(descriptor, system, outcome, support_window)


# -- homogeneous derivation spaces --------------------------------------------------


@dataclass
class DerivationSpace:
    spec: AlgebraSpec
    degree: int
    window: int
    basis: list[WindowedLinearMap]
    unknowns: int
    equations: int

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def contains(self, candidate: WindowedLinearMap) -> bool:
        """Whether a windowed map lies in the span of the basis."""
        syms = candidate.domain
        cols = [[b.entries[s] for s in syms] for b in self.basis]
        return _in_span(cols, [candidate.entries[s] for s in syms])


def _in_span(vectors: list[list[Element]], target: list[Element]) -> bool:
    """Is ``target`` a combination of ``vectors`` (each a list of Elements)?"""
    coords: dict = {}
    for j, vec in enumerate(vectors):
        for i, e in enumerate(vec):
            for s, c in e.items():
                coords.setdefault((i, s), {})[j] = c
    for i, e in enumerate(target):
        for s in e:
            coords.setdefault((i, s), {})
    keys = sorted(coords, key=lambda k: (k[0], symbol_key(k[1])))
    rows = [coords[k] for k in keys]
    rhs = [target[k[0]].coeff(k[1]) for k in keys]
    system = LinearSystem(rows, rhs, list(range(len(vectors))))
    return isinstance(solve(system, certify=True), Solution)


def _homogeneous_targets(spec: AlgebraSpec, x: Symbol, degree: int) -> list[Symbol]:
    if type(x) is Central:
        return [Central(j) for j in spec.layers] if degree == 0 else []
    out: list[Symbol] = [Graded(j, x.degree + degree) for j in spec.layers]
    if spec.centered and x.degree + degree == 0:
        out.extend(Central(j) for j in spec.layers)
    return out


def derivation_space(spec: AlgebraSpec, degree: int, window: int) -> DerivationSpace:
    """Basis of all degree-``degree`` maps satisfying every in-window Leibniz identity.

    Unknowns are the coefficients of ``D(x)`` on the symbols of degree
    ``deg x + degree`` (centrals go to the center).  Pairs whose bracket
    leaves the window impose nothing.
    """
    if 2 * abs(degree) > window:
        raise ValueError("need |degree| <= window/2")
    domain = basis_window(spec, window)
    variables: dict[Symbol, list[tuple[Symbol, int]]] = {}
    labels = []
    for x in domain:
        vs = []
        for s in _homogeneous_targets(spec, x, degree):
            vs.append((s, len(labels)))
            labels.append((x, s))
        variables[x] = vs

    rows: list[dict] = []
    for x, y in itertools.combinations(domain, 2):
        xy = bracket_symbols(x, y, spec)
        if any(type(s) is Graded and abs(s.degree) > window for s in xy):
            continue
        acc: dict[Symbol, dict[int, QSqrt2]] = {}

        def add(sym, col, c):
            row = acc.setdefault(sym, {})
            v = row.get(col)
            row[col] = c if v is None else v + c

        for z, c in xy.items():
            for s, col in variables[z]:
                add(s, col, c)
        for s, col in variables[x]:
            for t, c in bracket_symbols(s, y, spec).items():
                add(t, col, -c)
        for s, col in variables[y]:
            for t, c in bracket_symbols(x, s, spec).items():
                add(t, col, -c)
        for sym in sorted(acc, key=symbol_key):
            row = {k: v for k, v in acc[sym].items() if v}
            if row:
                rows.append(row)

    system = LinearSystem(rows, [QSqrt2()] * len(rows), labels)
    outcome = solve(system, certify=False)
    basis = []
    for vec in outcome.nullspace:
        entries: dict[Symbol, dict] = {}
        for (x, s), v in zip(labels, vec):
            if v:
                entries.setdefault(x, {})[s] = v
        basis.append(WindowedLinearMap(spec, window, {x: Element(t) for x, t in entries.items()}))
    return DerivationSpace(spec, degree, window, basis, len(labels), len(rows))
