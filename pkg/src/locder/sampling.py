"""Seeded random scalars, elements and derivations for tests and demos."""

from __future__ import annotations

import random
from fractions import Fraction

from .algebra import AlgebraSpec, Element, Graded
from .maps import DerivationDescriptor, WindowedLinearMap
from .scalars import QSqrt2


def random_rational(rng: random.Random, bound: int = 100) -> Fraction:
    return Fraction(rng.randint(-bound, bound), rng.randint(1, bound))


def random_scalar(rng: random.Random, bound: int = 100, nonzero: bool = False) -> QSqrt2:
    while True:
        x = QSqrt2(random_rational(rng, bound), random_rational(rng, bound))
        if x or not nonzero:
            return x


def random_element(rng: random.Random, spec: AlgebraSpec, support: int = 3,
                   bound: int = 100, density: float = 0.5) -> Element:
    """Graded element with degrees in ``[-support, support]``; each symbol kept with ``density``."""
    terms = {}
    for k in spec.layers:
        for m in range(-support, support + 1):
            if rng.random() < density:
                terms[Graded(k, m)] = random_scalar(rng, bound)
    return Element(terms)


def random_descriptor(rng: random.Random, spec: AlgebraSpec, support: int = 3,
                      bound: int = 100) -> DerivationDescriptor:
    return DerivationDescriptor(random_element(rng, spec, support, bound), random_scalar(rng, bound))


def random_derivation(rng: random.Random, spec: AlgebraSpec, window: int, support: int = 3,
                      bound: int = 100) -> tuple[DerivationDescriptor, WindowedLinearMap]:
    """A random ``ad(u) + c*delta_t`` and its restriction to the window."""
    d = random_descriptor(rng, spec, support, bound)
    return d, d.to_map(spec, window)
