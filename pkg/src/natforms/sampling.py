"""Seeded random polynomials, forms and polynomial maps.

All samplers take a :class:`random.Random` so callers control the stream.
Defaults follow the library-wide convention: coefficient degree at most 2,
integer coefficients in [-3, 3], and few terms, which keeps exact
expansions small while still exercising nonlinear behaviour.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .forms import DiffForm, SmoothMap
from .poly import Poly

__all__ = [
    "trial_rng",
    "random_poly",
    "random_form",
    "random_forms",
    "random_point",
    "random_map",
    "MAP_KINDS",
]

COEFF_RANGE = (-3, 3)
MAP_KINDS = (
    "translation",
    "homothety",
    "linear",
    "quadratic",
    "noninjective",
    "projection",
    "inclusion",
)


def trial_rng(seed: int, trial: int) -> random.Random:
    """Independent stream for one trial, fixed by ``(seed, trial)``."""
    return random.Random(f"natforms/{seed}/{trial}")


def _nonzero(rng: random.Random) -> int:
    lo, hi = COEFF_RANGE
    c = 0
    while c == 0:
        c = rng.randint(lo, hi)
    return c


def random_poly(rng: random.Random, n: int, max_degree: int = 2, max_terms: int = 3) -> Poly:
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        deg = rng.randint(0, max_degree) if n else 0
        exps = [0] * n
        for _ in range(deg):
            exps[rng.randrange(n)] += 1
        terms[tuple(exps)] = _nonzero(rng)
    return Poly(n, terms)


def random_form(
    rng: random.Random,
    n: int,
    grade: int,
    max_degree: int = 2,
    max_terms: int = 2,
    poly_terms: int = 3,
) -> DiffForm:
    """Random ``grade``-form on R^n; zero when ``grade > n``."""
    tuples = list(combinations(range(1, n + 1), grade))
    if not tuples:
        return DiffForm.zero(n, grade)
    k = rng.randint(1, min(max_terms, len(tuples)))
    chosen = rng.sample(tuples, k)
    return DiffForm(n, grade, {t: random_poly(rng, n, max_degree, poly_terms) for t in chosen})


def random_forms(rng: random.Random, n: int, grades: Sequence[int], **kw) -> list[DiffForm]:
    return [random_form(rng, n, p, **kw) for p in grades]


def random_point(rng: random.Random, n: int, spread: int = 5) -> tuple[Fraction, ...]:
    return tuple(Fraction(rng.randint(-spread, spread), rng.randint(1, 3)) for _ in range(n))


def _linear_comps(rng, m, n):
    comps = []
    for _ in range(n):
        p = Poly.zero(m)
        for j in range(1, m + 1):
            c = rng.randint(*COEFF_RANGE)
            if c:
                p = p + Poly.var(m, j).scale(c)
        comps.append(p)
    return comps


def random_map(rng: random.Random, m: int, n: int, kind: str | None = None) -> SmoothMap:
    """Random polynomial map ``R^m -> R^n`` of the given family.

    ``translation`` and ``homothety`` need ``m == n``; ``projection`` needs
    ``m >= n`` and ``inclusion`` needs ``m <= n``.  Callers that do not care
    pass ``kind=None`` and get a quadratic map.
    """
    kind = kind or "quadratic"
    if kind == "translation":
        if m != n:
            raise ValueError("translations need equal dimensions")
        shift = [Fraction(rng.randint(-3, 3), rng.randint(1, 2)) for _ in range(n)]
        if not any(shift) and n:
            shift[0] = Fraction(1)
        return SmoothMap.translation(shift)
    if kind == "homothety":
        if m != n:
            raise ValueError("homotheties need equal dimensions")
        lam = Fraction(rng.choice([-3, -2, 2, 3, 5]), rng.choice([1, 2, 3]))
        return SmoothMap.homothety(n, lam)
    if kind == "linear":
        return SmoothMap(m, _linear_comps(rng, m, n), "linear")
    if kind == "quadratic":
        comps = [random_poly(rng, m, 2, 3) + c for c in _linear_comps(rng, m, n)] if m else [
            random_poly(rng, 0, 0, 1) for _ in range(n)
        ]
        return SmoothMap(m, comps, "quadratic")
    if kind == "noninjective":
        # factor through a single parameter: every component is a polynomial in t = l(x)
        if m == 0:
            return SmoothMap.constant(0, [rng.randint(-2, 2) for _ in range(n)])
        t = Poly.zero(m)
        while not t:
            t = _linear_comps(rng, m, 1)[0]
        comps = []
        for _ in range(n):
            a, b, c = (rng.randint(-2, 2) for _ in range(3))
            comps.append(t * t * a + t * b + c)
        return SmoothMap(m, comps, "noninjective")
    if kind == "projection":
        if m < n:
            raise ValueError("projection needs m >= n")
        return SmoothMap(m, [Poly.var(m, i) for i in range(1, n + 1)], "projection")
    if kind == "inclusion":
        if m > n:
            raise ValueError("inclusion needs m <= n")
        return SmoothMap(m, [Poly.var(m, i) if i <= m else Poly.zero(m) for i in range(1, n + 1)], "inclusion")
    raise ValueError(f"unknown map family {kind!r}")
