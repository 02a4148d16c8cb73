"""Sparse multivariate polynomials with exact rational coefficients.

A :class:`Poly` lives in a fixed number of variables ``x1 .. xn`` and maps
exponent vectors to :class:`fractions.Fraction` coefficients.  Zero
coefficients are never stored, so two polynomials are equal exactly when
their term maps are equal.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence

__all__ = ["Poly", "as_fraction", "format_fraction"]


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are rejected: the whole library is exact.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def format_fraction(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


class Poly:
    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[tuple[int, ...], object] = ()):
        if nvars < 0:
            raise ValueError("number of variables must be non-negative")
        self.nvars = nvars
        clean: dict[tuple[int, ...], Fraction] = {}
        for exps, c in dict(terms).items():
            exps = tuple(exps)
            if len(exps) != nvars or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent vector {exps} for {nvars} variables")
            c = as_fraction(c)
            if c:
                clean[exps] = clean.get(exps, Fraction(0)) + c
                if not clean[exps]:
                    del clean[exps]
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, nvars: int, terms: dict) -> "Poly":
        # trusted constructor: terms already canonical
        p = object.__new__(cls)
        p.nvars = nvars
        p.terms = terms
        p._hash = None
        return p

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls._raw(nvars, {})

    @classmethod
    def const(cls, nvars: int, c) -> "Poly":
        c = as_fraction(c)
        return cls._raw(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def var(cls, nvars: int, i: int) -> "Poly":
        """The coordinate function ``x_i`` (1-based)."""
        if not 1 <= i <= nvars:
            raise ValueError(f"variable x{i} out of range for {nvars} variables")
        exps = [0] * nvars
        exps[i - 1] = 1
        return cls._raw(nvars, {tuple(exps): Fraction(1)})

    @classmethod
    def monomial(cls, exps: Sequence[int], c=1) -> "Poly":
        return cls(len(exps), {tuple(exps): c})

    # -- basic protocol -----------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == Poly.const(self.nvars, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"Poly({self.nvars}, {self.render()!r})"

    def __str__(self):
        return self.render()

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise ValueError(
                    f"polynomials in {self.nvars} and {other.nvars} variables do not mix"
                )
            return other
        return Poly.const(self.nvars, other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Poly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "Poly":
        c = as_fraction(c)
        if not c:
            return Poly.zero(self.nvars)
        return Poly._raw(self.nvars, {e: c * v for e, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return self.scale(other)
        other = self._coerce(other)
        out: dict[tuple[int, ...], Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, 0) + c1 * c2
                if s:
                    out[e] = s
                else:
                    del out[e]
        return Poly._raw(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        result = Poly.const(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- calculus and substitution -----------------------------------------

    def diff(self, i: int) -> "Poly":
        """Partial derivative with respect to ``x_i`` (1-based)."""
        k = i - 1
        out = {}
        for e, c in self.terms.items():
            if e[k]:
                ne = list(e)
                ne[k] -= 1
                out[tuple(ne)] = c * e[k]
        return Poly._raw(self.nvars, out)

    def evaluate(self, point: Sequence) -> Fraction:
        if len(point) != self.nvars:
            raise ValueError(f"point has {len(point)} entries, expected {self.nvars}")
        pt = [as_fraction(v) for v in point]
        total = Fraction(0)
        for e, c in self.terms.items():
            term = c
            for v, k in zip(pt, e):
                if k:
                    term *= v**k
            total += term
        return total

    def compose(self, subs: Sequence["Poly"]) -> "Poly":
        """Substitute ``x_i -> subs[i-1]``; all substitutes share one ring."""
        if len(subs) != self.nvars:
            raise ValueError(f"need {self.nvars} substitutes, got {len(subs)}")
        if not subs:
            # constant polynomial on R^0; target ring unknown
            raise ValueError("cannot compose a polynomial in 0 variables; use compose_into")
        return self.compose_into(subs[0].nvars, subs)

    def compose_into(self, nvars: int, subs: Sequence["Poly"]) -> "Poly":
        if len(subs) != self.nvars:
            raise ValueError(f"need {self.nvars} substitutes, got {len(subs)}")
        for s in subs:
            if s.nvars != nvars:
                raise ValueError("substitutes must live in the target ring")
        powers: list[list[Poly]] = [[Poly.const(nvars, 1)] for _ in subs]
        result = Poly.zero(nvars)
        for e, c in self.terms.items():
            term = Poly.const(nvars, c)
            for k, exp in enumerate(e):
                if exp:
                    cache = powers[k]
                    while len(cache) <= exp:
                        cache.append(cache[-1] * subs[k])
                    term = term * cache[exp]
            result = result + term
        return result

    def homogeneous_part(self, s: int) -> "Poly":
        return Poly._raw(self.nvars, {e: c for e, c in self.terms.items() if sum(e) == s})

    def truncate(self, r: int) -> "Poly":
        return Poly._raw(self.nvars, {e: c for e, c in self.terms.items() if sum(e) <= r})

    def extend(self, nvars: int) -> "Poly":
        """View as a polynomial in more variables (new ones unused)."""
        if nvars < self.nvars:
            raise ValueError("can only add variables")
        pad = (0,) * (nvars - self.nvars)
        return Poly._raw(nvars, {e + pad: c for e, c in self.terms.items()})

    # -- rendering ----------------------------------------------------------

    def sorted_terms(self) -> list[tuple[tuple[int, ...], Fraction]]:
        # graded order: constant first, then by degree, lexicographically
        # largest exponent vector first within a degree
        return sorted(self.terms.items(), key=lambda t: (sum(t[0]), tuple(-x for x in t[0])))

    def render(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for i, (e, c) in enumerate(self.sorted_terms()):
            neg = c < 0
            body = _render_monomial(e, abs(c))
            if i == 0:
                pieces.append(("-" if neg else "") + body)
            else:
                pieces.append((" - " if neg else " + ") + body)
        return "".join(pieces)


def _render_monomial(e: Iterable[int], c: Fraction) -> str:
    factors = []
    for i, k in enumerate(e, start=1):
        if k == 1:
            factors.append(f"x{i}")
        elif k > 1:
            factors.append(f"x{i}^{k}")
    if not factors:
        return format_fraction(c)
    if c == 1:
        return "*".join(factors)
    coeff = str(c.numerator) if c.denominator == 1 else f"({format_fraction(c)})"
    return coeff + "*" + "*".join(factors)
