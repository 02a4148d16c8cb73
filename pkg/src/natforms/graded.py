"""Graded anti-commutative polynomial algebras R{u1, v1, ..., uk, vk}.

Variables carry positive degrees and obey ``a*b = (-1)^(deg a * deg b) b*a``,
so odd-degree variables square to zero.  Monomials are kept in a canonical
variable order (the order of the variable list), with the sign produced by
reordering folded into the coefficient.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .forms import DiffForm, DimensionMismatch, ext_d, wedge
from .poly import as_fraction, format_fraction

__all__ = [
    "GradedVar",
    "GradedMono",
    "GradedPoly",
    "mono_normalize",
    "natural_variables",
    "gp_add",
    "gp_mul",
    "gp_scale",
    "gp_eval",
    "eval_with_differentials",
]


@dataclass(frozen=True)
class GradedVar:
    name: str
    degree: int

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError(f"variable {self.name} needs positive degree")

    @property
    def odd(self) -> bool:
        return self.degree % 2 == 1


def natural_variables(degrees: Sequence[int]) -> tuple[GradedVar, ...]:
    """``u1, v1, u2, v2, ...`` with ``deg u_i = p_i`` and ``deg v_i = p_i + 1``."""
    out = []
    for i, p in enumerate(degrees, start=1):
        out.append(GradedVar(f"u{i}", p))
        out.append(GradedVar(f"v{i}", p + 1))
    return tuple(out)


def _index_of(variables: Sequence[GradedVar], v) -> int:
    for i, w in enumerate(variables):
        if w == v or w.name == v:
            return i
    raise KeyError(f"unknown variable {v!r}")


def mono_normalize(
    factors: Sequence[tuple[GradedVar | str, int]],
    variables: Sequence[GradedVar],
) -> tuple[int, "GradedMono | None"]:
    """Sort a product of variable powers into canonical order.

    Returns ``(sign, monomial)``; the sign is 0 (and the monomial ``None``)
    when an odd variable ends up squared.
    """
    word: list[int] = []
    for v, e in factors:
        if e < 0:
            raise ValueError("negative exponent")
        word.extend([_index_of(variables, v)] * e)
    sign = 1
    # bubble sort; only odd-odd transpositions flip the sign
    for end in range(len(word) - 1, 0, -1):
        for j in range(end):
            a, b = word[j], word[j + 1]
            if a > b:
                word[j], word[j + 1] = b, a
                if variables[a].odd and variables[b].odd:
                    sign = -sign
    exps = [0] * len(variables)
    for i in word:
        exps[i] += 1
    for v, e in zip(variables, exps):
        if v.odd and e > 1:
            return 0, None
    return sign, GradedMono(tuple(variables), tuple(exps))


def _product_sign(variables, e1, e2) -> int:
    # sign of (mono e1)*(mono e2) once normalised; 0 if an odd square appears
    swaps = 0
    for v, a, b in zip(variables, e1, e2):
        if v.odd and a + b > 1:
            return 0
    # each factor of e2 moves left past every factor of e1 with larger index
    for i, b in enumerate(e2):
        if not b or not variables[i].odd:
            continue
        for j in range(i + 1, len(variables)):
            if e1[j] and variables[j].odd:
                swaps += b * e1[j]
    return -1 if swaps & 1 else 1


@dataclass(frozen=True)
class GradedMono:
    variables: tuple[GradedVar, ...]
    exponents: tuple[int, ...]

    @property
    def degree(self) -> int:
        return sum(e * v.degree for e, v in zip(self.exponents, self.variables))

    def render(self) -> str:
        parts = []
        for v, e in zip(self.variables, self.exponents):
            if e == 1:
                parts.append(v.name)
            elif e > 1:
                parts.append(f"{v.name}^{e}")
        return "*".join(parts) if parts else "1"

    def as_poly(self) -> "GradedPoly":
        return GradedPoly(self.variables, {self.exponents: 1})

    def __str__(self):
        return self.render()

    @classmethod
    def parse(cls, text: str, variables: Sequence[GradedVar]) -> "GradedMono":
        """Parse ``u1^2*v1`` (or ``1``) into a normalised monomial."""
        text = text.strip()
        if text == "1":
            return GradedMono(tuple(variables), (0,) * len(variables))
        factors = []
        for piece in text.split("*"):
            m = re.fullmatch(r"\s*([A-Za-z]\w*?)(?:\^(\d+))?\s*", piece)
            if not m:
                raise ValueError(f"cannot parse monomial factor {piece!r}")
            factors.append((m.group(1), int(m.group(2) or 1)))
        sign, mono = mono_normalize(factors, variables)
        if sign != 1:
            raise ValueError(f"{text!r} is not a canonical nonzero monomial")
        return mono


class GradedPoly:
    __slots__ = ("variables", "terms")

    def __init__(self, variables: Sequence[GradedVar], terms: Mapping[Sequence[int], object] = ()):
        self.variables = tuple(variables)
        out: dict[tuple[int, ...], Fraction] = {}
        for exps, c in dict(terms).items():
            exps = tuple(exps)
            if len(exps) != len(self.variables):
                raise ValueError("exponent vector does not match the variable list")
            c = as_fraction(c)
            if not c:
                continue
            if any(v.odd and e > 1 for v, e in zip(self.variables, exps)):
                continue
            s = out.get(exps, 0) + c
            if s:
                out[exps] = s
            else:
                out.pop(exps, None)
        self.terms = out

    @classmethod
    def _raw(cls, variables, terms):
        p = object.__new__(cls)
        p.variables = variables
        p.terms = terms
        return p

    @classmethod
    def one(cls, variables: Sequence[GradedVar]) -> "GradedPoly":
        return cls(variables, {(0,) * len(variables): 1})

    @classmethod
    def var(cls, variables: Sequence[GradedVar], name: str) -> "GradedPoly":
        i = _index_of(variables, name)
        e = [0] * len(variables)
        e[i] = 1
        return cls(variables, {tuple(e): 1})

    def __eq__(self, other):
        if not isinstance(other, GradedPoly):
            return NotImplemented
        return self.variables == other.variables and self.terms == other.terms

    def __hash__(self):
        return hash((self.variables, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def mono_degree(self, exps) -> int:
        return sum(e * v.degree for e, v in zip(exps, self.variables))

    def degrees(self) -> set[int]:
        return {self.mono_degree(e) for e in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def homogeneous_part(self, q: int) -> "GradedPoly":
        return GradedPoly._raw(
            self.variables, {e: c for e, c in self.terms.items() if self.mono_degree(e) == q}
        )

    def coefficient(self, mono: GradedMono | Sequence[int]) -> Fraction:
        exps = mono.exponents if isinstance(mono, GradedMono) else tuple(mono)
        return self.terms.get(exps, Fraction(0))

    def _check(self, other: "GradedPoly"):
        if self.variables != other.variables:
            raise DimensionMismatch("graded polynomials over different variable lists")

    def __add__(self, other):
        return gp_add(self, other)

    def __sub__(self, other):
        return gp_add(self, gp_scale(other, -1))

    def __neg__(self):
        return gp_scale(self, -1)

    def __mul__(self, other):
        if isinstance(other, GradedPoly):
            return gp_mul(self, other)
        return gp_scale(self, other)

    def __rmul__(self, c):
        return gp_scale(self, c)

    def sorted_terms(self):
        # lexicographically largest exponent vector first
        return sorted(self.terms.items(), key=lambda t: tuple(-x for x in t[0]))

    def render(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for i, (e, c) in enumerate(self.sorted_terms()):
            mono = GradedMono(self.variables, e).render()
            neg = c < 0
            a = abs(c)
            if mono == "1":
                body = format_fraction(a)
            elif a == 1:
                body = mono
            elif a.denominator == 1:
                body = f"{a.numerator}*{mono}"
            else:
                body = f"({format_fraction(a)})*{mono}"
            if i == 0:
                out.append(("-" if neg else "") + body)
            else:
                out.append((" - " if neg else " + ") + body)
        return "".join(out)

    def __repr__(self):
        return f"GradedPoly({self.render()!r})"

    __str__ = render


def gp_add(p: GradedPoly, q: GradedPoly) -> GradedPoly:
    p._check(q)
    out = dict(p.terms)
    for e, c in q.terms.items():
        s = out.get(e, 0) + c
        if s:
            out[e] = s
        else:
            out.pop(e, None)
    return GradedPoly._raw(p.variables, out)


def gp_scale(p: GradedPoly, c) -> GradedPoly:
    c = as_fraction(c)
    if not c:
        return GradedPoly._raw(p.variables, {})
    return GradedPoly._raw(p.variables, {e: c * v for e, v in p.terms.items()})


def gp_mul(p: GradedPoly, q: GradedPoly) -> GradedPoly:
    p._check(q)
    out: dict = {}
    for e1, c1 in p.terms.items():
        for e2, c2 in q.terms.items():
            sign = _product_sign(p.variables, e1, e2)
            if not sign:
                continue
            e = tuple(a + b for a, b in zip(e1, e2))
            s = out.get(e, 0) + sign * c1 * c2
            if s:
                out[e] = s
            else:
                out.pop(e, None)
    return GradedPoly._raw(p.variables, out)


def _eval_mono(exps, variables, forms: list[DiffForm], n: int) -> DiffForm:
    acc = DiffForm.constant(n, 1)
    for f, e in zip(forms, exps):
        for _ in range(e):
            acc = wedge(acc, f)
            if not acc:
                return acc
    return acc


def gp_eval(
    p: GradedPoly,
    assignment: Mapping[GradedVar | str, DiffForm],
    *,
    ambient_dim: int | None = None,
    degree: int | None = None,
) -> DiffForm | dict[int, DiffForm]:
    """Substitute forms for the variables, products becoming wedges.

    Returns a single form when ``p`` is homogeneous (or ``degree`` selects a
    slice); otherwise a map ``degree -> form``, one entry per slice.
    """
    forms: list[DiffForm | None] = [None] * len(p.variables)
    for key, form in assignment.items():
        i = _index_of(p.variables, key)
        var = p.variables[i]
        if form.grade != var.degree:
            raise DimensionMismatch(
                f"{var.name} has degree {var.degree} but was assigned a {form.grade}-form"
            )
        forms[i] = form
    dims = {f.ambient_dim for f in forms if f is not None}
    if ambient_dim is not None:
        dims.add(ambient_dim)
    if len(dims) > 1:
        raise DimensionMismatch("assigned forms live on different spaces")
    if not dims:
        raise ValueError("cannot infer the ambient dimension")
    n = dims.pop()

    slices: dict[int, DiffForm] = {}
    for e, c in p.terms.items():
        q = p.mono_degree(e)
        if degree is not None and q != degree:
            continue
        missing = [p.variables[i].name for i, k in enumerate(e) if k and forms[i] is None]
        if missing:
            raise KeyError(f"no form assigned to {', '.join(missing)}")
        term = _eval_mono(e, p.variables, forms, n)
        term = term.scale(c) if term else DiffForm.zero(n, q)
        slices[q] = slices[q] + term if q in slices else term

    if degree is not None:
        return slices.get(degree, DiffForm.zero(n, degree))
    if len(slices) == 1:
        return next(iter(slices.values()))
    return slices


def eval_with_differentials(p: GradedPoly, forms: Sequence[DiffForm], *, degree=None, ambient_dim=None):
    """Evaluate ``P(w1, dw1, ..., wk, dwk)`` for the natural variable list."""
    if len(p.variables) != 2 * len(forms):
        raise DimensionMismatch("need one form per (u_i, v_i) pair")
    assignment = {}
    for i, w in enumerate(forms):
        assignment[p.variables[2 * i]] = w
        assignment[p.variables[2 * i + 1]] = ext_d(w)
    return gp_eval(p, assignment, degree=degree, ambient_dim=ambient_dim)
