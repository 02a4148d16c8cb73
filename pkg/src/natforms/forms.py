"""Differential forms on R^n with polynomial coefficients.

Forms are stored in normal form: a map from strictly increasing index tuples
(1-based) to nonzero :class:`~natforms.poly.Poly` coefficients.  Every sign
coming from reordering ``dx_i`` factors is resolved at construction, so
equality of forms is equality of term maps.
"""

from __future__ import annotations

from fractions import Fraction
from typing import TYPE_CHECKING, Mapping, Sequence

from .poly import Poly, as_fraction

if TYPE_CHECKING:
    from .tensors import CovTensor

__all__ = [
    "DimensionMismatch",
    "DiffForm",
    "SmoothMap",
    "sort_sign",
    "linear_combine",
    "wedge",
    "wedge_all",
    "ext_d",
    "pullback",
    "eval_at",
    "taylor_components",
    "volume_form",
]


class DimensionMismatch(ValueError):
    """Operands live on different spaces or have incompatible grades."""


def sort_sign(idx: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Sort ``idx`` and return ``(sign, sorted)``; sign is 0 on a repeat."""
    idx = list(idx)
    if len(set(idx)) != len(idx):
        return 0, ()
    sign = 1
    # insertion sort, counting transpositions
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(idx)


def _merge_sign(a: tuple[int, ...], b: tuple[int, ...]) -> int:
    # sign of dx_a ^ dx_b relative to the sorted union; both inputs sorted
    inversions = 0
    j = 0
    for x in a:
        while j < len(b) and b[j] < x:
            j += 1
        if j < len(b) and b[j] == x:
            return 0
        inversions += j
    return -1 if inversions & 1 else 1


class DiffForm:
    __slots__ = ("ambient_dim", "grade", "terms", "_hash")

    def __init__(self, ambient_dim: int, grade: int, terms: Mapping[Sequence[int], object] = ()):
        if ambient_dim < 0 or grade < 0:
            raise ValueError("dimension and grade must be non-negative")
        self.ambient_dim = ambient_dim
        self.grade = grade
        out: dict[tuple[int, ...], Poly] = {}
        for idx, coeff in dict(terms).items():
            idx = tuple(idx)
            if len(idx) != grade:
                raise DimensionMismatch(f"index tuple {idx} does not have length {grade}")
            if any(not 1 <= i <= ambient_dim for i in idx):
                raise ValueError(f"index tuple {idx} out of range for R^{ambient_dim}")
            if not isinstance(coeff, Poly):
                coeff = Poly.const(ambient_dim, coeff)
            elif coeff.nvars != ambient_dim:
                raise DimensionMismatch("coefficient ring does not match ambient dimension")
            sign, key = sort_sign(idx)
            if not sign:
                continue
            total = out.get(key, Poly.zero(ambient_dim)) + (coeff if sign > 0 else -coeff)
            if total:
                out[key] = total
            else:
                out.pop(key, None)
        self.terms = out
        self._hash = None

    @classmethod
    def _raw(cls, n: int, q: int, terms: dict) -> "DiffForm":
        f = object.__new__(cls)
        f.ambient_dim = n
        f.grade = q
        f.terms = terms
        f._hash = None
        return f

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, n: int, q: int) -> "DiffForm":
        return cls._raw(n, q, {})

    @classmethod
    def function(cls, f: Poly) -> "DiffForm":
        return cls._raw(f.nvars, 0, {(): f} if f else {})

    @classmethod
    def constant(cls, n: int, c) -> "DiffForm":
        return cls.function(Poly.const(n, c))

    @classmethod
    def dx(cls, n: int, *idx: int, coeff=1) -> "DiffForm":
        """``coeff * dx_{i1} ^ ... ^ dx_{iq}`` (indices in any order)."""
        return cls(n, len(idx), {tuple(idx): coeff})

    @classmethod
    def coordinate(cls, n: int, i: int) -> "DiffForm":
        return cls.function(Poly.var(n, i))

    # -- protocol -----------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, DiffForm):
            return NotImplemented
        return (
            self.ambient_dim == other.ambient_dim
            and self.grade == other.grade
            and self.terms == other.terms
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ambient_dim, self.grade, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self):
        return f"DiffForm(n={self.ambient_dim}, q={self.grade}, {self.render()!r})"

    def __str__(self):
        return self.render()

    def coefficient(self, idx: Sequence[int]) -> Poly:
        """Coefficient of ``dx_idx``, with the reordering sign applied."""
        sign, key = sort_sign(idx)
        c = self.terms.get(key) if sign else None
        if c is None:
            return Poly.zero(self.ambient_dim)
        return c if sign > 0 else -c

    def max_coeff_degree(self) -> int:
        return max((c.degree() for c in self.terms.values()), default=-1)

    # -- linear structure ---------------------------------------------------

    def _check(self, other: "DiffForm", same_grade=True):
        if not isinstance(other, DiffForm):
            raise TypeError(f"expected DiffForm, got {type(other).__name__}")
        if other.ambient_dim != self.ambient_dim:
            raise DimensionMismatch(
                f"forms on R^{self.ambient_dim} and R^{other.ambient_dim}"
            )
        if same_grade and other.grade != self.grade:
            raise DimensionMismatch(f"grades {self.grade} and {other.grade} differ")

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            s = out[k] + c if k in out else c
            if s:
                out[k] = s
            else:
                del out[k]
        return DiffForm._raw(self.ambient_dim, self.grade, out)

    def __neg__(self):
        return DiffForm._raw(self.ambient_dim, self.grade, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "DiffForm":
        """Multiply by a scalar or by a polynomial function."""
        if isinstance(c, Poly):
            if c.nvars != self.ambient_dim:
                raise DimensionMismatch("function lives on a different space")
            out = {}
            for k, v in self.terms.items():
                w = v * c
                if w:
                    out[k] = w
            return DiffForm._raw(self.ambient_dim, self.grade, out)
        c = as_fraction(c)
        if not c:
            return DiffForm.zero(self.ambient_dim, self.grade)
        return DiffForm._raw(self.ambient_dim, self.grade, {k: v.scale(c) for k, v in self.terms.items()})

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    # -- exterior algebra ---------------------------------------------------

    def wedge(self, other: "DiffForm") -> "DiffForm":
        return wedge(self, other)

    def d(self) -> "DiffForm":
        return ext_d(self)

    def render(self) -> str:
        """Canonical text form, e.g. ``(3/2)*x1*x2^2 dx1^dx3``."""
        if not self.terms:
            return "0"
        out = []
        for i, idx in enumerate(sorted(self.terms)):
            coeff = self.terms[idx]
            basis = "^".join(f"dx{j}" for j in idx)
            neg = len(coeff.terms) == 1 and next(iter(coeff.terms.values())) < 0
            if neg:
                coeff = -coeff
            if not basis:
                body = coeff.render()
            elif coeff == 1:
                body = basis
            elif len(coeff.terms) == 1:
                body = f"{coeff.render()} {basis}"
            else:
                body = f"({coeff.render()}) {basis}"
            if i == 0:
                out.append(("-" if neg else "") + body)
            else:
                out.append((" - " if neg else " + ") + body)
        return "".join(out)


def volume_form(n: int) -> DiffForm:
    return DiffForm.dx(n, *range(1, n + 1))


def linear_combine(coeffs: Sequence, forms: Sequence[DiffForm]) -> DiffForm:
    if len(coeffs) != len(forms):
        raise ValueError("need one coefficient per form")
    if not forms:
        raise ValueError("cannot infer ambient dimension of an empty combination")
    head = forms[0]
    acc: dict[tuple[int, ...], Poly] = {}
    for c, f in zip(coeffs, forms):
        head._check(f)
        c = as_fraction(c)
        if not c:
            continue
        for k, v in f.terms.items():
            s = acc[k] + v.scale(c) if k in acc else v.scale(c)
            if s:
                acc[k] = s
            else:
                del acc[k]
    return DiffForm._raw(head.ambient_dim, head.grade, acc)


def wedge(a: DiffForm, b: DiffForm) -> DiffForm:
    a._check(b, same_grade=False)
    n = a.ambient_dim
    q = a.grade + b.grade
    out: dict[tuple[int, ...], Poly] = {}
    if q > n:
        return DiffForm._raw(n, q, out)
    for ia, ca in a.terms.items():
        for ib, cb in b.terms.items():
            sign = _merge_sign(ia, ib)
            if not sign:
                continue
            key = tuple(sorted(ia + ib))
            prod = ca * cb
            if sign < 0:
                prod = -prod
            s = out[key] + prod if key in out else prod
            if s:
                out[key] = s
            else:
                del out[key]
    return DiffForm._raw(n, q, out)


def wedge_all(forms: Sequence[DiffForm], n: int | None = None) -> DiffForm:
    """Iterated wedge; the empty product is the constant 0-form 1 on R^n."""
    if not forms:
        if n is None:
            raise ValueError("empty wedge product needs an ambient dimension")
        return DiffForm.constant(n, 1)
    acc = forms[0]
    for f in forms[1:]:
        acc = wedge(acc, f)
    return acc


def ext_d(a: DiffForm) -> DiffForm:
    n = a.ambient_dim
    out: dict[tuple[int, ...], Poly] = {}
    for idx, f in a.terms.items():
        for j in range(1, n + 1):
            if j in idx:
                continue
            df = f.diff(j)
            if not df:
                continue
            pos = sum(1 for i in idx if i < j)
            if pos & 1:
                df = -df
            key = idx[:pos] + (j,) + idx[pos:]
            s = out[key] + df if key in out else df
            if s:
                out[key] = s
            else:
                del out[key]
    return DiffForm._raw(n, a.grade + 1, out)


class SmoothMap:
    """Polynomial map ``R^m -> R^n`` given by its ``n`` component functions."""

    __slots__ = ("source_dim", "target_dim", "components", "label")

    def __init__(self, source_dim: int, components: Sequence[Poly], label: str = ""):
        for c in components:
            if c.nvars != source_dim:
                raise DimensionMismatch("map component lives in the wrong ring")
        self.source_dim = source_dim
        self.target_dim = len(components)
        self.components = tuple(components)
        self.label = label

    @classmethod
    def identity(cls, n: int) -> "SmoothMap":
        return cls(n, [Poly.var(n, i) for i in range(1, n + 1)], "identity")

    @classmethod
    def translation(cls, shift: Sequence) -> "SmoothMap":
        n = len(shift)
        return cls(n, [Poly.var(n, i) + as_fraction(s) for i, s in enumerate(shift, 1)], "translation")

    @classmethod
    def homothety(cls, n: int, lam) -> "SmoothMap":
        lam = as_fraction(lam)
        return cls(n, [Poly.var(n, i).scale(lam) for i in range(1, n + 1)], "homothety")

    @classmethod
    def linear(cls, matrix: Sequence[Sequence], source_dim: int | None = None) -> "SmoothMap":
        """Map ``x -> M x`` for an ``n x m`` matrix ``M``."""
        m = source_dim if source_dim is not None else (len(matrix[0]) if matrix else 0)
        comps = []
        for row in matrix:
            p = Poly.zero(m)
            for j, a in enumerate(row, 1):
                a = as_fraction(a)
                if a:
                    p = p + Poly.var(m, j).scale(a)
            comps.append(p)
        return cls(m, comps, "linear")

    @classmethod
    def constant(cls, m: int, value: Sequence) -> "SmoothMap":
        return cls(m, [Poly.const(m, v) for v in value], "constant")

    def __eq__(self, other):
        if not isinstance(other, SmoothMap):
            return NotImplemented
        return self.source_dim == other.source_dim and self.components == other.components

    def __hash__(self):
        return hash((self.source_dim, self.components))

    def __call__(self, point: Sequence) -> tuple[Fraction, ...]:
        return tuple(c.evaluate(point) for c in self.components)

    def after(self, inner: "SmoothMap") -> "SmoothMap":
        """The composite ``self o inner``."""
        if inner.target_dim != self.source_dim:
            raise DimensionMismatch("maps cannot be composed")
        comps = [c.compose_into(inner.source_dim, inner.components) for c in self.components]
        return SmoothMap(inner.source_dim, comps, "composite")

    def differentials(self) -> list[DiffForm]:
        m = self.source_dim
        return [
            DiffForm(m, 1, {(k,): c.diff(k) for k in range(1, m + 1)})
            for c in self.components
        ]

    def render(self) -> str:
        args = ", ".join(f"x{i}" for i in range(1, self.source_dim + 1))
        vals = ", ".join(c.render() for c in self.components)
        return f"({args}) -> ({vals})"

    def __repr__(self):
        return f"SmoothMap[{self.label or 'map'}] {self.render()}"


def pullback(tau: SmoothMap, a: DiffForm) -> DiffForm:
    if tau.target_dim != a.ambient_dim:
        raise DimensionMismatch(
            f"map into R^{tau.target_dim} cannot pull back a form on R^{a.ambient_dim}"
        )
    m = tau.source_dim
    if not a.terms:
        return DiffForm.zero(m, a.grade)
    dtau = tau.differentials()
    acc = DiffForm.zero(m, a.grade)
    for idx, f in a.terms.items():
        fpull = f.compose_into(m, tau.components)
        if not fpull:
            continue
        piece = DiffForm.function(fpull)
        for i in idx:
            piece = wedge(piece, dtau[i - 1])
            if not piece:
                break
        if piece:
            acc = acc + piece
    return acc


def eval_at(a: DiffForm, point: Sequence) -> "CovTensor":
    """Value of ``a`` at ``point`` as an antisymmetric covariant tensor."""
    from .tensors import embed_form

    if len(point) != a.ambient_dim:
        raise DimensionMismatch(
            f"point has {len(point)} coordinates, form lives on R^{a.ambient_dim}"
        )
    return embed_form(a).evaluate(point)


def taylor_components(a: DiffForm, r: int) -> list[DiffForm]:
    """Homogeneous pieces ``a^0, ..., a^r`` of the coefficients at the origin."""
    if r < 0:
        raise ValueError("order must be non-negative")
    out = []
    for s in range(r + 1):
        terms = {}
        for idx, c in a.terms.items():
            h = c.homogeneous_part(s)
            if h:
                terms[idx] = h
        out.append(DiffForm._raw(a.ambient_dim, a.grade, terms))
    return out
