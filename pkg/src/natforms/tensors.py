"""Covariant tensors with polynomial coefficients.

Includes the unnormalised skew-symmetrisation ``h`` (signed sum over all
permutations of the slots, no ``1/r!``), the inclusion of q-forms into
q-tensors, and the flat covariant derivative of R^n.
"""

from __future__ import annotations

from itertools import permutations
from typing import Mapping, Sequence

from .forms import DiffForm, DimensionMismatch
from .poly import Poly, as_fraction

__all__ = [
    "CovTensor",
    "NotAntisymmetric",
    "tensor_product",
    "skew",
    "embed_form",
    "project_form",
    "nabla",
    "permutation_sign",
]


class NotAntisymmetric(ValueError):
    pass


def permutation_sign(perm: Sequence[int]) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


class CovTensor:
    """An order-r covariant tensor on R^n: index tuple -> Poly."""

    __slots__ = ("ambient_dim", "order", "terms")

    def __init__(self, ambient_dim: int, order: int, terms: Mapping[Sequence[int], object] = ()):
        self.ambient_dim = ambient_dim
        self.order = order
        out: dict[tuple[int, ...], Poly] = {}
        for idx, c in dict(terms).items():
            idx = tuple(idx)
            if len(idx) != order or any(not 1 <= i <= ambient_dim for i in idx):
                raise ValueError(f"bad index tuple {idx} for order {order} on R^{ambient_dim}")
            if not isinstance(c, Poly):
                c = Poly.const(ambient_dim, c)
            s = out[idx] + c if idx in out else c
            if s:
                out[idx] = s
            else:
                out.pop(idx, None)
        self.terms = out

    @classmethod
    def _raw(cls, n, r, terms):
        t = object.__new__(cls)
        t.ambient_dim, t.order, t.terms = n, r, terms
        return t

    @classmethod
    def scalar(cls, f: Poly) -> "CovTensor":
        return cls._raw(f.nvars, 0, {(): f} if f else {})

    @classmethod
    def basis(cls, n: int, *idx: int, coeff=1) -> "CovTensor":
        """``coeff * dx_{i1} (x) ... (x) dx_{ir}``."""
        return cls(n, len(idx), {idx: coeff})

    def __eq__(self, other):
        if not isinstance(other, CovTensor):
            return NotImplemented
        return (self.ambient_dim, self.order, self.terms) == (
            other.ambient_dim,
            other.order,
            other.terms,
        )

    def __hash__(self):
        return hash((self.ambient_dim, self.order, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def _check(self, other, same_order=True):
        if other.ambient_dim != self.ambient_dim:
            raise DimensionMismatch("tensors on different spaces")
        if same_order and other.order != self.order:
            raise DimensionMismatch("tensors of different order")

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            s = out[k] + c if k in out else c
            if s:
                out[k] = s
            else:
                del out[k]
        return CovTensor._raw(self.ambient_dim, self.order, out)

    def __neg__(self):
        return CovTensor._raw(self.ambient_dim, self.order, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "CovTensor":
        c = as_fraction(c)
        if not c:
            return CovTensor._raw(self.ambient_dim, self.order, {})
        return CovTensor._raw(self.ambient_dim, self.order, {k: v.scale(c) for k, v in self.terms.items()})

    __mul__ = scale
    __rmul__ = scale

    def permute(self, perm: Sequence[int]) -> "CovTensor":
        """Move slot ``i`` to slot ``perm[i]`` (0-based)."""
        out = {}
        for idx, c in self.terms.items():
            new = [0] * self.order
            for i, p in enumerate(perm):
                new[p] = idx[i]
            out[tuple(new)] = c
        return CovTensor._raw(self.ambient_dim, self.order, out)

    def is_antisymmetric(self) -> bool:
        # every entry must match the signed entry at each rearrangement
        for idx, c in self.terms.items():
            if len(set(idx)) < len(idx):
                return False
            for perm in permutations(range(self.order)):
                key = tuple(idx[p] for p in perm)
                want = c if permutation_sign(perm) > 0 else -c
                if self.terms.get(key) != want:
                    return False
        return True

    def evaluate(self, point: Sequence) -> "CovTensor":
        """Substitute a point; the result has constant coefficients."""
        if len(point) != self.ambient_dim:
            raise DimensionMismatch("point has the wrong number of coordinates")
        out = {}
        for idx, c in self.terms.items():
            v = c.evaluate(point)
            if v:
                out[idx] = Poly.const(self.ambient_dim, v)
        return CovTensor._raw(self.ambient_dim, self.order, out)

    def contract_vector(self, vec: Sequence) -> "CovTensor":
        """Insert the constant vector ``vec`` into the first slot."""
        vec = [as_fraction(v) for v in vec]
        out: dict = {}
        for idx, c in self.terms.items():
            w = vec[idx[0] - 1]
            if not w:
                continue
            key = idx[1:]
            s = out[key] + c.scale(w) if key in out else c.scale(w)
            if s:
                out[key] = s
            else:
                del out[key]
        return CovTensor._raw(self.ambient_dim, self.order - 1, out)

    def render(self) -> str:
        if not self.terms:
            return "0"
        return "; ".join(
            f"({','.join(map(str, idx))}) ↦ {self.terms[idx].render()}"
            for idx in sorted(self.terms)
        )

    def __repr__(self):
        return f"CovTensor(n={self.ambient_dim}, r={self.order}, {self.render()!r})"


def tensor_product(s: CovTensor, t: CovTensor) -> CovTensor:
    s._check(t, same_order=False)
    out: dict = {}
    for i1, c1 in s.terms.items():
        for i2, c2 in t.terms.items():
            key = i1 + i2
            p = c1 * c2
            v = out[key] + p if key in out else p
            if v:
                out[key] = v
            else:
                del out[key]
    return CovTensor._raw(s.ambient_dim, s.order + t.order, out)


def skew(t: CovTensor) -> CovTensor:
    """``h(t) = sum over sigma of sgn(sigma) * sigma(t)``, unnormalised."""
    r = t.order
    out: dict = {}
    for perm in permutations(range(r)):
        sign = permutation_sign(perm)
        for idx, c in t.terms.items():
            new = [0] * r
            for i, p in enumerate(perm):
                new[p] = idx[i]
            key = tuple(new)
            val = c if sign > 0 else -c
            v = out[key] + val if key in out else val
            if v:
                out[key] = v
            else:
                del out[key]
    return CovTensor._raw(t.ambient_dim, r, out)


def embed_form(a: DiffForm) -> CovTensor:
    """``f dx_I -> f * sum_sigma sgn(sigma) dx_{I sigma(1)} (x) ...``."""
    q = a.grade
    perms = [(p, permutation_sign(p)) for p in permutations(range(q))]
    out = {}
    for idx, c in a.terms.items():
        for perm, sign in perms:
            key = tuple(idx[p] for p in perm)
            out[key] = c if sign > 0 else -c
    return CovTensor._raw(a.ambient_dim, q, out)


def project_form(t: CovTensor) -> DiffForm:
    """Inverse of :func:`embed_form`: read off the increasing-tuple entries."""
    if not t.is_antisymmetric():
        raise NotAntisymmetric("tensor is not antisymmetric")
    terms = {idx: c for idx, c in t.terms.items() if list(idx) == sorted(idx)}
    return DiffForm._raw(t.ambient_dim, t.order, terms)


def _nabla_once(t: CovTensor) -> CovTensor:
    n = t.ambient_dim
    out = {}
    for idx, c in t.terms.items():
        for j in range(1, n + 1):
            dc = c.diff(j)
            if dc:
                out[(j,) + idx] = dc
    return CovTensor._raw(n, t.order + 1, out)


def nabla(t: CovTensor | DiffForm, s: int = 1) -> CovTensor:
    """Iterated flat covariant derivative; each step prepends a slot."""
    if s < 0:
        raise ValueError("number of derivatives must be non-negative")
    if isinstance(t, DiffForm):
        t = embed_form(t)
    for _ in range(s):
        t = _nabla_once(t)
    return t
