"""Connections and Chern-Weil forms on trivial principal bundles.

Everything is pulled back along a global section, so a connection is a
matrix-valued 1-form on the base (a :class:`LieForm`) and its curvature is
``F = dA + 1/2 A^A`` where the wedge multiplies the matrix values.  A
Chern-Weil form is ``T o (F ^ ... ^ F)`` for an ad-invariant linear
functional ``T`` on the symmetric power ``S^q g``.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement, permutations, product
from typing import Callable, Mapping, Sequence

from .forms import DiffForm, DimensionMismatch, ext_d, wedge
from .linalg import SingularMatrix, coordinates, identity, inverse, matmul, rank, to_matrix
from .poly import Poly, as_fraction, format_fraction

__all__ = [
    "MatLieAlg",
    "LieForm",
    "InvariantPoly",
    "preset",
    "load_algebra",
    "lie_wedge",
    "bracket_wedge",
    "curvature",
    "lemados_connection",
    "symmetric_wedge_power",
    "chern_form",
    "normalize_at_point",
    "check_invariance",
    "check_equivariance",
    "apply_endomorphism",
    "Normalization",
    "InvarianceVerdict",
]

Mat = tuple[tuple[Fraction, ...], ...]


def _mat(rows) -> Mat:
    return tuple(tuple(as_fraction(x) for x in row) for row in rows)


def _bracket(a: Mat, b: Mat) -> Mat:
    ab, ba = matmul(a, b), matmul(b, a)
    return tuple(tuple(x - y for x, y in zip(r1, r2)) for r1, r2 in zip(ab, ba))


def _flat(a: Mat) -> list[Fraction]:
    return [x for row in a for x in row]


class MatLieAlg:
    """A Lie subalgebra of gl_m given by a basis of m x m rational matrices."""

    def __init__(self, basis: Sequence[Sequence[Sequence]], name: str = ""):
        if not basis:
            raise ValueError("a Lie algebra basis cannot be empty")
        self.basis: tuple[Mat, ...] = tuple(_mat(b) for b in basis)
        self.matrix_size = len(self.basis[0])
        self.name = name
        for b in self.basis:
            if len(b) != self.matrix_size or any(len(r) != self.matrix_size for r in b):
                raise ValueError("basis matrices must all be square of the same size")
        if rank([_flat(b) for b in self.basis]) != len(self.basis):
            raise ValueError("basis matrices are linearly dependent")
        for a, b in combinations_with_replacement(self.basis, 2):
            if self.coords(_bracket(a, b)) is None:
                raise ValueError("basis is not closed under the commutator")

    @property
    def dim(self) -> int:
        return len(self.basis)

    def coords(self, matrix) -> list[Fraction] | None:
        """Coordinates of a constant matrix in the basis, or None if outside."""
        return coordinates([_flat(b) for b in self.basis], _flat(_mat(matrix)))

    def element(self, coeffs: Sequence) -> Mat:
        m = self.matrix_size
        out = [[Fraction(0)] * m for _ in range(m)]
        for c, b in zip(coeffs, self.basis):
            c = as_fraction(c)
            for i in range(m):
                for j in range(m):
                    out[i][j] += c * b[i][j]
        return _mat(out)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "matrix_size": self.matrix_size,
            "basis": [[[format_fraction(x) for x in row] for row in b] for b in self.basis],
        }

    def __repr__(self):
        return f"MatLieAlg({self.name or '?'}, dim={self.dim}, size={self.matrix_size})"


def _unit(m, i, j) -> list[list[int]]:
    e = [[0] * m for _ in range(m)]
    e[i][j] = 1
    return e


def preset(name: str) -> MatLieAlg:
    """Built-in algebras: ``gl1``, ``gl2``, ``gl3``, ``sl2``, ``so3``."""
    if name in ("gl1", "gl2", "gl3"):
        m = int(name[2])
        return MatLieAlg([_unit(m, i, j) for i in range(m) for j in range(m)], name)
    if name == "sl2":
        return MatLieAlg([[[1, 0], [0, -1]], [[0, 1], [0, 0]], [[0, 0], [1, 0]]], name)
    if name == "so3":
        return MatLieAlg(
            [
                [[0, 0, 0], [0, 0, -1], [0, 1, 0]],
                [[0, 0, 1], [0, 0, 0], [-1, 0, 0]],
                [[0, -1, 0], [1, 0, 0], [0, 0, 0]],
            ],
            name,
        )
    raise KeyError(f"unknown algebra preset {name!r}")


def load_algebra(spec: str) -> MatLieAlg:
    """A preset name or the path of a JSON descriptor file.

    The descriptor holds ``matrix_size`` and ``basis`` (a list of matrices
    whose entries are integers or ``"p/q"`` strings).
    """
    if not os.path.exists(spec):
        return preset(spec)
    with open(spec) as fh:
        data = json.load(fh)
    alg = MatLieAlg(data["basis"], data.get("name", os.path.basename(spec)))
    if "matrix_size" in data and data["matrix_size"] != alg.matrix_size:
        raise ValueError("matrix_size does not match the basis matrices")
    return alg


class LieForm:
    """Matrix-valued differential form, stored as a grid of ordinary forms."""

    __slots__ = ("ambient_dim", "grade", "size", "entries")

    def __init__(self, entries: Sequence[Sequence[DiffForm]]):
        self.entries = tuple(tuple(row) for row in entries)
        self.size = len(self.entries)
        if any(len(row) != self.size for row in self.entries):
            raise ValueError("entries must form a square grid")
        first = self.entries[0][0]
        self.ambient_dim, self.grade = first.ambient_dim, first.grade
        for row in self.entries:
            for f in row:
                if (f.ambient_dim, f.grade) != (self.ambient_dim, self.grade):
                    raise DimensionMismatch("entries of a LieForm must share space and grade")

    @classmethod
    def zero(cls, n: int, grade: int, size: int) -> "LieForm":
        return cls([[DiffForm.zero(n, grade)] * size for _ in range(size)])

    @classmethod
    def from_terms(cls, n: int, grade: int, size: int, terms: Mapping[tuple, object]) -> "LieForm":
        """Build from ``{index tuple: matrix}``; matrix entries are scalars or Polys."""
        grid = [[{} for _ in range(size)] for _ in range(size)]
        for idx, mat in terms.items():
            for i in range(size):
                for j in range(size):
                    v = mat[i][j]
                    if v:
                        grid[i][j][tuple(idx)] = v
        return cls([[DiffForm(n, grade, grid[i][j]) for j in range(size)] for i in range(size)])

    @classmethod
    def constant_matrix(cls, n: int, matrix) -> "LieForm":
        return cls([[DiffForm.constant(n, x) for x in row] for row in _mat(matrix)])

    @classmethod
    def from_components(cls, alg: MatLieAlg, comps: Sequence[DiffForm]) -> "LieForm":
        """``sum_j comps[j] (x) basis[j]``."""
        if len(comps) != alg.dim:
            raise DimensionMismatch("need one component per basis element")
        m = alg.matrix_size
        grid = []
        for i in range(m):
            row = []
            for j in range(m):
                acc = DiffForm.zero(comps[0].ambient_dim, comps[0].grade)
                for c, b in zip(comps, alg.basis):
                    if b[i][j]:
                        acc = acc + c.scale(b[i][j])
                row.append(acc)
            grid.append(row)
        return cls(grid)

    @property
    def terms(self) -> dict[tuple[int, ...], tuple[tuple[Poly, ...], ...]]:
        keys = set()
        for row in self.entries:
            for f in row:
                keys |= set(f.terms)
        zero = Poly.zero(self.ambient_dim)
        return {
            k: tuple(tuple(f.terms.get(k, zero) for f in row) for row in self.entries)
            for k in sorted(keys)
        }

    def __eq__(self, other):
        if not isinstance(other, LieForm):
            return NotImplemented
        return self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __bool__(self):
        return any(f for row in self.entries for f in row)

    def _zip(self, other, fn):
        if other.size != self.size:
            raise DimensionMismatch("matrix sizes differ")
        return LieForm([[fn(a, b) for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)])

    def __add__(self, other):
        return self._zip(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._zip(other, lambda a, b: a - b)

    def __neg__(self):
        return LieForm([[-f for f in row] for row in self.entries])

    def scale(self, c) -> "LieForm":
        return LieForm([[f.scale(c) for f in row] for row in self.entries])

    def d(self) -> "LieForm":
        return LieForm([[ext_d(f) for f in row] for row in self.entries])

    def trace(self) -> DiffForm:
        acc = self.entries[0][0]
        for i in range(1, self.size):
            acc = acc + self.entries[i][i]
        return acc

    def evaluate(self, point: Sequence) -> dict[tuple[int, ...], Mat]:
        """Constant matrices of each basis component at ``point``."""
        out = {}
        for idx, mat in self.terms.items():
            val = _mat([[c.evaluate(point) for c in row] for row in mat])
            if any(any(row) for row in val):
                out[idx] = val
        return out

    def components(self, alg: MatLieAlg) -> list[DiffForm]:
        """Forms ``c_j`` with ``self = sum_j c_j (x) basis[j]``."""
        n, q = self.ambient_dim, self.grade
        comp_terms: list[dict] = [{} for _ in range(alg.dim)]
        for idx, mat in self.terms.items():
            monos = set()
            for row in mat:
                for c in row:
                    monos |= set(c.terms)
            for e in monos:
                const = [[c.terms.get(e, 0) for c in row] for row in mat]
                co = alg.coords(const)
                if co is None:
                    raise ValueError(f"value at dx{idx} leaves the Lie algebra {alg.name}")
                for j, cj in enumerate(co):
                    if cj:
                        comp_terms[j].setdefault(idx, {})[e] = cj
        return [
            DiffForm(n, q, {idx: Poly(n, t) for idx, t in ct.items()}) for ct in comp_terms
        ]

    def in_algebra(self, alg: MatLieAlg) -> bool:
        try:
            self.components(alg)
        except ValueError:
            return False
        return True

    def render(self) -> str:
        rows = ["[" + ", ".join(f.render() for f in row) + "]" for row in self.entries]
        return "[" + ", ".join(rows) + "]"

    def __repr__(self):
        return f"LieForm(n={self.ambient_dim}, q={self.grade}, {self.render()})"


def lie_wedge(a: LieForm, b: LieForm) -> LieForm:
    """Wedge on the form parts, matrix product on the values."""
    if a.size != b.size:
        raise DimensionMismatch("matrix sizes differ")
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatch("forms on different spaces")
    m = a.size
    grid = []
    for i in range(m):
        row = []
        for j in range(m):
            acc = DiffForm.zero(a.ambient_dim, a.grade + b.grade)
            for k in range(m):
                x, y = a.entries[i][k], b.entries[k][j]
                if x and y:
                    acc = acc + wedge(x, y)
            row.append(acc)
        grid.append(row)
    return LieForm(grid)


def bracket_wedge(a: LieForm, b: LieForm) -> LieForm:
    """``[a ^ b] = a ^ b - (-1)^(|a||b|) b ^ a`` (for 1-forms, ``2 a ^ a``)."""
    sign = -1 if (a.grade * b.grade) % 2 == 0 else 1
    return lie_wedge(a, b) + lie_wedge(b, a).scale(sign)


def curvature(a: LieForm) -> LieForm:
    """``F = dA + 1/2 [A ^ A]``, which for matrices is ``dA + A ^ A``."""
    if a.grade != 1:
        raise DimensionMismatch("curvature is defined for connection 1-forms")
    return a.d() + bracket_wedge(a, a).scale(Fraction(1, 2))


def lemados_connection(vectors: Sequence) -> LieForm:
    """``A = sum_i x_i dy_i (x) v_i`` on R^{2q} with coordinates (x_1..x_q, y_1..y_q)."""
    q = len(vectors)
    if q < 1:
        raise ValueError("need at least one vector")
    mats = [_mat(v) for v in vectors]
    m = len(mats[0])
    n = 2 * q
    grid = []
    for r in range(m):
        row = []
        for c in range(m):
            terms = {}
            for i, v in enumerate(mats, start=1):
                if v[r][c]:
                    terms[(q + i,)] = Poly.var(n, i).scale(v[r][c])
            row.append(DiffForm(n, 1, terms))
        grid.append(row)
    return LieForm(grid)


class InvariantPoly:
    """Linear functional on ``S^q g``, keyed by multisets of basis indices.

    ``coeffs[J]`` is the value on the (unnormalised) symmetric product
    ``b_{j1} ... b_{jq}`` for the sorted index tuple ``J``.
    """

    def __init__(self, algebra: MatLieAlg, degree: int, coeffs: Mapping[Sequence[int], object]):
        self.algebra = algebra
        self.degree = degree
        out: dict[tuple[int, ...], Fraction] = {}
        for key, c in coeffs.items():
            key = tuple(sorted(key))
            if len(key) != degree or any(not 0 <= j < algebra.dim for j in key):
                raise ValueError(f"bad multiset {key} for degree {degree}")
            c = as_fraction(c)
            if c:
                out[key] = out.get(key, 0) + c
        self.coeffs = out

    def __call__(self, multiset: Sequence[int]) -> Fraction:
        return self.coeffs.get(tuple(sorted(multiset)), Fraction(0))

    @classmethod
    def from_multilinear(cls, algebra: MatLieAlg, degree: int, fn: Callable[[list[Mat]], object]):
        """Symmetrise a multilinear function of ``degree`` matrices."""
        coeffs = {}
        for key in combinations_with_replacement(range(algebra.dim), degree):
            perms = set(permutations(key))
            total = sum(
                (as_fraction(fn([algebra.basis[j] for j in p])) for p in perms), Fraction(0)
            )
            coeffs[key] = total / len(perms)
        return cls(algebra, degree, coeffs)

    @classmethod
    def trace(cls, algebra: MatLieAlg) -> "InvariantPoly":
        return cls.trace_power(algebra, 1)

    @classmethod
    def trace_power(cls, algebra: MatLieAlg, degree: int) -> "InvariantPoly":
        """Symmetrised ``tr(A1 A2 ... Aq)``."""

        def fn(mats):
            acc = identity(algebra.matrix_size)
            for a in mats:
                acc = matmul(acc, a)
            return sum((acc[i][i] for i in range(len(acc))), Fraction(0))

        return cls.from_multilinear(algebra, degree, fn)

    @classmethod
    def dual_monomial(cls, algebra: MatLieAlg, multiset: Sequence[int]) -> "InvariantPoly":
        return cls(algebra, len(multiset), {tuple(multiset): 1})

    def __repr__(self):
        return f"InvariantPoly(degree={self.degree}, {len(self.coeffs)} terms)"


def symmetric_wedge_power(theta: LieForm, q: int, alg: MatLieAlg) -> dict[tuple[int, ...], DiffForm]:
    """``theta ^ ... ^ theta`` (q factors) with values collected in ``S^q g``.

    Expands over every ordered sequence of basis components and files each
    product under the sorted index multiset.
    """
    comps = theta.components(alg)
    n = theta.ambient_dim
    live = [j for j, c in enumerate(comps) if c]
    out: dict[tuple[int, ...], DiffForm] = {}
    for seq in product(live, repeat=q):
        acc = DiffForm.constant(n, 1)
        for j in seq:
            acc = wedge(acc, comps[j])
            if not acc:
                break
        if not acc:
            continue
        key = tuple(sorted(seq))
        out[key] = out[key] + acc if key in out else acc
    return {k: v for k, v in out.items() if v}


def chern_form(T: InvariantPoly, theta: LieForm) -> DiffForm:
    if theta.grade != 2:
        raise DimensionMismatch("Chern-Weil forms take a curvature 2-form")
    q = T.degree
    n = theta.ambient_dim
    result = DiffForm.zero(n, 2 * q)
    if q == 0:
        return DiffForm.constant(n, T(()))
    for key, form in symmetric_wedge_power(theta, q, T.algebra).items():
        c = T(key)
        if c:
            result = result + form.scale(c)
    return result


# -- gauge normalisation -----------------------------------------------------


@dataclass
class Normalization:
    gauge: tuple[tuple[Poly, ...], ...]
    value: tuple[Mat, ...]
    transformed: LieForm

    @property
    def is_zero(self) -> bool:
        return all(not any(any(r) for r in mat) for mat in self.value)


def normalize_at_point(a: LieForm, x0: Sequence) -> Normalization:
    """Gauge ``a`` so that it vanishes at ``x0``.

    Uses ``g(x) = I - sum_j A_j (x_j - x0_j)`` with ``A_j`` the value of the
    ``dx_j`` component at ``x0``, the law ``A' = g^-1 A g + g^-1 dg``, and
    the first-order inverse ``g^-1 ~ I + sum_j A_j (x_j - x0_j)``, which is
    exact for the value at ``x0``.
    """
    if a.grade != 1:
        raise DimensionMismatch("gauge normalisation applies to connection 1-forms")
    n, m = a.ambient_dim, a.size
    x0 = [as_fraction(v) for v in x0]
    if len(x0) != n:
        raise DimensionMismatch("point has the wrong number of coordinates")
    at = a.evaluate(x0)
    zero_mat = _mat([[0] * m for _ in range(m)])
    A = [at.get((j,), zero_mat) for j in range(1, n + 1)]

    def affine(sign):
        grid = []
        for r in range(m):
            row = []
            for c in range(m):
                p = Poly.const(n, int(r == c))
                for j in range(n):
                    if A[j][r][c]:
                        shift = Poly.var(n, j + 1) - x0[j]
                        p = p + shift.scale(sign * A[j][r][c])
                row.append(p)
            grid.append(tuple(row))
        return tuple(grid)

    g = affine(-1)
    g_inv = affine(+1)
    G = LieForm([[DiffForm.function(p) for p in row] for row in g])
    Ginv = LieForm([[DiffForm.function(p) for p in row] for row in g_inv])
    transformed = lie_wedge(lie_wedge(Ginv, a), G) + lie_wedge(Ginv, G.d())
    val = transformed.evaluate(x0)
    value = tuple(val.get((j,), zero_mat) for j in range(1, n + 1))
    return Normalization(g, value, transformed)


# -- invariance checks -------------------------------------------------------


@dataclass
class InvarianceVerdict:
    passed: bool
    sample: Mat | None = None
    witness: tuple[int, ...] | None = None

    def __bool__(self):
        return self.passed


def _adjoint_coords(alg: MatLieAlg, g) -> list[list[Fraction]]:
    g = to_matrix(g)
    try:
        g_inv = inverse(g)
    except SingularMatrix as exc:
        raise ValueError("group sample is singular") from exc
    rows = []
    for b in alg.basis:
        conj = matmul(matmul(g, b), g_inv)
        co = alg.coords(conj)
        if co is None:
            raise ValueError(f"conjugation by the sample does not preserve {alg.name}")
        rows.append(co)
    return rows


def check_invariance(T: InvariantPoly, samples: Sequence) -> InvarianceVerdict:
    """Check ``T(Ad(g) w) == T(w)`` on every symmetric basis product ``w``."""
    alg = T.algebra
    for g in samples:
        ad = _adjoint_coords(alg, g)
        for key in combinations_with_replacement(range(alg.dim), T.degree):
            total = Fraction(0)
            for seq in product(range(alg.dim), repeat=T.degree):
                coeff = Fraction(1)
                for j, l in zip(key, seq):
                    coeff *= ad[j][l]
                    if not coeff:
                        break
                if coeff:
                    total += coeff * T(seq)
            if total != T(key):
                return InvarianceVerdict(False, _mat(g), key)
    return InvarianceVerdict(True)


def check_equivariance(endo: Sequence[Sequence], alg: MatLieAlg, samples: Sequence) -> InvarianceVerdict:
    """``endo`` (acting on basis coordinates) commutes with every ``Ad(g)``."""
    E = to_matrix(endo)
    for g in samples:
        ad = _adjoint_coords(alg, g)
        # ad[j] = coordinates of Ad(g) b_j, i.e. column j of the Ad matrix
        Ad = [[ad[j][i] for j in range(alg.dim)] for i in range(alg.dim)]
        if matmul(E, Ad) != matmul(Ad, E):
            return InvarianceVerdict(False, _mat(g))
    return InvarianceVerdict(True)


def apply_endomorphism(endo: Sequence[Sequence], theta: LieForm, alg: MatLieAlg) -> LieForm:
    """``T o theta`` for ``T: g -> g`` given on basis coordinates."""
    E = to_matrix(endo)
    comps = theta.components(alg)
    new = []
    for i in range(alg.dim):
        acc = DiffForm.zero(theta.ambient_dim, theta.grade)
        for j, c in enumerate(comps):
            if E[i][j]:
                acc = acc + c.scale(E[i][j])
        new.append(acc)
    return LieForm.from_components(alg, new)
