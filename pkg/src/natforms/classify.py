"""Classification of natural operations on differential forms.

Every natural operation ``P(w1, ..., wk)`` taking forms of degrees
``p1, ..., pk`` to q-forms is ``Poly(w1, dw1, ..., wk, dwk)`` for a unique
homogeneous element of the graded algebra ``R{u1, v1, ..., uk, vk}`` with
``deg u_i = p_i`` and ``deg v_i = p_i + 1``.  This module enumerates the
monomial basis of that space, builds test forms isolating each monomial,
recovers the polynomial of a black-box operation, and fuzzes naturality by
checking compatibility with pullbacks along random polynomial maps.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, prod
from typing import Callable, Sequence

from .forms import DiffForm, DimensionMismatch, SmoothMap, ext_d, pullback, wedge
from .graded import GradedMono, GradedPoly, GradedVar, eval_with_differentials, natural_variables
from .linalg import SingularMatrix, solve
from .poly import Poly, format_fraction
from .sampling import MAP_KINDS, random_forms, random_map, trial_rng

log = logging.getLogger(__name__)

__all__ = [
    "Signature",
    "NaturalOp",
    "FactorWitness",
    "WitnessAssignment",
    "NotClassifiedShape",
    "WitnessNotSeparating",
    "NotNatural",
    "Decomposition",
    "Counterexample",
    "Verdict",
    "enumerate_basis",
    "count_basis",
    "witness",
    "evaluate_on_witness",
    "cross_evaluation_matrix",
    "decomposition",
    "decompose",
    "check_naturality",
    "induced_op",
    "exterior_derivative_op",
    "wedge_op",
    "records_from_poly",
    "poly_from_records",
    "records_from_basis",
]


class NotClassifiedShape(ValueError):
    """A witness evaluation is not a constant multiple of the volume form."""


class WitnessNotSeparating(ValueError):
    def __init__(self, msg, matrix=None):
        super().__init__(msg)
        self.matrix = matrix


class NotNatural(ValueError):
    """The operation disagrees with every polynomial in the classified space."""


@dataclass(frozen=True)
class Signature:
    source_degrees: tuple[int, ...]
    target_degree: int
    ambient_dim: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "source_degrees", tuple(self.source_degrees))
        if any(p < 1 for p in self.source_degrees):
            raise ValueError("source degrees must be positive integers")
        if self.target_degree < 0:
            raise ValueError("target degree must be non-negative")

    @property
    def k(self) -> int:
        return len(self.source_degrees)

    @property
    def variables(self) -> tuple[GradedVar, ...]:
        return natural_variables(self.source_degrees)

    def __str__(self):
        ps = ",".join(map(str, self.source_degrees))
        return f"p=[{ps}] q={self.target_degree}"


@dataclass(frozen=True)
class NaturalOp:
    """A black-box operation ``(n, forms) -> q-form on R^n``."""

    source_degrees: tuple[int, ...]
    target_degree: int
    func: Callable[[int, Sequence[DiffForm]], DiffForm] = field(compare=False)
    name: str = "op"

    @property
    def signature(self) -> Signature:
        return Signature(self.source_degrees, self.target_degree)

    def __call__(self, n: int, forms: Sequence[DiffForm]) -> DiffForm:
        if len(forms) != len(self.source_degrees):
            raise DimensionMismatch(f"{self.name} takes {len(self.source_degrees)} forms")
        for w, p in zip(forms, self.source_degrees):
            if w.ambient_dim != n or w.grade != p:
                raise DimensionMismatch(f"{self.name}: expected a {p}-form on R^{n}")
        out = self.func(n, forms)
        if out.ambient_dim != n or out.grade != self.target_degree:
            raise DimensionMismatch(
                f"{self.name} produced a {out.grade}-form on R^{out.ambient_dim}, "
                f"expected a {self.target_degree}-form on R^{n}"
            )
        return out

    def __repr__(self):
        return f"NaturalOp({self.name}, {self.signature})"


def induced_op(poly: GradedPoly, degrees: Sequence[int], q: int, name: str | None = None) -> NaturalOp:
    """The operation ``w -> poly(w1, dw1, ..., wk, dwk)`` (degree-q slice)."""
    degrees = tuple(degrees)
    if poly.variables != natural_variables(degrees):
        raise DimensionMismatch("polynomial is not over the natural variables of these degrees")

    def func(n, forms):
        return eval_with_differentials(poly, forms, degree=q, ambient_dim=n)

    return NaturalOp(degrees, q, func, name or poly.render())


def exterior_derivative_op(p: int) -> NaturalOp:
    return NaturalOp((p,), p + 1, lambda n, forms: ext_d(forms[0]), "d")


def wedge_op(p1: int, p2: int) -> NaturalOp:
    return NaturalOp((p1, p2), p1 + p2, lambda n, forms: wedge(forms[0], forms[1]), "wedge")


# -- basis enumeration -------------------------------------------------------


def _factor_choices(p: int, q: int):
    # (a, b) = exponents of (u, v); odd-degree variables appear at most once
    a_max = 1 if p % 2 else q // p
    b_max = 1 if (p + 1) % 2 else q // (p + 1)
    for a in range(a_max + 1):
        for b in range(b_max + 1):
            deg = a * p + b * (p + 1)
            if deg <= q:
                yield a, b, deg


def enumerate_basis(sig: Signature) -> list[GradedMono]:
    """All monomials ``u1^a1 v1^b1 ... uk^ak vk^bk`` of degree exactly q.

    Ordered lexicographically by exponent vector, largest first.
    """
    q = sig.target_degree
    sols: list[tuple[int, ...]] = []

    def rec(i, remaining, acc):
        if i == sig.k:
            if remaining == 0:
                sols.append(tuple(acc))
            return
        for a, b, deg in _factor_choices(sig.source_degrees[i], remaining):
            rec(i + 1, remaining - deg, acc + [a, b])

    rec(0, q, [])
    variables = sig.variables
    sols.sort(reverse=True)
    return [GradedMono(variables, e) for e in sols]


def count_basis(sig: Signature) -> int:
    return len(enumerate_basis(sig))


def records_from_basis(monos: Sequence[GradedMono]) -> list[dict]:
    return [{"exponents": list(m.exponents), "coefficient": "1"} for m in monos]


def records_from_poly(poly: GradedPoly) -> list[dict]:
    return [
        {"exponents": list(e), "coefficient": format_fraction(c)}
        for e, c in poly.sorted_terms()
    ]


def poly_from_records(records: Sequence[dict], degrees: Sequence[int]) -> GradedPoly:
    variables = natural_variables(degrees)
    return GradedPoly(variables, {tuple(r["exponents"]): Fraction(r["coefficient"]) for r in records})


# -- witnesses ---------------------------------------------------------------

CASES = ("ZeroS", "OneS", "SZero", "SOne")


@dataclass(frozen=True)
class FactorWitness:
    """Test-form recipe for one factor: case tag, repeat count, coordinates."""

    case: str
    s: int
    p: int
    block: range

    def __post_init__(self):
        if self.case not in CASES:
            raise ValueError(f"unknown case {self.case}")
        if (self.case in ("ZeroS", "OneS")) != (self.p % 2 == 1):
            raise ValueError(f"case {self.case} is inconsistent with degree {self.p}")
        if len(self.block) != block_size(self.case, self.p, self.s):
            raise ValueError("coordinate block has the wrong size")


def block_size(case: str, p: int, s: int) -> int:
    return {
        "ZeroS": s * (p + 1),
        "OneS": p + s * (p + 1),
        "SZero": s * p,
        "SOne": (p + 1) + s * p,
    }[case]


@dataclass(frozen=True)
class WitnessAssignment:
    factors: tuple[FactorWitness, ...]

    @property
    def expected(self) -> int:
        return prod(factorial(f.s) for f in self.factors)

    def __post_init__(self):
        used = [c for f in self.factors for c in f.block]
        if len(used) != len(set(used)):
            raise ValueError("coordinate blocks overlap")


def _in_basis(sig: Signature, mono: GradedMono) -> bool:
    if mono.variables != sig.variables or mono.degree != sig.target_degree:
        return False
    return all(e <= 1 for v, e in zip(mono.variables, mono.exponents) if v.odd)


def witness_assignment(sig: Signature, mono: GradedMono) -> WitnessAssignment:
    if not _in_basis(sig, mono):
        raise ValueError(f"{mono.render()} is not a basis monomial for {sig}")
    factors = []
    start = 1
    for i, p in enumerate(sig.source_degrees):
        a, b = mono.exponents[2 * i], mono.exponents[2 * i + 1]
        if p % 2:
            case, s = ("OneS" if a else "ZeroS"), b
        else:
            case, s = ("SOne" if b else "SZero"), a
        size = block_size(case, p, s)
        factors.append(FactorWitness(case, s, p, range(start, start + size)))
        start += size
    return WitnessAssignment(tuple(factors))


def _repeated_blocks(n, first, p, s, with_function):
    # sum_j y_j0 dy_j1 ^ ... ^ dy_jp   (or without the y_j0 factor)
    width = p + 1 if with_function else p
    form = DiffForm.zero(n, p)
    for j in range(s):
        base = first + j * width
        if with_function:
            coeff = Poly.var(n, base)
            idx = tuple(range(base + 1, base + 1 + p))
        else:
            coeff = Poly.const(n, 1)
            idx = tuple(range(base, base + p))
        form = form + DiffForm(n, p, {idx: coeff})
    return form


def _factor_form(fw: FactorWitness, n: int) -> DiffForm:
    p, s, first = fw.p, fw.s, fw.block.start
    if fw.case == "ZeroS":
        return _repeated_blocks(n, first, p, s, True)
    if fw.case == "OneS":
        lead = DiffForm.dx(n, *range(first, first + p))
        return lead + _repeated_blocks(n, first + p, p, s, True)
    if fw.case == "SZero":
        return _repeated_blocks(n, first, p, s, False)
    lead = DiffForm(n, p, {tuple(range(first + 1, first + 1 + p)): Poly.var(n, first)})
    return lead + _repeated_blocks(n, first + p + 1, p, s, False)


def witness(sig: Signature, mono: GradedMono, ambient_dim: int | None = None):
    """Test forms isolating ``mono``.

    Returns ``(assignment, forms, expected)`` where the forms live on R^n
    (n defaults to q; larger n pads with unused coordinates) and ``mono``
    evaluated on them is ``expected * dx1 ^ ... ^ dxq``.
    """
    q = sig.target_degree
    n = q if ambient_dim is None else ambient_dim
    if n < q:
        raise ValueError(f"witnesses need at least {q} coordinates")
    assignment = witness_assignment(sig, mono)
    forms = [_factor_form(fw, n) for fw in assignment.factors]
    return assignment, forms, Fraction(assignment.expected)


def _volume_coefficient(result: DiffForm, q: int) -> Poly:
    vol = tuple(range(1, q + 1))
    extra = [idx for idx in result.terms if idx != vol]
    if extra:
        raise NotClassifiedShape(
            "operation is not of classified shape on this witness "
            f"(component dx{extra[0]} present)"
        )
    return result.terms.get(vol, Poly.zero(result.ambient_dim))


def _witness_value(op, sig, mono, ambient_dim):
    _, forms, expected = witness(sig, mono, ambient_dim)
    n = sig.target_degree if ambient_dim is None else ambient_dim
    coeff = _volume_coefficient(op(n, forms), sig.target_degree)
    if not coeff.is_constant():
        raise NotClassifiedShape(
            "operation is not of classified shape on this witness "
            f"(coefficient {coeff.render()} is not constant)"
        )
    return coeff.constant_term(), expected


def evaluate_on_witness(op: NaturalOp, sig: Signature, mono: GradedMono, ambient_dim=None) -> Fraction:
    """Coefficient of ``mono`` read off the witness, normalised by ``s1!...sk!``."""
    value, expected = _witness_value(op, sig, mono, ambient_dim)
    return value / expected


def cross_evaluation_matrix(sig: Signature, ambient_dim=None) -> list[list[Poly]]:
    """``M[i][j]``: volume coefficient of basis monomial j on the witness of monomial i."""
    basis = enumerate_basis(sig)
    q = sig.target_degree
    n = q if ambient_dim is None else ambient_dim
    rows = []
    for wmono in basis:
        _, forms, _ = witness(sig, wmono, n)
        row = []
        for mono in basis:
            val = eval_with_differentials(mono.as_poly(), forms, degree=q, ambient_dim=n)
            row.append(_volume_coefficient(val, q))
        rows.append(row)
    return rows


def _is_diagonal(matrix: list[list[Poly]]) -> bool:
    for i, row in enumerate(matrix):
        for j, entry in enumerate(row):
            if i != j and entry:
                return False
            if i == j and not (entry.is_constant() and entry.constant_term()):
                return False
    return True


# -- decomposition -----------------------------------------------------------


@dataclass
class Decomposition:
    poly: GradedPoly
    basis: list[GradedMono]
    cross_matrix: list[list[Poly]]
    fast_path: bool
    witness_dim: int
    verify_dims: tuple[int, ...]

    def matrix_records(self) -> list[list[str]]:
        return [[e.render() for e in row] for row in self.cross_matrix]


def _solve_general(op, sig, basis, matrix, n):
    q = sig.target_degree
    unknowns = len(basis)
    rows, rhs = [], []
    for wmono, mrow in zip(basis, matrix):
        _, forms, _ = witness(sig, wmono, n)
        target = _volume_coefficient(op(n, forms), q)
        keys = set(target.terms)
        for entry in mrow:
            keys |= set(entry.terms)
        for e in sorted(keys):
            rows.append([entry.terms.get(e, Fraction(0)) for entry in mrow])
            rhs.append(target.terms.get(e, Fraction(0)))
    if not rows:
        return [Fraction(0)] * unknowns
    try:
        return solve(rows, rhs)
    except SingularMatrix as exc:
        raise WitnessNotSeparating(f"witness family not separating: {exc}", matrix) from exc
    except ValueError as exc:
        raise NotNatural("operation is not natural or exceeds classified space") from exc


def decomposition(
    op: NaturalOp,
    sig: Signature | None = None,
    *,
    witness_dim: int | None = None,
    verify_dims: Sequence[int] | None = None,
    trials: int = 3,
    seed: int = 0,
    force_solve: bool = False,
) -> Decomposition:
    """Recover the polynomial of ``op`` and verify it on random forms."""
    sig = sig or op.signature
    q = sig.target_degree
    n = q if witness_dim is None else witness_dim
    verify = tuple(verify_dims) if verify_dims is not None else (q, q + 2)
    basis = enumerate_basis(sig)
    matrix = cross_evaluation_matrix(sig, n)
    fast = _is_diagonal(matrix) and not force_solve
    if fast:
        coeffs = [
            _witness_value(op, sig, m, n)[0] / matrix[i][i].constant_term()
            for i, m in enumerate(basis)
        ]
    else:
        log.info("cross-evaluation matrix for %s not diagonal; solving", sig)
        coeffs = _solve_general(op, sig, basis, matrix, n)
    poly = GradedPoly(sig.variables, {m.exponents: c for m, c in zip(basis, coeffs)})

    for dim in verify:
        for t in range(trials):
            rng = trial_rng(seed, t)
            forms = random_forms(rng, dim, sig.source_degrees)
            lhs = op(dim, forms)
            rhs = eval_with_differentials(poly, forms, degree=q, ambient_dim=dim)
            if lhs != rhs:
                raise NotNatural(
                    "operation is not natural or exceeds classified space "
                    f"(residual on R^{dim}, trial {t}, seed {seed})"
                )
    return Decomposition(poly, basis, matrix, fast, n, verify)


def decompose(op: NaturalOp, sig: Signature | None = None, **kw) -> GradedPoly:
    return decomposition(op, sig, **kw).poly


# -- naturality fuzzing ------------------------------------------------------


@dataclass
class Counterexample:
    trial: int
    kind: str
    tau: SmoothMap
    forms: list[DiffForm]
    lhs: DiffForm
    rhs: DiffForm

    def describe(self) -> str:
        lines = [
            f"trial {self.trial}: {self.kind} map R^{self.tau.source_dim} -> R^{self.tau.target_dim}",
            f"  tau = {self.tau.render()}",
        ]
        for i, w in enumerate(self.forms, 1):
            lines.append(f"  w{i} = {w.render()}")
        lines.append(f"  tau^*(P(w)) = {self.lhs.render()}")
        lines.append(f"  P(tau^*w)   = {self.rhs.render()}")
        return "\n".join(lines)


@dataclass
class Verdict:
    passed: bool
    seed: int
    trials: int
    counterexample: Counterexample | None = None

    def __bool__(self):
        return self.passed

    def describe(self) -> str:
        if self.passed:
            return f"pass ({self.trials} trials, seed {self.seed})"
        return f"FAIL (seed {self.seed})\n{self.counterexample.describe()}"


def _dims_for(kind: str, dims: Sequence[int], rng) -> tuple[int, int]:
    dims = sorted(dims)
    if kind in ("translation", "homothety"):
        n = rng.choice(dims)
        return n, n
    pairs = list(itertools.product(dims, dims))
    if kind == "projection":
        pairs = [(m, n) for m, n in pairs if m > n] or [(m, n) for m, n in pairs if m >= n]
    elif kind == "inclusion":
        pairs = [(m, n) for m, n in pairs if m < n] or [(m, n) for m, n in pairs if m <= n]
    return rng.choice(pairs)


def run_trial(op: NaturalOp, seed: int, trial: int, dims: Sequence[int]) -> Counterexample | None:
    rng = trial_rng(seed, trial)
    kind = MAP_KINDS[trial % len(MAP_KINDS)]
    m, n = _dims_for(kind, dims, rng)
    tau = random_map(rng, m, n, kind)
    forms = random_forms(rng, n, op.source_degrees)
    lhs = pullback(tau, op(n, forms))
    rhs = op(m, [pullback(tau, w) for w in forms])
    if lhs != rhs:
        return Counterexample(trial, kind, tau, forms, lhs, rhs)
    return None


def check_naturality(
    op: NaturalOp,
    sig: Signature | None = None,
    trials: int = 50,
    seed: int = 0,
    dims: Sequence[int] | None = None,
) -> Verdict:
    """Fuzz ``tau^* P(w) == P(tau^* w)`` over random maps and forms.

    Trial ``t`` draws from its own stream derived from ``(seed, t)`` and
    cycles through the map families in :data:`~natforms.sampling.MAP_KINDS`,
    so a verdict is reproducible and independent of trial scheduling.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    sig = sig or op.signature
    if dims is None:
        base = max(sig.target_degree, 1)
        dims = (base, base + 1)
    for t in range(trials):
        cex = run_trial(op, seed, t, dims)
        if cex is not None:
            return Verdict(False, seed, t + 1, cex)
    return Verdict(True, seed, trials)
