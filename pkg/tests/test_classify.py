import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from natforms.classify import (
    NaturalOp,
    NotClassifiedShape,
    NotNatural,
    Signature,
    WitnessNotSeparating,
    FactorWitness,
    check_naturality,
    count_basis,
    cross_evaluation_matrix,
    decompose,
    decomposition,
    enumerate_basis,
    evaluate_on_witness,
    exterior_derivative_op,
    induced_op,
    poly_from_records,
    records_from_poly,
    run_trial,
    wedge_op,
    witness,
)
from natforms.forms import DiffForm, SmoothMap, ext_d, pullback, volume_form, wedge
from natforms.graded import GradedMono, GradedPoly
from natforms.poly import Poly
from natforms.sampling import MAP_KINDS, random_forms

import oracle


def names(basis):
    return [m.render() for m in basis]


# -- enumeration -------------------------------------------------------------


@pytest.mark.parametrize(
    "degrees, q, want",
    [
        ([1], 2, ["v1"]),
        ([1, 1], 2, ["u1*u2", "v1", "v2"]),
        ([2], 7, ["u1^2*v1"]),
        ([2], 1, []),
        ([1], 0, ["1"]),
    ],
)
def test_enumerate_examples(degrees, q, want):
    assert names(enumerate_basis(Signature(degrees, q))) == want


def test_count_basis():
    assert [count_basis(Signature([1], q)) for q in range(8)] == [1] * 8
    assert count_basis(Signature([1, 1], 2)) == 3
    assert count_basis(Signature([2], 1)) == 0


def test_signature_validation():
    with pytest.raises(ValueError):
        Signature([0], 1)
    with pytest.raises(ValueError):
        Signature([1], -1)
    assert str(Signature([1, 1], 2)) == "p=[1,1] q=2"


@pytest.mark.parametrize("degrees", [[1], [2], [3], [1, 1], [1, 2], [2, 3], [3, 3], [1, 2, 3]])
@pytest.mark.parametrize("q", range(0, 8))
def test_enumeration_matches_brute_force(degrees, q):
    basis = enumerate_basis(Signature(degrees, q))
    assert [m.exponents for m in basis] == oracle.brute_force_basis(degrees, q)
    assert all(m.degree == q for m in basis)


def test_records_round_trip():
    sig = Signature([1, 2], 5)
    basis = enumerate_basis(sig)
    p = GradedPoly(sig.variables, {m.exponents: Fraction(i + 1, 3) for i, m in enumerate(basis)})
    recs = records_from_poly(p)
    assert all(isinstance(r["coefficient"], str) for r in recs)
    assert poly_from_records(recs, [1, 2]) == p


# -- witnesses ---------------------------------------------------------------


def test_witness_for_dw():
    sig = Signature([1], 2)
    (mono,) = enumerate_basis(sig)
    assignment, forms, expected = witness(sig, mono)
    assert [f.case for f in assignment.factors] == ["ZeroS"]
    assert forms == [DiffForm(2, 1, {(2,): Poly.var(2, 1)})]
    assert expected == 1
    assert ext_d(forms[0]) == volume_form(2)


def test_witness_for_product_of_one_forms():
    sig = Signature([1, 1], 2)
    mono = GradedMono.parse("u1*u2", sig.variables)
    assignment, forms, expected = witness(sig, mono)
    assert [(f.case, f.s) for f in assignment.factors] == [("OneS", 0), ("OneS", 0)]
    assert forms == [DiffForm.dx(2, 1), DiffForm.dx(2, 2)]
    assert expected == 1


def test_witness_u1_squared_v1():
    sig = Signature([2], 7)
    (mono,) = enumerate_basis(sig)
    assignment, (w,), expected = witness(sig, mono)
    assert assignment.factors[0].case == "SOne" and assignment.factors[0].s == 2
    assert w.render() == "x1 dx2^dx3 + dx4^dx5 + dx6^dx7"
    assert expected == 2
    got = wedge(wedge(w, w), ext_d(w))
    assert got == volume_form(7).scale(2)
    ow = oracle.form_to_sympy(w)
    assert oracle.wedge(oracle.wedge(ow, ow), oracle.d(ow, 7)) == {tuple(range(1, 8)): 2}


def test_witness_rejects_non_basis():
    sig = Signature([1], 2)
    with pytest.raises(ValueError):
        witness(sig, GradedMono.parse("u1", sig.variables))


def test_factor_witness_validation():
    with pytest.raises(ValueError):
        FactorWitness("ZeroS", 1, 2, range(1, 3))
    with pytest.raises(ValueError):
        FactorWitness("ZeroS", 1, 1, range(1, 4))


def test_evaluate_on_witness_examples():
    sig = Signature([1], 2)
    (v1,) = enumerate_basis(sig)
    assert evaluate_on_witness(exterior_derivative_op(1), sig, v1) == 1
    triple = NaturalOp((1,), 2, lambda n, f: ext_d(f[0]).scale(3), "3d")
    assert evaluate_on_witness(triple, sig, v1) == 3
    sig2 = Signature([1, 1], 2)
    v1_2 = GradedMono.parse("v1", sig2.variables)
    assert evaluate_on_witness(wedge_op(1, 1), sig2, v1_2) == 0


def test_evaluate_on_witness_rejects_odd_shapes():
    sig = Signature([1], 2)
    (v1,) = enumerate_basis(sig)
    bad = NaturalOp(
        (1,), 2, lambda n, f: ext_d(f[0]).scale(Poly.var(n, 1) + 1) if n else ext_d(f[0]), "bad"
    )
    with pytest.raises(NotClassifiedShape):
        evaluate_on_witness(bad, sig, v1)


@pytest.mark.parametrize("degrees", [[1], [2], [3], [1, 1], [1, 2], [2, 2], [2, 3], [3, 3]])
@pytest.mark.parametrize("q", range(0, 7))
def test_cross_evaluation_is_factorial_diagonal(degrees, q):
    sig = Signature(degrees, q)
    basis = enumerate_basis(sig)
    matrix = cross_evaluation_matrix(sig)
    for i, m in enumerate(basis):
        expected = witness(sig, m)[2]
        for j in range(len(basis)):
            want = expected if i == j else 0
            assert matrix[i][j] == Poly.const(q, want)


# -- decomposition -----------------------------------------------------------


def test_decompose_examples():
    assert decompose(exterior_derivative_op(1)).render() == "v1"
    assert decompose(wedge_op(1, 1)).render() == "u1*u2"
    op = NaturalOp((1,), 2, lambda n, f: ext_d(f[0]).scale(2) + wedge(f[0], f[0]), "2dw + w^w")
    assert decompose(op).render() == "2*v1"


def test_decompose_zero_form_valued():
    op = NaturalOp((1,), 0, lambda n, f: DiffForm.constant(n, Fraction(5, 2)), "const")
    assert decompose(op).render() == "5/2"


def test_forced_linear_solve_agrees_with_fast_path():
    sig = Signature([1, 2], 5)
    basis = enumerate_basis(sig)
    p = GradedPoly(sig.variables, {m.exponents: i - 1 for i, m in enumerate(basis)})
    op = induced_op(p, [1, 2], 5)
    fast = decomposition(op)
    slow = decomposition(op, force_solve=True)
    assert fast.fast_path and not slow.fast_path
    assert fast.poly == slow.poly == p


def test_decompose_rejects_non_natural():
    op = NaturalOp((1,), 2, lambda n, f: ext_d(f[0]).scale(Poly.var(n, 1)) if n else ext_d(f[0]), "x1 dw")
    with pytest.raises((NotNatural, NotClassifiedShape)):
        decompose(op)


def test_decompose_detects_residual():
    # agrees with d on the witness but not elsewhere
    def func(n, forms):
        w = forms[0]
        return ext_d(w) + (wedge(DiffForm.dx(n, 1), DiffForm.dx(n, 3)) if n >= 4 else DiffForm.zero(n, 2))

    with pytest.raises(NotNatural):
        decompose(NaturalOp((1,), 2, func, "patched"))


def test_witness_not_separating_carries_matrix():
    exc = WitnessNotSeparating("boom", [[1]])
    assert exc.matrix == [[1]]


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_round_trip_uniqueness(data):
    degrees = data.draw(st.lists(st.integers(1, 3), min_size=1, max_size=2))
    q = data.draw(st.integers(0, 6))
    sig = Signature(degrees, q)
    basis = enumerate_basis(sig)
    coeffs = [data.draw(st.integers(-3, 3)) for _ in basis]
    p = GradedPoly(sig.variables, {m.exponents: c for m, c in zip(basis, coeffs)})
    assert decompose(induced_op(p, degrees, q)) == p


# -- naturality fuzzing ------------------------------------------------------


def test_natural_ops_pass():
    assert check_naturality(exterior_derivative_op(1), trials=21, seed=1).passed
    assert check_naturality(wedge_op(1, 1), trials=21, seed=1).passed
    assert check_naturality(exterior_derivative_op(2), trials=14, seed=3).passed


def test_coordinate_multiple_fails_under_translation():
    op = NaturalOp((1,), 2, lambda n, f: ext_d(f[0]).scale(Poly.var(n, 1)) if n else ext_d(f[0]), "x1 dw")
    verdict = check_naturality(op, trials=50, seed=7)
    assert not verdict.passed
    cex = verdict.counterexample
    assert cex.kind == "translation"
    assert pullback(cex.tau, op(cex.tau.target_dim, cex.forms)) == cex.lhs
    assert cex.lhs != cex.rhs
    assert "seed 7" in verdict.describe()


def test_trials_are_reproducible_and_cycle_families():
    op = exterior_derivative_op(1)
    for t in range(len(MAP_KINDS)):
        assert run_trial(op, 4, t, (2, 3)) is None
    bad = NaturalOp((1,), 2, lambda n, f: ext_d(f[0]).scale(Poly.var(n, 1)) if n else ext_d(f[0]), "x1 dw")
    a = check_naturality(bad, trials=5, seed=9)
    b = check_naturality(bad, trials=5, seed=9)
    assert a.counterexample.tau == b.counterexample.tau
    assert a.counterexample.forms == b.counterexample.forms
    assert a.counterexample.kind == MAP_KINDS[a.counterexample.trial % len(MAP_KINDS)]


def test_homothety_homogeneity():
    sig = Signature([1, 2], 5)
    basis = enumerate_basis(sig)
    p = GradedPoly(sig.variables, {m.exponents: 1 for m in basis})
    op = induced_op(p, [1, 2], 5)
    rng = random.Random(0)
    for lam in (2, Fraction(-1, 3)):
        tau = SmoothMap.homothety(5, lam)
        ws = random_forms(rng, 5, [1, 2])
        assert pullback(tau, op(5, ws)) == op(5, [pullback(tau, w) for w in ws])


def test_check_naturality_needs_trials():
    with pytest.raises(ValueError):
        check_naturality(exterior_derivative_op(1), trials=0)
