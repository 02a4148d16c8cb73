import random
from fractions import Fraction
from itertools import permutations
from math import factorial

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from natforms.forms import DiffForm, ext_d, wedge
from natforms.poly import Poly
from natforms.sampling import random_form, random_poly
from natforms.tensors import (
    CovTensor,
    NotAntisymmetric,
    embed_form,
    nabla,
    permutation_sign,
    project_form,
    skew,
    tensor_product,
)

import oracle
from strategies import forms, polys


def x(n, i):
    return Poly.var(n, i)


def basis(n, *idx, coeff=1):
    return CovTensor.basis(n, *idx, coeff=coeff)


@st.composite
def tensors(draw, n, r, max_terms=3):
    idx = st.tuples(*[st.integers(1, n)] * r)
    keys = draw(st.lists(idx, max_size=max_terms, unique=True))
    return CovTensor(n, r, {k: draw(polys(n, 2, 2)) for k in keys})


def test_permutation_sign():
    assert permutation_sign((0, 1, 2)) == 1
    assert permutation_sign((1, 0, 2)) == -1
    assert permutation_sign((1, 2, 0)) == 1


def test_tensor_product_examples():
    assert tensor_product(basis(2, 1), basis(2, 2)) == basis(2, 1, 2)
    t = CovTensor(2, 2, {(1, 2): x(2, 1), (2, 2): 3})
    assert tensor_product(CovTensor.scalar(Poly.const(2, 2)), t) == t.scale(2)
    a = CovTensor(2, 1, {(1,): x(2, 1)})
    assert tensor_product(a, basis(2, 1)).terms == {(1, 1): x(2, 1)}


def test_render():
    assert CovTensor(2, 2, {(1, 2): x(2, 1)}).render() == "(1,2) ↦ x1"


def test_skew_examples():
    assert skew(basis(2, 1, 2)) == basis(2, 1, 2) - basis(2, 2, 1)
    assert not skew(basis(2, 1, 1))
    w = DiffForm.dx(2, 1, 2)
    assert skew(embed_form(w)) == embed_form(w).scale(2)


def test_embed_and_project():
    assert embed_form(DiffForm.dx(2, 1, 2)) == basis(2, 1, 2) - basis(2, 2, 1)
    assert project_form(basis(2, 1, 2) - basis(2, 2, 1)) == DiffForm.dx(2, 1, 2)
    with pytest.raises(NotAntisymmetric):
        project_form(basis(2, 1, 2))


def test_nabla_examples():
    w = DiffForm(2, 1, {(1,): x(2, 2)})
    assert nabla(w) == basis(2, 2, 1)
    assert project_form(skew(nabla(w))) == DiffForm.dx(2, 2, 1)
    assert project_form(skew(nabla(w))) == ext_d(w)
    f = CovTensor.scalar(x(2, 1) * x(2, 2))
    assert nabla(f, 2) == basis(2, 1, 2) + basis(2, 2, 1)
    assert nabla(w, 0) == embed_form(w)


def test_nabla_matches_sympy_derivatives():
    rng = random.Random(3)
    for _ in range(10):
        n = rng.randint(1, 3)
        f = random_poly(rng, n, 3, 4)
        fx = oracle.poly_to_sympy(f)
        xs = oracle.xs(n)
        t = nabla(CovTensor.scalar(f), 2)
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                got = t.terms.get((i, j), Poly.zero(n))
                assert sp.expand(oracle.poly_to_sympy(got) - sp.diff(fx, xs[j - 1], xs[i - 1])) == 0


def _skew_oracle(t):
    # literal definition: sum over sigma of sgn(sigma) * (slots permuted)
    out = {}
    for perm in permutations(range(t.order)):
        sign = oracle.parity(perm)
        for idx, c in t.terms.items():
            key = tuple(idx[perm.index(k)] for k in range(t.order))
            out[key] = out.get(key, 0) + sign * oracle.poly_to_sympy(c)
    return oracle.clean(out)


def test_skew_matches_definition():
    rng = random.Random(4)
    for _ in range(15):
        n, r = rng.randint(1, 3), rng.randint(0, 3)
        keys = {tuple(rng.randint(1, n) for _ in range(r)) for _ in range(3)}
        t = CovTensor(n, r, {k: random_poly(rng, n) for k in keys})
        got = {k: oracle.poly_to_sympy(v) for k, v in skew(t).terms.items()}
        assert oracle.clean(got) == _skew_oracle(t)


# -- skew-symmetrisation identities ----------------------------------------------


@settings(max_examples=60)
@given(st.data())
def test_skew_of_product_is_wedge_of_skews(data):
    n = data.draw(st.integers(1, 3))
    r1, r2 = data.draw(st.integers(0, 2)), data.draw(st.integers(0, 2))
    t1, t2 = data.draw(tensors(n, r1)), data.draw(tensors(n, r2))
    lhs = project_form(skew(tensor_product(t1, t2)))
    assert lhs == wedge(project_form(skew(t1)), project_form(skew(t2)))


@given(st.data())
def test_skew_of_a_form_is_q_factorial_times_it(data):
    n = data.draw(st.integers(1, 4))
    q = data.draw(st.integers(0, min(n, 3)))
    w = data.draw(forms(n, q))
    assert skew(embed_form(w)) == embed_form(w).scale(factorial(q))
    assert project_form(embed_form(w)) == w


@given(st.data())
def test_skew_is_r_factorial_times_idempotent(data):
    n, r = data.draw(st.integers(1, 3)), data.draw(st.integers(0, 3))
    t = data.draw(tensors(n, r))
    assert skew(skew(t)) == skew(t).scale(factorial(r))


@given(st.data())
def test_nabla_is_linear(data):
    n, r = data.draw(st.integers(1, 3)), data.draw(st.integers(0, 2))
    a, b = data.draw(tensors(n, r)), data.draw(tensors(n, r))
    c = data.draw(st.integers(-3, 3))
    assert nabla(a + b.scale(c)) == nabla(a) + nabla(b).scale(c)


def measured_constant(w):
    """The rational c with h(nabla w) = c * d w, or None if none exists."""
    lhs = project_form(skew(nabla(w)))
    rhs = ext_d(w)
    if not rhs:
        return None if lhs else 0
    idx, coeff = next(iter(rhs.terms.items()))
    lead = next(iter(coeff.terms))
    c = lhs.coefficient(idx).terms.get(lead, Fraction(0)) / coeff.terms[lead]
    return c if lhs == rhs.scale(c) else None


@pytest.mark.parametrize("q", [1, 2, 3])
def test_skew_nabla_constant_is_q_factorial_and_form_independent(q):
    rng = random.Random(100 + q)
    seen = set()
    for _ in range(15):
        w = random_form(rng, 4, q, max_terms=3)
        c = measured_constant(w)
        assert c is not None
        if ext_d(w):
            seen.add(c)
    assert seen == {factorial(q)}


@pytest.mark.parametrize("s", [0, 1, 2, 3])
def test_taylor_component_is_contracted_jet_over_s_factorial(s):
    # (nabla^s w)(0) contracted with x^{(x) s} equals s! times the degree-s Taylor part
    rng = random.Random(7 + s)
    n = 2
    w = random_form(rng, n, 1, max_degree=3, poly_terms=4)
    jet = nabla(w, s).evaluate([0] * n)
    xs = [x(n, i) for i in range(1, n + 1)]
    acc = {}
    for idx, c in jet.terms.items():
        mono = Poly.const(n, c.constant_term())
        for j in idx[:s]:
            mono = mono * xs[j - 1]
        key = idx[s:]
        acc[key] = acc.get(key, Poly.zero(n)) + mono
    from natforms.forms import taylor_components

    part = taylor_components(w, s)[s]
    got = DiffForm(n, 1, acc)
    assert got == part.scale(factorial(s))
