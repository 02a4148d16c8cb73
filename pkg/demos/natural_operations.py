"""
Which operations on forms commute with every pullback?
======================================================

A walk through enumeration, decomposition and the naturality fuzzer.
"""

from natforms import DiffForm, Poly, SmoothMap, ext_d, pullback
from natforms.classify import Signature, check_naturality, decompose, enumerate_basis
from natforms.expr import bind

# a 1-form on the plane and its differential
n = 2
w = DiffForm(n, 1, {(1,): Poly.var(n, 2) * Poly.var(n, 2), (2,): Poly.var(n, 1)})
print("w  =", w.render())
print("dw =", ext_d(w).render())

# pulling back along a linear map commutes with d
tau = SmoothMap.linear([[1, 2], [0, 3]])
print("tau^* dw == d tau^* w:", pullback(tau, ext_d(w)) == ext_d(pullback(tau, w)))

# natural operations on one 1-form, by target degree; degree 2 is spanned by d
for q in range(5):
    sig = Signature([1], q)
    print(sig, "->", [m.render() for m in enumerate_basis(sig)])

# two 1-forms into 2-forms leave three choices
print(Signature([1, 1], 2), "->", [m.render() for m in enumerate_basis(Signature([1, 1], 2))])

# any natural expression decomposes in that basis
op = bind("2 * w1 ^ w2 - d(w1) + d(w2)", Signature([1, 1], 2))
print(op.name, "=", decompose(op).render())

# w ^ w vanishes for odd w, so the result is plain zero
print("w1 ^ w1 =", decompose(bind("w1 ^ w1", Signature([1], 2))).render())

# a coordinate factor spoils naturality; translations expose it
verdict = check_naturality(bind("x1 * d(w1)", Signature([1], 2)), trials=20, seed=0)
print(verdict.describe())

# sanity: the counterexample really is one
cex = verdict.counterexample
print("sides differ:", cex.lhs != cex.rhs)
