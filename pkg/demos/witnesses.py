"""
Witness forms
=============

Each basis monomial has a polynomial witness on which it alone survives.
"""

from math import prod

from natforms.classify import Signature, cross_evaluation_matrix, enumerate_basis, witness
from natforms.forms import volume_form
from natforms.graded import eval_with_differentials

sig = Signature([2], 7)
(mono,) = enumerate_basis(sig)
assignment, forms, expected = witness(sig, mono)
print(sig, "basis:", mono.render())
for fw in assignment.factors:
    print(f"  {fw.case:5s} s={fw.s} block={list(fw.block)}")
print("w1 =", forms[0].render())

# u1^2 v1 on the witness gives 2! times the volume form
value = eval_with_differentials(mono.as_poly(), forms, degree=7, ambient_dim=7)
print("u1^2*v1 (witness) =", value.render())
print("equals 2 * volume:", value == volume_form(7).scale(expected))

# across a richer signature the cross evaluations form a diagonal matrix
sig = Signature([1, 2], 5)
basis = enumerate_basis(sig)
matrix = cross_evaluation_matrix(sig)
print()
print(sig, [m.render() for m in basis])
for m, row in zip(basis, matrix):
    print(f"  {m.render():10s}", [e.render() for e in row])

diag = [row[i].constant_term() for i, row in enumerate(matrix)]
print("product of diagonal:", prod(diag))
