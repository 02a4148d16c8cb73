"""
Curvature and Chern-Weil forms
==============================

Matrix-valued connections, their curvature and the closed forms built from it.
"""

import random
from math import factorial

from natforms import DiffForm, ext_d
from natforms.chern_weil import (
    InvariantPoly,
    LieForm,
    chern_form,
    curvature,
    lemados_connection,
    normalize_at_point,
    preset,
)
from natforms.sampling import random_poly

gl2 = preset("gl2")
E12, E21 = [[0, 1], [0, 0]], [[0, 0], [1, 0]]

# A = x1 dy1 E12 + x2 dy2 E21 on R^4 with coordinates (x1, x2, y1, y2)
A = lemados_connection([E12, E21])
F = curvature(A)
for idx, mat in sorted(F.terms.items()):
    print("F", idx, [[c.render() for c in row] for row in mat])

# the dual functional of E12*E21 picks out 2! dx1^dy1^dx2^dy2
picks = [gl2.coords(m).index(1) for m in (E12, E21)]
T = InvariantPoly.dual_monomial(gl2, picks)
print("chern form:", chern_form(T, F).render())
print("expected  :", DiffForm.dx(4, 1, 3, 2, 4, coeff=factorial(2)).render())

# for a random connection tr(F^2) is closed
rng = random.Random(0)
n = 5
comps = [DiffForm(n, 1, {(j,): random_poly(rng, n, 2, 2) for j in range(1, n + 1)}) for _ in range(gl2.dim)]
B = LieForm.from_components(gl2, comps)
form = chern_form(InvariantPoly.trace_power(gl2, 2), curvature(B))
print("tr(F^2) has", len(form.terms), "terms; d of it is zero:", not ext_d(form))

# a gauge transformation kills the connection at any chosen point
res = normalize_at_point(B, [1, 0, -2, 0, 3])
print("normalised value vanishes:", res.is_zero)
