"""Command-line front end.

Exit status: 0 on success, 1 when a verdict fails, 2 on usage or parse errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from .chern_weil import (
    InvariantPoly,
    LieForm,
    chern_form,
    curvature,
    lemados_connection,
    load_algebra,
)
from .classify import (
    NotClassifiedShape,
    NotNatural,
    Signature,
    WitnessNotSeparating,
    decomposition,
    enumerate_basis,
    check_naturality,
    evaluate_on_witness,
    induced_op,
    records_from_basis,
    records_from_poly,
    witness,
)
from .expr import BindError, ParseError, bind
from .forms import DiffForm, DimensionMismatch, ext_d
from .graded import GradedMono
from .poly import format_fraction
from .sampling import random_poly, trial_rng

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _degrees(text: str) -> tuple[int, ...]:
    try:
        out = tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not out or any(p < 1 for p in out):
        raise argparse.ArgumentTypeError("degrees must be positive integers")
    return out


def _signature(args) -> Signature:
    return Signature(args.degrees, args.target)


def _dump(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


def cmd_basis(args) -> int:
    sig = _signature(args)
    basis = enumerate_basis(sig)
    if args.json:
        _dump({
            "degrees": list(sig.source_degrees),
            "target": sig.target_degree,
            "variables": [v.name for v in sig.variables],
            "basis": records_from_basis(basis),
        })
        return EXIT_OK
    if not basis:
        print("(empty)")
    for m in basis:
        print(m.render())
    return EXIT_OK


def cmd_witness(args) -> int:
    sig = _signature(args)
    try:
        mono = GradedMono.parse(args.monomial, sig.variables)
    except (ValueError, KeyError) as exc:
        raise UsageError(exc.args[0] if exc.args else str(exc))
    if mono.degree != sig.target_degree:
        raise UsageError(f"{mono.render()} has degree {mono.degree}, not {sig.target_degree}")
    assignment, forms, expected = witness(sig, mono)
    n = forms[0].ambient_dim if forms else sig.target_degree
    print(f"signature {sig}, monomial {mono.render()}, on R^{n}")
    for fw in assignment.factors:
        print(f"  factor {fw.case}: s={fw.s} p={fw.p} block={fw.block}")
    for i, w in enumerate(forms, 1):
        print(f"w{i} = {w.render()}")
    print(f"expected factor = {format_fraction(expected)}")
    op = induced_op(mono.as_poly(), sig.source_degrees, sig.target_degree)
    print(f"{mono.render()}(witness) = {op(n, forms).render()}")
    value = evaluate_on_witness(op, sig, mono)
    print(f"normalised coefficient = {format_fraction(value)}")
    return EXIT_OK if value == 1 else EXIT_FAIL


def cmd_decompose(args) -> int:
    sig = _signature(args)
    op = bind(args.expr, sig)
    try:
        dec = decomposition(op, sig, seed=args.seed)
    except (NotNatural, NotClassifiedShape, WitnessNotSeparating) as exc:
        print(f"not decomposable: {exc}")
        return EXIT_FAIL
    if args.json:
        _dump({
            "degrees": list(sig.source_degrees),
            "target": sig.target_degree,
            "expr": op.name,
            "poly": records_from_poly(dec.poly),
            "cross_evaluation": dec.matrix_records(),
            "diagonal": dec.fast_path,
        })
    else:
        print(dec.poly.render())
    return EXIT_OK


def cmd_check_natural(args) -> int:
    sig = _signature(args)
    op = bind(args.expr, sig)
    verdict = check_naturality(op, sig, trials=args.trials, seed=args.seed)
    print(f"expr {op.name}  signature {sig}  seed {args.seed}")
    print(verdict.describe())
    return EXIT_OK if verdict.passed else EXIT_FAIL


def _random_connection(rng, n, alg) -> LieForm:
    comps = []
    for _ in range(alg.dim):
        terms = {(j,): random_poly(rng, n, 2, 2) for j in range(1, n + 1)}
        comps.append(DiffForm(n, 1, terms))
    return LieForm.from_components(alg, comps)


def cmd_chern(args) -> int:
    alg = load_algebra(args.algebra)
    q = args.q
    if q < 1:
        raise UsageError("--q must be positive")
    print(f"algebra {alg.name} (dim {alg.dim}, {alg.matrix_size}x{alg.matrix_size} matrices), q = {q}")
    if args.demo == "lemados":
        if alg.dim < q:
            raise UsageError(f"{alg.name} has only {alg.dim} basis vectors; need {q}")
        vectors = alg.basis[:q]
        a = lemados_connection(vectors)
        theta = curvature(a)
        T = InvariantPoly.dual_monomial(alg, range(q))
        print("coordinates (" + ", ".join([f"x{i}" for i in range(1, q + 1)] + [f"y{i}" for i in range(1, q + 1)]) + ")")
        print(f"connection A = sum_i x_i dy_i (x) b_i,  i = 1..{q}")
        print(f"invariant functional: dual of b1*...*b{q}")
        got = chern_form(T, theta)
        # dx1^dy1^...^dxq^dyq in the ambient ordering (x1..xq, y1..yq)
        interleaved = [j for i in range(1, q + 1) for j in (i, q + i)]
        want = DiffForm.dx(2 * q, *interleaved, coeff=math.factorial(q))
        print(f"chern form    = {got.render()}")
        print(f"q! dx1^dy1^.. = {want.render()}")
        ok = got == want
    else:
        n = args.dim or 2 * q + 1
        rng = trial_rng(args.seed, 0)
        a = _random_connection(rng, n, alg)
        T = InvariantPoly.trace_power(alg, q)
        got = chern_form(T, curvature(a))
        print(f"random connection on R^{n}, seed {args.seed}")
        print(f"invariant functional: symmetrised tr(X^{q})")
        terms = len(got.terms)
        print(f"chern form has {terms} term(s), max coefficient degree {got.max_coeff_degree()}")
        dgot = ext_d(got)
        print(f"d(chern form) = {dgot.render()}")
        ok = not dgot
    print("verdict: " + ("pass" if ok else "FAIL"))
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="natforms",
        description="Natural operations on differential forms: enumeration, witnesses, "
        "decomposition, naturality fuzzing and Chern-Weil checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def with_sig(p):
        p.add_argument("--degrees", type=_degrees, required=True, help="input form degrees, e.g. 1,1")
        p.add_argument("--target", type=int, required=True, help="output form degree")
        return p

    p = with_sig(sub.add_parser("basis", help="list the basis monomials"))
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_basis)

    p = with_sig(sub.add_parser("witness", help="show the witness forms of a monomial"))
    p.add_argument("--monomial", required=True, help="e.g. u1^2*v1")
    p.set_defaults(func=cmd_witness)

    p = with_sig(sub.add_parser("decompose", help="recover the polynomial of an expression"))
    p.add_argument("--expr", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_decompose)

    p = with_sig(sub.add_parser("check-natural", help="fuzz an expression for naturality"))
    p.add_argument("--expr", required=True)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_check_natural)

    p = sub.add_parser("chern", help="Chern-Weil demonstrations")
    p.add_argument("--algebra", default="gl2", help="preset name or JSON descriptor path")
    p.add_argument("--q", type=int, default=1)
    p.add_argument("--demo", choices=("lemados", "closed"), default="lemados")
    p.add_argument("--dim", type=int, default=None, help="ambient dimension for 'closed'")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_chern)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ParseError, BindError, UsageError, DimensionMismatch) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (KeyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
