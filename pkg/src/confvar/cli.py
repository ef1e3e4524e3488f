"""Command-line entry point.

Exit codes: 0 when everything requested succeeded or passed, 1 when a
check failed, 2 on invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys

import sympy as sp

from . import gaussian, jets, sandbox, suites, transform, vertex, virasoro
from .errors import ConfVarError, UsageError

# options whose values may start with "-" (mode lists, ranges)
VALUE_OPTIONS = {"--modes", "--word", "--window", "--u", "--v", "--w", "--mode", "--n",
                 "--p", "--q", "--r", "--level", "--order"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _int_list(text: str) -> tuple:
    text = text.strip()
    if text in ("", "()"):
        return ()
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _range(text: str) -> tuple:
    if ".." not in text:
        raise UsageError(f"expected a range lo..hi, got {text!r}")
    lo, hi = text.split("..", 1)
    try:
        lo, hi = int(lo), int(hi)
    except ValueError:
        raise UsageError(f"expected integers in {text!r}") from None
    if lo > hi:
        raise UsageError(f"empty range {text!r}")
    return lo, hi


def _join_values(argv):
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in VALUE_OPTIONS and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


# -- emitters ---------------------------------------------------------------

def _emit(fmt, text_lines, payload, sexp):
    if fmt == "json":
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if fmt == "sexp":
        return sexp + "\n"
    return "".join(line + "\n" for line in text_lines)


def _vector_payload(v):
    return {virasoro.word_sexp(w): str(a) for w, a in sorted(v.items())}


def cmd_basis(args):
    words = virasoro.basis(args.level)
    lines = [virasoro.word_sexp(w) for w in words]
    sexp = f"(basis (level {args.level})" + "".join(f" {s}" for s in lines) + ")"
    return _emit(args.format, lines, {"level": args.level, "basis": lines}, sexp), 0


def _vector_arg(args):
    if args.vector:
        return virasoro.vector_from_sexp(args.vector)
    return virasoro.word_vector(_int_list(args.word))


def cmd_act(args):
    v = _vector_arg(args)
    out = v
    for n in reversed(_int_list(args.mode)):
        out = virasoro.act(n, out)
    return _emit(args.format, [str(out)], _vector_payload(out), out.to_sexp()), 0


def cmd_y_coeff(args):
    u = virasoro.word_vector(_int_list(args.v))
    w = virasoro.word_vector(_int_list(args.w))
    n = int(args.n)
    res = vertex.apply_mode(u, n, w)
    payload = {"v": str(u), "n": n, "w": str(w), "result": _vector_payload(res)}
    return _emit(args.format, [str(res)], payload, vertex.mode_trace(u, n, w)), 0


def cmd_jacobi(args):
    u, v, w = (virasoro.word_vector(_int_list(x)) for x in (args.u, args.v, args.w))
    p, q, r = int(args.p), int(args.q), int(args.r)
    lhs, rhs = vertex.borcherds_sides(u, v, w, p, q, r)
    ok = lhs == rhs
    lines = [f"lhs : {lhs}", f"rhs : {rhs}", "pass" if ok else "fail"]
    payload = {"lhs": _vector_payload(lhs), "rhs": _vector_payload(rhs),
               "status": "pass" if ok else "fail"}
    sexp = f"(jacobi (p {p}) (q {q}) (r {r}) (lhs {lhs.to_sexp()}) (rhs {rhs.to_sexp()}) " \
           f"(status {'pass' if ok else 'fail'}))"
    return _emit(args.format, lines, payload, sexp), 0 if ok else 1


def cmd_two_point(args):
    order = int(args.order)
    got = vertex.vacuum_two_point(order)
    ok = vertex.two_point_check(order)
    rows = sorted(got.items())
    lines = [f"x1^{a} x2^{b} : {c}" for (a, b), c in rows]
    lines.append("pass" if ok else "fail")
    payload = {"order": order, "coefficients": {f"{a},{b}": str(c) for (a, b), c in rows},
               "status": "pass" if ok else "fail"}
    return _emit(args.format, lines, payload, got.to_sexp()), 0 if ok else 1


def _identity_value(expr):
    subs = {transform.one_point_sym(1): 1}
    for r in range(2, 40):
        subs[transform.one_point_sym(r)] = 0
    return sp.cancel(sp.sympify(expr).xreplace(subs))


def cmd_transform_law(args):
    modes = _int_list(args.modes)
    if not modes:
        raise UsageError("--modes needs at least one mode")
    if any(m > -2 for m in modes):
        raise UsageError("modes must be <= -2")
    points = args.points
    if points == 1:
        law = transform.coincident_specialize(tuple(sorted(modes)))
        entries = []
        for word, expr in law.items():
            label = "(" + " ".join(map(str, word)) + ")"
            if args.identity:
                val = _identity_value(expr)
                if val == 0:
                    continue
                entries.append((label, transform.render(val), val))
            else:
                entries.append((label, transform.render(expr), expr))
        lines = [f"{label} : {text}" for label, text, _ in entries]
        payload = [{"word": label, "coefficient": text} for label, text, _ in entries]
        sexp = "(law" + "".join(
            f" (entry {label} {transform.RationalExpr(e).to_sexp()})" for label, _, e in entries) + ")"
        return _emit(args.format, lines, payload, sexp), 0
    if points != len(modes) or any(m != -2 for m in modes):
        raise UsageError("--points must be 1, or equal the number of modes with all modes -2")
    if points > 2:
        raise UsageError("family listings are printed in cancelled form for at most 2 points")
    fam = transform.build_family(points)
    lines, payload, sexp = [], [], "(family"
    for S in sorted(fam, key=lambda s: (len(s), s), reverse=True):
        for key, coeff in sorted(fam[S].items()):
            part = "".join(f" d{j}^{e}" for j, e in key) or " 1"
            text = str(sp.factor(coeff)).replace("**", "^")
            label = "{" + ",".join(map(str, S)) + "}"
            lines.append(f"{label}{part} : {text}")
            payload.append({"S": list(S), "partials": [list(p) for p in key], "coefficient": text})
            sexp += f" (op ({' '.join(map(str, S))}) ({part.strip()}) {transform.RationalExpr(coeff).to_sexp()})"
    return _emit(args.format, lines, payload, sexp + ")"), 0


def cmd_faadibruno(args):
    n, k = int(args.n), int(args.k)
    rows = jets.faadibruno_table(n, k)
    lines = [f"{' '.join(map(str, t))} : coeff {c} weight {w}" for t, c, w in rows]
    code = 0
    ok = None
    if args.check:
        hs = [jets.symbolic_jet(j, n + k - 1) for j in range(1, k + 1)]
        ok = jets.higher_derivative_closed_form(n, hs) == jets.higher_derivative_oracle(n, hs)
        lines.append("pass" if ok else "fail")
        code = 0 if ok else 1
    payload = {"n": n, "k": k, "rows": [{"tuple": list(t), "coeff": c, "weight": str(w)}
                                        for t, c, w in rows]}
    if ok is not None:
        payload["status"] = "pass" if ok else "fail"
    return _emit(args.format, lines, payload, jets.faadibruno_sexp(n, k)), code


def cmd_gaussian(args):
    if args.derived is not None:
        lo, hi = _range(args.window)
        reps = gaussian.check_derived_gaussian(args.derived, (lo, hi))
        ok = all(r["status"] == "pass" for r in reps)
        lines = [f"{r['status']} {r['proposition']} {tuple(r['pair'])} : {r['lhs']}" for r in reps]
        sexp = "(derived" + "".join(
            f" ({r['status']} {r['pair'][0]} {r['pair'][1]})" for r in reps) + ")"
        return _emit(args.format, lines, reps, sexp), 0 if ok else 1
    word = _int_list(args.word)
    if not word:
        raise UsageError("--word or --derived is required")
    ev = gaussian.reduce_word(word, strategy=args.strategy, seed=args.seed,
                              translation_stationary=args.stationary)
    payload = {"word": list(word), "value": str(ev), "kind": ev.kind}
    return _emit(args.format, [str(ev)], payload, ev.to_sexp()), 0


def cmd_sandbox(args):
    reps = sandbox.regression_matrix(args.seed, tol=args.tol)
    ok = all(r["status"] == "pass" for r in reps)
    lines = [f"{r['status']} {r['functional']} k={r['k']} rel={r['rel_error']:.2e}" for r in reps]
    sexp = "(sandbox" + "".join(
        f" (case (k {r['k']}) (rel {r['rel_error']:.3e}) ({r['status']}))" for r in reps) + ")"
    return _emit(args.format, lines, reps, sexp), 0 if ok else 1


def cmd_verify(args):
    modes = _range(args.modes) if args.modes else (-6, 6)
    window = _range(args.window) if args.window else (-6, -2)
    items = suites.plan(args.suite, modes, args.level, args.order, args.tol, args.seed,
                        window, args.inject_fault)
    reps = suites.run(items, args.jobs)
    ok = all(r["status"] == "pass" for r in reps)
    lines = [f"{r['status'].upper()} [{r['suite']}] {r['check']}"
             + (f" ({r['detail']})" if r["detail"] else "") for r in reps]
    lines.append(f"{'OK' if ok else 'FAILED'}: {sum(r['status'] == 'pass' for r in reps)}/{len(reps)}")
    sexp = "(verify" + "".join(f' ({r["status"]} "{r["check"]}")' for r in reps) + ")"
    return _emit(args.format, lines, {"checks": reps, "ok": ok}, sexp), 0 if ok else 1


# -- parser -----------------------------------------------------------------

def _common(defaults: bool) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    p.add_argument("--format", choices=("text", "json", "sexp"), default=d("text"))
    p.add_argument("--out", default=d(None), help="write output to this file")
    p.add_argument("--seed", type=int, default=d(0))
    p.add_argument("--jobs", type=int, default=d(1))
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="confvar", parents=[_common(True)],
                     description="Conformal derivatives, Virasoro modules and transformation laws.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = [_common(False)]

    p = sub.add_parser("basis", parents=common, help="canonical basis words of a level")
    p.add_argument("--level", type=int, required=True)
    p.set_defaults(func=cmd_basis)

    p = sub.add_parser("act", parents=common, help="apply L(n) modes to a vector")
    p.add_argument("--mode", required=True, help="comma-separated modes, leftmost acts last")
    p.add_argument("--word", default="", help="vector as a mode word, e.g. -2,-2")
    p.add_argument("--vector", default=None, help="vector as an s-expression")
    p.set_defaults(func=cmd_act)

    p = sub.add_parser("y-coeff", parents=common, help="the mode v_n w")
    p.add_argument("--v", required=True)
    p.add_argument("--n", required=True)
    p.add_argument("--w", default="")
    p.set_defaults(func=cmd_y_coeff)

    p = sub.add_parser("jacobi-check", parents=common, help="one Borcherds component")
    for name in ("u", "v", "w"):
        p.add_argument(f"--{name}", default="")
    for name in ("p", "q", "r"):
        p.add_argument(f"--{name}", default="0")
    p.set_defaults(func=cmd_jacobi)

    p = sub.add_parser("two-point", parents=common, help="vacuum two-point series")
    p.add_argument("--order", type=int, default=12)
    p.set_defaults(func=cmd_two_point)

    p = sub.add_parser("transform-law", parents=common, help="transformation law of a mode word")
    p.add_argument("--modes", required=True)
    p.add_argument("--points", type=int, default=1)
    p.add_argument("--identity", action="store_true", help="evaluate at g = identity")
    p.set_defaults(func=cmd_transform_law)

    p = sub.add_parser("faadibruno", parents=common, help="closed-form index table")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--check", action="store_true", help="compare with the composition oracle")
    p.set_defaults(func=cmd_faadibruno)

    p = sub.add_parser("gaussian", parents=common, help="reduce a Delta word or check a derived table")
    p.add_argument("--word", default="")
    p.add_argument("--strategy", choices=("near", "far", "random"), default="near")
    p.add_argument("--stationary", action="store_true")
    p.add_argument("--derived", type=int, choices=(1, 2, 3), default=None)
    p.add_argument("--window", default="-6..-2")
    p.set_defaults(func=cmd_gaussian)

    p = sub.add_parser("sandbox", parents=common, help="numeric regression matrix")
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_sandbox)

    p = sub.add_parser("verify", parents=common, help="run a verification suite")
    p.add_argument("--suite", choices=suites.SUITES + ("all",), default="all")
    p.add_argument("--modes", default=None, help="mode window lo..hi")
    p.add_argument("--window", default=None, help="m window lo..hi for gaussian")
    p.add_argument("--level", type=int, default=None)
    p.add_argument("--order", type=int, default=None)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--inject-fault", action="store_true", help="add a deliberately broken entry")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_join_values(argv))
        if args.jobs < 1:
            raise UsageError("--jobs must be positive")
        text, code = args.func(args)
    except UsageError as exc:
        print(f"confvar: usage error: {exc}", file=sys.stderr)
        return 2
    except ConfVarError as exc:
        print(f"confvar: error: {exc}", file=sys.stderr)
        return 1
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
