"""Verification suites behind ``confvar verify``.

A check is a module-level function returning a list of report dicts
``{suite, check, status, detail}``.  Suites are lists of (function, args)
pairs, so they can be farmed out to worker processes and gathered back in
order.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor

import sympy as sp

from . import gaussian, jets, sandbox, transform, vertex, virasoro
from .algebra import Poly
from .errors import UsageError
from .vector_fields import hn, lie_bracket

SUITES = ("virasoro", "voa", "gaussian", "transform", "faadibruno", "sandbox")


def _rep(suite, check, ok, detail=""):
    return {"suite": suite, "check": check, "status": "pass" if ok else "fail",
            "detail": detail}


# -- virasoro ------------------------------------------------------------

def witt_relations(lo, hi):
    bad = [(m, n) for m in range(lo, hi + 1) for n in range(lo, hi + 1)
           if lie_bracket(hn(m), hn(n)) != hn(m + n).scale(m - n)]
    return [_rep("virasoro", f"witt m,n in [{lo},{hi}]", not bad, f"failures={bad[:3]}")]


def bracket_sweep(lo, hi, level, central=None):
    bad = []
    for lvl in range(level + 1):
        for word in virasoro.basis(lvl):
            v = virasoro.word_vector(word)
            for m in range(lo, hi + 1):
                for n in range(lo, hi + 1):
                    if not virasoro.bracket_check(m, n, v, central):
                        bad.append((m, n, word))
    return [_rep("virasoro", f"bracket m,n in [{lo},{hi}] to level {level}", not bad,
                 f"failures={len(bad)}")]


def _broken_central(m):
    return virasoro._central(m) + 1


def virasoro_fault():
    v = virasoro.word_vector((-2,))
    ok = virasoro.bracket_check(2, -2, v, _broken_central)
    return [_rep("virasoro", "injected fault: central term off by one", ok)]


# -- voa -------------------------------------------------------------------

AXIOM_VECTORS = ((), (-2,), (-2, -2), (-3,), (-3, -2))
BORCHERDS_VECTORS = ((), (-2,), (-2, -2), (-3,))


def _named(word):
    return virasoro.word_sexp(word)


def axioms(word, order):
    v = virasoro.word_vector(word)
    out = []
    for r in vertex.verify_axioms(v, order):
        out.append(_rep("voa", f"{r['axiom']} {_named(word)} order {order}",
                        r["status"] == "pass", r["witness"] or ""))
    return out


def borcherds(u, v, level, lo, hi):
    uv, vv = virasoro.word_vector(u), virasoro.word_vector(v)
    bad = []
    count = 0
    for lvl in range(level + 1):
        for w in virasoro.basis(lvl):
            wv = virasoro.word_vector(w)
            for p in range(lo, hi + 1):
                for q in range(lo, hi + 1):
                    for r in range(lo, hi + 1):
                        count += 1
                        if not vertex.borcherds_check(uv, vv, wv, p, q, r):
                            bad.append((p, q, r, w))
    return [_rep("voa", f"borcherds u={_named(u)} v={_named(v)} level {level}", not bad,
                 f"checks={count} failures={len(bad)}")]


def y_plus(lo, hi, order):
    bad = [m for m in range(lo, hi + 1) if not vertex.y_plus_match(m, order)]
    return [_rep("voa", f"y-plus m in [{lo},{hi}] order {order}", not bad, f"failures={bad}")]


def two_point(order):
    return [_rep("voa", f"two-point order {order}", vertex.two_point_check(order))]


def voa_fault():
    got = vertex.vacuum_two_point(6)
    ref = vertex.binomial_expand(-4, "|x1|<|x2|", 6).scale(vertex.C / 3)
    ok = all(got.coefficient(e) == a for e, a in ref.items())
    return [_rep("voa", "injected fault: two-point prefactor c/3", ok)]


# -- gaussian --------------------------------------------------------------

def gaussian_ode():
    return [_rep("gaussian", "ode", gaussian.ode_check())]


def gaussian_stationarity():
    return [_rep("gaussian", f"stationarity {r['proposition']}", r["status"] == "pass",
                 f"forced={r['forced']}") for r in gaussian.stationarity_check()]


def gaussian_derived(point, lo, hi):
    reps = gaussian.check_derived_gaussian(point, (lo, hi))
    bad = [r["pair"] for r in reps if r["status"] != "pass"]
    return [_rep("gaussian", f"derived point {point} m in [{lo},{hi}]", not bad,
                 f"pairs={len(reps)} failures={bad[:3]}")]


def gaussian_cocycle():
    return [_rep("gaussian", f"translation cocycle {r['proposition']}", r["status"] == "pass")
            for r in gaussian.translation_cocycle_check()]


def gaussian_fault():
    a = gaussian.SYMBOLIC
    wrong = gaussian.Anomaly(a.c + 1, a.d1, a.d2, a.d3)
    ok = gaussian.second_derivative(2, -2, 0, a) == gaussian.second_derivative(2, -2, 0, wrong)
    return [_rep("gaussian", "injected fault: exponent shifted in the table", ok)]


# -- transform -------------------------------------------------------------

def transform_initcond():
    fam = transform.build_family(1)
    g1 = transform.jet_sym(1, 1)
    ok = (set(fam) == {(), (1,)} and fam[(1,)] == {(): g1 ** 2}
          and sp.cancel(fam[()][()] - transform.C / 12 * transform.schwarzian_at(1)) == 0)
    return [_rep("transform", "initial conditions", ok)]


def transform_one_point():
    law = transform.coincident_specialize((-2,))
    g1, g2, g3 = (transform.one_point_sym(r) for r in (1, 2, 3))
    ok = (set(law) == {(-2,), ()} and sp.cancel(law[(-2,)] - g1 ** 2) == 0
          and sp.cancel(law[()] - transform.C / 12 * transform.schwarzian(g1, g2, g3)) == 0)
    return [_rep("transform", "one-point law", ok)]


def transform_cocycle(k, order, mobius=False):
    label = f"cocycle k={k} order {order}" + (" mobius" if mobius else "")
    return [_rep("transform", label, transform.cocycle_check(k, order, mobius))]


def transform_mobius():
    return [_rep("transform", "schwarzian vanishes on mobius jets",
                 transform.schwarzian_mobius_check())]


def transform_tail(k):
    return [_rep("transform", f"tail factorization k={k} j={j}",
                 transform.tail_factorization_check(k, j)) for j in range(1, k + 1)]


def transform_identity(k):
    return [_rep("transform", f"identity jets k={k}", transform.identity_check(k))]


def transform_holomorphy(k):
    return [_rep("transform", f"holomorphy k={k}", transform.holomorphy_check(k))]


def transform_fault():
    law = transform.coincident_specialize((-2,))
    ok = sp.cancel(law[(-2,)] - transform.one_point_sym(1) ** 3) == 0
    return [_rep("transform", "injected fault: top entry G1^3", ok)]


# -- faadibruno ------------------------------------------------------------

def faadibruno_block(r, kmax):
    bad = []
    for k in range(1, kmax + 1):
        hs = [jets.symbolic_jet(j, r + k - 1) for j in range(1, k + 1)]
        if jets.higher_derivative_closed_form(r, hs) != jets.higher_derivative_oracle(r, hs):
            bad.append(k)
    return [_rep("faadibruno", f"closed form vs oracle r={r} k<={kmax}", not bad,
                 f"failures={bad}")]


def faadibruno_region():
    ok = (1, 1) in jets.region(1, 2)
    return [_rep("faadibruno", "region contains (1, 1) at n=1, k=2", ok)]


def faadibruno_fault():
    hs = [jets.symbolic_jet(j, 2) for j in (1, 2)]
    ok = jets.higher_derivative_closed_form(1, hs) == \
        jets.higher_derivative_oracle(1, hs) + Poly.const(1)
    return [_rep("faadibruno", "injected fault: oracle shifted by one", ok)]


# -- sandbox ----------------------------------------------------------------

def sandbox_matrix(seed, tol):
    reps = sandbox.regression_matrix(seed, tol=tol)
    worst = max(r["rel_error"] for r in reps)
    bad = [r for r in reps if r["status"] != "pass"]
    return [_rep("sandbox", "regression matrix r<=4 k<=3 5 sets", not bad,
                 f"cases={len(reps)} worst={worst:.1e}")]


def sandbox_witt(tol):
    reps = sandbox.witt_reports(tol)
    return [_rep("sandbox", f"witt numeric ({r['m']},{r['n']}) {r['functional']}",
                 r["status"] == "pass", f"rel={r['rel_error']:.1e}") for r in reps]


def sandbox_split(seed):
    reps = sandbox.split_reports(seed)
    worst = max(r["rel_error"] for r in reps)
    return [_rep("sandbox", "anti-holomorphic parts below 1e-8",
                 all(r["status"] == "pass" for r in reps), f"worst={worst:.1e}")]


def sandbox_fault():
    f = sandbox.FunctionalSpec(1)
    h = sandbox.DirectionField.polynomial([1, 0.5])
    est = sandbox.fd_derivative(f, 1, [h])
    ref = sandbox.closed_form_value(1, [h], f.z0) * (1 + 1e-3)
    return [_rep("sandbox", "injected fault: reference scaled by 1.001",
                 abs(est - ref) <= 1e-6 * abs(ref))]


# -- assembly ----------------------------------------------------------------

FAULTS = {
    "virasoro": virasoro_fault,
    "voa": voa_fault,
    "gaussian": gaussian_fault,
    "transform": transform_fault,
    "faadibruno": faadibruno_fault,
    "sandbox": sandbox_fault,
}


def plan(suite: str, modes=(-6, 6), level=None, order=None, tol=1e-6, seed=0,
         window=(-6, -2), inject_fault=False) -> list:
    """List of (function, args) for the named suite."""
    if suite == "all":
        out = []
        for s in SUITES:
            out += plan(s, modes, level, order, tol, seed, window, False)
        if inject_fault:
            out.append((FAULTS["virasoro"], ()))
        return out
    if suite not in SUITES:
        raise UsageError(f"unknown suite {suite!r}")
    lo, hi = modes
    if suite == "virasoro":
        out = [(witt_relations, (-8, 8)), (bracket_sweep, (lo, hi, 8 if level is None else level))]
    elif suite == "voa":
        lvl = 6 if level is None else level
        ordr = 10 if order is None else order
        out = [(axioms, (w, ordr)) for w in AXIOM_VECTORS]
        out += [(borcherds, (u, v, lvl, -3, 3)) for u in BORCHERDS_VECTORS for v in BORCHERDS_VECTORS]
        out += [(y_plus, (-6, -2, 8)), (two_point, (12 if order is None else max(order, 4),))]
    elif suite == "gaussian":
        out = [(gaussian_ode, ()), (gaussian_stationarity, ())]
        out += [(gaussian_derived, (p, window[0], window[1])) for p in (1, 2, 3)]
        out += [(gaussian_cocycle, ())]
    elif suite == "transform":
        out = [(transform_initcond, ()), (transform_one_point, ()), (transform_mobius, ()),
               (transform_cocycle, (1, 6)), (transform_cocycle, (1, 6, True)),
               (transform_cocycle, (2, 5))]
        out += [(transform_identity, (k,)) for k in (1, 2, 3)]
        out += [(transform_holomorphy, (k,)) for k in (2, 3)]
        out += [(transform_tail, (k,)) for k in (1, 2, 3)]
    elif suite == "faadibruno":
        out = [(faadibruno_region, ())]
        out += [(faadibruno_block, (r, 4)) for r in range(0, 7 if order is None else order + 1)]
    else:
        out = [(sandbox_matrix, (seed, tol)), (sandbox_witt, (tol,)), (sandbox_split, (seed,))]
    if inject_fault:
        out.append((FAULTS[suite], ()))
    return out


def _run(item):
    func, args = item
    return func(*args)


def run(items, jobs: int = 1) -> list:
    """Execute checks, gathering reports in plan order."""
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_run, items))
    else:
        chunks = [_run(item) for item in items]
    return [r for chunk in chunks for r in chunk]
