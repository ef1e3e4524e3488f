"""Acceptance criteria 1-12, one test and one summary line each.

Run directly (``python3 tests/test_acceptance.py``) to print only the
summary lines.
"""

import os
import subprocess
import sys
import time
from fractions import Fraction

import sympy as sp

from confvar import gaussian, jets, sandbox, transform, vertex, virasoro
from confvar.algebra import Poly
from confvar.vector_fields import hn, lie_bracket

RESULTS = []


def record(number, title, ok, elapsed, detail=""):
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {title}  [{elapsed:.2f}s]"
    if detail:
        line += f"  {detail}"
    RESULTS.append(line)
    print(line)
    return ok


def test_criterion_01_witt_relations():
    t = time.perf_counter()
    w = Poly.gen("w")
    ok = all(lie_bracket(hn(m, w), hn(n, w)) == hn(m + n, w).scale(m - n)
             for m in range(-8, 9) for n in range(-8, 9))
    dt = time.perf_counter() - t
    assert record(1, "Witt relations on [-8,8]^2", ok and dt < 1, dt)


def test_criterion_02_faadibruno():
    t = time.perf_counter()
    bad = []
    for r in range(7):
        for k in range(1, 5):
            hs = [jets.symbolic_jet(j, r + k - 1) for j in range(1, k + 1)]
            if jets.higher_derivative_closed_form(r, hs) != jets.higher_derivative_oracle(r, hs):
                bad.append((r, k))
    region_ok = (1, 1) in jets.region(1, 2)
    dt = time.perf_counter() - t
    ok = not bad and region_ok and dt < 30
    assert record(2, "closed form equals oracle for r<=6, k<=4", ok, dt, f"mismatches={bad}")


def test_criterion_03_virasoro_bracket():
    t = time.perf_counter()
    bad = 0
    for level in range(9):
        for word in virasoro.basis(level):
            v = virasoro.word_vector(word)
            bad += sum(not virasoro.bracket_check(m, n, v)
                       for m in range(-6, 7) for n in range(-6, 7))
    dt = time.perf_counter() - t
    assert record(3, "bracket_check on [-6,6]^2 to level 8", bad == 0 and dt < 10, dt,
                  f"failures={bad}")


AXIOM_VECTORS = [(), (-2,), (-2, -2), (-3,), (-2, -3)]


def test_criterion_04_voa_axioms():
    t = time.perf_counter()
    failed = []
    for word in AXIOM_VECTORS:
        for rep in vertex.verify_axioms(virasoro.word_vector(word), 10):
            if rep["status"] != "pass":
                failed.append((word, rep["axiom"]))
    dt = time.perf_counter() - t
    assert record(4, "vacuum, creation and derivative axioms at order 10", not failed, dt,
                  f"failures={failed}")


def test_criterion_05_borcherds():
    t = time.perf_counter()
    vecs = [virasoro.word_vector(w) for w in [(), (-2,), (-2, -2), (-3,)]]
    ws = [virasoro.word_vector(w) for lvl in range(7) for w in virasoro.basis(lvl)]
    bad = 0
    count = 0
    rng = range(-3, 4)
    for u in vecs:
        for v in vecs:
            for w in ws:
                for p in rng:
                    for q in rng:
                        for r in rng:
                            count += 1
                            bad += not vertex.borcherds_check(u, v, w, p, q, r)
    dt = time.perf_counter() - t
    assert record(5, "Borcherds components", bad == 0 and dt < 120, dt,
                  f"checks={count} failures={bad}")


def test_criterion_06_y_plus():
    t = time.perf_counter()
    bad = [m for m in range(-6, -1) if not vertex.y_plus_match(m, 8)]
    dt = time.perf_counter() - t
    assert record(6, "Y+ matching for m in [-6,-2] at order 8", not bad, dt, f"failures={bad}")


def test_criterion_07_two_point():
    t = time.perf_counter()
    ok = vertex.two_point_check(12)
    series = vertex.vacuum_two_point(12)
    c = virasoro.C
    spot = all(series.coefficient((m - 2, -m - 2)) == c * Fraction(m ** 3 - m, 12)
               for m in range(2, 15))
    dt = time.perf_counter() - t
    assert record(7, "vacuum two-point series to order 12", ok and spot, dt)


def test_criterion_08_gaussian():
    t = time.perf_counter()
    ode = gaussian.ode_check()
    stat = gaussian.stationarity_check()
    stat_ok = all(r["status"] == "pass" for r in stat) and stat[-1]["forced"] == ["d1", "d2", "d3"]
    derived = {p: gaussian.check_derived_gaussian(p, (-6, -2)) for p in (1, 2, 3)}
    derived_ok = all(r["status"] == "pass" for reps in derived.values() for r in reps)
    dt = time.perf_counter() - t
    assert record(8, "Gaussian table, stationarity, derived points 1-3", ode and stat_ok and derived_ok,
                  dt, f"ode={ode} stationarity={stat_ok} derived={derived_ok}")


def test_criterion_09_translation_cocycle():
    t = time.perf_counter()
    reps = gaussian.translation_cocycle_check()
    ok = len(reps) == 2 and all(r["status"] == "pass" for r in reps)
    dt = time.perf_counter() - t
    assert record(9, "translation cocycle conditions", ok, dt)


def test_criterion_10_transform_recursion():
    t = time.perf_counter()
    fam = transform.build_family(1)
    g1 = transform.jet_sym(1, 1)
    init_ok = (set(fam) == {(), (1,)} and fam[(1,)] == {(): g1 ** 2}
               and sp.cancel(fam[()][()] - transform.C / 12 * transform.schwarzian_at(1)) == 0)
    law = transform.coincident_specialize((-2,))
    G1, G2, G3 = (transform.one_point_sym(r) for r in (1, 2, 3))
    law_ok = (set(law) == {(-2,), ()} and sp.cancel(law[(-2,)] - G1 ** 2) == 0
              and sp.cancel(law[()] - transform.C / 12 * transform.schwarzian(G1, G2, G3)) == 0)
    co1 = transform.cocycle_check(1, 6)
    co2 = transform.cocycle_check(2, 5)
    mob = transform.schwarzian_mobius_check()
    tail = all(transform.tail_factorization_check(k, j) for k in (1, 2, 3) for j in range(1, k + 1))
    dt = time.perf_counter() - t
    parts = dict(initcond=init_ok, one_point=law_ok, cocycle1=co1, cocycle2=co2, mobius=mob,
                 tail=tail)
    detail = " ".join(f"{k}={v}" for k, v in parts.items())
    assert record(10, "transformation recursion", all(parts.values()), dt, detail)


def test_criterion_11_sandbox():
    t = time.perf_counter()
    matrix = sandbox.regression_matrix(seed=0, tol=1e-6)
    witt = sandbox.witt_reports(1e-6)
    split = sandbox.split_reports(seed=0, tol=1e-8)
    dt = time.perf_counter() - t
    ok = (len(matrix) == 75 and all(r["status"] == "pass" for r in matrix + witt + split)
          and dt < 60)
    worst = max(r["rel_error"] for r in matrix)
    anti = max(r["rel_error"] for r in split)
    assert record(11, "numeric sandbox", ok, dt, f"worst={worst:.1e} anti={anti:.1e}")


def _cli(*args):
    return subprocess.run([sys.executable, "-m", "confvar.cli", *args], capture_output=True,
                          text=True, env=dict(os.environ))


def test_criterion_12_cli_contract():
    t = time.perf_counter()
    a = _cli("basis", "--level", "4")
    b = _cli("basis", "--level", "4")
    law1 = _cli("--format", "json", "transform-law", "--modes", "-2")
    law2 = _cli("--format", "json", "transform-law", "--modes", "-2")
    good = _cli("verify", "--suite", "virasoro", "--modes", "-3..3", "--level", "3")
    fault = _cli("verify", "--suite", "virasoro", "--modes", "-3..3", "--level", "3",
                 "--inject-fault")
    usage = _cli("basis", "--level", "-1")
    bad_mode = _cli("transform-law", "--modes", "-1")
    checks = {
        "deterministic": a.stdout == b.stdout and law1.stdout == law2.stdout,
        "basis": a.returncode == 0 and a.stdout == "(L -2 -2)\n(L -4)\n",
        "verify": good.returncode == 0,
        "fault": fault.returncode == 1,
        "usage": usage.returncode == 2 and bad_mode.returncode == 2,
    }
    dt = time.perf_counter() - t
    detail = " ".join(f"{k}={v}" for k, v in checks.items())
    assert record(12, "CLI determinism and exit codes", all(checks.values()), dt, detail)


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
