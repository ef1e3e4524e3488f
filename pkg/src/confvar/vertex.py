"""Vertex operators on the identity module.

Modes v_n with Y(v, x) = sum_n v_n x^(-n-1) are computed lazily, one
coefficient at a time.  For v = L(m)u with m <= -2 the normal-ordered
product gives, with k = m + 1 and omega_j = L(j - 1),

    (L(m)u)_n w = sum_i (-1)^i C(k, i) [L(m - i) u_{n+i} w
                                       - (-1)^k u_{k+n-i} L(i - 1) w]

and both sums are finite on the identity module.
"""

from __future__ import annotations

import math
from functools import lru_cache

from .algebra import ZERO, Poly, TruncSeries, binomial, binomial_expand
from .errors import UsageError
from .vector_fields import recenter
from .virasoro import (C, VACUUM, IdentityVector, act, basis, is_canonical, weight,
                       word_sexp, word_vector)

OMEGA = IdentityVector({(-2,): 1})
_EMPTY = IdentityVector._raw({})


def _vec(v) -> IdentityVector:
    if isinstance(v, IdentityVector):
        return v
    return word_vector(tuple(v))


@lru_cache(maxsize=None)
def _mode_word(vword: tuple, n: int, wword: tuple) -> IdentityVector:
    if not vword:
        return IdentityVector._raw({wword: Poly.const(1)}) if n == -1 else _EMPTY
    top = weight(vword) + weight(wword) - 1
    if n > top:
        return _EMPTY
    m, rest = vword[0], vword[1:]
    k = m + 1
    wr = weight(rest)
    ww = weight(wword)
    w = IdentityVector._raw({wword: Poly.const(1)})
    out = _EMPTY
    # L(m - i) u_{n+i} w, zero once n + i exceeds wt(u) + wt(w) - 1
    i = 0
    while n + i <= wr + ww - 1:
        coeff = (-1) ** i * binomial(k, i)
        inner = _mode_vec(rest, n + i, w)
        if inner:
            out = out + act(m - i, inner).scale(coeff)
        i += 1
    # u_{k+n-i} L(i-1) w, zero once i - 1 exceeds wt(w)
    sign = -1 if k % 2 == 0 else 1
    for i in range(ww + 2):
        lw = act(i - 1, w)
        if not lw:
            continue
        coeff = sign * (-1) ** i * binomial(k, i)
        out = out + _mode_vec(rest, k + n - i, lw).scale(coeff)
    return out


def _mode_vec(vword: tuple, n: int, w: IdentityVector) -> IdentityVector:
    out = _EMPTY
    for wword, a in w.items():
        part = _mode_word(vword, n, wword)
        if part:
            out = out + part.scale(a)
    return out


def apply_mode(v, n: int, w) -> IdentityVector:
    """The vector v_n w, exact."""
    v = _vec(v)
    w = _vec(w)
    out = _EMPTY
    for vword, a in v.items():
        part = _mode_vec(vword, n, w)
        if part:
            out = out + part.scale(a)
    return out


@lru_cache(maxsize=200000)
def _apply_cached(v: IdentityVector, n: int, w: IdentityVector) -> IdentityVector:
    return apply_mode(v, n, w)


def mode_trace(v, n: int, w) -> str:
    v = _vec(v)
    w = _vec(w)
    return f"(mode (v {v.to_sexp()}) (n {n}) (w {w.to_sexp()}) (result {apply_mode(v, n, w).to_sexp()}))"


def truncation_index(v, w, floor: int = -200):
    """Minimal N with v_n w = 0 for every n >= N.

    Returns None when v or w is zero, since then every mode vanishes.
    """
    v = _vec(v)
    w = _vec(w)
    if not v or not w:
        return None
    n = v.max_weight() + w.max_weight() - 1
    while n >= floor:
        if apply_mode(v, n, w):
            return n + 1
        n -= 1
    raise UsageError("no nonzero mode found above the scan floor")


def borcherds_sides(u, v, w, p: int, q: int, r: int):
    """Both sides of the Borcherds identity in components."""
    u, v, w = _vec(u), _vec(v), _vec(w)
    wu, wv, ww = u.max_weight(), v.max_weight(), w.max_weight()
    lhs = _EMPTY
    i = 0
    # u_{r+i} v vanishes for r + i >= wt(u) + wt(v)
    while r + i < wu + wv:
        b = binomial(p, i)
        if b:
            uv = _apply_cached(u, r + i, v)
            if uv:
                lhs = lhs + _apply_cached(uv, p + q - i, w).scale(b)
        if p >= 0 and i >= p:
            break
        i += 1
    rhs = _EMPTY
    sign_r = -1 if r % 2 else 1
    limit = max(wv + ww - q, wu + ww - p, 0)
    if r >= 0:
        limit = min(limit, r + 1)
    for i in range(limit):
        b = (-1) ** i * binomial(r, i)
        if not b:
            continue
        vw = _apply_cached(v, q + i, w)
        if vw:
            rhs = rhs + _apply_cached(u, p + r - i, vw).scale(b)
        uw = _apply_cached(u, p + i, w)
        if uw:
            rhs = rhs - _apply_cached(v, q + r - i, uw).scale(b * sign_r)
    return lhs, rhs


def borcherds_check(u, v, w, p: int, q: int, r: int) -> bool:
    lhs, rhs = borcherds_sides(u, v, w, p, q, r)
    return lhs == rhs


def _report(axiom, instance, ok, witness=None):
    return {"axiom": axiom, "instance": instance, "status": "pass" if ok else "fail",
            "witness": witness}


def verify_axioms(v, order: int, samples=None) -> list:
    """Vacuum, creation and L(-1)-derivative checks up to ``order``."""
    v = _vec(v)
    if samples is None:
        samples = [w for lvl in range(5) for w in basis(lvl)]
    reports = []
    label = v.to_sexp()

    # vacuum: 1_n u = delta_{n,-1} u
    bad = None
    for w in samples:
        wv = word_vector(w)
        for n in range(-order - 1, order + 1):
            got = apply_mode(VACUUM, n, wv)
            want = wv if n == -1 else _EMPTY
            if got != want:
                bad = {"n": n, "w": word_sexp(w)}
                break
        if bad:
            break
    reports.append(_report("vacuum", label, bad is None, bad))

    # creation: v_n 1 = 0 for n >= 0, v_{-1-k} 1 = L(-1)^k v / k!
    bad = None
    for n in range(0, order + 1):
        if apply_mode(v, n, VACUUM):
            bad = {"n": n}
            break
    if bad is None:
        lv = v
        for k in range(order + 1):
            if apply_mode(v, -1 - k, VACUUM) != lv.scale(Poly.const(1) / math.factorial(k)):
                bad = {"n": -1 - k}
                break
            lv = act(-1, lv)
    reports.append(_report("creation", label, bad is None, bad))

    # derivative: (L(-1)v)_n w = -n v_{n-1} w
    dv = act(-1, v)
    bad = None
    for w in samples:
        wv = word_vector(w)
        for n in range(-order, order + 1):
            if apply_mode(dv, n, wv) != apply_mode(v, n - 1, wv).scale(-n):
                bad = {"n": n, "w": word_sexp(w)}
                break
        if bad:
            break
    reports.append(_report("derivative", label, bad is None, bad))
    return reports


def vacuum_two_point(order: int) -> TruncSeries:
    """1-component of Y(omega, x2) Y(omega, x1) 1 for |x1| < |x2|."""
    if order < 4:
        raise UsageError("order must be at least 4")
    terms = {}
    for a in range(order + 1):
        inner = apply_mode(OMEGA, -a - 1, VACUUM)
        for b in range(-order - 4, order + 1):
            coeff = apply_mode(OMEGA, -b - 1, inner).coefficient(())
            if coeff:
                terms[(a, b)] = coeff
    return TruncSeries(("x1", "x2"), (order, order), terms, (0, -order - 4))


def two_point_reference(order: int) -> TruncSeries:
    """(c/2)(x2 - x1)^(-4) expanded for |x1| < |x2|."""
    return binomial_expand(-4, "|x1|<|x2|", order).scale(C / 2)


def two_point_check(order: int) -> bool:
    got = vacuum_two_point(order)
    ref = two_point_reference(order)
    for e, a in got.items():
        if not ref.in_window(e):
            # outside the reference window the weight grading forces zero
            return False
    return all(got.coefficient(e) == a for e, a in ref.items()) and got.agrees_with(ref)


def y_plus_match(m: int, order: int) -> bool:
    """Compare recentered h_{m;w} with (-1)^m Y^+(L(m)1, x) at x = w.

    Coefficient of w^k on the field side is C(m+1, k) h_{m-k}, mapped to
    (-1)^(m-k) L(m-k); on the vertex side it is C(k-m-2, -m-2) L(m-k).
    """
    if m > -2:
        raise UsageError("y_plus_match needs m <= -2")
    if order < 0:
        raise UsageError("order must be nonnegative")
    field = recenter(m, Poly.gen("w"), 0, order + 1)
    gen = IdentityVector({(m,): 1})
    for k in range(order + 1):
        n = m - k
        a = field.coefficient(n).coeffs_in("w").get(k, ZERO)
        lhs = a * (-1) ** (n % 2)
        # Y^+ coefficient of x^k is L(m)1's mode with x^k, i.e. index -k-1
        vertex = apply_mode(gen, -k - 1, VACUUM)
        rhs_scalar = vertex.coefficient((n,)) if is_canonical((n,)) else ZERO
        sign = -1 if m % 2 else 1
        if lhs != rhs_scalar * sign:
            return False
        want = binomial(k - m - 2, -m - 2) * (-1) ** (m % 2)
        if lhs != want:
            return False
    return True


def multi_insertion(words, exps, target=()) -> Poly:
    """Coefficient of x_1^e_1 ... x_i^e_i in Y(L(w_i)1,x_i)...Y(L(w_1)1,x_1)1.

    The mode of x_j with exponent e is -e - 1.  Returns the ``target``
    component of the resulting vector.
    """
    if len(words) != len(exps):
        raise UsageError("one exponent per word is required")
    x = VACUUM
    for word, e in zip(words, exps):
        x = apply_mode(word_vector(tuple(word)), -e - 1, x)
        if not x:
            return ZERO
    return x.coefficient(tuple(target))
