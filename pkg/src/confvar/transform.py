"""Transformation operators P_S^(k) for multiple Delta[h_{-2}] insertions.

Jets are sympy symbols: ``G{r}_{j}`` is the r-th derivative of g at the
point ``w{j}``.  Coefficients are rational functions in these symbols.
Internally they are polynomials in a ring that also carries the inverses
of g'(w_j), g(w_i) - g(w_j) and w_i - w_j (see ``JetRing``).  A
differential operator is a dict mapping a partial multi-index (sorted
tuple of (point, order)) to its coefficient.

Families are built by the recursion on k: the Gateaux derivative along
u(z) = g'(w_t)^2/(g(w_t) - g(z)) - g'(z)/(w_t - z), plus the transport
term sum_l u(w_l)/g'(w_l) d/dw_l composed to the right of P_S.  By
default the family acts on the ratios Z^-1 Delta ... Delta Z, so the
branch t not in S also picks up P_S (c/12){g, w_t}; without that term the
k = 2 composition law fails by a c^2 cross term.
"""

from __future__ import annotations

import math
from functools import lru_cache
from itertools import combinations

import sympy as sp
from sympy.polys.domains import QQ
from sympy.polys.rings import ring

from .algebra import Poly, TruncSeries, series_compose
from .errors import SingularLimitError, UsageError

C = sp.Symbol("c")
EPS = sp.Symbol("epsilon")
WBASE = sp.Symbol("w")


def w_sym(j: int) -> sp.Symbol:
    return sp.Symbol(f"w{j}")


def jet_sym(r: int, j: int) -> sp.Symbol:
    return sp.Symbol(f"G{r}_{j}")


def one_point_sym(r: int) -> sp.Symbol:
    return sp.Symbol(f"G{r}")


def _parse_jet(sym):
    name = sym.name
    if name.startswith("G") and "_" in name:
        r, j = name[1:].split("_")
        return int(r), int(j)
    return None


class RationalExpr:
    """Cancelled quotient of polynomials over the rationals."""

    __slots__ = ("expr",)

    def __init__(self, expr):
        self.expr = sp.cancel(sp.sympify(expr))

    @property
    def numerator(self):
        return sp.fraction(self.expr)[0]

    @property
    def denominator(self):
        return sp.fraction(self.expr)[1]

    def is_zero(self) -> bool:
        return self.expr == 0

    def __eq__(self, other):
        other = other.expr if isinstance(other, RationalExpr) else sp.sympify(other)
        return sp.cancel(self.expr - other) == 0

    def __hash__(self):
        return hash(sp.srepr(self.expr))

    def subs(self, mapping) -> "RationalExpr":
        return RationalExpr(self.expr.subs(mapping))

    def __str__(self):
        return str(sp.factor(self.expr)) if self.expr != 0 else "0"

    def __repr__(self):
        return f"RationalExpr({self})"

    def to_sexp(self) -> str:
        num, den = sp.fraction(self.expr)
        return f"(rational (num {sp.expand(num)}) (den {sp.expand(den)}))"


def total_derivative(expr, j: int):
    """d/dw_j acting on w_j and on the jets at point j."""
    out = sp.diff(expr, w_sym(j))
    for s in expr.free_symbols:
        parsed = _parse_jet(s)
        if parsed and parsed[1] == j:
            out += sp.diff(expr, s) * jet_sym(parsed[0] + 1, j)
    return out


def schwarzian(g1, g2, g3):
    return g3 / g1 - sp.Rational(3, 2) * (g2 / g1) ** 2


def schwarzian_at(j: int):
    return schwarzian(jet_sym(1, j), jet_sym(2, j), jet_sym(3, j))


@lru_cache(maxsize=None)
def u_field(target: int, at: int, r: int = 0):
    """r-th derivative of u at w_at, for the point w_target."""
    if at == target:
        raise UsageError("u is not evaluated at its own target point")
    if r == 0:
        t, j = target, at
        return (jet_sym(1, t) ** 2 / (jet_sym(0, t) - jet_sym(0, j))
                - jet_sym(1, j) / (w_sym(t) - w_sym(j)))
    return sp.cancel(total_derivative(u_field(target, at, r - 1), at))


def _key_add(key: tuple, j: int, amount: int) -> tuple:
    d = dict(key)
    d[j] = d.get(j, 0) + amount
    return tuple(sorted((a, b) for a, b in d.items() if b))


def _op_add(op: dict, key, value):
    s = op.get(key, 0) + value
    op[key] = s


def _gateaux(coeff, target: int):
    out = 0
    for s in coeff.free_symbols:
        parsed = _parse_jet(s)
        if parsed is None:
            continue
        r, j = parsed
        out += sp.diff(coeff, s) * u_field(target, j, r)
    return out


NORMALIZATIONS = ("ratio", "linear")


class JetRing:
    """Polynomials in c, eps, w_j, jets G{r}_{j} and inverse generators.

    ``I{j}`` stands for 1/g'(w_j), ``A{i}{j}`` for 1/(g(w_i) - g(w_j)) and
    ``B{i}{j}`` for 1/(w_i - w_j) (i < j).  Coefficients of the family are
    polynomials in these generators, so the recursion needs no gcds; the
    only relation applied on the fly is I_j g'(w_j) = 1.
    """

    def __init__(self, k: int):
        self.k = k
        self.top = 4 * k + 12
        pts = range(1, k + 1)
        self.pairs = [(i, j) for i in pts for j in pts if i < j]
        names = ["c", "eps"] + [f"w{j}" for j in pts]
        names += [f"G{r}_{j}" for j in pts for r in range(self.top + 1)]
        names += [f"I{j}" for j in pts]
        names += [f"A{i}{j}" for i, j in self.pairs] + [f"B{i}{j}" for i, j in self.pairs]
        self.R, *gens = ring(names, QQ)
        self.names = names
        self.gen = dict(zip(names, gens))
        self.idx = {n: i for i, n in enumerate(names)}
        self._red = [(self.idx[f"I{j}"], self.idx[f"G1_{j}"]) for j in pts]
        self._u: dict = {}
        self._bases = None

    # -- generators -------------------------------------------------------
    def jet(self, r: int, j: int):
        if r > self.top:
            raise UsageError(f"jet order {r} exceeds the working ring")
        return self.gen[f"G{r}_{j}"]

    def w(self, j: int):
        return self.gen[f"w{j}"]

    def inv_jet1(self, j: int):
        return self.gen[f"I{j}"]

    def inv_g(self, i: int, j: int):
        """1/(g(w_i) - g(w_j))."""
        return self.gen[f"A{i}{j}"] if i < j else -self.gen[f"A{j}{i}"]

    def inv_w(self, i: int, j: int):
        return self.gen[f"B{i}{j}"] if i < j else -self.gen[f"B{j}{i}"]

    def schwarzian(self, j: int):
        inv = self.inv_jet1(j)
        return self.jet(3, j) * inv - QQ(3, 2) * self.jet(2, j) ** 2 * inv ** 2

    def bases(self) -> dict:
        """Generator index of each inverse mapped to the polynomial it inverts."""
        if self._bases is None:
            out = {}
            for j in range(1, self.k + 1):
                out[self.idx[f"I{j}"]] = self.jet(1, j)
            for i, j in self.pairs:
                out[self.idx[f"A{i}{j}"]] = self.jet(0, i) - self.jet(0, j)
                out[self.idx[f"B{i}{j}"]] = self.w(i) - self.w(j)
            self._bases = out
        return self._bases

    # -- conversion -------------------------------------------------------
    def to_expr(self, p):
        subs = {}
        for j in range(1, self.k + 1):
            subs[sp.Symbol(f"I{j}")] = 1 / jet_sym(1, j)
        for i, j in self.pairs:
            subs[sp.Symbol(f"A{i}{j}")] = 1 / (jet_sym(0, i) - jet_sym(0, j))
            subs[sp.Symbol(f"B{i}{j}")] = 1 / (w_sym(i) - w_sym(j))
        return p.as_expr().xreplace(subs)

    def reduce(self, p):
        out: dict = {}
        for mono, coeff in p.items():
            mono = list(mono)
            for a, b in self._red:
                e = min(mono[a], mono[b])
                if e:
                    mono[a] -= e
                    mono[b] -= e
            mono = tuple(mono)
            out[mono] = out.get(mono, 0) + coeff
        return self.R({m: c for m, c in out.items() if c})

    # -- derivations ------------------------------------------------------
    def derive(self, p, images):
        """Apply the derivation with ``images(name)`` on w and jet generators."""
        used = set()
        for mono in p.monoms():
            used.update(i for i, e in enumerate(mono) if e)
        cache: dict = {}

        def image(name):
            if name in cache:
                return cache[name]
            kind = name[0]
            if kind == "I":
                d = image(f"G1_{name[1:]}")
            elif kind in "AB":
                i, j = int(name[1]), int(name[2])
                d = (image(f"G0_{i}") - image(f"G0_{j}") if kind == "A"
                     else image(f"w{i}") - image(f"w{j}"))
            else:
                d = images(name)
                cache[name] = d
                return d
            # d(1/x) = -(1/x)^2 dx
            value = -self.gen[name] ** 2 * d if d else self.R.zero
            cache[name] = value
            return value

        out = self.R.zero
        for i in sorted(used):
            d = image(self.names[i])
            if d:
                out += p.diff(self.R.gens[i]) * d
        return self.reduce(out)

    def total_derivative(self, p, j: int):
        suffix = f"_{j}"

        def images(name):
            if name == f"w{j}":
                return self.R.one
            if name[0] == "G" and name.endswith(suffix):
                return self.jet(int(name[1:name.index("_")]) + 1, j)
            return self.R.zero
        return self.derive(p, images)

    def u(self, target: int, at: int, r: int = 0):
        """r-th derivative of u at w_at, for the point w_target."""
        key = (target, at, r)
        if key not in self._u:
            if r == 0:
                t, j = target, at
                value = (self.jet(1, t) ** 2 * self.inv_g(t, j)
                         - self.jet(1, j) * self.inv_w(t, j))
            else:
                value = self.total_derivative(self.u(target, at, r - 1), at)
            self._u[key] = value
        return self._u[key]

    def gateaux(self, p, target: int):
        def images(name):
            if name[0] == "G":
                r, j = map(int, name[1:].split("_"))
                if j != target:
                    return self.u(target, j, r)
            return self.R.zero
        return self.derive(p, images)

    # -- exact tests ------------------------------------------------------
    def clear(self, p):
        """Multiply p by the smallest product of bases removing all inverses."""
        bases = self.bases()
        top = {i: 0 for i in bases}
        for mono in p.monoms():
            for i in bases:
                top[i] = max(top[i], mono[i])
        powers: dict = {}

        def power(i, e):
            if (i, e) not in powers:
                powers[(i, e)] = bases[i] ** e
            return powers[(i, e)]

        out = self.R.zero
        for mono, coeff in p.items():
            rest = list(mono)
            term = self.R.one
            for i in bases:
                rest[i] = 0
                if top[i] - mono[i]:
                    term *= power(i, top[i] - mono[i])
            out += self.R({tuple(rest): coeff}) * term
        return out

    def is_zero(self, p) -> bool:
        """Exact zero test: the bases are nonzero, so clearing is faithful."""
        return not p or not self.clear(p)

    def substitute(self, p, values: dict, order=None):
        """Evaluate p with generator index -> polynomial, truncating in eps."""
        eps = self.idx["eps"]

        def trunc(q):
            if order is None:
                return q
            return self.R({m: c for m, c in q.items() if m[eps] <= order})

        powers: dict = {}

        def power(i, e):
            if (i, e) not in powers:
                powers[(i, e)] = values[i] if e == 1 else trunc(power(i, e - 1) * values[i])
            return powers[(i, e)]

        out = self.R.zero
        for mono, coeff in p.items():
            rest = list(mono)
            term = self.R({(0,) * len(mono): coeff})
            for i, e in enumerate(mono):
                if e and i in values:
                    rest[i] = 0
                    term = trunc(term * power(i, e))
                    if not term:
                        break
            if term:
                out += trunc(term * self.R({tuple(rest): 1}))
        return self.reduce(out)


@lru_cache(maxsize=None)
def family_levels(k: int, normalization: str = "ratio"):
    """The ring and the families P^(1), ..., P^(k) as polynomials in it."""
    if k < 1:
        raise UsageError("k must be at least 1")
    if normalization not in NORMALIZATIONS:
        raise UsageError(f"unknown normalization {normalization!r}")
    J = JetRing(k)
    c12 = J.gen["c"] * QQ(1, 12)
    fam = {(1,): {(): J.jet(1, 1) ** 2}, (): {(): c12 * J.schwarzian(1)}}
    levels = [fam]
    for t in range(2, k + 1):
        anomaly = c12 * J.schwarzian(t) if normalization == "ratio" else J.R.zero
        g1t = J.jet(1, t)
        nxt: dict = {}
        for S, op in fam.items():
            new: dict = {}
            for key, coeff in op.items():
                _op_add(new, key, J.gateaux(coeff, t) + J.reduce(coeff * anomaly))
                # P o (u(w_l)/g'(w_l)) d/dw_l, moving the partials of P through f
                for l in S:
                    fb = J.reduce(J.u(t, l) * J.inv_jet1(l))
                    alpha = dict(key).get(l, 0)
                    for b in range(alpha + 1):
                        nk = _key_add(key, l, 1 - b)
                        _op_add(new, nk, J.reduce(coeff * fb) * math.comb(alpha, b))
                        if b < alpha:
                            fb = J.total_derivative(fb, l)
            nxt[S] = {key: v for key, v in new.items() if v}
            nxt[S + (t,)] = {key: v * g1t ** 2 for key, v in op.items()}
        fam = nxt
        levels.append(fam)
    return J, tuple(levels)


@lru_cache(maxsize=None)
def build_family(k: int, normalization: str = "ratio") -> dict:
    """Map sorted tuple S to the operator P_S^(k).

    With ``normalization="ratio"`` the family transforms the ratios
    Z^-1 Delta...Delta Z, which adds P_S (c/12){g, w_t} to the branch
    t not in S.  ``"linear"`` omits that term.  Coefficients are sympy
    expressions, cancelled for k <= 2; for larger k they are left as sums
    of simple fractions because the cancelled forms grow very large.
    """
    if k == 1:
        family_levels(1, normalization)
        return {(1,): {(): jet_sym(1, 1) ** 2}, (): {(): C / 12 * schwarzian_at(1)}}
    J, levels = family_levels(k, normalization)
    finish = (lambda e: sp.cancel(sp.together(e))) if k <= 2 else (lambda e: e)
    out = {}
    for S, op in levels[-1].items():
        coeffs = {key: finish(J.to_expr(v)) for key, v in op.items()}
        out[S] = {key: e for key, e in coeffs.items() if e != 0}
    return out


def family_rational(k: int, normalization: str = "ratio") -> dict:
    fam = build_family(k, normalization)
    return {S: {key: RationalExpr(c) for key, c in op.items()} for S, op in fam.items()}


# -- coincident limits ----------------------------------------------------

def _shift_series(k: int, order: int, spacing=None):
    """w_j = w + l_j eps and jets at w_j as Taylor series at w."""
    lam = spacing or list(range(k))
    out = {}
    for j in range(1, k + 1):
        lj = lam[j - 1]
        out[w_sym(j)] = WBASE + lj * EPS
        for r in range(order + 1):
            out[jet_sym(r, j)] = sum(one_point_sym(r + s) * (lj * EPS) ** s / math.factorial(s)
                                     for s in range(order + 1))
    return out


def _truncated(poly_expr, series: dict, order: int) -> dict:
    """Substitute series into a polynomial, keeping eps powers <= order.

    Returns a dict from eps power to its sympy coefficient.
    """
    poly_expr = sp.expand(poly_expr)
    if poly_expr == 0:
        return {}
    gens = sorted(poly_expr.free_symbols, key=lambda s: s.name)
    if not gens:
        return {0: poly_expr}
    extra = set()
    for g in gens:
        if g in series:
            extra |= sp.sympify(series[g]).free_symbols
    symbols = [EPS] + sorted((set(gens) - set(series)) | (extra - {EPS}), key=lambda s: s.name)
    R, *ring_gens = ring(symbols, QQ)
    lookup = dict(zip(symbols, ring_gens))

    def trunc(p):
        return R({m: c for m, c in p.items() if m[0] <= order})

    base = {}
    for g in gens:
        base[g] = trunc(R(sp.expand(series[g]))) if g in series else lookup[g]
    powers: dict = {}

    def power(g, e):
        key = (g, e)
        if key not in powers:
            powers[key] = base[g] if e == 1 else trunc(power(g, e - 1) * base[g])
        return powers[key]

    total = R(0)
    for exps, coeff in sp.Poly(poly_expr, *gens).terms():
        term = R(coeff)
        for g, e in zip(gens, exps):
            if e:
                term = trunc(term * power(g, e))
                if not term:
                    break
        total += term
    out: dict = {}
    for m, c in total.items():
        out.setdefault(m[0], R(0))
        out[m[0]] += R({(0,) + m[1:]: c})
    return {d: v.as_expr() for d, v in out.items() if v}


def _leading(parts: dict):
    if not parts:
        return None, None
    q = min(parts)
    return q, parts[q]


def _max_jet(expr):
    top = 0
    for s in expr.free_symbols:
        parsed = _parse_jet(s)
        if parsed:
            top = max(top, parsed[0])
    return top


def _limit_with(expr, make_series):
    """Leading-order comparison of numerator and denominator in eps."""
    num, den = sp.fraction(sp.cancel(sp.together(expr)))
    order = 4
    while True:
        series = make_series(_max_jet(expr) + order)
        q, dlead = _leading(_truncated(den, series, order))
        if q is None:
            order *= 2
            if order > 64:
                raise SingularLimitError("denominator vanishes identically")
            continue
        p, nlead = _leading(_truncated(num, series, q))
        return p, q, nlead, dlead


def coincident_limit(expr, k: int, spacing=None):
    """Limit of expr as all w_j merge at w, or SingularLimitError."""
    expr = sp.sympify(expr)
    if expr == 0:
        return sp.Integer(0)
    p, q, nlead, dlead = _limit_with(expr, lambda n: _shift_series(k, n, spacing))
    if p is None or p > q:
        return sp.Integer(0)
    if p < q:
        raise SingularLimitError(f"pole of order {q - p} survives the coincident limit")
    value = sp.cancel(nlead / dlead)
    if value.has(WBASE):
        raise SingularLimitError("limit depends explicitly on w")
    return value


def _reorder(word: tuple) -> dict:
    """Sort a same-point Delta word so modes increase left to right."""
    out: dict = {}
    stack = [(word, 1)]
    while stack:
        w, coeff = stack.pop()
        for i in range(len(w) - 1):
            a, b = w[i], w[i + 1]
            if a > b:
                stack.append((w[:i] + (b, a) + w[i + 2:], coeff))
                stack.append((w[:i] + (a + b,) + w[i + 2:], coeff * (a - b)))
                break
        else:
            out[w] = out.get(w, 0) + coeff
    return {w: c for w, c in out.items() if c}


def _apply_partial(expansion: dict, j: int, S: tuple) -> dict:
    """d/dw_j on sum_b coeff_b d_y^b F(g(w_S))."""
    out: dict = {}
    idx = S.index(j) if j in S else None
    for b, coeff in expansion.items():
        dc = total_derivative(coeff, j)
        if dc != 0:
            out[b] = out.get(b, 0) + dc
        if idx is not None:
            nb = b[:idx] + (b[idx] + 1,) + b[idx + 1:]
            out[nb] = out.get(nb, 0) + coeff * jet_sym(1, j)
    return out


def _validate_modes(modes) -> tuple:
    modes = tuple(int(m) for m in modes)
    if not modes:
        raise UsageError("at least one mode is required")
    if any(m > -2 for m in modes):
        raise UsageError("modes must be <= -2")
    if any(a > b for a, b in zip(modes, modes[1:])):
        raise UsageError("modes must increase weakly left to right (most negative outermost)")
    return modes


def coincident_specialize(modes, spacing=None, normalization: str = "ratio") -> dict:
    """P_{m, m'}(g|w) for the word m = modes (outermost first).

    Returns a dict from the canonical word m' to the coefficient, a
    sympy expression in c and the jets G{r} at w.
    """
    modes = _validate_modes(modes)
    k = len(modes)
    fam = build_family(k, normalization)
    # point j carries mode modes[k - j]; point k is outermost
    pders = {j: -2 - modes[k - j] for j in range(1, k + 1)}
    result: dict = {}
    for S, op in fam.items():
        zero_b = tuple(0 for _ in S)
        expansion: dict = {}
        for key, coeff in op.items():
            part = {zero_b: sp.Integer(1)}
            for j, order in key:
                for _ in range(order):
                    part = _apply_partial(part, j, S)
            for b, cf in part.items():
                expansion[b] = expansion.get(b, 0) + coeff * cf
        for j in range(1, k + 1):
            for _ in range(pders[j]):
                expansion = _apply_partial(expansion, j, S)
            factor = sp.Rational((-1) ** pders[j], math.factorial(pders[j]))
            expansion = {b: cf * factor for b, cf in expansion.items()}
        for b, cf in expansion.items():
            scale = 1
            word = []
            for pos in reversed(range(len(S))):
                scale *= (-1) ** b[pos] * math.factorial(b[pos])
                word.append(-2 - b[pos])
            for canon, wc in _reorder(tuple(word)).items():
                result[canon] = result.get(canon, 0) + cf * scale * wc
    out = {}
    for word, expr in result.items():
        value = coincident_limit(sp.together(expr), k, spacing)
        if value != 0:
            out[word] = value
    return dict(sorted(out.items(), key=lambda kv: (len(kv[0]), kv[0]), reverse=True))


def rename_one_point(expr, prefix: str):
    """Replace G{r} by ``{prefix}{r}``."""
    mapping = {}
    for s in sp.sympify(expr).free_symbols:
        if s.name.startswith("G") and "_" not in s.name:
            mapping[s] = sp.Symbol(f"{prefix}{s.name[1:]}")
    return sp.sympify(expr).xreplace(mapping)


def identity_jets(max_order: int, k: int = 1) -> dict:
    subs = {}
    for r in range(max_order + 1):
        subs[one_point_sym(r)] = WBASE if r == 0 else (1 if r == 1 else 0)
        for j in range(1, k + 1):
            subs[jet_sym(r, j)] = w_sym(j) if r == 0 else (1 if r == 1 else 0)
    return subs


def mobius_jets(order: int, prefix: str = "G"):
    """Jets of (a z + b)/(c z + d) at w as exact symbolic expressions."""
    a, b, cc, d, z = sp.symbols("a b mc d z")
    f = (a * z + b) / (cc * z + d)
    out = {}
    for r in range(order + 1):
        out[sp.Symbol(f"{prefix}{r}")] = sp.diff(f, z, r).subs(z, WBASE)
    return out


def schwarzian_mobius_check() -> bool:
    jets = mobius_jets(3)
    s = schwarzian(*(jets[sp.Symbol(f"G{r}")] for r in (1, 2, 3)))
    return sp.simplify(s) == 0


# -- cocycle ------------------------------------------------------------

def _poly_to_sympy(p: Poly):
    total = sp.Integer(0)
    for mono, coeff in p.items():
        term = sp.Rational(coeff.numerator, coeff.denominator)
        for n, e in mono:
            term *= sp.Symbol(n) ** e
        total += term
    return total


def composite_jets(order: int):
    """Jets C_r of g1 o g2 at w from A_r (g2 at w) and B_r (g1 at g2(w))."""
    inner = TruncSeries.univariate("z", [0] + [Poly.gen(f"A{r}") / math.factorial(r)
                                                for r in range(1, order + 1)], order)
    outer = TruncSeries.univariate("z", [0] + [Poly.gen(f"B{r}") / math.factorial(r)
                                                for r in range(1, order + 1)], order)
    comp = series_compose(outer, inner)
    out = {sp.Symbol("C0"): sp.Symbol("B0")}
    for r in range(1, order + 1):
        out[sp.Symbol(f"C{r}")] = _poly_to_sympy(comp.coefficient(r)) * math.factorial(r)
    return out


def _law(modes, normalization="ratio"):
    if not modes:
        return {(): sp.Integer(1)}
    return coincident_specialize(modes, normalization=normalization)


def cocycle_check(k: int, order: int, mobius: bool = False, normalization: str = "ratio") -> bool:
    """P(g1 o g2|w) = sum P(g2|w) P(g1|g2(w)) on words of length k."""
    if k == 1:
        words = [(-2 - p,) for p in range(0, order - 2)]
    elif k == 2:
        words = [(-2, -2)]
    else:
        raise UsageError("cocycle_check supports k = 1 and k = 2")
    if not words:
        raise UsageError("jet order too small")
    comp = composite_jets(order + 2)
    mob = {}
    if mobius:
        # jets of (az+b)/(cz+d): r! (-c)^(r-1) (ad-bc) / (cz+d)^(r+1), with
        # c, cz+d and ad-bc algebraically independent
        for prefix in ("A", "B"):
            cc, den, det = sp.symbols(f"{prefix}c {prefix}D {prefix}det")
            for rr in range(1, order + 3):
                mob[sp.Symbol(f"{prefix}{rr}")] = (math.factorial(rr) * (-cc) ** (rr - 1) * det
                                                   / den ** (rr + 1))
    for m in words:
        law = _law(m, normalization)
        lhs_all = {mp: rename_one_point(v, "C").xreplace(comp) for mp, v in law.items()}
        rhs_all: dict = {}
        for mid, v2 in law.items():
            v2 = rename_one_point(v2, "A")
            for mp, v1 in _law(mid, normalization).items():
                v1 = rename_one_point(v1, "B")
                rhs_all[mp] = rhs_all.get(mp, 0) + v2 * v1
        for mp in set(lhs_all) | set(rhs_all):
            diff = lhs_all.get(mp, 0) - rhs_all.get(mp, 0)
            if mob:
                diff = diff.xreplace(mob)
            if sp.cancel(sp.together(diff)) != 0:
                return False
        if mob and () in lhs_all:
            # the anomaly vanishes for Mobius pairs
            if sp.cancel(sp.together(lhs_all[()].xreplace(mob))) != 0:
                return False
    return True


# -- structural checks ----------------------------------------------------

def tail_factorization_check(k: int, j: int) -> bool:
    """P_S^(k) = prod_{i=j}^k g'(w_i)^2 P_{S minus {j..k}}^(j-1) for S with the tail."""
    if not 1 <= j <= k:
        raise UsageError("need 1 <= j <= k")
    J, levels = family_levels(k)
    fam = levels[k - 1]
    tail = tuple(range(j, k + 1))
    factor = J.R.one
    for i in tail:
        factor *= J.jet(1, i) ** 2
    lower = levels[j - 2] if j > 1 else {(): {(): J.R.one}}
    for S, op in fam.items():
        if not set(tail) <= set(S):
            continue
        rest = tuple(s for s in S if s not in tail)
        ref = lower.get(rest, {})
        for key in set(op) | set(ref):
            if not J.is_zero(op.get(key, J.R.zero) - factor * ref.get(key, J.R.zero)):
                return False
    return True


def identity_check(k: int) -> bool:
    """At identity jets P_S is the identity for the full set and 0 otherwise."""
    J, levels = family_levels(k)
    values = {}
    for j in range(1, k + 1):
        values[J.idx[f"G0_{j}"]] = J.w(j)
        values[J.idx[f"I{j}"]] = J.R.one
        for r in range(1, J.top + 1):
            values[J.idx[f"G{r}_{j}"]] = J.R.one if r == 1 else J.R.zero
    for i, j in J.pairs:
        values[J.idx[f"A{i}{j}"]] = J.inv_w(i, j)
    full = tuple(range(1, k + 1))
    for S, op in levels[k - 1].items():
        for key, coeff in op.items():
            want = J.R.one if (S == full and key == ()) else J.R.zero
            if not J.is_zero(J.substitute(coeff, values) - want):
                return False
    return True


def holomorphy_check(k: int) -> bool:
    """No coefficient of P^(k) has a pole when two points merge."""
    J, levels = family_levels(k)
    for i, j in combinations(range(1, k + 1), 2):
        for op in levels[k - 1].values():
            for coeff in op.values():
                if not _pair_regular(J, coeff, i, j):
                    return False
    return True


def _pair_regular(J: JetRing, p, i: int, j: int) -> bool:
    """Let w_j = w_i + eps; p is regular iff p * (pole factors) vanishes to their order.

    The only factors that vanish as eps -> 0 are g(w_i) - g(w_j) and
    w_i - w_j, of exact order 1 each; every other generator becomes a
    power series in eps with an invertible leading term.
    """
    ia, ib = J.idx[f"A{i}{j}"], J.idx[f"B{i}{j}"]
    a = max((m[ia] for m in p.monoms()), default=0)
    b = max((m[ib] for m in p.monoms()), default=0)
    if a == b == 0:
        return True
    order = a + b - 1
    eps = J.gen["eps"]

    def trunc(q):
        return J.R({m: c for m, c in q.items() if m[J.idx["eps"]] <= order})

    def shifted(r):
        # g^(r)(w_i + eps) - g^(r)(w_i)
        return sum((J.jet(r + s, i) * eps ** s * QQ(1, math.factorial(s))
                    for s in range(1, order + 1)), J.R.zero)

    def geometric(inv, delta):
        # 1/(x + delta) = inv * sum (-inv delta)^n for inv = 1/x
        out, term = J.R.zero, inv
        for _ in range(order + 1):
            out += term
            term = trunc(-term * inv * delta)
        return out

    values = {J.idx[f"w{j}"]: J.w(i) + eps}
    reach = J.top - order
    for r in range(J.top + 1):
        gi = J.idx[f"G{r}_{j}"]
        if r <= reach:
            values[gi] = J.jet(r, i) + shifted(r)
        elif any(m[gi] for m in p.monoms()):
            raise UsageError("jet order too high for the pair expansion")
    values[J.idx[f"I{j}"]] = geometric(J.inv_jet1(i), shifted(1))
    for m in range(1, J.k + 1):
        if m in (i, j):
            continue
        lo, hi = min(j, m), max(j, m)
        sign = 1 if j < m else -1
        values[J.idx[f"A{lo}{hi}"]] = sign * geometric(J.inv_g(i, m), shifted(0))
        values[J.idx[f"B{lo}{hi}"]] = sign * geometric(J.inv_w(i, m), eps)
    # the pole factors themselves: g(w_i) - g(w_j) = -shifted(0), w_i - w_j = -eps
    values[ia] = None
    values[ib] = None
    cleared = J.R.zero
    for mono, coeff in p.items():
        rest = list(mono)
        rest[ia] = rest[ib] = 0
        term = J.R({tuple(rest): coeff})
        for base, e in ((-shifted(0), a - mono[ia]), (-eps, b - mono[ib])):
            if e:
                term = trunc(term * base ** e)
        cleared += trunc(term)
    del values[ia], values[ib]
    low = J.substitute(cleared, values, order)
    epsi = J.idx["eps"]
    parts: dict = {}
    for mono, coeff in low.items():
        parts.setdefault(mono[epsi], {})[mono] = coeff
    return all(J.is_zero(J.R(part)) for part in parts.values())


def covariant_two_point_check() -> bool:
    """Product of one-point laws at w1, w2 against the two-point family.

    For affine g the two-point family must equal the product of the
    one-point families; for general g the product of one-point laws must
    satisfy the composition law point by point.
    """
    one = build_family(1)
    a, b = sp.symbols("alpha beta")
    affine = {}
    for j in (1, 2):
        affine[jet_sym(0, j)] = a * w_sym(j) + b
        affine[jet_sym(1, j)] = a
        for r in range(2, 9):
            affine[jet_sym(r, j)] = 0
    two = build_family(2)
    for S, op in two.items():
        got = {key: sp.cancel(sp.together(c.xreplace(affine))) for key, c in op.items()}
        got = {key: v for key, v in got.items() if v != 0}
        p1 = one[(1,)][()] if 1 in S else one[()][()]
        p2 = one[(1,)][()].xreplace({jet_sym(1, 1): jet_sym(1, 2)}) if 2 in S \
            else one[()][()].xreplace({jet_sym(r, 1): jet_sym(r, 2) for r in range(1, 4)})
        prod = sp.cancel((p1 * p2).xreplace(affine))
        want = {(): prod} if prod != 0 else {}
        if set(got) != set(want) or any(sp.cancel(got[key] - want[key]) != 0 for key in got):
            return False
    return cocycle_check(1, 5)


def law_lines(modes) -> list:
    """Rendered (m', coefficient) pairs for the word ``modes``."""
    lines = []
    for word, expr in coincident_specialize(modes).items():
        label = "(" + " ".join(map(str, word)) + ")"
        lines.append((label, render(expr)))
    return lines


def render(expr) -> str:
    """Text form, naming the Schwarzian when it appears at one point."""
    expr = sp.cancel(expr)
    g1, g2, g3 = one_point_sym(1), one_point_sym(2), one_point_sym(3)
    schw = sp.cancel(schwarzian(g1, g2, g3))
    ratio = sp.cancel(expr / (C / 12 * schw))
    if ratio == 1:
        return "c/12 * schwarzian"
    if expr.free_symbols <= {g1} and expr != 0:
        return str(sp.factor(expr)).replace("**", "^")
    return str(sp.factor(expr)).replace("**", "^")
