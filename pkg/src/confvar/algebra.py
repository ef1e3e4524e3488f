"""Exact scalars, multivariate polynomials and truncated formal series.

``Poly`` is the exact scalar type used everywhere: a polynomial with
rational coefficients in named commuting generators (typically ``c``,
``d1``, ``d2``, ``d3``, plus point symbols such as ``w``).  Plain
integers and fractions are the constant polynomials.

``TruncSeries`` carries terms together with a per-variable window
``[low, order]``; every operation computes the tightest window in which
its result is still exact.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .errors import CompositionDomainError, UsageError


def binomial(m: int, j: int) -> int:
    """Generalized binomial coefficient m(m-1)...(m-j+1)/j! for integer m."""
    if j < 0:
        return 0
    if m >= 0:
        return math.comb(m, j)
    sign = -1 if j % 2 else 1
    return sign * math.comb(j - m - 1, j)


def _mono_mul(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b:
        return a
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        na, ea = a[i]
        nb, eb = b[j]
        if na == nb:
            out.append((na, ea + eb))
            i += 1
            j += 1
        elif na < nb:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out)


def _norm(v):
    # integral values are kept as int: int arithmetic is much cheaper
    if type(v) is Fraction and v.denominator == 1:
        return v.numerator
    return v


def _to_fraction(x):
    """Exact rational as int (when integral) or Fraction."""
    if isinstance(x, bool):
        return int(x)
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return _norm(x)
    if isinstance(x, str):
        return _norm(Fraction(x))
    raise TypeError(f"not an exact rational: {x!r}")


class Poly:
    """Immutable polynomial with exact rational coefficients.

    Coefficients are ints when integral and Fractions otherwise.

    Monomials are tuples of ``(generator, exponent)`` pairs sorted by
    generator name, so the representation is canonical.
    """

    __slots__ = ("_t", "_h")

    def __init__(self, terms: Mapping | None = None):
        clean = {}
        if terms:
            for mono, coeff in terms.items():
                coeff = _to_fraction(coeff)
                if coeff:
                    key = tuple(sorted((n, e) for n, e in mono if e))
                    clean[key] = _norm(clean.get(key, 0) + coeff)
            clean = {k: v for k, v in clean.items() if v}
        self._t = clean
        self._h = None

    @classmethod
    def _raw(cls, terms: dict) -> "Poly":
        p = cls.__new__(cls)
        p._t = terms
        p._h = None
        return p

    @classmethod
    def const(cls, value) -> "Poly":
        value = _to_fraction(value)
        return cls._raw({(): value} if value else {})

    @classmethod
    def gen(cls, name: str, exp: int = 1) -> "Poly":
        if exp == 0:
            return cls.const(1)
        return cls._raw({((name, exp),): 1})

    @staticmethod
    def coerce(x) -> "Poly":
        if isinstance(x, Poly):
            return x
        return Poly.const(x)

    # -- inspection -------------------------------------------------
    def terms(self) -> dict:
        return dict(self._t)

    def items(self):
        return self._t.items()

    def is_zero(self) -> bool:
        return not self._t

    def __bool__(self):
        return bool(self._t)

    def is_const(self) -> bool:
        return not self._t or (len(self._t) == 1 and () in self._t)

    def const_value(self) -> Fraction:
        if not self.is_const():
            raise UsageError(f"not a constant: {self}")
        return self._t.get((), Fraction(0))

    def gens(self) -> set:
        return {n for mono in self._t for n, _ in mono}

    def degree(self, name: str | None = None) -> int:
        if not self._t:
            return -1
        if name is None:
            return max(sum(e for _, e in m) for m in self._t)
        return max(dict(m).get(name, 0) for m in self._t)

    # -- arithmetic -------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Poly):
            if isinstance(other, (int, Fraction)):
                other = Poly.const(other)
            else:
                return NotImplemented
        if not other._t:
            return self
        if not self._t:
            return other
        out = dict(self._t)
        for k, v in other._t.items():
            s = out.get(k)
            if s is None:
                out[k] = v
            else:
                s = _norm(s + v)
                if s:
                    out[k] = s
                else:
                    del out[k]
        return Poly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw({k: -v for k, v in self._t.items()})

    def __sub__(self, other):
        if not isinstance(other, Poly):
            if isinstance(other, (int, Fraction)):
                other = Poly.const(other)
            else:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            if isinstance(other, (int, Fraction)):
                if not other:
                    return Poly._raw({})
                if type(other) is int:
                    if other == 1:
                        return self
                    return Poly._raw({k: v * other for k, v in self._t.items()})
                return Poly._raw({k: _norm(v * other) for k, v in self._t.items()})
            return NotImplemented
        if not self._t or not other._t:
            return Poly._raw({})
        out: dict = {}
        for ka, va in self._t.items():
            for kb, vb in other._t.items():
                k = _mono_mul(ka, kb)
                s = out.get(k)
                out[k] = va * vb if s is None else s + va * vb
        return Poly._raw({k: _norm(v) for k, v in out.items() if v})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Poly):
            other = other.const_value()
        other = _to_fraction(other)
        if not other:
            raise ZeroDivisionError("division of a polynomial by zero")
        return Poly._raw({k: _norm(Fraction(v) / other) for k, v in self._t.items()})

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise UsageError("polynomial powers must be nonnegative integers")
        result = Poly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self._t == other._t
        if isinstance(other, (int, Fraction)):
            return self._t == Poly.const(other)._t
        return NotImplemented

    def __hash__(self):
        if self._h is None:
            if self.is_const():
                self._h = hash(self._t.get((), Fraction(0)))
            else:
                self._h = hash(frozenset(self._t.items()))
        return self._h

    # -- calculus and substitution --------------------------------
    def diff(self, name: str) -> "Poly":
        out = {}
        for mono, coeff in self._t.items():
            d = dict(mono)
            e = d.get(name, 0)
            if not e:
                continue
            if e == 1:
                del d[name]
            else:
                d[name] = e - 1
            key = tuple(sorted(d.items()))
            out[key] = _norm(out.get(key, 0) + coeff * e)
        return Poly._raw({k: v for k, v in out.items() if v})

    def subs(self, mapping: Mapping) -> "Poly":
        """Substitute generators by polynomials or numbers."""
        vals = {k: Poly.coerce(v) for k, v in mapping.items()}
        result = Poly._raw({})
        power_cache: dict = {}
        for mono, coeff in self._t.items():
            term = Poly._raw({(): coeff})
            rest = []
            for n, e in mono:
                if n in vals:
                    key = (n, e)
                    if key not in power_cache:
                        power_cache[key] = vals[n] ** e
                    term = term * power_cache[key]
                else:
                    rest.append((n, e))
            if rest:
                term = term * Poly._raw({tuple(rest): 1})
            result = result + term
        return result

    def evaluate(self, values: Mapping):
        """Numeric value with every generator assigned (exact or float)."""
        total = 0
        for mono, coeff in self._t.items():
            term = coeff
            for n, e in mono:
                term = term * values[n] ** e
            total = total + term
        return total

    def coeffs_in(self, name: str) -> dict:
        """Map exponent of ``name`` to the coefficient polynomial."""
        out: dict = {}
        for mono, coeff in self._t.items():
            d = dict(mono)
            e = d.pop(name, 0)
            out.setdefault(e, {})[tuple(sorted(d.items()))] = coeff
        return {e: Poly._raw(t) for e, t in sorted(out.items())}

    def coeff_monomial(self, exps: Mapping) -> "Poly":
        """Coefficient of the monomial ``exps`` in the generators it names."""
        names = set(exps)
        out = {}
        for mono, coeff in self._t.items():
            d = dict(mono)
            if all(d.get(n, 0) == exps[n] for n in names):
                rest = tuple((n, e) for n, e in mono if n not in names)
                out[rest] = coeff
        return Poly._raw(out)

    def drop_powers(self, names: Iterable[str], max_exp: int = 1) -> "Poly":
        """Discard monomials where a named generator exceeds ``max_exp``."""
        names = set(names)
        return Poly._raw({
            m: v for m, v in self._t.items()
            if all(e <= max_exp for n, e in m if n in names)
        })

    # -- rendering --------------------------------------------------
    def _sorted_items(self):
        return sorted(self._t.items(), key=lambda kv: kv[0])

    def to_sexp(self) -> str:
        parts = ["(poly"]
        for mono, coeff in self._sorted_items():
            s = f" (term {coeff.numerator}/{coeff.denominator}"
            for n, e in mono:
                s += f" ({n} {e})"
            parts.append(s + ")")
        return "".join(parts) + ")"

    def __str__(self):
        if not self._t:
            return "0"
        items = sorted(
            self._t.items(),
            key=lambda kv: (-sum(e for _, e in kv[0]), kv[0]),
        )
        out = []
        for idx, (mono, coeff) in enumerate(items):
            neg = coeff < 0
            a = -coeff if neg else coeff
            factors = [n if e == 1 else f"{n}^{e}" for n, e in mono]
            if not factors:
                body = str(a)
            elif a == 1:
                body = "*".join(factors)
            elif a.denominator == 1:
                body = f"{a.numerator}*" + "*".join(factors)
            else:
                body = f"{a.numerator}/{a.denominator}*" + "*".join(factors)
            if idx == 0:
                out.append(f"-{body}" if neg else body)
            else:
                out.append(f" - {body}" if neg else f" + {body}")
        return "".join(out)

    def __repr__(self):
        return f"Poly({self})"


ZERO = Poly.const(0)
ONE = Poly.const(1)


def symbols(*names: str):
    """Generators as polynomials, e.g. ``c, d1 = symbols("c", "d1")``."""
    return tuple(Poly.gen(n) for n in names)


# ---------------------------------------------------------------------
# S-expressions
# ---------------------------------------------------------------------

def parse_sexp(text: str):
    """Parse one S-expression into nested lists of atom strings."""
    tokens = text.replace("(", " ( ").replace(")", " ) ").split()
    pos = 0

    def read():
        nonlocal pos
        if pos >= len(tokens):
            raise UsageError("unexpected end of S-expression")
        tok = tokens[pos]
        pos += 1
        if tok == "(":
            items = []
            while pos < len(tokens) and tokens[pos] != ")":
                items.append(read())
            if pos >= len(tokens):
                raise UsageError("unbalanced parentheses")
            pos += 1
            return items
        if tok == ")":
            raise UsageError("unexpected ')'")
        return tok

    result = read()
    if pos != len(tokens):
        raise UsageError("trailing tokens after S-expression")
    return result


def poly_from_tree(tree) -> Poly:
    if not isinstance(tree, list) or not tree or tree[0] != "poly":
        raise UsageError("expected (poly ...)")
    terms = {}
    for term in tree[1:]:
        if term[0] != "term":
            raise UsageError("expected (term ...)")
        coeff = Fraction(term[1])
        mono = tuple((f[0], int(f[1])) for f in term[2:])
        terms[mono] = terms.get(mono, 0) + coeff
    return Poly(terms)


def poly_from_sexp(text: str) -> Poly:
    return poly_from_tree(parse_sexp(text))


# ---------------------------------------------------------------------
# Truncated series
# ---------------------------------------------------------------------

class TruncSeries:
    """Sparse truncated series in one or more variables.

    Each variable ``v`` has a window ``[low, order]``: stored exponents
    lie in it, and coefficients inside it are exact.  Variables are kept
    in lexicographic order of their names.
    """

    __slots__ = ("vars", "lows", "orders", "_terms")

    def __init__(self, variables, orders, terms=None, lows=None):
        variables = tuple(variables)
        orders = tuple(int(o) for o in orders)
        lows = tuple(int(x) for x in lows) if lows is not None else (0,) * len(variables)
        if not (len(variables) == len(orders) == len(lows)):
            raise UsageError("variables, orders and lows must have equal length")
        if len(set(variables)) != len(variables):
            raise UsageError("duplicate series variable")
        perm = sorted(range(len(variables)), key=lambda i: variables[i])
        self.vars = tuple(variables[i] for i in perm)
        self.orders = tuple(orders[i] for i in perm)
        self.lows = tuple(lows[i] for i in perm)
        clean = {}
        for exps, coeff in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) != len(variables):
                raise UsageError("exponent tuple has wrong length")
            exps = tuple(exps[i] for i in perm)
            coeff = Poly.coerce(coeff)
            if not coeff:
                continue
            for e, lo, hi in zip(exps, self.lows, self.orders):
                if e < lo:
                    raise UsageError("term below the declared lowest exponent")
            if any(e > hi for e, hi in zip(exps, self.orders)):
                continue
            clean[exps] = clean[exps] + coeff if exps in clean else coeff
        self._terms = {k: v for k, v in clean.items() if v}

    @classmethod
    def _make(cls, variables, orders, lows, terms):
        s = cls.__new__(cls)
        s.vars = variables
        s.orders = orders
        s.lows = lows
        s._terms = terms
        return s

    @classmethod
    def univariate(cls, var: str, coeffs, order: int | None = None, low: int = 0):
        """Series sum_i coeffs[i] var^(low+i)."""
        coeffs = list(coeffs)
        if order is None:
            order = low + len(coeffs) - 1
        terms = {(low + i,): c for i, c in enumerate(coeffs)}
        return cls((var,), (order,), terms, (low,))

    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items())

    def in_window(self, exps) -> bool:
        return all(lo <= e <= hi for e, lo, hi in zip(exps, self.lows, self.orders))

    def coefficient(self, exps) -> Poly:
        if isinstance(exps, int):
            exps = (exps,)
        return self._terms.get(tuple(exps), ZERO)

    def is_univariate(self) -> bool:
        return len(self.vars) == 1

    # -- arithmetic -------------------------------------------------
    def _check_same(self, other: "TruncSeries"):
        if self.vars != other.vars:
            raise UsageError(f"mismatched series variables {self.vars} vs {other.vars}")

    def __add__(self, other):
        if not isinstance(other, TruncSeries):
            other = self._constant(other)
        self._check_same(other)
        orders = tuple(min(a, b) for a, b in zip(self.orders, other.orders))
        lows = tuple(min(a, b) for a, b in zip(self.lows, other.lows))
        out = {k: v for k, v in self._terms.items()
               if all(e <= o for e, o in zip(k, orders))}
        for k, v in other._terms.items():
            if any(e > o for e, o in zip(k, orders)):
                continue
            s = out[k] + v if k in out else v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return TruncSeries._make(self.vars, orders, lows, out)

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries._make(self.vars, self.orders, self.lows,
                                 {k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, TruncSeries):
            other = self._constant(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def _constant(self, value):
        value = Poly.coerce(value)
        lows = tuple(min(0, lo) for lo in self.lows)
        terms = {(0,) * len(self.vars): value} if value else {}
        return TruncSeries._make(self.vars, self.orders, lows, terms)

    def scale(self, factor) -> "TruncSeries":
        factor = Poly.coerce(factor)
        out = {}
        for k, v in self._terms.items():
            p = v * factor
            if p:
                out[k] = p
        return TruncSeries._make(self.vars, self.orders, self.lows, out)

    def mul(self, other: "TruncSeries", reduce: Callable | None = None) -> "TruncSeries":
        """Product; ``reduce`` is applied to every resulting coefficient."""
        self._check_same(other)
        orders = tuple(
            min(oa + lb, ob + la)
            for oa, ob, la, lb in zip(self.orders, other.orders, self.lows, other.lows)
        )
        lows = tuple(a + b for a, b in zip(self.lows, other.lows))
        out: dict = {}
        for ka, va in self._terms.items():
            for kb, vb in other._terms.items():
                k = tuple(a + b for a, b in zip(ka, kb))
                if any(e > o for e, o in zip(k, orders)):
                    continue
                p = va * vb
                out[k] = out[k] + p if k in out else p
        if reduce is not None:
            out = {k: reduce(v) for k, v in out.items()}
        out = {k: v for k, v in out.items() if v}
        return TruncSeries._make(self.vars, orders, lows, out)

    def __mul__(self, other):
        if isinstance(other, TruncSeries):
            return self.mul(other)
        if isinstance(other, (Poly, int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (Poly, int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def map_coefficients(self, fn: Callable) -> "TruncSeries":
        out = {}
        for k, v in self._terms.items():
            p = fn(v)
            if p:
                out[k] = p
        return TruncSeries._make(self.vars, self.orders, self.lows, out)

    def derivative(self, var: str | None = None) -> "TruncSeries":
        """Formal derivative; the window shifts down by one."""
        if var is None:
            if not self.is_univariate():
                raise UsageError("derivative of a multivariate series needs a variable")
            var = self.vars[0]
        i = self.vars.index(var)
        out = {}
        for k, v in self._terms.items():
            e = k[i]
            if e == 0:
                continue
            nk = k[:i] + (e - 1,) + k[i + 1:]
            out[nk] = v * e
        orders = self.orders[:i] + (self.orders[i] - 1,) + self.orders[i + 1:]
        lows = self.lows[:i] + (min(self.lows[i], 0) if self.lows[i] >= 0 else self.lows[i] - 1,) + self.lows[i + 1:]
        return TruncSeries._make(self.vars, orders, lows, out)

    def truncate(self, orders) -> "TruncSeries":
        orders = tuple(min(a, b) for a, b in zip(orders, self.orders))
        out = {k: v for k, v in self._terms.items()
               if all(e <= o for e, o in zip(k, orders))}
        return TruncSeries._make(self.vars, orders, self.lows, out)

    # -- comparison -------------------------------------------------
    def agrees_with(self, other: "TruncSeries") -> bool:
        """Termwise equality on the common sound window."""
        self._check_same(other)
        lows = tuple(max(a, b) for a, b in zip(self.lows, other.lows))
        orders = tuple(min(a, b) for a, b in zip(self.orders, other.orders))
        keys = set(self._terms) | set(other._terms)
        for k in keys:
            if all(lo <= e <= hi for e, lo, hi in zip(k, lows, orders)):
                if self.coefficient(k) != other.coefficient(k):
                    return False
        return True

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return (self.vars == other.vars and self.orders == other.orders
                and self.lows == other.lows and self._terms == other._terms)

    def __hash__(self):
        return hash((self.vars, self.orders, self.lows, frozenset(self._terms.items())))

    # -- rendering --------------------------------------------------
    def to_sexp(self) -> str:
        out = f"(series (vars {' '.join(self.vars)}) (orders {' '.join(map(str, self.orders))})"
        if any(self.lows):
            out += f" (lows {' '.join(map(str, self.lows))})"
        for k, v in self.items():
            out += f" (term {v.to_sexp()} (exps {' '.join(map(str, k))}))"
        return out + ")"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for k, v in self.items():
            mono = "*".join(
                n if e == 1 else f"{n}^{e}" for n, e in zip(self.vars, k) if e
            )
            coeff = str(v)
            if not mono:
                parts.append(coeff)
            elif coeff == "1":
                parts.append(mono)
            else:
                parts.append(f"({coeff})*{mono}")
        return " + ".join(parts)

    def __repr__(self):
        return f"TruncSeries({self.vars}, orders={self.orders}, lows={self.lows}: {self})"


def series_from_sexp(text: str) -> TruncSeries:
    tree = parse_sexp(text)
    if tree[0] != "series":
        raise UsageError("expected (series ...)")
    variables = orders = None
    lows = None
    terms = {}
    for item in tree[1:]:
        head = item[0]
        if head == "vars":
            variables = item[1:]
        elif head == "orders":
            orders = [int(x) for x in item[1:]]
        elif head == "lows":
            lows = [int(x) for x in item[1:]]
        elif head == "term":
            coeff = poly_from_tree(item[1])
            exps = tuple(int(x) for x in item[2][1:])
            terms[exps] = coeff
        else:
            raise UsageError(f"unknown series field {head}")
    if variables is None or orders is None:
        raise UsageError("series needs vars and orders")
    return TruncSeries(variables, orders, terms, lows)


def series_compose(outer: TruncSeries, inner: TruncSeries,
                   reduce: Callable | None = None) -> TruncSeries:
    """Compose univariate series, ``outer(inner(z))``.

    ``inner`` must have zero constant term and ``outer`` must be a power
    series.  The result is exact up to the largest order both inputs
    support.
    """
    if not (outer.is_univariate() and inner.is_univariate()):
        raise UsageError("series_compose needs univariate series")
    if outer.vars != inner.vars:
        raise UsageError(f"mismatched variables {outer.vars} vs {inner.vars}")
    if outer.lows[0] < 0 or inner.lows[0] < 0:
        raise UsageError("series_compose needs power series")
    if inner.coefficient(0):
        raise CompositionDomainError("inner series has a nonzero constant term")
    var = inner.vars[0]
    exps = [k[0] for k in inner.terms()]
    val = min(exps) if exps else inner.orders[0] + 1
    n_out = outer.orders[0]
    order = min(inner.orders[0], (n_out + 1) * val - 1)
    order = max(order, 0) if n_out >= 0 else -1
    inner_t = inner.truncate((order,))
    result = TruncSeries._make((var,), (order,), (0,), {})
    for i in range(n_out, -1, -1):
        result = result.mul(inner_t, reduce) if result._terms else result
        result = TruncSeries._make((var,), (order,), (0,), result._terms)
        a = outer.coefficient(i)
        if a:
            result = result + TruncSeries._make((var,), (order,), (0,), {(0,): a})
    return TruncSeries._make((var,), (order,), (0,),
                             {k: v for k, v in result._terms.items() if k[0] <= order})


_REGIONS = {
    "|x2|<|x1|": "x2", "x2<x1": "x2",
    "|x1|<|x2|": "x1", "x1<x2": "x1",
}


def binomial_expand(m: int, region: str = "|x2|<|x1|", order: int = 8,
                    names=("x1", "x2")) -> TruncSeries:
    """Expansion of (x1 - x2)^m valid in ``region``.

    The small variable carries nonnegative powers up to ``order``.
    """
    if region not in _REGIONS:
        raise UsageError(f"unknown region {region!r}")
    if order < 0:
        raise UsageError("order must be nonnegative")
    x1, x2 = names
    small = x2 if _REGIONS[region] == "x2" else x1
    big = x1 if small == x2 else x2
    # (x1 - x2)^m = s^m (big - small)^m with s = +1 if big is x1
    sign = 1 if big == x1 else (-1) ** (m % 2)
    terms = {}
    top = order if m < 0 else min(order, m)
    for j in range(top + 1):
        coeff = sign * binomial(m, j) * (-1) ** j
        if coeff:
            e = {big: m - j, small: j}
            terms[(e[x1], e[x2])] = coeff
    lo = {big: m - order, small: 0}
    hi = {big: m, small: order}
    return TruncSeries((x1, x2), (hi[x1], hi[x2]), terms, (lo[x1], lo[x2]))


def formal_delta(order: int, var: str = "x") -> TruncSeries:
    """Symmetric window of the formal delta sum_n x^n."""
    if not isinstance(order, int) or order < 0:
        raise UsageError("formal_delta order must be a nonnegative integer")
    terms = {(n,): 1 for n in range(-order, order + 1)}
    return TruncSeries((var,), (order,), terms, (-order,))
