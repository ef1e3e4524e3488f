"""Laurent vector fields in the basis h_{n;w}(z) = (w - z)^(n+1).

A field is a finite combination of basis fields sharing one center.  In
the local coordinate zeta = z - w the basis reads
h_{n;w} = (-1)^(n+1) zeta^(n+1), which is how brackets are computed.
"""

from __future__ import annotations

from .algebra import ZERO, Poly, TruncSeries, binomial, parse_sexp, poly_from_tree
from .errors import TruncationError, UsageError


class LaurentVectorField:
    """Immutable field sum_n a_n h_{n;center}.

    ``valid_from`` marks a truncated expansion: coefficients with index
    below it are unknown, those at or above it are exact.
    """

    __slots__ = ("center", "_terms", "valid_from")

    def __init__(self, center, terms=None, valid_from: int | None = None):
        self.center = Poly.coerce(center)
        clean = {}
        for n, a in (terms or {}).items():
            a = Poly.coerce(a)
            if a:
                clean[int(n)] = clean[int(n)] + a if int(n) in clean else a
        self._terms = {n: a for n, a in clean.items() if a}
        self.valid_from = valid_from

    def terms(self) -> dict:
        return dict(self._terms)

    def coefficient(self, n: int) -> Poly:
        return self._terms.get(n, ZERO)

    def is_exact(self) -> bool:
        return self.valid_from is None

    def _same_center(self, other):
        if self.center != other.center:
            raise UsageError("fields have different centers; recenter first")

    def __add__(self, other: "LaurentVectorField"):
        self._same_center(other)
        out = dict(self._terms)
        for n, a in other._terms.items():
            out[n] = out[n] + a if n in out else a
        return LaurentVectorField(self.center, out, _merge_valid(self.valid_from, other.valid_from))

    def __neg__(self):
        return LaurentVectorField(self.center, {n: -a for n, a in self._terms.items()}, self.valid_from)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor) -> "LaurentVectorField":
        factor = Poly.coerce(factor)
        return LaurentVectorField(self.center, {n: a * factor for n, a in self._terms.items()},
                                  self.valid_from)

    def __rmul__(self, factor):
        return self.scale(factor)

    def __eq__(self, other):
        if not isinstance(other, LaurentVectorField):
            return NotImplemented
        return (self.center == other.center and self._terms == other._terms
                and self.valid_from == other.valid_from)

    def __hash__(self):
        return hash((self.center, frozenset(self._terms.items()), self.valid_from))

    def agrees_with(self, other: "LaurentVectorField") -> bool:
        """Equality on the common window where both are exact."""
        self._same_center(other)
        floor = _merge_valid(self.valid_from, other.valid_from)
        for n in set(self._terms) | set(other._terms):
            if floor is not None and n < floor:
                continue
            if self.coefficient(n) != other.coefficient(n):
                return False
        return True

    def local_coefficients(self) -> dict:
        """Coefficients of zeta^p with zeta = z - center."""
        out = {}
        for n, a in self._terms.items():
            p = n + 1
            out[p] = a if p % 2 == 0 else -a
        return out

    def to_global(self, var: str = "z") -> Poly:
        """The field as a polynomial in ``var`` (requires all n >= -1)."""
        if not self.is_exact():
            raise UsageError("truncated field has no global polynomial form")
        z = Poly.gen(var)
        total = ZERO
        for n, a in self._terms.items():
            if n < -1:
                raise UsageError("fields with n <= -2 are not polynomial in z")
            total = total + a * (self.center - z) ** (n + 1)
        return total

    def to_sexp(self) -> str:
        out = f"(vf (center {self.center.to_sexp()})"
        for n in sorted(self._terms):
            out += f" (term {n} {self._terms[n].to_sexp()})"
        return out + ")"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for n in sorted(self._terms, reverse=True):
            a = str(self._terms[n])
            parts.append(f"h[{n}]" if a == "1" else f"({a})*h[{n}]")
        s = " + ".join(parts)
        if self.valid_from is not None:
            s += f" + O(h[{self.valid_from - 1}])"
        return s

    def __repr__(self):
        return f"LaurentVectorField(center={self.center}, {self})"


def _merge_valid(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return max(a, b)


def _from_local(center, coeffs: dict) -> LaurentVectorField:
    terms = {}
    for p, a in coeffs.items():
        n = p - 1
        terms[n] = a if p % 2 == 0 else -a
    return LaurentVectorField(center, terms)


def field_from_sexp(text: str) -> LaurentVectorField:
    tree = parse_sexp(text)
    if tree[0] != "vf":
        raise UsageError("expected (vf ...)")
    center = poly_from_tree(tree[1][1])
    terms = {int(t[1]): poly_from_tree(t[2]) for t in tree[2:]}
    return LaurentVectorField(center, terms)


def hn(n: int, w=0) -> LaurentVectorField:
    """The basis field h_{n;w}."""
    return LaurentVectorField(w, {n: 1})


def lie_bracket(X: LaurentVectorField, Y: LaurentVectorField) -> LaurentVectorField:
    """X dY - Y dX, computed on local monomials and converted back."""
    X._same_center(Y)
    if not (X.is_exact() and Y.is_exact()):
        raise UsageError("brackets need exact (untruncated) fields")
    xs = X.local_coefficients()
    ys = Y.local_coefficients()
    out: dict = {}
    for p, a in xs.items():
        for q, b in ys.items():
            # zeta^p d(zeta^q) - zeta^q d(zeta^p) = (q - p) zeta^(p+q-1)
            k = q - p
            if k:
                e = p + q - 1
                out[e] = out.get(e, ZERO) + a * b * k
    return _from_local(X.center, out)


def recenter(n: int, w, v, order: int = 8) -> LaurentVectorField:
    """Expand h_{n;w} in the basis h_{j;v}.

    Uses (w - z)^(n+1) = ((w - v) + (v - z))^(n+1).  For n >= -1 the sum
    is finite; for n <= -2 it is truncated to ``order`` terms.
    """
    w = Poly.coerce(w)
    v = Poly.coerce(v)
    if w == v:
        return hn(n, v)
    shift = w - v
    terms = {}
    if n >= -1:
        for j in range(n + 2):
            k = n - j
            terms[k] = binomial(n + 1, j) * shift ** j
        return LaurentVectorField(v, terms)
    if order < 1:
        raise UsageError("order must be at least 1 for n <= -2")
    for j in range(order):
        terms[n - j] = binomial(n + 1, j) * shift ** j
    return LaurentVectorField(v, terms, valid_from=n - order + 1)


def recenter_field(X: LaurentVectorField, v, order: int = 8) -> LaurentVectorField:
    """Re-express a field around ``v``, tracking the exact window."""
    v = Poly.coerce(v)
    total = LaurentVectorField(v)
    floor = X.valid_from
    for n, a in X.terms().items():
        part = recenter(n, X.center, v, order)
        total = LaurentVectorField(v, (total + part.scale(a)).terms(), None)
        if part.valid_from is not None:
            floor = part.valid_from if floor is None else max(floor, part.valid_from)
    return LaurentVectorField(v, total.terms(), floor)


def taylor_in_basis(hjet: TruncSeries, depth: int, center=0) -> LaurentVectorField:
    """Expand a holomorphic field given by its jet at ``center``.

    ``hjet`` is a power series in zeta = z - center.  The coefficient of
    h_{n;center} is (-1)^(n+1)/(n+1)! times the (n+1)-th derivative,
    i.e. (-1)^(n+1) times the Taylor coefficient of zeta^(n+1).
    """
    if not hjet.is_univariate() or hjet.lows[0] < 0:
        raise UsageError("taylor_in_basis needs a univariate power series")
    if depth + 1 > hjet.orders[0]:
        raise TruncationError(f"jet of order {hjet.orders[0]} cannot reach depth {depth}")
    terms = {}
    for n in range(-1, depth + 1):
        a = hjet.coefficient(n + 1)
        if a:
            terms[n] = a if (n + 1) % 2 == 0 else -a
    return LaurentVectorField(center, terms)


def differentiate_center(X: LaurentVectorField) -> LaurentVectorField:
    """Derivative with respect to the center, which must be one generator."""
    gens = X.center.gens()
    if len(gens) != 1 or X.center != Poly.gen(next(iter(gens))):
        raise UsageError("center must be a single symbolic generator")
    w = next(iter(gens))
    out: dict = {}
    for n, a in X.terms().items():
        if n + 1:
            out[n - 1] = out.get(n - 1, ZERO) + a * (n + 1)
        da = a.diff(w)
        if da:
            out[n] = out.get(n, ZERO) + da
    return LaurentVectorField(X.center, out, X.valid_from)
