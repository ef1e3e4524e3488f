"""Higher conformal derivatives of the jet functionals g -> d^r g(w).

Two independent routes are provided.  The closed form sums over index
tuples with partial-sum constraints.  The oracle runs the alternating
composition recursion R_{k+1}(z) = R_k(z + u_{k+1}(z)) - R_k(z) on
truncated series with nilpotent markers t_j and reads off the
multilinear coefficient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .algebra import ONE, ZERO, Poly, TruncSeries, series_compose
from .errors import TruncationError, UsageError


@dataclass(frozen=True)
class Jet:
    """Taylor coefficients a_0..a_N of a direction field at ``basepoint``."""

    basepoint: Poly
    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "basepoint", Poly.coerce(self.basepoint))
        object.__setattr__(self, "coeffs", tuple(Poly.coerce(a) for a in self.coeffs))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def derivative(self, m: int) -> Poly:
        """m-th derivative at the basepoint."""
        if m > self.order:
            raise TruncationError(f"jet of order {self.order} has no derivative {m}")
        return self.coeffs[m] * math.factorial(m)

    def series(self, var: str = "z") -> TruncSeries:
        return TruncSeries.univariate(var, self.coeffs, self.order)


def symbolic_jet(slot: int, order: int, basepoint=0, prefix: str = "h") -> Jet:
    """Jet whose m-th derivative is the generator ``h{slot}_{m}``."""
    coeffs = [Poly.gen(f"{prefix}{slot}_{m}") / math.factorial(m) for m in range(order + 1)]
    return Jet(basepoint, tuple(coeffs))


def region(n: int, k: int) -> list:
    """Index tuples of length k with total n+k-1 and partial sums >= l."""
    if n < 0 or k < 1:
        raise UsageError("region needs n >= 0 and k >= 1")
    total = n + k - 1
    out = []

    def rec(prefix, partial):
        pos = len(prefix)
        if pos == k - 1:
            out.append(tuple(prefix) + (total - partial,))
            return
        # after choosing m_{pos+1}, the partial sum must reach pos+1
        for m in range(max(0, pos + 1 - partial), total - partial + 1):
            rec(prefix + [m], partial + m)

    rec([], 0)
    return sorted(out)


def coefficient(t) -> int:
    """Product over l < k of (m_1 + ... + m_l - l + 1)."""
    prod = 1
    partial = 0
    for ell, m in enumerate(t[:-1], start=1):
        partial += m
        prod *= partial - ell + 1
    return prod


def _check_jets(r: int, hjets, w):
    if r < 0:
        raise UsageError("derivative order r must be nonnegative")
    if not hjets:
        raise UsageError("at least one direction is required")
    base = hjets[0].basepoint if w is None else Poly.coerce(w)
    for h in hjets:
        if h.basepoint != base:
            raise UsageError("all jets must share the basepoint w")
    need = r + len(hjets) - 1
    for h in hjets:
        if h.order < need:
            raise TruncationError(f"jet order {h.order} below the required {need}")


def higher_derivative_closed_form(r: int, hjets, w=None) -> Poly:
    """k-th conformal derivative of g -> d^r g(w) at the identity."""
    _check_jets(r, hjets, w)
    k = len(hjets)
    total = ZERO
    rf = math.factorial(r)
    for t in region(r, k):
        weight = Fraction(rf * coefficient(t), math.prod(math.factorial(m) for m in t))
        term = Poly.const(weight)
        for h, m in zip(hjets, t):
            term = term * h.derivative(m)
            if not term:
                break
        total = total + term
    return total


def higher_derivative_oracle(r: int, hjets, w=None) -> Poly:
    """Same quantity via the composition recursion on truncated series."""
    _check_jets(r, hjets, w)
    k = len(hjets)
    markers = [f"t{j}" for j in range(1, k + 1)]

    def reduce(p: Poly) -> Poly:
        return p.drop_powers(markers, 1)

    var = "z"
    us = [h.series(var).scale(Poly.gen(tj)) for h, tj in zip(hjets, markers)]
    R = us[0]
    for j in range(1, k):
        u = us[j]
        c0 = u.coefficient(0)
        inner = {e: a for e, a in u.terms().items() if e != (0,)}
        inner[(1,)] = inner.get((1,), ZERO) + ONE
        shift = TruncSeries((var,), u.orders, inner)
        # R(z + c0 + v(z)) = (R + c0 R')(z + v(z)) since c0^2 = 0
        shifted = R + R.derivative().scale(c0).map_coefficients(reduce)
        composed = series_compose(shifted, shift, reduce)
        R = (composed - R).map_coefficients(reduce)
    if R.orders[0] < r:
        raise TruncationError("oracle ran out of series order")
    coeff = R.coefficient(r) * math.factorial(r)
    return coeff.coeff_monomial({tj: 1 for tj in markers})


def faadibruno_table(n: int, k: int) -> list:
    """Rows (tuple, coefficient, weight r!C/prod m_j!) of the closed form."""
    rows = []
    for t in region(n, k):
        c = coefficient(t)
        weight = Fraction(math.factorial(n) * c, math.prod(math.factorial(m) for m in t))
        rows.append((t, c, weight))
    return rows


def faadibruno_sexp(n: int, k: int) -> str:
    parts = [f"(faadibruno (n {n}) (k {k})"]
    for t, c, weight in faadibruno_table(n, k):
        parts.append(f" (tuple {' '.join(map(str, t))} coeff {c} weight {weight})")
    return "".join(parts) + ")"
