"""Finite-difference conformal derivatives in double precision.

The base map is the identity.  A map g_S = g^(j1) o ... o g^(jn) is
represented by its Taylor series at the basepoint z0, so jet functionals
are read off directly.  Slot 1 is the outermost map, which makes
``fd_derivative(f, k, [h1, ..., hk])`` the derivative with h1 applied
first.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from itertools import combinations

from .errors import NoConvergenceError, StepTooLargeError, UsageError
from .jets import higher_derivative_closed_form, symbolic_jet

INF = None


# -- truncated complex series -------------------------------------------

def _mul(a, b, n):
    out = [0j] * n
    for i, x in enumerate(a[:n]):
        if x:
            for j in range(n - i):
                out[i + j] += x * b[j]
    return out


def _inv(a, n):
    if abs(a[0]) == 0:
        raise ZeroDivisionError("series with zero constant term")
    out = [0j] * n
    out[0] = 1 / a[0]
    for m in range(1, n):
        s = sum(a[i] * out[m - i] for i in range(1, min(m, len(a) - 1) + 1))
        out[m] = -s / a[0]
    return out


def _pow(a, e, n):
    if e < 0:
        return _pow(_inv(a, n), -e, n)
    out = [1 + 0j] + [0j] * (n - 1)
    base = list(a)
    while e:
        if e & 1:
            out = _mul(out, base, n)
        e >>= 1
        if e:
            base = _mul(base, base, n)
    return out


# -- direction fields -----------------------------------------------------

@dataclass(frozen=True)
class DirectionField:
    """Closed-form field: a polynomial sum a_i z^i, or h_{n;w} = (w - z)^(n+1).

    ``scale`` multiplies the whole field, so i*h is available for the
    holomorphic split.
    """

    kind: str
    coeffs: tuple = ()
    n: int = 0
    w: complex = 0j
    scale: complex = 1

    @classmethod
    def polynomial(cls, coeffs):
        return cls("poly", tuple(complex(a) for a in coeffs))

    @classmethod
    def mode(cls, n: int, w=0j):
        return cls("mode", n=n, w=complex(w))

    def scaled(self, factor) -> "DirectionField":
        return DirectionField(self.kind, self.coeffs, self.n, self.w, self.scale * factor)

    def is_zero(self) -> bool:
        return self.scale == 0 or (self.kind == "poly" and not any(self.coeffs))

    def on_series(self, x, n):
        """h(x(s)) as a truncated series."""
        if self.kind == "poly":
            out = [0j] * n
            for a in reversed(self.coeffs):
                out = _mul(out, x, n)
                out[0] += a
        else:
            d = [self.w - x[0]] + [-v for v in x[1:n]]
            out = _pow(d, self.n + 1, n)
        return [self.scale * v for v in out]

    def __call__(self, z):
        return self.on_series([complex(z), 0j], 1)[0]

    def derivative(self, m: int, z):
        """Exact m-th derivative at z from the closed form."""
        z = complex(z)
        if self.kind == "poly":
            total = 0j
            for i, a in enumerate(self.coeffs):
                if i >= m:
                    total += a * math.perm(i, m) * z ** (i - m)
            return self.scale * total
        e = self.n + 1
        falling = 1
        for i in range(m):
            falling *= e - i
        if falling == 0:
            return 0j
        return self.scale * (-1) ** m * falling * (self.w - z) ** (e - m)

    def describe(self) -> str:
        if self.kind == "poly":
            body = "poly(" + ", ".join(_cfmt(a) for a in self.coeffs) + ")"
        else:
            body = f"h({self.n}; {_cfmt(self.w)})"
        return body if self.scale == 1 else f"{_cfmt(self.scale)}*{body}"


def _cfmt(z) -> str:
    z = complex(z)
    return f"{z.real:.6g}{z.imag:+.6g}j"


def bracket_field(m: int, n: int, w=0j) -> DirectionField:
    """(m - n) h_{m+n;w}."""
    return DirectionField.mode(m + n, w).scaled(m - n)


# -- path maps ------------------------------------------------------------

def path_map(h: DirectionField, a, t: float, z, threshold: float = 1e-12):
    """G_{t;a}^h(z); ``a=None`` is the point at infinity, z + t h(z)."""
    return path_map_series(h, a, t, [complex(z), 1 + 0j], 1, threshold)[0]


def path_map_series(h: DirectionField, a, t: float, x, n: int, threshold: float = 1e-12):
    hx = h.on_series(x, n)
    if a is INF:
        return [x[i] + t * hx[i] for i in range(n)]
    d = [x[0] - a] + list(x[1:n])
    den = [d[i] - t * hx[i] for i in range(n)]
    if abs(den[0]) < threshold * max(1.0, abs(d[0])):
        raise StepTooLargeError(f"path map denominator {abs(den[0]):.3g} at t={t}")
    out = _mul(_mul(d, d, n), _inv(den, n), n)
    out[0] += a
    return out


# -- functionals ------------------------------------------------------------

@dataclass(frozen=True)
class FunctionalSpec:
    """f(Sigma) = d^r Sigma(z0) for ``kind="jet"``; |d^r Sigma(z0)|^2 for ``"abs2"``."""

    r: int
    z0: complex = 0.5 + 0.25j
    kind: str = "jet"

    def __post_init__(self):
        if self.r < 0:
            raise UsageError("r must be nonnegative")
        if self.kind not in ("jet", "abs2"):
            raise UsageError(f"unknown functional kind {self.kind!r}")

    def value(self, x):
        d = x[self.r] * math.factorial(self.r)
        return d if self.kind == "jet" else abs(d) ** 2

    def describe(self) -> str:
        return f"{self.kind}(r={self.r}, z0={_cfmt(self.z0)})"


# -- finite differences -----------------------------------------------------

@dataclass(frozen=True)
class FDConfig:
    """Steps base * 2^-level for ``levels`` Richardson levels."""

    base: float = 1e-3
    levels: int = 3
    tol: float = 1e-6
    anchor: object = INF

    def __post_init__(self):
        if self.base <= 0 or self.levels < 1 or self.tol <= 0:
            raise UsageError("need base > 0, levels >= 1, tol > 0")

    def steps(self) -> list:
        return [self.base * 2.0 ** -i for i in range(self.levels)]

    @classmethod
    def for_order(cls, k: int, tol: float = 1e-6):
        # the stencil divides by t^k, so higher k needs larger steps and more levels
        if k <= 1:
            return cls(1e-3, 3, tol)
        if k == 2:
            return cls(2e-2, 5, tol)
        return cls(5e-2, 6, tol)


def _compose_value(f: FunctionalSpec, maps, anchor):
    n = f.r + 1
    x = [complex(f.z0), 1 + 0j] + [0j] * (n - 2) if n > 1 else [complex(f.z0)]
    x = (x + [0j] * n)[:n]
    # innermost map acts first
    for h, t in reversed(maps):
        x = path_map_series(h, anchor, t, x, n)
    return f.value(x)


def stencil(f: FunctionalSpec, hs, t: float, anchor=INF):
    """sum_S (-1)^(k-|S|) f(g_S) / t^k with a common step t."""
    k = len(hs)
    total = 0j
    for size in range(k + 1):
        sign = (-1) ** (k - size)
        for S in combinations(range(k), size):
            total += sign * _compose_value(f, [(hs[i], t) for i in S], anchor)
    return total / t ** k


def richardson(values, ratio: float = 2.0):
    """Neville table for estimates at steps base * ratio^-i with error in t, t^2, ..."""
    table = [list(values)]
    for j in range(1, len(values)):
        prev = table[-1]
        f = ratio ** j
        table.append([(f * prev[i + 1] - prev[i]) / (f - 1) for i in range(len(prev) - 1)])
    return table


def fd_derivative(f: FunctionalSpec, k: int, hs, cfg: FDConfig | None = None):
    """Richardson-extrapolated k-th conformal derivative, hs[0] applied first."""
    if k != len(hs):
        raise UsageError("need one direction per slot")
    if not 1 <= k <= 4:
        raise UsageError("k must be between 1 and 4")
    cfg = cfg or FDConfig.for_order(k)
    if any(h.is_zero() for h in hs):
        return 0j
    raw = [stencil(f, hs, t, cfg.anchor) for t in cfg.steps()]
    table = richardson(raw)
    best = table[-1][0]
    if len(table) > 1:
        prev = table[-2][-1]
        scale = max(abs(best), 1e-300)
        if abs(best - prev) > cfg.tol * max(scale, 1.0):
            raise NoConvergenceError(
                "Richardson levels disagree",
                {"raw": raw, "last": best, "previous": prev, "steps": cfg.steps()},
            )
    return best


def holomorphic_split(f: FunctionalSpec, h: DirectionField, cfg: FDConfig | None = None):
    """(Delta[h] f, anti-holomorphic part) from nabla_h and nabla_{ih}."""
    if h.is_zero():
        return 0j, 0j
    a = fd_derivative(f, 1, [h], cfg)
    b = fd_derivative(f, 1, [h.scaled(1j)], cfg)
    return (a - 1j * b) / 2, (a + 1j * b) / 2


def witt_numeric_check(m: int, n: int, f: FunctionalSpec, cfg: FDConfig | None = None,
                       w=0j, details: bool = False):
    """nabla_m nabla_n - nabla_n nabla_m against nabla in direction (m - n) h_{m+n}."""
    hm, hn_ = DirectionField.mode(m, w), DirectionField.mode(n, w)
    cfg2 = cfg or FDConfig.for_order(2)
    cfg1 = FDConfig(1e-3, 3, cfg2.tol, cfg2.anchor) if cfg is None else cfg
    mn = fd_derivative(f, 2, [hn_, hm], cfg2)
    nm = fd_derivative(f, 2, [hm, hn_], cfg2)
    rhs = fd_derivative(f, 1, [bracket_field(m, n, w)], cfg1) if m != n else 0j
    lhs = mn - nm
    scale = max(abs(mn), abs(nm), abs(rhs), 1e-300)
    err = abs(lhs - rhs) / scale
    ok = err <= cfg2.tol
    if details:
        return {"lhs": lhs, "rhs": rhs, "rel_error": err, "status": "pass" if ok else "fail"}
    return ok


# -- exact reference and regression matrix ---------------------------------

def closed_form_value(r: int, hs, z0) -> complex:
    """Exact closed form evaluated on the directions' analytic jets."""
    k = len(hs)
    order = r + k - 1
    jets = [symbolic_jet(j + 1, order) for j in range(k)]
    poly = higher_derivative_closed_form(r, jets)
    values = {}
    for j, h in enumerate(hs):
        for m in range(order + 1):
            values[f"h{j + 1}_{m}"] = h.derivative(m, z0)
    return complex(poly.evaluate(values))


def random_directions(rng: random.Random, k: int, degree: int = 3) -> list:
    out = []
    for _ in range(k):
        coeffs = [complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(degree + 1)]
        out.append(DirectionField.polynomial(coeffs))
    return out


def _report(f, k, hs, estimate, reference, tol):
    err = abs(estimate - reference) / max(abs(reference), 1e-300)
    if reference == 0:
        err = abs(estimate)
    return {
        "functional": f.describe(),
        "k": k,
        "directions": [h.describe() for h in hs],
        "estimate": [estimate.real, estimate.imag],
        "reference": [reference.real, reference.imag],
        "rel_error": err,
        "status": "pass" if err <= tol else "fail",
    }


def regression_matrix(seed: int = 0, rs=range(5), ks=range(1, 4), sets: int = 5,
                      tol: float = 1e-6, z0=0.5 + 0.25j) -> list:
    """fd_derivative against the closed form over r, k and seeded direction sets."""
    rng = random.Random(seed)
    directions = {(k, s): random_directions(rng, k) for k in ks for s in range(sets)}
    reports = []
    for r in rs:
        f = FunctionalSpec(r, z0)
        for k in ks:
            for s in range(sets):
                hs = directions[(k, s)]
                ref = closed_form_value(r, hs, z0)
                try:
                    est = fd_derivative(f, k, hs, FDConfig.for_order(k, tol))
                except NoConvergenceError as exc:
                    rep = _report(f, k, hs, complex(exc.diagnostics["last"]), ref, tol)
                    rep["status"] = "fail"
                    reports.append(rep)
                    continue
                reports.append(_report(f, k, hs, est, ref, tol))
    return reports


def split_reports(seed: int = 0, rs=range(5), count: int = 5, tol: float = 1e-8) -> list:
    """Anti-holomorphic parts of the jet functionals, relative to nabla_h."""
    rng = random.Random(seed + 1)
    out = []
    for r in rs:
        f = FunctionalSpec(r)
        for _ in range(count):
            h = random_directions(rng, 1)[0]
            delta, anti = holomorphic_split(f, h)
            rel = abs(anti) / max(abs(delta), 1e-300) if delta else abs(anti)
            out.append({"functional": f.describe(), "direction": h.describe(),
                        "delta": [delta.real, delta.imag], "anti": [anti.real, anti.imag],
                        "rel_error": rel, "status": "pass" if rel <= tol else "fail"})
    return out


WITT_CASES = ((1, -1, 1), (0, 0, 1), (2, -1, 2), (1, 0, 1), (2, 1, 2), (0, -1, 3))


def witt_reports(tol: float = 1e-6, w=0.9 - 0.4j) -> list:
    out = []
    for m, n, r in WITT_CASES:
        f = FunctionalSpec(r)
        rep = witt_numeric_check(m, n, f, FDConfig.for_order(2, tol), w=w, details=True)
        out.append({"functional": f.describe(), "m": m, "n": n,
                    "lhs": [rep["lhs"].real, rep["lhs"].imag],
                    "rhs": [rep["rhs"].real, rep["rhs"].imag],
                    "rel_error": rep["rel_error"], "status": rep["status"]})
    return out


def anchor_limit_gap(h: DirectionField, t: float, z, a=1e6) -> float:
    """|G_{t;a}(z) - (z + t h(z))| for a large finite anchor."""
    return abs(path_map(h, complex(a), t, z) - path_map(h, INF, t, z))
