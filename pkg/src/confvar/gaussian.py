"""Conformal Gaussians: the second-derivative table and a word engine.

A word (a_1, ..., a_p) stands for Delta[h_{a_1}] ... Delta[h_{a_p}] log Z
at center 0, so a_p acts first.  Modes >= -1 are "regular" and modes
<= -2 are "singular".  The Witt relation used throughout is

    Delta_a Delta_b = Delta_b Delta_a + (a - b) Delta_{a+b}.

Evaluations are linear in first derivatives X_n = Delta[h_n] log Z and in
opaque symbols for pure words the axioms do not fix.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .algebra import ONE, ZERO, Poly
from .errors import UsageError

W = Poly.gen("w")


@dataclass(frozen=True)
class Anomaly:
    """Exponent c and anomaly (d1, d2, d3)."""

    c: Poly = field(default_factory=lambda: Poly.gen("c"))
    d1: Poly = field(default_factory=lambda: Poly.gen("d1"))
    d2: Poly = field(default_factory=lambda: Poly.gen("d2"))
    d3: Poly = field(default_factory=lambda: Poly.gen("d3"))

    def __post_init__(self):
        for name in ("c", "d1", "d2", "d3"):
            object.__setattr__(self, name, Poly.coerce(getattr(self, name)))

    def is_normal(self) -> bool:
        return not (self.d1 or self.d2 or self.d3)

    def substitute(self, **values) -> "Anomaly":
        return Anomaly(*(p.subs(values) for p in (self.c, self.d1, self.d2, self.d3)))

    def __str__(self):
        return f"(c={self.c}, d1={self.d1}, d2={self.d2}, d3={self.d3})"


SYMBOLIC = Anomaly()


def k_value(ell: int, w=W, a: Anomaly = SYMBOLIC) -> Poly:
    w = Poly.coerce(w)
    if ell == -2:
        return a.d1 * w * w + a.d2 * w + a.d3
    if ell == -3:
        return -(a.d1 * w * 2) - a.d2
    if ell == -4:
        return a.d1
    return ZERO


def second_derivative(n: int, m: int, w=W, a: Anomaly = SYMBOLIC) -> Poly:
    """Table value of the canonical pattern for n >= -1, m <= -2."""
    if n < -1 or m > -2:
        raise UsageError(f"({n}, {m}) is not a canonical pattern; use reduce_word")
    value = k_value(n + m, w, a) * (n - m)
    if n + m == 0:
        value = value + a.c * Poly.const(n ** 3 - n) / 12
    return value


def canonical_pair(n: int, m: int) -> tuple:
    """Operator order of the table entry, as a word."""
    return (n, m) if n + m >= -1 else (m, n)


def ode_check(a: Anomaly = SYMBOLIC, lo: int = -6, hi: int = 1) -> bool:
    """d/dw k_l = (l + 1) k_{l-1} on [lo, hi], and c does not depend on w."""
    for ell in range(lo, hi + 1):
        if k_value(ell, W, a).diff("w") != k_value(ell - 1, W, a) * (ell + 1):
            return False
    return not a.c.diff("w")


# -- evaluations -------------------------------------------------------

class Evaluation:
    """Linear combination of 1, X_n and opaque words with Poly coefficients."""

    __slots__ = ("_t",)

    def __init__(self, terms=None):
        self._t = {k: Poly.coerce(v) for k, v in (terms or {}).items() if Poly.coerce(v)}

    @classmethod
    def const(cls, value):
        return cls({(): value})

    def items(self):
        return self._t.items()

    def __add__(self, other):
        out = dict(self._t)
        for k, v in other._t.items():
            out[k] = out[k] + v if k in out else v
        return Evaluation(out)

    def scale(self, factor):
        factor = Poly.coerce(factor)
        return Evaluation({k: v * factor for k, v in self._t.items()})

    def __eq__(self, other):
        if isinstance(other, (int, Poly)):
            other = Evaluation.const(other)
        if not isinstance(other, Evaluation):
            return NotImplemented
        return self._t == other._t

    def __hash__(self):
        return hash(frozenset(self._t.items()))

    def constant(self) -> Poly:
        return self._t.get((), ZERO)

    @property
    def kind(self) -> str:
        if any(k and k[0] == "O" for k in self._t):
            return "opaque"
        if any(k for k in self._t):
            return "first-derivative"
        return "constant"

    @property
    def is_opaque(self) -> bool:
        return self.kind == "opaque"

    def __str__(self):
        if not self._t:
            return "0"
        parts = []
        for k in sorted(self._t, key=lambda k: (len(k), str(k))):
            v = self._t[k]
            if not k:
                parts.append(str(v))
                continue
            sym = f"X[{k[1]}]" if k[0] == "X" else "O(" + " ".join(map(str, k[1])) + ")"
            parts.append(sym if v == 1 else f"({v})*{sym}")
        return " + ".join(parts)

    def __repr__(self):
        return f"Evaluation({self})"

    def to_sexp(self) -> str:
        out = "(eval"
        for k in sorted(self._t, key=lambda k: (len(k), str(k))):
            v = self._t[k].to_sexp()
            if not k:
                out += f" (const {v})"
            elif k[0] == "X":
                out += f" (X {k[1]} {v})"
            else:
                out += " (opaque (" + " ".join(map(str, k[1])) + f") {v})"
        return out + ")"


def _regular(a: int) -> bool:
    return a >= -1


class WordEngine:
    """Rewrites words modulo Witt relations and evaluates them.

    ``strategy`` picks which rewrite to apply when several are admissible:
    "near" (closest to the innermost slot), "far", or "random".
    ``translation_stationary`` imposes X_{-1} = 0.
    """

    def __init__(self, anomaly: Anomaly = SYMBOLIC, strategy: str = "near", seed=None,
                 translation_stationary: bool = False):
        if strategy not in ("near", "far", "random"):
            raise UsageError(f"unknown strategy {strategy!r}")
        self.anomaly = anomaly
        self.strategy = strategy
        self.rng = random.Random(seed)
        self.stationary = translation_stationary
        self._memo: dict = {}

    def _pick(self, candidates):
        # candidates are ordered nearest first
        if self.strategy == "near":
            return candidates[0]
        if self.strategy == "far":
            return candidates[-1]
        return self.rng.choice(candidates)

    def evaluate(self, word) -> Evaluation:
        word = tuple(word)
        if not word:
            raise UsageError("empty word")
        if self.strategy != "random" and word in self._memo:
            return self._memo[word]
        result = self._evaluate(word)
        if self.strategy != "random":
            self._memo[word] = result
        return result

    def _evaluate(self, word) -> Evaluation:
        if self.stationary and word[-1] == -1:
            return Evaluation()
        if len(word) == 1:
            return Evaluation({("X", word[0]): ONE})
        kinds = {_regular(a) for a in word}
        if len(kinds) == 1:
            return self._pure(word)
        if len(word) == 2:
            a, b = word
            n, m = (a, b) if _regular(a) else (b, a)
            value = Evaluation.const(second_derivative(n, m, 0, self.anomaly))
            if word == canonical_pair(n, m):
                return value
            # swap into canonical order
            return value + self.evaluate((a + b,)).scale(a - b)
        return self._mixed(word)

    def _pure(self, word) -> Evaluation:
        # sort so the innermost mode is the smallest
        inversions = [i for i in range(len(word) - 2, -1, -1) if word[i] < word[i + 1]]
        if not inversions:
            return Evaluation({("O", word): ONE})
        i = self._pick(inversions)
        return self._swap(word, i)

    def _swap(self, word, i) -> Evaluation:
        a, b = word[i], word[i + 1]
        swapped = word[:i] + (b, a) + word[i + 2:]
        out = self.evaluate(swapped)
        if a != b:
            merged = word[:i] + (a + b,) + word[i + 2:]
            out = out + self.evaluate(merged).scale(a - b)
        return out

    def _mixed(self, word) -> Evaluation:
        x = word[-1]
        p = len(word)
        others = [j for j in range(p - 2, -1, -1) if _regular(word[j]) != _regular(x)]
        j = self._pick(others)
        out = Evaluation()
        cur = word
        # move cur[j] next to the innermost slot; commutators are shorter words
        for i in range(j, p - 2):
            a, b = cur[i], cur[i + 1]
            if a != b:
                out = out + self.evaluate(cur[:i] + (a + b,) + cur[i + 2:]).scale(a - b)
            cur = cur[:i] + (b, a) + cur[i + 2:]
        inner = self.evaluate(cur[-2:])
        return out + self.apply_prefix(cur[:-2], inner)

    def apply_prefix(self, prefix, value: Evaluation) -> Evaluation:
        """Apply Delta_{prefix[0]} ... Delta_{prefix[-1]} to a value."""
        for a in reversed(prefix):
            value = self.derive(a, value)
        return value

    def derive(self, a: int, value: Evaluation) -> Evaluation:
        out = Evaluation()
        for key, coeff in value.items():
            if not key:
                continue  # constants on the domain have no derivative
            word = (a, key[1]) if key[0] == "X" else (a,) + key[1]
            out = out + self.evaluate(word).scale(coeff)
        return out


def reduce_word(word, a: Anomaly = SYMBOLIC, strategy: str = "near", seed=None,
                translation_stationary: bool = False) -> Evaluation:
    engine = WordEngine(a, strategy, seed, translation_stationary)
    return engine.evaluate(tuple(word))


# -- derived Gaussians -------------------------------------------------

DERIVED = {
    1: {"inner": 0, "anomaly": lambda a: Anomaly(0, a.d1 * -4, a.d2 * -3, a.d3 * -2)},
    2: {"inner": -1, "anomaly": lambda a: Anomaly(0, 0, a.d1 * 2, a.d2)},
    3: {"inner": 1, "anomaly": lambda a: Anomaly(0, 0, a.d3 * 4, 0)},
}


def _result(prop, pair, lhs, rhs):
    return {"proposition": prop, "pair": list(pair), "lhs": str(lhs), "rhs": str(rhs),
            "status": "pass" if lhs == rhs else "fail"}


def check_derived_gaussian(point: int, m_range=(-6, -2), n_range=(-1, 8),
                           a: Anomaly = SYMBOLIC) -> list:
    """Compare Delta_{m,n} applied to X_0, X_{-1} or X_1 with the table.

    Point 3 assumes translation stationarity, so X_{-1} = 0 and d1 = d2 = 0.
    """
    if point not in DERIVED:
        raise UsageError("point must be 1, 2 or 3")
    entry = DERIVED[point]
    base = a
    stationary = point == 3
    if stationary:
        base = Anomaly(a.c, 0, 0, a.d3)
    engine = WordEngine(base, translation_stationary=stationary)
    target = entry["anomaly"](base)
    reports = []
    for m in range(m_range[0], m_range[1] + 1):
        for n in range(n_range[0], n_range[1] + 1):
            word = canonical_pair(n, m) + (entry["inner"],)
            lhs = engine.evaluate(word)
            rhs = Evaluation.const(second_derivative(n, m, 0, target))
            reports.append(_result(f"derived-{point}", (n, m), lhs, rhs))
    return reports


def _solve_monomials(conditions):
    """Solve polynomial conditions of the form const * generator = 0."""
    forced = {}
    pending = list(conditions)
    progress = True
    while progress:
        progress = False
        rest = []
        for p in pending:
            p = p.subs(forced) if forced else p
            if not p:
                continue
            items = list(p.items())
            if len(items) == 1 and len(items[0][0]) == 1 and items[0][0][0][1] == 1:
                forced[items[0][0][0][0]] = 0
                progress = True
            else:
                rest.append(p)
        pending = rest
    return forced, pending


def stationarity_check(a: Anomaly = SYMBOLIC) -> list:
    """Translation then scaling stationarity at table level."""
    reports = []
    first = second_derivative(-1, -2, W, a)
    forced, left = _solve_monomials(first.coeffs_in("w").values())
    ok = not left and (a.is_normal() or set(forced) >= {str(g) for g in (a.d1, a.d2) if g.gens()})
    reports.append({"proposition": "translation", "pair": [-1, -2], "lhs": str(first),
                    "rhs": "0", "forced": sorted(forced), "status": "pass" if ok else "fail"})
    reduced = a.substitute(**forced) if forced else a
    second = second_derivative(0, -2, W, reduced)
    forced2, left2 = _solve_monomials(second.coeffs_in("w").values())
    forced_all = sorted(set(forced) | set(forced2))
    normal = a.substitute(**{g: 0 for g in forced_all}).is_normal() if forced_all else a.is_normal()
    ok2 = not left2 and normal
    reports.append({"proposition": "scaling", "pair": [0, -2], "lhs": str(second),
                    "rhs": "0", "forced": forced_all, "status": "pass" if ok2 else "fail"})
    return reports


# -- translation cocycle -----------------------------------------------

def translation_cocycle(a=None, w=None, an: Anomaly = SYMBOLIC) -> Poly:
    """K(g_a, w) = -(2 d1 w + d1 a + d2) a for the translation by a."""
    a = Poly.gen("a") if a is None else Poly.coerce(a)
    w = W if w is None else Poly.coerce(w)
    return -((an.d1 * w * 2 + an.d1 * a + an.d2) * a)


def cocycle_derivative_condition(n: int, w=None, an: Anomaly = SYMBOLIC) -> Poly:
    """2(-1)^n ((n+2) d1 w^(n+2) + (n+3/2) d2 w^(n+1) + (n+1) d3 w^n)."""
    w = W if w is None else Poly.coerce(w)
    terms = [(n + 2, an.d1, n + 2), (Poly.const(2 * n + 3) / 2, an.d2, n + 1), (n + 1, an.d3, n)]
    total = ZERO
    for coeff, d, e in terms:
        if not coeff:
            continue
        if e < 0:
            raise UsageError("negative power of w with nonzero coefficient")
        total = total + d * coeff * w ** e
    return total * (2 * (-1) ** (n % 2))


def translation_cocycle_check(an: Anomaly = SYMBOLIC) -> list:
    a, b = Poly.gen("a"), Poly.gen("b")
    lhs = translation_cocycle(a + b, W, an)
    rhs = translation_cocycle(a, W + b, an) + translation_cocycle(b, W, an)
    reports = [{"proposition": "composition", "pair": ["a", "b"], "lhs": str(lhs),
                "rhs": str(rhs), "status": "pass" if lhs == rhs else "fail"}]
    k = translation_cocycle(a, W, an)
    slope = k.diff("a").subs({"a": 0})
    target = cocycle_derivative_condition(-1, W, an)
    reports.append({"proposition": "derivative", "pair": [-1], "lhs": str(slope),
                    "rhs": str(target), "status": "pass" if slope == target else "fail"})
    return reports
