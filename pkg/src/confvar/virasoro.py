"""Virasoro action on the identity module.

Basis words are tuples of modes in operator order, leftmost operator
first: ``(-3, -2)`` stands for L(-3)L(-2)1.  A word is canonical when its
modes are all <= -2 and weakly increase from left to right, so the most
negative mode acts last.  The central charge is the generator ``c``.

Conversion to conformal derivatives: L(n) corresponds to (-1)^n Delta[h_n]
(conjugated by Z); see ``DELTA_SIGN``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .algebra import ONE, ZERO, Poly, parse_sexp, poly_from_tree
from .errors import UsageError

C = Poly.gen("c")


def DELTA_SIGN(n: int) -> int:
    """Factor s with L(n) = s * Delta[h_n]."""
    return -1 if n % 2 else 1


def weight(word) -> int:
    return -sum(word)


def is_canonical(word) -> bool:
    return all(m <= -2 for m in word) and all(a <= b for a, b in zip(word, word[1:]))


class IdentityVector:
    """Immutable sparse combination of canonical words."""

    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        clean = {}
        for word, a in (terms or {}).items():
            word = tuple(word)
            if not is_canonical(word):
                raise UsageError(f"non-canonical word {word}; build it with word_vector")
            a = Poly.coerce(a)
            if a:
                clean[word] = clean[word] + a if word in clean else a
        self._terms = {w: a for w, a in clean.items() if a}

    @classmethod
    def _raw(cls, terms):
        v = cls.__new__(cls)
        v._terms = terms
        return v

    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, word) -> Poly:
        return self._terms.get(tuple(word), ZERO)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def weights(self) -> set:
        return {weight(w) for w in self._terms}

    def max_weight(self) -> int:
        return max((weight(w) for w in self._terms), default=0)

    def component(self, level: int) -> "IdentityVector":
        return IdentityVector._raw({w: a for w, a in self._terms.items() if weight(w) == level})

    def __add__(self, other: "IdentityVector"):
        out = dict(self._terms)
        for w, a in other._terms.items():
            s = out[w] + a if w in out else a
            if s:
                out[w] = s
            else:
                out.pop(w, None)
        return IdentityVector._raw(out)

    def __neg__(self):
        return IdentityVector._raw({w: -a for w, a in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor) -> "IdentityVector":
        factor = Poly.coerce(factor)
        if not factor:
            return IdentityVector._raw({})
        return IdentityVector._raw({w: a * factor for w, a in self._terms.items()})

    def __rmul__(self, factor):
        return self.scale(factor)

    def __eq__(self, other):
        if not isinstance(other, IdentityVector):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def to_sexp(self) -> str:
        out = "(vec"
        for w in sorted(self._terms, key=_word_sort_key):
            out += f" (term {word_sexp(w)} {self._terms[w].to_sexp()})"
        return out + ")"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for w in sorted(self._terms, key=_word_sort_key):
            a = str(self._terms[w])
            body = word_text(w)
            parts.append(body if a == "1" else f"({a})*{body}")
        return " + ".join(parts)

    def __repr__(self):
        return f"IdentityVector({self})"


def _word_sort_key(word):
    # by weight, then descending lexicographic as in basis()
    return (weight(word), tuple(-m for m in word))


def word_sexp(word) -> str:
    return "(L" + "".join(f" {m}" for m in word) + ")" if word else "()"


def word_text(word) -> str:
    if not word:
        return "1"
    return "".join(f"L({m})" for m in word) + "1"


def word_from_sexp(text: str) -> tuple:
    tree = parse_sexp(text)
    if tree == []:
        return ()
    if tree[0] != "L":
        raise UsageError("expected (L ...)")
    return tuple(int(x) for x in tree[1:])


def vector_from_sexp(text: str) -> IdentityVector:
    tree = parse_sexp(text)
    if tree[0] != "vec":
        raise UsageError("expected (vec ...)")
    out = IdentityVector()
    for term in tree[1:]:
        w = term[1]
        word = () if w == [] else tuple(int(x) for x in w[1:])
        out = out + word_vector(word).scale(poly_from_tree(term[2]))
    return out


VACUUM = IdentityVector._raw({(): ONE})


def vacuum() -> IdentityVector:
    return VACUUM


def basis(level: int) -> list:
    """Canonical words of the given weight (partitions into parts >= 2)."""
    if level < 0:
        raise UsageError("level must be nonnegative")
    out = []

    def rec(remaining, largest, parts):
        if remaining == 0:
            out.append(tuple(-p for p in parts))
            return
        for p in range(min(remaining, largest), 1, -1):
            rec(remaining - p, p, parts + [p])

    rec(level, level, [])
    # parts were chosen largest first; canonical order puts them leftmost
    return sorted(out, reverse=True)


def _central(m: int) -> Poly:
    return C * Fraction(m ** 3 - m, 12)


@lru_cache(maxsize=None)
def _act_word(n: int, word: tuple) -> IdentityVector:
    if not word:
        if n >= -1:
            return IdentityVector._raw({})
        return IdentityVector._raw({(n,): ONE})
    a = word[0]
    if n <= a:
        return IdentityVector._raw({(n,) + word: ONE})
    rest = word[1:]
    # L(n)L(a)X = L(a)L(n)X + (n-a)L(n+a)X + central
    result = act(a, _act_word(n, rest))
    result = result + _act_word(n + a, rest).scale(n - a)
    if n + a == 0:
        result = result + IdentityVector._raw({rest: _central(n)})
    return result


def act(n: int, v: IdentityVector) -> IdentityVector:
    """Apply L(n) and reduce to canonical words."""
    out: dict = {}
    for word, a in v.items():
        for w2, b in _act_word(n, word).items():
            p = a * b
            s = out[w2] + p if w2 in out else p
            if s:
                out[w2] = s
            else:
                out.pop(w2, None)
    return IdentityVector._raw(out)


def word_vector(word) -> IdentityVector:
    """L(m_1)...L(m_k)1 for an arbitrary mode sequence, reduced."""
    v = VACUUM
    for m in reversed(tuple(word)):
        v = act(m, v)
    return v


def bracket_check(m: int, n: int, v: IdentityVector, central=None) -> bool:
    """[L(m), L(n)] v == (m-n) L(m+n) v + central term."""
    lhs = act(m, act(n, v)) - act(n, act(m, v))
    rhs = act(m + n, v).scale(m - n)
    if m + n == 0:
        rhs = rhs + v.scale(_central(m) if central is None else central(m))
    return lhs == rhs


def pairing(u_word, v: IdentityVector) -> Poly:
    """<L(a_1)...L(a_k)1, v> with L(n) adjoint to L(-n)."""
    x = v
    for a in u_word:
        x = act(-a, x)
    return x.coefficient(())


def gram(level: int) -> list:
    """Matrix of pairings over basis(level)."""
    words = basis(level)
    return [[pairing(u, word_vector(v)) for v in words] for u in words]


def determinant(matrix) -> Poly:
    """Exact determinant by expansion over column subsets."""
    n = len(matrix)
    if n == 0:
        return ONE
    # dp over the set of used columns, filling rows in order
    dp = {0: ONE}
    for row in range(n):
        nxt: dict = {}
        for mask, val in dp.items():
            for col in range(n):
                if mask & (1 << col):
                    continue
                entry = matrix[row][col]
                if not entry:
                    continue
                # sign from the number of used columns to the right of col
                higher = bin(mask >> (col + 1)).count("1")
                term = val * entry
                if higher % 2:
                    term = -term
                key = mask | (1 << col)
                nxt[key] = nxt[key] + term if key in nxt else term
        dp = nxt
    return dp.get((1 << n) - 1, ZERO)
