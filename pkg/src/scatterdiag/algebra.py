"""Exact sparse algebra for scattering computations.

Elements of the Lie algebra Q[M] (M = Z^2) tensored with a truncated
nilpotent coefficient ring are stored as dictionaries keyed by
``(exponent, order)``.  The order is either a positive integer (the power of
a formal parameter ``t``) or a frozenset of indices, standing for a
square-free monomial in square-zero variables ``u_1, ..., u_N``.

All coefficients are ``fractions.Fraction``; no floating point is involved.
"""

from __future__ import annotations

import math
import re
from collections import defaultdict
from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, Iterator, List, Mapping, Tuple, Union

Vec = Tuple[int, int]
Order = Union[int, frozenset]
Key = Tuple[Vec, Order]
Terms = Dict[Key, Fraction]


class ContractError(ValueError):
    """Raised when an operation's precondition is violated."""


# -- lattice helpers ---------------------------------------------------------

def det(m1: Vec, m2: Vec) -> int:
    return m1[0] * m2[1] - m1[1] * m2[0]


def vadd(m1: Vec, m2: Vec) -> Vec:
    return (m1[0] + m2[0], m1[1] + m2[1])


def vneg(m: Vec) -> Vec:
    return (-m[0], -m[1])


def content(m: Vec) -> int:
    return math.gcd(abs(m[0]), abs(m[1]))


def primitive(m: Vec) -> Vec:
    """Primitive part of a nonzero lattice vector."""
    g = content(m)
    if g == 0:
        raise ContractError("zero vector has no primitive part")
    return (m[0] // g, m[1] // g)


def is_primitive(m: Vec) -> bool:
    return content(m) == 1


# -- orders ------------------------------------------------------------------

def degree(o: Order) -> int:
    return o if isinstance(o, int) else len(o)


def combine_orders(o1: Order, o2: Order):
    """Product of two order monomials, or None if it vanishes."""
    if isinstance(o1, int):
        if not isinstance(o2, int):
            raise ContractError("cannot mix t-orders with square-zero orders")
        return o1 + o2
    if isinstance(o2, int):
        raise ContractError("cannot mix t-orders with square-zero orders")
    if o1 & o2:
        return None
    return o1 | o2


def zero_order_like(o: Order) -> Order:
    return 0 if isinstance(o, int) else frozenset()


def _order_sort_key(o: Order):
    if isinstance(o, int):
        return (o,)
    return (len(o), tuple(sorted(o)))


def term_sort_key(key: Key):
    (a, b), o = key
    return (_order_sort_key(o), a, b)


# -- raw term-dict operations (orders may be zero here; used for probes) -----

def add_terms(f: Mapping[Key, Fraction], g: Mapping[Key, Fraction], scale=1) -> Terms:
    out = dict(f)
    for k, c in g.items():
        v = out.get(k, 0) + scale * c
        if v:
            out[k] = v
        else:
            out.pop(k, None)
    return out


def bracket_terms(f: Mapping[Key, Fraction], g: Mapping[Key, Fraction],
                  truncation: int, form: int = 1) -> Terms:
    """Bracket of two term dicts, dropping terms of degree > truncation."""
    out: Dict[Key, Fraction] = defaultdict(Fraction)
    gl = list(g.items())
    for (m1, o1), c1 in f.items():
        d1 = degree(o1)
        if d1 > truncation:
            continue
        for (m2, o2), c2 in gl:
            dt = m1[0] * m2[1] - m1[1] * m2[0]
            if dt == 0:
                continue
            o = combine_orders(o1, o2)
            if o is None or degree(o) > truncation:
                continue
            out[((m1[0] + m2[0], m1[1] + m2[1]), o)] += form * dt * c1 * c2
    return {k: v for k, v in out.items() if v}


def exp_ad_terms(h: Mapping[Key, Fraction], f: Mapping[Key, Fraction],
                 truncation: int, form: int = 1) -> Terms:
    """exp(ad h)(f) truncated; h must have every order of degree >= 1."""
    result = dict(f)
    cur = dict(f)
    j = 0
    while cur:
        j += 1
        cur = bracket_terms(h, cur, truncation, form)
        if not cur:
            break
        inv = Fraction(1, j)
        cur = {k: v * inv for k, v in cur.items()}
        result = add_terms(result, cur)
    return result


# -- GradedSeries ------------------------------------------------------------

class GradedSeries:
    """Immutable sparse element of Q[M] tensored with the maximal ideal.

    ``terms`` maps ``(exponent, order)`` to a nonzero Fraction; every order has
    degree between 1 and ``truncation``.
    """

    __slots__ = ("_terms", "truncation", "_hash")

    def __init__(self, terms: Mapping[Key, object] = (), truncation: int = 1):
        if truncation < 1:
            raise ContractError("truncation must be >= 1")
        clean: Terms = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for (m, o), c in items:
            m = (int(m[0]), int(m[1]))
            if not isinstance(o, int):
                o = frozenset(o)
            d = degree(o)
            if d < 1:
                raise ContractError("series terms must have order >= 1")
            if d > truncation:
                continue
            c = Fraction(c)
            if c:
                v = clean.get((m, o), 0) + c
                if v:
                    clean[(m, o)] = v
                else:
                    clean.pop((m, o))
        self._terms = clean
        self.truncation = truncation
        self._hash = None

    @classmethod
    def _from_clean(cls, terms: Terms, truncation: int) -> "GradedSeries":
        obj = cls.__new__(cls)
        obj._terms = terms
        obj.truncation = truncation
        obj._hash = None
        return obj

    @classmethod
    def monomial(cls, m: Vec, order: Order, coeff=1, truncation: int = None) -> "GradedSeries":
        if truncation is None:
            truncation = degree(order)
        return cls({(m, order): coeff}, truncation)

    @property
    def terms(self) -> Mapping[Key, Fraction]:
        return self._terms

    def items(self) -> Iterator[Tuple[Key, Fraction]]:
        return iter(sorted(self._terms.items(), key=lambda kv: term_sort_key(kv[0])))

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def coeff(self, m: Vec, order: Order) -> Fraction:
        return self._terms.get((tuple(m), order), Fraction(0))

    def min_degree(self) -> int:
        if not self._terms:
            return self.truncation + 1
        return min(degree(o) for _, o in self._terms)

    def exponents(self) -> set:
        return {m for m, _ in self._terms}

    def _check(self, other: "GradedSeries") -> None:
        if not isinstance(other, GradedSeries):
            raise TypeError(f"expected GradedSeries, got {type(other).__name__}")
        if other.truncation != self.truncation:
            raise ContractError(
                f"truncation mismatch: {self.truncation} != {other.truncation}")

    def __add__(self, other: "GradedSeries") -> "GradedSeries":
        self._check(other)
        return GradedSeries._from_clean(add_terms(self._terms, other._terms), self.truncation)

    def __sub__(self, other: "GradedSeries") -> "GradedSeries":
        self._check(other)
        return GradedSeries._from_clean(add_terms(self._terms, other._terms, -1), self.truncation)

    def __neg__(self) -> "GradedSeries":
        return GradedSeries._from_clean({k: -v for k, v in self._terms.items()}, self.truncation)

    def scale(self, c) -> "GradedSeries":
        c = Fraction(c)
        if not c:
            return GradedSeries._from_clean({}, self.truncation)
        return GradedSeries._from_clean({k: v * c for k, v in self._terms.items()}, self.truncation)

    def filter(self, pred) -> "GradedSeries":
        return GradedSeries._from_clean(
            {k: v for k, v in self._terms.items() if pred(*k)}, self.truncation)

    def with_truncation(self, n: int) -> "GradedSeries":
        """Same terms (dropping those above ``n``) under truncation ``n``."""
        return truncate(self, n)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedSeries):
            return NotImplemented
        return self.truncation == other.truncation and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.truncation, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"GradedSeries({to_text(self)!r}, truncation={self.truncation})"


def zero(truncation: int) -> GradedSeries:
    return GradedSeries._from_clean({}, truncation)


def bracket(f: GradedSeries, g: GradedSeries, form: int = 1) -> GradedSeries:
    """Bilinear extension of [z^m1, z^m2] = form * det(m1, m2) z^(m1+m2)."""
    f._check(g)
    return GradedSeries._from_clean(bracket_terms(f._terms, g._terms, f.truncation, form),
                                    f.truncation)


def truncate(f: GradedSeries, n: int) -> GradedSeries:
    if n < 1:
        raise ContractError("truncation must be >= 1")
    return GradedSeries._from_clean(
        {k: v for k, v in f._terms.items() if degree(k[1]) <= n}, n)


def degree_part(f: GradedSeries, k: int) -> GradedSeries:
    return f.filter(lambda m, o: degree(o) == k)


# -- the square-zero embedding t -> u_1 + ... + u_N --------------------------

def split_monomial_components(f: GradedSeries, n: int) -> List[GradedSeries]:
    """Substitute t = u_1 + ... + u_n (u_j^2 = 0) and split by u-monomial.

    A term ``c z^m t^k`` becomes ``k! c z^m u_S`` for every k-subset S.  The
    pieces are returned in deterministic order (by exponent, then subset).
    """
    top = max((degree(o) for _, o in f.terms), default=0)
    if any(not isinstance(o, int) for _, o in f.terms):
        raise ContractError("series already uses square-zero orders")
    if n < top:
        raise ContractError(f"{n} variables cannot carry order {top}")
    pieces = []
    for (m, k), c in f.items():
        weight = c * math.factorial(k)
        for s in combinations(range(1, n + 1), k):
            pieces.append(GradedSeries._from_clean({(m, frozenset(s)): weight}, n))
    return pieces


def merge_monomial_components(parts: Iterable[GradedSeries], n: int,
                              truncation: int = None) -> GradedSeries:
    """Inverse of the embedding: recover the t-series from u-monomial pieces.

    The coefficient of ``z^m t^k`` is the sum over all k-subsets divided by
    ``k! * C(n, k)``; for pieces in the image of the embedding this is exact.
    """
    acc: Dict[Key, Fraction] = defaultdict(Fraction)
    for p in parts:
        for (m, s), c in p.terms.items():
            if isinstance(s, int):
                raise ContractError("expected square-zero orders")
            acc[(m, len(s))] += c
    out = {}
    for (m, k), c in acc.items():
        v = c / (math.factorial(k) * math.comb(n, k))
        if v:
            out[(m, k)] = v
    return GradedSeries(out, truncation if truncation is not None else n)


# -- text form ---------------------------------------------------------------

def frac_str(c: Fraction) -> str:
    c = Fraction(c)
    return f"{c.numerator}/{c.denominator}"


def parse_frac(s) -> Fraction:
    if isinstance(s, (int, Fraction)):
        return Fraction(s)
    return Fraction(str(s).strip())


def _order_text(o: Order) -> str:
    if isinstance(o, int):
        return f"t^{o}"
    return "u^[" + ",".join(str(i) for i in sorted(o)) + "]"


def to_text(f: GradedSeries) -> str:
    if not f:
        return "0"
    return " + ".join(f"{frac_str(c)} * z^({m[0]},{m[1]}) * {_order_text(o)}"
                      for (m, o), c in f.items())


_TERM_RE = re.compile(
    r"^\s*(-?\d+(?:/\d+)?)\s*\*\s*z\^\((-?\d+),(-?\d+)\)\s*\*\s*(?:t\^(\d+)|u\^\[([\d,]*)\])\s*$")


def from_text(text: str, truncation: int) -> GradedSeries:
    text = text.strip()
    if text == "0":
        return zero(truncation)
    terms = {}
    for chunk in text.split(" + "):
        mt = _TERM_RE.match(chunk)
        if not mt:
            raise ValueError(f"malformed series term: {chunk!r}")
        c, a, b, t, u = mt.groups()
        o = int(t) if t is not None else frozenset(int(i) for i in u.split(",") if i)
        terms[((int(a), int(b)), o)] = Fraction(c)
    return GradedSeries(terms, truncation)
