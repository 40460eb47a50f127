"""Exact coefficient arithmetic.

Coefficients live in the polynomial ring over the rationals generated by
formal odd zeta values ζ(3), ζ(5), ... together with any named constants
introduced while solving differential systems.  A monomial is stored as a
sorted tuple of generators: an ``int`` generator ``n`` stands for ζ(n) and a
``str`` generator stands for a named constant.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Union

Rational = Fraction
Generator = Union[int, str]
Monomial = tuple

UNIT: Monomial = ()

Number = Union[int, Fraction]


def _generator_key(g):
    return (1, g) if isinstance(g, str) else (0, g)


def make_monomial(generators: Iterable[Generator]) -> Monomial:
    gens = tuple(sorted(generators, key=_generator_key))
    for g in gens:
        if isinstance(g, bool) or not isinstance(g, (int, str)):
            raise TypeError(f"invalid generator {g!r}")
        if isinstance(g, int) and (g < 3 or g % 2 == 0):
            raise ValueError(f"zeta generator must be odd and >= 3, got {g}")
    return gens


def monomial_mul(a: Monomial, b: Monomial) -> Monomial:
    if not b:
        return a
    if not a:
        return b
    return tuple(sorted(a + b, key=_generator_key))


def as_rational(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int) and not isinstance(x, bool):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


@lru_cache(maxsize=None)
def _bernoulli_table(n: int) -> tuple:
    table = [Fraction(1)]
    for m in range(1, n + 1):
        acc = sum(math.comb(m + 1, j) * table[j] for j in range(m))
        table.append(-acc / (m + 1))
    return tuple(table)


def bernoulli(n: int) -> Fraction:
    """Bernoulli number B_n for even ``n >= 0`` (B_2 = 1/6, B_4 = -1/30)."""
    if not isinstance(n, int) or n < 0 or n % 2:
        raise ValueError(f"bernoulli expects an even integer >= 0, got {n!r}")
    return _bernoulli_table(n)[n]


def divisor_sum(k: int, n: int) -> int:
    """Sum of d**k over the positive divisors d of n."""
    if n <= 0 or k < 0:
        raise ValueError(f"divisor_sum needs k >= 0 and n >= 1, got ({k}, {n})")
    total = 0
    d = 1
    while d * d <= n:
        if n % d == 0:
            total += d**k
            e = n // d
            if e != d:
                total += e**k
        d += 1
    return total


class PeriodScalar:
    """Sparse rational combination of zeta monomials and named constants.

    Instances are immutable.  ``int`` and ``Fraction`` operands are coerced
    to constant scalars in arithmetic.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Number] | None = None):
        clean = {}
        if terms:
            for mono, c in terms.items():
                c = as_rational(c)
                if c:
                    clean[make_monomial(mono)] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "PeriodScalar":
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def rational(cls, x: Number) -> "PeriodScalar":
        x = as_rational(x)
        return cls._raw({UNIT: x} if x else {})

    @classmethod
    def zeta(cls, n: int, coefficient: Number = 1) -> "PeriodScalar":
        return cls({(n,): coefficient})

    @classmethod
    def symbol(cls, name: str, coefficient: Number = 1) -> "PeriodScalar":
        return cls({(name,): coefficient})

    @classmethod
    def coerce(cls, x) -> "PeriodScalar":
        if isinstance(x, PeriodScalar):
            return x
        return cls.rational(x)

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def is_rational(self) -> bool:
        return all(m == UNIT for m in self._terms)

    def rational_part(self) -> Fraction:
        return self._terms.get(UNIT, Fraction(0))

    def symbols(self) -> set:
        return {g for m in self._terms for g in m if isinstance(g, str)}

    def __bool__(self):
        return bool(self._terms)

    def __add__(self, other):
        try:
            other = PeriodScalar.coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for m, c in other._terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return PeriodScalar._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return PeriodScalar._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        try:
            other = PeriodScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return PeriodScalar.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        if not isinstance(other, PeriodScalar):
            return NotImplemented
        out: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = monomial_mul(m1, m2)
                v = out.get(m, 0) + c1 * c2
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return PeriodScalar._raw(out)

    __rmul__ = __mul__

    def scale(self, x: Number) -> "PeriodScalar":
        x = as_rational(x)
        if not x:
            return PeriodScalar._raw({})
        return PeriodScalar._raw({m: c * x for m, c in self._terms.items()})

    def __truediv__(self, x: Number):
        return self.scale(1 / as_rational(x))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            other = PeriodScalar.rational(other)
        if not isinstance(other, PeriodScalar):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def substitute(self, values: Mapping[str, "PeriodScalar | Number"]) -> "PeriodScalar":
        """Replace named constants by scalars; unknown names are kept."""
        out = PeriodScalar()
        for mono, c in self._terms.items():
            term = PeriodScalar._raw({tuple(g for g in mono if not (isinstance(g, str) and g in values)): c})
            for g in mono:
                if isinstance(g, str) and g in values:
                    term = term * PeriodScalar.coerce(values[g])
            out = out + term
        return out

    def sorted_items(self):
        return sorted(self._terms.items(), key=lambda kv: (len(kv[0]), [_generator_key(g) for g in kv[0]]))

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for mono, c in self.sorted_items():
            factors = [f"ζ{g}" if isinstance(g, int) else g for g in mono]
            if not factors:
                parts.append(str(c))
            elif c == 1:
                parts.append("·".join(factors))
            elif c == -1:
                parts.append("-" + "·".join(factors))
            else:
                parts.append(str(c) + "·" + "·".join(factors))
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"PeriodScalar({self})"

    def to_json(self) -> dict:
        terms = []
        for mono, c in self.sorted_items():
            entry = {"zetas": [g for g in mono if isinstance(g, int)], "rat": str(c)}
            names = [g for g in mono if isinstance(g, str)]
            if names:
                entry["symbols"] = names
            terms.append(entry)
        return {"terms": terms}

    @classmethod
    def from_json(cls, data: dict) -> "PeriodScalar":
        out = {}
        for entry in data["terms"]:
            mono = make_monomial(list(entry.get("zetas", [])) + list(entry.get("symbols", [])))
            out[mono] = out.get(mono, 0) + Fraction(entry["rat"])
        return cls(out)


@lru_cache(maxsize=None)
def zeta_value(n: int, target_abs_error: float = 1e-17) -> float:
    """ζ(n) for integer n >= 2 by direct summation plus an Euler–Maclaurin tail.

    The tail after K terms uses the expansion up to the B_4 correction; the
    first omitted term bounds the remainder and K grows until that bound
    drops below ``target_abs_error``.
    """
    if n < 2:
        raise ValueError("zeta_value needs n >= 2")
    K = 8
    while True:
        rest = n * (n + 1) * (n + 2) * (n + 3) * (n + 4) / 30240.0 * K ** (-n - 5)
        if rest < target_abs_error or K > 10**6:
            break
        K *= 2
    head = math.fsum(k ** (-float(n)) for k in range(1, K))
    tail = (
        K ** (1.0 - n) / (n - 1)
        + 0.5 * K ** (-float(n))
        + n / 12.0 * K ** (-n - 1.0)
        - n * (n + 1) * (n + 2) / 720.0 * K ** (-n - 3.0)
    )
    return head + tail


def numeric_value(
    s: PeriodScalar | Number,
    target_abs_error: float = 1e-12,
    symbols: Mapping[str, float] | None = None,
) -> float:
    """Floating-point value of a scalar.

    Named constants must be supplied through ``symbols``; a missing name
    raises ``KeyError``.
    """
    if target_abs_error <= 0:
        raise ValueError("target_abs_error must be positive")
    s = PeriodScalar.coerce(s)
    symbols = symbols or {}
    parts = []
    for mono, c in s.items():
        v = float(c)
        for g in mono:
            if isinstance(g, int):
                v *= zeta_value(g, min(target_abs_error, 1e-17))
            else:
                if g not in symbols:
                    raise KeyError(f"no numeric value supplied for constant {g!r}")
                v *= float(symbols[g])
        parts.append(v)
    return math.fsum(parts)
