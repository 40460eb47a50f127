"""Truncated expansions Σ a^{(k)}_{m,n} L^k q^m q̄^n and modular-weight tagging.

A :class:`BiSeries` is trusted modulo q^{N+1} and q̄^{N+1}, where ``N`` is its
``order``.  Internally the coefficients are stored flat, keyed by
``(m, n, k, monomial)`` with a ``Fraction`` value, so that operators with
rational coefficients act on each zeta monomial independently.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Callable, Iterable, Mapping

from .errors import WeightError
from .scalar import UNIT, PeriodScalar, as_rational, monomial_mul

NON_MODULAR = "non-modular"


def _clean(flat: dict) -> dict:
    return {key: c for key, c in flat.items() if c}


class BiSeries:
    __slots__ = ("_flat", "order")

    def __init__(self, terms: Mapping | None = None, order: int = 0):
        if order < 0:
            raise ValueError("truncation order must be >= 0")
        self.order = order
        flat: dict = {}
        for (m, n, k), coeff in (terms or {}).items():
            if m < 0 or n < 0:
                raise ValueError(f"negative q-exponent in {(m, n, k)}")
            if m > order or n > order:
                continue
            for mono, c in PeriodScalar.coerce(coeff).items():
                key = (m, n, k, mono)
                flat[key] = flat.get(key, 0) + c
        self._flat = _clean(flat)

    @classmethod
    def from_flat(cls, flat: dict, order: int) -> "BiSeries":
        obj = cls.__new__(cls)
        obj.order = order
        obj._flat = {key: c for key, c in flat.items() if c and key[0] <= order and key[1] <= order}
        return obj

    @classmethod
    def zero(cls, order: int) -> "BiSeries":
        return cls.from_flat({}, order)

    @classmethod
    def monomial(cls, m: int, n: int, k: int, coeff=1, order: int = 0) -> "BiSeries":
        return cls({(m, n, k): coeff}, order)

    @property
    def flat(self) -> dict:
        return self._flat

    # --- inspection -------------------------------------------------------

    def coefficient(self, m: int, n: int, k: int) -> PeriodScalar:
        return PeriodScalar._raw(
            {mono: c for (mm, nn, kk, mono), c in self._flat.items() if (mm, nn, kk) == (m, n, k)}
        )

    def grouped(self) -> dict:
        """Map ``(m, n, k)`` to its PeriodScalar coefficient."""
        groups: dict = defaultdict(dict)
        for (m, n, k, mono), c in self._flat.items():
            groups[(m, n, k)][mono] = c
        return {key: PeriodScalar._raw(v) for key, v in groups.items()}

    def items(self):
        return sorted(self.grouped().items())

    def positions(self) -> set:
        return {(m, n, k) for (m, n, k, _) in self._flat}

    def monomials(self) -> set:
        return {key[3] for key in self._flat}

    def symbols(self) -> set:
        return {g for key in self._flat for g in key[3] if isinstance(g, str)}

    def is_zero(self) -> bool:
        return not self._flat

    def __len__(self):
        return len(self._flat)

    def pole_order(self) -> float:
        """Smallest L-exponent present, or ``inf`` for the zero series."""
        return min((key[2] for key in self._flat), default=float("inf"))

    def max_L_power(self) -> float:
        return max((key[2] for key in self._flat), default=float("-inf"))

    def constant_part(self) -> dict:
        out: dict = defaultdict(dict)
        for (m, n, k, mono), c in self._flat.items():
            if m == 0 and n == 0:
                out[k][mono] = c
        return {k: PeriodScalar._raw(v) for k, v in sorted(out.items())}

    def is_rational(self) -> bool:
        return all(key[3] == UNIT for key in self._flat)

    # --- arithmetic --------------------------------------------------------

    def truncate(self, order: int) -> "BiSeries":
        return BiSeries.from_flat(self._flat, min(order, self.order))

    def __add__(self, other: "BiSeries") -> "BiSeries":
        if not isinstance(other, BiSeries):
            return NotImplemented
        order = min(self.order, other.order)
        out = {key: c for key, c in self._flat.items() if key[0] <= order and key[1] <= order}
        for key, c in other._flat.items():
            if key[0] <= order and key[1] <= order:
                out[key] = out.get(key, 0) + c
        return BiSeries.from_flat(out, order)

    def __neg__(self) -> "BiSeries":
        return BiSeries.from_flat({key: -c for key, c in self._flat.items()}, self.order)

    def __sub__(self, other: "BiSeries") -> "BiSeries":
        if not isinstance(other, BiSeries):
            return NotImplemented
        return self + (-other)

    def scale(self, x) -> "BiSeries":
        if isinstance(x, PeriodScalar):
            out: dict = {}
            for (m, n, k, mono), c in self._flat.items():
                for mono2, c2 in x.items():
                    key = (m, n, k, monomial_mul(mono, mono2))
                    out[key] = out.get(key, 0) + c * c2
            return BiSeries.from_flat(out, self.order)
        x = as_rational(x)
        return BiSeries.from_flat({key: c * x for key, c in self._flat.items()}, self.order)

    def __mul__(self, other):
        if not isinstance(other, BiSeries):
            try:
                return self.scale(other)
            except TypeError:
                return NotImplemented
        order = min(self.order, other.order)
        by_m: dict = defaultdict(list)
        for (m, n, k, mono), c in other._flat.items():
            if m <= order and n <= order:
                by_m[m].append((n, k, mono, c))
        rows = sorted(by_m.items())
        for _, lst in rows:
            lst.sort(key=lambda t: t[0])
        out: dict = {}
        get = out.get
        for (m1, n1, k1, mono1), c1 in self._flat.items():
            if m1 > order or n1 > order:
                continue
            room_m = order - m1
            room_n = order - n1
            for m2, lst in rows:
                if m2 > room_m:
                    break
                m = m1 + m2
                for n2, k2, mono2, c2 in lst:
                    if n2 > room_n:
                        break
                    key = (m, n1 + n2, k1 + k2, monomial_mul(mono1, mono2) if mono2 else mono1)
                    out[key] = get(key, 0) + c1 * c2
        return BiSeries.from_flat(out, order)

    def __rmul__(self, other):
        return self.scale(other)

    def L_shift(self, j: int) -> "BiSeries":
        return BiSeries.from_flat({(m, n, k + j, mono): c for (m, n, k, mono), c in self._flat.items()}, self.order)

    def conjugate(self) -> "BiSeries":
        return BiSeries.from_flat({(n, m, k, mono): c for (m, n, k, mono), c in self._flat.items()}, self.order)

    def termwise(self, rule: Callable[[int, int, int], Iterable[tuple]]) -> "BiSeries":
        """Apply a linear map given on monomials L^k q^m q̄^n.

        ``rule(m, n, k)`` yields ``(m', n', k', factor)`` tuples with rational
        factors; the image of the term is the corresponding sum.
        """
        out: dict = {}
        cache: dict = {}
        for (m, n, k, mono), c in self._flat.items():
            image = cache.get((m, n, k))
            if image is None:
                image = cache[(m, n, k)] = [t for t in rule(m, n, k) if t[3]]
            for m2, n2, k2, factor in image:
                key = (m2, n2, k2, mono)
                out[key] = out.get(key, 0) + c * factor
        return BiSeries.from_flat(out, self.order)

    def substitute(self, values: Mapping) -> "BiSeries":
        out: dict = {}
        for (m, n, k, mono), c in self._flat.items():
            for mono2, c2 in PeriodScalar._raw({mono: c}).substitute(values).items():
                key = (m, n, k, mono2)
                out[key] = out.get(key, 0) + c2
        return BiSeries.from_flat(out, self.order)

    def restrict(self, predicate: Callable[[int, int, int], bool]) -> "BiSeries":
        return BiSeries.from_flat({key: c for key, c in self._flat.items() if predicate(*key[:3])}, self.order)

    def __eq__(self, other):
        if not isinstance(other, BiSeries):
            return NotImplemented
        return self.order == other.order and self._flat == other._flat

    def __hash__(self):
        return hash((self.order, frozenset(self._flat.items())))

    def __repr__(self):
        body = " + ".join(f"({c})·L^{k}·q^{m}·qb^{n}" for (m, n, k), c in self.items()[:6])
        more = "" if len(self.positions()) <= 6 else " + …"
        return f"BiSeries[N={self.order}]({body or '0'}{more})"

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "terms": [{"m": m, "n": n, "k": k, "coeff": c.to_json()} for (m, n, k), c in self.items()],
        }

    @classmethod
    def from_json(cls, data: dict) -> "BiSeries":
        terms: dict = {}
        for t in data["terms"]:
            key = (int(t["m"]), int(t["n"]), int(t["k"]))
            terms[key] = terms.get(key, PeriodScalar()) + PeriodScalar.from_json(t["coeff"])
        return cls(terms, int(data["order"]))


class RAForm:
    """A :class:`BiSeries` carrying modular weights ``(r, s)``.

    Weights are bookkeeping: arithmetic checks them, but modularity itself
    is only tested numerically (see :mod:`raqmod.analysis`).  ``flags`` carries
    markers such as ``"non-modular"`` for 𝔾₂.
    """

    __slots__ = ("r", "s", "series", "flags")

    def __init__(self, r: int, s: int, series: BiSeries, flags: Iterable[str] = ()):
        if (r + s) % 2:
            raise WeightError(f"weights ({r}, {s}) have odd sum")
        self.r = r
        self.s = s
        self.series = series
        self.flags = frozenset(flags)

    @classmethod
    def constant(cls, value, order: int, weights: tuple = (0, 0)) -> "RAForm":
        return cls(*weights, BiSeries({(0, 0, 0): value}, order))

    @classmethod
    def one(cls, order: int) -> "RAForm":
        return cls.constant(1, order)

    @classmethod
    def L(cls, order: int, power: int = 1) -> "RAForm":
        """The form L^power, of weights (-power, -power)."""
        return cls(-power, -power, BiSeries({(0, 0, power): 1}, order))

    @property
    def weights(self) -> tuple:
        return (self.r, self.s)

    @property
    def order(self) -> int:
        return self.series.order

    @property
    def h(self) -> int:
        return self.r - self.s

    @property
    def w(self) -> int:
        return self.r + self.s

    def with_series(self, series: BiSeries, weights: tuple | None = None) -> "RAForm":
        r, s = weights if weights is not None else self.weights
        return RAForm(r, s, series, self.flags)

    def _check_same(self, other: "RAForm"):
        if self.weights != other.weights:
            raise WeightError(f"weights {self.weights} and {other.weights} differ")

    def __add__(self, other):
        if not isinstance(other, RAForm):
            return NotImplemented
        self._check_same(other)
        return RAForm(self.r, self.s, self.series + other.series, self.flags | other.flags)

    def __sub__(self, other):
        if not isinstance(other, RAForm):
            return NotImplemented
        self._check_same(other)
        return RAForm(self.r, self.s, self.series - other.series, self.flags | other.flags)

    def __neg__(self):
        return RAForm(self.r, self.s, -self.series, self.flags)

    def __mul__(self, other):
        if isinstance(other, RAForm):
            return RAForm(self.r + other.r, self.s + other.s, self.series * other.series, self.flags | other.flags)
        try:
            return RAForm(self.r, self.s, self.series.scale(other), self.flags)
        except TypeError:
            return NotImplemented

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, x):
        return self * (1 / as_rational(x))

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            return NotImplemented
        out = RAForm.one(self.order)
        for _ in range(e):
            out = out * self
        return out

    def L_shift(self, j: int) -> "RAForm":
        return RAForm(self.r - j, self.s - j, self.series.L_shift(j), self.flags)

    def conjugate(self) -> "RAForm":
        return RAForm(self.s, self.r, self.series.conjugate(), self.flags)

    def truncate(self, order: int) -> "RAForm":
        return self.with_series(self.series.truncate(order))

    def constant_part(self) -> dict:
        return self.series.constant_part()

    def pole_order(self) -> float:
        return self.series.pole_order()

    def in_filtration(self, p: int) -> bool:
        return self.pole_order() >= p

    def coefficient(self, m: int, n: int, k: int) -> PeriodScalar:
        return self.series.coefficient(m, n, k)

    def is_zero(self) -> bool:
        return self.series.is_zero()

    def substitute(self, values: Mapping) -> "RAForm":
        return self.with_series(self.series.substitute(values))

    def __eq__(self, other):
        if not isinstance(other, RAForm):
            return NotImplemented
        return self.weights == other.weights and self.series == other.series

    def __hash__(self):
        return hash((self.weights, self.series))

    def __repr__(self):
        return f"RAForm{self.weights}{'[' + ','.join(sorted(self.flags)) + ']' if self.flags else ''}: {self.series!r}"

    def to_json(self) -> dict:
        data = {"weights": [self.r, self.s]}
        data.update(self.series.to_json())
        if self.flags:
            data["flags"] = sorted(self.flags)
        return data

    @classmethod
    def from_json(cls, data: dict) -> "RAForm":
        r, s = data["weights"]
        return cls(int(r), int(s), BiSeries.from_json(data), data.get("flags", ()))


def add(f: RAForm, g: RAForm) -> RAForm:
    return f + g


def mul(f: RAForm, g: RAForm) -> RAForm:
    return f * g


def L_shift(f: RAForm, j: int) -> RAForm:
    return f.L_shift(j)


def constant_part(f: RAForm) -> dict:
    return f.constant_part()


def pole_order(f: RAForm) -> float:
    return f.pole_order()


def in_filtration(f: RAForm, p: int) -> bool:
    return f.in_filtration(p)


def conjugate(f: RAForm) -> RAForm:
    return f.conjugate()


def agree(f: RAForm, g: RAForm) -> bool:
    """Exact equality after truncating both sides to the smaller order."""
    order = min(f.order, g.order)
    return f.weights == g.weights and f.series.truncate(order) == g.series.truncate(order)


def from_terms(weights: tuple, terms: Mapping, order: int) -> RAForm:
    return RAForm(weights[0], weights[1], BiSeries(terms, order))

