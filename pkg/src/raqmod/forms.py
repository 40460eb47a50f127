"""Concrete forms: holomorphic and real-analytic Eisenstein series, 𝔾₂*, 𝔪, Δ.

All constructors are cached on their arguments and return immutable objects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .errors import InternalInconsistency
from .operators import partial
from .scalar import PeriodScalar, bernoulli, divisor_sum
from .series import NON_MODULAR, BiSeries, RAForm


@lru_cache(maxsize=None)
def eisenstein_G(k: int, order: int) -> RAForm:
    """𝔾_k = -B_k/2k + Σ σ_{k-1}(n) q^n, weights (k, 0).

    𝔾₂ is returned flagged ``non-modular``.
    """
    if k < 2 or k % 2:
        raise ValueError(f"Eisenstein series need even k >= 2, got {k}")
    terms = {(0, 0, 0): -bernoulli(k) / (2 * k)}
    for n in range(1, order + 1):
        terms[(n, 0, 0)] = divisor_sum(k - 1, n)
    flags = (NON_MODULAR,) if k == 2 else ()
    return RAForm(k, 0, BiSeries(terms, order), flags)


@lru_cache(maxsize=None)
def g2_star(order: int) -> RAForm:
    """𝔾₂* = 𝔾₂ - 1/(4L)."""
    g2 = eisenstein_G(2, order)
    series = g2.series - BiSeries({(0, 0, -1): Fraction(1, 4)}, order)
    return RAForm(2, 0, series)


@lru_cache(maxsize=None)
def frak_m(order: int) -> RAForm:
    """𝔪 = 4L𝔾₂* = 4L𝔾₂ - 1, weights (1, -1)."""
    return g2_star(order).L_shift(1) * 4


@lru_cache(maxsize=None)
def delta_cusp(order: int) -> RAForm:
    """The normalised cusp form of weight 12, ((240𝔾₄)³ - (-504𝔾₆)²)/1728."""
    e4 = eisenstein_G(4, order) * 240
    e6 = eisenstein_G(6, order) * (-504)
    return (e4 * e4 * e4 - e6 * e6) * Fraction(1, 1728)


def _is_holomorphic(f: RAForm) -> bool:
    return all(n == 0 and k == 0 for (_, n, k) in f.series.positions())


def serre_theta(f: RAForm) -> RAForm:
    """θ(f) = (∂f + n f 𝔪)/(2L) for holomorphic f of weight n."""
    if f.s != 0 or not _is_holomorphic(f):
        raise ValueError("serre_theta expects a holomorphic form of weights (n, 0)")
    numerator = partial(f) + f * frak_m(f.order) * f.r
    bad = [key for key in numerator.series.positions() if key[2] != 1 or key[1] != 0]
    if bad:
        raise InternalInconsistency(f"θ numerator is not L times a holomorphic series at {bad[:5]}")
    return numerator.L_shift(-1) * Fraction(1, 2)


def real_eisenstein_constant(r: int, s: int) -> dict:
    """Constant part {k: coefficient} of 𝓔_{r,s}."""
    w = r + s
    linear = PeriodScalar.rational(-bernoulli(w + 2) / (2 * (w + 1) * (w + 2)))
    polar = PeriodScalar.zeta(
        w + 1, Fraction((-1) ** s, 2) * Fraction(math.factorial(w), 2**w) * math.comb(w, r)
    )
    return {1: linear, -w: polar}


def _holomorphic_part(a: int, b: int, order: int) -> dict:
    """Coefficients of R_{a,b}: {(n, k): rational} for the term q^n L^{-k}."""
    w = a + b
    out = {}
    prefactor = (-1) ** a * math.comb(w, a)
    for n in range(1, order + 1):
        sigma = divisor_sum(w + 1, n)
        for k in range(b, w + 1):
            g_coeff = Fraction((-1) ** k * math.factorial(k) * sigma, (2 * n) ** (k + 1))
            out[(n, k)] = prefactor * math.comb(a, k - b) * g_coeff
    return out


@lru_cache(maxsize=None)
def real_eisenstein(r: int, s: int, order: int) -> RAForm:
    """The real-analytic Eisenstein series 𝓔_{r,s} in closed form."""
    w = r + s
    if r < 0 or s < 0 or w <= 0 or w % 2:
        raise ValueError(f"𝓔_{{r,s}} needs r, s >= 0 and r + s even and positive, got ({r}, {s})")
    terms = {(0, 0, k): c for k, c in real_eisenstein_constant(r, s).items()}
    for (n, k), c in _holomorphic_part(r, s, order).items():
        terms[(n, 0, -k)] = c
    for (n, k), c in _holomorphic_part(s, r, order).items():
        terms[(0, n, -k)] = c
    return RAForm(r, s, BiSeries(terms, order))


def eisenstein_family(w: int, order: int) -> dict:
    """{(r, s): 𝓔_{r,s}} for r + s = w."""
    return {(r, w - r): real_eisenstein(r, w - r, order) for r in range(w + 1)}


@dataclass(frozen=True)
class CocyclePoly:
    """Homogeneous polynomial Σ c_{ij} X^i Y^j of degree weight - 2."""

    weight: int
    gamma: str
    coeffs: dict = field(default_factory=dict)

    @property
    def degree(self) -> int:
        return self.weight - 2

    def coefficient(self, i: int, j: int) -> Fraction:
        return self.coeffs.get((i, j), Fraction(0))

    def evaluate(self, x, y):
        return sum(c * x**i * y**j for (i, j), c in self.coeffs.items())

    def to_json(self) -> dict:
        return {
            "weight": self.weight,
            "gamma": self.gamma,
            "coeffs": [[i, j, str(c)] for (i, j), c in sorted(self.coeffs.items(), reverse=True)],
        }


def eis_cocycle(k: int, gamma: str) -> CocyclePoly:
    """Rational Eisenstein cocycle polynomials e⁰_{2k}(S) and e⁰_{2k}(T)."""
    if k < 2:
        raise ValueError("eis_cocycle needs k >= 2")
    pref = Fraction(math.factorial(2 * k - 2), 2)
    coeffs: dict = {}
    if gamma == "S":
        for i in range(1, k):
            c = pref * bernoulli(2 * i) / math.factorial(2 * i) * bernoulli(2 * k - 2 * i) / math.factorial(2 * k - 2 * i)
            if c:
                coeffs[(2 * i - 1, 2 * k - 2 * i - 1)] = c
    elif gamma == "T":
        lead = pref * bernoulli(2 * k) / math.factorial(2 * k)
        for j in range(1, 2 * k):
            coeffs[(2 * k - 1 - j, j - 1)] = lead * math.comb(2 * k - 1, j)
    else:
        raise ValueError(f"gamma must be 'S' or 'T', got {gamma!r}")
    return CocyclePoly(2 * k, gamma, coeffs)
