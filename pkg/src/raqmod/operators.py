"""Differential operators acting termwise on expansions.

All z-derivatives are normalised by 1/(iπ): ``dz = (1/iπ) ∂/∂z`` and
``dzbar = (1/iπ) ∂/∂z̄``.  With L = iπ(z − z̄) this keeps every operator
rational:

    dz(L^k q^m q̄^n)    =  (k L^{k-1} + 2m L^k) q^m q̄^n
    dzbar(L^k q^m q̄^n) = -(k L^{k-1} + 2n L^k) q^m q̄^n

and the weight-raising and weight-lowering operators read
``partial = L·dz + r`` and ``partial_bar = -L·dzbar + s``.  Brackets built
from dz therefore differ from their ∂/∂z versions by a power of iπ.
"""

from __future__ import annotations

from dataclasses import dataclass

from .series import BiSeries, RAForm


@dataclass(frozen=True)
class OperatorReport:
    operator_name: str
    input_weights: tuple
    output_weights: tuple


_OUTPUT_WEIGHTS = {
    "del": lambda r, s: (r + 1, s - 1),
    "dbar": lambda r, s: (r - 1, s + 1),
    "laplace": lambda r, s: (r, s),
    "h": lambda r, s: (r, s),
}


def report(name: str, f: RAForm) -> OperatorReport:
    return OperatorReport(name, f.weights, _OUTPUT_WEIGHTS[name](f.r, f.s))


def partial(f: RAForm) -> RAForm:
    """∂_r: (2mL + r + k) on L^k q^m q̄^n; weights (r, s) -> (r+1, s-1)."""
    r = f.r

    def rule(m, n, k):
        return ((m, n, k + 1, 2 * m), (m, n, k, r + k))

    return RAForm(f.r + 1, f.s - 1, f.series.termwise(rule), f.flags)


def partial_bar(f: RAForm) -> RAForm:
    """∂̄_s: (2nL + s + k) on L^k q^m q̄^n; weights (r, s) -> (r-1, s+1)."""
    s = f.s

    def rule(m, n, k):
        return ((m, n, k + 1, 2 * n), (m, n, k, s + k))

    return RAForm(f.r - 1, f.s + 1, f.series.termwise(rule), f.flags)


def laplace(f: RAForm) -> RAForm:
    """Δ_{r,s} = -∂̄_{s-1}∂_r + r(s-1), applied termwise."""
    r, s = f.r, f.s

    def rule(m, n, k):
        return (
            (m, n, k + 2, -4 * m * n),
            (m, n, k + 1, -2 * (k * n + k * m + r * n + s * m)),
            (m, n, k, -k * (k + r + s - 1)),
        )

    return f.with_series(f.series.termwise(rule))


def h_degree(f: RAForm) -> int:
    return f.r - f.s


def h_action(f: RAForm) -> RAForm:
    return f * (f.r - f.s)


def weight_action(f: RAForm) -> RAForm:
    return f * (f.r + f.s)


def _dz_series(series: BiSeries) -> BiSeries:
    return series.termwise(lambda m, n, k: ((m, n, k - 1, k), (m, n, k, 2 * m)))


def _dzbar_series(series: BiSeries) -> BiSeries:
    return series.termwise(lambda m, n, k: ((m, n, k - 1, -k), (m, n, k, -2 * n)))


def dz(f: RAForm | BiSeries) -> BiSeries:
    series = f.series if isinstance(f, RAForm) else f
    return _dz_series(series)


def dzbar(f: RAForm | BiSeries) -> BiSeries:
    series = f.series if isinstance(f, RAForm) else f
    return _dzbar_series(series)


def rc_bracket1(f: RAForm, g: RAForm) -> RAForm:
    """r₂ f' g − r₁ f g' with ' = dz; weights (r₁+r₂+2, s₁+s₂)."""
    series = dz(f) * g.series * g.r - f.series * dz(g) * f.r
    return RAForm(f.r + g.r + 2, f.s + g.s, series, f.flags | g.flags)


def rc_bracket2(f: RAForm, g: RAForm) -> RAForm:
    """Second Rankin–Cohen bracket in dz; weights (r₁+r₂+4, s₁+s₂)."""
    r1, r2 = f.r, g.r
    df, dg = dz(f), dz(g)
    series = (
        dz(df) * g.series * (r2 * (r2 + 1) // 2)
        - df * dg * ((r1 + 1) * (r2 + 1))
        + f.series * dz(dg) * (r1 * (r1 + 1) // 2)
    )
    return RAForm(r1 + r2 + 4, f.s + g.s, series, f.flags | g.flags)


def sym_bracket2(f: RAForm, g: RAForm) -> RAForm:
    """Symmetric second-order product (f, g)₂ in dz, dzbar.

    It is the L² coefficient of a bidegree (0, 0) operator, hence of
    weights (r₁+r₂+2, s₁+s₂+2).
    """
    r1, s1, r2, s2 = f.r, f.s, g.r, g.s
    series = (
        dz(f) * dzbar(g) * (s1 * r2)
        + dzbar(f) * dz(g) * (s2 * r1)
        - f.series * dz(dzbar(g)) * (r1 * s1)
        - g.series * dz(dzbar(f)) * (r2 * s2)
    )
    return RAForm(r1 + r2 + 2, s1 + s2 + 2, series, f.flags | g.flags)


def d_mixed(f: RAForm) -> tuple:
    """Split s·dz f + r·dzbar f into its components of weights (r+2, s) and (r, s+2)."""
    first = partial(f).L_shift(-1) * f.s
    second = partial_bar(f).L_shift(-1) * (-f.r)
    return first, second
