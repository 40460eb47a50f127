"""Numerical evaluation of expansions on the upper half plane.

Covers point evaluation with a truncation-tail check, the S-modularity
residual, the Petersson pairing over the standard fundamental domain and a
least-squares harness for testing conjectured identities between functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DegreeMismatch, NonDecayingIntegrand, TailTooLarge, WeightError
from .scalar import zeta_value
from .series import RAForm


@dataclass(frozen=True)
class EvalConfig:
    symbols: tuple = ()  # (name, value) pairs
    order: int | None = None
    target_abs_error: float = 1e-9

    def __post_init__(self):
        if self.target_abs_error <= 0:
            raise ValueError("target_abs_error must be positive")

    @classmethod
    def make(cls, symbols: dict | None = None, order: int | None = None, target_abs_error: float = 1e-9) -> "EvalConfig":
        return cls(tuple(sorted((symbols or {}).items())), order, target_abs_error)

    def symbol_values(self) -> dict:
        return dict(self.symbols)


DEFAULT_CONFIG = EvalConfig()


def _monomial_value(mono: tuple, symbols: dict) -> float:
    v = 1.0
    for g in mono:
        if isinstance(g, int):
            v *= zeta_value(g)
        else:
            if g not in symbols:
                raise KeyError(f"no numeric value supplied for constant {g!r}")
            v *= float(symbols[g])
    return v


@dataclass
class _Table:
    ks: np.ndarray  # L-exponents
    coeffs: np.ndarray  # (K, N+1, N+1)
    order: int
    level_size: np.ndarray  # Σ |coeff| per max(m, n), for the tail estimate


def _table(f: RAForm, cfg: EvalConfig) -> _Table:
    return _cached_table(f, cfg.symbols, cfg.order)


@lru_cache(maxsize=256)
def _cached_table(f: RAForm, symbols: tuple, order: int | None) -> _Table:
    N = f.order if order is None else min(order, f.order)
    values = dict(symbols)
    ks = sorted({k for (m, n, k, _) in f.series.flat if m <= N and n <= N}) or [0]
    index = {k: i for i, k in enumerate(ks)}
    coeffs = np.zeros((len(ks), N + 1, N + 1))
    for (m, n, k, mono), c in f.series.flat.items():
        if m <= N and n <= N:
            coeffs[index[k], m, n] += float(c) * _monomial_value(mono, values)
    level = np.zeros(N + 1)
    for j in range(N + 1):
        level[j] = np.abs(coeffs[:, j, : j + 1]).sum() + np.abs(coeffs[:, : j, j]).sum()
    return _Table(np.array(ks, dtype=float), coeffs, N, level)


def tail_bound(f: RAForm, z, cfg: EvalConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Heuristic bound C·|q|^{N+1}/(1 − |q|) for the omitted part of the expansion.

    C is the largest Σ|a|·|L|^k over a single q-order among the stored ones.
    """
    t = _table(f, cfg)
    z = np.asarray(z, dtype=complex)
    aq = np.exp(-2 * np.pi * z.imag)
    L = np.abs(-2 * np.pi * z.imag)
    lmax = np.maximum(L[..., None] ** t.ks.max(), L[..., None] ** t.ks.min())[..., 0]
    C = t.level_size.max() * lmax
    return C * aq ** (t.order + 1) / (1 - aq)


def eval_series(f: RAForm, z, cfg: EvalConfig = DEFAULT_CONFIG, *, check_tail: bool = True):
    """Σ a·L^k q^m q̄^n at z (scalar or array) with L = −2π Im z."""
    t = _table(f, cfg)
    zz = np.atleast_1d(np.asarray(z, dtype=complex))
    if np.any(zz.imag <= 0):
        raise ValueError("evaluation points must lie in the upper half plane")
    if check_tail:
        bound = tail_bound(f, zz, cfg)
        worst = float(np.max(bound))
        if worst > cfg.target_abs_error:
            raise TailTooLarge(f"truncation tail estimate {worst:.3g} exceeds {cfg.target_abs_error:.3g}")
    q = np.exp(2j * np.pi * zz)
    powers = np.arange(t.order + 1)
    Qp = q[:, None] ** powers
    Qbp = np.conj(q)[:, None] ** powers
    L = -2 * np.pi * zz.imag
    Lp = L[:, None] ** t.ks
    out = np.einsum("pk,kmn,pm,pn->p", Lp, t.coeffs, Qp, Qbp, optimize=True)
    return complex(out[0]) if np.ndim(z) == 0 else out.reshape(np.shape(z))


def modularity_residual(f: RAForm, z: complex, cfg: EvalConfig = DEFAULT_CONFIG) -> float:
    """|f(−1/z) − z^r z̄^s f(z)|; T-invariance holds by construction."""
    z = complex(z)
    w = -1 / z
    return abs(eval_series(f, w, cfg) - z**f.r * z.conjugate() ** f.s * eval_series(f, z, cfg))


# ---------------------------------------------------------------------------
# Petersson pairing


@dataclass(frozen=True)
class QuadratureGrid:
    nx: int = 64
    ny: int = 64
    y_max: float = 6.0
    y_panels: int = 1

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1 or self.y_panels < 1:
            raise ValueError("node counts must be positive")
        if self.y_max <= 1:
            raise ValueError("y_max must exceed the top of the arc")

    def nodes(self):
        """Points z and weights w with Σ w·F(z) ≈ ∫∫_𝓓 F dx dy (below y_max)."""
        gx, wx = np.polynomial.legendre.leggauss(self.nx)
        x = 0.5 * gx
        wx = 0.5 * wx
        gy, wy = np.polynomial.legendre.leggauss(self.ny)
        y0 = np.sqrt(1 - x * x)
        edges = np.linspace(0.0, 1.0, self.y_panels + 1)
        zs, ws = [], []
        for a, b in zip(edges[:-1], edges[1:]):
            lo = y0 + a * (self.y_max - y0)
            hi = y0 + b * (self.y_max - y0)
            half = 0.5 * (hi - lo)
            y = lo[:, None] + half[:, None] * (gy[None, :] + 1)
            zs.append(x[:, None] + 1j * y)
            ws.append(wx[:, None] * half[:, None] * wy[None, :])
        return np.concatenate(zs, axis=1).ravel(), np.concatenate(ws, axis=1).ravel()


def _has_constant(f: RAForm) -> bool:
    return any(m == 0 and n == 0 for (m, n, _) in f.series.positions())


def pairing_degree(f: RAForm, g: RAForm) -> int:
    """The exponent n for which f·ḡ·y^n has weights (0, 0)."""
    if f.h != g.h:
        raise DegreeMismatch(f"h(f) = {f.h} differs from h(g) = {g.h}")
    return f.r + g.s


def petersson(f: RAForm, g: RAForm, n: int | None = None, grid: QuadratureGrid = QuadratureGrid(), cfg: EvalConfig = DEFAULT_CONFIG) -> complex:
    """∫_𝓓 f ḡ y^n dx dy/y² by tensor Gauss–Legendre quadrature."""
    expected = pairing_degree(f, g)
    if n is None:
        n = expected
    elif n != expected:
        raise WeightError(f"f·ḡ·y^n is modular only for n = {expected}, got {n}")
    if _has_constant(f) and _has_constant(g):
        raise NonDecayingIntegrand("both arguments have a nonzero constant part")
    z, w = grid.nodes()
    vals = eval_series(f, z, cfg, check_tail=False) * np.conj(eval_series(g, z, cfg, check_tail=False))
    bound = tail_bound(f, z, cfg).max() + tail_bound(g, z, cfg).max()
    if bound > cfg.target_abs_error:
        raise TailTooLarge(f"truncation tail estimate {bound:.3g} on the grid")
    integrand = vals * z.imag ** (n - 2)
    return complex(np.sum(w * integrand))


def petersson_abs(f: RAForm, g: RAForm, grid: QuadratureGrid = QuadratureGrid(), cfg: EvalConfig = DEFAULT_CONFIG) -> float:
    """∫_𝓓 |f ḡ| y^n dvol, the natural size against which ⟨f, g⟩ is small."""
    n = pairing_degree(f, g)
    z, w = grid.nodes()
    vals = np.abs(eval_series(f, z, cfg, check_tail=False) * eval_series(g, z, cfg, check_tail=False))
    return float(np.sum(w * vals * z.imag ** (n - 2)))


# ---------------------------------------------------------------------------
# fitting


def split_symbols(f: RAForm) -> tuple:
    """Split f into its symbol-free part and {symbol tuple: coefficient form}."""
    plain, parts = {}, {}
    for (m, n, k, mono), c in f.series.flat.items():
        names = tuple(g for g in mono if isinstance(g, str))
        if not names:
            plain[(m, n, k, mono)] = c
        else:
            rest = tuple(g for g in mono if not isinstance(g, str))
            parts.setdefault(names, {})[(m, n, k, rest)] = c
    from .series import BiSeries

    base = f.with_series(BiSeries.from_flat(plain, f.order))
    return base, {names: f.with_series(BiSeries.from_flat(flat, f.order)) for names, flat in parts.items()}


@dataclass
class FitResult:
    coefficients: list
    constant: float
    symbol_coefficients: dict
    residuals: list
    point_constants: list
    constant_std: float
    rank: int
    rank_deficient: bool
    labels: list = field(default_factory=list)

    def to_json(self) -> dict:
        def g(v):
            return float(f"{v:.17g}")

        return {
            "coefficients": [g(c) for c in self.coefficients],
            "constant": g(self.constant),
            "symbol_coefficients": {k: g(v) for k, v in self.symbol_coefficients.items()},
            "residuals": [g(r) for r in self.residuals],
            "point_constants": [g(c) for c in self.point_constants],
            "constant_std": g(self.constant_std),
            "rank": self.rank,
            "rank_deficient": self.rank_deficient,
        }


def fit_affine(targets: list, model_terms: list, cfg: EvalConfig = DEFAULT_CONFIG) -> FitResult:
    """Least squares  value(z) ≈ Σ c_i·term_i(z) + Σ d_j·part_j(z) + c₀.

    Named constants inside a model term are not given numeric values;
    the coefficient of each one becomes its own regressor ``d_j``.
    ``point_constants`` are value − Σ c_i·term_i − Σ d_j·part_j per point.
    """
    zs = np.array([complex(z) for z, _ in targets])
    y = np.array([float(np.real(v)) for _, v in targets])
    columns, labels, sym_cols = [], [], []
    for i, term in enumerate(model_terms):
        base, parts = split_symbols(term)
        columns.append(np.real(eval_series(base, zs, cfg)))
        labels.append(f"term{i}")
        for names, part in sorted(parts.items()):
            columns.append(np.real(eval_series(part, zs, cfg)))
            label = f"term{i}:" + "*".join(names)
            labels.append(label)
            sym_cols.append(len(columns) - 1)
    n_model = len(columns)
    if len(targets) <= n_model:
        raise ValueError(f"need more points ({len(targets)}) than model terms ({n_model})")
    A = np.column_stack(columns + [np.ones(len(zs))])
    sol, _, rank, _ = np.linalg.lstsq(A, y, rcond=None)
    fitted_wo_const = A[:, :n_model] @ sol[:n_model]
    point_constants = y - fitted_wo_const
    residuals = point_constants - sol[n_model]
    coeffs = [float(sol[i]) for i in range(n_model) if i not in sym_cols]
    sym = {labels[i]: float(sol[i]) for i in sym_cols}
    return FitResult(
        coeffs,
        float(sol[n_model]),
        sym,
        [float(r) for r in residuals],
        [float(c) for c in point_constants],
        float(np.std(point_constants)),
        int(rank),
        int(rank) < n_model + 1,
        labels,
    )
