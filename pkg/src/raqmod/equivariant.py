"""Polynomial-valued sections: V_{2n} ⊗ (expansions).

A section is a homogeneous polynomial of degree 2n, written either in the
(X, Y) frame or in the modular frame built from A = X − zY and B = X − z̄Y.
Its coefficients are elements of :class:`ZCoeff`, a polynomial ring in z and
(iπ)^{±1} over expansions.  The anti-holomorphic variable is eliminated with
z̄ = z − L/(iπ), so every identity between such coefficients can be tested
by comparing dictionaries.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import WeightError
from .operators import dz, dzbar
from .series import BiSeries, RAForm


class ZCoeff:
    """Σ z^a (iπ)^p S_{a,p} with S_{a,p} expansions; keys are ``(a, p)``."""

    __slots__ = ("terms", "order")

    def __init__(self, terms: dict | None = None, order: int = 0):
        self.order = order
        self.terms = {key: s.truncate(order) for key, s in (terms or {}).items() if not s.is_zero()}

    @classmethod
    def constant(cls, series: BiSeries) -> "ZCoeff":
        return cls({(0, 0): series}, series.order)

    @classmethod
    def scalar(cls, c, order: int) -> "ZCoeff":
        return cls({(0, 0): BiSeries({(0, 0, 0): c}, order)}, order)

    @classmethod
    def z(cls, order: int) -> "ZCoeff":
        return cls({(1, 0): BiSeries({(0, 0, 0): 1}, order)}, order)

    @classmethod
    def zbar(cls, order: int) -> "ZCoeff":
        return cls({(1, 0): BiSeries({(0, 0, 0): 1}, order), (0, -1): BiSeries({(0, 0, 1): -1}, order)}, order)

    @classmethod
    def z_minus_zbar(cls, order: int, power: int = 1) -> "ZCoeff":
        """(z − z̄)^power = (iπ)^{-power} L^power."""
        return cls({(0, -power): BiSeries({(0, 0, power): 1}, order)}, order)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "ZCoeff") -> "ZCoeff":
        order = min(self.order, other.order)
        out = dict(self.terms)
        for key, s in other.terms.items():
            out[key] = out[key] + s if key in out else s
        return ZCoeff(out, order)

    def __neg__(self):
        return ZCoeff({key: -s for key, s in self.terms.items()}, self.order)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, ZCoeff):
            return ZCoeff({key: s * other for key, s in self.terms.items()}, self.order)
        order = min(self.order, other.order)
        out: dict = {}
        for (a1, p1), s1 in self.terms.items():
            for (a2, p2), s2 in other.terms.items():
                key = (a1 + a2, p1 + p2)
                prod = s1 * s2
                out[key] = out[key] + prod if key in out else prod
        return ZCoeff(out, order)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, ZCoeff):
            return NotImplemented
        order = min(self.order, other.order)
        diff = self.truncate(order) - other.truncate(order)
        return diff.is_zero()

    def truncate(self, order: int) -> "ZCoeff":
        return ZCoeff(self.terms, min(order, self.order))

    def d_dz(self) -> "ZCoeff":
        out: dict = {}
        for (a, p), s in self.terms.items():
            if a:
                key = (a - 1, p)
                out[key] = out[key] + s * a if key in out else s * a
            key = (a, p + 1)
            ds = dz(s)
            out[key] = out[key] + ds if key in out else ds
        return ZCoeff(out, self.order)

    def d_dzbar(self) -> "ZCoeff":
        out: dict = {}
        for (a, p), s in self.terms.items():
            key = (a, p + 1)
            ds = dzbar(s)
            out[key] = out[key] + ds if key in out else ds
        return ZCoeff(out, self.order)

    def is_plain(self) -> bool:
        """True when free of z and iπ, i.e. an ordinary expansion."""
        return all(key == (0, 0) for key in self.terms)

    def plain(self) -> BiSeries:
        if not self.is_plain():
            raise ValueError(f"coefficient still depends on z or iπ: keys {sorted(self.terms)}")
        return self.terms.get((0, 0), BiSeries.zero(self.order))

    def ipi_powers(self) -> set:
        return {p for (_, p) in self.terms}

    def to_json(self) -> list:
        return [{"z": a, "ipi": p, "series": s.to_json()} for (a, p), s in sorted(self.terms.items())]

    def __repr__(self):
        return f"ZCoeff({sorted(self.terms)})"


def _poly_mul(p: dict, q: dict) -> dict:
    out: dict = {}
    for (i1, j1), c1 in p.items():
        for (i2, j2), c2 in q.items():
            key = (i1 + i2, j1 + j2)
            prod = c1 * c2
            out[key] = out[key] + prod if key in out else prod
    return {key: c for key, c in out.items() if not c.is_zero()}


def _poly_pow(base: dict, e: int, one: ZCoeff) -> dict:
    out = {(0, 0): one}
    for _ in range(e):
        out = _poly_mul(out, base)
    return out


class FramePoly:
    """Element of V_{2n} ⊗ expansions in the ``"XY"`` or ``"modular"`` frame.

    ``coeffs`` maps exponent pairs (i, j) with i + j = 2n to :class:`ZCoeff`.
    In the modular frame (i, j) are the powers of (X − zY) and (X − z̄Y).
    """

    def __init__(self, n: int, frame: str, coeffs: dict, order: int):
        if frame not in ("XY", "modular"):
            raise ValueError(f"unknown frame {frame!r}")
        for (i, j) in coeffs:
            if i + j != 2 * n or i < 0 or j < 0:
                raise ValueError(f"exponent {(i, j)} does not belong to V_{2 * n}")
        self.n = n
        self.frame = frame
        self.order = order
        self.coeffs = {key: c for key, c in coeffs.items() if not c.is_zero()}

    @classmethod
    def zero(cls, n: int, frame: str, order: int) -> "FramePoly":
        return cls(n, frame, {}, order)

    def coefficient(self, i: int, j: int) -> ZCoeff:
        return self.coeffs.get((i, j), ZCoeff({}, self.order))

    def __add__(self, other: "FramePoly") -> "FramePoly":
        if (self.n, self.frame) != (other.n, other.frame):
            raise ValueError("sections live in different spaces or frames")
        out = dict(self.coeffs)
        for key, c in other.coeffs.items():
            out[key] = out[key] + c if key in out else c
        return FramePoly(self.n, self.frame, out, min(self.order, other.order))

    def __neg__(self):
        return FramePoly(self.n, self.frame, {key: -c for key, c in self.coeffs.items()}, self.order)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "FramePoly":
        if isinstance(c, ZCoeff):
            return FramePoly(self.n, self.frame, {key: v * c for key, v in self.coeffs.items()}, self.order)
        return FramePoly(self.n, self.frame, {key: v * c for key, v in self.coeffs.items()}, self.order)

    def __eq__(self, other):
        if not isinstance(other, FramePoly):
            return NotImplemented
        if (self.n, self.frame) != (other.n, other.frame):
            return False
        keys = set(self.coeffs) | set(other.coeffs)
        return all(self.coefficient(*key) == other.coefficient(*key) for key in keys)

    def d_dz(self) -> "FramePoly":
        """∂/∂z in the XY frame (where the basis is constant)."""
        if self.frame != "XY":
            return frame_change(self, "XY").d_dz()
        return FramePoly(self.n, "XY", {key: c.d_dz() for key, c in self.coeffs.items()}, self.order)

    def d_dzbar(self) -> "FramePoly":
        if self.frame != "XY":
            return frame_change(self, "XY").d_dzbar()
        return FramePoly(self.n, "XY", {key: c.d_dzbar() for key, c in self.coeffs.items()}, self.order)

    def to_raforms(self) -> dict:
        """Modular-frame coefficients as forms of weights (r, s)."""
        if self.frame != "modular":
            raise ValueError("only modular-frame sections have modular coefficients")
        return {(r, s): RAForm(r, s, c.plain()) for (r, s), c in self.coeffs.items()}

    def ipi_power(self):
        powers = set().union(*(c.ipi_powers() for c in self.coeffs.values())) if self.coeffs else {0}
        return powers.pop() if len(powers) == 1 else None

    def to_json(self) -> dict:
        return {
            "frame": self.frame,
            "n": self.n,
            "order": self.order,
            "ipi_power": self.ipi_power(),
            "coeffs": [{"i": i, "j": j, "terms": c.to_json()} for (i, j), c in sorted(self.coeffs.items())],
        }


def frame_change(p: FramePoly, target: str) -> FramePoly:
    """Rewrite a section in the other frame.

    Modular to XY expands (X − zY)^r (X − z̄Y)^s binomially.  XY to modular
    substitutes X = (z·B − z̄·A)/(z − z̄) and Y = (B − A)/(z − z̄).
    """
    if target == p.frame:
        return p
    order = p.order
    one = ZCoeff.scalar(1, order)
    z, zbar = ZCoeff.z(order), ZCoeff.zbar(order)
    if target == "XY":
        a_lin = {(1, 0): one, (0, 1): -z}
        b_lin = {(1, 0): one, (0, 1): -zbar}
    else:
        inv = ZCoeff.z_minus_zbar(order, -1)
        a_lin = {(0, 1): z * inv, (1, 0): -(zbar * inv)}
        b_lin = {(0, 1): inv, (1, 0): -inv}
    out: dict = {}
    a_pows = [_poly_pow(a_lin, e, one) for e in range(2 * p.n + 1)]
    b_pows = [_poly_pow(b_lin, e, one) for e in range(2 * p.n + 1)]
    for (i, j), c in p.coeffs.items():
        for key, v in _poly_mul(a_pows[i], b_pows[j]).items():
            term = v * c
            out[key] = out[key] + term if key in out else term
    return FramePoly(p.n, target, out, order)


def _derivative_table(i: int, j: int, dx: int, dy: int):
    if dx > i or dy > j:
        return None
    return (i - dx, j - dy), math.perm(i, dx) * math.perm(j, dy)


def delta_proj(k: int, p: FramePoly, q: FramePoly, normalized: bool = False) -> FramePoly:
    """δ^k(p ⊗ q) = mult ∘ (∂_X⊗∂_Y − ∂_Y⊗∂_X)^k, optionally divided by (k!)².

    Result lies in V_{2m+2n−2k}, returned in the XY frame.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    P = frame_change(p, "XY")
    Q = frame_change(q, "XY")
    n_out = p.n + q.n - k
    order = min(p.order, q.order)
    if n_out < 0 or k > 2 * p.n or k > 2 * q.n:
        return FramePoly.zero(max(n_out, 0), "XY", order)
    out: dict = {}
    for t in range(k + 1):
        sign = (-1) ** t * math.comb(k, t)
        for (i1, j1), c1 in P.coeffs.items():
            d1 = _derivative_table(i1, j1, k - t, t)
            if d1 is None:
                continue
            for (i2, j2), c2 in Q.coeffs.items():
                d2 = _derivative_table(i2, j2, t, k - t)
                if d2 is None:
                    continue
                key = (d1[0][0] + d2[0][0], d1[0][1] + d2[0][1])
                factor = sign * d1[1] * d2[1]
                if normalized:
                    factor = Fraction(factor, math.factorial(k) ** 2)
                term = (c1 * c2) * factor
                out[key] = out[key] + term if key in out else term
    return FramePoly(n_out, "XY", out, order)


def delta_lemma_closed_form(m: int, k: int, section: FramePoly) -> FramePoly:
    """δ^k/(k!)² ((X − zY)^{2m} ⊗ A) computed from the closed formula.

    F_{r,s} = (z − z̄)^k · C(2m, k) · C(s + k, k) · A_{r−2m+k, s+k}.
    """
    A = frame_change(section, "modular")
    n_out = m + A.n - k
    order = A.order
    if k > 2 * m or k > 2 * A.n:
        return FramePoly.zero(max(n_out, 0), "modular", order)
    u_k = ZCoeff.z_minus_zbar(order, k)
    out = {}
    for r in range(2 * n_out + 1):
        s = 2 * n_out - r
        src = (r - 2 * m + k, s + k)
        if src in A.coeffs:
            out[(r, s)] = A.coeffs[src] * u_k * (math.comb(2 * m, k) * math.comb(s + k, k))
    return FramePoly(n_out, "modular", out, order)


def holomorphic_power(m: int, order: int) -> FramePoly:
    """(X − zY)^{2m} as a modular-frame section."""
    return FramePoly(m, "modular", {(2 * m, 0): ZCoeff.scalar(1, order)}, order)


def section_from_family(family: dict, order: int | None = None) -> FramePoly:
    """Package {(r, s): F_{r,s}} as Σ F_{r,s} (X − zY)^r (X − z̄Y)^s."""
    if not family:
        return FramePoly.zero(0, "modular", order or 0)
    degrees = {r + s for (r, s) in family}
    if len(degrees) != 1 or degrees.pop() % 2:
        raise WeightError("family members must share one even total degree")
    for (r, s), f in family.items():
        if f.weights != (r, s):
            raise WeightError(f"member at {(r, s)} has weights {f.weights}")
    n = next(iter(family))
    n = (n[0] + n[1]) // 2
    order = min(f.order for f in family.values()) if order is None else order
    return FramePoly(n, "modular", {rs: ZCoeff.constant(f.series.truncate(order)) for rs, f in family.items()}, order)


def holomorphic_system(section: FramePoly) -> dict:
    """Components L·A_{r,s} = ∂F_{r,s} − (r+1)F_{r+1,s−1}, read off the section's coefficients."""
    from .operators import partial

    F = section.to_raforms()
    w2 = 2 * section.n
    out = {}
    for r in range(w2 + 1):
        s = w2 - r
        f = F.get((r, s))
        if f is None:
            f = RAForm(r, s, BiSeries.zero(section.order))
        val = partial(f)
        if (r + 1, s - 1) in F:
            val = val - F[(r + 1, s - 1)] * (r + 1)
        out[(r, s)] = val
    return out
