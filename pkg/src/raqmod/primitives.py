"""∂-primitives of expansions and length-two double Eisenstein families.

The solver works column by column: for fixed (m, n) and zeta monomial the
equation ∂_r F = f reads

    a^{(k)} = 2m·b^{(k-1)} + (r + k)·b^{(k)}        for all k.

For m ≥ 1 it is solved top-down from the highest power of L.  For m = 0 it
is diagonal, with the single position k = -r forming the kernel L^{-r}·q̄^n;
a nonzero a^{(-r)}_{0,n} is an obstruction.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import CuspCorrectionRequired, InternalInconsistency, ObstructionViolated, WeightError
from .forms import eisenstein_G, real_eisenstein
from .operators import partial, partial_bar
from .scalar import PeriodScalar
from .series import BiSeries, RAForm


@dataclass
class PrimitiveSolution:
    primitive: RAForm
    free_parameters: list = field(default_factory=list)
    obstruction_report: list = field(default_factory=list)

    @property
    def obstructed(self) -> bool:
        return bool(self.obstruction_report)


def _columns(flat: dict) -> dict:
    cols: dict = defaultdict(dict)
    for (m, n, k, mono), c in flat.items():
        cols[(m, n, mono)][k] = c
    return cols


def _solve_column(m: int, r: int, a: dict):
    """Solve one column; returns (b, problem) where problem is None or a reason."""
    if m == 0:
        b = {}
        problem = None
        for k, c in a.items():
            if k == -r:
                problem = ("obstruction", k)
            else:
                b[k] = c / (r + k)
        return b, problem
    b = {}
    k = max(a)
    k_low = min(a)
    two_m = 2 * m
    while True:
        below = (a.get(k, 0) - (r + k) * b.get(k, 0)) / two_m
        if below:
            b[k - 1] = below
        elif k - 1 < k_low:
            return b, None
        if k - 1 < min(k_low, -r) and below:
            return b, ("nonterminating", k - 1)
        k -= 1


def _solve_flat(flat: dict, r: int, positive_m_only: bool = False):
    out: dict = {}
    problems = []
    for (m, n, mono), a in _columns(flat).items():
        if positive_m_only and m == 0:
            continue
        b, problem = _solve_column(m, r, a)
        if problem is not None:
            kind, k = problem
            problems.append({"kind": kind, "m": m, "n": n, "k": k, "coeff": PeriodScalar._raw({mono: a.get(k, 0)}) if kind == "obstruction" else None})
            if kind == "nonterminating":
                continue
        for k, c in b.items():
            out[(m, n, k, mono)] = c
    return out, problems


def solve_del_primitive(
    f: RAForm,
    target_r: int | None = None,
    *,
    raise_on_obstruction: bool = True,
    symbolic_kernel: bool = False,
    kernel_prefix: str = "kappa",
) -> PrimitiveSolution:
    """Find F of weights (r, s) with ∂_r F = f, where f has weights (r+1, s-1).

    The kernel L^{-r}·(antiholomorphic series) is not fixed by the equation.
    Its coefficients are reported in ``free_parameters`` and set to zero,
    unless ``symbolic_kernel`` asks for them to be inserted as named symbols.
    """
    r = f.r - 1 if target_r is None else target_r
    if r != f.r - 1:
        raise WeightError(f"a primitive at target r = {r} needs input weights ({r + 1}, ·), got {f.weights}")
    flat, problems = _solve_flat(f.series.flat, r)
    names = [f"{kernel_prefix}_{n}" for n in range(f.order + 1)]
    if symbolic_kernel:
        for n, name in enumerate(names):
            flat[(0, n, -r, (name,))] = Fraction(1)
    primitive = RAForm(r, f.s + 1, BiSeries.from_flat(flat, f.order), f.flags)
    if problems and raise_on_obstruction:
        raise ObstructionViolated(
            f"no finite primitive at target r = {r}: {len(problems)} blocking position(s)",
            [(p["m"], p["n"], p["k"]) for p in problems],
        )
    return PrimitiveSolution(primitive, names, problems)


def solve_dbar_primitive(f: RAForm, target_s: int | None = None, **kwargs) -> PrimitiveSolution:
    """∂̄-primitive via complex conjugation of the ∂-problem."""
    sol = solve_del_primitive(f.conjugate(), target_s, **kwargs)
    return PrimitiveSolution(sol.primitive.conjugate(), sol.free_parameters, sol.obstruction_report)


# ---------------------------------------------------------------------------
# double Eisenstein families


@dataclass
class DoubleEisensteinFamily:
    a: int
    b: int
    k: int
    order: int
    members: dict
    undetermined_constants: list

    @property
    def w(self) -> int:
        return self.a + self.b - self.k

    def __getitem__(self, rs):
        return self.members[tuple(rs)]

    def to_json(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "k": self.k,
            "order": self.order,
            "members": {f"{r},{s}": f.to_json() for (r, s), f in sorted(self.members.items())},
            "constants": list(self.undetermined_constants),
        }


def _zero(weights: tuple, order: int) -> RAForm:
    return RAForm(weights[0], weights[1], BiSeries.zero(order))


def double_eisenstein_sources(a: int, b: int, k: int, order: int) -> tuple:
    """Right-hand sides of the ∂- and ∂̄-systems.

    Returns ``(hol, anti)`` with ``hol[s]`` the source for the member (2w-s, s)
    in the ∂-system and ``anti[r]`` the source for (r, 2w-r) in the ∂̄-system.
    """
    w2 = 2 * (a + b - k)
    Lk = RAForm.L(order, k + 1)
    G = Lk * eisenstein_G(2 * a + 2, order)
    Gbar = Lk * eisenstein_G(2 * b + 2, order).conjugate()
    hol, anti = {}, {}
    for s in range(w2 + 1):
        i, j = 2 * b - k - s, k + s
        if i < 0:
            hol[s] = _zero((w2 + 1 - s, s - 1), order)
        else:
            hol[s] = G * real_eisenstein(i, j, order) * (math.comb(2 * a, k) * math.comb(k + s, k))
    for r in range(w2 + 1):
        i, j = k + r, 2 * a - k - r
        if j < 0:
            anti[r] = _zero((r - 1, w2 + 1 - r), order)
        else:
            anti[r] = Gbar * real_eisenstein(i, j, order) * (math.comb(2 * b, k) * math.comb(k + r, k))
    return hol, anti


def _rref_solve(matrix: list, rhs_columns: list):
    """Exact Gauss–Jordan elimination.

    Returns ``(solutions, nullspace)``: one particular solution per right-hand
    side (free variables set to zero) and a basis of the kernel.  Raises
    InternalInconsistency if some right-hand side is not in the image.
    """
    rows = [list(row) + [col[i] for col in rhs_columns] for i, row in enumerate(matrix)]
    ncols = len(matrix[0])
    pivots = []
    rank = 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        p = rows[rank][c]
        rows[rank] = [x / p for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][c]:
                factor = rows[i][c]
                rows[i] = [x - factor * y for x, y in zip(rows[i], rows[rank])]
        pivots.append(c)
        rank += 1
    for i in range(rank, len(rows)):
        if any(rows[i][ncols:]):
            raise InternalInconsistency("constant-term system is inconsistent")
    solutions = []
    for j in range(len(rhs_columns)):
        x = [Fraction(0)] * ncols
        for i, c in enumerate(pivots):
            x[c] = rows[i][ncols + j]
        solutions.append(x)
    free = [c for c in range(ncols) if c not in pivots]
    nullspace = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -rows[i][fc]
        nullspace.append(v)
    return solutions, nullspace


def _constant_terms(a: int, b: int, k: int, hol: dict, anti: dict) -> tuple:
    """Solve the joint constant-term system; returns (flat constants per r, symbol names)."""
    w2 = 2 * (a + b - k)
    levels = {-w2}
    for f in list(hol.values()) + list(anti.values()):
        levels.update(f.constant_part().keys())
    members: dict = {r: {} for r in range(w2 + 1)}
    names = []
    for level in sorted(levels):
        matrix, rhs_keys = [], []
        for s in range(w2 + 1):
            r = w2 - s
            row = [Fraction(0)] * (w2 + 1)
            row[r] = Fraction(r + level)
            if s >= 1:
                row[r + 1] -= r + 1
            matrix.append(row)
            rhs_keys.append(("hol", s))
        for r in range(w2 + 1):
            s = w2 - r
            row = [Fraction(0)] * (w2 + 1)
            row[r] = Fraction(s + level)
            if r >= 1:
                row[r - 1] -= s + 1
            matrix.append(row)
            rhs_keys.append(("anti", r))
        sources = [(hol if kind == "hol" else anti)[idx].constant_part().get(level, PeriodScalar()) for kind, idx in rhs_keys]
        monos = sorted({mono for src in sources for mono in src.terms}, key=lambda m: (len(m), [str(g) for g in m]))
        columns = [[src.terms.get(mono, Fraction(0)) for src in sources] for mono in monos]
        solutions, nullspace = _rref_solve(matrix, columns)
        for mono, x in zip(monos, solutions):
            for r, c in enumerate(x):
                if c:
                    members[r][(0, 0, level, mono)] = c
        for j, v in enumerate(nullspace):
            name = f"c_{{{a},{b},{k}}}" if len(nullspace) == 1 else f"c_{{{a},{b},{k}}}_{j}"
            names.append(name)
            for r, c in enumerate(v):
                if c:
                    members[r][(0, 0, level, (name,))] = c
    return members, names


def build_double_eisenstein(a: int, b: int, k: int, order: int) -> DoubleEisensteinFamily:
    """Solve both differential systems for the family F^{(k)} attached to (a, b).

    Coefficients with m ≥ 1 come from the ∂-system, those with m = 0 and
    n ≥ 1 from the ∂̄-system; the two routes must agree where both apply.
    Constant terms solve both systems jointly, level by level in L; any
    kernel found there becomes a named constant ``c_{a,b,k}``.
    """
    if a < 1 or b < 1 or not 0 <= k <= min(2 * a, 2 * b):
        raise ValueError(f"invalid double Eisenstein indices (a, b, k) = ({a}, {b}, {k})")
    w2 = 2 * (a + b - k)
    if w2 + 2 >= 12:
        raise CuspCorrectionRequired(f"total weight {w2 + 2} admits cusp forms; correction not implemented")
    hol, anti = double_eisenstein_sources(a, b, k, order)

    from_del: dict = {}
    previous = None
    for s in range(w2 + 1):
        r = w2 - s
        source = hol[s] if previous is None else previous * (r + 1) + hol[s]
        flat, problems = _solve_flat(source.series.flat, r, positive_m_only=True)
        if problems:
            raise ObstructionViolated(f"∂-system has no finite solution at member ({r}, {s})", [(p["m"], p["n"], p["k"]) for p in problems])
        previous = RAForm(r, s, BiSeries.from_flat(flat, order))
        from_del[(r, s)] = previous

    from_dbar: dict = {}
    previous = None
    for r in range(w2 + 1):
        s = w2 - r
        source = anti[r] if previous is None else previous * (s + 1) + anti[r]
        flat, problems = _solve_flat(source.conjugate().series.flat, s, positive_m_only=True)
        if problems:
            raise ObstructionViolated(f"∂̄-system has no finite solution at member ({r}, {s})", [(p["m"], p["n"], p["k"]) for p in problems])
        previous = RAForm(s, r, BiSeries.from_flat(flat, order)).conjugate()
        from_dbar[(r, s)] = previous

    constants, names = _constant_terms(a, b, k, hol, anti)
    members = {}
    for r in range(w2 + 1):
        s = w2 - r
        both_a = from_del[(r, s)].series.restrict(lambda m, n, kk: n >= 1)
        both_b = from_dbar[(r, s)].series.restrict(lambda m, n, kk: m >= 1)
        if both_a != both_b:
            raise InternalInconsistency(f"∂- and ∂̄-routes disagree on mixed terms of member ({r}, {s})")
        flat = dict(from_del[(r, s)].series.flat)
        flat.update(from_dbar[(r, s)].series.restrict(lambda m, n, kk: m == 0).flat)
        flat.update(constants[r])
        members[(r, s)] = RAForm(r, s, BiSeries.from_flat(flat, order))

    family = DoubleEisensteinFamily(a, b, k, order, members, names)
    problems = check_double_eisenstein(family, hol, anti)
    if problems:
        raise InternalInconsistency(f"assembled family fails its defining systems: {problems}")
    return family


def check_double_eisenstein(family: DoubleEisensteinFamily, hol: dict | None = None, anti: dict | None = None) -> list:
    """Return the list of defining equations that fail (empty when all hold)."""
    if hol is None or anti is None:
        hol, anti = double_eisenstein_sources(family.a, family.b, family.k, family.order)
    w2 = 2 * family.w
    F = family.members
    failures = []
    for s in range(w2 + 1):
        r = w2 - s
        lhs = partial(F[(r, s)])
        if s >= 1:
            lhs = lhs - F[(r + 1, s - 1)] * (r + 1)
        if lhs != hol[s]:
            failures.append(("del", r, s))
    for r in range(w2 + 1):
        s = w2 - r
        lhs = partial_bar(F[(r, s)])
        if r >= 1:
            lhs = lhs - F[(r - 1, s + 1)] * (s + 1)
        if lhs != anti[r]:
            failures.append(("dbar", r, s))
    return failures


def null_direction(family: DoubleEisensteinFamily) -> dict:
    """Coefficient of the named constant in each member (empty if none)."""
    out = {}
    for rs, f in family.members.items():
        part = {key: c for key, c in f.series.flat.items() if any(isinstance(g, str) for g in key[3])}
        out[rs] = RAForm(f.r, f.s, BiSeries.from_flat(part, f.order))
    return out

