"""Named verification suites shared by the command line and the test-suite."""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .analysis import (
    EvalConfig,
    QuadratureGrid,
    eval_series,
    fit_affine,
    modularity_residual,
    petersson,
    petersson_abs,
)
from .errors import ObstructionViolated
from .forms import (
    delta_cusp,
    eisenstein_G,
    eisenstein_family,
    frak_m,
    g2_star,
    real_eisenstein,
    real_eisenstein_constant,
    serre_theta,
)
from .lattice import c111_graph, c211_graph, graph_sum
from .operators import laplace, partial, partial_bar
from .primitives import build_double_eisenstein, null_direction, solve_del_primitive
from .scalar import PeriodScalar, zeta_value
from .series import BiSeries, RAForm


@dataclass
class Check:
    check_id: str
    passed: bool
    kind: str  # "exact" or "numeric"
    residual: float = 0.0
    threshold: float = 0.0
    detail: str = ""

    def to_json(self) -> dict:
        return {
            "id": self.check_id,
            "status": "pass" if self.passed else "fail",
            "kind": self.kind,
            "residual": float(f"{self.residual:.17g}"),
            "threshold": float(f"{self.threshold:.17g}"),
            **({"detail": self.detail} if self.detail else {}),
        }


@dataclass
class VerifyReport:
    suite: str
    checks: list = field(default_factory=list)
    runtime: float = 0.0
    config: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    def exact(self, check_id: str, ok: bool, detail: str = ""):
        self.checks.append(Check(check_id, bool(ok), "exact", 0.0 if ok else 1.0, 0.0, detail))

    def numeric(self, check_id: str, residual: float, threshold: float, *, above: bool = False, detail: str = ""):
        ok = residual > threshold if above else residual < threshold
        self.checks.append(Check(check_id, bool(ok), "numeric", float(residual), float(threshold), detail))

    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "status": "pass" if self.passed else "fail",
            "config": self.config,
            "checks": [c.to_json() for c in self.checks],
        }


def random_series(rng: random.Random, order: int, n_terms: int = 6, with_zeta: bool = True) -> BiSeries:
    terms = {}
    for _ in range(n_terms):
        key = (rng.randint(0, order), rng.randint(0, order), rng.randint(-4, 4))
        c = Fraction(rng.randint(-9, 9), rng.randint(1, 6))
        if with_zeta and rng.random() < 0.3:
            c = PeriodScalar.zeta(rng.choice((3, 5)), c)
        terms[key] = c
    return BiSeries(terms, order)


def random_form(rng: random.Random, order: int, **kwargs) -> RAForm:
    r = rng.randint(-4, 6)
    s = rng.randint(-4, 6)
    if (r + s) % 2:
        s += 1
    return RAForm(r, s, random_series(rng, order, **kwargs))


# ---------------------------------------------------------------------------


def suite_sl2(order: int = 10, samples: int = 100, seed: int = 0, **_) -> VerifyReport:
    rep = VerifyReport("sl2", config={"order": order, "samples": samples, "seed": seed})
    rng = random.Random(seed)
    bad = {"[del,dbar]=h": 0, "[h,del]=2del": 0, "[h,dbar]=-2dbar": 0, "[del,L]=0": 0, "[dbar,L]=0": 0}
    for _ in range(samples):
        f = random_form(rng, order)
        h = f.r - f.s
        if partial(partial_bar(f)) - partial_bar(partial(f)) != f * h:
            bad["[del,dbar]=h"] += 1
        df, dbf = partial(f), partial_bar(f)
        if df * (h + 2) - df * h != df * 2:
            bad["[h,del]=2del"] += 1
        if dbf * (h - 2) - dbf * h != dbf * (-2):
            bad["[h,dbar]=-2dbar"] += 1
        if partial(f.L_shift(1)) != partial(f).L_shift(1):
            bad["[del,L]=0"] += 1
        if partial_bar(f.L_shift(1)) != partial_bar(f).L_shift(1):
            bad["[dbar,L]=0"] += 1
    for name, count in bad.items():
        rep.exact(name, count == 0, f"{count} of {samples} samples failed" if count else "")
    return rep


def suite_laplace_ops(order: int = 10, samples: int = 100, seed: int = 1, **_) -> VerifyReport:
    rep = VerifyReport("laplace-ops", config={"order": order, "samples": samples, "seed": seed})
    rng = random.Random(seed)
    bad = {"(Delta+w)Lf=L.Delta f": 0, "[del,Delta]=0": 0, "[dbar,Delta]=0": 0, "leibniz-del": 0, "leibniz-dbar": 0, "two-factorizations": 0}
    for _ in range(samples):
        f = random_form(rng, order)
        g = random_form(rng, order)
        r, s = f.weights
        Lf = f.L_shift(1)
        if laplace(Lf) + Lf * (Lf.r + Lf.s) != laplace(f).L_shift(1):
            bad["(Delta+w)Lf=L.Delta f"] += 1
        if partial(laplace(f)) != laplace(partial(f)):
            bad["[del,Delta]=0"] += 1
        if partial_bar(laplace(f)) != laplace(partial_bar(f)):
            bad["[dbar,Delta]=0"] += 1
        if partial(f * g) != partial(f) * g + f * partial(g):
            bad["leibniz-del"] += 1
        if partial_bar(f * g) != partial_bar(f) * g + f * partial_bar(g):
            bad["leibniz-dbar"] += 1
        first = -partial_bar(partial(f)) + f * (r * (s - 1))
        second = -partial(partial_bar(f)) + f * (s * (r - 1))
        if not (first == second == laplace(f)):
            bad["two-factorizations"] += 1
    for name, count in bad.items():
        rep.exact(name, count == 0, f"{count} of {samples} samples failed" if count else "")
    return rep


TAU = {1: 1, 2: -24, 3: 252, 4: -1472, 5: 4830, 6: -6048, 7: -16744, 8: 84480, 9: -113643, 10: -115920}


def suite_ramanujan(order: int = 20, **_) -> VerifyReport:
    rep = VerifyReport("ramanujan", config={"order": order})
    N = order
    m = frak_m(N)
    G4, G6, D = eisenstein_G(4, N), eisenstein_G(6, N), delta_cusp(N)
    L = RAForm.L
    rep.exact("del m = -m^2 + 20/3 L^2 G4", partial(m) == -(m * m) + L(N, 2) * G4 * Fraction(20, 3))
    rep.exact("del G4 = -4 m G4 + 7/5 L G6", partial(G4) == -(m * G4 * 4) + L(N, 1) * G6 * Fraction(7, 5))
    rep.exact("del G6 = -6 m G6 + 800/7 L G4^2", partial(G6) == -(m * G6 * 6) + L(N, 1) * G4 * G4 * Fraction(800, 7))
    rep.exact("theta(Delta) = 0", serre_theta(D).is_zero())
    rep.exact("del Delta = -12 m Delta", partial(D) == -(m * D * 12))
    rep.exact("theta(G4) = 7/10 G6", serre_theta(G4) == G6 * Fraction(7, 10))
    rep.exact("theta(G6) = 400/7 G4^2", serre_theta(G6) == G4 * G4 * Fraction(400, 7))
    rep.exact("G2* = G2 - 1/(4L)", g2_star(N).constant_part().get(-1) == PeriodScalar.rational(Fraction(-1, 4)))
    taus = {n: D.coefficient(n, 0, 0) for n in TAU if n <= N}
    rep.exact("tau(n), n <= 10", all(taus[n] == PeriodScalar.rational(TAU[n]) for n in taus))
    return rep


def _zero(r: int, s: int, order: int) -> RAForm:
    return RAForm(r, s, BiSeries.zero(order))


def _hol_lhs(family: dict, r: int, w: int) -> RAForm:
    """∂F_{r,s} − (r+1)F_{r+1,s−1} for the member with s = w − r."""
    out = partial(family[(r, w - r)])
    if r < w:
        out = out - family[(r + 1, w - r - 1)] * (r + 1)
    return out


def _anti_lhs(family: dict, r: int, w: int) -> RAForm:
    """∂̄F_{r,s} − (s+1)F_{r−1,s+1} for the member with s = w − r."""
    out = partial_bar(family[(r, w - r)])
    if r > 0:
        out = out - family[(r - 1, w - r + 1)] * (w - r + 1)
    return out


def suite_eisenstein_system(order: int = 16, weights=(2, 4, 6, 8), **_) -> VerifyReport:
    rep = VerifyReport("eisenstein-system", config={"order": order, "weights": list(weights)})
    N = order
    L = RAForm.L(N, 1)
    for w in weights:
        E = eisenstein_family(w, N)
        G = eisenstein_G(w + 2, N)
        hol = all(_hol_lhs(E, r, w) == (L * G if r == w else _zero(r + 1, w - r - 1, N)) for r in range(w + 1))
        anti = all(_anti_lhs(E, r, w) == (L * G.conjugate() if r == 0 else _zero(r - 1, w - r + 1, N)) for r in range(w + 1))
        rep.exact(f"w={w}: holomorphic system", hol)
        rep.exact(f"w={w}: antiholomorphic system", anti)
        rep.exact(f"w={w}: Delta E = -w E", all(laplace(f) == f * (-w) for f in E.values()))
        rep.exact(f"w={w}: conj E_rs = E_sr", all(f.conjugate() == E[(s, r)] for (r, s), f in E.items()))
        rep.exact(
            f"w={w}: constant parts",
            all(
                {k: v for k, v in f.constant_part().items()} == real_eisenstein_constant(r, s)
                for (r, s), f in E.items()
            ),
        )
        rep.exact(f"w={w}: pole order >= -w", all(f.pole_order() >= -w for f in E.values()))
    return rep


def suite_primitive_solver(order: int = 24, samples: int = 100, seed: int = 2, point: complex = 0.3 + 1.1j, **_) -> VerifyReport:
    rep = VerifyReport("primitive-solver", config={"order": order, "samples": samples, "seed": seed, "z": [point.real, point.imag]})
    rng = random.Random(seed)
    failures = 0
    for _ in range(samples):
        F = random_form(rng, min(order, 10))
        r = F.r
        F = F.with_series(F.series.restrict(lambda m, n, k: not (m == 0 and k == -r)))
        f = partial(F)
        sol = solve_del_primitive(f).primitive
        if sol != F or partial(sol) != f:
            failures += 1
    rep.exact("back-substitution on random inputs", failures == 0, f"{failures} failures" if failures else "")

    N = order
    L = RAForm.L(N, 1)
    E20 = real_eisenstein(2, 0, N)
    sol = solve_del_primitive(L * eisenstein_G(4, N)).primitive
    diff = E20 - sol
    in_kernel = all(m == 0 and k == -2 for (m, n, k) in diff.series.positions())
    rep.exact("L G4 primitive equals E_{2,0} modulo ker del", in_kernel and partial(sol) == partial(E20))
    try:
        solve_del_primitive(L * g2_star(N))
        rep.exact("L G2* is obstructed", False)
    except ObstructionViolated as exc:
        rep.exact("L G2* is obstructed", (0, 0, 0) in exc.offending)
    cusp_prim = solve_del_primitive(L * delta_cusp(N), target_r=10).primitive
    rep.numeric("L Delta primitive is not modular", modularity_residual(cusp_prim, point), 1e-2, above=True)
    rep.numeric("E_{2,0} is modular", modularity_residual(E20, point), 1e-8)
    return rep


def _named_constant_value(diffs: list, name: str):
    """The value of ``name`` that makes every difference vanish, or None."""
    value = None
    for d in diffs:
        for (m, n, k) in d.series.positions():
            coeff = d.series.coefficient(m, n, k)
            p = sum((c for mono, c in coeff.items() if mono == (name,)), Fraction(0))
            rest = PeriodScalar._raw({mono: c for mono, c in coeff.items() if mono != (name,)})
            if p:
                value = -rest / p
                break
        if value is not None:
            break
    if value is None:
        return None
    if all(d.substitute({name: value}).is_zero() for d in diffs):
        return value
    return None


def suite_double_eis(order: int = 12, **_) -> VerifyReport:
    rep = VerifyReport("double-eis", config={"order": order})
    N = order
    L = RAForm.L
    E = {rs: real_eisenstein(*rs, N) for rs in ((2, 0), (1, 1), (0, 2))}
    G4 = eisenstein_G(4, N)
    G4b = G4.conjugate()
    F0 = build_double_eisenstein(1, 1, 0, N)
    F1 = build_double_eisenstein(1, 1, 1, N)
    F2 = build_double_eisenstein(1, 1, 2, N)
    for fam in (F0, F1, F2):
        rep.exact(f"F^({fam.k}) built with {len(fam.undetermined_constants)} named constant(s)", len(fam.undetermined_constants) <= 1)

    shuffle0 = {
        (0, 4): E[(0, 2)] * E[(0, 2)] * Fraction(1, 2),
        (4, 0): E[(2, 0)] * E[(2, 0)] * Fraction(1, 2),
        (1, 3): E[(0, 2)] * E[(1, 1)],
        (3, 1): E[(2, 0)] * E[(1, 1)],
        (2, 2): E[(2, 0)] * E[(0, 2)] + E[(1, 1)] * E[(1, 1)] * Fraction(1, 2),
    }
    diffs = [F0[rs] - expr for rs, expr in shuffle0.items()]
    value = _named_constant_value(diffs, F0.undetermined_constants[0])
    rep.exact("shuffle: F^(0) family", value is not None, f"{F0.undetermined_constants[0]} = {value}")
    expr2 = L(N, 2) * (E[(2, 0)] * E[(0, 2)] - E[(1, 1)] * E[(1, 1)] * Fraction(1, 4))
    value2 = _named_constant_value([F2[(0, 0)] - expr2], F2.undetermined_constants[0])
    rep.exact("shuffle: F^(2)_{0,0}", value2 is not None, f"{F2.undetermined_constants[0]} = {value2}")

    rep.exact("F^(1) del-system", partial(F1[(0, 2)]) - F1[(1, 1)] == RAForm(1, 1, BiSeries.zero(N))
              and partial(F1[(1, 1)]) - F1[(2, 0)] * 2 == L(N, 2) * G4 * E[(0, 2)] * 4
              and partial(F1[(2, 0)]) == L(N, 2) * G4 * E[(1, 1)] * 2)
    rep.exact("F^(1) dbar-system", partial_bar(F1[(0, 2)]) == L(N, 2) * G4b * E[(1, 1)] * 2
              and partial_bar(F1[(1, 1)]) - F1[(0, 2)] * 2 == L(N, 2) * G4b * E[(2, 0)] * 4
              and partial_bar(F1[(2, 0)]) - F1[(1, 1)] == RAForm(1, 1, BiSeries.zero(N)))
    rep.exact("F^(2) del and dbar", partial(F2[(0, 0)]) == L(N, 3) * G4 * E[(0, 2)] and partial_bar(F2[(0, 0)]) == L(N, 3) * G4b * E[(2, 0)])

    table = [
        ("(D+2)F1_02", laplace(F1[(0, 2)]) + F1[(0, 2)] * 2, L(N, 2) * G4b * E[(2, 0)] * (-4)),
        ("(D+2)F1_11", laplace(F1[(1, 1)]) + F1[(1, 1)] * 2, L(N, 3) * G4 * G4b * (-4)),
        ("(D+2)F1_20", laplace(F1[(2, 0)]) + F1[(2, 0)] * 2, L(N, 2) * G4 * E[(0, 2)] * (-4)),
        ("D F2_00", laplace(F2[(0, 0)]), -(L(N, 4) * G4 * G4b)),
        ("(D+4)F0_04", laplace(F0[(0, 4)]) + F0[(0, 4)] * 4, -(L(N, 1) * G4b * E[(1, 1)])),
        ("(D+4)F0_13", laplace(F0[(1, 3)]) + F0[(1, 3)] * 4, L(N, 1) * G4b * E[(2, 0)] * (-2)),
        ("(D+4)F0_22", laplace(F0[(2, 2)]) + F0[(2, 2)] * 4, -(L(N, 2) * G4 * G4b)),
        ("(D+4)F0_31", laplace(F0[(3, 1)]) + F0[(3, 1)] * 4, L(N, 1) * G4 * E[(0, 2)] * (-2)),
        ("(D+4)F0_40", laplace(F0[(4, 0)]) + F0[(4, 0)] * 4, -(L(N, 1) * G4 * E[(1, 1)])),
    ]
    e11sq = E[(1, 1)] * E[(1, 1)]
    e20e02 = E[(2, 0)] * E[(0, 2)]
    table.append(("(D+2)E11^2", laplace(e11sq) + e11sq * 2, e20e02 * (-8)))
    table.append(("D(E20 E02)", laplace(e20e02), -e11sq - L(N, 2) * G4 * G4b))
    T1 = L(N, 1) * F1[(1, 1)] - L(N, 2) * e20e02 * 4
    table.append(("(D+2)(L F1_11 - 4 L^2 E20 E02)", laplace(T1) + T1 * 2, L(N, 2) * e11sq * 4))
    for name, lhs, rhs in table:
        rep.exact(f"laplace table: {name}", lhs == rhs)
    nulls = null_direction(F0)
    rep.exact(
        "null direction lies in the kernel of both systems",
        all(_hol_lhs(nulls, r, 4).is_zero() and _anti_lhs(nulls, r, 4).is_zero() for r in range(5)),
    )
    return rep


def suite_laplace_table(order: int = 12, **kw) -> VerifyReport:
    full = suite_double_eis(order)
    rep = VerifyReport("laplace-table", [c for c in full.checks if c.check_id.startswith("laplace table")], config={"order": order})
    return rep


ZAGIER_POINTS = (1j, 0.3 + 1.1j)
C211_POINTS = (1j, 0.3 + 1.1j, -0.2 + 1.3j, 0.45 + 0.95j, 0.1 + 1.6j)


def suite_zagier(order: int = 24, cutoff: int = 50, tolerance: float = 5e-3, jobs: int = 1, **_) -> VerifyReport:
    rep = VerifyReport("zagier", config={"order": order, "cutoff": cutoff, "tolerance": tolerance})
    f = RAForm.L(order, 2) * real_eisenstein(2, 2, order) * Fraction(2, 3)
    z3 = zeta_value(3)
    for z in ZAGIER_POINTS:
        res = graph_sum(c111_graph(), z, cutoff, jobs=jobs)
        expected = eval_series(f, z).real + z3
        rel = abs(res.extrapolated - expected) / abs(expected)
        rep.numeric(f"C111 at z={z}", rel, tolerance, detail=f"lattice {res.extrapolated:.12g}, closed form {expected:.12g}")
    return rep


def c211_model(order: int) -> list:
    L = RAForm.L
    F1 = build_double_eisenstein(1, 1, 1, order)
    T1 = L(order, 1) * F1[(1, 1)] - L(order, 2) * real_eisenstein(2, 0, order) * real_eisenstein(0, 2, order) * 4
    return [T1, L(order, 3) * real_eisenstein(3, 3, order)]


def suite_c211(order: int = 24, cutoff: int = 50, tolerance: float = 1e-2, jobs: int = 1, **_) -> VerifyReport:
    rep = VerifyReport("c211", config={"order": order, "cutoff": cutoff, "tolerance": tolerance})
    targets = [(z, graph_sum(c211_graph(), z, cutoff, jobs=jobs).extrapolated) for z in C211_POINTS]
    fit = fit_affine(targets, c211_model(order))
    a, b = fit.coefficients
    rep.numeric("coefficient of L F1_11 - 4 L^2 E20 E02", abs(a - 4), 0.05, detail=f"{a:.10g}")
    rep.numeric("coefficient of L^3 E33", abs(b - Fraction(1, 25)), 0.002, detail=f"{b:.10g}")
    rep.numeric("spread of the fitted constant", fit.constant_std, tolerance)
    rep.config["fit"] = fit.to_json()
    return rep


def _delta_product(z: complex, terms: int = 60) -> complex:
    q = np.exp(2j * np.pi * z)
    n = np.arange(1, terms + 1)
    return q * np.prod((1 - q**n) ** 24)


def delta_norm_oracle(epsabs: float = 1e-16, epsrel: float = 1e-11) -> float:
    """⟨Δ, Δ⟩ by adaptive quadrature with Δ from its product formula."""
    from scipy.integrate import dblquad

    def integrand(y, x):
        return abs(_delta_product(complex(x, y))) ** 2 * y**10

    val, _ = dblquad(integrand, -0.5, 0.5, lambda x: math.sqrt(1 - x * x), lambda x: 8.0, epsabs=epsabs, epsrel=epsrel)
    return val


def suite_petersson_orth(order: int = 24, tolerance: float = 1e-4, nx: int = 64, ny: int = 64, **_) -> VerifyReport:
    rep = VerifyReport("petersson-orth", config={"order": order, "tolerance": tolerance, "nx": nx, "ny": ny})
    grid = QuadratureGrid(nx, ny)
    N = order
    D = delta_cusp(N)
    dd = petersson(D, D, grid=grid)
    oracle = delta_norm_oracle()
    rep.numeric("<Delta,Delta> against adaptive oracle", abs(dd.real - oracle) / oracle, 1e-6, detail=f"{dd.real:.15g} vs {oracle:.15g}")
    f = partial(RAForm.L(N, 1) * eisenstein_G(4, N) * eisenstein_G(6, N))
    val = petersson(f, D, grid=grid)
    scale = petersson_abs(f, D, grid=grid)
    rep.numeric("<del(L G4 G6), Delta> relative to its scale", abs(val) / scale, tolerance)
    g = D.L_shift(2)
    lhs = petersson(g, D, grid=grid)
    rep.numeric("<L^2 Delta, Delta> = (2 pi)^2 <Delta, Delta>", abs(lhs / ((2 * math.pi) ** 2 * dd) - 1), 1e-9)
    lhs = petersson(D, g, grid=grid)
    rep.numeric("<Delta, L^2 Delta> = (2 pi)^2 <Delta, Delta>", abs(lhs / ((2 * math.pi) ** 2 * dd) - 1), 1e-9)
    conj = petersson(f.conjugate(), D.conjugate(), grid=grid)
    rep.numeric("<conj f, conj g> = conj <f, g>", abs(conj - val.conjugate()) / scale, 1e-12)
    return rep


def orthogonality_alphas(order: int = 24, grid: QuadratureGrid = QuadratureGrid()) -> dict:
    D = delta_cusp(order)
    dd = petersson(D, D, grid=grid)
    out = {}
    for a in range(1, 5):
        b = 5 - a
        g = eisenstein_G(2 * a + 2, order) * real_eisenstein(2 * b, 0, order)
        out[(2 * a, 2 * b)] = petersson(g, D, grid=grid) / dd
    return out


def suite_orthogonality_9_14(order: int = 24, tolerance: float = 1e-3, **_) -> VerifyReport:
    rep = VerifyReport("orthogonality-9-14", config={"order": order, "tolerance": tolerance})
    al = orthogonality_alphas(order)
    comb = 9 * (al[(2, 8)] - al[(8, 2)]) + 14 * (al[(4, 6)] - al[(6, 4)])
    biggest = max(abs(v) for v in al.values())
    rep.numeric("9(a28 - a82) + 14(a46 - a64)", abs(comb) / biggest, tolerance, detail=", ".join(f"a{p}{q}={v.real:.12g}" for (p, q), v in sorted(al.items())))
    rep.config["alphas"] = {f"{p},{q}": float(f"{v.real:.17g}") for (p, q), v in sorted(al.items())}
    return rep


SUITES = {
    "sl2": suite_sl2,
    "laplace-ops": suite_laplace_ops,
    "ramanujan": suite_ramanujan,
    "eisenstein-system": suite_eisenstein_system,
    "primitive-solver": suite_primitive_solver,
    "double-eis": suite_double_eis,
    "laplace-table": suite_laplace_table,
    "zagier": suite_zagier,
    "c211": suite_c211,
    "petersson-orth": suite_petersson_orth,
    "orthogonality-9-14": suite_orthogonality_9_14,
}


def run_suite(name: str, **kwargs) -> VerifyReport:
    """Run a suite; keyword arguments left as None fall back to the suite defaults."""
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    start = time.perf_counter()
    report = SUITES[name](**{k: v for k, v in kwargs.items() if v is not None})
    report.runtime = time.perf_counter() - start
    return report
