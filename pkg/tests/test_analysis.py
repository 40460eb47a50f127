import math
from fractions import Fraction

import numpy as np
import pytest

from raqmod.analysis import (
    EvalConfig,
    QuadratureGrid,
    eval_series,
    fit_affine,
    modularity_residual,
    pairing_degree,
    petersson,
    petersson_abs,
    split_symbols,
    tail_bound,
)
from raqmod.errors import DegreeMismatch, NonDecayingIntegrand, TailTooLarge, WeightError
from raqmod.forms import delta_cusp, eisenstein_G, frak_m, real_eisenstein
from raqmod.lattice import c111_graph, eisenstein_lattice, graph_sum
from raqmod.operators import laplace, partial, partial_bar
from raqmod.primitives import build_double_eisenstein, solve_del_primitive
from raqmod.scalar import PeriodScalar, zeta_value
from raqmod.series import BiSeries, RAForm

N = 24
Z = 0.3 + 1.1j
GRID = QuadratureGrid(48, 48)


def finite_difference_del(f: RAForm, z: complex, h: float = 1e-5) -> complex:
    """(z − z̄)·∂f/∂z + r·f with ∂/∂z = (∂x − i∂y)/2 by central differences."""
    fx = (eval_series(f, z + h) - eval_series(f, z - h)) / (2 * h)
    fy = (eval_series(f, z + 1j * h) - eval_series(f, z - 1j * h)) / (2 * h)
    return 2j * z.imag * 0.5 * (fx - 1j * fy) + f.r * eval_series(f, z)


def test_eval_trivial_values():
    assert eval_series(RAForm.one(N), Z) == 1
    assert eval_series(RAForm.L(N), 1j) == pytest.approx(-2 * math.pi, abs=1e-15)


def test_eval_vectorised():
    zs = np.array([1j, Z])
    out = eval_series(eisenstein_G(4, N), zs)
    assert out.shape == (2,) and out[1] == pytest.approx(eval_series(eisenstein_G(4, N), Z), rel=1e-15)


def test_eval_matches_lattice_sum():
    res = eisenstein_lattice(1, 1, 1j, 400)
    value = eval_series(real_eisenstein(1, 1, N), 1j)
    assert abs(res.value - value) <= res.error_estimate
    assert abs(res.extrapolated - value) < 1e-8


def test_eval_matches_q_product_for_delta():
    q = np.exp(2j * np.pi * Z)
    product = q * np.prod((1 - q ** np.arange(1, 80)) ** 24)
    assert abs(eval_series(delta_cusp(N), Z) - product) < 1e-12


def test_tail_too_large():
    with pytest.raises(TailTooLarge):
        eval_series(eisenstein_G(4, 4), 0.1 + 0.3j)
    assert tail_bound(eisenstein_G(4, N), 2j) < 1e-20


def test_symbols_need_values():
    f = RAForm(0, 0, BiSeries({(0, 0, 0): PeriodScalar.symbol("c")}, N))
    with pytest.raises(KeyError):
        eval_series(f, Z)
    assert eval_series(f, Z, EvalConfig.make({"c": 2.5})) == 2.5


def test_config_validation():
    with pytest.raises(ValueError):
        EvalConfig(target_abs_error=0)


def test_modularity_residuals():
    assert modularity_residual(real_eisenstein(2, 0, N), Z) < 1e-8
    assert modularity_residual(RAForm.L(N), Z) < 1e-14
    assert modularity_residual(delta_cusp(N), Z) < 1e-12
    assert modularity_residual(eisenstein_G(2, N), Z) > 1e-2


def test_cusp_primitive_is_not_modular():
    prim = solve_del_primitive(RAForm.L(N) * delta_cusp(N), target_r=10).primitive
    assert modularity_residual(prim, Z) > 1e-2


@pytest.mark.parametrize("make", [lambda: real_eisenstein(1, 1, N), lambda: frak_m(N), lambda: delta_cusp(N) * RAForm.L(N, 2)])
def test_del_agrees_with_finite_differences(make):
    f = make()
    assert abs(eval_series(partial(f), Z) - finite_difference_del(f, Z)) < 1e-6


def test_exact_identities_hold_numerically():
    L = lambda p: RAForm.L(N, p)
    m, G4, G6 = frak_m(N), eisenstein_G(4, N), eisenstein_G(6, N)
    F1 = build_double_eisenstein(1, 1, 1, 12)
    E22 = real_eisenstein(2, 2, N)
    G4_12 = eisenstein_G(4, 12)
    pairs = [
        (partial(G4), -(m * G4) * 4 + L(1) * G6 * Fraction(7, 5)),
        (laplace(E22), E22 * -4),
        (partial(real_eisenstein(1, 1, N)), real_eisenstein(2, 0, N) * 2),
        (partial_bar(real_eisenstein(0, 2, N)), L(1) * G4.conjugate()),
        (laplace(F1[(1, 1)]) + F1[(1, 1)] * 2, RAForm.L(12, 3) * G4_12 * G4_12.conjugate() * -4),
    ]
    for lhs, rhs in pairs:
        bound = tail_bound(lhs, Z) + tail_bound(rhs, Z)
        cfg = EvalConfig.make({n: 0.0 for n in lhs.series.symbols() | rhs.series.symbols()})
        diff = eval_series(lhs, Z, cfg) - eval_series(rhs, Z, cfg)
        assert abs(diff) <= 10 * bound + 1e-12


def test_pairing_errors():
    D = delta_cusp(N)
    with pytest.raises(DegreeMismatch):
        petersson(eisenstein_G(8, N), D)
    with pytest.raises(NonDecayingIntegrand):
        petersson(eisenstein_G(12, N), eisenstein_G(12, N))
    with pytest.raises(WeightError):
        petersson(D, D, n=10)
    assert pairing_degree(D, D) == 12


def test_delta_norm_is_positive_and_stable():
    D = delta_cusp(N)
    coarse = petersson(D, D, grid=GRID)
    fine = petersson(D, D, grid=QuadratureGrid(80, 80))
    assert coarse.real > 0 and abs(coarse.imag) < 1e-15
    assert abs(coarse - fine) < 1e-9 * abs(fine)


def test_positivity_on_cuspidal_inputs():
    D = delta_cusp(N)
    for f in (D, D * eisenstein_G(4, N), D.L_shift(1)):
        val = petersson(f, f, grid=GRID)
        assert val.real > 0 and abs(val.imag) < 1e-12 * val.real


def test_conjugate_symmetry():
    D = delta_cusp(N)
    f = partial(RAForm.L(N) * eisenstein_G(4, N) * eisenstein_G(6, N))
    val = petersson(f, D, grid=GRID)
    assert abs(petersson(f.conjugate(), D.conjugate(), grid=GRID) - val.conjugate()) < 1e-12 * petersson_abs(f, D, grid=GRID)
    assert abs(petersson(D, f, grid=GRID) - val.conjugate()) < 1e-12 * petersson_abs(f, D, grid=GRID)


@pytest.mark.parametrize("p", [1, 2, 3])
def test_L_scaling(p):
    D = delta_cusp(N)
    base = petersson(D, D, grid=GRID)
    assert petersson(D.L_shift(p), D, grid=GRID) == pytest.approx((-2 * math.pi) ** p * base, rel=1e-9)


def test_derivatives_are_orthogonal_to_delta():
    D = delta_cusp(N)
    f = partial(RAForm.L(N) * eisenstein_G(4, N) * eisenstein_G(6, N))
    assert abs(petersson(f, D, grid=GRID)) < 1e-4 * petersson_abs(f, D, grid=GRID)
    # a non-derivative of the same weights is not orthogonal
    g = RAForm.L(N, 0) * eisenstein_G(4, N) * eisenstein_G(8, N)
    assert abs(petersson(g, D, grid=GRID)) > 1e-3 * petersson_abs(g, D, grid=GRID)


def test_quadrature_nodes_lie_in_fundamental_domain():
    z, w = QuadratureGrid(16, 16, y_panels=2).nodes()
    assert np.all(np.abs(z) >= 1 - 1e-12) and np.all(np.abs(z.real) <= 0.5) and np.all(w > 0)
    # area of the domain below y_max = 6: 6 − ∫ sqrt(1 − x²) dx over [−½, ½]
    area = 6 - (math.sqrt(3) / 4 + math.pi / 6)
    assert np.sum(w) == pytest.approx(area, rel=1e-12)


def test_fit_recovers_constant():
    fit = fit_affine([(z, 3.25) for z in (1j, Z, 2j)], [])
    assert fit.constant == pytest.approx(3.25, abs=1e-14) and fit.constant_std < 1e-14


def test_fit_needs_enough_points():
    with pytest.raises(ValueError):
        fit_affine([(1j, 1.0)], [RAForm.L(N)])


def test_fit_reports_rank_deficiency():
    fit = fit_affine([(z, 1.0) for z in (1j, Z, 2j, 1.5j)], [RAForm.one(N)])
    assert fit.rank_deficient


def test_fit_c111():
    f = RAForm.L(N, 2) * real_eisenstein(2, 2, N)
    pts = (1j, Z, -0.2 + 1.3j, 0.45 + 0.95j)
    fit = fit_affine([(z, graph_sum(c111_graph(), z, 16).extrapolated) for z in pts], [f])
    assert fit.coefficients[0] == pytest.approx(2 / 3, rel=1e-2)
    assert fit.constant == pytest.approx(zeta_value(3), rel=1e-2)


def test_split_symbols():
    c = PeriodScalar.symbol("c")
    f = RAForm(0, 0, BiSeries({(0, 0, 0): c * PeriodScalar.zeta(3) + 1, (1, 1, 0): 2}, 4))
    base, parts = split_symbols(f)
    assert base.series == BiSeries({(0, 0, 0): 1, (1, 1, 0): 2}, 4)
    assert parts[("c",)].series == BiSeries({(0, 0, 0): PeriodScalar.zeta(3)}, 4)


def test_fit_with_symbol_regressor():
    c = PeriodScalar.symbol("c")
    term = RAForm(-2, -2, BiSeries({(0, 0, 2): 1, (0, 0, 0): c}, N))
    # target = 2·(L² + c) + 1 with c = 0.5
    targets = [(z, 2 * (-2 * math.pi * z.imag) ** 2 + 2.0) for z in (1j, Z, 2j, 1.5j)]
    fit = fit_affine(targets, [term])
    assert fit.coefficients[0] == pytest.approx(2)
    # constant and symbol column are collinear, so only their sum is determined
    assert fit.rank_deficient
