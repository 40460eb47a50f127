import math
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from raqmod.errors import WeightError
from raqmod.equivariant import (
    FramePoly,
    ZCoeff,
    delta_lemma_closed_form,
    delta_proj,
    frame_change,
    holomorphic_power,
    holomorphic_system,
    section_from_family,
)
from raqmod.forms import eisenstein_G, eisenstein_family
from raqmod.series import BiSeries, RAForm

from .conftest import series

ORDER = 3


def one():
    return ZCoeff.scalar(1, ORDER)


@st.composite
def sections(draw, frame="modular", max_n=2):
    n = draw(st.integers(0, max_n))
    coeffs = {}
    for i in range(2 * n + 1):
        if draw(st.booleans()):
            coeffs[(i, 2 * n - i)] = ZCoeff.constant(draw(series(order=ORDER, max_terms=2, rational_only=True)))
    return FramePoly(n, frame, coeffs, ORDER)


def random_section(rng: random.Random, n: int) -> FramePoly:
    coeffs = {}
    for i in range(2 * n + 1):
        terms = {(rng.randint(0, ORDER), rng.randint(0, ORDER), rng.randint(-2, 2)): Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(2)}
        coeffs[(i, 2 * n - i)] = ZCoeff.constant(BiSeries(terms, ORDER))
    return FramePoly(n, "modular", coeffs, ORDER)


@given(sections())
def test_frame_round_trip(p):
    assert frame_change(frame_change(p, "XY"), "modular") == p


@given(sections(frame="XY"))
def test_frame_round_trip_from_xy(p):
    assert frame_change(frame_change(p, "modular"), "XY") == p


def test_x_squared_in_modular_frame():
    z, zb = ZCoeff.z(ORDER), ZCoeff.zbar(ORDER)
    inv2 = ZCoeff.z_minus_zbar(ORDER, -2)
    X2 = FramePoly(1, "XY", {(2, 0): one()}, ORDER)
    expected = FramePoly(1, "modular", {(2, 0): zb * zb * inv2, (1, 1): -(z * zb * inv2) * 2, (0, 2): z * z * inv2}, ORDER)
    assert frame_change(X2, "modular") == expected


@pytest.mark.parametrize("n", [1, 2, 3])
def test_top_power_y_coefficient(n):
    P = frame_change(holomorphic_power(n, ORDER), "XY")
    assert P.coefficient(0, 2 * n) == ZCoeff({(2 * n, 0): BiSeries({(0, 0, 0): 1}, ORDER)}, ORDER)
    for j in range(2 * n + 1):
        expected = ZCoeff({(j, 0): BiSeries({(0, 0, 0): math.comb(2 * n, j) * (-1) ** j}, ORDER)}, ORDER)
        assert P.coefficient(2 * n - j, j) == expected


def test_zbar_identity():
    # z − z̄ stored through L
    assert ZCoeff.z(ORDER) - ZCoeff.zbar(ORDER) == ZCoeff.z_minus_zbar(ORDER)
    assert ZCoeff.z_minus_zbar(ORDER) * ZCoeff.z_minus_zbar(ORDER, -1) == one()


@given(sections(), sections())
def test_delta_zero_is_product(p, q):
    P, Q = frame_change(p, "XY"), frame_change(q, "XY")
    prod = {}
    for (i1, j1), c1 in P.coeffs.items():
        for (i2, j2), c2 in Q.coeffs.items():
            key = (i1 + i2, j1 + j2)
            prod[key] = prod[key] + c1 * c2 if key in prod else c1 * c2
    assert delta_proj(0, p, q) == FramePoly(p.n + q.n, "XY", prod, ORDER)


def test_delta_vanishes_beyond_degree():
    rng = random.Random(5)
    A = random_section(rng, 2)
    for m in (0, 1):
        for k in range(2 * m + 1, 2 * m + 3):
            assert not delta_proj(k, holomorphic_power(m, ORDER), A).coeffs


def test_delta_k1_m1_example():
    rng = random.Random(11)
    A = random_section(rng, 1)
    F = frame_change(delta_proj(1, holomorphic_power(1, ORDER), A), "modular")
    u = ZCoeff.z_minus_zbar(ORDER)
    for r in range(5):
        s = 4 - 1 * 2 - r
        if s < 0:
            continue
        src = A.coefficient(r - 1, s + 1) if r >= 1 else ZCoeff({}, ORDER)
        assert F.coefficient(r, s) == src * u * (2 * (s + 1))


@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("k", [0, 1, 2, 3, 4])
def test_lemma_closed_form(m, k):
    rng = random.Random(100 * m + k)
    for n in (1, 2):
        A = random_section(rng, n)
        direct = frame_change(delta_proj(k, holomorphic_power(m, ORDER), A, normalized=True), "modular")
        assert direct == delta_lemma_closed_form(m, k, A)


def test_section_of_weight_two_family():
    fam = eisenstein_family(2, ORDER)
    sec = section_from_family(fam)
    assert sec.n == 1 and len(sec.coeffs) == 3
    assert sec.to_raforms() == fam


def test_empty_family_gives_zero_section():
    sec = section_from_family({})
    assert sec.coeffs == {} and sec.n == 0


def test_inconsistent_family_rejected():
    fam = eisenstein_family(2, ORDER)
    with pytest.raises(WeightError):
        section_from_family({(2, 0): fam[(2, 0)], (2, 2): eisenstein_family(4, ORDER)[(2, 2)]})
    with pytest.raises(WeightError):
        section_from_family({(2, 0): fam[(1, 1)]})


def test_single_component_feeds_the_top_coefficient():
    m, n = 2, 2
    rng = random.Random(3)
    c = random_section(rng, n).coefficient(1, 3)
    for k in range(0, 2 * n + 1):
        A = FramePoly(n, "modular", {(2 * n - k, k): c}, ORDER)
        F = frame_change(delta_proj(k, holomorphic_power(m, ORDER), A, normalized=True), "modular")
        top = 2 * (m + n - k)
        assert F.coefficient(top, 0) == c * ZCoeff.z_minus_zbar(ORDER, k) * math.comb(2 * m, k)


@pytest.mark.parametrize("w", [2, 4])
def test_section_derivative_reproduces_scalar_system(w):
    fam = eisenstein_family(w, ORDER)
    sec = section_from_family(fam)
    scaled = frame_change(sec.d_dz(), "modular").scale(ZCoeff.z_minus_zbar(ORDER))
    system = holomorphic_system(sec)
    for rs, f in system.items():
        assert scaled.coefficient(*rs) == ZCoeff.constant(f.series)
    L = RAForm.L(ORDER)
    assert system[(w, 0)] == L * eisenstein_G(w + 2, ORDER)
    assert all(f.is_zero() for rs, f in system.items() if rs != (w, 0))


def test_json_dump():
    data = section_from_family(eisenstein_family(2, 2)).to_json()
    assert data["frame"] == "modular" and data["ipi_power"] == 0 and data["n"] == 1
    assert [(c["i"], c["j"]) for c in data["coeffs"]] == [(0, 2), (1, 1), (2, 0)]


def test_to_raforms_needs_plain_modular_coefficients():
    with pytest.raises(ValueError):
        frame_change(holomorphic_power(1, ORDER), "XY").to_raforms()
