from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from raqmod.scalar import PeriodScalar
from raqmod.series import BiSeries, RAForm

settings.register_profile("default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ORDER = 6

rationals = st.builds(Fraction, st.integers(-20, 20), st.integers(1, 12))
monomials = st.lists(st.sampled_from([3, 5, 7]), max_size=2).map(lambda xs: tuple(sorted(xs)))


@st.composite
def scalars(draw, max_terms=3):
    terms = draw(st.dictionaries(monomials, rationals, max_size=max_terms))
    return PeriodScalar(terms)


@st.composite
def series(draw, order=ORDER, max_terms=5, k_range=(-3, 3), rational_only=False):
    keys = st.tuples(st.integers(0, order), st.integers(0, order), st.integers(*k_range))
    values = rationals if rational_only else scalars(2)
    terms = draw(st.dictionaries(keys, values, max_size=max_terms))
    return BiSeries(terms, order)


@st.composite
def forms(draw, order=ORDER, **kwargs):
    r = draw(st.integers(-4, 6))
    s = draw(st.integers(-4, 6).map(lambda x: x if (x + r) % 2 == 0 else x + 1))
    return RAForm(r, s, draw(series(order=order, **kwargs)))


_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_log():
    def log(number: int, ok: bool, text: str):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {text}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return log


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
