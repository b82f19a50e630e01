import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from screened_lgf.core import (
    LatticeConfig,
    LatticePoint,
    Method,
    MethodChoice,
    NotScreenedError,
    Tolerance,
    ToleranceError,
    as_tolerance,
    canonicalize,
    require_screened,
    select_method,
)

ints = st.integers(-10**6, 10**6)


@pytest.mark.parametrize("p, expected", [((-3, 2), (3, 2)), ((0, 0), (0, 0)), ((5, -7), (5, 7))])
def test_canonicalize_examples(p, expected):
    assert canonicalize(p) == expected


@given(ints, ints)
def test_canonicalize_idempotent_and_even(n, m):
    p = canonicalize((n, m))
    assert canonicalize(p) == p
    assert p.n >= 0 and p.m >= 0
    assert canonicalize((-n, m)) == canonicalize((n, -m)) == p
    assert LatticePoint(n, m).canonical() == p


def test_canonicalize_rejects_fractions():
    with pytest.raises(ValueError):
        canonicalize((1.5, 0))


@pytest.mark.parametrize("alpha1, c2", [(0.0, 1.0), (1.2, 1.0), (0.5, -1.0), (math.nan, 1.0), (0.5, math.inf)])
def test_config_validation(alpha1, c2):
    with pytest.raises(ValueError):
        LatticeConfig(alpha1, c2)


def test_config_properties():
    cfg = LatticeConfig.from_c(0.25, 0.5)
    assert cfg.c2 == 0.25
    assert cfg.lam == 2.5
    assert cfg.reduced_c == pytest.approx(1.0)
    assert not LatticeConfig(1.0, 0.0).screened
    with pytest.raises(NotScreenedError):
        require_screened(LatticeConfig(1.0, 0.0))


def test_tolerance_floor():
    assert Tolerance(1e-15).eps == 1e-15
    with pytest.raises(ToleranceError):
        Tolerance(1e-16)
    with pytest.raises(ValueError):
        Tolerance(0.0)
    t = Tolerance(1e-8)
    assert as_tolerance(t) is t


def test_select_series_for_large_screening():
    choice = select_method(LatticeConfig(1.0, 100.0), 1e-14)
    assert choice.tag is Method.SERIES
    assert choice.size == 9
    assert choice.certificate <= 1e-14
    assert choice.bound_source == "series-truncation"


def test_select_quad_for_single_point():
    choice = select_method(LatticeConfig(1.0, 1e-4), 1e-14)
    assert choice.tag is Method.QUAD1D
    assert choice.certificate <= 1e-14


def test_select_fft_for_row():
    choice = select_method(LatticeConfig(0.5, 0.01), 1e-8, row_length=100)
    assert choice.tag is Method.FFT_BATCH
    assert choice.size >= 100


def test_method_choice_rejects_uncertified():
    with pytest.raises(ValueError):
        MethodChoice(Method.SERIES, 1e-6, 10, 1e-8)


@given(st.floats(0.05, 1.0), st.floats(1e-4, 50.0), st.floats(1e-14, 1e-4))
def test_selected_certificate_meets_eps(alpha1, c2, eps):
    choice = select_method(LatticeConfig(alpha1, c2), eps)
    assert choice.certificate <= eps
