from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from padicradius.field import INF, PrimeConfig, inv, val, vp, vp_int

from strategies import CONFIGS, field_elems


def test_pi_valuation_and_relation():
    cfg = PrimeConfig(3, 2, -1)
    pi = cfg.pi
    assert pi ** 2 == cfg(-3)
    assert val(pi) == Fraction(1, 2)
    assert val(cfg.zero()) == INF


def test_unramified_pi_is_up():
    cfg = PrimeConfig(5, 1, 2)
    assert cfg.pi == cfg(10)
    assert cfg.pi.val() == 1


def test_valuation_of_mixed_element():
    cfg = PrimeConfig(3, 2, -1)
    x = cfg([Fraction(1, 3), 9])  # 1/3 + 9 pi: valuations -1 and 5/2
    assert x.val() == -1
    assert cfg([0, Fraction(1, 9)]).val() == Fraction(-3, 2)


def test_rejects_bad_configs():
    with pytest.raises(ValueError):
        PrimeConfig(4)
    with pytest.raises(ValueError):
        PrimeConfig(3, 0)
    with pytest.raises(ValueError):
        PrimeConfig(3, 2, 3)


def test_inverse_of_zero_raises():
    with pytest.raises(ZeroDivisionError):
        PrimeConfig(3).zero().inv()


def test_vp_helpers():
    assert vp_int(54, 3) == 3
    assert vp(Fraction(2, 27), 3) == -3
    assert vp(0, 3) == INF
    with pytest.raises(ValueError):
        vp_int(0, 3)


def test_str_is_readable():
    cfg = PrimeConfig(3, 2, -1)
    assert str(cfg([Fraction(1, 2), 3])) == "1/2 + 3*pi"


@given(st.data())
def test_val_multiplicative(data):
    cfg = data.draw(st.sampled_from(CONFIGS))
    x = data.draw(field_elems(cfg))
    y = data.draw(field_elems(cfg))
    assert val(x * y) == val(x) + val(y)


@given(st.data())
def test_val_ultrametric(data):
    cfg = data.draw(st.sampled_from(CONFIGS))
    x = data.draw(field_elems(cfg))
    y = data.draw(field_elems(cfg))
    assert val(x + y) >= min(val(x), val(y))
    if val(x) != val(y):
        assert val(x + y) == min(val(x), val(y))


@given(st.data())
def test_inverse(data):
    cfg = data.draw(st.sampled_from(CONFIGS))
    x = data.draw(field_elems(cfg, nonzero=True))
    assert x * inv(x) == cfg.one()
    assert val(inv(x)) == -val(x)


@given(st.data())
def test_field_axioms(data):
    cfg = data.draw(st.sampled_from(CONFIGS))
    x, y, z = (data.draw(field_elems(cfg)) for _ in range(3))
    assert x * (y + z) == x * y + x * z
    assert (x * y) * z == x * (y * z)
    assert x - x == cfg.zero()
