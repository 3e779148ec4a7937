import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from padicradius.catalog import dwork, exponential
from padicradius.diffsys import DomainSpec, pullback
from padicradius.field import PrimeConfig
from padicradius.laurent import Dilate
from padicradius.oracle import random_system, series_solution_radius
from padicradius.radius import (
    Cap, GaussPoint, RadiusOptions, RationalPoint, dwork_robba_audit, log_upper, radius_at,
    simplest_rational, transfer_check,
)


@pytest.mark.parametrize("k", [2, 3, 4])
def test_exponential_exact_at_powers(k):
    N = 3 ** k
    enc = radius_at(exponential(), GaussPoint(0), N=N, window=N // 2)
    expected = Fraction(1, 2) - Fraction(1, 2 * 3 ** k)
    assert enc.v_est == enc.v_cert == expected


def test_exponential_reported_value():
    enc = radius_at(exponential(), GaussPoint(0))
    assert enc.v_reported == Fraction(1, 2)
    assert enc.width == 0 and enc.stabilized


def test_domain_cap_applies():
    # the unit disk caps v_R below at t_lo = 0; G = 9 has v_R = 1/2 - 2 < 0
    sys = exponential(scale=9)
    assert radius_at(sys, GaussPoint(0), N=81).v_est == 0
    enc = radius_at(sys, GaussPoint(0), N=81, cap=Cap.UNCAPPED)
    assert enc.v_est == Fraction(40, 81) - 2
    assert enc.cert_floor == 0


def test_uncapped_domain_defaults_to_uncapped():
    enc = radius_at(dwork(), GaussPoint(0), N=200)
    assert enc.t_cap is None
    assert abs(enc.v_est + Fraction(2, 9)) < Fraction(1, 50)


def test_point_errors():
    with pytest.raises(ValueError):
        radius_at(exponential(), GaussPoint(-1))
    with pytest.raises(ValueError):
        radius_at(random_system(1, mu=2), GaussPoint(0), N=1)


def test_zero_system_is_degenerate():
    from padicradius.catalog import zero_system

    enc = radius_at(zero_system(), GaussPoint(1), N=20)
    assert enc.degenerate and enc.v_est == 0


@given(st.fractions(-20, 20, max_denominator=50), st.fractions(0, 3, max_denominator=50))
def test_simplest_rational(lo, span):
    hi = lo + span
    q = simplest_rational(lo, hi)
    assert lo <= q <= hi
    for d in range(1, q.denominator):
        assert math.ceil(lo * d) > math.floor(hi * d)


@given(st.integers(1, 10 ** 6), st.sampled_from([2, 3, 5, 7]))
def test_log_upper_is_upper_bound(n, p):
    assert float(log_upper(n, p)) >= math.log(n, p) - 1e-12


@settings(max_examples=12)
@given(st.integers(0, 10 ** 6), st.integers(1, 3))
def test_enclosure_order_and_convexity(seed, mu):
    sys = random_system(seed, mu=mu, kind="annulus")
    opts = RadiusOptions(N=40, window=20)
    ts = [Fraction(0), Fraction(1, 4), Fraction(1, 2)]
    est = []
    for t in ts:
        enc = radius_at(sys, GaussPoint(t), opts)
        assert enc.v_cert <= enc.v_est
        assert enc.v_cert >= enc.t_cap
        if mu == 1:
            assert enc.width == 0
        est.append(enc.v_est)
    # exact convexity of each beta_n, hence of the window max, in t
    assert est[1] <= (est[0] + est[2]) / 2


@settings(max_examples=10)
@given(st.integers(0, 10 ** 6), st.integers(1, 2), st.sampled_from([3, 9, Fraction(1, 3)]))
def test_dilation_is_exact_shift(seed, mu, a):
    sys = random_system(seed, mu=mu, kind="annulus")
    a = sys.config(a)
    va = a.val()
    pulled = pullback(sys, Dilate(a))
    opts = RadiusOptions(N=30, window=15, cap=Cap.UNCAPPED)
    for t in (Fraction(0), Fraction(1, 2)):
        old = radius_at(sys, GaussPoint(t), opts)
        new = radius_at(pulled, GaussPoint(t - va), opts)
        assert new.v_est == old.v_est - va


@settings(max_examples=8)
@given(st.integers(0, 10 ** 6), st.integers(1, 2))
def test_dual_path_agreement(seed, mu):
    sys = random_system(seed, mu=mu, kind="disk")
    c = sys.config(3)
    N = 60
    enc = radius_at(sys, RationalPoint(c), N=N, window=30, cap=Cap.UNCAPPED)
    oracle = series_solution_radius(sys, c, N, window=30)
    if oracle is None:
        assert enc.degenerate
    else:
        assert abs(oracle - enc.v_est) <= enc.width + Fraction(1, 100)


def test_transfer_on_exponential():
    rep = transfer_check(exponential(), exponential().config(1), Fraction(1, 2), 10,
                         RadiusOptions(N=81, window=40))
    assert rep.passed
    assert rep.boundary.v_est == max(e.v_est for e in rep.interior)


def test_audit_exponential():
    rep = dwork_robba_audit(exponential(), GaussPoint(0), 200, Fraction(1, 2))
    assert rep.passed and rep.checked == 200
    bad = dwork_robba_audit(exponential(), GaussPoint(0), 200, Fraction(1, 4))
    assert not bad.passed


def test_rational_point_on_annulus_uses_its_own_cap():
    cfg = PrimeConfig(3)
    sys = random_system(5, mu=1, kind="annulus")
    enc = radius_at(sys, RationalPoint(cfg(3)), N=30, window=15, cap=Cap.POINT)
    assert enc.t_cap == 1
    assert enc.v_est >= 1
