from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from padicradius.field import INF, PrimeConfig
from padicradius.profile import (
    FitError, Sample, decompose_side, endpoint_continuity_check, fit_concave_pl, grid,
    slope_cap_check, verify_concavity,
)
from padicradius.radius import RadiusEnclosure

CFG = PrimeConfig(3, 2, -1)


def samples_of(f, ts, width=Fraction(0)):
    return [Sample(Fraction(t), RadiusEnclosure(f(t), f(t) - width, None, True, 0, 0)) for t in ts]


def pl(lines):
    return lambda t: max(a + s * Fraction(t) for s, a in lines)


def test_grid_includes_ends():
    g = grid(-1, 1, 5)
    assert g[0] == -1 and g[-1] == 1 and len(g) == 5
    with pytest.raises(ValueError):
        grid(0, 1, 1)


def test_concavity_accepts_convex_and_localizes_bump():
    f = pl([(Fraction(-2), -1), (Fraction(0), Fraction(-2, 9))])
    ts = grid(Fraction(-1, 2), 0, 9)
    assert verify_concavity(samples_of(f, ts), 0).passed
    bumped = samples_of(f, ts)
    s = bumped[4]
    bumped[4] = Sample(s.t, RadiusEnclosure(s.enc.v_est + 1, s.enc.v_cert + 1, None, True, 0, 0))
    rep = verify_concavity(bumped, Fraction(1, 100))
    assert not rep.passed
    assert rep.suspects == [4]


@given(st.integers(0, 8), st.fractions(1, 5, max_denominator=4))
def test_concavity_suspect_is_the_perturbed_sample(k, bump):
    ts = grid(0, 1, 11)
    f = pl([(Fraction(-1), 0), (Fraction(1, 2), Fraction(-3, 4))])
    ss = samples_of(f, ts)
    i = k + 1
    s = ss[i]
    ss[i] = Sample(s.t, RadiusEnclosure(s.enc.v_est + bump, s.enc.v_est + bump, None, True, 0, 0))
    rep = verify_concavity(ss, Fraction(1, 100))
    assert i in rep.suspects


def test_fit_recovers_dwork_shape():
    f = pl([(Fraction(-2), -1), (Fraction(0), Fraction(-2, 9))])
    ts = [Fraction(-1, 2), Fraction(-4, 9), Fraction(-7, 18) - Fraction(1, 36),
          Fraction(-7, 18) + Fraction(1, 36), Fraction(-1, 3), Fraction(-1, 4),
          Fraction(-1, 6), Fraction(-1, 12), Fraction(0)]
    fit = fit_concave_pl(samples_of(f, ts), 1)
    assert fit.slopes == [-2, 0]
    assert fit.breakpoints[1] == Fraction(-7, 18)
    assert fit(Fraction(-1, 2)) == 0


@settings(max_examples=40)
@given(st.integers(1, 3), st.lists(st.integers(-6, 6), min_size=1, max_size=3, unique=True),
       st.fractions(-1, 1, max_denominator=6))
def test_fit_slopes_have_small_denominators(mu, nums, a0):
    slopes = sorted({Fraction(n, mu) for n in nums})
    # consecutive sides meet at well separated breakpoints
    lines, a = [], Fraction(a0)
    for k, s in enumerate(slopes):
        if k:
            a = lines[-1][1] + (lines[-1][0] - s) * Fraction(2 * k - 1, 2 * len(slopes))
        lines.append((s, a))
    f = pl(lines)
    ts = grid(0, 1, 33)
    fit = fit_concave_pl(samples_of(f, ts), mu, tol=Fraction(1, 1000))
    assert all(s.denominator <= mu for s in fit.slopes)
    assert fit.slopes == sorted(fit.slopes)
    for t in ts:
        assert abs(fit(t) - f(t)) <= Fraction(1, 20)


def test_fit_fails_without_admissible_slope():
    f = lambda t: Fraction(1, 7) * t
    with pytest.raises(FitError):
        fit_concave_pl(samples_of(f, grid(0, 1, 5)), 1, s_max=0, tol=Fraction(1, 1000))


def test_fit_uses_bisection_resampling():
    f = pl([(Fraction(-1), 0), (Fraction(1), Fraction(-2, 3))])  # corner at 1/3
    calls = []

    def resample(t):
        calls.append(t)
        return f(t)

    fit = fit_concave_pl(samples_of(f, grid(0, 1, 5)), 1, resample=resample,
                         grid_tol=Fraction(1, 256))
    assert calls
    assert abs(fit.breakpoints[1] - Fraction(1, 3)) <= Fraction(1, 128)


def test_decompose_examples():
    dw = decompose_side(-3, -1, CFG, 1)
    assert any((d.h, d.j, d.s, d.v_b) == (0, 1, -3, Fraction(-3, 2)) for d in dw)
    ex = decompose_side(-1, Fraction(1, 2), PrimeConfig(3), 1)
    assert any((d.h, d.j, d.s, d.v_b) == (0, 1, -1, 0) for d in ex)
    zero = decompose_side(0, 0, CFG, 1)
    assert any(d.h == INF for d in zero)
    with pytest.warns(UserWarning):
        assert decompose_side(Fraction(1, 2), 0, CFG, 1) == []


@given(st.integers(1, 3), st.integers(-6, 6), st.fractions(-3, 3, max_denominator=18),
       st.sampled_from([PrimeConfig(3), CFG, PrimeConfig(2)]))
def test_decompositions_reconstruct_exactly(j, s, intercept, cfg):
    slope = Fraction(s, j)
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        decs = decompose_side(slope, intercept, cfg, 3)
    for d in decs:
        for t in (Fraction(0), Fraction(1, 3), Fraction(-5, 7)):
            want = slope * t if d.h == INF else intercept + slope * t
            assert d.evaluate(t, cfg.p) == want


def test_continuity_check():
    f = pl([(Fraction(-1), 0), (Fraction(1), Fraction(-1))])
    ts = grid(0, 1, 9)
    assert endpoint_continuity_check(samples_of(f, ts), Fraction(1, 100)).passed
    jump = lambda t: f(t) + (1 if t == 1 else 0)
    rep = endpoint_continuity_check(samples_of(jump, ts), Fraction(1, 100))
    assert not rep.passed and rep.gaps["hi"][0] == 1


def test_continuity_refinement_rescues_a_corner_near_the_end():
    # corner between the last two samples: extrapolation fails until refined
    f = pl([(Fraction(0), 0), (Fraction(8), Fraction(-7))])
    ts = grid(0, 1, 5)

    def refine(t):
        return samples_of(f, [t])[0]

    assert not endpoint_continuity_check(samples_of(f, ts), Fraction(1, 100)).passed
    assert endpoint_continuity_check(samples_of(f, ts), Fraction(1, 100), refine=refine).passed


def test_slope_cap():
    f = pl([(Fraction(-1), 0), (Fraction(2), Fraction(-1))])
    fit = fit_concave_pl(samples_of(f, grid(0, 1, 9)), 1)
    assert slope_cap_check(fit, 2) == (True, 2)
    assert slope_cap_check(fit, 1)[0] is False
