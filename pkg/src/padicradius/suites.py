"""Property checks shared by the command line and the test suite."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .diffsys import pullback
from .laurent import Dilate, Invert
from .profile import (
    endpoint_continuity_check, fit_concave_pl, max_width, sample_profile, verify_concavity,
    FitError, Sample,
)
from .radius import Cap, GaussPoint, RadiusOptions, radius_at, transfer_check


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    data: dict = field(default_factory=dict)

    def line(self):
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}{': ' + self.detail if self.detail else ''}"


def segment_of(sys):
    """A default finite segment inside the domain."""
    dom = sys.domain
    hi = dom.t_hi if not dom.is_disk else dom.t_lo + 1
    lo = dom.t_lo
    if dom.open_lo:
        lo = lo + (hi - lo) / 64
    return lo, hi


def concavity_check(sys, count=9, opts=None, factor=2, name="concavity"):
    """Convexity of v_R samples at tolerance ``factor`` times the largest enclosure width."""
    opts = opts or RadiusOptions()
    lo, hi = segment_of(sys)
    samples = sample_profile(sys, lo, hi, count, opts)
    tol = factor * max_width(samples)
    rep = verify_concavity(samples, tol)
    fit_ok, dens = True, []
    try:
        fit = fit_concave_pl(samples, sys.mu, tol=max(tol, opts.tol))
        dens = [s.denominator for s in fit.slopes]
        fit_ok = all(d <= sys.mu for d in dens)
    except FitError:
        fit = None
    detail = f"tol={tol} violations={len(rep.violations)} slope denominators={dens}"
    return CheckResult(name, rep.passed and fit_ok, detail,
                       {"samples": samples, "fit": fit, "report": rep})


def continuity_check(sys, samples, tol, opts=None, name="continuity"):
    opts = opts or RadiusOptions()
    normalized = samples[0].normalized

    def refine(t):
        return Sample(t, radius_at(sys, GaussPoint(t), opts), normalized)

    rep = endpoint_continuity_check(samples, tol, refine=refine)
    detail = ", ".join(f"{k}: gap {float(g):.4f} <= {float(a):.4f}" for k, (g, a) in rep.gaps.items())
    return CheckResult(name, rep.passed, detail, {"report": rep})


def dilation_check(sys, a, points, opts=None, name="dilation"):
    """R(phi*S, t) with phi = Dilate(a): v_R'(t) = v_R(t + v(a)) - v(a) exactly."""
    opts = opts or RadiusOptions()
    cfg = sys.config
    va = cfg(a).val()
    pulled = pullback(sys, Dilate(a))
    worst = Fraction(0)
    ok = True
    for t in points:
        t = Fraction(t)
        new = radius_at(pulled, GaussPoint(t - va), opts)
        old = radius_at(sys, GaussPoint(t), opts)
        gap = abs((new.v_est + va) - old.v_est)
        allowed = new.width + old.width
        worst = max(worst, gap)
        ok &= gap <= allowed
    return CheckResult(name, ok, f"worst gap {float(worst):.4f}")


def inversion_check(sys, gamma, points, opts=None, name="inversion"):
    """Normalized radius of Invert(gamma)-pullback at v(gamma) - t equals the original at t."""
    opts = opts or RadiusOptions()
    cfg = sys.config
    vg = cfg(gamma).val()
    pulled = pullback(sys, Invert(gamma))
    worst = Fraction(0)
    ok = True
    for t in points:
        t = Fraction(t)
        old = radius_at(sys, GaussPoint(t), opts)
        new = radius_at(pulled, GaussPoint(vg - t), opts)
        gap = abs((old.v_est - t) - (new.v_est - (vg - t)))
        allowed = new.width + old.width
        worst = max(worst, gap)
        ok &= gap <= allowed
    return CheckResult(name, ok, f"worst gap {float(worst):.4f}")


def transfer_suite_check(sys, c, t_r, sample_count=10, opts=None, name="transfer"):
    rep = transfer_check(sys, c, t_r, sample_count, opts)
    detail = (f"boundary {rep.boundary.v_est}, interior max "
              f"{max(e.v_est for e in rep.interior)}")
    return CheckResult(name, rep.passed, detail, {"report": rep})


def annulus_points(sys, count=5):
    lo, hi = segment_of(sys)
    return [lo + (hi - lo) * Fraction(i, count - 1) for i in range(count)]


def run_random_suite(seed, count, mu_max=3, N=100, kinds=("disk", "annulus")):
    """Concavity, transfer (mu = 1) and pullback checks on seeded random systems."""
    from .oracle import random_system

    opts = RadiusOptions(N=N, window=min(50, N // 2), cap=Cap.DOMAIN)
    results = []
    for k in range(count):
        s = seed * 1000 + k
        mu = 1 + k % mu_max
        kind = kinds[k % len(kinds)]
        sys = random_system(s, mu=mu, kind=kind)
        results.append(concavity_check(sys, opts=opts, name=f"concavity[{s}]"))
        if kind == "disk" and mu == 1:
            results.append(transfer_suite_check(sys, sys.config(1), Fraction(1, 2), 10, opts,
                                                name=f"transfer[{s}]"))
        if kind == "annulus":
            pts = annulus_points(sys)
            results.append(inversion_check(sys, sys.config(9), pts, opts, name=f"inversion[{s}]"))
            results.append(dilation_check(sys, sys.config(3), pts, opts, name=f"dilation[{s}]"))
    return results
