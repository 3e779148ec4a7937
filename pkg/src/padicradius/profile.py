"""Convergence profiles along a segment of log-radii.

In (t, v) coordinates the log-concavity of rho -> R(rho) becomes convexity of
t -> v_R(t), and slopes in log rho equal slopes in t.  A fitted profile is a
convex piecewise-linear function whose slopes are rationals s/j with j <= mu.
"""

from __future__ import annotations

import warnings
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from .field import INF
from .radius import GaussPoint, RadiusOptions, radius_at, simplest_rational


class FitError(ValueError):
    """No admissible slope fits a run of samples within tolerance."""


@dataclass(frozen=True)
class Sample:
    t: Fraction
    enc: object
    normalized: bool = False

    @property
    def value(self):
        return self.enc.v_est - self.t if self.normalized else self.enc.v_est

    @property
    def cert(self):
        return self.enc.v_cert - self.t if self.normalized else self.enc.v_cert

    @property
    def width(self):
        return self.enc.width


def grid(tA, tB, count):
    tA, tB = Fraction(tA), Fraction(tB)
    if count < 2:
        raise ValueError("count must be at least 2")
    return [tA + (tB - tA) * Fraction(i, count - 1) for i in range(count)]


def sample_profile(sys, tA, tB, count, opts=None, normalized=False, points=None):
    """Radius enclosures at Gauss points of a rational grid including both ends."""
    opts = opts or RadiusOptions()
    ts = points if points is not None else grid(tA, tB, count)
    dom = sys.domain
    for t in (ts[0], ts[-1]):
        if not dom.contains(t):
            raise ValueError(f"segment endpoint t={t} outside the domain")
    return [Sample(Fraction(t), radius_at(sys, GaussPoint(t), opts), normalized) for t in ts]


def max_width(samples):
    return max((s.width for s in samples), default=Fraction(0))


@dataclass
class ConcavityReport:
    passed: bool
    violations: list = field(default_factory=list)
    suspects: list = field(default_factory=list)


def verify_concavity(samples, tol):
    """Three-point convexity test of the sampled v values on consecutive triples.

    A violation (i-1, i, i+1) means the middle value exceeds the chord by more
    than ``tol``.  ``suspects`` are the indices with the highest violation
    count (middles weighted double), which localizes a single bad sample.
    """
    if len(samples) < 3:
        raise ValueError("need at least 3 samples")
    tol = Fraction(tol)
    bad = []
    for i in range(1, len(samples) - 1):
        a, b, c = samples[i - 1], samples[i], samples[i + 1]
        lam = (b.t - a.t) / (c.t - a.t)
        chord = a.value + lam * (c.value - a.value)
        excess = b.value - chord
        if excess > tol:
            bad.append((i, excess))
    suspects = []
    if bad:
        counts = Counter()
        for i, _ in bad:
            # the middle of a violating triple is the likelier culprit
            counts.update((i - 1, i, i, i + 1))
        top = max(counts.values())
        suspects = sorted(k for k, v in counts.items() if v == top)
    return ConcavityReport(not bad, bad, suspects)


# --- fitting -----------------------------------------------------------------


@dataclass(frozen=True)
class Line:
    slope: Fraction
    intercept: Fraction

    def __call__(self, t):
        return self.intercept + self.slope * t


@dataclass
class PLFit:
    """Convex piecewise-linear profile on [breakpoints[0], breakpoints[-1]]."""

    breakpoints: list
    values: list
    slopes: list
    lines: list
    mu: int = 1

    def __call__(self, t):
        t = Fraction(t)
        for k, ln in enumerate(self.lines):
            if t <= self.breakpoints[k + 1] or k == len(self.lines) - 1:
                return ln(t)
        raise AssertionError  # pragma: no cover

    @property
    def sides(self):
        return list(zip(self.slopes, [ln.intercept for ln in self.lines]))

    def interior_breakpoints(self):
        return self.breakpoints[1:-1]


def admissible_slopes(mu, s_max):
    out = set()
    for j in range(1, mu + 1):
        for s in range(-s_max, s_max + 1):
            out.add(Fraction(s, j))
    return sorted(out)


def _residual_range(pts, slope):
    r = [v - slope * t for t, v in pts]
    return min(r), max(r)


def _feasible(pts, slope, tol):
    lo, hi = _residual_range(pts, slope)
    return hi - lo <= 2 * tol


def _ls_slope(pts):
    if len(pts) < 2:
        return None
    n = len(pts)
    mt = sum(t for t, _ in pts) / n
    mv = sum(v for _, v in pts) / n
    num = sum((t - mt) * (v - mv) for t, v in pts)
    den = sum((t - mt) ** 2 for t, _ in pts)
    return num / den if den else None


def _choose(pts, cands, tol, target):
    ok = [s for s in cands if _feasible(pts, s, tol)]
    if not ok:
        return None
    if target is None:
        target = Fraction(0)
    return min(ok, key=lambda s: (abs(s - target), s.denominator, abs(s.numerator)))


def _line_for(pts, slope, tol):
    # any intercept in [hi - tol, lo + tol] is within tol of every sample
    lo, hi = _residual_range(pts, slope)
    return Line(slope, simplest_rational(hi - tol, lo + tol))


def fit_concave_pl(samples, mu, s_max=12, tol=Fraction(1, 50), resample=None, grid_tol=None,
                   max_bisect=12):
    """Convex PL fit in (t, v) with slopes s/j, 1 <= j <= mu, |s| <= s_max.

    Runs of consecutive samples are grown greedily while a single admissible
    slope fits them within ``tol``; slopes are snapped toward the least-squares
    slope, ties broken by smaller denominator then smaller |s|.  With a
    ``resample(t) -> value`` callback, each breakpoint is localized by bisection
    down to ``grid_tol``.
    """
    tol = Fraction(tol)
    pts = [(s.t, s.value) for s in samples]
    if len(pts) < 2:
        raise ValueError("need at least 2 samples")
    cands = admissible_slopes(mu, s_max)
    runs = []
    i = 0
    prev_slope = None
    while i < len(pts):
        k = i + 1
        while k < len(pts) and any(_feasible(pts[i:k + 1], s, tol) for s in cands):
            k += 1
        run = pts[i:k]
        pool = [s for s in cands if prev_slope is None or s >= prev_slope] or cands
        slope = _choose(run, pool, tol, _ls_slope(run))
        if slope is None:
            raise FitError(f"no admissible slope fits the samples near t={run[0][0]}")
        runs.append([run, slope])
        prev_slope = slope
        i = k
    runs = _absorb_single(runs, cands, tol)
    for (_, s0), (run, s1) in zip(runs, runs[1:]):
        if s1 <= s0:
            raise FitError(f"no convex profile with admissible slopes fits the samples near t={run[0][0]}")
    lines = [_line_for(run, slope, tol) for run, slope in runs]

    bps = [pts[0][0]]
    for k in range(len(lines) - 1):
        left, right = lines[k], lines[k + 1]
        lrun, rrun = runs[k][0], runs[k + 1][0]
        a, b = lrun[-1][0], rrun[0][0]
        if resample is not None:
            a, b = _bisect(left, right, a, b, resample, tol, grid_tol, max_bisect)
        x = _intersect(left, right)
        # a corner sample may sit within tol of either line
        lo = lrun[-2][0] if len(lrun) > 1 and resample is None else a
        hi = rrun[1][0] if len(rrun) > 1 and resample is None else b
        if x is None or not lo <= x <= hi:
            x = (a + b) / 2
        bps.append(x)
    bps.append(pts[-1][0])
    vals = [lines[0](bps[0])] + [lines[k](bps[k + 1]) for k in range(len(lines))]
    return PLFit(bps, vals, [ln.slope for ln in lines], lines, mu)


def _absorb_single(runs, cands, tol):
    # a lone sample between two runs usually sits at a corner: keep it only
    # if the max of the neighbouring lines misses it
    out = []
    for idx, (run, slope) in enumerate(runs):
        if len(run) == 1 and 0 < idx < len(runs) - 1:
            left = _line_for(*out[-1], tol) if out else None
            right = _line_for(runs[idx + 1][0], runs[idx + 1][1], tol)
            t, v = run[0]
            if left is not None and abs(max(left(t), right(t)) - v) <= tol:
                continue
        if out and out[-1][1] == slope and _feasible(out[-1][0] + run, slope, tol):
            out[-1][0] = out[-1][0] + run
            continue
        out.append([list(run), slope])
    return out


def _intersect(l1, l2):
    if l1.slope == l2.slope:
        return None
    return (l2.intercept - l1.intercept) / (l1.slope - l2.slope)


def _bisect(left, right, a, b, resample, tol, grid_tol, max_steps):
    grid_tol = Fraction(grid_tol) if grid_tol is not None else (b - a) / 16
    for _ in range(max_steps):
        if b - a <= grid_tol:
            break
        m = (a + b) / 2
        v = resample(m)
        if abs(v - left(m)) <= tol and abs(v - left(m)) <= abs(v - right(m)):
            a = m
        else:
            b = m
    return a, b


# --- side decomposition ------------------------------------------------------


@dataclass(frozen=True)
class SideDecomposition:
    """v_norm(t) = 1/((p-1)p^h) + v_b/(j p^h) + (s/j) t; h = INF drops the constants."""

    h: object
    j: int
    s: int
    v_b: Fraction

    def evaluate(self, t, p):
        t = Fraction(t)
        if self.h == INF:
            return Fraction(self.s, self.j) * t
        ph = p ** self.h
        return (Fraction(1, (p - 1) * ph) + self.v_b / (self.j * ph)
                + Fraction(self.s, self.j) * t)


def decompose_side(slope, intercept, config, mu, h_max=6):
    """Exact decompositions of the side v = intercept + slope * t."""
    slope, intercept = Fraction(slope), Fraction(intercept)
    p, e = config.p, config.e
    out = []
    for j in range(1, mu + 1):
        if (slope * j).denominator != 1:
            continue
        s = int(slope * j)
        for h in range(h_max + 1):
            ph = p ** h
            v_b = (intercept - Fraction(1, (p - 1) * ph)) * j * ph
            if (v_b * e).denominator == 1:
                out.append(SideDecomposition(h, j, s, v_b))
        if intercept == 0:
            out.append(SideDecomposition(INF, j, s, Fraction(0)))
    if not out:
        warnings.warn(f"no exact decomposition for side {intercept} + {slope}*t")
    return out


# --- checks --------------------------------------------------------------------


@dataclass
class ContinuityReport:
    passed: bool
    gaps: dict = field(default_factory=dict)


def endpoint_continuity_check(samples, tol, refine=None, max_refine=6):
    """Endpoint value versus linear extrapolation from the two nearest samples.

    With ``refine(t) -> Sample``, a failing end is re-tested with interior
    samples moved toward it by halving, the numerical form of a limit.
    """
    if len(samples) < 4:
        raise ValueError("need at least 4 samples")
    tol = Fraction(tol)
    rep = ContinuityReport(True)
    for side in ("lo", "hi"):
        end = samples[0] if side == "lo" else samples[-1]
        near = [samples[1], samples[2]] if side == "lo" else [samples[-2], samples[-3]]
        gap, allowed = _gap(end, near, tol)
        step = near[0].t - end.t
        tries = 0
        while gap > allowed and refine is not None and tries < max_refine:
            step /= 2
            near = [refine(end.t + step), refine(end.t + 2 * step)]
            gap, allowed = _gap(end, near, tol)
            tries += 1
        rep.gaps[side] = (gap, allowed)
        if gap > allowed:
            rep.passed = False
    return rep


def _gap(end, near, tol):
    a, b = near
    slope = (b.value - a.value) / (b.t - a.t)
    extrap = a.value + slope * (end.t - a.t)
    allowed = tol + end.width + a.width + b.width
    return abs(end.value - extrap), allowed


def slope_cap_check(fit, declared_rank, tol=Fraction(0)):
    """Fitted slopes in log rho (equal to slopes in t) must not exceed the rank."""
    rank = Fraction(declared_rank)
    worst = max(fit.slopes)
    return worst <= rank + Fraction(tol), worst


def profile_values(samples):
    return [(s.t, s.value, s.cert) for s in samples]

