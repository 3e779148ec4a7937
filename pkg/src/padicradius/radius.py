"""Radius-of-convergence enclosures at Gauss points and rational points.

Everything is in valuation form: v_R = -log_p R.  For beta_n = -w_n / n the
liminf defining R becomes a limsup of beta_n, estimated on a tail window
(``v_est``).  The Dwork-Robba bound |G_[n](x)| <= C n^(mu-1) R^-n turns every
single n into a rigorous lower bound on v_R (``v_cert``).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .diffsys import (
    DiffSystem, UNCAPPED, eval_gauss, gauss_table, iterate, point_values, pullback,
)
from .field import INF, FieldElem, vp
from .laurent import RecentreDisk, sup_val_on_interval

LOG_DENOM = 2 ** 20


class Cap(str, enum.Enum):
    DOMAIN = "domain"
    POINT = "point"
    UNCAPPED = "uncapped"


@dataclass(frozen=True)
class GaussPoint:
    t: Fraction

    def __post_init__(self):
        object.__setattr__(self, "t", Fraction(self.t))


@dataclass(frozen=True)
class RationalPoint:
    c: FieldElem


@dataclass(frozen=True)
class RadiusOptions:
    N: int = 400
    window: int = 50
    cap: Cap = Cap.DOMAIN
    tol: Fraction = Fraction(1, 100)
    precision: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "cap", Cap(self.cap))
        object.__setattr__(self, "tol", Fraction(self.tol))


@dataclass(frozen=True)
class RadiusEnclosure:
    """Estimate and certified lower bound for v_R = -log_p R at one point.

    ``cert_floor`` is set in uncapped mode: v_cert is then a lower bound for
    max(cert_floor, v_R) only.  ``v_reported`` is the simplest rational within
    ``tol`` of the estimate.
    """

    v_est: Fraction
    v_cert: Fraction
    t_cap: Fraction | None
    stabilized: bool
    N_used: int
    window_used: int
    cert_floor: Fraction | None = None
    degenerate: bool = False
    v_reported: Fraction | None = None

    @property
    def width(self):
        if self.v_est in (INF, -INF) or self.v_cert in (INF, -INF):
            return Fraction(0) if self.v_est == self.v_cert else INF
        return abs(self.v_est - self.v_cert)


@dataclass(frozen=True)
class DRConstant:
    lam: Fraction


def log_upper(n, p):
    """Rational upper bound on log_p(n) with denominator 2^20."""
    if n <= 1:
        return Fraction(0)
    x = math.log(n) / math.log(p)
    return Fraction(math.floor(x * LOG_DENOM) + 2, LOG_DENOM)


def simplest_rational(lo, hi):
    """Smallest-denominator rational in [lo, hi] (then smallest |numerator|)."""
    lo, hi = Fraction(lo), Fraction(hi)
    if lo > hi:
        raise ValueError("empty interval")
    if lo <= 0 <= hi:
        return Fraction(0)
    if hi < 0:
        return -simplest_rational(-hi, -lo)
    fl = math.floor(lo)
    if fl == lo:
        return Fraction(fl)
    if fl + 1 <= hi:
        return Fraction(fl + 1)
    # lo, hi in (fl, fl+1): continued-fraction step
    return fl + 1 / simplest_rational(1 / (hi - fl), 1 / (lo - fl))


def domain_cap(sys, x):
    """Log-radius below which the domain caps the radius at ``x``."""
    dom = sys.domain
    if dom.is_disk:
        return dom.t_lo
    return _point_t(sys, x)


def _point_t(sys, x):
    if isinstance(x, GaussPoint):
        return x.t
    return sys.config(x.c).val()


def cap_value(sys, x, cap):
    if cap == Cap.UNCAPPED:
        return None
    if cap == Cap.POINT:
        t = _point_t(sys, x)
        return t if t != INF else domain_cap(sys, x)
    return domain_cap(sys, x)


def dr_constant(sys, t_cap, N=None):
    """Upper bound lambda on log_p of C = max_{i<mu} R^i |i!| ||G_[i]||_X."""
    t_cap = Fraction(t_cap)
    dom = sys.domain
    p = sys.config.p
    lam = Fraction(0)
    if sys.mu == 1:
        return DRConstant(lam)
    for st in iterate(sys, sys.mu - 1):
        if st.n == 0:
            continue
        sup = INF
        for row in st.matrix():
            for g in row:
                if not g.is_zero():
                    sup = min(sup, sup_val_on_interval(g, dom.t_lo, dom.t_hi,
                                                       open_lo=dom.open_lo))
        if sup == INF:
            continue
        lam = max(lam, -st.n * t_cap - vp(math.factorial(st.n), p) - sup)
    return DRConstant(lam)


def _weights(sys, x, opts):
    """Exact w_n for n = 0..N at x, with trust flags."""
    N = opts.N
    if isinstance(x, GaussPoint):
        tab = gauss_table(sys, N, opts.precision)
        return [tab.w(n, x.t) for n in range(N + 1)]
    c = sys.config(x.c)
    local = sys if c.is_zero() else recentred(sys, c)
    return [(w, True) for w in point_values(local, N)]


def recentred(sys, c):
    key = ("recentre", c)
    if key not in sys._cache:
        sys._cache[key] = pullback(sys, RecentreDisk(c))
    return sys._cache[key]


def _check_point(sys, x):
    dom = sys.domain
    if isinstance(x, GaussPoint):
        if not dom.contains(x.t):
            raise ValueError(f"Gauss point t={x.t} outside the domain")
        return
    t = sys.config(x.c).val()
    if dom.is_disk:
        ok = t > dom.t_lo if dom.open_lo else t >= dom.t_lo
    else:
        ok = dom.contains(t)
    if not ok:
        raise ValueError(f"point {x.c} outside the domain")


def radius_at(sys, x, opts=None, **kw):
    """Radius enclosure at a Gauss point or rational point."""
    if opts is None:
        if sys.domain.kind == UNCAPPED and "cap" not in kw:
            kw["cap"] = Cap.UNCAPPED
        opts = RadiusOptions(**kw)
    elif kw:
        opts = replace(opts, **kw)
    N, W = opts.N, opts.window
    if N < sys.mu:
        raise ValueError("N must be at least mu")
    _check_point(sys, x)
    t_cap = cap_value(sys, x, opts.cap)
    t_dom = domain_cap(sys, x)
    weights = _weights(sys, x, opts)
    lo_cap = t_cap if t_cap is not None else -INF

    if all(w == INF for w, _ in weights[max(N - W, 1):N + 1]) and weights[N][0] == INF:
        return RadiusEnclosure(lo_cap, lo_cap, t_cap, True, N, W,
                               cert_floor=t_dom if t_cap is None else None,
                               degenerate=True, v_reported=lo_cap)

    lam = dr_constant(sys, t_dom).lam
    p = sys.config.p
    beta = [None] * (N + 1)
    for n in range(1, N + 1):
        w, ok = weights[n]
        if ok and w != INF:
            beta[n] = -w / n

    def window_max(a, b):
        vals = [beta[n] for n in range(max(a, 1), b + 1) if beta[n] is not None]
        return max(vals) if vals else None

    cur = window_max(N - W, N)
    prev = window_max(N - 2 * W, N - W - 1)
    v_est = max(lo_cap, cur if cur is not None else -INF)
    stabilized = cur is not None and prev is not None and abs(cur - prev) <= opts.tol

    cert = -INF
    for n in range(1, N + 1):
        if beta[n] is None:
            continue
        slack = (lam + (sys.mu - 1) * log_upper(n, p)) / n
        cert = max(cert, beta[n] - slack)
    v_cert = max(lo_cap, cert)
    # a certified lower bound the window happened to miss still bounds v_R
    v_est = max(v_est, v_cert)

    reported = None
    if v_est not in (INF, -INF):
        reported = simplest_rational(v_est - opts.tol, v_est + opts.tol)
        if t_cap is not None:
            reported = max(reported, t_cap)
    return RadiusEnclosure(v_est, v_cert, t_cap, stabilized, N, W,
                           cert_floor=t_dom if t_cap is None else None,
                           v_reported=reported)


def normalized_radius(enc, t):
    """(v_est - t, v_cert - t): the valuation of R / |T(x)|."""
    t = Fraction(t)
    return enc.v_est - t, enc.v_cert - t


# --- checks ----------------------------------------------------------------


@dataclass
class TransferReport:
    boundary: RadiusEnclosure
    interior: list
    points: list
    violations: list = field(default_factory=list)
    slack: Fraction = Fraction(0)

    @property
    def passed(self):
        return not self.violations


def interior_points(sys, c, t_r, count):
    """Deterministic rational points x with v(x - c) > t_r."""
    cfg = sys.config
    c = cfg(c)
    pi = cfg.pi
    e = cfg.e
    k0 = math.floor(t_r * e) + 1  # smallest k with k/e > t_r
    units = [u for u in range(1, 4 * count + cfg.p + 2) if u % cfg.p]
    out = []
    i = 0
    while len(out) < count:
        k = k0 + (i % 3)
        u = units[i % len(units)]
        y = u * pi ** k if e > 1 else u * cfg(cfg.p) ** k
        x = c + y
        if x not in out:
            out.append(x)
        i += 1
    return out


def transfer_check(sys, c, t_r, sample_count=10, opts=None, slack=Fraction(0)):
    """Compare the boundary Gauss point of D(c, p^-t_r) with interior points.

    Both sides use the disk D(c, p^-t_r) itself as domain, so all radii are
    capped at the same value.
    """
    if opts is None:
        opts = RadiusOptions()
    cfg = sys.config
    c = cfg(c)
    t_r = Fraction(t_r)
    dom = sys.domain
    vc = c.val()
    if dom.is_disk:
        inside = vc >= dom.t_lo and t_r >= dom.t_lo
    else:
        inside = dom.contains(vc) and t_r > vc
    if not inside:
        raise ValueError("disk not contained in the domain")
    local = pullback(sys, RecentreDisk(c))
    local = DiffSystem(local.G, local.domain.with_interval(t_r, INF), cfg)
    dopts = replace(opts, cap=Cap.DOMAIN)
    boundary = radius_at(local, GaussPoint(t_r), dopts)
    pts = interior_points(sys, c, t_r, sample_count)
    interior = [radius_at(local, RationalPoint(x - c), dopts) for x in pts]
    best = max(interior, key=lambda enc: enc.v_est)
    allowed = boundary.width + best.width + slack
    report = TransferReport(boundary, interior, pts, slack=slack)
    if abs(boundary.v_est - best.v_est) > allowed:
        report.violations.append((boundary.v_est, best.v_est, allowed))
    return report


@dataclass
class AuditReport:
    lam: Fraction
    v_ref: Fraction
    failures: list = field(default_factory=list)
    checked: int = 0

    @property
    def passed(self):
        return not self.failures


def dwork_robba_audit(sys, x, N, v_ref, cap_lo=None, precision=None):
    """Check -w_n <= lambda + (mu-1) log_p n + n v_ref for 1 <= n <= N.

    ``v_ref`` is an externally known v_R (capped by the domain); lambda uses
    the domain cap at x.
    """
    v_ref = Fraction(v_ref)
    _check_point(sys, x)
    t_dom = domain_cap(sys, x)
    lam = dr_constant(sys, t_dom).lam
    opts = RadiusOptions(N=N, precision=precision)
    weights = _weights(sys, x, opts)
    p = sys.config.p
    rep = AuditReport(lam, v_ref)
    for n in range(1, N + 1):
        w, ok = weights[n]
        if w == INF or not ok:
            continue
        rep.checked += 1
        if -w > lam + (sys.mu - 1) * log_upper(n, p) + n * v_ref:
            rep.failures.append(n)
    return rep
