"""Independent cross-checks: Taylor-series solutions, Young's formula, random inputs.

Nothing here uses the G_[n] iteration.  The series path clears denominators
once, q(T) G(T) = A(T), shifts to the center, and solves q Y' = A Y for the
Taylor coefficients of the fundamental matrix directly over Q(pi).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .diffsys import DiffOperator, DiffSystem, DomainSpec, companion
from .field import INF, PrimeConfig
from .laurent import LaurentPoly, PoleError, RatFunc, RecentreDisk


@dataclass(frozen=True)
class SeriesSolution:
    """Taylor coefficients Y_0 = 1, Y_1, ..., Y_N of the fundamental matrix at c."""

    center: object
    Y: tuple

    def val(self, n):
        return min((y.val() for row in self.Y[n] for y in row), default=INF)


def _cleared(sys):
    """Polynomials q, A with G = A / q, nonnegative exponents only."""
    cfg = sys.config
    entries = [[RatFunc.lift(g) for g in row] for row in sys.G]
    q = LaurentPoly.const(cfg, 1)
    for row in entries:
        for g in row:
            if not g.is_zero():
                q = q * g.den
    flat = [g for row in entries for g in row]
    A = []
    for i, row in enumerate(entries):
        out = []
        for j, g in enumerate(row):
            if g.is_zero():
                out.append(LaurentPoly(cfg))
                continue
            rest = LaurentPoly.const(cfg, 1)
            for idx, h in enumerate(flat):
                if idx != i * len(row) + j and not h.is_zero():
                    rest = rest * h.den
            out.append(g.num * rest)
        A.append(out)
    lo = min([q.min_exp] + [a.min_exp for row in A for a in row if a.terms])
    if lo < 0:
        shift = LaurentPoly.T(cfg, -lo)
        q = q * shift
        A = [[a * shift for a in row] for row in A]
    return q, A


def series_solution(sys, c, N):
    """Taylor coefficients of the solution matrix Y with Y(c) = 1, up to S^N."""
    cfg = sys.config
    c = cfg(c)
    mu = sys.mu
    q, A = _cleared(sys)
    m = RecentreDisk(c)
    qs = q.substitute(m) if not c.is_zero() else q
    As = [[(a.substitute(m) if not c.is_zero() else a) for a in row] for row in A]
    q0 = qs.coeff(0)
    if q0.is_zero():
        raise PoleError(f"{c} is a pole of G")
    q0inv = q0.inv()
    qterms = sorted((k, v) for k, v in qs.terms.items() if k > 0)
    aterms = {}
    for i in range(mu):
        for j in range(mu):
            for k, v in As[i][j].terms.items():
                aterms.setdefault(k, []).append((i, j, v))
    zero = cfg.zero()
    one = cfg.one()
    Y = [[[one if i == j else zero for j in range(mu)] for i in range(mu)]]
    for n in range(N):
        # q0 (n+1) Y_{n+1} = sum_k A_k Y_{n-k} - sum_{k>=1} q_k (n+1-k) Y_{n+1-k}
        rhs = [[zero] * mu for _ in range(mu)]
        for k, lst in aterms.items():
            if k > n:
                continue
            Yp = Y[n - k]
            for i, l, a in lst:
                row = rhs[i]
                src = Yp[l]
                for j in range(mu):
                    if src[j]:
                        row[j] = row[j] + a * src[j]
        for k, qk in qterms:
            if k > n:
                break
            Yp = Y[n + 1 - k]
            f = qk * (n + 1 - k)
            for i in range(mu):
                for j in range(mu):
                    if Yp[i][j]:
                        rhs[i][j] = rhs[i][j] - f * Yp[i][j]
        s = q0inv * Fraction(1, n + 1)
        Y.append([[s * x for x in row] for row in rhs])
    return SeriesSolution(c, tuple(tuple(tuple(r) for r in y) for y in Y))


def series_solution_radius(sys, c, N, window=None):
    """Uncapped estimate of v_R at c: max of -v(Y_n)/n over the tail window."""
    W = min(window if window is not None else 50, N - 1)
    sol = series_solution(sys, c, N)
    vals = []
    for n in range(max(N - W, 1), N + 1):
        v = sol.val(n)
        if v != INF:
            vals.append(-v / n)
    if not vals:
        return None
    return max(vals)


class Inapplicable:
    """Returned when Young's hypothesis is not established."""

    def __init__(self, reason):
        self.reason = reason

    def __bool__(self):
        return False

    def __repr__(self):
        return f"Inapplicable({self.reason!r})"


def young_radius(L, t, known_v_norm=None):
    """v_norm = 1/(p-1) + max_j(-w_t(C_j)/j) for L = delta^mu - sum C_j delta^(mu-j)."""
    t = Fraction(t)
    p = L.config.p
    base = Fraction(1, p - 1)
    ws = [RatFunc.lift(C).gauss_val(t) if not RatFunc.lift(C).is_zero() else INF for C in L.C]
    over = any(w < 0 for w in ws)
    if not over and not (known_v_norm is not None and Fraction(known_v_norm) > base):
        return Inapplicable("no coefficient with negative Gauss valuation")
    best = max(-w / j for j, w in enumerate(ws, start=1) if w != INF)
    return base + best


# --- random inputs -----------------------------------------------------------


def _coeff(rng, cfg, v_lo, v_hi):
    """Random element of valuation in [v_lo, v_hi] on the grid (1/e)Z."""
    e, p = cfg.e, cfg.p
    k = rng.randint(v_lo * e, v_hi * e)
    unit = rng.choice([u for u in range(1, 2 * p) if u % p]) * rng.choice([1, -1])
    q, r = divmod(k, e)
    x = cfg(Fraction(p) ** q * unit)
    if r:
        x = x * cfg.pi ** r
    return x


def random_laurent(rng, cfg, exp_lo, exp_hi, v_lo, v_hi, terms):
    out = {}
    for _ in range(terms):
        out[rng.randint(exp_lo, exp_hi)] = _coeff(rng, cfg, v_lo, v_hi)
    return LaurentPoly(cfg, out)


def random_system(seed, mu=1, exp_range=(-2, 2), val_range=(-2, 2), kind="disk",
                  constant=False, config=None, density=0.6, denominators=True):
    """Deterministic random system; pole-free on its reported domain.

    Disks are D(0, 1) (t_lo = 0); annuli are 0 <= t <= 1.  Denominators have
    the form 1 + b T^k with root valuations kept outside the domain.
    """
    if not 1 <= mu <= 3:
        raise ValueError("mu must be in 1..3")
    rng = random.Random(seed)
    cfg = config or PrimeConfig(3)
    v_lo, v_hi = val_range
    if kind == "disk":
        dom = DomainSpec.disk(0)
        e_lo, e_hi = 0, max(exp_range[1], 0)
    elif kind == "annulus":
        dom = DomainSpec.annulus(0, 1)
        e_lo, e_hi = exp_range
    else:
        raise ValueError(f"unknown kind {kind!r}")
    G = []
    nonzero = False
    for i in range(mu):
        row = []
        for j in range(mu):
            if rng.random() > density and not (i == mu - 1 and j == mu - 1 and not nonzero):
                row.append(RatFunc(LaurentPoly(cfg)))
                continue
            nonzero = True
            if constant:
                row.append(RatFunc(LaurentPoly.const(cfg, _coeff(rng, cfg, v_lo, v_hi))))
                continue
            num = random_laurent(rng, cfg, e_lo, e_hi, v_lo, v_hi, rng.randint(1, 2))
            if num.is_zero():
                num = LaurentPoly.const(cfg, _coeff(rng, cfg, v_lo, v_hi))
            den = LaurentPoly.const(cfg, 1)
            if denominators and rng.random() < 0.3:
                k = rng.randint(1, 2)
                # root valuation -v(b)/k: below t_lo = 0 means v(b) >= 1
                if kind == "disk" or rng.random() < 0.5:
                    b = _coeff(rng, cfg, 1, 2)
                else:
                    # roots inside the hole: valuation > 1
                    b = _coeff(rng, cfg, -2 * k - 1, -k - 1)
                den = LaurentPoly(cfg, {0: 1, k: b})
            row.append(RatFunc(num, den))
        G.append(row)
    return DiffSystem(G, dom, cfg)


def random_operator(seed, mu=1, t=Fraction(0), exp_range=(-2, 2), val_range=(-2, 1),
                    config=None, force_young=True):
    """Random delta-operator on the annulus {t}; some C_j has w_t(C_j) < 0 if asked."""
    if mu < 1:
        raise ValueError("mu must be positive")
    rng = random.Random(seed)
    cfg = config or PrimeConfig(3)
    t = Fraction(t)
    for _ in range(1000):
        C = []
        for j in range(mu):
            if rng.random() < 0.25 and j < mu - 1:
                C.append(RatFunc(LaurentPoly(cfg)))
            else:
                C.append(RatFunc(random_laurent(rng, cfg, *exp_range, *val_range, rng.randint(1, 2))))
        L = DiffOperator(tuple(C), cfg)
        if not force_young or any(not c.is_zero() and c.gauss_val(t) < 0 for c in C):
            return L
    raise RuntimeError("could not draw an operator in the Young regime")  # pragma: no cover


def random_companion(seed, mu=1, t=Fraction(0), **kw):
    L = random_operator(seed, mu, t, **kw)
    return L, companion(L, DomainSpec.annulus(t, t))
