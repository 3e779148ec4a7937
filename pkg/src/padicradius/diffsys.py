"""Differential systems dy/dT = G y and the iterated matrices G_[n].

G_[n] is defined by (1/n!) (d/dT)^n y = G_[n] y and obeys

    (n+1) G_[n+1] = G_[n]' + G_[n] G,   G_[0] = 1.

The hot loop never touches rational functions: G is written once as
A / (D*d) with A, d integral Laurent polynomials over Z[w] (w a uniformizer
with integral minimal polynomial) and D a positive integer, and then

    G_[n] = P_n / (n! * D^n * d^n),
    P_{n+1} = D * (P_n' d - n P_n d') + P_n A.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

import numpy as np

from .field import INF, FieldElem, PrimeConfig, gmpy2, vp, vp_int
from .laurent import (
    CoordinateMap, Dilate, Invert, Kummer, LaurentPoly, PoleError, RatFunc,
    RecentreAnnulus, RecentreDisk, check_pole_free,
)

DISK, ANNULUS, UNCAPPED = "disk", "annulus", "uncapped"


@dataclass(frozen=True)
class DomainSpec:
    """A disk (t_hi = INF) or closed annulus, in log-radius coordinates.

    ``kind == "uncapped"`` keeps the geometry given by t_hi but makes radii
    default to the uncapped liminf.  ``open_lo`` marks an open outer boundary,
    as for a residue disk D(c, |c|^-) inside an annulus.
    """

    kind: str
    t_lo: Fraction
    t_hi: Fraction | float = INF
    open_lo: bool = False

    def __post_init__(self):
        object.__setattr__(self, "t_lo", Fraction(self.t_lo))
        if self.t_hi != INF:
            object.__setattr__(self, "t_hi", Fraction(self.t_hi))
        if self.kind not in (DISK, ANNULUS, UNCAPPED):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if self.t_lo > self.t_hi:
            raise ValueError("t_lo must not exceed t_hi")
        if self.kind == ANNULUS and self.t_hi == INF:
            raise ValueError("an annulus needs a finite inner log-radius")
        if self.kind == DISK and self.t_hi != INF:
            raise ValueError("a disk reaches the center: t_hi must be INF")

    @classmethod
    def disk(cls, t_lo=0, open_lo=False):
        return cls(DISK, t_lo, INF, open_lo)

    @classmethod
    def annulus(cls, t_lo, t_hi):
        return cls(ANNULUS, t_lo, t_hi)

    @classmethod
    def uncapped(cls, t_lo, t_hi=INF):
        return cls(UNCAPPED, t_lo, t_hi)

    @property
    def is_disk(self):
        return self.t_hi == INF

    def contains(self, t):
        if t == INF:
            return self.is_disk
        if self.open_lo and t == self.t_lo:
            return False
        return self.t_lo <= t <= self.t_hi

    def with_interval(self, t_lo, t_hi, open_lo=False):
        kind = self.kind
        if kind != UNCAPPED:
            kind = DISK if t_hi == INF else ANNULUS
        return DomainSpec(kind, t_lo, t_hi, open_lo)


class DiffSystem:
    """dy/dT = G y on ``domain``; entries of G are pole-free there."""

    def __init__(self, G, domain, config=None):
        rows = [list(r) for r in G]
        mu = len(rows)
        if mu == 0 or any(len(r) != mu for r in rows):
            raise ValueError("G must be a nonempty square matrix")
        if config is None:
            config = _find_config(rows)
        self.config = config
        self.G = tuple(tuple(_as_ratfunc(x, config) for x in r) for r in rows)
        self.domain = domain
        for r in self.G:
            for g in r:
                check_pole_free(g, domain.t_lo, domain.t_hi, open_lo=domain.open_lo)
        self._cache = {}

    @property
    def mu(self):
        return len(self.G)

    def __eq__(self, other):
        if not isinstance(other, DiffSystem):
            return NotImplemented
        return (self.config == other.config and self.domain == other.domain
                and self.G == other.G)

    __hash__ = object.__hash__

    def __repr__(self):
        rows = "; ".join(", ".join(str(g) for g in r) for r in self.G)
        return f"DiffSystem([{rows}], {self.domain})"

    def integral_form(self):
        if "integral" not in self._cache:
            self._cache["integral"] = _IntegralForm(self)
        return self._cache["integral"]

    def trace(self):
        tr = RatFunc(LaurentPoly(self.config))
        for i in range(self.mu):
            tr = tr + self.G[i][i]
        return tr


@dataclass(frozen=True)
class DiffOperator:
    """L = delta^mu - C_1 delta^(mu-1) - ... - C_mu with delta = T d/dT."""

    C: tuple
    config: PrimeConfig

    def __post_init__(self):
        if len(self.C) < 1:
            raise ValueError("operator order must be >= 1")
        object.__setattr__(self, "C", tuple(_as_ratfunc(c, self.config) for c in self.C))

    @property
    def mu(self):
        return len(self.C)


def _find_config(rows):
    for r in rows:
        for x in r:
            if isinstance(x, (LaurentPoly, RatFunc, FieldElem)):
                return x.config
    raise ValueError("cannot infer PrimeConfig from plain scalars; pass config=")


def _as_ratfunc(x, config):
    if isinstance(x, RatFunc):
        return x
    if isinstance(x, LaurentPoly):
        return RatFunc(x)
    return RatFunc(LaurentPoly.const(config, x))


# --- integral Laurent polynomials over Z[w] ----------------------------------


class _Ring:
    """Z[w]/(w^e - m) with w = b*pi, where u = a/b in lowest terms."""

    def __init__(self, config):
        self.config = config
        self.p, self.e = config.p, config.e
        self.b = config.u.denominator
        self.m = config.u.numerator * self.b ** (self.e - 1) * self.p

    def components(self, x):
        """Rational coordinates of x on the basis 1, w, ..., w^(e-1)."""
        return [a / self.b ** i for i, a in enumerate(x.coeffs)]

    def to_field(self, comps, denom=1):
        return self.config([Fraction(int(c) * self.b ** i, denom) for i, c in enumerate(comps)])


def _big(n):
    return gmpy2.mpz(n) if gmpy2 is not None else int(n)


class ZPoly:
    """Laurent polynomial with Z[w] coefficients: arr[k, j] is the integer
    coefficient of w^k T^(off+j)."""

    __slots__ = ("off", "arr")

    def __init__(self, off, arr):
        self.off = off
        self.arr = arr

    @classmethod
    def zero(cls, e):
        return cls(0, np.zeros((e, 0), dtype=object))

    @classmethod
    def const(cls, e, c):
        arr = np.zeros((e, 1), dtype=object)
        arr[0, 0] = _big(c)
        return cls(0, arr)

    @property
    def length(self):
        return self.arr.shape[1]

    def is_zero(self):
        return self.length == 0

    def trim(self):
        arr = self.arr
        if arr.shape[1] == 0:
            return self
        nz = np.flatnonzero((arr != 0).any(axis=0))
        if len(nz) == 0:
            return ZPoly.zero(arr.shape[0])
        lo, hi = nz[0], nz[-1] + 1
        if lo == 0 and hi == arr.shape[1]:
            return self
        return ZPoly(self.off + int(lo), arr[:, lo:hi])

    def __add__(self, other):
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        lo = min(self.off, other.off)
        hi = max(self.off + self.length, other.off + other.length)
        out = np.zeros((self.arr.shape[0], hi - lo), dtype=object)
        out[:, self.off - lo:self.off - lo + self.length] += self.arr
        out[:, other.off - lo:other.off - lo + other.length] += other.arr
        return ZPoly(lo, out)

    def scale(self, k):
        if k == 1:
            return self
        return ZPoly(self.off, self.arr * k)

    def __neg__(self):
        return ZPoly(self.off, -self.arr)

    def __sub__(self, other):
        return self + (-other)

    def derivative(self):
        if self.is_zero():
            return self
        ks = np.arange(self.off, self.off + self.length).astype(object)
        return ZPoly(self.off - 1, self.arr * ks)

    def mul(self, other, m):
        """Product, reducing w^e = m."""
        if self.is_zero() or other.is_zero():
            return ZPoly.zero(self.arr.shape[0])
        a, b = (self, other) if self.length >= other.length else (other, self)
        e = a.arr.shape[0]
        La, Lb = a.length, b.length
        out = np.zeros((e, La + Lb - 1), dtype=object)
        rots = [a.arr]
        for l in range(1, e):
            # rows shifted by l: w^l * sum_k a_k w^k
            rots.append(np.concatenate((a.arr[e - l:] * m, a.arr[:e - l]), axis=0))
        for j in range(Lb):
            col = b.arr[:, j]
            if not col.any():
                continue
            acc = None
            for l in range(e):
                c = col[l]
                if c:
                    term = rots[l] * c
                    acc = term if acc is None else acc + term
            out[:, j:j + La] += acc
        return ZPoly(a.off + b.off, out)

    def exact_div(self, g):
        return ZPoly(self.off, self.arr // g)

    def truncate(self, max_exp):
        keep = max_exp - self.off + 1
        if keep >= self.length:
            return self
        if keep <= 0:
            return ZPoly.zero(self.arr.shape[0])
        return ZPoly(self.off, self.arr[:, :keep])

    def reduce_mod(self, modulus):
        return ZPoly(self.off, self.arr % modulus)

    def valuation_columns(self, p):
        """(exponents, e*valuation) of the nonzero columns."""
        e, L = self.arr.shape
        if L == 0:
            return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
        big = np.iinfo(np.int64).max
        best = np.full(L, big, dtype=np.int64)
        for k in range(e):
            row = self.arr[k]
            idx = np.flatnonzero(row != 0)
            if len(idx):
                v = e * _vp_vector(row[idx], p) + k
                best[idx] = np.minimum(best[idx], v)
        nz = best != big
        exps = np.arange(self.off, self.off + L, dtype=np.int64)[nz]
        return exps, best[nz]

    def zero_columns(self):
        if self.length == 0:
            return np.zeros(0, dtype=np.int64)
        z = ~(self.arr != 0).any(axis=0)
        return np.arange(self.off, self.off + self.length, dtype=np.int64)[z]

    def coeff(self, k):
        j = k - self.off
        if 0 <= j < self.length:
            return self.arr[:, j]
        return None


def _vp_vector(xs, p):
    """p-adic valuations of the nonzero integers in an object array."""
    return np.fromiter((vp_int(x, p) for x in xs), dtype=np.int64, count=len(xs))


def _laurent_to_rational_columns(ring, f):
    """Dict exponent -> list of rational w-components."""
    return {k: ring.components(a) for k, a in f.terms.items()}


def _columns_to_zpoly(e, cols, scale):
    if not cols:
        return ZPoly.zero(e)
    lo, hi = min(cols), max(cols)
    arr = np.zeros((e, hi - lo + 1), dtype=object)
    for k, comps in cols.items():
        for i, c in enumerate(comps):
            c = c * scale
            assert c.denominator == 1
            arr[i, k - lo] = _big(c.numerator)
    return ZPoly(lo, arr)


def _lcm_denominators(colsets):
    D = 1
    for cols in colsets:
        for comps in cols.values():
            for c in comps:
                D = math.lcm(D, c.denominator)
    return D


class _IntegralForm:
    """G = A / (D * d) with integral A, d."""

    def __init__(self, sys):
        cfg = sys.config
        ring = _Ring(cfg)
        self.ring = ring
        self.mu = sys.mu
        self.config = cfg
        entries = [[g.as_laurent() for g in r] for r in sys.G]
        dens = []
        for r, lr in zip(sys.G, entries):
            for g, lg in zip(r, lr):
                if lg is None and not any(g.den == d for d in dens):
                    dens.append(g.den)
        one = LaurentPoly.const(cfg, 1)
        d = one
        for x in dens:
            d = d * x
        num = []
        for r, lr in zip(sys.G, entries):
            row = []
            for g, lg in zip(r, lr):
                if lg is not None:
                    row.append(lg * d)
                else:
                    other = one
                    for x in dens:
                        if not (x == g.den):
                            other = other * x
                    row.append(g.num * other)
            num.append(row)
        self.d_field = d  # d = Dd * d_field once made integral
        self.A_field = num
        acols = [[_laurent_to_rational_columns(ring, f) for f in r] for r in num]
        dcols = _laurent_to_rational_columns(ring, d)
        DA = _lcm_denominators([c for r in acols for c in r])
        Dd = _lcm_denominators([dcols])
        e = cfg.e
        self.A = [[_columns_to_zpoly(e, c, DA * Dd) for c in r] for r in acols]
        self.d = _columns_to_zpoly(e, dcols, Dd)
        self.Dd = Dd
        self.dprime = self.d.derivative().trim()
        self.D = DA
        self.d_is_one = (self.d.length == 1 and self.d.off == 0 and self.d.arr[0, 0] == 1
                         and not self.d.arr[1:, 0].any())
        self.polynomial = (self.d.off >= 0 and all(a.is_zero() or a.off >= 0
                                                    for r in self.A for a in r))

    def d_gauss_val(self, t):
        return _gauss_val_field(self.d_field, t) + vp(self.Dd, self.config.p)

    def scale_val(self, n):
        """v(n! * D^n)."""
        p = self.config.p
        return Fraction(_legendre(n, p)) + n * vp(self.D, p)


def _gauss_val_field(f, t):
    return f.gauss_val(t)


def _legendre(n, p):
    s, q = 0, p
    while q <= n:
        s += n // q
        q *= p
    return s


@dataclass
class IterState:
    """Snapshot at index n: G_[n] = P / (n! * D^n * d^n)."""

    n: int
    P: list
    form: _IntegralForm = field(repr=False)
    truncated_at: int | None = None
    precision: int | None = None
    content: int = 1  # integer factor pulled out of P

    @property
    def d(self):
        return self.form.d

    @property
    def scale(self):
        return Fraction(math.factorial(self.n) * self.form.D ** self.n, self.content)

    def scale_val(self):
        """v(scale)."""
        return self.form.scale_val(self.n) - vp(self.content, self.form.config.p)

    def matrix(self):
        """G_[n] as a matrix of RatFunc (slow; for checking)."""
        form = self.form
        cfg = form.config
        denom = self.scale
        den = (form.d_field * form.Dd) ** self.n
        out = []
        for row in self.P:
            r = []
            for z in row:
                terms = {}
                for j in range(z.length):
                    col = z.arr[:, j]
                    if col.any():
                        terms[z.off + j] = form.ring.to_field(col, denom)
                r.append(RatFunc(LaurentPoly(cfg, terms), den))
            out.append(r)
        return out

    def value_at_zero(self):
        """G_[n](0) as FieldElem matrix (needs a polynomial form with d(0) != 0)."""
        form = self.form
        d0 = form.d.coeff(0)
        d0 = form.ring.to_field(d0) ** self.n
        out = []
        for row in self.P:
            r = []
            for z in row:
                col = z.coeff(0)
                if col is None or not col.any():
                    r.append(form.config.zero())
                else:
                    r.append(form.ring.to_field(col, self.scale) / d0)
            out.append(r)
        return out


def iterate(sys, N, precision=None, truncate=False) -> Iterator[IterState]:
    """Yield the states n = 0..N.

    ``precision`` (an integer M) reduces the integral numerators modulo p^M,
    which drops only summands of valuation >= M.  ``truncate`` keeps exponents
    <= N - n, enough to read G_[n](0) for every n <= N.
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    form = sys.integral_form()
    mu, e, m = form.mu, form.config.e, form.ring.m
    if truncate and not (form.polynomial and form.d.coeff(0) is not None
                         and form.d.coeff(0).any()):
        raise PoleError("truncated iteration needs polynomial data with d(0) != 0")
    modulus = form.config.p ** precision if precision is not None else None
    P = [[ZPoly.const(e, 1) if i == j else ZPoly.zero(e) for j in range(mu)]
         for i in range(mu)]
    yield IterState(0, P, form, N if truncate else None, precision)
    d, dp, A, D = form.d, form.dprime, form.A, form.D
    content = 1
    for n in range(N):
        new = []
        for i in range(mu):
            row = []
            for j in range(mu):
                z = P[i][j]
                acc = ZPoly.zero(e)
                if not z.is_zero():
                    acc = z.derivative()
                    if not form.d_is_one:
                        acc = acc.mul(d, m)
                    if not dp.is_zero():
                        acc = acc - z.mul(dp, m).scale(n)
                    acc = acc.scale(D)
                for k in range(mu):
                    if not P[i][k].is_zero() and not A[k][j].is_zero():
                        acc = acc + P[i][k].mul(A[k][j], m)
                if truncate:
                    acc = acc.truncate(N - n - 1)
                if modulus is not None:
                    acc = acc.reduce_mod(modulus)
                else:
                    acc = acc.trim()
                row.append(acc)
            new.append(row)
        P = new
        if modulus is None:
            # the recursion is linear in P: keep the integers small
            g = _content(P)
            if g > 1:
                P = [[z.exact_div(g) for z in row] for row in P]
                content *= g
        yield IterState(n + 1, P, form, N if truncate else None, precision, content)


def _content(P):
    g = 0
    for row in P:
        for z in row:
            if not z.is_zero():
                g = _gcd(g, z.arr.ravel().tolist())
                if g == 1:
                    return 1
    return g


def _gcd(g, xs):
    if gmpy2 is not None:
        for x in xs:
            g = gmpy2.gcd(g, x)
            if g == 1:
                break
        return int(g)
    return math.gcd(g, *map(int, xs))


def eval_gauss(state, t):
    """w_n = -log_p |G_[n](t_{0,rho})| (matrix norm = max entry norm)."""
    t = Fraction(t)
    form = state.form
    p, e = form.config.p, form.config.e
    best = INF
    for row in state.P:
        for z in row:
            exps, ev = z.valuation_columns(p)
            if len(exps):
                w = min(Fraction(int(v), e) + int(x) * t for x, v in zip(exps, ev))
                best = min(best, w)
    if best == INF:
        return INF
    return best - state.n * form.d_gauss_val(t) - state.scale_val()


class GaussTable:
    """Per-n Gauss valuation data of the numerators, merged over entries.

    Built once per (system, N); evaluating w_n(t) for a new t is then a
    vectorized min over exponents.
    """

    def __init__(self, sys, N, precision=None):
        self.sys = sys
        self.N = N
        self.precision = precision
        form = sys.integral_form()
        self.form = form
        p, e = form.config.p, form.config.e
        self.exps, self.evals, self.unknown, self.svals = [], [], [], []
        for st in iterate(sys, N, precision=precision):
            self.svals.append(st.scale_val())
            xs, vs, zs = [], [], []
            for row in st.P:
                for z in row:
                    x, v = z.valuation_columns(p)
                    if precision is not None:
                        cap = e * precision
                        bad = v >= cap
                        zs.append(x[bad])
                        x, v = x[~bad], v[~bad]
                        zs.append(z.zero_columns())
                    xs.append(x)
                    vs.append(v)
            x = np.concatenate(xs) if xs else np.zeros(0, dtype=np.int64)
            v = np.concatenate(vs) if vs else np.zeros(0, dtype=np.int64)
            if len(x):
                lo = int(x.min())
                merged = np.full(int(x.max()) - lo + 1, np.iinfo(np.int64).max, dtype=np.int64)
                np.minimum.at(merged, x - lo, v)
                keep = merged != np.iinfo(np.int64).max
                x = np.arange(lo, lo + len(merged), dtype=np.int64)[keep]
                v = merged[keep]
            self.exps.append(x)
            self.evals.append(v)
            self.unknown.append(np.unique(np.concatenate(zs)) if zs else np.zeros(0, dtype=np.int64))

    def is_zero(self, n):
        return len(self.exps[n]) == 0 and len(self.unknown[n]) == 0

    def w(self, n, t):
        """(w_n(t), trusted).  Untrusted values are lower bounds."""
        t = Fraction(t)
        x, v = self.exps[n], self.evals[n]
        e = self.form.config.e
        a, b = t.numerator, t.denominator
        if len(x):
            if abs(a) < 2 ** 24 and b < 2 ** 24:
                num = int((b * v + e * a * x).min())
            else:
                num = min(b * int(vv) + e * a * int(xx) for xx, vv in zip(x, v))
            w = Fraction(num, e * b)
        else:
            w = INF
        trusted = True
        z = self.unknown[n]
        if len(z):
            bound = self.precision + min(Fraction(int(xx)) * t for xx in (z.min(), z.max()))
            if not w < bound:
                trusted = False
                w = min(w, bound)
        if w == INF:
            return INF, trusted
        return w - n * self.form.d_gauss_val(t) - self.svals[n], trusted


def gauss_table(sys, N, precision=None):
    key = ("gauss", precision)
    tab = sys._cache.get(key)
    if tab is None or tab.N < N:
        tab = GaussTable(sys, N, precision)
        sys._cache[key] = tab
    return tab


def point_values(sys, N):
    """Exact matrix valuations of G_[n](0), n = 0..N (truncated iteration)."""
    key = ("point0", N)
    if key not in sys._cache:
        form = sys.integral_form()
        p, e = form.config.p, form.config.e
        out = []
        d0 = form.d.coeff(0)
        vd0 = min(Fraction(e * vp_int(int(c), p) + k, e) for k, c in enumerate(d0) if c) \
            if d0 is not None and d0.any() else INF
        for st in iterate(sys, N, truncate=True):
            best = INF
            for row in st.P:
                for z in row:
                    col = z.coeff(0)
                    if col is not None and col.any():
                        v = min(Fraction(e * vp_int(int(c), p) + k, e)
                                for k, c in enumerate(col) if c)
                        best = min(best, v)
            if best != INF:
                best = best - st.n * vd0 - st.scale_val()
            out.append(best)
        sys._cache[key] = out
    return sys._cache[key]


# --- constructions ---------------------------------------------------------


def companion(L, domain=None):
    """The system satisfied by (y, delta y, ..., delta^(mu-1) y): G = A/T."""
    cfg = L.config
    mu = L.mu
    zero = RatFunc(LaurentPoly(cfg))
    inv_t = RatFunc(LaurentPoly(cfg, {-1: 1}))
    G = [[zero] * mu for _ in range(mu)]
    for i in range(mu - 1):
        G[i][i + 1] = inv_t
    for j in range(mu):
        G[mu - 1][j] = L.C[mu - 1 - j] * inv_t
    if domain is None:
        domain = DomainSpec.annulus(0, 0)
    return DiffSystem(G, domain, cfg)


def pullback_domain(sys, m):
    dom = sys.domain
    cfg = sys.config
    if isinstance(m, (Kummer, Dilate, Invert)):
        lo, hi = m.domain_image(cfg, dom.t_lo, dom.t_hi)
        return dom.with_interval(lo, hi, open_lo=dom.open_lo)
    if isinstance(m, RecentreDisk):
        vc = cfg(m.c).val()
        if dom.is_disk:
            if vc < dom.t_lo:
                raise ValueError("center outside the disk")
            return dom
        if not dom.contains(vc):
            raise ValueError("center outside the annulus")
        return dom.with_interval(vc, INF, open_lo=True)
    if isinstance(m, RecentreAnnulus):
        vc = cfg(m.c).val()
        if dom.is_disk:
            if vc < dom.t_lo:
                raise ValueError("center outside the disk")
            return dom.with_interval(dom.t_lo - vc, INF, open_lo=dom.open_lo)
        if not dom.contains(vc):
            raise ValueError("center outside the annulus")
        return dom.with_interval(Fraction(0), INF, open_lo=True)
    raise ValueError(f"no domain rule for {m!r}; pass domain=")


def pullback(sys, m, domain=None):
    """phi^* of the system along T = phi(S): G(S) = phi'(S) G(phi(S))."""
    cfg = sys.config
    phi = m.phi(cfg)
    dphi = RatFunc(phi.derivative())
    if domain is None:
        domain = pullback_domain(sys, m)
    G = [[dphi * g.substitute(m) for g in r] for r in sys.G]
    return DiffSystem(G, domain, cfg)
