"""Laurent polynomials and rational functions over Q(pi).

The Gauss valuation at log-radius t is w_t(f) = min_k (v(a_k) + k*t); it is
the additive form of the sup norm on the circle |T| = p^(-t).
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

from .field import INF, FieldElem, PrimeConfig


class PoleError(ValueError):
    """A denominator vanishes somewhere on the requested domain."""


class LaurentPoly:
    """Finite sum of a_k T^k, k in Z, with nonzero FieldElem coefficients."""

    __slots__ = ("config", "terms")

    def __init__(self, config, terms=None):
        clean = {}
        if terms:
            for k, a in terms.items():
                a = config(a)
                if a:
                    clean[int(k)] = a
        object.__setattr__(self, "config", config)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("LaurentPoly is immutable")

    @classmethod
    def T(cls, config, k=1):
        return cls(config, {k: 1})

    @classmethod
    def const(cls, config, c):
        return cls(config, {0: c})

    @classmethod
    def from_list(cls, config, coeffs, offset=0):
        return cls(config, {offset + i: c for i, c in enumerate(coeffs)})

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_monomial(self):
        return len(self.terms) == 1

    def is_polynomial(self):
        return all(k >= 0 for k in self.terms)

    @property
    def min_exp(self):
        return min(self.terms) if self.terms else 0

    @property
    def max_exp(self):
        return max(self.terms) if self.terms else 0

    def coeff(self, k):
        return self.terms.get(k, self.config.zero())

    def _coerce(self, other):
        if isinstance(other, LaurentPoly):
            if other.config != self.config:
                raise ValueError("mismatched PrimeConfig")
            return other
        if isinstance(other, (int, Rational, FieldElem)):
            return LaurentPoly(self.config, {0: other})
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for k, a in other.terms.items():
            out[k] = out[k] + a if k in out else a
        return LaurentPoly(self.config, out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.config, {k: -a for k, a in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = {}
        for i, a in self.terms.items():
            for j, b in other.terms.items():
                k = i + j
                c = a * b
                out[k] = out[k] + c if k in out else c
        return LaurentPoly(self.config, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Rational, FieldElem)):
            c = self.config(other).inv()
            return LaurentPoly(self.config, {k: a * c for k, a in self.terms.items()})
        return RatFunc.lift(self) / other

    def __rtruediv__(self, other):
        return RatFunc.lift(other if isinstance(other, LaurentPoly)
                            else LaurentPoly.const(self.config, other)) / self

    def __pow__(self, k):
        k = int(k)
        if k < 0:
            if not self.is_monomial():
                return RatFunc(LaurentPoly.const(self.config, 1), self ** (-k))
            (j, a), = self.terms.items()
            return LaurentPoly(self.config, {j * k: a ** k})
        result = LaurentPoly.const(self.config, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, RatFunc):
            return other == self
        other = self._coerce(other) if not isinstance(other, LaurentPoly) else other
        if other is NotImplemented:
            return NotImplemented
        return self.config == other.config and self.terms == other.terms

    def __hash__(self):
        return hash((self.config, frozenset(self.terms.items())))

    def __repr__(self):
        return f"LaurentPoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms):
            a = self.terms[k]
            s = str(a)
            if k == 0:
                parts.append(s)
                continue
            mono = "T" if k == 1 else f"T^{k}"
            if s == "1":
                parts.append(mono)
            elif s == "-1":
                parts.append("-" + mono)
            elif " " in s or "/" in s:
                parts.append(f"({s})*{mono}")
            else:
                parts.append(f"{s}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    # --- analysis -----------------------------------------------------

    def gauss_val(self, t):
        t = Fraction(t)
        best = INF
        for k, a in self.terms.items():
            v = a.val() + k * t
            if v < best:
                best = v
        return best

    def newton_slopes(self):
        """Valuations of the nonzero roots, with multiplicity (sorted)."""
        if not self.terms:
            raise ValueError("Newton polygon of the zero polynomial")
        pts = sorted((k, a.val()) for k, a in self.terms.items())
        hull = []
        for pt in pts:
            while len(hull) >= 2 and _cross(hull[-2], hull[-1], pt) <= 0:
                hull.pop()
            hull.append(pt)
        out = []
        for (x0, y0), (x1, y1) in zip(hull, hull[1:]):
            slope = Fraction(y1 - y0) / (x1 - x0)
            out.extend([-slope] * (x1 - x0))
        return sorted(out)

    def derivative(self):
        return LaurentPoly(self.config, {k - 1: a * k for k, a in self.terms.items() if k})

    def evaluate(self, c):
        c = self.config(c)
        total = self.config.zero()
        for k, a in self.terms.items():
            total = total + a * c ** k
        return total

    def psi_star(self, p=None):
        p = self.config.p if p is None else p
        return LaurentPoly(self.config, {k // p: a for k, a in self.terms.items() if k % p == 0})

    def substitute(self, m):
        """Compose with T = phi(S) for one of the coordinate maps below."""
        phi = m.phi(self.config)
        if phi.is_monomial():
            (j, b), = phi.terms.items()
            return LaurentPoly(self.config, {k * j: a * b ** k for k, a in self.terms.items()})
        if self.is_polynomial():
            return _horner(self, phi)
        kmin = self.min_exp
        shifted = LaurentPoly(self.config, {k - kmin: a for k, a in self.terms.items()})
        return RatFunc(_horner(shifted, phi), phi ** (-kmin))

    def order_at_zero(self):
        return self.min_exp if self.terms else INF


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _horner(f, phi):
    # f has no negative exponents here
    result = LaurentPoly(f.config)
    for k in range(f.max_exp, -1, -1):
        result = result * phi + f.coeff(k)
    return result


class RatFunc:
    """num/den with Laurent numerator and denominator, kept unreduced."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if den is None:
            den = LaurentPoly.const(num.config, 1)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.config != den.config:
            raise ValueError("mismatched PrimeConfig")
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RatFunc is immutable")

    @property
    def config(self):
        return self.num.config

    @classmethod
    def lift(cls, f):
        if isinstance(f, RatFunc):
            return f
        return cls(f)

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, LaurentPoly):
            return RatFunc(other)
        if isinstance(other, (int, Rational, FieldElem)):
            return RatFunc(LaurentPoly.const(self.config, other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.num.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RatFunc(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, k):
        k = int(k)
        if k < 0:
            return RatFunc(self.den ** (-k), self.num ** (-k))
        return RatFunc(self.num ** k, self.den ** k)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return (self.num * other.den - other.num * self.den).is_zero()

    def __hash__(self):
        # equality is cross-multiplication, so only a coarse hash is sound
        return hash(self.config)

    def __repr__(self):
        return f"RatFunc({self})"

    def __str__(self):
        if self.den == LaurentPoly.const(self.config, 1):
            return str(self.num)
        return f"({self.num})/({self.den})"

    def is_zero(self):
        return self.num.is_zero()

    def gauss_val(self, t):
        return self.num.gauss_val(t) - self.den.gauss_val(t)

    def derivative(self):
        n, d = self.num, self.den
        return RatFunc(n.derivative() * d - n * d.derivative(), d * d)

    def evaluate(self, c):
        dv = self.den.evaluate(c)
        if dv.is_zero():
            raise PoleError(f"pole at {c}")
        return self.num.evaluate(c) / dv

    def substitute(self, m):
        n = RatFunc.lift(self.num.substitute(m))
        d = RatFunc.lift(self.den.substitute(m))
        return n / d

    def psi_star(self, p=None):
        raise TypeError("psi_star is defined on Laurent polynomials only")

    def as_laurent(self):
        """The LaurentPoly equal to self when the denominator is a monomial."""
        if self.den.is_monomial():
            (j, b), = self.den.terms.items()
            binv = b.inv()
            return LaurentPoly(self.config, {k - j: a * binv for k, a in self.num.terms.items()})
        return None

    def normalize(self):
        """Clear a monomial content: make den monic in its lowest term."""
        if self.den.is_zero():  # pragma: no cover
            raise ZeroDivisionError
        lo = self.den.min_exp
        lead = self.den.terms[lo].inv()
        num = LaurentPoly(self.config, {k - lo: a * lead for k, a in self.num.terms.items()})
        den = LaurentPoly(self.config, {k - lo: a * lead for k, a in self.den.terms.items()})
        if num.terms and den.is_monomial():
            return RatFunc(num, den)
        lo_n = num.min_exp if num.terms else 0
        if lo_n < 0:
            return RatFunc(LaurentPoly(self.config, {k - lo_n: a for k, a in num.terms.items()}),
                           LaurentPoly(self.config, {k - lo_n: a for k, a in den.terms.items()}))
        return RatFunc(num, den)

    def order_at_zero(self):
        return self.num.order_at_zero() - self.den.order_at_zero()


# --- coordinate maps T = phi(S) ---------------------------------------------


class CoordinateMap:
    """Base class: a substitution T = phi(S) with phi a Laurent polynomial."""

    def phi(self, config):  # pragma: no cover - abstract
        raise NotImplementedError

    def domain_image(self, config, t_lo, t_hi):
        """Log-radius interval in S corresponding to [t_lo, t_hi] in T."""
        raise NotImplementedError(f"{type(self).__name__} has no interval rule")

    def then(self, other):
        """The map T = phi_self(phi_other(U))."""
        return LaurentMap(lambda cfg, a=self, b=other: _compose_phi(a.phi(cfg), b))


class LaurentMap(CoordinateMap):
    def __init__(self, phi_fn):
        self._phi_fn = phi_fn

    def phi(self, config):
        return self._phi_fn(config)


def _compose_phi(phi1, m2):
    out = phi1.substitute(m2)
    if isinstance(out, RatFunc):
        out = out.as_laurent()
        if out is None:
            raise ValueError("composite map is not a Laurent polynomial")
    return out


class Kummer(CoordinateMap):
    def __init__(self, N):
        if int(N) < 1:
            raise ValueError("Kummer degree must be >= 1")
        self.N = int(N)

    def phi(self, config):
        return LaurentPoly.T(config, self.N)

    def domain_image(self, config, t_lo, t_hi):
        return Fraction(t_lo) / self.N, t_hi / self.N if t_hi != INF else INF

    def __repr__(self):
        return f"Kummer({self.N})"


class Dilate(CoordinateMap):
    def __init__(self, a):
        self.a = a

    def phi(self, config):
        a = config(self.a)
        if a.is_zero():
            raise ValueError("dilatation by zero")
        return LaurentPoly(config, {1: a})

    def domain_image(self, config, t_lo, t_hi):
        va = config(self.a).val()
        return t_lo - va, t_hi - va if t_hi != INF else INF

    def __repr__(self):
        return f"Dilate({self.a})"


class Invert(CoordinateMap):
    def __init__(self, gamma):
        self.gamma = gamma

    def phi(self, config):
        g = config(self.gamma)
        if g.is_zero():
            raise ValueError("inversion with gamma = 0")
        return LaurentPoly(config, {-1: g})

    def domain_image(self, config, t_lo, t_hi):
        if t_hi == INF:
            raise ValueError("inversion of a disk containing 0")
        vg = config(self.gamma).val()
        return vg - t_hi, vg - t_lo

    def __repr__(self):
        return f"Invert({self.gamma})"


class RecentreDisk(CoordinateMap):
    """T = c + S."""

    def __init__(self, c):
        self.c = c

    def phi(self, config):
        return LaurentPoly(config, {0: self.c, 1: 1})

    def __repr__(self):
        return f"RecentreDisk({self.c})"


class RecentreAnnulus(CoordinateMap):
    """T = c(1 + S): the residue class of c in normalized coordinates."""

    def __init__(self, c):
        self.c = c

    def phi(self, config):
        c = config(self.c)
        if c.is_zero():
            raise ValueError("annulus recentring at 0")
        return LaurentPoly(config, {0: c, 1: c})

    def __repr__(self):
        return f"RecentreAnnulus({self.c})"


# --- functional interface --------------------------------------------------


def gauss_val(f, t):
    """w_t(f) = -log_p |f(t_{0,rho})| with rho = p^-t."""
    return f.gauss_val(t)


def newton_slopes(f):
    return f.newton_slopes()


def derivative(f):
    return f.derivative()


def substitute(f, m):
    return f.substitute(m)


def psi_star(f, p=None):
    return f.psi_star(p)


def poles_in_interval(den, t_lo, t_hi, open_lo=False, open_hi=False):
    """Root valuations of ``den`` lying in the log-radius interval.

    A zero of ``den`` at T = 0 counts when the interval reaches t = +inf.
    """
    bad = []
    if den.is_zero():
        raise ZeroDivisionError("zero denominator")
    if len(den.terms) > 1:
        for s in den.newton_slopes():
            lo_ok = s > t_lo if open_lo else s >= t_lo
            hi_ok = s < t_hi if open_hi else s <= t_hi
            if lo_ok and hi_ok:
                bad.append(s)
    return bad


def check_pole_free(f, t_lo, t_hi, open_lo=False):
    f = RatFunc.lift(f)
    bad = poles_in_interval(f.den, t_lo, t_hi, open_lo=open_lo)
    if bad:
        vals = ", ".join(str(b) for b in bad)
        raise PoleError(f"denominator {f.den} has roots of valuation {vals} in [{t_lo}, {t_hi}]")
    if t_hi == INF and f.order_at_zero() < 0:
        raise PoleError(f"{f} has a pole at T = 0 inside the disk")


def sup_val_on_interval(f, t_lo, t_hi, open_lo=False):
    """Valuation of the sup norm of f on the annulus t_lo <= t <= t_hi.

    t -> w_t(f) is concave on a pole-free interval, so the infimum is attained
    at an endpoint; on a disk (t_hi = INF) it is the outer boundary value.
    """
    t_lo = Fraction(t_lo)
    if t_hi != INF:
        t_hi = Fraction(t_hi)
        if t_lo > t_hi:
            raise ValueError("empty interval")
    if isinstance(f, RatFunc):
        check_pole_free(f, t_lo, t_hi, open_lo=open_lo)
    elif t_hi == INF and f.terms and f.min_exp < 0:
        raise PoleError(f"{f} has a pole at T = 0 inside the disk")
    if t_hi == INF:
        return f.gauss_val(t_lo)
    return min(f.gauss_val(t_lo), f.gauss_val(t_hi))
