"""Exact arithmetic in a totally ramified extension Q(pi), pi^e = u*p.

Elements are stored on the power basis 1, pi, ..., pi^(e-1) with rational
coefficients.  Because the basis valuations i/e are distinct modulo 1, the
p-adic valuation of an element is the minimum of the valuations of its
summands, which makes ``val`` exact.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

try:
    import gmpy2
except ImportError:  # pragma: no cover
    gmpy2 = None

INF = math.inf


def vp_int(n, p):
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    if gmpy2 is not None:
        return int(gmpy2.remove(n, p)[1])
    n = abs(n)
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def vp(x, p):
    """p-adic valuation of a rational number (INF for zero)."""
    x = Fraction(x)
    if x == 0:
        return INF
    return vp_int(x.numerator, p) - vp_int(x.denominator, p)


def _is_prime(n):
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


class PrimeConfig:
    """The ground field Q(pi) with minimal polynomial X^e - u*p.

    ``precision`` switches on capped mode: summands of valuation larger than
    ``precision`` are dropped after every operation, so a computed valuation
    is only trusted when it is smaller than ``precision``.
    """

    __slots__ = ("p", "e", "u", "precision")

    def __init__(self, p, e=1, u=1, precision=None):
        p = int(p)
        e = int(e)
        u = Fraction(u)
        if not _is_prime(p):
            raise ValueError(f"p={p} is not prime")
        if e < 1:
            raise ValueError("ramification index must be >= 1")
        if u == 0 or vp(u, p) != 0:
            raise ValueError(f"u={u} must be a p-adic unit")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "e", e)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "precision",
                           None if precision is None else Fraction(precision))

    def __setattr__(self, name, value):
        raise AttributeError("PrimeConfig is immutable")

    def _key(self):
        return (self.p, self.e, self.u, self.precision)

    def __eq__(self, other):
        return isinstance(other, PrimeConfig) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        s = f"PrimeConfig(p={self.p}, e={self.e}, u={self.u}"
        if self.precision is not None:
            s += f", precision={self.precision}"
        return s + ")"

    @property
    def pi(self):
        if self.e == 1:
            # pi = u*p when there is no ramification
            return FieldElem(self, (self.u * self.p,))
        return FieldElem(self, (Fraction(0), Fraction(1)) + (Fraction(0),) * (self.e - 2))

    def zero(self):
        return FieldElem(self, (Fraction(0),) * self.e)

    def one(self):
        return FieldElem(self, (Fraction(1),) + (Fraction(0),) * (self.e - 1))

    def __call__(self, x):
        """Coerce an int, Fraction, coefficient sequence or FieldElem."""
        if isinstance(x, FieldElem):
            if x.config != self:
                raise ValueError("element belongs to a different field")
            return x
        if isinstance(x, (int, Rational, str)):
            return FieldElem(self, (Fraction(x),) + (Fraction(0),) * (self.e - 1))
        coeffs = tuple(Fraction(c) for c in x)
        if len(coeffs) != self.e:
            raise ValueError(f"expected {self.e} coefficients, got {len(coeffs)}")
        return FieldElem(self, coeffs)


class FieldElem:
    """An element sum_i coeffs[i] * pi^i of Q(pi); immutable."""

    __slots__ = ("config", "coeffs", "_val")

    def __init__(self, config, coeffs):
        coeffs = tuple(coeffs)
        if config.precision is not None:
            coeffs = _cap(config, coeffs)
        object.__setattr__(self, "config", config)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "_val", None)

    def __setattr__(self, name, value):
        raise AttributeError("FieldElem is immutable")

    def _coerce(self, other):
        if isinstance(other, FieldElem):
            if other.config != self.config:
                raise ValueError("mismatched PrimeConfig")
            return other
        if isinstance(other, (int, Rational)):
            return self.config(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return FieldElem(self.config, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return FieldElem(self.config, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return FieldElem(self.config, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Rational)):
            c = Fraction(other)
            return FieldElem(self.config, tuple(a * c for a in self.coeffs))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        e = self.config.e
        if e == 1:
            return FieldElem(self.config, (self.coeffs[0] * other.coeffs[0],))
        up = self.config.u * self.config.p
        out = [Fraction(0)] * e
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                if not b:
                    continue
                k = i + j
                if k >= e:
                    out[k - e] += up * a * b
                else:
                    out[k] += a * b
        return FieldElem(self.config, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inv()

    def __rtruediv__(self, other):
        return self.inv() * other

    def __pow__(self, k):
        k = int(k)
        if k < 0:
            return self.inv() ** (-k)
        result = self.config.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Rational)):
            other = self.config(other)
        if not isinstance(other, FieldElem):
            return NotImplemented
        return self.config == other.config and self.coeffs == other.coeffs

    def __hash__(self):
        if self.config.e == 1 or not any(self.coeffs[1:]):
            return hash(self.coeffs[0])
        return hash((self.config, self.coeffs))

    def __bool__(self):
        return any(self.coeffs)

    def is_zero(self):
        return not any(self.coeffs)

    def is_rational(self):
        return not any(self.coeffs[1:])

    def val(self):
        """Exact valuation, normalized by v(p) = 1; INF for zero."""
        if self._val is None:
            p, e = self.config.p, self.config.e
            best = INF
            for i, a in enumerate(self.coeffs):
                if a:
                    v = vp(a, p) + Fraction(i, e)
                    if v < best:
                        best = v
            object.__setattr__(self, "_val", best)
        return self._val

    def inv(self):
        """Multiplicative inverse, via extended Euclid against X^e - u*p."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(pi)")
        e = self.config.e
        if e == 1:
            return FieldElem(self.config, (1 / self.coeffs[0],))
        modulus = [-self.config.u * self.config.p] + [Fraction(0)] * (e - 1) + [Fraction(1)]
        s = _poly_inverse_mod(list(self.coeffs), modulus)
        s = s + [Fraction(0)] * (e - len(s))
        return FieldElem(self.config, s[:e])

    def __repr__(self):
        return f"FieldElem({self})"

    def __str__(self):
        parts = []
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            if i == 0:
                parts.append(str(a))
                continue
            mono = "pi" if i == 1 else f"pi^{i}"
            if self.config.e == 1:
                mono = ""
            if a == 1:
                parts.append(mono)
            elif a == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{_paren(a)}*{mono}")
        if not parts:
            return "0"
        return " + ".join(parts).replace("+ -", "- ")


def _paren(a):
    return f"({a})" if a.denominator != 1 else str(a)


def val(x):
    """Valuation of a FieldElem or rational."""
    if isinstance(x, FieldElem):
        return x.val()
    raise TypeError("val() expects a FieldElem; use vp() for rationals")


def inv(x):
    return x.inv()


def _cap(config, coeffs):
    W = config.precision
    p, e = config.p, config.e
    out = []
    for i, a in enumerate(coeffs):
        if a and vp(a, p) + Fraction(i, e) > W:
            a = Fraction(0)
        out.append(a)
    return tuple(out)


def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_divmod(a, b):
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    lead = b[-1]
    while len(_trim(a)) >= len(b):
        k = len(a) - len(b)
        c = a[-1] / lead
        q[k] = c
        for i, bi in enumerate(b):
            a[k + i] -= c * bi
    return _trim(q), a


def _poly_mul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_sub(a, b):
    n = max(len(a), len(b))
    a = a + [Fraction(0)] * (n - len(a))
    b = b + [Fraction(0)] * (n - len(b))
    return _trim([x - y for x, y in zip(a, b)])


def _poly_inverse_mod(a, m):
    # invariant: s_i * a = r_i  (mod m)
    r0, r1 = list(m), _trim(list(a))
    s0, s1 = [], [Fraction(1)]
    while len(r1) > 1:
        q, r = _poly_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
    if not r1:
        raise ZeroDivisionError("element is not invertible")  # pragma: no cover
    c = r1[0]
    _, s = _poly_divmod(s1, m)
    return [x / c for x in s]
