"""Closed-form systems used as reference cases."""

from __future__ import annotations

from fractions import Fraction

from .diffsys import DiffSystem, DomainSpec
from .field import PrimeConfig
from .laurent import LaurentPoly, RatFunc


def exponential(p=3, domain=None, scale=1, config=None):
    """dy/dT = scale * y; radius |p|^(1/(p-1)) / |scale| on a large enough disk."""
    cfg = config or PrimeConfig(p)
    dom = domain or DomainSpec.disk(0)
    return DiffSystem([[LaurentPoly.const(cfg, cfg(scale) if not hasattr(scale, "config") else scale)]],
                      dom, cfg)


def dwork(p=3, domain=None):
    """dy/dT = pi (1 - p T^(p-1)) y with pi^(p-1) = -p, solution exp(pi (T - T^p))."""
    cfg = PrimeConfig(p, p - 1, -1)
    pi = cfg.pi
    g = LaurentPoly(cfg, {0: pi, p - 1: pi * (-p)})
    dom = domain or DomainSpec.uncapped(Fraction(-1, 2) if p == 3 else Fraction(-1, p - 1))
    return DiffSystem([[g]], dom, cfg)


def binomial(alpha, domain=None):
    """dy/dT = alpha / (1 + T) y, solution (1 + T)^alpha; ``alpha`` a FieldElem."""
    cfg = alpha.config
    num = LaurentPoly.const(cfg, alpha)
    den = LaurentPoly(cfg, {0: cfg.one(), 1: cfg.one()})
    dom = domain or DomainSpec.disk(0, open_lo=True)
    return DiffSystem([[RatFunc(num, den)]], dom, cfg)


def zero_system(config=None, mu=1, domain=None):
    cfg = config or PrimeConfig(3)
    dom = domain or DomainSpec.disk(0)
    z = LaurentPoly(cfg)
    return DiffSystem([[z] * mu for _ in range(mu)], dom, cfg)


def binomial_recentred(alpha, domain=None):
    """dy/dT = alpha / T y: the binomial equation seen from its singular point."""
    cfg = alpha.config
    dom = domain or DomainSpec.annulus(-1, 1)
    return DiffSystem([[RatFunc(LaurentPoly.const(cfg, alpha), LaurentPoly.T(cfg))]], dom, cfg)
