"""Two normalized profiles that stay flat.

The binomial system y' = (pi / T) y on the annulus -1 <= t <= 1 has
normalized radius 1/3 everywhere, which reflects d(pi, Z_3) = 1/2.  Pulling the
exponential back along T -> T^3 shrinks normalized radii by the Frobenius
factor: v_norm(t) = v_norm_base(3t) / 3 in the regime 1/6 < v_norm < 1/2.
"""

from fractions import Fraction

from padicradius import (
    Cap, DomainSpec, GaussPoint, Kummer, PrimeConfig, RadiusOptions, binomial_recentred,
    exponential, pullback, radius_at, sample_profile,
)

cfg = PrimeConfig(3, 2, -1)
sys = binomial_recentred(cfg.pi)
samples = sample_profile(sys, -1, 1, 5, RadiusOptions(N=400), normalized=True)
print("binomial, normalized:", [f"{float(s.value):.4f}" for s in samples])

base = exponential(domain=DomainSpec.disk(-1))
pulled = pullback(base, Kummer(3))
opts = RadiusOptions(N=400, cap=Cap.UNCAPPED)
for t in (Fraction(-1, 12), Fraction(-1, 6), Fraction(-1, 4)):
    v = radius_at(pulled, GaussPoint(t), opts).v_est - t
    v0 = radius_at(base, GaussPoint(3 * t), opts).v_est - 3 * t
    print(f"t={t}: v_norm={float(v):.4f}  v_norm_base(3t)/3={float(v0 / 3):.4f}")
