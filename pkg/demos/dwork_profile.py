"""The Dwork exponential y' = pi (1 - 3 T^2) y over Q_3(pi), pi^2 = -3.

The profile has a steep side v = -1 - 2t that meets the flat side v = -2/9
at t = -7/18.  We sample it, fit a convex piecewise-linear profile, decompose
each normalized side and explore the residue disk around T = 1.
"""

from fractions import Fraction

from padicradius import (
    Cap, ExploreOptions, RadiusOptions, decompose_side, dwork, explore, fit_concave_pl,
    sample_profile,
)

sys = dwork()
samples = sample_profile(sys, Fraction(-1, 2), 0, 9, RadiusOptions(N=600, cap=Cap.UNCAPPED))
for s in samples:
    print(f"t={str(s.t):>6}  v_est={float(s.enc.v_est):+.4f}  v_cert={float(s.enc.v_cert):+.4f}")

# tol 1/100 keeps the corner sample at t = -3/8 off the steep side
fit = fit_concave_pl(samples, sys.mu, tol=Fraction(1, 100))
print("\nslopes", [str(s) for s in fit.slopes], "breakpoints", [str(b) for b in fit.breakpoints])
for slope, intercept in fit.sides:
    decs = decompose_side(slope - 1, intercept, sys.config, sys.mu, h_max=2)
    print(f"side {intercept} + ({slope}) t  ->  (h, j, s, v_b) in",
          [(d.h, d.j, d.s, str(d.v_b)) for d in decs])

graph = explore(sys, Fraction(-1, 2), 0, [sys.config(1)], depth=1, opts=ExploreOptions(N=300, tol=Fraction(1, 100)))
print("\ncontrolling graph:")
for node, parent in graph.segments():
    print(f"  segment centred at {node.center} on {[str(x) for x in node.t_interval]}:",
          "slopes", [str(x) for x in node.fit.slopes], "values", [str(x) for x in node.fit.values])
for leaf in graph.leaves:
    print(f"  leaf at center {leaf.center}, t={leaf.t}, v_R={leaf.v_R}")
