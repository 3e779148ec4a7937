"""The exponential equation y' = y over Q_3: watching the estimate converge.

The true radius is |p|^(1/(p-1)), so v_R = 1/2 at the unit Gauss point.  At
truncation N = 3^k the estimate is exactly 1/2 - 1/(2 * 3^k).
"""

from fractions import Fraction

from padicradius import GaussPoint, exponential, radius_at, series_solution_radius

sys = exponential()
print("N      v_est          v_cert         1/2 - 1/(2N)")
for k in range(2, 6):
    N = 3 ** k
    enc = radius_at(sys, GaussPoint(0), N=N, window=min(50, N // 2))
    print(f"{N:<6} {str(enc.v_est):<14} {str(enc.v_cert):<14} {Fraction(1, 2) - Fraction(1, 2 * N)}")

enc = radius_at(sys, GaussPoint(0), N=400)
print(f"\nN=400: exact estimate {enc.v_est}, reported {enc.v_reported}")
print(f"independent series oracle at 0: {series_solution_radius(sys, sys.config.zero(), 400)}")
