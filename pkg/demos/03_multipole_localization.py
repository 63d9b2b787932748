"""
How fast the polygon bound state decays
=======================================

Far away, psi is a series in t = 2 R r0 sin(theta) cos(phi - phi_j) / (R^2 + r0^2)
with angular coefficients C_l. For the alternating 2m-gon every C_l with
l < m cancels, so psi falls off like 1/R^(m+1).
"""

import numpy as np

from multipoint import make_polygon
from multipoint.farfield import (
    alternating_charges,
    fibonacci_directions,
    fit_decay_exponent,
    multipole_coefficients,
    random_directions,
    series_eval_bound_state,
)
from multipoint.spectral import bound_state_eval

dirs = random_directions(200, rng=0)
theta = np.array([d.theta for d in dirs])
phi = np.array([d.phi for d in dirs])

# leading coefficients for the octagon (m = 4)
m = 4
for l in range(m + 2):
    print("l=%d  max|C_l| = %.3e" % (l, np.abs(multipole_coefficients(m, l, theta, phi)).max()))

# the truncated series and the direct sum agree within the certified tail
x = 30.0 * np.array(dirs[0].vector)
value, tail = series_eval_bound_state(m, 1.0, x, L=40)
direct = bound_state_eval(make_polygon(m, 1.0), alternating_charges(m), x)
print("series %.17g  direct %.17g  tail bound %.2e" % (value, direct, tail))

# log-log fit of the RMS field over 64 directions
R = np.geomspace(1e2, 1e4, 21)
for m in (1, 2, 3, 4):
    p = fit_decay_exponent(make_polygon(m, 1.0), alternating_charges(m), R, fibonacci_directions(64))
    print("m=%d  fitted exponent %.6f  expected %d" % (m, p, m + 1))
