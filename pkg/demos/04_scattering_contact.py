"""
Scattering a plane wave off a few point scatterers
==================================================

The scattered field is a sum of outgoing spherical waves with charges q
fixed by a small linear system. Near each scatterer the total field should
look like a/r + b with b = 4 pi alpha a; the contact expansion checks that.
"""

import numpy as np

from multipoint import Configuration, IncidentWave, extract_contact_expansion, far_field_amplitude, solve_scattering

rng = np.random.default_rng(1)
config = Configuration.from_arrays(rng.uniform(-1, 1, (5, 3)), rng.uniform(-1, 1, 5))
wave = IncidentWave.plane_wave([0, 0, 1], energy=4.0)

sol = solve_scattering(config, wave)
print("charges q", sol.q)
print("linear solve residual %.2e" % sol.residual)

for j in range(config.n):
    ce = extract_contact_expansion(sol, j)
    print("scatterer %d  pole %.6f%+.6fj  residual %.2e" % (j, ce.pole_coeff.real, ce.pole_coeff.imag, ce.residual))

# far-field amplitude in a few directions
for nu in ([0, 0, 1], [1, 0, 0], [0, 0, -1]):
    print("f(%s) = %s" % (nu, far_field_amplitude(sol, nu)))

# a single scatterer has a closed-form charge
one = Configuration.from_arrays([[0, 0, 0]], -0.3)
q = solve_scattering(one, wave).q[0]
print("1x1 solver %s  closed form %s" % (q, -1 / (-0.3 - 2j / (4 * np.pi))))
