"""
Alternating charges on a regular 2m-gon
=======================================

Put 2m scatterers on a circle of radius r0 with a common strength alpha.
For one particular alpha the alternating vector q_j = (-1)^(j+1) is annihilated
by the contact matrix, which gives a zero-energy bound state.
"""

import numpy as np

from multipoint import alpha_alternating, make_polygon, polygon_alpha, zero_energy_null_space
from multipoint.farfield import alternating_charges
from multipoint.greens import assemble_contact_matrix
from multipoint.spectral import find_critical_alphas

m, r0 = 3, 1.0
config = make_polygon(m, r0)
print("hexagon alpha", polygon_alpha(m, r0))

# the folded sum pairs vertices at equal distance; its terms decrease
alpha, terms = alpha_alternating(m, r0)
print("folded alpha ", alpha)
print("u_k", np.array(terms.u))

q = alternating_charges(m)
A = assemble_contact_matrix(config, 0.0).entries
print("A q", A @ q)

# the bound state is simple; its basis vector is q / |q|
basis = zero_energy_null_space(config)
print("multiplicity", basis.multiplicity)
print("basis", basis.basis[0] * np.sqrt(2 * m))

# alpha is negative for every m, and drifts slowly with m
for mm in (1, 2, 4, 8, 16, 32, 48):
    print("m=%2d alpha=% .15f" % (mm, polygon_alpha(mm, r0)))

# scanning alpha for the square turns up a second critical value:
# at -1/(8 pi) a pair of dipole states appears
print("critical alphas for the square", find_critical_alphas(make_polygon(2, 1.0).positions, -0.2, 0.0))
