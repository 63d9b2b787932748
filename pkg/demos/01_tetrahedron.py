"""
Four scatterers on a regular tetrahedron
========================================

With every strength set to -1/(4 pi s), where s is the edge length, the
zero-energy contact matrix is a multiple of the all-ones matrix. Every
neutral charge vector is then annihilated and gives a bound state, so zero
energy is a triple eigenvalue.
"""

import math

import numpy as np

from multipoint import make_tetrahedron, zero_energy_null_space
from multipoint.greens import assemble_contact_matrix

config = make_tetrahedron(1.0)
print("positions\n", config.positions)
print("alpha", config.alphas[0], "expected", -1 / (4 * math.pi))

# diagonal and off-diagonal entries coincide: A(0) = -(1/(4 pi s)) * ones
A = assemble_contact_matrix(config, 0.0).entries
print("A(0) * 4 pi\n", np.round(A * 4 * math.pi, 15))

# singular values of [A; 1...1]: three vanish
basis = zero_energy_null_space(config)
print("singular values", basis.singular_values)
print("multiplicity", basis.multiplicity, "margin %.3g" % basis.margin)

# each basis vector sums to zero, so psi has no 1/|x| tail
for q in basis.basis:
    print("q", np.round(q, 12), "sum %.1e" % q.sum())

# the multiplicity does not depend on the edge length
for edge in (0.01, 0.5, 2.0, 100.0):
    print("edge", edge, "multiplicity", zero_energy_null_space(make_tetrahedron(edge)).multiplicity)
