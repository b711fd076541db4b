"""Tour of the field-dependent Lie algebra on a small lattice.

Brackets of divergence-free inner vector fields stay divergence free,
the Jacobi identity holds to round-off, and the coadjoint action is
minus the transpose of the adjoint one under the L2 pairing.
"""
import numpy as np

from isodyn import LatticeSpec, bracket, coadjoint, divfree_project, random_bandlimited
from isodyn.algebra import jacobi
from isodyn.lattice import l2

lat = LatticeSpec(n1=8, n2=8, n3=9, k_inner=8)
u, v, w = (random_bandlimited((7, i), lat, 1, 1.0) for i in range(3))

uv = bracket(lat, u, v)
leak = l2(lat, uv - divfree_project(lat, uv)) / l2(lat, uv)
print(f"|[u,v]|               = {l2(lat, uv):.4e}")
print(f"non-solenoidal part   = {leak:.2e} (relative)")
print(f"[u,v] + [v,u]         = {l2(lat, uv + bracket(lat, v, u)):.2e}")
print(f"Jacobi residual       = {l2(lat, jacobi(lat, u, v, w)) / l2(lat, uv):.2e} (relative)")

# <coad_u p, v> = -<p, [u, v]>
p = w
lhs = np.sum(coadjoint(lat, u, p) * v)
rhs = -np.sum(p * bracket(lat, u, v))
print(f"coadjoint pairing     = {lhs:.10e} vs {rhs:.10e}")
