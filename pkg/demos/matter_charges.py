"""A scalar field on a fixed gauge background carries one conserved charge per inner direction.

The background here is X-independent, so it commutes with the inner
translations and Q_N is conserved along the quenched evolution.
"""
import numpy as np

from isodyn import GaugeConfig, LatticeSpec, MatterState, charges, matter_step, random_bandlimited
from isodyn.matter import matter_energy

lat = LatticeSpec(n1=8, n2=8, n3=9, k_inner=8, dt=0.01)
psi = random_bandlimited((5, 0), lat, 1, 1.0, vector=False)
dpsi = random_bandlimited((5, 1), lat, 1, 1.0, vector=False)
ms = MatterState(psi, dpsi, mass=1.0)

x1, x2, x3, *_ = lat.mesh()
prof = 0.2 * np.sin(2 * np.pi * x2 / lat.l2) * np.sin(np.pi * x3 / lat.l3)
a = [lat.zeros() for _ in range(3)] + [lat.zeros(link=True)]
a[1][0] = np.broadcast_to(prof, lat.shape)
bg = GaugeConfig(tuple(a), None)

q0, e0 = charges(lat, ms, bg), matter_energy(lat, ms, bg)
for _ in range(50):
    ms = matter_step(lat, ms, bg)
q1, e1 = charges(lat, ms, bg), matter_energy(lat, ms, bg)
print("Q before:", np.array2string(q0, precision=12))
print("Q after: ", np.array2string(q1, precision=12))
print(f"max |dQ| = {np.abs(q1 - q0).max():.2e}, |dE|/E = {abs(e1 - e0) / e0:.2e}")
