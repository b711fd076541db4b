"""Finite inner volume: the same localized state on tori of side L_X and 2 L_X.

The inner space is really non-compact, so a state built from bumps of fixed
width should not care how large the torus is once the bumps have decayed at
the edge.  The grid spacing is held fixed and only the torus grows.
"""
import numpy as np

from isodyn import LatticeSpec
from isodyn import hamiltonian as ham


def bump_state(lat, sigma=0.6, amp=0.3):
    x1, x2, x3, X1, X2 = lat.mesh()
    c = lat.l_inner / 2
    a = np.zeros((2,) + lat.vshape)
    for i, (off, prof) in enumerate(((0.0, np.sin(x2)), (sigma, np.cos(x1)))):
        r2 = (X1 - c - off) ** 2 + (X2 - c) ** 2
        psi = np.broadcast_to(amp * prof * np.sin(np.pi * x3 / lat.l3) * np.exp(-r2 / (2 * sigma ** 2)),
                              lat.shape)
        g = lat.grad_inner(np.ascontiguousarray(psi))
        a[i] = np.stack([g[1], -g[0]])  # curl of a stream function: divergence free
    lat.zero_boundary(a)
    return ham.with_a0(lat, ham.AxialState(a, np.zeros_like(a)))


rows = []
for scale in (1, 2):
    lat = LatticeSpec(n1=8, n2=8, n3=9, k_inner=16 * scale, l_inner=2 * np.pi * scale, dt=0.01)
    s = bump_state(lat)
    H0 = ham.hamiltonian(lat, s)
    for _ in range(50):
        s = ham.step(lat, s)
    rows.append((lat.l_inner, H0, ham.hamiltonian(lat, s), np.abs(s.a).max()))
    print(f"L_X = {lat.l_inner:.4f}: H(0) = {H0:.12g}, H(0.5) = {rows[-1][2]:.12g}, max|A| = {rows[-1][3]:.6g}")
(_, h1, e1, m1), (_, h2, e2, m2) = rows
print(f"relative change between the two volumes: H(0) {abs(h2 - h1) / h1:.2e}, "
      f"H(0.5) {abs(e2 - e1) / e1:.2e}, max|A| {abs(m2 - m1) / m1:.2e}")
