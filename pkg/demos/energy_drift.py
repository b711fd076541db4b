"""Energy error of rk4 and the implicit midpoint rule on a small random state.

Halving dt shrinks the rk4 error by roughly 2^4 or more and the midpoint
error by roughly 2^2, which is how the two schemes should converge.
"""
from isodyn import hamiltonian as ham
from isodyn.harness.config import default_config
from isodyn.harness.runner import initial_state

cfg = default_config().with_values(lattice__n1=8, lattice__n2=8, lattice__n3=9,
                                   lattice__k_inner=8, init__max_mode=1, init__amplitude=0.3)
T = 0.5
for scheme in ("rk4", "midpoint"):
    errs = []
    for dt in (0.01, 0.005):
        lat = cfg.lattice.replace(dt=dt)
        s = s0 = initial_state(cfg, lat)
        H0 = ham.hamiltonian(lat, s0)
        for _ in range(round(T / dt)):
            s = ham.step(lat, s, scheme)
        errs.append(abs(ham.hamiltonian(lat, s) - H0) / H0)
    print(f"{scheme:9s} |dH|/H at t={T}: dt=0.01 {errs[0]:.3e}, dt=0.005 {errs[1]:.3e}, "
          f"ratio {errs[0] / errs[1]:.1f}")
