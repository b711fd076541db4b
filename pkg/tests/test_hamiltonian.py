import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from isodyn import hamiltonian as ham
from isodyn.lagrangian import energy_momentum, field_strength, four_momentum
from isodyn.lattice import LatticeError, l2, random_bandlimited


def rand_state(lat, seed, amp=0.5, mm=1):
    a = np.stack([random_bandlimited([seed, i], lat, mm, amp) for i in (0, 1)])
    pi = np.stack([random_bandlimited([seed, i], lat, mm, amp) for i in (2, 3)])
    return ham.with_a0(lat, ham.AxialState(a, pi))


def test_state_is_immutable(lat):
    st_ = ham.AxialState.vacuum(lat)
    with pytest.raises(ValueError):
        st_.a[0, 0, 0, 0, 0] = 1.0
    with pytest.raises(LatticeError):
        ham.AxialState(np.zeros((3,) + lat.vshape), np.zeros((3,) + lat.vshape))
    with pytest.raises(LatticeError):
        ham.gauss_residual(lat, st_.replace(a0=None))


def test_vacuum_is_bit_stable(lat):
    s = ham.AxialState.vacuum(lat)
    for scheme in ("rk4", "midpoint"):
        out = ham.step(lat, s, scheme)
        assert np.all(out.a == 0) and np.all(out.pi == 0) and np.all(out.a0 == 0)
    assert ham.hamiltonian(lat, s) == 0.0


def test_dirichlet_solver_against_dense(lat, rng):
    rhs = rng.standard_normal(lat.shape)
    u = ham.solve_dirichlet(lat, rhs)
    assert np.all(u[:, :, 0] == 0) and np.all(u[:, :, -1] == 0)
    assert np.allclose(lat.lap3(u)[:, :, 1:-1], rhs[:, :, 1:-1], atol=1e-10)


def test_gauss_law_holds_after_solve(lat):
    s = rand_state(lat, 3)
    g = ham.gauss_residual(lat, s)
    assert l2(lat, g) <= 1e-12 * l2(lat, ham.gauss_source(lat, s.a, s.pi))


@pytest.mark.parametrize("rep", ["coadjoint", "adjoint"])
def test_fast_rhs_matches_reference(lat, rep):
    s = ham.with_a0(lat, rand_state(lat, 4), rep)
    da, dpi = ham.time_derivatives(lat, s, rep)
    fda, fdpi, a0 = ham.fast_rhs(lat, s.a, s.pi, rep)
    assert np.allclose(a0, s.a0, atol=1e-13)
    assert np.allclose(fda, da, atol=1e-12) and np.allclose(fdpi, dpi, atol=1e-12)
    with pytest.raises(LatticeError):
        ham.fast_rhs(lat, s.a, s.pi, "other")


@settings(max_examples=5, deadline=None)
@given(seed=st.integers(0, 2 ** 31))
def test_energy_is_theta_00(lat, seed):
    s = rand_state(lat, seed)
    f = field_strength(lat, ham.gauge_config(lat, s))
    h = ham.hamiltonian(lat, s)
    assert h >= 0
    assert four_momentum(lat, energy_momentum(lat, f))[0] == pytest.approx(h, rel=1e-10)


def test_short_run_conserves_energy_and_constraint(lat):
    s = rand_state(lat, 5)
    h0 = ham.hamiltonian(lat, s)
    end = ham.evolve(lat, s, 20)
    assert abs(ham.hamiltonian(lat, end) - h0) <= 1e-8 * h0
    assert l2(lat, ham.gauss_residual(lat, end)) <= 1e-8 * l2(lat, ham.gauss_source(lat, end.a, end.pi))
    assert end.t == pytest.approx(20 * lat.dt)


def test_rk4_local_error_is_fifth_order(lat):
    s = rand_state(lat, 6, amp=0.3)
    errs = []
    for dt in (0.02, 0.01):
        one = ham.step(lat, s, dt=dt)
        two = ham.step(lat, ham.step(lat, s, dt=dt / 2), dt=dt / 2)
        errs.append(np.abs(one.a - two.a).max() + np.abs(one.pi - two.pi).max())
    assert np.log2(errs[0] / errs[1]) > 4.5


def test_midpoint_conserves_and_reports_failure(lat):
    s = rand_state(lat, 7)
    h0 = ham.hamiltonian(lat, s)
    end = ham.evolve(lat, s, 5, "midpoint")
    assert abs(ham.hamiltonian(lat, end) - h0) <= 1e-6 * h0
    with pytest.raises(ham.IntegrationError) as exc:
        ham.step(lat, s, "midpoint", max_iter=1, tol=0.0)
    assert exc.value.iterations == 1
    with pytest.raises(LatticeError):
        ham.step(lat, s, "leapfrog")


def test_poisson_bracket_antisymmetric(lat):
    s = rand_state(lat, 8)
    pts = [(0, 0, 1, 2, 3, 1, 2), (1, 1, 3, 0, 4, 5, 6), (0, 1, 2, 2, 2, 0, 0)]
    f1 = lambda lt, st_: ham.hamiltonian_functional(lt, st_)
    f2 = lambda lt, st_: float(np.sum(st_.a[0] ** 2 * st_.pi[1]))
    ab = ham.poisson_bracket(lat, f1, f2, s, pts)
    ba = ham.poisson_bracket(lat, f2, f1, s, pts)
    assert abs(ab + ba) <= 1e-9


def test_bracket_with_hamiltonian_gives_time_derivative(lat):
    # d_0 O = {O, H} for O = Pi_2^1 at one site (coadjoint action)
    s = rand_state(lat, 9)
    site = (1, 0, 3, 5, 4, 2, 6)
    col = [(i, m) + site[2:5] + x for i in range(2) for m in range(lat.D)
           for x in np.ndindex(lat.inner_shape)]
    gh = ham.functional_gradient(lat, ham.hamiltonian_functional, s, col)
    obs = lambda lt, st_: float(st_.pi[site])
    pb = ham.poisson_bracket(lat, obs, gh, s, col)
    _, dpi = ham.time_derivatives(lat, s)
    assert pb == pytest.approx(dpi[site], rel=1e-6, abs=1e-6 * np.abs(dpi).max())
