import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from isodyn.lattice import (LatticeError, LatticeSpec, divfree_project, inner_divergence,
                            inner_integral, l2, omega_d, random_bandlimited, spectral_diff_matrix,
                            workers)


def test_default_desk_grid():
    lat = LatticeSpec()
    assert lat.shape == (16, 16, 17, 16, 16)
    assert lat.vlink_shape == (2, 16, 16, 16, 16, 16)
    assert lat.h3 == pytest.approx(2 * np.pi / 16)
    assert lat.inner_weight == pytest.approx((lat.lam * lat.dX) ** 2)


@pytest.mark.parametrize("kw", [dict(n1=12), dict(k_inner=6), dict(n3=2), dict(lam=0.0),
                                dict(l3=-1.0), dict(d_inner=0), dict(dt=0.0)])
def test_spec_rejects_bad_values(kw):
    with pytest.raises(LatticeError):
        LatticeSpec(**kw)


def test_diff_matrix_exact_on_resolved_modes():
    n, L = 16, 3.0
    x = np.arange(n) * L / n
    d = spectral_diff_matrix(n, L)
    for k in range(1, n // 2):
        w = 2 * np.pi * k / L
        assert np.allclose(d @ np.sin(w * x), w * np.cos(w * x), atol=1e-11 * w)
    assert np.allclose(d, -d.T, atol=1e-13)


def test_periodic_and_inner_derivatives(lat):
    x1, x2, x3, X1, X2 = lat.mesh()
    f = np.sin(2 * x1) * np.cos(x2) * np.sin(x3 / 2) * np.cos(3 * X1) * np.sin(X2)
    f = np.broadcast_to(f, lat.shape)
    want = 2 * np.cos(2 * x1) * np.cos(x2) * np.sin(x3 / 2) * np.cos(3 * X1) * np.sin(X2)
    assert np.allclose(lat.dx(f, 1), want, atol=1e-12)
    want = -3 * np.sin(2 * x1) * np.cos(x2) * np.sin(x3 / 2) * np.sin(3 * X1) * np.sin(X2)
    assert np.allclose(lat.dX_(f, 0), want, atol=1e-12)
    with pytest.raises(LatticeError):
        lat.dx(f, 3)


def test_dz_transposes(lat, rng):
    f = rng.standard_normal(lat.shape)
    g = rng.standard_normal(lat.link_shape)
    lat.zero_boundary(f)
    # <dz f, g> = -<f, dz_back g> for f vanishing on the boundary
    assert np.sum(lat.dz(f) * g) == pytest.approx(-np.sum(f * lat.dz_back(g)), rel=1e-12)
    # to_node is the transpose of to_link
    f = rng.standard_normal(lat.shape)
    assert np.sum(lat.to_link(f) * g) == pytest.approx(np.sum(f * lat.to_node(g)), rel=1e-12)


def test_lap3_matches_three_point_stencil(lat, rng):
    f = rng.standard_normal(lat.shape)
    h = lat.h3
    want = np.zeros_like(f)
    want[:, :, 1:-1] = (f[:, :, 2:] - 2 * f[:, :, 1:-1] + f[:, :, :-2]) / h ** 2
    assert np.allclose(lat.lap3(f), want)


def test_inverse_laplacian_agrees_with_fft(lat, rng):
    f = rng.standard_normal(lat.shape)
    assert np.allclose(lat.inv_laplacian_inner(f), lat.inv_laplacian_inner_fft(f), atol=1e-12)


def test_projector_is_idempotent_and_transverse(lat, rng):
    f = rng.standard_normal(lat.vshape)
    p = divfree_project(lat, f)
    assert np.allclose(divfree_project(lat, p), p, atol=1e-12)
    assert l2(lat, inner_divergence(lat, p)) < 1e-11 * l2(lat, f)
    g = rng.standard_normal(lat.vshape)
    # orthogonal projector: symmetric under the flat pairing
    assert np.sum(divfree_project(lat, g) * f) == pytest.approx(np.sum(g * p), rel=1e-11)


def test_inner_integral_measure(lat):
    ones = np.ones(lat.shape)
    assert np.allclose(inner_integral(lat, ones), (lat.lam * lat.l_inner) ** lat.D)


def test_omega_d():
    assert omega_d(2) == pytest.approx(1 / (2 * np.pi))
    assert omega_d(3) == pytest.approx(4 * np.pi / (2 * np.pi) ** 3)
    with pytest.raises(ValueError):
        omega_d(0)


def test_workers_env(monkeypatch):
    monkeypatch.setenv("ISODYN_THREADS", "3")
    assert workers() == 3
    monkeypatch.delenv("ISODYN_THREADS")
    assert workers() == 1


def test_random_bandlimited_at_nyquist_rejected(lat):
    with pytest.raises(LatticeError, match="Nyquist"):
        random_bandlimited(0, lat, max_mode=4)


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), mm=st.integers(0, 3), amp=st.floats(0.1, 5.0))
def test_random_bandlimited_properties(lat, seed, mm, amp):
    f = random_bandlimited(seed, lat, mm, amp)
    assert np.array_equal(f, random_bandlimited(seed, lat, mm, amp))
    assert np.all(f[:, :, :, 0] == 0) and np.all(f[:, :, :, -1] == 0)
    assert np.sqrt(np.mean(f * f)) == pytest.approx(amp, rel=1e-12) or np.all(f == 0)
    assert l2(lat, inner_divergence(lat, f)) <= 1e-11 * max(l2(lat, f), 1.0)
    spec = np.abs(np.fft.fftn(f, axes=(-1, -2, -4, -5)))
    k = np.abs(np.fft.fftfreq(lat.k_inner, 1.0 / lat.k_inner))
    outside = spec[..., k > mm, :]
    assert outside.max(initial=0.0) <= 1e-10 * max(spec.max(), 1.0)


def test_dimension_three(lat3):
    f = random_bandlimited(5, lat3, 1, 1.0)
    assert f.shape == (3, 4, 4, 5, 4, 4, 4)
    assert l2(lat3, inner_divergence(lat3, f)) < 1e-12
