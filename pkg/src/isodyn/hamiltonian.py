"""Axial-gauge Hamiltonian dynamics.

Canonical variables are ``a[i] = A_i`` and ``pi[i] = Pi_i`` for i = 1, 2,
stored stacked as arrays of shape ``(2, D, n1, n2, n3, K..K)``.  A_3 = 0
and Pi^0 = 0 hold structurally.  A_0 is slaved to (a, pi) through the
Gauss constraint and solved along x3 with Dirichlet ends.

Two choices for how a gauge field acts on the momenta are provided:

``coadjoint`` (default)
    ``act(u, p) = -ad_u^T p``, the transpose of the bracket under the flat
    pairing.  With this choice the right-hand side is exactly the
    Hamiltonian vector field of :func:`hamiltonian`, so energy is conserved
    by the semi-discrete flow and the Poisson-bracket oracle matches.
``adjoint``
    ``act(u, p) = [u, p]``, the literal covariant derivative.  The flat
    pairing is not ad-invariant on this algebra, so this variant is not
    Hamiltonian with respect to :func:`hamiltonian`; it is kept for
    comparison.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.linalg

from .algebra import bracket, coadjoint
from .fields import GaugeConfig
from .lattice import LatticeError, LatticeSpec, divfree_project, inner_integral


class IntegrationError(RuntimeError):
    """Raised when an implicit stage fails to converge."""

    def __init__(self, msg: str, iterations: int):
        super().__init__(msg)
        self.iterations = iterations


def _frozen(x: np.ndarray) -> np.ndarray:
    v = np.asarray(x, dtype=float).view()
    v.flags.writeable = False
    return v


@dataclass(frozen=True)
class AxialState:
    """Canonical pair (A_i, Pi_i), i = 1, 2, with the resolved A_0 cache."""

    a: np.ndarray
    pi: np.ndarray
    t: float = 0.0
    a0: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "a", _frozen(self.a))
        object.__setattr__(self, "pi", _frozen(self.pi))
        if self.a0 is not None:
            object.__setattr__(self, "a0", _frozen(self.a0))
        if self.a.shape != self.pi.shape or self.a.shape[0] != 2:
            raise LatticeError("a and pi must both have shape (2, D, grid...)")

    def check(self, lat: LatticeSpec) -> None:
        if self.a.shape != (2,) + lat.vshape:
            raise LatticeError(f"state shape {self.a.shape} does not match lattice {(2,) + lat.vshape}")

    def replace(self, **kw) -> "AxialState":
        return replace(self, **kw)

    @classmethod
    def vacuum(cls, lat: LatticeSpec) -> "AxialState":
        z = np.zeros((2,) + lat.vshape)
        return cls(z, z.copy(), 0.0, np.zeros(lat.vshape))


def _act(lat: LatticeSpec, rep: str) -> Callable:
    if rep == "coadjoint":
        return lambda u, p: coadjoint(lat, u, p)
    if rep == "adjoint":
        return lambda u, p: bracket(lat, u, p)
    raise LatticeError(f"unknown representation {rep!r}")


def gauss_source(lat: LatticeSpec, a: np.ndarray, pi: np.ndarray, rep: str = "coadjoint"):
    """sum_i (d_i Pi_i + act(A_i, Pi_i)), before projection."""
    act = _act(lat, rep)
    return lat.dx(pi[0], 1) + lat.dx(pi[1], 2) + act(a, pi).sum(axis=0)


def solve_dirichlet(lat: LatticeSpec, rhs: np.ndarray) -> np.ndarray:
    """Solve the three-point x3 Laplacian ``lap3 u = rhs`` with u = 0 on both ends.

    One tridiagonal system per (x1, x2, X, component) column; the right-hand
    side on the boundary planes is ignored.
    """
    ax = lat.axis_x(3) % rhs.ndim
    m = lat.n3 - 2
    moved = np.moveaxis(rhs, ax, 0)
    inner = moved[1:-1].reshape(m, -1)
    h2 = lat.h3 ** 2
    ab = np.empty((3, m))
    ab[0] = 1.0 / h2
    ab[1] = -2.0 / h2
    ab[2] = 1.0 / h2
    sol = scipy.linalg.solve_banded((1, 1), ab, inner, check_finite=False)
    out = np.zeros_like(moved)
    out[1:-1] = sol.reshape((m,) + moved.shape[1:])
    return np.moveaxis(out, 0, ax)


def solve_a0(lat: LatticeSpec, state: AxialState, rep: str = "coadjoint") -> np.ndarray:
    """A_0 from ``Lambda d3^2 A_0 = P(sum_i D_i Pi_i)`` with Dirichlet ends."""
    g = divfree_project(lat, gauss_source(lat, state.a, state.pi, rep))
    return solve_dirichlet(lat, g) / lat.lam


def with_a0(lat: LatticeSpec, state: AxialState, rep: str = "coadjoint") -> AxialState:
    """Return the state with a freshly solved A_0 cache."""
    return state.replace(a0=solve_a0(lat, state, rep))


def _need_a0(state: AxialState) -> np.ndarray:
    if state.a0 is None:
        raise LatticeError("A_0 cache is empty; call with_a0 first")
    return state.a0


def gauss_residual(lat: LatticeSpec, state: AxialState, rep: str = "coadjoint") -> np.ndarray:
    """sum_k D_k Pi_k for k = 1..3, with Pi_3 = -Lambda d3 A_0, projected."""
    a0 = _need_a0(state)
    g = divfree_project(lat, gauss_source(lat, state.a, state.pi, rep))
    return g - lat.lam * lat.lap3(a0)


def field_strength_12(lat: LatticeSpec, a: np.ndarray) -> np.ndarray:
    return lat.dx(a[1], 1) - lat.dx(a[0], 2) + bracket(lat, a[0], a[1])


def hamiltonian_density(lat: LatticeSpec, state: AxialState) -> np.ndarray:
    """Energy density on the spatial node grid (inner space integrated).

    ``1/2 Pi.Pi + Lambda^2/2 (F12.F12 + d3A_i.d3A_i + d3A_0.d3A_0)``; the x3
    differences live on links and are shared half-and-half by their nodes.
    """
    a0 = _need_a0(state)
    lam2 = lat.lam ** 2
    f12 = field_strength_12(lat, state.a)
    node = 0.5 * np.einsum("im...,im...->...", state.pi, state.pi) \
        + 0.5 * lam2 * np.einsum("m...,m...->...", f12, f12)
    da = lat.dz(state.a)
    d0 = lat.dz(a0)
    link = 0.5 * lam2 * (np.einsum("im...,im...->...", da, da)
                         + np.einsum("m...,m...->...", d0, d0))
    return inner_integral(lat, node + lat.to_node(link))


def hamiltonian(lat: LatticeSpec, state: AxialState) -> float:
    """Total energy; a sum of squares, hence non-negative."""
    return float(hamiltonian_density(lat, state).sum() * lat.cell_volume)


def time_derivatives(lat: LatticeSpec, state: AxialState, rep: str = "coadjoint",
                     return_raw: bool = False):
    """Hamilton's equations ``(d_0 A_i, d_0 Pi_i)`` at a state with fresh A_0.

    ``d_0 A_i = Pi_i/Lambda + d_i A_0 + [A_i, A_0]`` and
    ``d_0 Pi_i = -act(A_0, Pi_i) + Lambda sum_j (d_j F_ji + act(A_j, F_ji))
    + Lambda d3^2 A_i``.  Both are projected; with ``return_raw`` the
    unprojected pair is returned as well (for leakage diagnostics).
    """
    a0 = _need_a0(state)
    act = _act(lat, rep)
    a, pi, lam = state.a, state.pi, lat.lam
    da = pi / lam + np.stack([lat.dx(a0, 1), lat.dx(a0, 2)]) + bracket(lat, a, a0)
    f12 = field_strength_12(lat, a)
    # F_21 drives Pi_1 through A_2, F_12 drives Pi_2 through A_1
    fji = np.stack([-f12, f12])
    aj = a[::-1]
    dpi = -act(a0, pi) + lam * (np.stack([lat.dx(-f12, 2), lat.dx(f12, 1)])
                                + act(aj, fji) + lat.lap3(a))
    pda = divfree_project(lat, da)
    pdpi = divfree_project(lat, dpi)
    lat.zero_boundary(pda)
    lat.zero_boundary(pdpi)
    if return_raw:
        return pda, pdpi, da, dpi
    return pda, pdpi


def gauge_config(lat: LatticeSpec, state: AxialState, rep: str = "coadjoint",
                 with_time: bool = True) -> GaugeConfig:
    """Full four-potential view of an axial state (A_3 = 0, d_0 A_0 = 0)."""
    a0 = _need_a0(state)
    link = lat.zeros(link=True)
    dta = None
    if with_time:
        da, _ = time_derivatives(lat, state, rep)
        dta = (np.zeros_like(a0), da[0], da[1], link)
    return GaugeConfig((a0, state.a[0], state.a[1], link), dta)


# ---------------------------------------------------------------------------
# fused right-hand side


def _grad_list(lat: LatticeSpec, f: np.ndarray) -> list:
    return [lat.dX_(f, n) for n in range(lat.D)]


def _c(f: np.ndarray, *idx) -> np.ndarray:
    """Leading-index view helper: _c(a, i, m) == a[i, m]."""
    return f[idx]


def fast_rhs(lat: LatticeSpec, a: np.ndarray, pi: np.ndarray, rep: str = "coadjoint"):
    """A_0 solve plus Hamilton's equations with shared inner gradients.

    Computes the same quantities as :func:`solve_a0` followed by
    :func:`time_derivatives` (agreement to rounding is tested) while
    reusing the inner gradients of A and A_0 and avoiding temporaries.
    Returns ``(da, dpi, a0)``.
    """
    D, lam = lat.D, lat.lam
    ga = _grad_list(lat, a)                      # ga[n][i, m] = d_n A_i^m
    # F_12
    f12 = lat.dx(a[1], 1)
    f12 -= lat.dx(a[0], 2)
    for n in range(D):
        f12 += a[0, n] * ga[n][1]
        f12 -= a[1, n] * ga[n][0]
    # Gauss source
    g = lat.dx(pi[0], 1)
    g += lat.dx(pi[1], 2)
    if rep == "coadjoint":
        for n in range(D):
            g += lat.dX_(a[0, n] * pi[0] + a[1, n] * pi[1], n)
        for m in range(D):
            for i in range(2):
                for l in range(D):
                    g[m] += pi[i, l] * ga[m][i, l]
    elif rep == "adjoint":
        gp = _grad_list(lat, pi)
        for i in range(2):
            for n in range(D):
                g += a[i, n] * gp[n][i]
                g -= pi[i, n] * ga[n][i]
    else:
        raise LatticeError(f"unknown representation {rep!r}")
    a0 = solve_dirichlet(lat, divfree_project(lat, g))
    a0 /= lam
    g0 = _grad_list(lat, a0)
    out = np.empty((2,) + a.shape)
    da, dpi = out[0], out[1]
    # dA_i = Pi_i/lam + d_i A_0 + [A_i, A_0]
    np.multiply(pi, 1.0 / lam, out=da)
    da[0] += lat.dx(a0, 1)
    da[1] += lat.dx(a0, 2)
    for n in range(D):
        for i in range(2):
            da[i] += a[i, n] * g0[n]
        da -= a0[n] * ga[n]
    # dPi_i = -act(A_0, Pi_i) + lam (d_j F_ji + act(A_j, F_ji)) + lam d3^2 A_i
    fji = np.empty_like(a)
    np.negative(f12, out=fji[0])
    fji[1] = f12
    dpi[...] = lat.lap3(a)
    dpi[0] -= lat.dx(f12, 2)
    dpi[1] += lat.dx(f12, 1)
    dpi *= lam
    if rep == "coadjoint":
        for n in range(D):
            prod = a[::-1, n, None] * fji
            prod *= lam
            prod -= a0[n] * pi
            dpi += lat.dX_(prod, n)
        for m in range(D):
            for l in range(D):
                dpi[:, m] -= pi[:, l] * g0[m][l]
                dpi[0, m] += lam * fji[0, l] * ga[m][1, l]
                dpi[1, m] += lam * fji[1, l] * ga[m][0, l]
    else:
        gp = _grad_list(lat, pi)
        gf = _grad_list(lat, fji)
        for n in range(D):
            dpi -= a0[n] * gp[n]
            dpi += pi[:, n:n + 1] * g0[n]
            dpi[0] += lam * (a[1, n] * gf[n][0] - fji[0, n] * ga[n][1])
            dpi[1] += lam * (a[0, n] * gf[n][1] - fji[1, n] * ga[n][0])
    out = divfree_project(lat, out)
    lat.zero_boundary(out)
    return out[0], out[1], a0


# ---------------------------------------------------------------------------
# time integration


def _rhs(lat, a, pi, t, rep):
    da, dpi, _ = fast_rhs(lat, a, pi, rep)
    return da, dpi


def step(lat: LatticeSpec, state: AxialState, scheme: str = "rk4", rep: str = "coadjoint",
         dt: Optional[float] = None, tol: float = 1e-12, max_iter: int = 50) -> AxialState:
    """Advance by one step; A_0 is re-solved at every stage and at the end."""
    h = lat.dt if dt is None else dt
    a, pi, t = state.a, state.pi, state.t
    if scheme == "rk4":
        k1a, k1p = _rhs(lat, a, pi, t, rep)
        k2a, k2p = _rhs(lat, a + 0.5 * h * k1a, pi + 0.5 * h * k1p, t + 0.5 * h, rep)
        k3a, k3p = _rhs(lat, a + 0.5 * h * k2a, pi + 0.5 * h * k2p, t + 0.5 * h, rep)
        k4a, k4p = _rhs(lat, a + h * k3a, pi + h * k3p, t + h, rep)
        na = a + (h / 6.0) * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
        npi = pi + (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
    elif scheme == "midpoint":
        ka, kp = _rhs(lat, a, pi, t, rep)
        scale = max(float(np.abs(a).max() + np.abs(pi).max()), 1e-300)
        for it in range(1, max_iter + 1):
            ma, mp = a + 0.5 * h * ka, pi + 0.5 * h * kp
            na_k, np_k = _rhs(lat, ma, mp, t + 0.5 * h, rep)
            change = float(max(np.abs(na_k - ka).max(), np.abs(np_k - kp).max())) * h
            ka, kp = na_k, np_k
            if change <= tol * scale:
                break
        else:
            raise IntegrationError(f"implicit midpoint did not converge in {max_iter} iterations",
                                   max_iter)
        na, npi = a + h * ka, pi + h * kp
    else:
        raise LatticeError(f"unknown scheme {scheme!r}")
    return with_a0(lat, AxialState(na, npi, t + h), rep)


def evolve(lat: LatticeSpec, state: AxialState, steps: int, scheme: str = "rk4",
           rep: str = "coadjoint", callback: Optional[Callable] = None) -> AxialState:
    """Take ``steps`` steps; ``callback(n, state)`` runs after each one."""
    if state.a0 is None:
        state = with_a0(lat, state, rep)
    for n in range(1, steps + 1):
        state = step(lat, state, scheme, rep)
        if callback is not None:
            callback(n, state)
    return state


# ---------------------------------------------------------------------------
# Poisson-bracket oracle


def _interior_points(lat: LatticeSpec):
    D = lat.D
    for idx in np.ndindex((2, D) + lat.shape):
        n3 = idx[4]
        if 0 < n3 < lat.n3 - 1:
            yield idx


def _eval(F, lat, state, rep):
    val = F(lat, with_a0(lat, state, rep))
    return np.asarray(val, dtype=float)


def functional_gradient(lat: LatticeSpec, F: Callable, state: AxialState,
                        points: Optional[Sequence] = None, eps: float = 1e-6,
                        rep: str = "coadjoint"):
    """Constrained gradients of ``F`` with respect to A and Pi at ``points``.

    ``F(lat, state)`` may return a number or a density array; in the latter
    case the two perturbed evaluations are subtracted before summation,
    which keeps cancellation error proportional to the local change.  The
    perturbation at site ``s`` is along ``P e_s`` so the perturbed state
    stays divergence free; A_0 is re-solved for every evaluation.
    ``eps`` is relative to the field scale (max |A|, |Pi|, or 1).

    Returns arrays ``(g_a, g_pi)`` shaped like ``state.a`` holding
    ``dF/d(field at s)`` at the requested points and zero elsewhere.
    """
    pts = list(_interior_points(lat)) if points is None else [tuple(p) for p in points]
    scale = max(float(np.abs(state.a).max()), float(np.abs(state.pi).max()), 1.0)
    h = eps * scale
    ga = np.zeros(state.a.shape)
    gp = np.zeros(state.pi.shape)
    for which, g in (("a", ga), ("pi", gp)):
        base = np.array(getattr(state, which))
        for p in pts:
            e = np.zeros(lat.vshape)
            e[p[1:]] = 1.0
            d = np.zeros_like(base)
            d[p[0]] = divfree_project(lat, e)
            lat.zero_boundary(d)
            plus = _eval(F, lat, state.replace(**{which: base + h * d, "a0": None}), rep)
            minus = _eval(F, lat, state.replace(**{which: base - h * d, "a0": None}), rep)
            g[p] = float(np.sum(plus - minus)) / (2.0 * h)
    return ga, gp


def poisson_bracket(lat: LatticeSpec, F1, F2, state: AxialState,
                    points: Optional[Sequence] = None, eps: float = 1e-6,
                    rep: str = "coadjoint") -> float:
    """``{F1, F2} = (1/Lambda) sum_s (dF1/dA dF2/dPi - dF1/dPi dF2/dA) / w``.

    ``w`` is the site weight (cell volume times Lambda^D dX^D).  Each
    argument is a functional or a precomputed ``(g_a, g_pi)`` pair.  With
    ``points`` the sum runs over those sites only, which equals the full
    bracket when one functional is localized there.  With this sign
    ``d_0 O = {O, H}``.
    """
    def grad(F):
        if isinstance(F, tuple):
            return F
        return functional_gradient(lat, F, state, points, eps, rep)

    a1, p1 = grad(F1)
    a2, p2 = grad(F2)
    return float(np.sum(a1 * p2 - p1 * a2)) / (lat.lam * lat.weight)


def hamiltonian_functional(lat: LatticeSpec, state: AxialState) -> np.ndarray:
    """H as a density array, for use with the Poisson-bracket oracle."""
    return hamiltonian_density(lat, state) * lat.cell_volume
