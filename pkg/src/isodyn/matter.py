"""Scalar matter minimally coupled to a frozen gauge background.

The density as printed is ``1/2 d^mu psi d_mu psi + 1/2 m^2 psi^2`` with
eta = diag(-1, 1, 1, 1).  The ``conventional`` tag multiplies it by -1,
which gives the familiar positive-energy scalar.  Both produce the same
field equation; energies, momenta and charges flip sign.

Derivatives become covariant, ``D_mu psi = d_mu psi + A_mu^M d_M psi``,
when a background is supplied.  Evolution is quenched: the background
does not respond to the matter.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .algebra import advect
from .fields import GaugeConfig
from .lattice import LatticeError, LatticeSpec, inner_integral

SIGNS = {"as-printed": 1.0, "conventional": -1.0}


def _sign(convention: str) -> float:
    try:
        return SIGNS[convention]
    except KeyError:
        raise LatticeError(f"sign_convention must be one of {sorted(SIGNS)}") from None


@dataclass(frozen=True)
class MatterState:
    """Scalar field, its time derivative, mass and sign convention."""

    psi: np.ndarray
    dpsi: np.ndarray
    mass: float = 0.0
    sign_convention: str = "as-printed"
    t: float = 0.0

    def __post_init__(self):
        if self.mass < 0:
            raise LatticeError("mass must be non-negative")
        _sign(self.sign_convention)
        if np.shape(self.psi) != np.shape(self.dpsi):
            raise LatticeError("psi and dpsi must have the same shape")

    def replace(self, **kw) -> "MatterState":
        return replace(self, **kw)


def _adv(lat, u, f):
    return advect(lat, u, f, vector=False)


def _a(a: Optional[GaugeConfig], mu: int):
    return None if a is None else a[mu]


def cov_derivs(lat: LatticeSpec, psi: np.ndarray, dpsi: np.ndarray,
               a: Optional[GaugeConfig] = None) -> list:
    """[D_0 psi, D_1 psi, D_2 psi, D_3 psi]; D_3 psi lives on x3 links."""
    out = [dpsi.copy(), lat.dx(psi, 1), lat.dx(psi, 2), lat.dz(psi)]
    if a is not None:
        for mu in range(4):
            out[mu] = out[mu] + _adv(lat, a[mu], psi)
    return out


def matter_density(lat: LatticeSpec, ms: MatterState, a: Optional[GaugeConfig] = None):
    """Lagrangian density integrated over inner space, on the spatial node grid."""
    d = cov_derivs(lat, ms.psi, ms.dpsi, a)
    node = -d[0] ** 2 + d[1] ** 2 + d[2] ** 2 + ms.mass ** 2 * ms.psi ** 2
    dens = 0.5 * (node + lat.to_node(d[3] ** 2))
    return _sign(ms.sign_convention) * inner_integral(lat, dens)


def matter_action(lat: LatticeSpec, ms: MatterState, a: Optional[GaugeConfig] = None) -> float:
    """L_M of the current time slice: spatial sum of the density times the cell volume."""
    return float(matter_density(lat, ms, a).sum() * lat.cell_volume)


def canonical_momentum(lat: LatticeSpec, ms: MatterState, a: Optional[GaugeConfig] = None):
    """p = dL/d(d_0 psi) = -sign * D_0 psi."""
    d0 = ms.dpsi if a is None else ms.dpsi + _adv(lat, a[0], ms.psi)
    return -_sign(ms.sign_convention) * d0


def matter_noether(lat: LatticeSpec, ms: MatterState, a: Optional[GaugeConfig] = None):
    """Current densities J^nu_N = int Lambda^D dL/d(d_nu psi) d_N psi.

    Returns an array ``(4, D, n1, n2, n3)``; the x3 row is brought to nodes.
    """
    s = _sign(ms.sign_convention)
    d = cov_derivs(lat, ms.psi, ms.dpsi, a)
    grad = lat.grad_inner(ms.psi)
    out = np.zeros((4, lat.D) + lat.shape[:3])
    for nu in range(4):
        # dL/d(d_nu psi) = s * eta^nu,nu * D_nu psi
        coef = s * (-1.0 if nu == 0 else 1.0) * d[nu]
        for n in range(lat.D):
            g = grad[n]
            if nu == 3:
                prod = lat.to_node(coef * lat.to_link(g))
            else:
                prod = coef * g
            out[nu, n] = inner_integral(lat, prod)
    return out


def charges(lat: LatticeSpec, ms: MatterState, a: Optional[GaugeConfig] = None) -> np.ndarray:
    """Q_N = spatial sum of J^0_N times the cell volume."""
    j0 = matter_noether(lat, ms, a)[0]
    return j0.reshape(lat.D, -1).sum(axis=1) * lat.cell_volume


def matter_energy(lat: LatticeSpec, ms: MatterState, a: Optional[GaugeConfig] = None) -> float:
    """Canonical energy ``sum p d_0 psi - L``; positive for the conventional sign
    on a null background."""
    p = canonical_momentum(lat, ms, a)
    kin = inner_integral(lat, p * ms.dpsi).sum() * lat.cell_volume
    return float(kin - matter_action(lat, ms, a))


# ---------------------------------------------------------------------------
# quenched evolution


def _matter_rhs(lat, psi, p, mass, a):
    """(d_0 psi, d_0 p) for the conventional momentum p = D_0 psi.

    d_0 p = -m^2 psi - sum_k D_k^T D_k psi; the inner gradient of psi is
    shared by every covariant derivative and all transposed advection
    terms are summed before a single inner divergence.
    """
    d1, d2, d3 = lat.dx(psi, 1), lat.dx(psi, 2), lat.dz(psi)
    dpsi = p.copy()
    if a is not None:
        g = lat.grad_inner(psi)
        gl = lat.to_link(g)
        a0, a1, a2, a3 = a[0], a[1], a[2], a[3]
        for n in range(lat.D):
            d1 += a1[n] * g[n]
            d2 += a2[n] * g[n]
            d3 += a3[n] * gl[n]
            dpsi -= a0[n] * g[n]
    dp = lat.dx(d1, 1) + lat.dx(d2, 2) + lat.dz_back(d3) - mass ** 2 * psi
    if a is not None:
        for n in range(lat.D):
            s = a1[n] * d1 + a2[n] * d2 + lat.to_node(a3[n] * d3) - a0[n] * p
            dp += lat.dX_(s, n)
    lat.zero_boundary(dpsi)
    lat.zero_boundary(dp)
    return dpsi, dp


def matter_step(lat: LatticeSpec, ms: MatterState, a: Optional[GaugeConfig] = None,
                dt: Optional[float] = None) -> MatterState:
    """One rk4 step of the matter field on a frozen background.

    The field equation is the same for either sign convention; internally
    the pair (psi, D_0 psi) is advanced.
    """
    h = lat.dt if dt is None else dt
    psi = ms.psi
    p = ms.dpsi if a is None else ms.dpsi + _adv(lat, a[0], psi)
    m = ms.mass
    k1 = _matter_rhs(lat, psi, p, m, a)
    k2 = _matter_rhs(lat, psi + 0.5 * h * k1[0], p + 0.5 * h * k1[1], m, a)
    k3 = _matter_rhs(lat, psi + 0.5 * h * k2[0], p + 0.5 * h * k2[1], m, a)
    k4 = _matter_rhs(lat, psi + h * k3[0], p + h * k3[1], m, a)
    npsi = psi + (h / 6.0) * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
    np_ = p + (h / 6.0) * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
    ndpsi = np_ if a is None else np_ - _adv(lat, a[0], npsi)
    return ms.replace(psi=npsi, dpsi=ndpsi, t=ms.t + h)


def dispersion(lat: LatticeSpec, k1: int, k2: int, j3: int, mass: float) -> float:
    """Angular frequency of the lattice mode exp(i(k1 x1 + k2 x2)) sin(j3 pi x3 / l3)."""
    w1 = 2 * np.pi * k1 / lat.l1
    w2 = 2 * np.pi * k2 / lat.l2
    lam3 = (2.0 / lat.h3 * np.sin(j3 * np.pi * lat.h3 / (2 * lat.l3))) ** 2
    return float(np.sqrt(w1 ** 2 + w2 ** 2 + lam3 + mass ** 2))


# ---------------------------------------------------------------------------
# numerical Poisson bracket for matter functionals


def matter_poisson_bracket(lat: LatticeSpec, F: Callable, G: Callable, ms: MatterState,
                           points: Sequence, a: Optional[GaugeConfig] = None,
                           eps: float = 1e-6) -> float:
    """``{F, G} = sum_s (dF/dpsi dG/dp - dF/dp dG/dpsi) / w`` over ``points``.

    ``p`` is the canonical momentum of the chosen sign convention.  The
    functionals take ``(lat, ms)``; derivatives are central differences.
    """
    s = _sign(ms.sign_convention)
    p0 = canonical_momentum(lat, ms, a)

    def build(psi, p):
        d0 = -s * p
        dpsi = d0 if a is None else d0 - _adv(lat, a[0], psi)
        return ms.replace(psi=psi, dpsi=dpsi)

    scale = max(float(np.abs(ms.psi).max()), float(np.abs(p0).max()), 1.0)
    h = eps * scale
    tot = 0.0
    for pt in points:
        grads = []
        for fn in (F, G):
            g = []
            for which in ("psi", "p"):
                e = np.zeros(lat.shape)
                e[tuple(pt)] = h
                if which == "psi":
                    up, dn = build(ms.psi + e, p0), build(ms.psi - e, p0)
                else:
                    up, dn = build(ms.psi, p0 + e), build(ms.psi, p0 - e)
                diff = np.asarray(fn(lat, up)) - np.asarray(fn(lat, dn))
                g.append(np.sum(diff) / (2 * h))
            grads.append(g)
        tot += grads[0][0] * grads[1][1] - grads[0][1] * grads[1][0]
    return tot / lat.weight
