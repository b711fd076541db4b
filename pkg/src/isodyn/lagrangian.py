"""Covariant calculus, the regularized Lagrangian and its derived objects.

Inner indices are contracted with the flat metric delta_MN; spacetime
indices use eta = diag(-1, 1, 1, 1).  Node/link placement along x3 follows
:mod:`isodyn.fields`: whenever a product mixes a node field with a link
field the node field is averaged onto the link, and link densities are
brought back to nodes with the transpose average so sums are preserved.
"""
from __future__ import annotations

from typing import Iterable, Optional

import numpy as np

from .algebra import advect, bracket
from .fields import ETA, PAIRS, FieldStrength, GaugeConfig, pair_on_link
from .lattice import LatticeError, LatticeSpec, inner_integral


def partial(lat: LatticeSpec, f: np.ndarray, mu: int, dtf: Optional[np.ndarray] = None):
    """d_mu f.  Along x3 a node field maps to links and a link field to nodes."""
    if mu == 0:
        if dtf is None:
            raise LatticeError("d_0 needs a caller-supplied time derivative")
        return dtf
    if mu in (1, 2):
        return lat.dx(f, mu)
    if mu == 3:
        return lat.dz_back(f) if lat.is_link(f) else lat.dz(f)
    raise LatticeError(f"spacetime index {mu} out of range")


def field_strength(lat: LatticeSpec, a: GaugeConfig) -> FieldStrength:
    """F_mu,nu = d_mu A_nu - d_nu A_mu + [A_mu, A_nu].

    Time derivatives come from ``a.dta`` (zero when absent).
    """
    a.check(lat)
    out = {}
    for mu, nu in PAIRS:
        if mu == 0:
            d_mu_a_nu = a.dt(nu)
        else:
            d_mu_a_nu = partial(lat, a[nu], mu)
        # nu >= 1 here; A_mu is a node field unless mu == 3 (never: mu < nu)
        d_nu_a_mu = partial(lat, a[mu], nu)
        out[(mu, nu)] = d_mu_a_nu - d_nu_a_mu + bracket(lat, a[mu], a[nu])
    return FieldStrength(out)


def strength_time_derivative(lat: LatticeSpec, a: GaugeConfig) -> dict:
    """d_0 F_ij for the spatial pairs, built from ``a.dta`` alone."""
    if a.dta is None:
        raise LatticeError("d_0 F needs time derivatives of the potentials")
    out = {}
    for i, j in ((1, 2), (1, 3), (2, 3)):
        out[(i, j)] = (partial(lat, a.dt(j), i) - partial(lat, a.dt(i), j)
                       + bracket(lat, a.dt(i), a[j]) + bracket(lat, a[i], a.dt(j)))
    return out


def covariant_derivative_scalar(lat: LatticeSpec, psi: np.ndarray, a: GaugeConfig, mu: int,
                                dtpsi: Optional[np.ndarray] = None) -> np.ndarray:
    """D_mu psi = d_mu psi + A_mu^M d_M psi.  mu = 3 returns a link field."""
    if mu == 0 and dtpsi is None:
        raise LatticeError("D_0 psi needs the time derivative of psi")
    return partial(lat, psi, mu, dtpsi) + advect(lat, a[mu], psi, vector=False)


def covariant_derivative_vector(lat: LatticeSpec, v: np.ndarray, a: GaugeConfig, mu: int,
                                dtv: Optional[np.ndarray] = None) -> np.ndarray:
    """(D_mu v)^M = d_mu v^M + A_mu^L d_L v^M - v^N d_N A_mu^M."""
    if mu == 0 and dtv is None:
        raise LatticeError("D_0 v needs the time derivative of v")
    d = partial(lat, v, mu, dtv)
    comm = bracket(lat, a[mu], v)
    if lat.is_link(d) != lat.is_link(comm):
        comm = lat.to_node(comm)
    return d + comm


# ---------------------------------------------------------------------------
# Lagrangian and action


def _sq(f: np.ndarray) -> np.ndarray:
    """Inner-vector contraction F^M F^M (component axis summed)."""
    return np.einsum("m...,m...->...", f, f)


def _dot(lat: LatticeSpec, f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Pointwise F^M G^M as a node density (link products moved to nodes)."""
    lf, lg = lat.is_link(f), lat.is_link(g)
    if lf and lg:
        return lat.to_node(np.einsum("m...,m...->...", f, g))
    if lf:
        f = lat.to_node(f)
    if lg:
        g = lat.to_node(g)
    return np.einsum("m...,m...->...", f, g)


def _ff(lat: LatticeSpec, f: FieldStrength) -> np.ndarray:
    """F_rho,sigma F^rho,sigma summed over all ordered pairs, per grid node."""
    tot = 0.0
    for (mu, nu), v in f.items():
        s = 2.0 * ETA[mu] * ETA[nu] * _sq(v)
        tot = tot + (lat.to_node(s) if pair_on_link(mu, nu) else s)
    return tot


def action_density(lat: LatticeSpec, f: FieldStrength) -> np.ndarray:
    """Lagrangian density -(Lambda^2/4) F.F integrated over inner space.

    Returned on the spatial node grid ``(n1, n2, n3)``.
    """
    return inner_integral(lat, -0.25 * lat.lam ** 2 * _ff(lat, f))


def action(lat: LatticeSpec, f: FieldStrength) -> float:
    """Spatial sum of the density times the cell volume (one time slice)."""
    return float(action_density(lat, f).sum() * lat.cell_volume)


# ---------------------------------------------------------------------------
# field equations, currents, Bianchi identities


def _nu_terms(lat, a, f, nu, dtf, kind):
    out = 0.0
    for mu in range(4):
        if mu == nu:
            continue
        fmn = f[mu, nu]
        if kind == "div":
            if mu == 0:
                d = dtf[(0, nu)] if dtf is not None and (0, nu) in dtf else np.zeros_like(fmn)
            else:
                d = partial(lat, fmn, mu)
            term = d
        elif kind == "current":
            term = bracket(lat, a[mu], fmn)
            if mu == 3 and lat.is_link(fmn):
                term = lat.to_node(term)
        else:
            dtv = None
            if mu == 0:
                dtv = dtf[(0, nu)] if dtf is not None and (0, nu) in dtf else np.zeros_like(fmn)
            term = covariant_derivative_vector(lat, fmn, a, mu, dtv)
        out = out + ETA[mu] * term
    return out


def field_divergence(lat: LatticeSpec, f: FieldStrength, dtf: Optional[dict] = None) -> list:
    """d^mu F_mu,nu for nu = 0..3.  ``dtf[(0, nu)]`` supplies d_0 F_0,nu."""
    return [_nu_terms(lat, None, f, nu, dtf, "div") for nu in range(4)]


def noether_current(lat: LatticeSpec, a: GaugeConfig, f: FieldStrength) -> list:
    """J_nu = A^mu,N d_N F_mu,nu - F_mu,nu^N d_N A^mu  for nu = 0..3."""
    return [_nu_terms(lat, a, f, nu, None, "current") for nu in range(4)]


def eom_residual(lat: LatticeSpec, a: GaugeConfig, f: FieldStrength,
                 dtf: Optional[dict] = None) -> list:
    """D^mu F_mu,nu for nu = 0..3 (zero on solutions of the field equations).

    Without ``dtf`` the configuration is treated as static (d_0 F = 0).
    """
    return [_nu_terms(lat, a, f, nu, dtf, "covariant") for nu in range(4)]


TRIPLES = ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3))


def bianchi_residual(lat: LatticeSpec, a: GaugeConfig, f: FieldStrength,
                     triples: Optional[Iterable] = None) -> dict:
    """D_rho F_mu,nu + cyclic, for each requested triple.

    Triples involving time use d_0 F_ij built from ``a.dta``; without it
    only the purely spatial triple (1, 2, 3) is evaluated by default.
    """
    if triples is None:
        triples = TRIPLES if a.dta is not None else ((1, 2, 3),)
    dtf = strength_time_derivative(lat, a) if a.dta is not None else None
    out = {}
    for rho, mu, nu in triples:
        tot = 0.0
        for r, m, n in ((rho, mu, nu), (mu, nu, rho), (nu, rho, mu)):
            dtv = None
            if r == 0:
                if dtf is None:
                    raise LatticeError("time-containing triple needs a.dta")
                dtv = dtf[(m, n)] if m < n else -dtf[(n, m)]
            tot = tot + covariant_derivative_vector(lat, f[m, n], a, r, dtv)
        out[(rho, mu, nu)] = tot
    return out


# ---------------------------------------------------------------------------
# energy-momentum


def energy_momentum(lat: LatticeSpec, f: FieldStrength, variant: str = "improved",
                    a: Optional[GaugeConfig] = None, rows=range(4)) -> np.ndarray:
    """Theta^mu_nu (improved) or T^mu_nu (canonical) on the spatial node grid.

    Returns an array of shape ``(4, 4, n1, n2, n3)`` indexed ``[mu, nu]``.
    The canonical variant replaces F_nu,rho by d_nu A_rho and therefore
    needs the potentials, including their time derivatives.  ``rows``
    restricts the computation to some values of mu; other rows stay zero.
    """
    if variant not in ("improved", "canonical"):
        raise LatticeError("variant must be 'improved' or 'canonical'")
    if variant == "canonical" and a is None:
        raise LatticeError("canonical energy-momentum needs the gauge configuration")
    ff = _ff(lat, f)
    out = np.zeros((4, 4) + ff.shape[: ff.ndim - lat.D])
    for mu in rows:
        for nu in range(4):
            dens = 0.25 * ff if mu == nu else 0.0
            for rho in range(4):
                if rho == mu:
                    continue
                if variant == "improved":
                    if rho == nu:
                        continue
                    second = f[nu, rho]
                else:
                    second = a.dt(rho) if nu == 0 else partial(lat, a[rho], nu)
                dens = dens - ETA[mu] * ETA[rho] * _dot(lat, f[mu, rho], second)
            out[mu, nu] = inner_integral(lat, lat.lam ** 2 * dens)
    return out


def four_momentum(lat: LatticeSpec, theta: np.ndarray) -> np.ndarray:
    """p_mu = spatial sum of Theta^0_mu times the cell volume."""
    return np.array([theta[0, nu].sum() * lat.cell_volume for nu in range(4)])
