"""Grid geometry, derivative operators and inner-space measure.

Array layout
------------
A scalar field sampled on the lattice has shape ``(n1, n2, n3, K, ..., K)``
with ``D`` trailing inner axes of length ``K``.  An algebra (inner vector)
field carries one extra leading axis of length ``D`` for the component
index ``M``.  Any further leading axes are treated as batch axes, so every
operator here indexes grid axes from the end.

Axes x1, x2 and all inner axes are periodic and differentiated spectrally.
Axis x3 holds ``n3`` nodes including the two Dirichlet boundary planes
(``x3 = 0`` and ``x3 = l3``) where node fields vanish.  First differences
along x3 live on the ``n3 - 1`` links between nodes ("staggered" storage);
the node -> link -> node composition is the usual three-point Laplacian.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np
import scipy.fft
from scipy.special import gamma


def workers() -> int:
    """Worker cap from ISODYN_THREADS (default 1)."""
    try:
        return max(1, int(os.environ.get("ISODYN_THREADS", "1")))
    except ValueError:
        return 1


class LatticeError(ValueError):
    """Raised when a lattice or field violates its contract."""


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def spectral_diff_matrix(n: int, length: float) -> np.ndarray:
    """Dense first-derivative matrix of the periodic Fourier interpolant.

    Built by differentiating the identity through the FFT, so applying the
    matrix reproduces FFT differentiation exactly (Nyquist mode dropped).
    """
    if n == 1:
        return np.zeros((1, 1))
    k = np.fft.fftfreq(n, d=1.0 / n) * (2.0 * np.pi / length)
    if n % 2 == 0:
        k[n // 2] = 0.0
    eye = np.eye(n)
    mat = np.real(np.fft.ifft(1j * k[:, None] * np.fft.fft(eye, axis=0), axis=0))
    return np.ascontiguousarray(mat)


def _apply_along(mat: np.ndarray, f: np.ndarray, axis: int) -> np.ndarray:
    axis %= f.ndim
    f = np.ascontiguousarray(f)
    n = f.shape[axis]
    post = math.prod(f.shape[axis + 1:])
    if post == 1:
        return (f.reshape(-1, n) @ mat.T).reshape(f.shape)
    pre = math.prod(f.shape[:axis])
    return np.matmul(mat, f.reshape(pre, n, post)).reshape(f.shape)


@dataclass(frozen=True)
class LatticeSpec:
    """Discretization contract for fields on (x1, x2, x3) x inner torus.

    ``n3`` counts x3 nodes including both boundary planes, so the x3
    spacing is ``l3 / (n3 - 1)``.
    """

    n1: int = 16
    n2: int = 16
    n3: int = 17
    l1: float = 2 * np.pi
    l2: float = 2 * np.pi
    l3: float = 2 * np.pi
    d_inner: int = 2
    k_inner: int = 16
    l_inner: float = 2 * np.pi
    lam: float = 1.0
    dt: float = 1e-3

    def __post_init__(self):
        for name in ("n1", "n2", "n3", "k_inner", "d_inner"):
            if int(getattr(self, name)) < 1:
                raise LatticeError(f"{name} must be >= 1")
        if self.n3 < 3:
            raise LatticeError("n3 must be >= 3 (two boundary planes and an interior)")
        for name in ("n1", "n2", "k_inner"):
            if not _is_pow2(getattr(self, name)):
                raise LatticeError(f"{name} must be a power of two for periodic axes")
        for name in ("l1", "l2", "l3", "l_inner"):
            if not getattr(self, name) > 0:
                raise LatticeError(f"{name} must be positive")
        if not self.lam > 0:
            raise LatticeError("lambda must be positive")
        if not self.dt > 0:
            raise LatticeError("dt must be positive")

    def replace(self, **changes) -> "LatticeSpec":
        return replace(self, **changes)

    # geometry -----------------------------------------------------------
    @property
    def D(self) -> int:
        return self.d_inner

    @property
    def h1(self) -> float:
        return self.l1 / self.n1

    @property
    def h2(self) -> float:
        return self.l2 / self.n2

    @property
    def h3(self) -> float:
        return self.l3 / (self.n3 - 1)

    @property
    def dX(self) -> float:
        return self.l_inner / self.k_inner

    @property
    def inner_shape(self) -> tuple:
        return (self.k_inner,) * self.d_inner

    @property
    def shape(self) -> tuple:
        """Shape of a scalar node field."""
        return (self.n1, self.n2, self.n3) + self.inner_shape

    @property
    def link_shape(self) -> tuple:
        """Shape of a scalar field living on x3 links."""
        return (self.n1, self.n2, self.n3 - 1) + self.inner_shape

    @property
    def vshape(self) -> tuple:
        return (self.d_inner,) + self.shape

    @property
    def vlink_shape(self) -> tuple:
        return (self.d_inner,) + self.link_shape

    @property
    def cell_volume(self) -> float:
        return self.h1 * self.h2 * self.h3

    @property
    def inner_weight(self) -> float:
        """Discrete version of the dimensionless measure Lambda^D d^D X."""
        return (self.lam * self.dX) ** self.d_inner

    @property
    def weight(self) -> float:
        """Full quadrature weight of one site (spatial cell x inner cell)."""
        return self.cell_volume * self.inner_weight

    def axis_x(self, i: int) -> int:
        """Negative axis index of spatial axis x^i (i = 1, 2, 3)."""
        return -(self.d_inner + 4 - i)

    def axis_X(self, m: int) -> int:
        """Negative axis index of inner axis X^m (m = 0..D-1)."""
        return -(self.d_inner - m)

    def coords(self):
        """Node coordinates (x1, x2, x3, [X^1..X^D]) as 1-D arrays."""
        x1 = np.arange(self.n1) * self.h1
        x2 = np.arange(self.n2) * self.h2
        x3 = np.arange(self.n3) * self.h3
        X = np.arange(self.k_inner) * self.dX
        return x1, x2, x3, X

    def mesh(self, link: bool = False):
        """Broadcastable coordinate arrays for every grid axis."""
        x1, x2, x3, X = self.coords()
        if link:
            x3 = (np.arange(self.n3 - 1) + 0.5) * self.h3
        axes = [x1, x2, x3] + [X] * self.d_inner
        nd = len(axes)
        out = []
        for a, vals in enumerate(axes):
            shp = [1] * nd
            shp[a] = vals.size
            out.append(vals.reshape(shp))
        return out

    def zeros(self, vector: bool = True, link: bool = False) -> np.ndarray:
        shp = self.link_shape if link else self.shape
        if vector:
            shp = (self.d_inner,) + shp
        return np.zeros(shp)

    # derivative operators ------------------------------------------------
    @cached_property
    def _mat_x1(self):
        return spectral_diff_matrix(self.n1, self.l1)

    @cached_property
    def _mat_x2(self):
        return spectral_diff_matrix(self.n2, self.l2)

    @cached_property
    def _mat_X(self):
        return spectral_diff_matrix(self.k_inner, self.l_inner)

    @cached_property
    def inner_wavenumbers(self) -> np.ndarray:
        """Wavenumbers seen by the spectral derivative (Nyquist -> 0)."""
        k = np.fft.fftfreq(self.k_inner, d=1.0 / self.k_inner) * (2 * np.pi / self.l_inner)
        if self.k_inner % 2 == 0:
            k[self.k_inner // 2] = 0.0
        return k

    @cached_property
    def _inv_lap_symbol(self) -> np.ndarray:
        k = self.inner_wavenumbers
        kr = k[: self.k_inner // 2 + 1] if self.k_inner > 1 else k
        if self.k_inner % 2 == 0 and self.k_inner > 1:
            kr = kr.copy()
            kr[-1] = 0.0
        grids = np.meshgrid(*([k] * (self.d_inner - 1) + [kr]), indexing="ij")
        k2 = sum(g ** 2 for g in grids)
        with np.errstate(divide="ignore"):
            sym = np.where(k2 > 0, -1.0 / np.where(k2 > 0, k2, 1.0), 0.0)
        return sym

    def dx(self, f: np.ndarray, i: int) -> np.ndarray:
        """Spectral derivative along periodic spatial axis x^i, i in {1, 2}."""
        if i == 1:
            return _apply_along(self._mat_x1, f, self.axis_x(1))
        if i == 2:
            return _apply_along(self._mat_x2, f, self.axis_x(2))
        raise LatticeError("dx handles the periodic axes 1 and 2; use dz for x3")

    def dX_(self, f: np.ndarray, m: int) -> np.ndarray:
        """Spectral derivative along inner axis X^(m+1)."""
        return _apply_along(self._mat_X, f, self.axis_X(m))

    def grad_inner(self, f: np.ndarray) -> np.ndarray:
        """Stack of inner derivatives; ``out[..., N, grid] = d_N f[..., grid]``."""
        nd = self.d_inner + 3
        return np.stack([self.dX_(f, m) for m in range(self.d_inner)], axis=-nd - 1)

    def dz(self, f: np.ndarray) -> np.ndarray:
        """Forward difference along x3: node field -> link field."""
        ax = self.axis_x(3)
        return np.diff(f, axis=ax) / self.h3

    def dz_back(self, g: np.ndarray) -> np.ndarray:
        """Backward difference along x3: link field -> node field.

        Defined on interior nodes; boundary nodes are set to zero.  Equals
        minus the transpose of :meth:`dz` on interior nodes.
        """
        ax = self.axis_x(3) % g.ndim
        out = np.zeros(g.shape[:ax] + (g.shape[ax] + 1,) + g.shape[ax + 1:])
        idx = [slice(None)] * g.ndim
        idx[ax] = slice(1, -1)
        out[tuple(idx)] = np.diff(g, axis=ax) / self.h3
        return out

    def lap3(self, f: np.ndarray) -> np.ndarray:
        """Three-point second difference along x3 with Dirichlet boundaries."""
        return self.dz_back(self.dz(f))

    def to_link(self, f: np.ndarray) -> np.ndarray:
        """Average neighbouring nodes onto the link between them."""
        ax = self.axis_x(3) % f.ndim
        lo = [slice(None)] * f.ndim
        hi = [slice(None)] * f.ndim
        lo[ax] = slice(None, -1)
        hi[ax] = slice(1, None)
        return 0.5 * (f[tuple(lo)] + f[tuple(hi)])

    def to_node(self, g: np.ndarray) -> np.ndarray:
        """Half-sum of the adjacent links onto each node (zero-padded).

        This is the transpose of :meth:`to_link`; the node sum of
        ``to_node(g)`` equals the link sum of ``g``.
        """
        ax = self.axis_x(3) % g.ndim
        pad = [(0, 0)] * g.ndim
        pad[ax] = (1, 1)
        gp = np.pad(g, pad)
        lo = [slice(None)] * g.ndim
        hi = [slice(None)] * g.ndim
        lo[ax] = slice(None, -1)
        hi[ax] = slice(1, None)
        return 0.5 * (gp[tuple(lo)] + gp[tuple(hi)])

    def is_link(self, f: np.ndarray) -> bool:
        return f.shape[self.axis_x(3)] == self.n3 - 1

    @cached_property
    def _lap_eigen(self):
        """Orthonormal eigenbasis of the 1-D second-derivative matrix and the
        pseudo-inverse symbol of the inner Laplacian in the product basis."""
        d2 = self._mat_X @ self._mat_X
        lam, q = np.linalg.eigh(0.5 * (d2 + d2.T))
        tot = np.zeros(self.inner_shape)
        for m in range(self.d_inner):
            shp = [1] * self.d_inner
            shp[m] = self.k_inner
            tot = tot + lam.reshape(shp)
        tol = 1e-9 * max(float(np.abs(lam).max()), 1.0)
        sym = np.where(np.abs(tot) > tol, 1.0 / np.where(np.abs(tot) > tol, tot, 1.0), 0.0)
        return np.ascontiguousarray(q), np.ascontiguousarray(q.T), sym

    def inv_laplacian_inner(self, f: np.ndarray) -> np.ndarray:
        """Pseudo-inverse of the inner spectral Laplacian (zero mode dropped).

        The Laplacian built from the spectral derivative matrices is
        diagonalized by a real orthonormal basis per axis, so the inverse
        costs two small dense products per inner axis.
        """
        q, qt, sym = self._lap_eigen
        g = f
        for m in range(self.d_inner):
            g = _apply_along(qt, g, self.axis_X(m))
        g = g * sym
        for m in range(self.d_inner):
            g = _apply_along(q, g, self.axis_X(m))
        return g

    def inv_laplacian_inner_fft(self, f: np.ndarray) -> np.ndarray:
        """FFT version of :meth:`inv_laplacian_inner` (reference)."""
        axes = tuple(range(-self.d_inner, 0))
        fh = scipy.fft.rfftn(f, axes=axes, workers=workers())
        fh *= self._inv_lap_symbol
        return scipy.fft.irfftn(fh, s=self.inner_shape, axes=axes, workers=workers())

    def zero_boundary(self, f: np.ndarray) -> np.ndarray:
        """Zero a node field on the x3 boundary planes (in place)."""
        ax = self.axis_x(3) % f.ndim
        idx = [slice(None)] * f.ndim
        idx[ax] = 0
        f[tuple(idx)] = 0.0
        idx[ax] = -1
        f[tuple(idx)] = 0.0
        return f


# ---------------------------------------------------------------------------
# module-level operations on fields


def check_vector(lat: LatticeSpec, f: np.ndarray) -> None:
    if f.shape[-(lat.D + 4):] not in (lat.vshape, lat.vlink_shape):
        raise LatticeError(f"algebra field shape {f.shape} does not match lattice {lat.vshape}")


def inner_divergence(lat: LatticeSpec, f: np.ndarray) -> np.ndarray:
    """Spectral inner divergence d_M f^M of an algebra field."""
    check_vector(lat, f)
    comp = -(lat.D + 4)
    out = lat.dX_(np.take(f, 0, axis=comp), 0)
    for m in range(1, lat.D):
        out = out + lat.dX_(np.take(f, m, axis=comp), m)
    return out


def inner_gradient(lat: LatticeSpec, phi: np.ndarray) -> np.ndarray:
    """Inner gradient of a scalar field, returned as an algebra-shaped array."""
    return lat.grad_inner(phi)


def divfree_project(lat: LatticeSpec, f: np.ndarray) -> np.ndarray:
    """Transverse part of ``f`` per inner Fourier mode; the zero mode passes.

    Implemented as ``f - grad(lap^+ div f)`` with the same spectral
    operators used everywhere else, so the output is divergence free
    under :func:`inner_divergence` to rounding.
    """
    phi = lat.inv_laplacian_inner(inner_divergence(lat, f))
    return f - lat.grad_inner(phi)


def inner_integral(lat: LatticeSpec, f: np.ndarray) -> np.ndarray:
    """``Lambda^D dX^D sum_X f`` at every spatial point."""
    axes = tuple(range(-lat.D, 0))
    return lat.inner_weight * f.sum(axis=axes)


def spatial_sum(lat: LatticeSpec, density: np.ndarray) -> float:
    """Integrate a node density over space (trapezoid in x3)."""
    return float(density.sum() * lat.cell_volume)


def l2(lat: LatticeSpec, f: np.ndarray) -> float:
    """Discrete L2 norm with the full site measure."""
    return math.sqrt(float(np.sum(f * f)) * lat.weight)


def rel_l2(lat: LatticeSpec, f: np.ndarray, ref: np.ndarray) -> float:
    n = l2(lat, ref)
    return l2(lat, f) / n if n > 0 else l2(lat, f)


def omega_d(d: int) -> float:
    """Sphere-surface factor 2 pi^(d/2) / ((2 pi)^d Gamma(d/2))."""
    if int(d) != d or d < 1:
        raise ValueError("omega_d requires a positive integer dimension")
    return 2.0 * math.pi ** (d / 2) / ((2 * math.pi) ** d * gamma(d / 2))


def _check_max_mode(lat: LatticeSpec, max_mode: int) -> None:
    limits = {"x1": lat.n1 // 2, "x2": lat.n2 // 2, "inner": lat.k_inner // 2, "x3": lat.n3 - 1}
    for axis, nyq in limits.items():
        if not 0 <= max_mode < nyq:
            raise LatticeError(
                f"max_mode={max_mode} must lie below the Nyquist limit {nyq} on axis {axis}"
            )


def random_bandlimited(seed, lat: LatticeSpec, max_mode: int = 2, amplitude: float = 1.0,
                       vector: bool = True, project: bool = True) -> np.ndarray:
    """Deterministic random field with Fourier support ``<= max_mode``.

    Periodic axes carry modes ``|k| <= max_mode``; the x3 profile is a sum
    of Dirichlet sine modes ``sin(j pi x3 / l3)``, ``1 <= j <= max_mode``,
    so the field vanishes on both boundary planes.  The result is scaled to
    RMS ``amplitude`` and, for vector fields, projected divergence free.
    """
    _check_max_mode(lat, max_mode)
    rng = np.random.default_rng(seed)
    ncomp = lat.D if vector else 1
    per_shape = (lat.n1, lat.n2) + lat.inner_shape
    per_axes = tuple(range(-(lat.D + 2), 0))
    masks = []
    for n in per_shape:
        k = np.fft.fftfreq(n, d=1.0 / n)
        masks.append(np.abs(k) <= max_mode)
    mask = masks[0]
    for m in masks[1:]:
        mask = np.multiply.outer(mask, m)
    _, _, x3, _ = lat.coords()
    out = np.zeros((ncomp,) + lat.shape)
    for c in range(ncomp):
        for j in range(1, max(max_mode, 1) + 1):
            spec = rng.standard_normal(per_shape) + 1j * rng.standard_normal(per_shape)
            spec *= mask
            field = np.real(np.fft.ifftn(spec, axes=per_axes))
            prof = np.sin(j * np.pi * x3 / lat.l3)
            out[c] += np.expand_dims(field, 2) * prof.reshape((1, 1, -1) + (1,) * lat.D)
    lat.zero_boundary(out)
    if vector and project:
        out = divfree_project(lat, out)
        lat.zero_boundary(out)
    rms = math.sqrt(float(np.mean(out * out)))
    if amplitude == 0 or rms == 0:
        out[...] = 0.0
    else:
        out *= amplitude / rms
    return out if vector else out[0]
