"""The volume-preserving diffeomorphism algebra and its action on fields.

Algebra elements are inner vector fields ``E^M`` with vanishing inner
divergence.  The bracket is ``[U, V]^M = U^N d_N V^M - V^N d_N U^M``.
Finite transformations come from a small catalog of exactly unimodular
maps of the inner torus (shifts, shears, quarter turns).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fields import FieldStrength, GaugeConfig
from .lattice import LatticeError, LatticeSpec, check_vector


def _comp(lat: LatticeSpec, f: np.ndarray, n: int) -> np.ndarray:
    """Component ``f^n`` of an algebra field (a view)."""
    return f[(Ellipsis, n) + (slice(None),) * (lat.D + 3)]


def _same_support(lat: LatticeSpec, u: np.ndarray, v: np.ndarray):
    """Average node fields onto links when the partner lives on links."""
    lu, lv = lat.is_link(u), lat.is_link(v)
    if lu and not lv:
        v = lat.to_link(v)
    elif lv and not lu:
        u = lat.to_link(u)
    return u, v


def _is_vector(lat: LatticeSpec, v: np.ndarray) -> bool:
    return v.ndim >= lat.D + 4 and v.shape[-(lat.D + 4)] == lat.D


def advect(lat: LatticeSpec, u: np.ndarray, v: np.ndarray, vector: bool | None = None) -> np.ndarray:
    """``u^N d_N v`` for a scalar or algebra-valued ``v``.

    Leading batch axes broadcast.  ``vector`` overrides the shape-based
    guess of whether ``v`` carries a component axis.
    """
    u, v = _same_support(lat, u, v)
    if vector is None:
        vector = _is_vector(lat, v)
    out = None
    for n in range(lat.D):
        un = _comp(lat, u, n)
        if vector:
            un = np.expand_dims(un, -(lat.D + 4))
        term = un * lat.dX_(v, n)
        out = term if out is None else out + term
    return out


def bracket(lat: LatticeSpec, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Lie bracket ``u^N d_N v^M - v^N d_N u^M``."""
    check_vector(lat, u)
    check_vector(lat, v)
    return advect(lat, u, v) - advect(lat, v, u)


lie_bracket = bracket


def coadjoint(lat: LatticeSpec, u: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Coadjoint action ``-ad_u^T p`` with respect to the flat pairing.

    ``d_N(u^N p^M) + p^L d_M u^L``.  Written in conservative form so that
    ``sum(p * bracket(u, v)) == -sum(coadjoint(u, p) * v)`` holds for the
    discrete spectral operators to rounding, whatever the band content.
    """
    u, p = _same_support(lat, u, p)
    out = None
    for n in range(lat.D):
        un = np.expand_dims(_comp(lat, u, n), -(lat.D + 4))
        term = lat.dX_(un * p, n)
        out = term if out is None else out + term
    for m in range(lat.D):
        out = out + _comp(lat, p, m)[(Ellipsis, None) + (slice(None),) * (lat.D + 3)] \
            * lat.grad_inner(_comp(lat, u, m))
    return out


def jacobi(lat: LatticeSpec, e, f, g) -> np.ndarray:
    return (bracket(lat, e, bracket(lat, f, g)) + bracket(lat, f, bracket(lat, g, e))
            + bracket(lat, g, bracket(lat, e, f)))


# ---------------------------------------------------------------------------
# infinitesimal gauge variations


def gauge_vary_scalar(lat: LatticeSpec, psi: np.ndarray, e: np.ndarray) -> np.ndarray:
    """``delta psi = -E^N d_N psi``."""
    return -advect(lat, e, psi, vector=False)


def _dmu(lat: LatticeSpec, f: np.ndarray, mu: int, dtf=None) -> np.ndarray:
    """Partial derivative d_mu of a node field; mu = 3 lands on links."""
    if mu == 0:
        return np.zeros_like(f) if dtf is None else dtf
    if mu in (1, 2):
        return lat.dx(f, mu)
    return lat.dz(f)


def gauge_vary_gauge(lat: LatticeSpec, a: GaugeConfig, e: np.ndarray,
                     dte: np.ndarray | None = None) -> GaugeConfig:
    """``delta A_mu = d_mu E + [A_mu, E]`` for every mu.

    ``dte`` is d_0 E for time-dependent parameters (``None``: static).
    When ``a`` carries time derivatives the varied time derivatives are
    included as well (requires ``d_0^2 E``, taken as zero).
    """
    comps = []
    for mu in range(4):
        comps.append(_dmu(lat, e, mu, dte) + bracket(lat, a[mu], e))
    dta = None
    if a.dta is not None:
        # d_0 of [A_mu, E] = [d_0 A_mu, E] + [A_mu, d_0 E]
        dta = []
        for mu in range(4):
            d = bracket(lat, a.dt(mu), e)
            if dte is not None:
                d = d + bracket(lat, a[mu], dte)
                if mu in (1, 2, 3):
                    d = d + _dmu(lat, dte, mu)
            dta.append(d)
    return GaugeConfig(tuple(comps), None if dta is None else tuple(dta))


def gauge_vary_strength(lat: LatticeSpec, f: FieldStrength, e: np.ndarray) -> FieldStrength:
    """``delta F = F^N d_N E - E^N d_N F`` for each stored pair."""
    return FieldStrength({p: bracket(lat, v, e) for p, v in f.items()})


# ---------------------------------------------------------------------------
# exact unimodular maps of the inner torus


@dataclass(frozen=True)
class VolumePreservingMap:
    """A catalog map X -> X'.

    kinds:
      identity
      shift   params (c_1, ..., c_D): X' = X + c (inner length units)
      shear   params (a, b, fn, amp, mode): X'^a = X^a + amp*fn(2 pi mode X^b / L)
      rot     params (a, b): X'^a = -X^b, X'^b = X^a (quarter turn)
    Axis labels a, b are 1-based.
    """

    kind: str
    params: tuple = ()

    def inverse(self) -> "VolumePreservingMap":
        if self.kind == "identity":
            return self
        if self.kind == "shift":
            return VolumePreservingMap("shift", tuple(-c for c in self.params))
        if self.kind == "shear":
            a, b, fn, amp, mode = self.params
            return VolumePreservingMap("shear", (a, b, fn, -amp, mode))
        if self.kind == "rot":
            a, b = self.params
            return VolumePreservingMap("rot", (b, a))
        raise LatticeError(f"unsupported map {self.kind!r}")

    def __str__(self) -> str:
        if self.kind == "identity":
            return "identity"
        if self.kind == "shift":
            return "shift:" + ",".join(repr(float(c)) for c in self.params)
        if self.kind == "shear":
            a, b, fn, amp, mode = self.params
            return f"shear:{a},{b}:{fn}:{float(amp)!r}:{mode}"
        a, b = self.params
        return f"rot:{a},{b}"


class UnsupportedMap(LatticeError):
    pass


def parse_map(text: str) -> VolumePreservingMap:
    """Parse the catalog grammar.

    ``identity`` | ``shift:c1,c2,...`` | ``shear:a,b:sin|cos[:amp[:mode]]`` |
    ``rot:a,b``
    """
    s = text.strip().strip('"').strip("'")
    if s == "identity":
        return VolumePreservingMap("identity")
    parts = s.split(":")
    try:
        if parts[0] == "shift" and len(parts) == 2:
            return VolumePreservingMap("shift", tuple(float(c) for c in parts[1].split(",")))
        if parts[0] == "shear" and 3 <= len(parts) <= 5:
            a, b = (int(x) for x in parts[1].split(","))
            fn = parts[2]
            if fn not in ("sin", "cos"):
                raise UnsupportedMap(f"shear profile must be sin or cos, got {fn!r}")
            amp = float(parts[3]) if len(parts) > 3 else 1.0
            mode = int(parts[4]) if len(parts) > 4 else 1
            if a == b:
                raise UnsupportedMap("shear axes must differ")
            return VolumePreservingMap("shear", (a, b, fn, amp, mode))
        if parts[0] == "rot" and len(parts) == 2:
            a, b = (int(x) for x in parts[1].split(","))
            if a == b:
                raise UnsupportedMap("rotation axes must differ")
            return VolumePreservingMap("rot", (a, b))
    except ValueError as exc:
        raise UnsupportedMap(f"malformed map {text!r}: {exc}") from None
    raise UnsupportedMap(f"map {text!r} is not in the catalog")


def _check_axes(lat: LatticeSpec, *axes: int) -> None:
    for a in axes:
        if not 1 <= a <= lat.D:
            raise UnsupportedMap(f"inner axis {a} out of range 1..{lat.D}")


def _fourier_shift(lat: LatticeSpec, f: np.ndarray, axis: int, shift) -> np.ndarray:
    """Evaluate ``f(X - shift)`` along one inner axis by trigonometric interpolation.

    ``shift`` may be an array broadcastable against ``f`` with the shifted
    axis of length one (per-line shifts).
    """
    k = lat.inner_wavenumbers
    shp = [1] * f.ndim
    shp[axis] = k.size
    k = k.reshape(shp)
    fh = np.fft.fft(f, axis=axis)
    out = np.fft.ifft(fh * np.exp(-1j * k * shift), axis=axis)
    return np.ascontiguousarray(out.real)


def _shear_profile(lat: LatticeSpec, fn: str, amp: float, mode: int, deriv: bool = False):
    X = np.arange(lat.k_inner) * lat.dX
    w = 2 * np.pi * mode / lat.l_inner
    if fn == "sin":
        return amp * w * np.cos(w * X) if deriv else amp * np.sin(w * X)
    return -amp * w * np.sin(w * X) if deriv else amp * np.cos(w * X)


def _along(lat: LatticeSpec, prof: np.ndarray, b: int, ndim: int) -> np.ndarray:
    shp = [1] * ndim
    shp[lat.axis_X(b - 1)] = prof.size
    return prof.reshape(shp)


def pullback(lat: LatticeSpec, field: np.ndarray, vmap: VolumePreservingMap | str,
             kind: str = "scalar") -> np.ndarray:
    """Active transformation of a field by a catalog map.

    scalar: ``psi'(X') = psi(X)``; vector: ``V'^N(X') = V^M(X) dX'^N/dX^M``.
    Grid values of the new field are obtained by evaluating the old one at
    ``X = map^{-1}(X')``; off-grid evaluation uses trigonometric
    interpolation along the displaced axis.
    """
    if isinstance(vmap, str):
        vmap = parse_map(vmap)
    if kind not in ("scalar", "vector"):
        raise LatticeError("kind must be 'scalar' or 'vector'")
    f = np.asarray(field, dtype=float)
    if vmap.kind == "identity":
        return f.copy()
    if vmap.kind == "shift":
        c = vmap.params
        if len(c) != lat.D:
            raise UnsupportedMap(f"shift needs {lat.D} offsets")
        out = f
        for m, cm in enumerate(c):
            if cm == 0:
                continue
            cells = cm / lat.dX
            if abs(cells - round(cells)) < 1e-12:
                out = np.roll(out, int(round(cells)), axis=lat.axis_X(m))
            else:
                out = _fourier_shift(lat, out, lat.axis_X(m), cm)
        return out if out is not f else f.copy()
    if vmap.kind == "shear":
        a, b, fn, amp, mode = vmap.params
        _check_axes(lat, a, b)
        prof = _along(lat, _shear_profile(lat, fn, amp, mode), b, f.ndim)
        out = _fourier_shift(lat, f, lat.axis_X(a - 1), prof)
        if kind == "vector":
            dprof = _along(lat, _shear_profile(lat, fn, amp, mode, deriv=True), b, f.ndim - 1)
            out[(Ellipsis, a - 1) + (slice(None),) * (lat.D + 3)] += \
                dprof * _comp(lat, out, b - 1)
        return out
    if vmap.kind == "rot":
        a, b = vmap.params
        _check_axes(lat, a, b)
        ax_a, ax_b = lat.axis_X(a - 1), lat.axis_X(b - 1)
        # psi'(Y) = psi(X) with X^a = Y^b, X^b = -Y^a
        g = np.swapaxes(f, ax_a, ax_b)
        idx = (-np.arange(lat.k_inner)) % lat.k_inner
        out = np.ascontiguousarray(np.take(g, idx, axis=ax_a))
        if kind == "vector":
            va = _comp(lat, out, a - 1).copy()
            vb = _comp(lat, out, b - 1).copy()
            out[(Ellipsis, a - 1) + (slice(None),) * (lat.D + 3)] = -vb
            out[(Ellipsis, b - 1) + (slice(None),) * (lat.D + 3)] = va
        return out
    raise UnsupportedMap(f"unsupported map {vmap.kind!r}")


def pullback_gauge(lat: LatticeSpec, a: GaugeConfig, vmap) -> GaugeConfig:
    """Pull back every potential (x-constant map: no inhomogeneous term)."""
    return a.map(lambda x: pullback(lat, x, vmap, "vector"))


def pullback_strength(lat: LatticeSpec, f: FieldStrength, vmap) -> FieldStrength:
    return f.map(lambda x: pullback(lat, x, vmap, "vector"))


# ---------------------------------------------------------------------------
# inner rescaling


def scale_transform(lat: LatticeSpec, fields, rho: float):
    """Rescale X -> rho X together with every algebra-valued field.

    Returns ``(new_lattice, new_fields)``; ``fields`` may be an array, a
    GaugeConfig, a FieldStrength or a tuple of those.  Grid values are
    reused at the stretched coordinates, so no interpolation occurs.
    """
    if not (rho > 0 and math.isfinite(rho)):
        raise LatticeError("rho must be a positive finite number")
    new_lat = lat.replace(l_inner=lat.l_inner * rho)

    def scale(obj):
        if isinstance(obj, (GaugeConfig, FieldStrength)):
            return obj.map(lambda x: rho * x)
        if isinstance(obj, tuple):
            return tuple(scale(o) for o in obj)
        return rho * np.asarray(obj, dtype=float)

    return new_lat, scale(fields)

