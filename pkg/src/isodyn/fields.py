"""Containers for gauge potentials and field strengths.

Components A_0, A_1, A_2 and every field living on x3 nodes have the node
shape ``(D, n1, n2, n3, K..K)``.  A_3 and the strengths F_03, F_13, F_23 are
first differences along x3 and live on the ``n3 - 1`` links.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .lattice import LatticeError, LatticeSpec

PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))

# mostly-plus metric
ETA = (-1.0, 1.0, 1.0, 1.0)


def on_link(mu: int) -> bool:
    """A_mu lives on x3 links only for mu = 3."""
    return mu == 3


def pair_on_link(mu: int, nu: int) -> bool:
    return 3 in (mu, nu)


@dataclass
class GaugeConfig:
    """The four potentials A_mu^M, with optional time derivatives.

    ``dta`` supplies d_0 A_mu; it is needed for every quantity involving
    F_0i.  ``None`` means a static configuration.
    """

    a: tuple
    dta: Optional[tuple] = None

    def __post_init__(self):
        if len(self.a) != 4:
            raise LatticeError("GaugeConfig needs four components A_0..A_3")
        self.a = tuple(np.asarray(x, dtype=float) for x in self.a)
        if self.dta is not None:
            if len(self.dta) != 4:
                raise LatticeError("dta needs four components")
            self.dta = tuple(np.asarray(x, dtype=float) for x in self.dta)

    def __getitem__(self, mu: int) -> np.ndarray:
        return self.a[mu]

    def dt(self, mu: int) -> np.ndarray:
        if self.dta is None:
            return np.zeros_like(self.a[mu])
        return self.dta[mu]

    def check(self, lat: LatticeSpec) -> None:
        for mu, comp in enumerate(self.a):
            want = lat.vlink_shape if on_link(mu) else lat.vshape
            if comp.shape != want:
                raise LatticeError(f"A_{mu} has shape {comp.shape}, expected {want}")
        if self.dta is not None:
            for mu, comp in enumerate(self.dta):
                if comp.shape != self.a[mu].shape:
                    raise LatticeError(f"dA_{mu}/dt shape mismatch")

    @classmethod
    def zeros(cls, lat: LatticeSpec) -> "GaugeConfig":
        return cls(tuple(lat.zeros(link=on_link(m)) for m in range(4)))

    @classmethod
    def from_components(cls, lat: LatticeSpec, a: Sequence, dta: Optional[Sequence] = None):
        """Build from a dict or list; missing entries are zero."""
        def fill(src):
            if isinstance(src, dict):
                return tuple(src.get(m, lat.zeros(link=on_link(m))) for m in range(4))
            return tuple(src)
        g = cls(fill(a), None if dta is None else fill(dta))
        g.check(lat)
        return g

    def map(self, fn) -> "GaugeConfig":
        """Apply ``fn`` to every stored array."""
        return GaugeConfig(tuple(fn(x) for x in self.a),
                           None if self.dta is None else tuple(fn(x) for x in self.dta))

    def __add__(self, other: "GaugeConfig") -> "GaugeConfig":
        dta = None
        if self.dta is not None or other.dta is not None:
            dta = tuple(self.dt(m) + other.dt(m) for m in range(4))
        return GaugeConfig(tuple(x + y for x, y in zip(self.a, other.a)), dta)

    def scaled(self, s: float) -> "GaugeConfig":
        return self.map(lambda x: s * x)


class FieldStrength:
    """The six independent components F_mu,nu (mu < nu); antisymmetric access."""

    def __init__(self, comps: dict):
        self._f = {}
        for (mu, nu), val in comps.items():
            if mu < nu:
                self._f[(mu, nu)] = val
            elif mu > nu:
                self._f[(nu, mu)] = -val
            else:
                raise LatticeError("diagonal field-strength component requested")
        missing = [p for p in PAIRS if p not in self._f]
        if missing:
            raise LatticeError(f"missing components {missing}")

    def __getitem__(self, key) -> np.ndarray:
        mu, nu = key
        if mu == nu:
            raise LatticeError("F_mu,mu vanishes identically and is not stored")
        if mu < nu:
            return self._f[(mu, nu)]
        return -self._f[(nu, mu)]

    def items(self):
        return ((p, self._f[p]) for p in PAIRS)

    @staticmethod
    def is_link(mu: int, nu: int) -> bool:
        return pair_on_link(mu, nu)

    def map(self, fn) -> "FieldStrength":
        return FieldStrength({p: fn(v) for p, v in self.items()})

    @classmethod
    def zeros(cls, lat: LatticeSpec) -> "FieldStrength":
        return cls({p: lat.zeros(link=pair_on_link(*p)) for p in PAIRS})
