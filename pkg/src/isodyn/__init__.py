"""Isometrodynamics field dynamics on a lattice.

Gauge fields of volume-preserving inner diffeomorphisms, sampled on a
spatial grid times a periodic inner torus, with the Lagrangian identities,
axial-gauge Hamiltonian evolution and minimally coupled scalar matter.
"""
from .lattice import LatticeError, LatticeSpec, divfree_project, random_bandlimited
from .fields import FieldStrength, GaugeConfig
from .algebra import bracket, coadjoint, parse_map, pullback, scale_transform
from .lagrangian import action, bianchi_residual, energy_momentum, field_strength, four_momentum
from .hamiltonian import AxialState, poisson_bracket, time_derivatives, with_a0
from .matter import MatterState, charges, matter_action, matter_step
from .io import load_snapshot, save_snapshot

__version__ = "0.1.0"
