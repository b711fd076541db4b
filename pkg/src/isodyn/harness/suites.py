"""Verification suites shared by ``isodyn check`` and the acceptance tests.

Each suite returns a :class:`SuiteResult`: a list of measured values with
their bounds plus the wall-clock runtime, which is itself checked against
the suite's budget.  Measurements flagged ``gating=False`` are reported for
context and do not affect the verdict.
"""
from __future__ import annotations

import filecmp
import math
import tempfile
import time
import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np
import scipy.fft

from .. import hamiltonian as ham
from ..algebra import bracket, gauge_vary_gauge, gauge_vary_scalar, gauge_vary_strength, scale_transform
from ..fields import PAIRS, GaugeConfig
from ..lagrangian import TRIPLES, action, bianchi_residual, energy_momentum, field_strength, four_momentum
from ..lattice import LatticeSpec, divfree_project, inner_divergence, l2, random_bandlimited
from ..matter import MatterState, canonical_momentum, charges, matter_action, matter_energy, matter_step
from .config import RunConfig, default_config
from .runner import initial_state, run_simulate

EPSILONS = (1e-2, 1e-3, 1e-4)


@dataclass
class Measurement:
    name: str
    value: float
    bound: float
    relation: str = "<="  # one of <=, >=, <
    gating: bool = True

    @property
    def ok(self) -> bool:
        v = self.value
        if not math.isfinite(v):
            return False
        if self.relation == "<=":
            return v <= self.bound
        if self.relation == ">=":
            return v >= self.bound
        return v < self.bound

    def line(self) -> str:
        tag = ("PASS" if self.ok else "FAIL") if self.gating else "info"
        return f"    [{tag}] {self.name} = {self.value:.4g} ({self.relation} {self.bound:g})"


@dataclass
class SuiteResult:
    name: str
    criterion: int
    title: str
    measurements: list = field(default_factory=list)
    seconds: float = 0.0
    budget: float = math.inf
    error: Optional[str] = None

    @property
    def passed(self) -> bool:
        if self.error is not None:
            return False
        return all(m.ok for m in self.measurements if m.gating) and self.seconds < self.budget

    def summary(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"[{verdict}] criterion {self.criterion} {self.name}: {self.title} ({self.seconds:.1f} s, budget {self.budget:g} s)"

    def report(self) -> str:
        lines = [self.summary()] + [m.line() for m in self.measurements]
        if self.error:
            lines.append(f"    error: {self.error}")
        return "\n".join(lines)


def slope(eps, vals) -> float:
    """Least-squares slope of log10(vals) against log10(eps)."""
    v = np.maximum(np.asarray(vals, dtype=float), 1e-300)
    return float(np.polyfit(np.log10(eps), np.log10(v), 1)[0])


def small_lattice(lat: LatticeSpec) -> LatticeSpec:
    """The 8x8x9 x 8^2 grid used by the bracket oracle."""
    return lat.replace(n1=8, n2=8, n3=9, k_inner=8)


def seed_of(*parts) -> list:
    """Stable integer seed sequence from a mix of ints and labels."""
    out = []
    for p in parts:
        if isinstance(p, tuple):
            out += seed_of(*p)
        elif isinstance(p, str):
            out.append(zlib.crc32(p.encode()))
        else:
            out.append(int(p))
    return out


def _rb(lat, seed, mm, amp, vector=True):
    return random_bandlimited(seed_of(seed), lat, mm, amp, vector=vector)


def random_gauge(lat: LatticeSpec, seed, max_mode: int = 2, amp: float = 0.3,
                 axial: bool = False) -> GaugeConfig:
    """Random potentials and time derivatives; A_3 = 0 when ``axial``."""
    comps = [_rb(lat, (seed, "a", m), max_mode, amp) for m in range(3)]
    dts = [_rb(lat, (seed, "dt", m), max_mode, amp) for m in range(3)]
    link = lat.zeros(link=True)
    a3 = link if axial else lat.to_link(_rb(lat, (seed, "a", 3), max_mode, amp))
    d3 = link if axial else lat.to_link(_rb(lat, (seed, "dt", 3), max_mode, amp))
    return GaugeConfig(tuple(comps) + (a3,), tuple(dts) + (d3,))


def _shifted(a: GaugeConfig, da: GaugeConfig, eps: float) -> GaugeConfig:
    return GaugeConfig(tuple(a[m] + eps * da[m] for m in range(4)),
                       tuple(a.dt(m) + eps * da.dt(m) for m in range(4)))


# ---------------------------------------------------------------------------
# 1. algebra closure


def suite_algebra(cfg: RunConfig, log=None) -> SuiteResult:
    lat = cfg.lattice
    res = SuiteResult("algebra", 1, "bracket stays divergence free, Jacobi identity", budget=30.0)
    seed, mm = cfg["init.seed"], cfg["init.max_mode"]
    worst_div, worst_jac = 0.0, 0.0
    for k in range(20):
        u, v, w = (_rb(lat, (seed, "alg", k, j), mm, 1.0) for j in range(3))
        b = bracket(lat, u, v)
        grad = math.sqrt(sum(l2(lat, lat.dX_(b[n], m)) ** 2
                             for n in range(lat.D) for m in range(lat.D)))
        worst_div = max(worst_div, l2(lat, inner_divergence(lat, b)) / grad)
        terms = (bracket(lat, u, bracket(lat, v, w)), bracket(lat, v, bracket(lat, w, u)),
                 bracket(lat, w, b))
        jac = terms[0] + terms[1] + terms[2]
        worst_jac = max(worst_jac, l2(lat, jac) / sum(l2(lat, t) for t in terms))
    res.measurements += [Measurement("max rel |div [U,V]|", worst_div, 1e-10),
                         Measurement("max rel |Jacobi|", worst_jac, 1e-9)]
    return res


# ---------------------------------------------------------------------------
# 2. gauge invariance of the action


def suite_gauge_invariance(cfg: RunConfig, log=None) -> SuiteResult:
    lat = cfg.lattice
    res = SuiteResult("gauge_invariance", 2, "|dS| ~ eps^2 under local divergence-free E",
                      budget=60.0)
    seed = cfg["init.seed"]
    slopes, fslopes = [], []
    for k in range(5):
        a = random_gauge(lat, (seed, "gi", k), 1, 0.3)
        e = _rb(lat, (seed, "gi-e", k), 1, 1.0)
        f0 = field_strength(lat, a)
        s0 = action(lat, f0)
        da = gauge_vary_gauge(lat, a, e)
        df = gauge_vary_strength(lat, f0, e)
        ds, dfr = [], []
        for eps in EPSILONS:
            f = field_strength(lat, _shifted(a, da, eps))
            ds.append(abs(action(lat, f) - s0) / abs(s0))
            dfr.append(math.sqrt(sum(l2(lat, f[p] - f0[p] - eps * df[p]) ** 2 for p in PAIRS)))
        slopes.append(slope(EPSILONS, ds))
        fslopes.append(slope(EPSILONS, dfr))
        if log:
            log(f"  draw {k}: action slope {slopes[-1]:.3f}, F covariance slope {fslopes[-1]:.3f}")
    res.measurements.append(Measurement("min slope of |dS| vs eps", min(slopes), 1.9, ">="))
    res.measurements.append(Measurement("min slope of F covariance remainder", min(fslopes), 1.9,
                                        ">=", gating=False))
    return res


# ---------------------------------------------------------------------------
# 3. Bianchi identities


def _bianchi_rel(lat, a):
    f = field_strength(lat, a)
    out = {}
    scale = math.sqrt(sum(l2(lat, v) ** 2 for _, v in f.items()))
    for tri, r in bianchi_residual(lat, a, f, TRIPLES).items():
        out[tri] = l2(lat, r) / scale
    return out


def suite_bianchi(cfg: RunConfig, log=None) -> SuiteResult:
    lat = cfg.lattice
    res = SuiteResult("bianchi", 3, "cyclic covariant derivatives of F vanish", budget=60.0)
    seed, mm = cfg["init.seed"], cfg["init.max_mode"]
    per, x3, x3_axial = 0.0, 0.0, 0.0
    for k in range(10):
        r = _bianchi_rel(lat, random_gauge(lat, (seed, "bi", k), mm, 0.3))
        per = max(per, r[(0, 1, 2)])
        x3 = max(x3, max(v for t, v in r.items() if 3 in t))
        if k < 3:
            ra = _bianchi_rel(lat, random_gauge(lat, (seed, "bi", k), mm, 0.3, axial=True))
            x3_axial = max(x3_axial, max(ra.values()))
    res.measurements += [
        Measurement("periodic-axis triple (0,1,2)", per, 1e-9),
        Measurement("triples with x3", x3, 1e-6),
        Measurement("all triples, axial configurations (A_3 = 0)", x3_axial, 1e-6, gating=False),
    ]
    return res


# ---------------------------------------------------------------------------
# 4. constraint and energy conservation


def _conservation_run(lat, state, steps, rep, log=None, every=100):
    h0 = ham.hamiltonian(lat, state)
    worst_gauss = 0.0
    p_start = _momentum(lat, state, rep)

    def cb(n, st):
        nonlocal worst_gauss
        if n % every == 0 or n == steps:
            g = ham.gauss_residual(lat, st, rep)
            src = divfree_project(lat, ham.gauss_source(lat, st.a, st.pi, rep))
            worst_gauss = max(worst_gauss, l2(lat, g) / max(l2(lat, src), 1e-300))
            if log:
                log(f"  dt={lat.dt:g} step {n}: dH/H = {(ham.hamiltonian(lat, st) - h0) / h0:.3e}")

    end = ham.evolve(lat, state, steps, "rk4", rep, cb)
    drift = abs(ham.hamiltonian(lat, end) - h0) / h0
    p_end = _momentum(lat, end, rep)
    pscale = max(np.abs(p_start).max(), h0)
    return drift, worst_gauss, float(np.abs(p_end[1:] - p_start[1:]).max() / pscale)


def _momentum(lat, state, rep):
    gc = ham.gauge_config(lat, state, rep)
    return four_momentum(lat, energy_momentum(lat, field_strength(lat, gc), rows=(0,)))


def suite_conservation(cfg: RunConfig, log=None) -> SuiteResult:
    lat = cfg.lattice
    rep = cfg["run.representation"]
    res = SuiteResult("conservation", 4, "energy drift, Gauss residual, fourth-order refinement",
                      budget=600.0)
    state = initial_state(cfg.with_values(init__kind="random_bandlimited"), lat)
    d1, g1, p1 = _conservation_run(lat, state, 1000, rep, log)
    half = lat.replace(dt=lat.dt / 2)
    d2, g2, _ = _conservation_run(half, state, 2000, rep, log, every=200)
    res.measurements += [
        Measurement("|dH|/H after 1000 steps", d1, 1e-6),
        Measurement("max gauss residual", max(g1, g2), 1e-8),
        Measurement("drift ratio dt / (dt/2)", d1 / max(d2, 1e-300), 8.0, ">="),
        Measurement("spatial momentum drift / field scale", p1, 1e-6, gating=False),
    ]
    return res


# ---------------------------------------------------------------------------
# 5. Hamilton's equations against the Poisson-bracket oracle


def suite_pb_oracle(cfg: RunConfig, log=None) -> SuiteResult:
    lat = small_lattice(cfg.lattice)
    res = SuiteResult("pb_oracle", 5, "time_derivatives vs numerical Poisson bracket {O, H}",
                      budget=300.0)
    seed = cfg["init.seed"]
    a = np.stack([_rb(lat, (seed, "pb", i), 1, 0.5) for i in (0, 1)])
    pi = np.stack([_rb(lat, (seed, "pb", i), 1, 0.5) for i in (2, 3)])
    worst = {}
    for rep in ("coadjoint", "adjoint"):
        state = ham.with_a0(lat, ham.AxialState(a, pi), rep)
        da, dpi = ham.time_derivatives(lat, state, rep)
        ref = max(np.abs(da).max(), np.abs(dpi).max())
        err = 0.0
        for col in ((2, 5, 4), (6, 1, 3)):
            pts = [(i, m) + col + tuple(x) for i in range(2) for m in range(lat.D)
                   for x in np.ndindex(lat.inner_shape)]
            gh = ham.functional_gradient(lat, ham.hamiltonian_functional, state, pts, rep=rep)
            for s in pts[:: max(1, len(pts) // 32)]:
                e = np.zeros(lat.vshape)
                e[s[1:]] = 1.0
                ps = divfree_project(lat, e)
                lat.zero_boundary(ps)
                # gradient of O = field value at s, taken along P e_p, is (P e_s)[p]
                g = np.zeros_like(state.a)
                g[s[0]] = ps
                mask = np.zeros_like(g, dtype=bool)
                for p in pts:
                    mask[p] = True
                g = np.where(mask, g, 0.0)
                z = np.zeros_like(g)
                pb_a = ham.poisson_bracket(lat, (g, z), gh, state, pts, rep=rep)
                pb_p = ham.poisson_bracket(lat, (z, g), gh, state, pts, rep=rep)
                err = max(err, abs(pb_a - da[s]), abs(pb_p - dpi[s]))
        worst[rep] = err / ref
        if log:
            log(f"  {rep}: max |oracle - analytic| / max|rhs| = {worst[rep]:.3e}")
    res.measurements += [Measurement("coadjoint action, rel error", worst["coadjoint"], 1e-6),
                         Measurement("adjoint action, rel error", worst["adjoint"], 1e-6,
                                     gating=False)]
    return res


# ---------------------------------------------------------------------------
# 6. H = sum Theta^0_0


def suite_theta(cfg: RunConfig, log=None) -> SuiteResult:
    lat = cfg.lattice
    rep = cfg["run.representation"]
    res = SuiteResult("theta", 6, "H equals the integrated improved Theta^0_0", budget=30.0)
    seed, mm = cfg["init.seed"], cfg["init.max_mode"]
    worst = 0.0
    for k in range(10):
        a = np.stack([_rb(lat, (seed, "th", k, i), mm, 0.5) for i in (0, 1)])
        pi = np.stack([_rb(lat, (seed, "th", k, i), mm, 0.5) for i in (2, 3)])
        state = ham.with_a0(lat, ham.AxialState(a, pi), rep)
        h = ham.hamiltonian(lat, state)
        p0 = _momentum(lat, state, rep)[0]
        worst = max(worst, abs(h - p0) / abs(h))
    res.measurements.append(Measurement("max |H - sum Theta^0_0| / H", worst, 1e-10))
    return res


# ---------------------------------------------------------------------------
# 7. abelian reduction


class MaxwellAxial:
    """Independent abelian axial-gauge solver for X-independent data.

    Fields have shape ``(2, D, n1, n2, n3)``: no inner axes.  Periodic
    derivatives use FFT wavenumbers, the x3 second difference is an
    explicit three-point stencil and the Gauss law is solved with a type-I
    sine transform.
    """

    def __init__(self, lat: LatticeSpec):
        self.lam, self.h3, self.n3, self.dt = lat.lam, lat.h3, lat.n3, lat.dt
        self.k1 = 2j * np.pi * np.fft.fftfreq(lat.n1, d=lat.l1 / lat.n1)
        self.k2 = 2j * np.pi * np.fft.fftfreq(lat.n2, d=lat.l2 / lat.n2)
        for k, n in ((self.k1, lat.n1), (self.k2, lat.n2)):
            k[n // 2] = 0.0
        j = np.arange(1, self.n3 - 1)
        self.eig = -(2.0 / self.h3 * np.sin(j * np.pi / (2 * (self.n3 - 1)))) ** 2

    def d1(self, f):
        return np.real(np.fft.ifft(self.k1[:, None, None] * np.fft.fft(f, axis=-3), axis=-3))

    def d2(self, f):
        return np.real(np.fft.ifft(self.k2[:, None] * np.fft.fft(f, axis=-2), axis=-2))

    def lap3(self, f):
        out = np.zeros_like(f)
        out[..., 1:-1] = (f[..., 2:] - 2 * f[..., 1:-1] + f[..., :-2]) / self.h3 ** 2
        return out

    def a0(self, pi):
        g = self.d1(pi[0]) + self.d2(pi[1])
        inner = scipy.fft.dst(g[..., 1:-1], type=1, axis=-1)
        sol = scipy.fft.idst(inner / (self.lam * self.eig), type=1, axis=-1)
        out = np.zeros_like(g)
        out[..., 1:-1] = sol
        return out

    def rhs(self, a, pi):
        a0 = self.a0(pi)
        da = pi / self.lam + np.stack([self.d1(a0), self.d2(a0)])
        f12 = self.d1(a[1]) - self.d2(a[0])
        dpi = self.lam * (np.stack([-self.d2(f12), self.d1(f12)]) + self.lap3(a))
        da[..., 0] = da[..., -1] = 0.0
        dpi[..., 0] = dpi[..., -1] = 0.0
        return da, dpi

    def step(self, a, pi):
        h = self.dt
        k1 = self.rhs(a, pi)
        k2 = self.rhs(a + h / 2 * k1[0], pi + h / 2 * k1[1])
        k3 = self.rhs(a + h / 2 * k2[0], pi + h / 2 * k2[1])
        k4 = self.rhs(a + h * k3[0], pi + h * k3[1])
        return (a + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
                pi + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]))


def x_independent_state(lat: LatticeSpec, seed, amp: float = 0.5):
    """Random X-constant (a, pi); returns the full state and the reduced arrays."""
    red = []
    for which in range(2):
        comps = []
        for i in range(2):
            for m in range(lat.D):
                f = _rb(lat, (seed, "ab", which, i, m), 2, amp, vector=False)
                comps.append(f[(Ellipsis,) + (0,) * lat.D])
        red.append(np.stack(comps).reshape((2, lat.D) + lat.shape[:3]))
    a_red, pi_red = red
    full = [np.broadcast_to(r[(Ellipsis,) + (None,) * lat.D], (2,) + lat.vshape).copy()
            for r in red]
    return ham.AxialState(*full), a_red, pi_red


def suite_abelian(cfg: RunConfig, log=None) -> SuiteResult:
    lat = cfg.lattice
    rep = cfg["run.representation"]
    res = SuiteResult("abelian", 7, "X-independent data follows an independent Maxwell solver",
                      budget=120.0)
    state, a_red, pi_red = x_independent_state(lat, (cfg["init.seed"], "abelian"))
    state = ham.with_a0(lat, state, rep)
    mx = MaxwellAxial(lat)
    worst = 0.0
    for n in range(1, 201):
        state = ham.step(lat, state, "rk4", rep)
        a_red, pi_red = mx.step(a_red, pi_red)
        if n % 50 == 0:
            sl = (Ellipsis,) + (0,) * lat.D
            num = math.hypot(np.linalg.norm(state.a[sl] - a_red), np.linalg.norm(state.pi[sl] - pi_red))
            den = math.hypot(np.linalg.norm(a_red), np.linalg.norm(pi_red))
            spread = float(np.abs(state.a - state.a[sl + (None,) * lat.D]).max())
            worst = max(worst, num / den, spread / max(np.abs(a_red).max(), 1e-300))
            if log:
                log(f"  step {n}: rel deviation {num / den:.3e}, inner spread {spread:.3e}")
    res.measurements.append(Measurement("max rel deviation over 200 steps", worst, 1e-8))
    return res


# ---------------------------------------------------------------------------
# 8. scale equivalence


def suite_scale(cfg: RunConfig, log=None) -> SuiteResult:
    lat = cfg.lattice
    res = SuiteResult("scale", 8, "action at cutoff rho*Lambda equals action of rescaled state",
                      budget=10.0)
    a = random_gauge(lat, (cfg["init.seed"], "scale"), cfg["init.max_mode"], 0.3)
    worst = 0.0
    for rho in (0.5, 2.0, 3.0):
        s_cut = action(lat.replace(lam=lat.lam * rho), field_strength(lat, a))
        lat2, a2 = scale_transform(lat, a, rho)
        s_resc = action(lat2, field_strength(lat2, a2))
        worst = max(worst, abs(s_cut - s_resc) / abs(s_cut))
        if log:
            log(f"  rho={rho}: {s_cut:.15g} vs {s_resc:.15g}")
    res.measurements.append(Measurement("max rel difference over rho in {1/2, 2, 3}", worst, 1e-12))
    return res


# ---------------------------------------------------------------------------
# 9. matter


def suite_matter(cfg: RunConfig, log=None) -> SuiteResult:
    lat = cfg.lattice
    res = SuiteResult("matter", 9, "matter invariance and charge conservation", budget=300.0)
    seed = cfg["init.seed"]
    mass = cfg["matter.mass"]
    psi = _rb(lat, (seed, "m", 0), 1, 1.0, vector=False)
    dpsi = _rb(lat, (seed, "m", 1), 1, 1.0, vector=False)
    ms = MatterState(psi, dpsi, mass, cfg["matter.sign_convention"])

    # global: x-constant divergence-free E
    e = _rb(lat, (seed, "m", 2), 1, 1.0)
    mid = lat.n3 // 2
    eg = np.broadcast_to(e[:, :1, :1, mid:mid + 1], e.shape).copy()

    def varied(eps, ee, a=None, da=None):
        m2 = ms.replace(psi=ms.psi + eps * gauge_vary_scalar(lat, ms.psi, ee),
                        dpsi=ms.dpsi + eps * gauge_vary_scalar(lat, ms.dpsi, ee))
        if a is None:
            return matter_action(lat, m2)
        return matter_action(lat, m2, GaugeConfig(tuple(a[m] + eps * da[m] for m in range(4))))

    l0 = matter_action(lat, ms)
    h = 1e-3
    glob = abs(varied(h, eg) - varied(-h, eg)) / (2 * h) / abs(l0)

    # local: covariant coupling vs uncoupled negative control
    a = random_gauge(lat, (seed, "m-bg"), 1, 0.3)
    da = gauge_vary_gauge(lat, a, e)
    l0a = matter_action(lat, ms, a)
    cov = slope(EPSILONS, [abs(varied(x, e, a, da) - l0a) for x in EPSILONS])
    ctl = slope(EPSILONS, [abs(varied(x, e) - l0) for x in EPSILONS])

    # charge conservation under free evolution (1000 steps), then on a
    # frozen X-independent background that keeps inner translations a
    # symmetry while coupling the matter to A_mu (shorter run, reported)
    conv = ms.replace(sign_convention="conventional")

    def drift(bg, steps):
        q0, e0 = charges(lat, conv, bg), matter_energy(lat, conv, bg)
        p = canonical_momentum(lat, conv, bg)
        qscale = sum(float(np.abs(p * lat.dX_(conv.psi, n)).sum()) for n in range(lat.D))
        qscale *= lat.weight
        cur = conv
        for _ in range(steps):
            cur = matter_step(lat, cur, bg)
        qd = float(np.abs(charges(lat, cur, bg) - q0).max()) / qscale
        return qd, abs(matter_energy(lat, cur, bg) - e0) / abs(e0)

    qd, ed = drift(None, 1000)
    bg_state, _, _ = x_independent_state(lat, (seed, "m-xbg"), 0.3)
    bg = ham.gauge_config(lat, ham.with_a0(lat, bg_state), with_time=False)
    qb, eb = drift(bg, 100)
    res.measurements += [
        Measurement("global invariance |dL|/|L|", glob, 1e-10),
        Measurement("local slope with covariant coupling", cov, 1.9, ">="),
        Measurement("local slope without coupling (must fail)", ctl, 1.9, "<"),
        Measurement("Q_N drift, 1000 free steps / charge scale", qd, 1e-6),
        Measurement("matter energy drift, 1000 free steps", ed, 1e-6, gating=False),
        Measurement("Q_N drift, 100 steps on X-independent background", qb, 1e-6, gating=False),
        Measurement("matter energy drift, same background run", eb, 1e-6, gating=False),
    ]
    return res


# ---------------------------------------------------------------------------
# 10. determinism


def suite_determinism(cfg: RunConfig, log=None) -> SuiteResult:
    res = SuiteResult("determinism", 10, "two identical simulate runs give identical CSV bytes",
                      budget=60.0)
    run_cfg = cfg.with_values(run__steps=2, run__diagnostics_every=1, run__snapshot_every=0,
                              matter__enabled=True, output__record_wall_ms=False)
    with tempfile.TemporaryDirectory() as tmp:
        p1 = run_simulate(run_cfg, Path(tmp) / "a.csv")
        p2 = run_simulate(run_cfg, Path(tmp) / "b.csv")
        same = filecmp.cmp(p1, p2, shallow=False)
    res.measurements.append(Measurement("CSV byte mismatch", 0.0 if same else 1.0, 0.0))
    return res


SUITES: dict[str, Callable] = {
    "algebra": suite_algebra,
    "gauge_invariance": suite_gauge_invariance,
    "bianchi": suite_bianchi,
    "conservation": suite_conservation,
    "pb_oracle": suite_pb_oracle,
    "theta": suite_theta,
    "abelian": suite_abelian,
    "scale": suite_scale,
    "matter": suite_matter,
    "determinism": suite_determinism,
}


def run_suite(name: str, cfg: Optional[RunConfig] = None, log=None) -> SuiteResult:
    """Run one suite, timing it; exceptions become a failed result."""
    cfg = default_config() if cfg is None else cfg
    fn = SUITES[name]
    t0 = time.perf_counter()
    try:
        res = fn(cfg, log)
    except Exception as exc:  # reported, never swallowed silently
        res = SuiteResult(name, list(SUITES).index(name) + 1, name, error=f"{type(exc).__name__}: {exc}")
    res.seconds = time.perf_counter() - t0
    return res


def run_checks(cfg: Optional[RunConfig] = None, only: Optional[str] = None, log=None) -> list:
    names = [only] if only else list(SUITES)
    out = []
    for name in names:
        res = run_suite(name, cfg, log)
        if log:
            log(res.report())
        out.append(res)
    return out
