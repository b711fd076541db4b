"""Run orchestration: initial data, the evolution loop, CSV rows and snapshots."""
from __future__ import annotations

import csv
import io as _io
import math
import time
from pathlib import Path
from typing import Optional

import numpy as np

from .. import hamiltonian as ham
from ..algebra import parse_map, pullback
from ..io import load_snapshot, save_snapshot
from ..lagrangian import bianchi_residual, energy_momentum, field_strength, four_momentum
from ..lattice import LatticeSpec, divfree_project, l2, random_bandlimited
from ..matter import MatterState, charges, matter_step
from .config import SCHEMA, RunConfig, serialize


class RunFailure(RuntimeError):
    """Evolution broke down; ``snapshot`` is the last good state on disk (or None)."""

    def __init__(self, msg: str, snapshot: Optional[Path] = None):
        super().__init__(msg)
        self.snapshot = snapshot


def columns(lat: LatticeSpec, matter: bool) -> list:
    cols = ["step", "t", "H", "gauss_l2", "bianchi_l2", "divfree_leak", "p0", "p1", "p2", "p3"]
    if matter:
        cols += [f"Q_{n + 1}" for n in range(lat.D)]
    return cols + ["wall_ms"]


# ---------------------------------------------------------------------------
# initial data


def abelian_wave(lat: LatticeSpec, amplitude: float, k: int = 1) -> ham.AxialState:
    """A_1^M = alpha^M sin(k x2) sin(pi x3 / l3), Pi = 0, alpha along e_1.

    X-independent, so every bracket vanishes and the dynamics is Maxwell.
    """
    x1, x2, x3, *_ = lat.mesh()
    prof = np.sin(k * 2 * np.pi * x2 / lat.l2) * np.sin(np.pi * x3 / lat.l3)
    a = np.zeros((2,) + lat.vshape)
    a[0, 0] = amplitude * np.broadcast_to(prof, lat.shape)
    lat.zero_boundary(a)
    return ham.AxialState(a, np.zeros_like(a))


def initial_state(cfg: RunConfig, lat: Optional[LatticeSpec] = None) -> ham.AxialState:
    lat = cfg.lattice if lat is None else lat
    kind, seed, amp = cfg["init.kind"], cfg["init.seed"], cfg["init.amplitude"]
    rep = cfg["run.representation"]
    if kind == "vacuum":
        return ham.AxialState.vacuum(lat)
    if kind == "abelian_wave":
        return ham.with_a0(lat, abelian_wave(lat, amp), rep)
    mm = cfg["init.max_mode"]
    a = np.stack([random_bandlimited((seed, i), lat, mm, amp) for i in (0, 1)])
    pi = np.stack([random_bandlimited((seed, i), lat, mm, amp) for i in (2, 3)])
    vmap = parse_map(cfg["init.transform"])
    if vmap.kind != "identity":
        a = np.stack([pullback(lat, x, vmap, "vector") for x in a])
        pi = np.stack([pullback(lat, x, vmap, "vector") for x in pi])
        # pullbacks with aliasing can leak a longitudinal part; remove it
        a, pi = divfree_project(lat, a), divfree_project(lat, pi)
        lat.zero_boundary(a)
        lat.zero_boundary(pi)
    return ham.with_a0(lat, ham.AxialState(a, pi), rep)


def initial_matter(cfg: RunConfig, lat: Optional[LatticeSpec] = None) -> Optional[MatterState]:
    if not cfg["matter.enabled"]:
        return None
    lat = cfg.lattice if lat is None else lat
    mm = min(cfg["init.max_mode"], 1) or 1
    amp = cfg["matter.amplitude"]
    psi = random_bandlimited((cfg["init.seed"], 98), lat, mm, amp, vector=False)
    dpsi = random_bandlimited((cfg["init.seed"], 99), lat, mm, amp, vector=False)
    return MatterState(psi, dpsi, cfg["matter.mass"], cfg["matter.sign_convention"])


# ---------------------------------------------------------------------------
# diagnostics


def _ratio(num: float, den: float) -> float:
    return num / den if den > 0 else num


def diagnostics(lat: LatticeSpec, state: ham.AxialState, rep: str = "coadjoint",
                ms: Optional[MatterState] = None) -> dict:
    """One row of health metrics for a state with resolved A_0."""
    state = state if state.a0 is not None else ham.with_a0(lat, state, rep)
    H = ham.hamiltonian(lat, state)
    g = ham.gauss_residual(lat, state, rep)
    src = divfree_project(lat, ham.gauss_source(lat, state.a, state.pi, rep))
    gauss = _ratio(l2(lat, g), l2(lat, src))

    pda, pdpi, da, dpi = ham.time_derivatives(lat, state, rep, return_raw=True)
    raw = math.hypot(l2(lat, da), l2(lat, dpi))
    leak = math.hypot(l2(lat, da - divfree_project(lat, da)),
                      l2(lat, dpi - divfree_project(lat, dpi)))
    link = lat.zeros(link=True)
    gc = ham.GaugeConfig((state.a0, state.a[0], state.a[1], link),
                         (np.zeros_like(state.a0), pda[0], pda[1], link))
    f = field_strength(lat, gc)
    res = bianchi_residual(lat, gc, f)
    rnorm = math.sqrt(sum(l2(lat, r) ** 2 for r in res.values()))
    fnorm = math.sqrt(sum(l2(lat, v) ** 2 for _, v in f.items()))
    p = four_momentum(lat, energy_momentum(lat, f, "improved", rows=(0,)))
    row = {"H": H, "gauss_l2": gauss, "bianchi_l2": _ratio(rnorm, fnorm),
           "divfree_leak": _ratio(leak, raw),
           "p0": p[0], "p1": p[1], "p2": p[2], "p3": p[3]}
    if ms is not None:
        bg = ham.gauge_config(lat, state, rep, with_time=False)
        for n, q in enumerate(charges(lat, ms, bg)):
            row[f"Q_{n + 1}"] = q
    return row


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


# ---------------------------------------------------------------------------
# snapshots


def write_snapshot(path, lat, state: ham.AxialState, ms: Optional[MatterState], step_no: int) -> Path:
    arrays = {"a": state.a, "pi": state.pi}
    if state.a0 is not None:
        arrays["a0"] = state.a0
    meta = {"step": step_no, "t": float(state.t)}
    if ms is not None:
        arrays["psi"], arrays["dpsi"] = ms.psi, ms.dpsi
        meta.update(mass=float(ms.mass), sign_convention=ms.sign_convention)
    return save_snapshot(path, lat, arrays, meta)


def read_snapshot(path):
    """Return ``(lat, state, matter_or_None, step)`` from a snapshot file."""
    lat, arrays, meta = load_snapshot(path)
    state = ham.AxialState(arrays["a"], arrays["pi"], float(meta.get("t", 0.0)), arrays.get("a0"))
    ms = None
    if "psi" in arrays:
        ms = MatterState(arrays["psi"], arrays["dpsi"], float(meta.get("mass", 0.0)),
                         str(meta.get("sign_convention", "as-printed")), float(meta.get("t", 0.0)))
    return lat, state, ms, int(meta.get("step", 0))


# ---------------------------------------------------------------------------
# the loop


def run_simulate(cfg: RunConfig, csv_path=None, log=None) -> Path:
    """Evolve per ``cfg``; returns the CSV path.  Raises :class:`RunFailure`."""
    lat = cfg.lattice
    rep, scheme = cfg["run.representation"], cfg["run.scheme"]
    steps, every = cfg["run.steps"], cfg["run.diagnostics_every"]
    snap_every = cfg["run.snapshot_every"]
    snap_dir = Path(cfg["output.snapshot_dir"]) if cfg["output.snapshot_dir"] else None
    out = Path(csv_path or cfg["output.csv_path"])
    record = cfg["output.record_wall_ms"]
    if snap_dir is not None:
        snap_dir.mkdir(parents=True, exist_ok=True)

    state = initial_state(cfg, lat)
    ms = initial_matter(cfg, lat)
    cols = columns(lat, ms is not None)
    buf = _io.StringIO()
    for line in serialize(cfg).splitlines():
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)

    t0 = time.perf_counter()
    last_snap = None

    def emit(n):
        row = diagnostics(lat, state, rep, ms)
        row.update(step=n, t=state.t, wall_ms=(time.perf_counter() - t0) * 1e3 if record else 0)
        if not all(math.isfinite(row[c]) for c in cols):
            raise RunFailure(f"non-finite diagnostics at step {n}", last_snap)
        writer.writerow([_fmt(row[c]) for c in cols])
        if log:
            log(f"step {n:6d}  t={state.t:.6g}  H={row['H']:.12g}  gauss={row['gauss_l2']:.3e}")

    emit(0)
    if snap_dir is not None and snap_every:
        last_snap = write_snapshot(snap_dir / "step_000000.snap", lat, state, ms, 0)
    for n in range(1, steps + 1):
        try:
            new = ham.step(lat, state, scheme, rep)
        except ham.IntegrationError as exc:
            raise RunFailure(f"step {n}: {exc} (after {exc.iterations} iterations)", last_snap) from exc
        if not (np.isfinite(new.a).all() and np.isfinite(new.pi).all()):
            raise RunFailure(f"step {n}: state became non-finite", last_snap)
        if ms is not None:
            bg = ham.gauge_config(lat, state, rep, with_time=False)
            ms = matter_step(lat, ms, bg)
        state = new
        if n % every == 0 or n == steps:
            emit(n)
        if snap_dir is not None and snap_every and n % snap_every == 0:
            last_snap = write_snapshot(snap_dir / f"step_{n:06d}.snap", lat, state, ms, n)

    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())
    return out


def read_csv(path) -> tuple:
    """Return ``(header, rows)`` with rows as float lists; ``#`` lines skipped."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    rdr = csv.reader(lines)
    header = next(rdr)
    return header, [[float(x) for x in r] for r in rdr if r]


__all__ = ["RunFailure", "columns", "abelian_wave", "initial_state", "initial_matter",
           "diagnostics", "write_snapshot", "read_snapshot", "run_simulate", "read_csv", "SCHEMA"]
