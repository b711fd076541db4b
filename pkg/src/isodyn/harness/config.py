"""Run configuration: a line-oriented ``section.key = value`` format.

Blank lines and ``#`` comments are ignored.  Values are integers, floats,
``true``/``false`` or strings (optionally quoted).  Unknown keys, type
mismatches and constraint violations are all reported together, each with
its line number.
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from typing import Any

from ..algebra import UnsupportedMap, parse_map
from ..lattice import LatticeError, LatticeSpec


class ConfigError(ValueError):
    """Carries the list of ``(line, message)`` problems found."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("\n".join(f"line {ln}: {msg}" if ln else msg for ln, msg in self.problems))


# key -> (type, default); lattice keys mirror LatticeSpec, with ``lambda`` for lam
_LAT = LatticeSpec()
SCHEMA: dict[str, tuple[type, Any]] = {
    "lattice.n1": (int, _LAT.n1),
    "lattice.n2": (int, _LAT.n2),
    "lattice.n3": (int, _LAT.n3),
    "lattice.l1": (float, _LAT.l1),
    "lattice.l2": (float, _LAT.l2),
    "lattice.l3": (float, _LAT.l3),
    "lattice.d_inner": (int, _LAT.d_inner),
    "lattice.k_inner": (int, _LAT.k_inner),
    "lattice.l_inner": (float, _LAT.l_inner),
    "lattice.lambda": (float, _LAT.lam),
    "lattice.dt": (float, _LAT.dt),
    "init.kind": (str, "random_bandlimited"),
    "init.seed": (int, 0),
    "init.amplitude": (float, 0.5),
    "init.max_mode": (int, 2),
    "init.transform": (str, "identity"),
    "run.steps": (int, 100),
    "run.scheme": (str, "rk4"),
    "run.representation": (str, "coadjoint"),
    "run.diagnostics_every": (int, 10),
    "run.snapshot_every": (int, 0),
    "matter.enabled": (bool, False),
    "matter.mass": (float, 1.0),
    "matter.sign_convention": (str, "as-printed"),
    "matter.amplitude": (float, 1.0),
    "output.csv_path": (str, "diagnostics.csv"),
    "output.snapshot_dir": (str, ""),
    "output.record_wall_ms": (bool, False),
}

CHOICES = {
    "init.kind": ("vacuum", "random_bandlimited", "abelian_wave"),
    "run.scheme": ("rk4", "midpoint"),
    "run.representation": ("coadjoint", "adjoint"),
    "matter.sign_convention": ("as-printed", "conventional"),
}


@dataclass(frozen=True)
class RunConfig:
    """Flat view of every key; ``values[key]`` holds the typed value."""

    values: dict = field(default_factory=lambda: {k: d for k, (_, d) in SCHEMA.items()})

    def __getitem__(self, key: str):
        return self.values[key]

    def with_values(self, **kw) -> "RunConfig":
        """Override keys given with ``__`` for the dot, e.g. ``run__steps=5``."""
        vals = dict(self.values)
        for k, v in kw.items():
            key = k.replace("__", ".")
            if key not in SCHEMA:
                raise ConfigError([(0, f"unknown key {key!r}")])
            vals[key] = v
        cfg = RunConfig(vals)
        validate(cfg)
        return cfg

    @property
    def lattice(self) -> LatticeSpec:
        kw = {}
        for f in fields(LatticeSpec):
            key = "lattice.lambda" if f.name == "lam" else f"lattice.{f.name}"
            kw[f.name] = self.values[key]
        return LatticeSpec(**kw)


def _convert(text: str, typ: type):
    s = text.strip()
    if len(s) >= 2 and s[0] == s[-1] and s[0] in "\"'":
        s = s[1:-1]
        if typ is str:
            return s
    if typ is bool:
        low = s.lower()
        if low in ("true", "yes", "1"):
            return True
        if low in ("false", "no", "0"):
            return False
        raise ValueError(f"expected true or false, got {text.strip()!r}")
    if typ is int:
        try:
            return int(s)
        except ValueError:
            f = float(s)
            if f.is_integer():
                return int(f)
            raise ValueError(f"expected an integer, got {text.strip()!r}") from None
    if typ is float:
        return float(s)
    return s


def _constraints(vals: dict) -> list:
    """(key, message) pairs for every violated constraint."""
    bad = []
    for k in ("lattice.n1", "lattice.n2", "lattice.n3", "lattice.k_inner"):
        if vals[k] < 1:
            bad.append((k, f"{k} must be >= 1"))
    if vals["lattice.d_inner"] < 1:
        bad.append(("lattice.d_inner", "lattice.d_inner must be >= 1 (inner dimension D >= 1)"))
    for k in ("lattice.n1", "lattice.n2", "lattice.k_inner"):
        n = vals[k]
        if n >= 1 and n & (n - 1):
            bad.append((k, f"{k} = {n} must be a power of two (periodic axis)"))
    if vals["lattice.n3"] < 3 and vals["lattice.n3"] >= 1:
        bad.append(("lattice.n3", "lattice.n3 must be >= 3 (two Dirichlet planes and an interior)"))
    for k in ("lattice.l1", "lattice.l2", "lattice.l3", "lattice.l_inner", "lattice.dt"):
        if not vals[k] > 0:
            bad.append((k, f"{k} must be > 0"))
    if not vals["lattice.lambda"] > 0:
        bad.append(("lattice.lambda", "lattice.lambda must be > 0"))
    for k, opts in CHOICES.items():
        if vals[k] not in opts:
            bad.append((k, f"{k} must be one of {', '.join(opts)}"))
    if vals["init.max_mode"] < 0:
        bad.append(("init.max_mode", "init.max_mode must be >= 0"))
    elif not bad:
        lim = min(vals["lattice.n1"] // 2, vals["lattice.n2"] // 2,
                  vals["lattice.k_inner"] // 2, vals["lattice.n3"] - 1)
        if vals["init.max_mode"] >= lim and vals["init.kind"] != "vacuum":
            bad.append(("init.max_mode",
                        f"init.max_mode = {vals['init.max_mode']} must lie below the Nyquist limit {lim}"))
    if vals["init.amplitude"] < 0:
        bad.append(("init.amplitude", "init.amplitude must be >= 0"))
    if vals["matter.mass"] < 0:
        bad.append(("matter.mass", "matter.mass must be >= 0"))
    for k in ("run.steps", "run.diagnostics_every", "run.snapshot_every"):
        if vals[k] < 0:
            bad.append((k, f"{k} must be >= 0"))
    if vals["run.diagnostics_every"] == 0 and vals["run.steps"] > 0:
        bad.append(("run.diagnostics_every", "run.diagnostics_every must be >= 1"))
    try:
        vmap = parse_map(vals["init.transform"])
        if vmap.kind in ("shear", "rot"):
            for ax in vmap.params[:2]:
                if not 1 <= ax <= max(vals["lattice.d_inner"], 1):
                    raise UnsupportedMap(f"inner axis {ax} out of range")
        if vmap.kind == "shift" and len(vmap.params) != vals["lattice.d_inner"]:
            raise UnsupportedMap(f"shift needs {vals['lattice.d_inner']} offsets")
    except UnsupportedMap as exc:
        bad.append(("init.transform", f"init.transform: {exc}"))
    if vals["run.snapshot_every"] > 0 and not vals["output.snapshot_dir"]:
        bad.append(("run.snapshot_every", "run.snapshot_every needs output.snapshot_dir"))
    return bad


def validate(cfg: RunConfig, lines: dict | None = None) -> None:
    lines = lines or {}
    bad = _constraints(cfg.values)
    if not bad:
        try:
            cfg.lattice
        except LatticeError as exc:
            bad.append(("lattice", str(exc)))
    if bad:
        raise ConfigError([(lines.get(k, 0), msg) for k, msg in bad])


def parse_config(text: str) -> RunConfig:
    """Parse and validate; raises :class:`ConfigError` listing every problem."""
    vals = {k: d for k, (_, d) in SCHEMA.items()}
    problems, seen = [], {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip() if not _quoted_hash(raw) else raw.strip()
        if not line:
            continue
        key, eq, value = line.partition("=")
        key = key.strip()
        if not eq:
            problems.append((ln, f"expected 'key = value', got {raw.strip()!r}"))
            continue
        if key not in SCHEMA:
            problems.append((ln, f"unknown key {key!r}"))
            continue
        if key in seen:
            problems.append((ln, f"duplicate key {key!r} (first set on line {seen[key]})"))
            continue
        seen[key] = ln
        typ = SCHEMA[key][0]
        try:
            vals[key] = _convert(value, typ)
        except ValueError as exc:
            problems.append((ln, f"{key}: type mismatch, {exc}"))
    if problems:
        raise ConfigError(problems)
    cfg = RunConfig(vals)
    validate(cfg, seen)
    return cfg


def _quoted_hash(raw: str) -> bool:
    """True when a ``#`` sits inside a quoted value."""
    _, _, value = raw.partition("=")
    v = value.strip()
    return bool(v) and v[0] in "\"'" and "#" in v


def serialize(cfg: RunConfig) -> str:
    """Every key in schema order; parses back to an equal config."""
    out = []
    for key, (typ, _) in SCHEMA.items():
        v = cfg.values[key]
        if typ is bool:
            s = "true" if v else "false"
        elif typ is float:
            s = repr(float(v))
        elif typ is str:
            s = f'"{v}"'
        else:
            s = str(v)
        out.append(f"{key} = {s}")
    return "\n".join(out) + "\n"


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def default_config() -> RunConfig:
    return RunConfig()


__all__ = ["ConfigError", "RunConfig", "SCHEMA", "parse_config", "serialize", "load_config",
           "default_config", "validate", "replace"]
