import math

import pytest

from isodyn.harness.cli import main
from isodyn.harness.runner import columns, read_csv, read_snapshot, run_simulate
from isodyn.harness.config import parse_config

SMALL = """\
lattice.n1 = 8
lattice.n2 = 8
lattice.n3 = 9
lattice.k_inner = 8
init.max_mode = 1
run.steps = {steps}
run.diagnostics_every = {every}
init.kind = {kind}
matter.enabled = {matter}
output.csv_path = {csv}
"""


def write_cfg(tmp_path, steps=4, every=2, kind="random_bandlimited", matter="false", extra=""):
    csv = tmp_path / "out.csv"
    p = tmp_path / "run.cfg"
    p.write_text(SMALL.format(steps=steps, every=every, kind=kind, matter=matter, csv=csv) + extra)
    return p, csv


def test_simulate_writes_csv_with_echoed_config(tmp_path, capsys):
    cfg, csv = write_cfg(tmp_path, matter="true")
    assert main(["simulate", str(cfg), "-q"]) == 0
    text = csv.read_text()
    assert "# lattice.n1 = 8" in text and "# output.record_wall_ms = false" in text
    header, rows = read_csv(csv)
    assert header == ["step", "t", "H", "gauss_l2", "bianchi_l2", "divfree_leak",
                      "p0", "p1", "p2", "p3", "Q_1", "Q_2", "wall_ms"]
    assert [r[0] for r in rows] == [0, 2, 4]
    assert all(r[-1] == 0 for r in rows)
    assert rows[0][3] < 1e-12 and rows[0][4] < 1e-9


def test_simulate_is_deterministic(tmp_path):
    cfg, csv = write_cfg(tmp_path)
    assert main(["simulate", str(cfg), "-q"]) == 0
    first = csv.read_bytes()
    assert main(["simulate", str(cfg), "-q"]) == 0
    assert csv.read_bytes() == first


def test_vacuum_run_stays_vacuum(tmp_path):
    cfg, csv = write_cfg(tmp_path, steps=100, every=50, kind="vacuum")
    assert main(["simulate", str(cfg), "-q"]) == 0
    header, rows = read_csv(csv)
    for r in rows:
        assert r[header.index("H")] == 0.0
        for c in ("gauss_l2", "bianchi_l2", "divfree_leak", "p1", "p2", "p3"):
            assert abs(r[header.index(c)]) <= 1e-14


def test_abelian_wave_conserves_energy(tmp_path):
    cfg, csv = write_cfg(tmp_path, steps=50, every=10, kind="abelian_wave")
    assert main(["simulate", str(cfg), "-q"]) == 0
    header, rows = read_csv(csv)
    h = [r[header.index("H")] for r in rows]
    assert h[0] > 0 and max(abs(x - h[0]) for x in h) <= 1e-8 * h[0]


def test_snapshots_resume_bit_exact(tmp_path):
    snaps = tmp_path / "snaps"
    cfg, csv = write_cfg(tmp_path, steps=4, every=2, matter="true",
                         extra=f"run.snapshot_every = 2\noutput.snapshot_dir = {snaps}\n")
    assert main(["simulate", str(cfg), "-q"]) == 0
    files = sorted(snaps.glob("*.snap"))
    assert [f.name for f in files] == ["step_000000.snap", "step_000002.snap", "step_000004.snap"]
    lat, state, ms, step = read_snapshot(files[1])
    assert step == 2 and ms is not None
    from isodyn import hamiltonian as ham
    from isodyn.harness.runner import diagnostics
    for _ in range(2):
        state = ham.step(lat, state)
    lat4, state4, _, _ = read_snapshot(files[2])
    assert lat4 == lat
    assert state.a.tobytes() == state4.a.tobytes() and state.pi.tobytes() == state4.pi.tobytes()


def test_config_error_exit_code(tmp_path, capsys):
    p = tmp_path / "bad.cfg"
    p.write_text("lattice.n1 = 8\ninit.max_mode = 99\n")
    assert main(["simulate", str(p)]) == 2
    assert "Nyquist" in capsys.readouterr().err
    assert main(["check", str(p)]) == 2
    assert main(["simulate", str(tmp_path / "missing.cfg")]) == 2
    assert main(["frobnicate"]) == 2


def test_check_only_runs_one_suite(tmp_path, capsys):
    cfg, _ = write_cfg(tmp_path)
    assert main(["check", str(cfg), "--only=scale"]) == 0
    out = capsys.readouterr().out
    assert "criterion 8 scale" in out and "1/1 suites passed" in out
    assert main(["check", str(cfg), "--only=nonsense"]) == 2


def test_check_failure_exit_code(tmp_path, capsys):
    # the x3 Bianchi residual with A_3 != 0 exceeds its bound
    cfg, _ = write_cfg(tmp_path)
    assert main(["check", str(cfg), "--only=bianchi"]) == 1
    assert "0/1 suites passed" in capsys.readouterr().out


def test_runtime_failure_exit_code(tmp_path, capsys):
    cfg, _ = write_cfg(tmp_path, steps=3, every=1,
                       extra="run.scheme = midpoint\nlattice.dt = 5.0\ninit.amplitude = 3.0\n")
    assert main(["simulate", str(cfg), "-q"]) == 3
    assert "last good snapshot" in capsys.readouterr().err


def test_plot_writes_svg(tmp_path, capsys):
    cfg, csv = write_cfg(tmp_path)
    assert main(["simulate", str(cfg), "-q"]) == 0
    out = tmp_path / "h.svg"
    assert main(["plot", str(csv), "H", "-o", str(out)]) == 0
    svg = out.read_text()
    assert svg.startswith("<svg") and "<polyline" in svg
    assert main(["plot", str(csv), "nope"]) == 2
    assert main(["plot", str(tmp_path / "none.csv"), "H"]) == 2


def test_columns_fixed():
    cfg = parse_config("lattice.d_inner = 3\nlattice.k_inner = 4\ninit.max_mode = 1\n")
    assert columns(cfg.lattice, True)[-4:] == ["Q_1", "Q_2", "Q_3", "wall_ms"]
