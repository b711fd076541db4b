import pytest
from hypothesis import given, settings, strategies as st

from isodyn.harness.config import SCHEMA, ConfigError, RunConfig, default_config, parse_config, serialize


def test_defaults_match_desk_grid():
    cfg = default_config()
    lat = cfg.lattice
    assert lat.shape == (16, 16, 17, 16, 16) and lat.lam == 1.0
    assert cfg["run.scheme"] == "rk4" and cfg["matter.sign_convention"] == "as-printed"


def test_parse_comments_quotes_and_types():
    cfg = parse_config("""
        # a comment
        lattice.n1 = 8          # trailing comment
        lattice.lambda = 2.5
        init.transform = "shear:1,2:sin:0.1"
        matter.enabled = true
        output.csv_path = 'out#1.csv'
    """)
    assert cfg["lattice.n1"] == 8 and cfg.lattice.lam == 2.5
    assert cfg["init.transform"] == "shear:1,2:sin:0.1"
    assert cfg["matter.enabled"] is True
    assert cfg["output.csv_path"] == "out#1.csv"


def test_errors_carry_line_numbers():
    with pytest.raises(ConfigError) as exc:
        parse_config("lattice.n1 = 8\nlattice.bogus = 1\nrun.steps = ten\nno equals sign\n")
    lines = [ln for ln, _ in exc.value.problems]
    assert lines == [2, 3, 4]
    assert "unknown key" in str(exc.value) and "line 3" in str(exc.value)


def test_duplicate_key_rejected():
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config("run.steps = 1\nrun.steps = 2\n")


@pytest.mark.parametrize("text, needle", [
    ("lattice.n1 = 12", "power of two"),
    ("lattice.n3 = 2", "n3"),
    ("lattice.lambda = 0", "lambda"),
    ("init.max_mode = 8", "Nyquist"),
    ("lattice.k_inner = 8\ninit.max_mode = 4", "Nyquist"),
    ("run.scheme = euler", "run.scheme"),
    ("init.kind = plasma", "init.kind"),
    ("init.transform = warp", "init.transform"),
    ("init.transform = shift:1.0", "offsets"),
    ("matter.mass = -1", "mass"),
    ("run.snapshot_every = 5", "snapshot_dir"),
])
def test_constraint_violations(text, needle):
    with pytest.raises(ConfigError, match=needle) as exc:
        parse_config(text)
    assert exc.value.problems[0][0] >= 1


values = st.fixed_dictionaries({
    "lattice.n1": st.sampled_from([4, 8, 16]),
    "lattice.n3": st.integers(5, 33),
    "lattice.lambda": st.floats(1e-3, 1e3),
    "lattice.dt": st.floats(1e-6, 1e-1),
    "init.seed": st.integers(0, 2 ** 40),
    "init.amplitude": st.floats(0, 10),
    "init.kind": st.sampled_from(["vacuum", "random_bandlimited", "abelian_wave"]),
    "run.steps": st.integers(0, 10 ** 6),
    "matter.enabled": st.booleans(),
    "matter.sign_convention": st.sampled_from(["as-printed", "conventional"]),
    "output.csv_path": st.text("abc_/.0123", min_size=1, max_size=12),
})


@settings(max_examples=50, deadline=None)
@given(vals=values)
def test_serialize_roundtrip(vals):
    base = dict(default_config().values)
    base.update(vals)
    base["init.max_mode"] = 1
    cfg = RunConfig(base)
    again = parse_config(serialize(cfg))
    assert again.values == cfg.values
    assert serialize(again) == serialize(cfg)


def test_every_key_documented_in_serialization():
    text = serialize(default_config())
    assert [ln.split(" = ")[0] for ln in text.splitlines()] == list(SCHEMA)


def test_with_values():
    cfg = default_config().with_values(run__steps=3)
    assert cfg["run.steps"] == 3
    with pytest.raises(ConfigError):
        default_config().with_values(run__nothing=1)
