import pytest

from potrecon.config import ExperimentConfig, config_hash, load_config
from potrecon.errors import ConfigurationError, TheoremHypothesisError
from potrecon.potentials import FOUR_BUMPS, TWO_BUMPS

FULL_TEXT = """
[domain]
half_width = 1.0
radius = 0.7
n_per_side_forward = 120
n_per_side_inversion = 80
n_boundary = 192

[plan]
n_lines = 7
kappa_min = 0.5
kappa_max = 40
kappa_step = 0.25

[physics]
k = 5, 15.2
b = 0.5
m = 1, 2, 3

[potential]
bumps = 1.0, -0.25, 0.2, 0.15 ; -1.0, 0.25, -0.2, 0.15

[measurement]
mode = linearized
noise_level = 0.01

[bounds]
eps = 1e-3
m1 = 2.0

[output]
directory = results
heatmap = png
write_grids = false

[forward]
k = 15.2
kappa = 8.4
y_hat = -0.17, 0.98
"""


def test_defaults_from_empty_text():
    cfg = load_config(text="")
    assert isinstance(cfg, ExperimentConfig)
    assert cfg.domain.radius == 0.7
    assert cfg.domain.n_per_side_forward == 100
    assert cfg.physics.k == (15.2,)
    assert cfg.physics.b == 0.0
    assert cfg.measurement.mode == "full"
    assert cfg.potential.preset == "case1"
    assert cfg.potential.resolve() is TWO_BUMPS
    assert cfg.output.heatmap == "pgm"


def test_full_text_roundtrip():
    cfg = load_config(text=FULL_TEXT)
    assert cfg.domain.n_per_side_forward == 120
    assert cfg.plan.n_lines == 7
    assert cfg.plan.kappa_step == 0.25
    assert cfg.physics.k == (5.0, 15.2)
    assert cfg.physics.m == (1.0, 2.0, 3.0)
    assert cfg.physics.b == 0.5
    assert cfg.measurement.mode == "linearized"
    bumps = cfg.potential.resolve()
    assert len(bumps) == 2
    assert bumps[0].amplitude == 1.0
    assert bumps[0].center == (-0.25, 0.2)
    assert bumps[0].width == 0.15
    assert cfg.output.directory == "results"
    assert cfg.output.write_grids is False
    fwd = cfg.forward.direction()
    assert fwd[0] == pytest.approx(-0.17 / (0.17**2 + 0.98**2) ** 0.5)


def test_plan_builds_sampling():
    cfg = load_config(text=FULL_TEXT)
    plan = cfg.plan.build()
    assert plan.n_lines == 7
    assert plan.kappas[0] == 0.5


def test_preset_selected_by_name():
    cfg = load_config(text="[potential]\npreset = case2\n")
    assert cfg.potential.resolve() is FOUR_BUMPS
    constant = load_config(text="[potential]\npreset = constant\n")
    assert constant.potential.resolve() == "constant"


def test_unknown_section_rejected():
    with pytest.raises(ConfigurationError) as exc:
        load_config(text="[oops]\nx = 1\n")
    assert "oops" in str(exc.value)


def test_unknown_key_rejected():
    with pytest.raises(ConfigurationError) as exc:
        load_config(text="[domain]\nradiuss = 0.7\n")
    assert "radiuss" in str(exc.value)


@pytest.mark.parametrize(
    "text",
    [
        "[domain]\nradius = seven\n",
        "[domain]\nn_boundary = 2.5\n",
        "[physics]\nk = \n",
        "[measurement]\nmode = magic\n",
        "[output]\nheatmap = bmp\n",
        "[potential]\nbumps = 1.0, 0.0\n",
        "[potential]\npreset = case9\n",
        "[forward]\ny_hat = 1.0\n",
        "[output]\nwrite_grids = maybe\n",
    ],
)
def test_bad_values_rejected(text):
    with pytest.raises(ConfigurationError):
        load_config(text=text)


@pytest.mark.parametrize(
    "text",
    [
        "[domain]\nradius = 1.5\n",
        "[domain]\nn_boundary = 4\n",
        "[plan]\nkappa_step = 0\n",
        "[physics]\nk = -3\n",
        "[physics]\nb = -0.5\n",
        "[physics]\nm = 0\n",
        "[measurement]\nnoise_level = -0.1\n",
        "[forward]\ny_hat = 0, 0\n",
    ],
)
def test_semantic_validation(text):
    with pytest.raises(ConfigurationError):
        load_config(text=text)


def test_missing_file_rejected(tmp_path):
    with pytest.raises(ConfigurationError):
        load_config(tmp_path / "nope.ini")


def test_file_and_text_equivalent(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text(FULL_TEXT)
    assert config_hash(load_config(path)) == config_hash(load_config(text=FULL_TEXT))


def test_bounds_hypotheses_checked_late():
    """eps = 1 parses; the theorem hypotheses only apply when params are built."""
    cfg = load_config(text="[bounds]\neps = 1.0\n")
    with pytest.raises(TheoremHypothesisError):
        cfg.bounds.params()
    good = load_config(text="[bounds]\neps = 1e-2\nm1 = 3.0\n")
    params = good.bounds.params()
    assert params.eps == 1e-2
    assert params.m1 == 3.0


def test_config_hash_sensitivity():
    base = config_hash(load_config(text=""))
    assert base == config_hash(load_config(text=""))
    assert base != config_hash(load_config(text=""), seed=1)
    assert base != config_hash(load_config(text="[physics]\nb = 0.1\n"))
    assert len(base) == 64
    int(base, 16)
