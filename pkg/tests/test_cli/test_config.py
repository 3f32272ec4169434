"""Test the configuration layer of the command-line interface."""

from wickfbm import cli, schemes
from wickfbm.backend import testing


def test_flags_override_the_file_which_overrides_the_defaults(tmp_path):
    path = tmp_path / "study.cfg"
    path.write_text("# a study\nn = 8\nhurst=0.6  # rough\n\ntimes=0.5,1.0\n")
    file_values = cli.read_config_file(str(path))
    assert file_values == {"n": 8, "hurst": 0.6, "times": (0.5, 1.0)}

    cfg = cli.resolve_config(file_values, {"n": 10})
    assert cfg.n == 10
    assert cfg.hurst == 0.6
    assert cfg.times == (0.5, 1.0)
    assert cfg.paths == cli.CliConfig().paths


def test_parse_value():
    assert cli.parse_value("n_list", "4, 8,16") == (4, 8, 16)
    assert cli.parse_value("out", "") is None
    with testing.raises(cli.ConfigError, match="Unknown configuration key"):
        cli.parse_value("steps", "4")
    with testing.raises(cli.ConfigError, match="Malformed"):
        cli.parse_value("n", "four")


def test_malformed_files_raise(tmp_path):
    path = tmp_path / "broken.cfg"
    path.write_text("n 8\n")
    with testing.raises(cli.ConfigError, match="key=value"):
        cli.read_config_file(str(path))
    with testing.raises(cli.ConfigError, match="Cannot read"):
        cli.read_config_file(str(tmp_path / "missing.cfg"))


@testing.parametrize(
    "overrides",
    [
        {"hurst": 0.5},
        {"n": 0},
        {"n_list": (16, 8)},
        {"scheme": "heston"},
        {"scheme": "drift", "sigma": 0.0},
        {"scheme": "drift", "mu": -64.0},
        {"scheme": "drift", "mu": -32.0, "n": 8},
        {"paths": 0},
        {"times": (1.5,)},
        {"tol": 0.0},
        {"format": "xml"},
        {"chunk_size": 0},
    ],
)
def test_invalid_values_raise(overrides):
    with testing.raises(cli.ConfigError, match="Invalid configuration"):
        cli.resolve_config({}, overrides)


def test_scheme_spec_reads_the_relevant_parameters():
    cfg = cli.resolve_config({}, {"scheme": "drift", "mu": 0.2, "sigma": 0.5})
    assert cli.scheme_spec(cfg) == schemes.drift(0.2, 0.5)
    cfg = cli.resolve_config({}, {"scheme": "linear_system"})
    spec = cli.scheme_spec(cfg)
    assert (spec.a2, spec.b1, spec.x0, spec.y0) == (1.0, -1.0, 0.0, 1.0)
