import pytest

from em_sequence_toolkit.errors import ConfigError
from em_sequence_toolkit.makedata.config_parser import (
    RunConfig,
    RunConfigParserTSV,
    Thresholds,
    resolve_config_path,
)


def _write_tsv(path, rows, header="setting_name\tvalue"):

    with open(path, "w") as f:
        f.write(header + "\n")
        for name, value in rows:
            f.write("{}\t{}\n".format(name, value))
    return str(path)


def test_defaults():

    config = RunConfig()

    assert config.n == 1000
    assert config.engine == "fast"
    assert config.checkpoints == [1000, 3000, 10000, 30000, 100000]
    assert config.residuals is False
    assert config.thresholds == Thresholds()
    assert config.thresholds.theorem1_final_gate == 0.05
    assert config.thresholds.trend_window == 3
    assert config.thresholds.balance_l2 == [1.0 / 25.0, 8.0 / 11.0]


def test_update_routes_thresholds():

    config = RunConfig(n=5000, trend_window=4)

    assert config.n == 5000
    assert config.thresholds.trend_window == 4

    with pytest.raises(ConfigError):
        RunConfig(not_a_setting=1)


def test_effective_checkpoints():

    assert RunConfig(n=5000).effective_checkpoints() == [1000, 3000, 5000]
    assert RunConfig(n=1000).effective_checkpoints() == [1000]
    assert RunConfig(n=500).effective_checkpoints() == [500]
    assert RunConfig(n=200, checkpoints=[100, 50, 100]).effective_checkpoints() == [50, 100, 200]


def test_tsv_parser(tmp_path):

    path = _write_tsv(
        tmp_path / "run.tsv",
        [
            ("command", "verify"),
            ("n", "20000"),
            ("checkpoints", "1000,5000"),
            ("residuals", "true"),
            ("words", "0,1001"),
            ("max_depth", ""),
            ("balance_l2", "1/25,8/11"),
            ("theorem1_final_gate", "0.02"),
        ],
    )
    config = RunConfigParserTSV(path).get_run_config()

    assert config.command == "verify"
    assert config.n == 20000
    assert config.checkpoints == [1000, 5000]
    assert config.residuals is True
    assert config.words == ["0", "1001"]
    assert config.max_depth is None
    assert config.thresholds.balance_l2 == pytest.approx([0.04, 8.0 / 11.0])
    assert config.thresholds.theorem1_final_gate == 0.02

    # Settings not in the file keep their defaults.
    assert config.engine == "fast"


def test_tsv_round_trip(tmp_path):
    """
    A config written with to_tsv reads back equal.
    """
    config = RunConfig(command="tree", n=777, dot="tree.dot", checkpoints=[100, 700], color_balance=False)
    path = tmp_path / "saved.tsv"
    path.write_text(config.to_tsv())

    assert RunConfigParserTSV(str(path)).get_run_config() == config


def test_tsv_errors(tmp_path):

    with pytest.raises(ConfigError):
        RunConfigParserTSV(_write_tsv(tmp_path / "unknown.tsv", [("colour", "red")])).get_settings()

    with pytest.raises(ConfigError):
        RunConfigParserTSV(_write_tsv(tmp_path / "bad_value.tsv", [("n", "many")])).get_settings()

    with pytest.raises(ConfigError):
        RunConfigParserTSV(_write_tsv(tmp_path / "dup.tsv", [("n", "1"), ("n", "2")]))

    with pytest.raises(ConfigError):
        RunConfigParserTSV(_write_tsv(tmp_path / "header.tsv", [("n", "1")], header="name\tsetting"))

    with pytest.raises(ConfigError):
        RunConfigParserTSV(str(tmp_path / "missing.tsv"))


def test_resolve_config_path(monkeypatch):

    assert resolve_config_path("given.tsv") == "given.tsv"
    assert resolve_config_path(None) is None

    monkeypatch.setenv("EMSEQ_CONFIG", "from_env.tsv")
    assert resolve_config_path(None) == "from_env.tsv"
    assert resolve_config_path("given.tsv") == "given.tsv"
