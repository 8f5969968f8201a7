import json

import pandas as pd
import pytest

from conftest import GOLDEN_30
from em_sequence_toolkit.cli import EXIT_OK, EXIT_USAGE, run
from em_sequence_toolkit.makedata.bit_io import load_bits, load_text
from em_sequence_toolkit.makedata.config_parser import RunConfigParserTSV


def test_gen_golden(capsys):

    assert run(["gen", "-n", "30"]) == EXIT_OK
    assert capsys.readouterr().out == GOLDEN_30 + "\n"


@pytest.mark.parametrize(
    "argv",
    [
        ["gen", "-n", "0"],
        ["gen", "-n", "100001", "--engine", "naive"],
        ["gen", "--bogus"],
        ["gen", "--engine", "quantum"],
        [],
        ["verify", "-n", "500", "--lemma", "4.7"],
        ["verify", "-n", "50", "--lemma", "none", "--residuals", "--jobs", "2", "--checkpoints", "20,50"],
    ],
)
def test_usage_errors(argv):

    assert run(argv) == EXIT_USAGE


@pytest.mark.parametrize("output_format", ["text", "bin"])
def test_engines_write_identical_files(tmp_path, output_format):

    naive_path = tmp_path / "naive.out"
    fast_path = tmp_path / "fast.out"

    for engine, path in (("naive", naive_path), ("fast", fast_path)):
        argv = ["gen", "-n", "1500", "--engine", engine, "--format", output_format, "--out", str(path)]
        assert run(argv) == EXIT_OK

    assert naive_path.read_bytes() == fast_path.read_bytes()

    loader = load_text if output_format == "text" else load_bits
    seq = loader(str(fast_path))
    assert len(seq) == 1500
    assert seq.to_string()[:30] == GOLDEN_30


def test_gen_trace(tmp_path):

    trace_path = tmp_path / "trace.csv"
    assert run(["gen", "-n", "31", "--out", str(tmp_path / "bits.txt"), "--trace", str(trace_path)]) == EXIT_OK

    lines = trace_path.read_text().splitlines()
    assert lines[0] == "t,match_start,match_len,source_end,emitted"
    assert lines[-1] == "31,27,4,5,0"


def test_save_and_reuse_config(tmp_path):

    config_path = tmp_path / "run.tsv"
    first = tmp_path / "first.txt"
    second = tmp_path / "second.txt"

    assert run(["--save-config", str(config_path), "gen", "-n", "40", "--out", str(first)]) == EXIT_OK

    saved = RunConfigParserTSV(str(config_path)).get_run_config()
    assert saved.n == 40
    assert saved.command == "gen"

    assert run(["--config", str(config_path), "gen", "--out", str(second)]) == EXIT_OK
    assert first.read_text() == second.read_text()

    # Flags win over the file.
    assert run(["--config", str(config_path), "gen", "-n", "20", "--out", str(second)]) == EXIT_OK
    assert second.read_text() == GOLDEN_30[:20] + "\n"


def test_config_from_environment(tmp_path, monkeypatch):

    config_path = tmp_path / "run.tsv"
    config_path.write_text("setting_name\tvalue\nn\t25\n")
    monkeypatch.setenv("EMSEQ_CONFIG", str(config_path))

    out = tmp_path / "bits.txt"
    assert run(["gen", "--out", str(out)]) == EXIT_OK
    assert out.read_text() == GOLDEN_30[:25] + "\n"


def test_bad_config_file(tmp_path):

    config_path = tmp_path / "run.tsv"
    config_path.write_text("setting_name\tvalue\nbogus\t1\n")

    assert run(["--config", str(config_path), "gen", "-n", "10"]) == EXIT_USAGE


def test_verify(tmp_path):

    report_path = tmp_path / "report.json"
    summary_path = tmp_path / "summary.csv"
    argv = [
        "verify",
        "-n",
        "2000",
        "--samples",
        "200",
        "--maxlen",
        "8",
        "--report",
        str(report_path),
        "--summary",
        str(summary_path),
    ]

    assert run(argv) == EXIT_OK

    payload = json.loads(report_path.read_text())
    assert payload["pass"] is True
    assert len(payload["checks"]) == 7
    assert payload["config"]["samples"] == 200

    summary = pd.read_csv(summary_path)
    assert list(summary.columns) == ["check", "population", "violations", "worst_residual", "pass"]
    assert summary["pass"].all()


def test_stats(tmp_path):

    out = tmp_path / "stats.json"
    assert run(["stats", "-n", "1000", "--word", "1001", "--word", "0", "--out", str(out)]) == EXIT_OK

    payload = json.loads(out.read_text())
    assert payload["n"] == 1000
    assert payload["alpha"] == 13
    assert set(payload["counts"]) == {"1001", "0"}
    assert payload["balance"]["check"] == "balance-l1"
    assert payload["balance"]["pass"] is True


def test_rn(tmp_path):

    out = tmp_path / "rn.json"
    words_out = tmp_path / "rn.csv"
    assert run(["rn", "-n", "1000", "--out", str(out), "--words-out", str(words_out)]) == EXIT_OK

    payload = json.loads(out.read_text())
    assert payload["rn_size"] == 987
    assert payload["x"] == 988
    assert payload["identity_holds"] is True
    assert len(pd.read_csv(words_out, dtype={"word": str})) == 987


def test_tree(tmp_path):

    dot = tmp_path / "tree.dot"
    stats_out = tmp_path / "stats.json"
    argv = ["tree", "-n", "500", "--dot", str(dot), "--max-depth", "6", "--no-color", "--stats-out", str(stats_out)]

    assert run(argv) == EXIT_OK
    assert dot.read_text().startswith("digraph Tn {")
    assert "green" not in dot.read_text()
    assert json.loads(stats_out.read_text())["n"] == 500


def test_growth(tmp_path):

    out = tmp_path / "growth.json"
    assert run(["growth", "-n", "2000", "--checkpoints", "100,1000", "--report", str(out)]) == EXIT_OK

    payload = json.loads(out.read_text())
    assert payload["check"] == "growth"
    assert payload["residuals"]["checkpoint"] == [100, 1000, 2000]
