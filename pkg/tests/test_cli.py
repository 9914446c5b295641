import csv
import io
import json
import subprocess
import sys

import pytest

from buchstab.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out


def run_proc(*argv):
    proc = subprocess.run(
        [sys.executable, "-m", "buchstab", *argv],
        capture_output=True, text=True,
    )
    return proc.returncode, proc.stdout, proc.stderr


def parse_csv(text):
    return list(csv.reader(io.StringIO(text)))


def test_counts_single_cell(capsys):
    code, out = run_cli(capsys, "counts", "--n", "1")
    assert code == 0
    rows = parse_csv(out)
    assert rows[0] == ["n", "k=1"]
    assert rows[1] == ["1", "1"]


def test_counts_row10(capsys):
    code, out = run_cli(capsys, "counts", "--n", "10")
    assert code == 0
    rows = parse_csv(out)
    assert rows[10][:6] == ["10", "2293839", "525105", "223200", "151200", "72576"]
    assert rows[3] == ["3", "4", "0", "2"] + [""] * 7


def test_dist(capsys):
    code, out = run_cli(capsys, "dist", "--n", "4")
    assert code == 0
    rows = parse_csv(out)
    assert rows[1:] == [
        ["1", "5/8"], ["2", "1/8"], ["3", "0"], ["4", "1/4"],
    ]


def test_tail(capsys):
    code, out = run_cli(capsys, "tail", "--n", "3", "--k", "2")
    assert code == 0
    assert parse_csv(out)[1] == ["3", "2", "1/3"]


def test_variance_series(capsys):
    code, out = run_cli(capsys, "variance-series", "--n", "3")
    assert code == 0
    rows = parse_csv(out)
    assert rows[2] == ["2", "1/4", "0.125000"]
    assert rows[3] == ["3", "8/9", "0.296296"]


def test_omega_value(capsys):
    code, out = run_cli(capsys, "omega", "--x", "1.5", "--max-interval", "10")
    assert code == 0
    assert out == "0.666667\n"


def test_omega_k_value(capsys):
    code, out = run_cli(capsys, "omega-k", "--k", "1", "--x", "3")
    assert code == 0
    assert out == "1.69315\n"


def test_omega_k_table_subset(capsys):
    code, out = run_cli(
        capsys, "omega-k-table", "--k", "0.5", "--x-list", "2", "16",
    )
    assert code == 0
    rows = parse_csv(out)
    assert rows[1][0] == "2" and rows[1][1].startswith("1.0000")
    # reference table lists 3.3302 at x=16; our value within its band
    assert abs(float(rows[2][1]) - 3.3302) < 2e-3 * 3.3302


def test_constant_small_config(capsys):
    code, out = run_cli(
        capsys, "constant", "--moment", "2", "--max-interval", "50",
        "--grid-log2", "10",
    )
    assert code == 0
    lines = dict(line.split("=", 1) for line in out.strip().splitlines())
    assert abs(float(lines["constant"]) - 1.3070) < 2e-3
    assert float(lines["error_budget"]) < 1e-4
    assert lines["first_interval_exact"] == "3/4"


def test_json_and_csv_agree(capsys):
    code, csv_out = run_cli(capsys, "dist", "--n", "5")
    code2, json_out = run_cli(capsys, "dist", "--n", "5", "--format", "json")
    assert code == code2 == 0
    doc = json.loads(json_out)
    assert doc["rows"] == [r for r in parse_csv(csv_out)[1:]]
    assert doc["columns"] == parse_csv(csv_out)[0]


def test_out_file_matches_stdout(capsys, tmp_path):
    path = tmp_path / "t.csv"
    code, out = run_cli(capsys, "counts", "--n", "6")
    code2, _ = run_cli(capsys, "counts", "--n", "6", "--out", str(path))
    assert code == code2 == 0
    assert path.read_text() == out


def test_cache_round_trip(capsys, tmp_path):
    cache_dir = str(tmp_path / "cache")
    args = ("counts", "--n", "8", "--cache-dir", cache_dir)
    _, first = run_cli(capsys, *args)
    _, second = run_cli(capsys, *args)  # served from cache
    assert first == second
    code, listing = run_cli(capsys, "cache", "list", "--cache-dir", cache_dir)
    assert code == 0
    assert len(listing.strip().splitlines()) == 1
    code, cleared = run_cli(capsys, "cache", "clear", "--cache-dir", cache_dir)
    assert code == 0
    assert cleared == "removed=1\n"


def test_usage_error_exit_codes():
    code, _, err = run_proc("counts")
    assert code == 2
    code, _, err = run_proc("omega", "--x", "0.5", "--max-interval", "10")
    assert code == 2
    assert "error" in err


def test_resource_cap_exit_code():
    code, _, err = run_proc("counts", "--n", "1000000")
    assert code == 3
    assert "cap" in err


def test_unknown_class_exit_code():
    code, _, err = run_proc("counts", "--n", "3", "--class", "widgets")
    assert code == 2


def test_persistence_error_exit_code(tmp_path):
    bad = tmp_path / "not-a-dir-file"
    bad.write_text("occupied")
    code, _, err = run_proc(
        "counts", "--n", "3", "--cache-dir", str(bad / "sub"),
    )
    assert code == 4


@pytest.mark.parametrize("argv", [
    ("counts", "--n", "7"),
    ("dist", "--n", "6"),
    ("tail", "--n", "6", "--k", "2"),
    ("variance-series", "--n", "5"),
    ("omega", "--x", "2.5", "--max-interval", "10"),
    ("omega-k", "--k", "0.5", "--x", "4.5"),
    ("omega-k-table", "--k", "1", "--x-list", "2", "3", "4"),
])
def test_repeated_runs_byte_identical(argv):
    code1, out1, _ = run_proc(*argv)
    code2, out2, _ = run_proc(*argv)
    assert code1 == code2 == 0
    assert out1 == out2
