import csv
import io
import json
import subprocess
import sys

import pytest

from repcoh.cli import EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE, main


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def table(text):
    return list(csv.reader(io.StringIO(text)))


SIM = ["simulate", "--d", "3", "--epsilon", "0.1", "--q", "0", "--samples", "300", "--m-max", "40"]


class TestExitCodes:
    @pytest.mark.parametrize(
        "argv",
        [
            [],
            ["nope"],
            ["recurse", "--d", "4", "--epsilon", "0.1", "--q", "0"],
            ["recurse", "--d", "3,x", "--epsilon", "0.1", "--q", "0"],
            ["recurse", "--d", "3", "--epsilon", "0.1"],
            ["metrics", "--epsilon", "0.1", "--q", "0.7"],
            ["metrics", "--epsilon", "0.1", "--q", "0", "--threshold", "1.5"],
            ["simulate", "--d", "3", "--epsilon", "0.1", "--q", "0", "--samples", "0"],
            ["simulate", "--d", "3", "--epsilon", "0.1", "--q", "0", "--workers", "0"],
            ["oracle-check", "--n", "4"],
            ["zz-check", "--n-max", "17"],
        ],
    )
    def test_usage_errors(self, argv, capsys):
        code, out, err = run(argv, capsys)
        assert code == EXIT_USAGE
        assert "error" in err

    def test_failed_check(self, capsys):
        code, _, err = run(["oracle-check", "--n", "3", "--grid", "2", "--tol", "0"], capsys)
        assert code == EXIT_CHECK_FAILED
        assert "FAIL" in err

    def test_bad_seed_env(self, capsys, monkeypatch):
        monkeypatch.setenv("SEED", "abc")
        assert run(SIM, capsys)[0] == EXIT_USAGE


class TestOutputs:
    def test_recurse_csv(self, capsys):
        code, out, _ = run(["recurse", "--d", "3,5", "--epsilon", "0.1", "--q", "0", "--n-max", "2"], capsys)
        assert code == EXIT_OK
        rows = table(out)
        assert rows[0] == ["d", "n", "epsilon", "q", "log10_epsilon", "log10_q", "r", "D", "d_over_r", "eps_over_q"]
        assert len(rows) == 7
        level1 = dict(zip(rows[0], rows[2]))
        assert float(level1["eps_over_q"]) == pytest.approx(80 / 3)
        # noiseless q at level 0 leaves the ratio cell empty
        assert dict(zip(rows[0], rows[1]))["eps_over_q"] == ""

    def test_floats_round_trip(self, capsys):
        _, out, _ = run(["recurse", "--d", "3", "--epsilon", "0.1", "--q", "0.001", "--n-max", "1"], capsys)
        from repcoh.recurse import recurse_leading
        from repcoh.errchan import ErrorParams

        q1 = recurse_leading(3, ErrorParams(0.1, 0.001), 1)[1].params.q
        assert float(table(out)[2][3]) == q1

    def test_metrics_json(self, capsys):
        code, out, _ = run(["metrics", "--epsilon", "5e-4", "--q", "1.875e-5", "--format", "json"], capsys)
        assert code == EXIT_OK
        (row,) = json.loads(out)
        assert row["m_fail"] == 3142
        assert row["m_crit"] == 150

    def test_simulate_columns(self, capsys):
        code, out, _ = run(SIM, capsys)
        rows = table(out)
        assert code == EXIT_OK
        assert rows[0] == ["m", "mc_mean", "mc_stderr", "eq16", "eq17", "exact"]
        assert len(rows) == 41

    def test_oracle_check_pass(self, capsys):
        code, out, err = run(["oracle-check", "--n", "3", "--grid", "3"], capsys)
        assert code == EXIT_OK and "PASS" in err
        assert len(table(out)) == 10

    def test_zz_check(self, capsys):
        code, out, _ = run(["zz-check", "--n-max", "9", "--trials", "3"], capsys)
        assert code == EXIT_OK
        assert all(r[-1] == "true" for r in table(out)[1:])

    def test_sweep(self, capsys):
        code, out, _ = run(["sweep", "--d", "3", "--eps-num", "2", "--q-num", "2"], capsys)
        assert code == EXIT_OK and len(table(out)) == 5


class TestDeterminism:
    def test_byte_identical_across_workers(self, tmp_path):
        paths = []
        for i, workers in enumerate(("1", "8", "8", "1")):
            path = tmp_path / f"out{i}.csv"
            argv = SIM + ["--samples", "600", "--seed", "9", "--workers", workers, "-o", str(path)]
            assert main(argv) == EXIT_OK
            paths.append(path.read_bytes())
        assert len(set(paths)) == 1

    def test_seed_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SEED", "9")
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        main(SIM + ["-o", str(a)])
        monkeypatch.delenv("SEED")
        main(SIM + ["--seed", "9", "-o", str(b)])
        assert a.read_bytes() == b.read_bytes()


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "repcoh", "metrics", "--epsilon", "0.1", "--q", "0"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("epsilon,q,")
