import pytest

from eigmatch.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_mn_table_single_row(capsys):
    code, out, err = run_cli(capsys, "mn-table", "--example", "e2", "--ns", "8")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "n,M_n,M_n_full"
    assert lines[1].startswith("8,0.0851,")


def test_mn_table_deterministic_output(capsys):
    _, first, _ = run_cli(capsys, "mn-table", "--example", "e3", "--ns", "8,16")
    _, second, _ = run_cli(capsys, "mn-table", "--example", "e3", "--ns", "8,16")
    assert first == second
    assert first.splitlines()[1].startswith("8,0.7220,")


def test_mn_table2d_small_square(capsys):
    code, out, _ = run_cli(capsys, "mn-table2d", "--coef", "exp", "--ns", "900")
    assert code == 0
    assert out.splitlines()[1].startswith("900,0.0684,")


def test_exactness_e1(capsys):
    code, out, err = run_cli(capsys, "exactness", "--example", "e1", "--ns", "50")
    assert code == 0 and err == ""
    n, value = out.strip().splitlines()[1].split(",")
    assert n == "50" and float(value) <= 1e-10


def test_exactness_failure_exit_code(capsys):
    code, out, err = run_cli(
        capsys, "exactness", "--example", "e1", "--ns", "50", "--tol", "1e-30"
    )
    assert code == 1
    assert "FAIL" in err


def test_counterexample_locked_at_one(capsys):
    code, out, _ = run_cli(capsys, "counterexample", "--ns", "10,100")
    assert code == 0
    rows = [line.split(",") for line in out.strip().splitlines()[1:]]
    assert [r[1] for r in rows] == ["1.0000", "1.0000"]
    assert [r[2] for r in rows] == ["1", "1"]


def test_split_demo(capsys):
    code, out, _ = run_cli(capsys, "split-demo", "--example", "e5", "--n", "20")
    assert code == 0
    rows = [line.split(",") for line in out.strip().splitlines()[1:]]
    assert [(r[0], r[1]) for r in rows] == [("1", "20"), ("2", "19")]
    assert all(float(r[3]) <= 1e-8 for r in rows)


def test_bspline_verify_small_sweep(capsys):
    code, out, err = run_cli(
        capsys, "bspline-verify", "--family", "M", "--pmax", "3", "--nmax", "6"
    )
    assert code == 0 and err == ""
    lines = out.strip().splitlines()
    assert lines[0] == "p,k,n,max_error,pass"
    assert len(lines) == 1 + 5 * 5  # (p,k) in {(1,0),(2,0),(2,1),(3,0),(3,1)} x n in 2..6
    assert all(line.endswith(",1") for line in lines[1:])


def test_grid_infer_reports_expected_row(capsys):
    code, out, _ = run_cli(capsys, "grid-infer", "--pmax", "2", "--nmax", "10")
    assert code == 0
    rows = {tuple(line.split(",")[:2]): line.split(",") for line in out.strip().splitlines()[1:]}
    assert rows[("2", "0")][2] == "no_zero+interior"
    assert rows[("2", "0")][4] == "1"


def test_output_file(tmp_path, capsys):
    target = tmp_path / "table.csv"
    code, out, _ = run_cli(
        capsys, "--output", str(target), "counterexample", "--ns", "10"
    )
    assert code == 0 and out == ""
    assert target.read_text().splitlines()[1] == "10,1.0000,1"


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["mn-table", "--example", "bogus"])
    assert exc.value.code == 2


def test_threads_env_override(monkeypatch, capsys):
    monkeypatch.setenv("EIGMATCH_THREADS", "1")
    code, out, _ = run_cli(capsys, "mn-table", "--example", "e2", "--ns", "8")
    assert code == 0 and out.splitlines()[1].startswith("8,0.0851,")


def test_programmatic_experiment_registry(capsys):
    from eigmatch.cli import ExperimentSpec, run

    code = run(ExperimentSpec(name="counterexample", params={"ns": [10]}))
    out = capsys.readouterr().out
    assert code == 0
    assert out.splitlines()[1] == "10,1.0000,1"


def test_unknown_experiment_is_usage_error(capsys):
    from eigmatch.cli import ExperimentSpec, run

    assert run(ExperimentSpec(name="bogus")) == 2
    assert "unknown experiment" in capsys.readouterr().err


def test_non_square_n_is_usage_error(capsys):
    code = main(["mn-table2d", "--coef", "exp", "--ns", "10"])
    err = capsys.readouterr().err
    assert code == 2
    assert "not a perfect square" in err
