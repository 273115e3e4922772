from pathlib import Path

import pytest

from gossipsim.cli import main


def test_spectral_output(capsys):
    code = main(["spectral", "--graph", "ring:16", "--kappa", "0.5", "--rounds", "3"])
    out = capsys.readouterr().out
    assert code == 0
    assert "n: 16" in out and "diameter: 8" in out
    assert "lambda:" in out and "spectral gap:" in out
    assert "eta:" in out and "rho(lambda, R=3):" in out


def test_factorize_output(capsys):
    code = main(["factorize", "--graph", "star:9"])
    out = capsys.readouterr().out
    assert code == 0
    assert "plan length: 2" in out


def test_factorize_dump(capsys):
    code = main(["factorize", "--graph", "path:3", "--dump"])
    out = capsys.readouterr().out
    assert code == 0
    assert "factor 0:" in out and "factor 1:" in out


def test_bounds_output(capsys):
    code = main([
        "bounds", "--delta", "1", "--L", "1", "--sigma2", "1", "--n", "8",
        "--D", "4", "--lam", "0.75", "--eps", "0.1", "--vs02", "1", "--vs2", "1",
    ])
    out = capsys.readouterr().out
    assert code == 0
    assert "lower bound (gossip):" in out
    assert "O(1)" in out and "O(n*vs/(1-lam)^(3/2))" in out


def test_run_writes_trace(tmp_path, capsys):
    out = tmp_path / "trace.csv"
    code = main([
        "run", "--graph", "ring:4", "--objective", "quad:d=4,vs0=0.5,sigma=0.2",
        "--algorithm", "dsgt:alpha=0.05", "--iterations", "25",
        "--eps", "0.5", "--seed", "3", "--out", str(out),
    ])
    printed = capsys.readouterr().out
    assert code == 0
    assert out.exists()
    assert "status: ok" in printed
    assert "T_eps[0.5]:" in printed
    header = out.read_text().splitlines()[0]
    assert header == "iter,loss,grad_norm,consensus_x,consensus_y,queries"


def test_run_from_config_with_flag_overrides(tmp_path):
    cfg = tmp_path / "exp.ini"
    cfg.write_text(
        "[experiment]\n"
        "graph = ring:4\n"
        "objective = quad:d=3,vs0=0,sigma=0\n"
        "algorithms = dpsgd:alpha=0.05\n"
        "iterations = 10\n"
        f"out = {tmp_path}\n"
    )
    out = tmp_path / "t.csv"
    code = main([
        "run", "--config", str(cfg), "--iterations", "5",
        "--seed", "0", "--out", str(out),
    ])
    assert code == 0
    rows = out.read_text().strip().splitlines()
    assert len(rows) == 2 + 5  # header + initial row + 5 iterations


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_run_diverged_exit_code(tmp_path):
    code = main([
        "run", "--graph", "ring:4", "--objective", "quad:d=4,vs0=0,sigma=0",
        "--algorithm", "dpsgd:alpha=1e9", "--iterations", "100",
        "--seed", "0", "--out", str(tmp_path / "t.csv"),
    ])
    assert code == 3


def test_config_error_exit_code(tmp_path, capsys):
    code = main([
        "run", "--graph", "hexagram:4", "--objective", "quad:d=2,vs0=0,sigma=0",
        "--algorithm", "dpsgd:alpha=0.1", "--seed", "0",
        "--out", str(tmp_path / "t.csv"),
    ])
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_run_missing_fields(tmp_path, capsys):
    code = main(["run", "--seed", "0", "--out", str(tmp_path / "t.csv")])
    assert code == 2


def test_sweep_cli(tmp_path, capsys):
    cfg = tmp_path / "exp.ini"
    cfg.write_text(
        "[experiment]\n"
        "graph = ring:4\n"
        "objective = quad:d=3,vs0=0.5,sigma=0.1\n"
        "algorithms =\n"
        "    dpsgd:alpha=0.05\n"
        "    dsgt:alpha=0.05\n"
        "seeds = 0\n"
        "iterations = 15\n"
        "eps_grid = 0.5\n"
        f"out = {tmp_path / 'ignored'}\n"
    )
    out_dir = tmp_path / "results"
    code = main(["sweep", "--config", str(cfg), "--out", str(out_dir)])
    printed = capsys.readouterr().out
    assert code == 0
    assert (out_dir / "summary.csv").exists()
    assert (out_dir / "summary_mean.csv").exists()
    assert printed.count("*") == 2  # one best marker per algorithm
    assert len(list(out_dir.glob("trace_*.csv"))) == 2


def test_sweep_seed_override(tmp_path):
    cfg = tmp_path / "exp.ini"
    cfg.write_text(
        "[experiment]\n"
        "graph = ring:4\n"
        "objective = quad:d=3,vs0=0,sigma=0.1\n"
        "algorithms = dpsgd:alpha=0.05\n"
        "seeds = 0,1,2\n"
        "iterations = 10\n"
        f"out = {tmp_path / 'x'}\n"
    )
    out_dir = tmp_path / "r2"
    code = main(["sweep", "--config", str(cfg), "--out", str(out_dir), "--seed", "5"])
    assert code == 0
    assert len(list(out_dir.glob("trace_*.csv"))) == 1


def test_missing_config_file(tmp_path):
    code = main(["sweep", "--config", str(tmp_path / "nope.ini"), "--out", str(tmp_path)])
    assert code == 2
