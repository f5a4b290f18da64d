"""Command-line surface: subcommands, exit codes, file outputs, seed
precedence, and the summarize round trip."""

import subprocess
import sys

import numpy as np
import pytest

from fhmix import Dataset
from fhmix.cli import run_cli
from fhmix.io import fmt, read_dataset, write_dataset

from conftest import make_data


@pytest.fixture
def toy_csv(tmp_path):
    """Intercept-only dataset whose moment estimate of the effect
    variance is exactly 2 (see the toy3 fixture derivation)."""
    p = tmp_path / "toy.csv"
    p.write_text("area_id,y,se\na,0,1\nb,0,1\nc,3,1\n")
    return str(p)


@pytest.fixture
def data_csv(tmp_path):
    data = make_data(m=20, seed=5)
    ds = Dataset(y=data.y, d_var=data.d_var, X=data.X,
                 area_ids=[f"area{i:02d}" for i in range(20)])
    p = str(tmp_path / "data.csv")
    write_dataset(p, ds)
    return p


def read_lines(path):
    return open(path, newline="").read().splitlines()


class TestFitFh:
    def test_pr_point_fit(self, toy_csv, tmp_path, capsys):
        out = str(tmp_path / "out")
        assert run_cli(["fit-fh", toy_csv, "--out-dir", out, "--method", "pr"]) == 0
        stdout = capsys.readouterr().out
        assert "fit-fh method=pr m=3 r=1 a=2" in stdout
        lines = read_lines(out + "/params.csv")
        assert lines[0] == "parameter,mean,sd,q2.5,median,q97.5"
        assert lines[1].split(",")[0] == "beta1"
        name, mean, *rest = lines[2].split(",")
        assert name == "a" and float(mean) == pytest.approx(2.0, abs=1e-12)
        assert rest == ["", "", "", ""]
        areas = read_lines(out + "/areas.csv")
        assert areas[0] == "area_id,theta_mean,theta_sd,outlier_prob,shrinkage"
        assert len(areas) == 4
        # d = 1, a = 2: shrinkage weight d/(d+a) = 1/3
        assert float(areas[1].split(",")[4]) == pytest.approx(1 / 3, abs=1e-12)
        # outlier_prob column empty for the classical fit
        assert areas[1].split(",")[3] == ""

    def test_reml_is_default(self, toy_csv, tmp_path, capsys):
        out = str(tmp_path / "out")
        assert run_cli(["fit-fh", toy_csv, "--out-dir", out]) == 0
        assert "method=reml" in capsys.readouterr().out

    def test_hb_writes_chain_outputs(self, data_csv, tmp_path, capsys):
        out = str(tmp_path / "out")
        code = run_cli(["fit-fh", data_csv, "--out-dir", out, "--method", "hb",
                        "--iterations", "200", "--burn-in", "100", "--seed", "3"])
        assert code == 0
        assert "retained=100" in capsys.readouterr().out
        for name in ("params.csv", "areas.csv", "diagnostics.csv", "draws.bin"):
            assert (tmp_path / "out" / name).exists()
        params = read_lines(out + "/params.csv")
        assert [ln.split(",")[0] for ln in params[1:]] == ["beta1", "beta2", "a"]


class TestFitMix:
    def test_fit_and_outputs(self, data_csv, tmp_path, capsys):
        out = str(tmp_path / "out")
        code = run_cli(["fit-mix", data_csv, "--out-dir", out,
                        "--iterations", "200", "--burn-in", "100", "--seed", "3"])
        assert code == 0
        assert "fit-mix m=20 r=2" in capsys.readouterr().out
        params = read_lines(out + "/params.csv")
        assert [ln.split(",")[0] for ln in params[1:]] == \
            ["beta1", "beta2", "a1", "a2", "p"]
        areas = read_lines(out + "/areas.csv")
        assert len(areas) == 21
        assert areas[1].split(",")[0] == "area00"
        prob = float(areas[1].split(",")[3])
        assert 0.0 <= prob <= 1.0

    def test_improper_prior_exits_3(self, data_csv, tmp_path, capsys):
        out = str(tmp_path / "out")
        code = run_cli(["fit-mix", data_csv, "--out-dir", out, "--alpha1", "1.5"])
        assert code == 3
        err = capsys.readouterr().err
        assert "improper posterior" in err and "alpha1 < 1" in err

    def test_too_few_areas_exits_3(self, tmp_path, capsys):
        p = tmp_path / "tiny.csv"
        p.write_text("area_id,y,se,x1\na,1,1,2\nb,2,1,3\nc,0,1,4\n")
        code = run_cli(["fit-mix", str(p), "--out-dir", str(tmp_path / "o"),
                        "--alpha1", "-3", "--alpha2", "1.2"])
        assert code == 3
        assert "m > r + 2" in capsys.readouterr().err


class TestExitCodes:
    def test_unknown_subcommand(self, capsys):
        assert run_cli(["transmogrify"]) == 1
        assert "invalid choice" in capsys.readouterr().err

    def test_missing_required_flag(self, toy_csv, capsys):
        assert run_cli(["fit-fh", toy_csv]) == 1

    def test_missing_data_file(self, tmp_path, capsys):
        code = run_cli(["fit-fh", str(tmp_path / "ghost.csv"),
                        "--out-dir", str(tmp_path / "o")])
        assert code == 2
        assert "cannot open" in capsys.readouterr().err

    def test_malformed_csv(self, tmp_path, capsys):
        p = tmp_path / "bad.csv"
        p.write_text("wrong,header,here\n1,2,3\n")
        assert run_cli(["fit-fh", str(p), "--out-dir", str(tmp_path / "o")]) == 2

    def test_bad_chain_config(self, toy_csv, tmp_path, capsys):
        code = run_cli(["fit-fh", toy_csv, "--out-dir", str(tmp_path / "o"),
                        "--method", "hb", "--iterations", "50", "--burn-in", "40"])
        assert code == 1

    def test_bad_config_file(self, toy_csv, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("no equals sign\n")
        code = run_cli(["fit-fh", toy_csv, "--out-dir", str(tmp_path / "o"),
                        "--config", str(cfg)])
        assert code == 1


class TestSeedPrecedence:
    def run_hb(self, data_csv, out, extra, monkeypatch=None, env=None):
        if env:
            for k, v in env.items():
                monkeypatch.setenv(k, v)
        return run_cli(["fit-fh", data_csv, "--out-dir", out, "--method", "hb",
                        "--iterations", "200", "--burn-in", "100"] + extra)

    def test_env_seed_matches_flag_seed(self, data_csv, tmp_path, monkeypatch, capsys):
        o1, o2 = str(tmp_path / "o1"), str(tmp_path / "o2")
        monkeypatch.delenv("SAE_SEED", raising=False)
        assert self.run_hb(data_csv, o1, ["--seed", "11"]) == 0
        monkeypatch.setenv("SAE_SEED", "11")
        assert self.run_hb(data_csv, o2, []) == 0
        b1 = open(o1 + "/draws.bin", "rb").read()
        b2 = open(o2 + "/draws.bin", "rb").read()
        # same seed, same sampler stream; header differs only in the
        # config hash (the seed key is absent when it comes from the env)
        assert b1.split(b"\n", 1)[1] == b2.split(b"\n", 1)[1]

    def test_flag_beats_env(self, data_csv, tmp_path, monkeypatch, capsys):
        o1, o2 = str(tmp_path / "o1"), str(tmp_path / "o2")
        monkeypatch.setenv("SAE_SEED", "99")
        assert self.run_hb(data_csv, o1, ["--seed", "11"]) == 0
        monkeypatch.delenv("SAE_SEED", raising=False)
        assert self.run_hb(data_csv, o2, ["--seed", "11"]) == 0
        assert open(o1 + "/draws.bin", "rb").read() == \
            open(o2 + "/draws.bin", "rb").read()

    def test_config_file_seed_and_flag_override(self, data_csv, tmp_path,
                                                monkeypatch, capsys):
        monkeypatch.delenv("SAE_SEED", raising=False)
        cfg = tmp_path / "run.cfg"
        cfg.write_text("iterations = 300\nburn_in = 100\nseed = 5\n")
        out = str(tmp_path / "o1")
        assert run_cli(["fit-fh", data_csv, "--out-dir", out, "--method", "hb",
                        "--config", str(cfg)]) == 0
        assert "retained=200 seed=5" in capsys.readouterr().out
        # flag overrides the file for both burn-in and seed
        out2 = str(tmp_path / "o2")
        assert run_cli(["fit-fh", data_csv, "--out-dir", out2, "--method", "hb",
                        "--config", str(cfg), "--burn-in", "150",
                        "--seed", "7"]) == 0
        assert "retained=150 seed=7" in capsys.readouterr().out

    def test_bad_env_seed(self, data_csv, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("SAE_SEED", "lots")
        assert self.run_hb(data_csv, str(tmp_path / "o"), []) == 1
        assert "SAE_SEED" in capsys.readouterr().err


class TestSimulate:
    def test_study_deterministic(self, tmp_path, capsys):
        args = ["simulate", "--scenario", "mixture20", "--m", "20",
                "--reps", "2", "--seed", "7",
                "--iterations", "200", "--burn-in", "100"]
        p1, p2 = str(tmp_path / "s1.csv"), str(tmp_path / "s2.csv")
        assert run_cli(args + ["--out", p1]) == 0
        assert run_cli(args + ["--out", p2]) == 0
        assert open(p1, newline="").read() == open(p2, newline="").read()
        lines = read_lines(p1)
        assert lines[0] == "scenario,m,method,group,metric,value"
        # 2 methods x 3 groups x 4 metrics
        assert len(lines) == 25

    def test_contamination_writes_shrinkage(self, tmp_path, capsys):
        p = str(tmp_path / "shrink.csv")
        code = run_cli(["simulate", "--scenario", "contamination", "--m", "40",
                        "--cases", "t1,normal", "--seed", "3", "--out", p,
                        "--iterations", "150", "--burn-in", "50"])
        assert code == 0
        lines = read_lines(p)
        assert lines[0] == "scenario,method,area_id,weight,contaminated"
        assert len(lines) == 161
        assert {ln.split(",")[0] for ln in lines[1:]} == {"t1", "normal"}

    def test_unknown_scenario(self, tmp_path, capsys):
        code = run_cli(["simulate", "--scenario", "weird", "--m", "20",
                        "--out", str(tmp_path / "x.csv")])
        assert code == 1

    def test_unknown_case(self, tmp_path, capsys):
        code = run_cli(["simulate", "--scenario", "contamination", "--m", "40",
                        "--cases", "cauchy", "--out", str(tmp_path / "x.csv"),
                        "--iterations", "150", "--burn-in", "50"])
        assert code == 1
        assert "contamination case" in capsys.readouterr().err


class TestSummarize:
    def test_round_trip_identical_params(self, data_csv, tmp_path, capsys):
        fit_dir = str(tmp_path / "fit")
        assert run_cli(["fit-mix", data_csv, "--out-dir", fit_dir,
                        "--iterations", "200", "--burn-in", "100",
                        "--seed", "3"]) == 0
        sum_dir = str(tmp_path / "sum")
        assert run_cli(["summarize", fit_dir + "/draws.bin",
                        "--out-dir", sum_dir, "--data", data_csv]) == 0
        for name in ("params.csv", "areas.csv"):
            assert open(f"{fit_dir}/{name}", newline="").read() == \
                open(f"{sum_dir}/{name}", newline="").read(), name

    def test_without_data_skips_areas(self, data_csv, tmp_path, capsys):
        fit_dir = str(tmp_path / "fit")
        run_cli(["fit-fh", data_csv, "--out-dir", fit_dir, "--method", "hb",
                 "--iterations", "200", "--burn-in", "100", "--seed", "1"])
        sum_dir = str(tmp_path / "sum")
        assert run_cli(["summarize", fit_dir + "/draws.bin",
                        "--out-dir", sum_dir]) == 0
        assert (tmp_path / "sum" / "params.csv").exists()
        assert not (tmp_path / "sum" / "areas.csv").exists()

    def test_mismatched_data_exits_2(self, data_csv, toy_csv, tmp_path, capsys):
        fit_dir = str(tmp_path / "fit")
        run_cli(["fit-fh", data_csv, "--out-dir", fit_dir, "--method", "hb",
                 "--iterations", "200", "--burn-in", "100", "--seed", "1"])
        code = run_cli(["summarize", fit_dir + "/draws.bin",
                        "--out-dir", str(tmp_path / "sum"), "--data", toy_csv])
        assert code == 2
        assert "m=" in capsys.readouterr().err


def test_console_script_installed(toy_csv, tmp_path):
    out = str(tmp_path / "out")
    proc = subprocess.run(
        [sys.executable, "-m", "fhmix.cli", "fit-fh", toy_csv,
         "--out-dir", out, "--method", "pr"],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert "method=pr" in proc.stdout
    proc = subprocess.run(["fhmix", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "fit-mix" in proc.stdout
