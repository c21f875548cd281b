"""CLI behavior: flag validation, exit codes, machine-parsable output,
byte-identical reruns.
"""

import json

import pytest

from dvbandit.cli import main


def _parse_kv(text: str) -> dict:
    out = {}
    for line in text.strip().splitlines():
        if "=" in line and " " not in line.split("=", 1)[0]:
            key, _, value = line.partition("=")
            out[key] = value
    return out


class TestRun:
    def test_wtcs_benchmark_prints_trial_values(self, capsys):
        code = main(["run", "--policy", "wtcs",
                     "--means", "2.0,1.5,1.0,0.5,0.0", "--sigma", "10",
                     "--c", "1", "--delta", "0.1", "--gap", "0.5",
                     "--trials", "1"])
        assert code == 0
        kv = _parse_kv(capsys.readouterr().out)
        assert kv["tau"] == "213"
        assert kv["eta"] == "180"
        assert kv["cost"] == "393"
        assert kv["error_rate"] == "0"

    def test_near_zero_noise_pswse_never_errs(self, capsys):
        code = main(["run", "--policy", "pswse", "--means", "3,0",
                     "--sigma", "0.001", "--c", "1", "--delta", "0.1",
                     "--trials", "10"])
        assert code == 0
        kv = _parse_kv(capsys.readouterr().out)
        assert kv["error_rate"] == "0"
        assert float(kv["mean_cost"]) < 10.0

    def test_missing_means_exits_2(self, capsys):
        code = main(["run", "--policy", "se", "--sigma", "10", "--c", "1",
                     "--delta", "0.1"])
        assert code == 2

    def test_wtcs_without_gap_exits_2_naming_the_flag(self, capsys):
        code = main(["run", "--policy", "wtcs", "--means", "1,0",
                     "--sigma", "10", "--c", "1", "--delta", "0.1"])
        assert code == 2
        assert "--gap" in capsys.readouterr().err

    def test_gap_on_non_wtcs_exits_2(self, capsys):
        code = main(["run", "--policy", "se", "--means", "1,0",
                     "--sigma", "10", "--c", "1", "--delta", "0.1",
                     "--gap", "1.0"])
        assert code == 2

    def test_bad_delta_exits_2(self, capsys):
        code = main(["run", "--policy", "se", "--means", "1,0",
                     "--sigma", "10", "--c", "1", "--delta", "1.5"])
        assert code == 2

    def test_tied_means_exit_2(self, capsys):
        code = main(["run", "--policy", "se", "--means", "1,1",
                     "--sigma", "10", "--c", "1", "--delta", "0.1"])
        assert code == 2

    def test_out_file_written(self, capsys, tmp_path):
        out = tmp_path / "row.csv"
        code = main(["run", "--policy", "wtcs", "--means", "2,1.5,1,0.5,0",
                     "--sigma", "10", "--c", "1", "--delta", "0.1",
                     "--gap", "0.5", "--trials", "2", "--out", str(out)])
        assert code == 0
        assert out.read_text().count("\n") == 2  # header + one row

    def test_bad_seed_exits_2(self, capsys):
        code = main(["run", "--policy", "se", "--means", "1,0",
                     "--sigma", "10", "--c", "1", "--delta", "0.1",
                     "--seed", "tomorrow"])
        assert code == 2

    def test_nontermination_exits_3(self, capsys, tmp_path, monkeypatch):
        import dvbandit.harness as hmod
        from dvbandit import PolicyConfig

        def tiny_cap(policy, inst):
            return PolicyConfig(kind=policy, max_rounds=2)

        monkeypatch.setattr(hmod, "_policy_config_for", tiny_cap)
        monkeypatch.setattr(
            "dvbandit.cli.harness.run_monte_carlo",
            lambda *a, **k: (_ for _ in ()).throw(
                hmod.NonTerminationError("cap", t=3)))
        code = main(["run", "--policy", "se", "--means", "1,0",
                     "--sigma", "10", "--c", "1", "--delta", "0.1"])
        assert code == 3


class TestExperiment:
    def test_exp1_writes_32_row_csv(self, capsys, tmp_path):
        out = tmp_path / "r.csv"
        code = main(["experiment", "--id", "exp1", "--trials", "2",
                     "--seed", "7", "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 33
        stdout = capsys.readouterr().out
        assert stdout.count("experiment=exp1") == 32

    def test_same_command_twice_is_byte_identical(self, capsys, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        argv = ["experiment", "--id", "exp3", "--trials", "2", "--seed", "7"]
        assert main(argv + ["--out", str(a)]) == 0
        assert main(argv + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_unknown_id_exits_2(self, capsys, tmp_path):
        code = main(["experiment", "--id", "exp9", "--out",
                     str(tmp_path / "r.csv")])
        assert code == 2

    def test_custom_spec_file(self, capsys, tmp_path):
        payload = {
            "id": "custom", "param_name": "gap",
            "points": [{"param_value": 3.0, "means": [3.0, 0.0],
                        "sigma": 1.0, "c": 1.0}],
            "policies": ["pswse"], "n_trials": 3, "master_seed": 4,
        }
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps(payload))
        out = tmp_path / "r.json"
        code = main(["experiment", "--spec", str(spec), "--out", str(out),
                     "--format", "json"])
        assert code == 0
        rows = json.loads(out.read_text())
        assert len(rows) == 1 and rows[0]["policy"] == "pswse"

    def test_missing_spec_file_exits_2(self, capsys, tmp_path):
        code = main(["experiment", "--spec", str(tmp_path / "absent.json"),
                     "--out", str(tmp_path / "r.csv")])
        assert code == 2


class TestBounds:
    def test_benchmark_values_printed(self, capsys):
        code = main(["bounds", "--K", "5", "--sigma", "10", "--c", "1",
                     "--delta", "0.1", "--gaps", "0.5,1,1.5,2"])
        assert code == 0
        out = capsys.readouterr().out
        kv = _parse_kv(out)
        assert float(kv["t_w"]) == pytest.approx(176.90727526991412, rel=1e-12)
        assert kv["lambda"] == "5"
        assert float(kv["wtcs_bound_exact"]) == pytest.approx(389.19600559381107)
        assert float(kv["wtcs_bound_theorem"]) == pytest.approx(530.7218258097424)
        assert float(kv["pswse_bound"]) == pytest.approx(1477.7194226779724)
        assert "elim_time gap=0.5 T=924.7620978696012" in out

    def test_zero_gap_exits_2(self, capsys):
        code = main(["bounds", "--K", "5", "--sigma", "10", "--c", "1",
                     "--delta", "0.1", "--gaps", "0,1,1.5,2"])
        assert code == 2

    def test_bad_delta_exits_2(self, capsys):
        code = main(["bounds", "--K", "5", "--sigma", "10", "--c", "1",
                     "--delta", "1.5", "--gaps", "0.5,1,1.5,2"])
        assert code == 2

    def test_k_gap_count_mismatch_exits_2(self, capsys):
        code = main(["bounds", "--K", "4", "--sigma", "10", "--c", "1",
                     "--delta", "0.1", "--gaps", "0.5,1,1.5,2"])
        assert code == 2


class TestOutput:
    def test_stdout_lines_are_key_value_parsable(self, capsys):
        main(["run", "--policy", "lucb", "--means", "2,0", "--sigma", "1",
              "--c", "1", "--delta", "0.1", "--trials", "2"])
        out = capsys.readouterr().out
        for line in out.strip().splitlines():
            assert "=" in line

    def test_diagnostics_go_to_stderr(self, capsys, tmp_path):
        out = tmp_path / "r.csv"
        main(["experiment", "--id", "exp2", "--trials", "1", "--out", str(out)])
        captured = capsys.readouterr()
        assert "wrote" in captured.err
        assert "wrote" not in captured.out

    def test_console_entry_point_runs(self):
        import subprocess
        import sys
        proc = subprocess.run(
            [sys.executable, "-m", "dvbandit.cli", "bounds", "--K", "2",
             "--sigma", "1", "--c", "1", "--delta", "0.5", "--gaps", "1"],
            capture_output=True, text=True)
        assert proc.returncode == 0
        assert "t_w=" in proc.stdout
