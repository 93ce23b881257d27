"""End-to-end command dispatch, exit codes, and artifact formats."""

import pytest

import trilyap.lyapunov
from trilyap.cli import main

SUPER = """
[psi1]
kind = "power"
alpha = 1.0

[psi2]
kind = "power"
alpha = 1.0

[f]
kind = "signed_power"
p = 1.0

[q]
kind = "constant"
value = 30.0
domain = [0.0, 1.0]

[interval]
a = 0.0
b = 1.0
"""

FREE = SUPER.replace("value = 30.0", "value = 0.0")

BC2 = SUPER.replace("value = 30.0", "value = 100.0") \
           .replace("domain = [0.0, 1.0]", "domain = [0.0, 6.0]") \
    + '\n[params]\nbc = "bc2"\nhorizon = 6.0\n'

SWEEP = SUPER + """
[sweep]
kind = "constant-q"
values = [30.0, 10.0]
"""


def write(tmp_path, text, name="scenario.toml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestExitCodes:
    def test_check_hypotheses_ok(self, tmp_path, capsys):
        cfg = write(tmp_path, SUPER)
        assert main(["check-hypotheses", "--config", cfg, "--out", str(tmp_path)]) == 0
        out = capsys.readouterr().out
        assert "PASS" in out and "FAIL" not in out

    def test_no_xi_exits_two(self, tmp_path):
        cfg = write(tmp_path, FREE)
        code = main(["solve-bc1", "--config", cfg, "--out", str(tmp_path)])
        assert code == 2
        # no inequality report may be produced for the unsatisfiable case
        assert not (tmp_path / "reports.csv").exists()
        assert main(["verify", "--config", cfg, "--out", str(tmp_path),
                     "--format", "csv"]) == 2
        assert not (tmp_path / "reports.csv").exists()

    def test_invalid_config_exits_three(self, tmp_path):
        cfg = write(tmp_path, "not toml ][")
        assert main(["verify", "--config", cfg, "--out", str(tmp_path)]) == 3

    def test_hypothesis_failure_exits_three(self, tmp_path):
        bad = SUPER.replace('kind = "power"\nalpha = 1.0\n\n[psi2]',
                            'kind = "custom"\nexpr = "s/(1+abs(s))"\n\n[psi2]', 1)
        cfg = write(tmp_path, bad)
        assert main(["verify", "--config", cfg, "--out", str(tmp_path)]) == 3
        assert main(["check-hypotheses", "--config", cfg, "--out", str(tmp_path)]) == 3

    def test_missing_file_exits_three(self, tmp_path):
        assert main(["verify", "--config", str(tmp_path / "nope.toml")]) == 3

    def test_usage_error_exits_three(self, tmp_path):
        assert main(["not-a-verb", "--config", "x"]) == 3

    def test_invariant_violation_exits_one(self, tmp_path, monkeypatch):
        # force a conclusive failure by inflating the threshold: the CLI
        # must map InvariantViolation onto exit code 1
        cfg = write(tmp_path, SUPER)
        monkeypatch.setattr(trilyap.lyapunov, "threshold",
                            lambda *args, **kwargs: 1e9)
        assert main(["verify", "--config", cfg, "--out", str(tmp_path)]) == 1


class TestArtifacts:
    def test_verify_csv(self, tmp_path):
        cfg = write(tmp_path, SUPER)
        assert main(["verify", "--config", cfg, "--out", str(tmp_path),
                     "--format", "csv"]) == 0
        lines = (tmp_path / "reports.csv").read_text().splitlines()
        assert lines[0] == "kind,a,b,c,xi,lhs,threshold,margin,holds"
        assert lines[1].startswith("thm21,")
        assert lines[2].startswith("cor21_abs,")
        assert lines[1].endswith(",true")

    def test_verify_jsonl(self, tmp_path):
        import json
        cfg = write(tmp_path, SUPER)
        assert main(["verify", "--config", cfg, "--out", str(tmp_path),
                     "--format", "jsonl"]) == 0
        lines = (tmp_path / "reports.jsonl").read_text().splitlines()
        recs = [json.loads(line) for line in lines]
        assert recs[0]["kind"] == "thm21"
        assert recs[0]["holds"] is True
        assert "quadrature_error" in recs[0]

    def test_verify_bc2_reports(self, tmp_path):
        cfg = write(tmp_path, BC2)
        assert main(["verify", "--config", cfg, "--out", str(tmp_path),
                     "--format", "csv"]) == 0
        lines = (tmp_path / "reports.csv").read_text().splitlines()
        kinds = [line.split(",")[0] for line in lines[1:]]
        assert kinds == ["thm22_left", "thm22_right", "thm22_full", "cor21_abs"]

    def test_solution_exports(self, tmp_path):
        cfg = write(tmp_path, SUPER)
        assert main(["solve-bc1", "--config", cfg, "--out", str(tmp_path)]) == 0
        traj_lines = (tmp_path / "trajectory.csv").read_text().splitlines()
        assert traj_lines[0] == "x,u,v2,v3"
        summary = (tmp_path / "summary.csv").read_text().splitlines()
        assert summary[0] == "a,b,c,xi,sign,max_u"
        assert len(summary) == 2

    def test_empty_reports_header_only(self):
        from trilyap.reporting import records_csv
        assert records_csv([]) == "kind,a,b,c,xi,lhs,threshold,margin,holds\n"

    def test_zero_count_verb(self, tmp_path, capsys):
        cfg = write(tmp_path, SUPER.replace("value = 30.0", "value = 400.0")
                    .replace("domain = [0.0, 1.0]", "domain = [0.0, 3.0]")
                    .replace("b = 1.0", "b = 3.0"))
        assert main(["zero-count", "--config", cfg, "--out", str(tmp_path),
                     "--format", "csv"]) == 0
        out = capsys.readouterr().out
        assert "diagnostic" in out
        lines = (tmp_path / "reports.csv").read_text().splitlines()
        assert lines[1].startswith("zero_count,")

    def test_oscillation_verb(self, tmp_path):
        cfg = write(tmp_path, SUPER.replace("value = 30.0", "value = 100.0")
                    .replace("domain = [0.0, 1.0]", "domain = [0.0, 12.0]")
                    + "\n[params]\nhorizon = 12.0\n")
        assert main(["oscillation", "--config", cfg, "--out", str(tmp_path)]) == 0
        lines = (tmp_path / "zerogap.csv").read_text().splitlines()
        assert lines[0] == "k,t_k,gap_k,window_norm_k"
        assert len(lines) > 4


class TestShippedScenarios:
    def test_lambda_star_scenario_verifies(self, tmp_path):
        import pathlib
        cfg = pathlib.Path(__file__).parent.parent / "scenarios" / "lambda-star.toml"
        assert main(["verify", "--config", str(cfg), "--out", str(tmp_path),
                     "--format", "csv"]) == 0
        lines = (tmp_path / "reports.csv").read_text().splitlines()
        fields = lines[1].split(",")
        assert fields[0] == "thm21"
        assert float(fields[6]) == pytest.approx(4.0, abs=1e-12)  # threshold
        assert fields[8] == "true"

    def test_env_var_output_directory(self, tmp_path, monkeypatch):
        cfg = write(tmp_path, SUPER)
        target = tmp_path / "from_env"
        monkeypatch.setenv("TRILYAP_OUT", str(target))
        monkeypatch.chdir(tmp_path)
        assert main(["verify", "--config", cfg, "--format", "csv"]) == 0
        assert (target / "reports.csv").exists()


class TestSweep:
    def test_constant_sweep_outcomes(self, tmp_path, capsys):
        cfg = write(tmp_path, SWEEP)
        assert main(["sweep", "--config", cfg, "--out", str(tmp_path),
                     "--format", "csv", "--seed", "7"]) == 0
        out = capsys.readouterr().out
        assert "instance 0: certified" in out
        assert "instance 1: NoXi" in out
        lines = (tmp_path / "reports.csv").read_text().splitlines()
        assert len(lines) == 3  # header + thm21 + cor21_abs of instance 0

    def test_sweep_deterministic_bytes(self, tmp_path):
        cfg = write(tmp_path, SUPER + "\n[sweep]\nkind = \"random-trig\"\ncount = 2\n")
        out1 = tmp_path / "run1"
        out2 = tmp_path / "run2"
        for out in (out1, out2):
            assert main(["sweep", "--config", cfg, "--out", str(out),
                         "--format", "jsonl", "--seed", "42"]) == 0
        assert (out1 / "reports.jsonl").read_bytes() == (out2 / "reports.jsonl").read_bytes()
