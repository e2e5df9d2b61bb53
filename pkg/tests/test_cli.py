import json
import subprocess
import sys

import pytest

from bergman_ops import checkers as ck
from bergman_ops import cli


def run(argv, tmp_path, config=None, name="out.json"):
    args = list(argv)
    if config is not None:
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps(config))
        args += ["--config", str(cfg)]
    out = tmp_path / name
    code = cli.main(args + ["--out", str(out)])
    return code, (out.read_text() if out.exists() else None)


T21 = {"params": {"a": [0.8, 0.6], "b": [0.3, -0.1], "c": [0.0, 0.2], "n": 2, "alpha": 1.0,
                  "eta_angle": 1.9, "mu_angle": 0.7}}


class TestCheck:
    def test_match_exit_zero(self, tmp_path):
        code, text = run(["check", "--theorem", "T2_1"], tmp_path, T21)
        assert code == 0
        doc = json.loads(text)
        assert doc["verdict"] == "Pass" and doc["match"]
        assert [r["check_id"] for r in doc["records"]] == ["complex_symmetric", "kernel_symmetry"]

    def test_mismatch_exit_one(self, tmp_path):
        # a 1e-30 tolerance sits below the rounding level, so the Pass expectation is missed
        code, text = run(["check", "--theorem", "T2_1", "--tol", "1e-30"], tmp_path, T21)
        assert code == 1
        assert json.loads(text)["verdict"] != "Pass"

    def test_hermitian_expected_fail_is_a_match(self, tmp_path):
        cfg = {"params": {"a": [0, 1], "b": 0.2, "c": 0.3}}
        code, text = run(["check", "--theorem", "T2_4"], tmp_path, cfg)
        assert code == 0
        assert json.loads(text)["expected"] == "Fail"

    def test_s21_obstruction(self, tmp_path):
        cfg = {"params": {"b": 0.3, "c": 0.2}}
        code, text = run(["check", "--theorem", "T2_5"], tmp_path, cfg)
        doc = json.loads(text)
        assert code == 0 and doc["verdict"] == "Fail"
        assert doc["records"][0]["extras"]["comparison_difference"] > 1e-6

    @pytest.mark.parametrize("argv,config", [
        (["check", "--theorem", "T9"], {}),
        (["check", "--theorem", "T2_1", "--tol", "-1"], T21),
        (["check", "--theorem", "T2_1", "--trunc", "4"], T21),
        (["check", "--theorem", "T2_1"], {"params": {"a": 1, "b": 0.6, "c": 0.5}}),
        (["check", "--theorem", "T2_1"], {"params": {"b": 0.1}}),
        (["check", "--theorem", "T2_1"], {"params": {"c": "x"}}),
        (["check", "--theorem", "T2_2"], {"params": {"a0": 0}}),
        (["check", "--theorem", "T2_1"], {"params": {"c": 0.1, "alpha": -2}}),
        (["check", "--theorem", "LemmaAdjoint"], {"params": {"c": 0.1, "w": 0.9}}),
        (["check", "--theorem", "T2_1"], {"params": {"c": 0.1, "samples": [[0.9, 0.1]]}}),
        (["bogus"], None),
    ])
    def test_config_errors_exit_two(self, tmp_path, argv, config):
        code, _ = run(argv, tmp_path, config)
        assert code == 2

    def test_unreadable_config(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert cli.main(["check", "--theorem", "T2_1", "--config", str(bad)]) == 2

    def test_path_disagreement_exit_three(self, tmp_path, monkeypatch, path_disagreements):
        monkeypatch.setattr(ck, "conjugated_adjoint_by_basis",
                            lambda T, c: T.replace(entries=T.entries + 1e-3))
        with path_disagreements.expected():
            code, _ = run(["check", "--theorem", "T2_1"], tmp_path, T21)
        assert code == 3

    def test_csv_output(self, tmp_path):
        code, text = run(["check", "--theorem", "T2_3", "--format", "csv"], tmp_path,
                         {"params": {"c": [0.3, 0.4], "n": 2}}, "out.csv")
        assert code == 0
        lines = text.split("\n")
        assert "\r" not in text
        assert lines[0] == ",".join(cli.POINT_HEADER)
        assert [l.split(",")[2] for l in lines[1:4]] == ["complex_symmetric", "normal", "diagonal"]

    def test_stdin_config(self, tmp_path):
        proc = subprocess.run([sys.executable, "-m", "bergman_ops", "check", "--theorem", "T2_1",
                               "--config", "-"], input=json.dumps(T21), capture_output=True, text=True)
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["match"]


class TestSweep:
    def test_grid_sizes(self):
        assert len(cli.build_grid("T2_1", {}, 0)) >= 50
        assert len(cli.build_grid("T2_2", {}, 0)) >= 20
        assert len(cli.build_grid("T2_4", {}, 0)) >= 30

    def test_grid_seeded(self):
        assert cli.build_grid("T2_1", {}, 3) == cli.build_grid("T2_1", {}, 3)
        assert cli.build_grid("T2_1", {}, 3) != cli.build_grid("T2_1", {}, 4)

    def test_deterministic_across_workers(self, tmp_path, monkeypatch):
        cfg = {"grid": {"n_random": 4, "b_radii": [0.0, 0.3]}, "seed": 7}
        outs = []
        for workers in ("1", "4"):
            monkeypatch.setenv("BERGMAN_OPS_WORKERS", workers)
            code, text = run(["sweep", "--theorem", "T2_1"], tmp_path, cfg, f"w{workers}.json")
            assert code == 0
            outs.append(text)
        assert outs[0] == outs[1]
        doc = json.loads(outs[0])
        assert [r["index"] for r in doc["records"]] == list(range(doc["summary"]["points"]))

    def test_bad_worker_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("BERGMAN_OPS_WORKERS", "many")
        code, _ = run(["sweep", "--theorem", "T2_3"], tmp_path, {})
        assert code == 2

    def test_perturbed_sweep_all_fail_as_expected(self, tmp_path):
        cfg = {"grid": {"n_random": 0, "b_radii": [0.0, 0.3], "perturb_eps": 1e-3}}
        code, text = run(["sweep", "--theorem", "T2_1"], tmp_path, cfg)
        doc = json.loads(text)
        assert code == 0
        assert doc["summary"]["pass"] == 0


class TestConverge:
    def test_lemma_csv(self, tmp_path):
        cfg = {"params": {"b": 0.3, "c": 0.4, "w": 0.7}}
        code, text = run(["converge", "--check", "LemmaAdjoint", "--orders", "32,48,64,96"], tmp_path, cfg,
                         "c.csv")
        assert code == 0
        rows = [l.split(",") for l in text.strip().split("\n")]
        assert rows[0] == ["N", "check_id", "residual", "wall_ms"]
        assert [int(r[0]) for r in rows[1:]] == [32, 48, 64, 96]
        assert float(rows[3][2]) <= 1e-6

    def test_kernel_symmetry_s21(self, tmp_path):
        cfg = {"space": {"kind": "derivative_hardy"}, "params": {"b": 0.3, "c": 0.0}}
        code, _ = run(["converge", "--check", "KernelSymmetry"], tmp_path, cfg, "k.csv")
        assert code == 0

    def test_bad_orders(self, tmp_path):
        assert run(["converge", "--check", "LemmaAdjoint", "--orders", "32,x"], tmp_path, {})[0] == 2
        assert run(["converge", "--check", "LemmaAdjoint", "--orders", "4,8"], tmp_path, {})[0] == 2

    def test_is_monotone(self):
        assert cli.is_monotone([1e-3, 1e-6, 1.5e-6, 1e-9])
        assert not cli.is_monotone([1e-6, 1e-3])
        assert cli.is_monotone([1e-16, 5e-15, 2e-16])
