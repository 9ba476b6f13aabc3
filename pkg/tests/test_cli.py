import json

import numpy as np
import pytest

from pmst import umbrella, real_family_value, umbrella_classical_value
from pmst.cli import main
from pmst import io

SQ3 = np.sqrt(3.0)


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestConstruct:
    def test_umbrella_bundle(self, tmp_path, capsys):
        out = tmp_path / "bundle.json"
        code, stdout, _ = run_cli(
            capsys, "construct", "--method", "umbrella", "--c", "1", "--out", str(out)
        )
        assert code == 0
        bundle = io.load_bundle(str(out))
        w_expected, _, _ = umbrella(1.0)
        assert np.asarray(bundle.witness.w) == pytest.approx(w_expected.w, abs=1e-15)
        assert "ideal maximum" in stdout

    def test_general_worked_example(self, tmp_path, capsys):
        states_file = tmp_path / "states.json"
        states_file.write_text(
            json.dumps(
                {
                    "states": [
                        [1, 0, 0],
                        [0.5, 0, SQ3 / 2],
                        [-SQ3 / 2, 0, -0.5],
                    ]
                }
            )
        )
        out = tmp_path / "bundle.json"
        code, _, _ = run_cli(
            capsys,
            "construct", "--method", "general",
            "--states", str(states_file),
            "--r", f"1,1,{float(SQ3)!r}",
            "--out", str(out),
        )
        assert code == 0
        bundle = io.load_bundle(str(out))
        expected = np.array([[SQ3 / 2, 0.5], [SQ3 / 2, -0.5], [-SQ3, 0.0]])
        assert bundle.witness.w == pytest.approx(expected, abs=1e-12)
        assert bundle.params["eigenvalues"] == pytest.approx(
            [(3 + 2 * SQ3) / 2, 0.5, 0.0], abs=1e-12
        )

    def test_coplanar_4x3_exits_2(self, tmp_path, capsys):
        states_file = tmp_path / "states.json"
        angles = [0.0, 2.0, 4.0, 5.0]
        states_file.write_text(
            json.dumps(
                {"states": [[np.cos(t), 0.0, np.sin(t)] for t in angles]}
            )
        )
        code, _, stderr = run_cli(
            capsys, "construct", "--method", "4x3", "--states", str(states_file)
        )
        assert code == 2
        assert "CoplanarStates" in stderr

    def test_machine_format(self, capsys):
        code, stdout, _ = run_cli(
            capsys, "construct", "--method", "umbrella", "--c", "0.5",
            "--format", "machine",
        )
        assert code == 0
        payload = json.loads(stdout)
        assert payload["construction"] == "umbrella"
        assert len(payload["w"]) == 4


class TestBounds:
    def test_umbrella_sweep_csv(self, tmp_path, capsys):
        out = tmp_path / "sweep.csv"
        code, _, _ = run_cli(
            capsys,
            "bounds", "--umbrella-sweep", "0:3:0.5", "--seed", "1",
            "--starts", "32", "--out", str(out),
        )
        assert code == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "c,W_class,W_R2,W_C2"
        rows = [list(map(float, line.split(","))) for line in lines[1:]]
        assert len(rows) == 7
        for c, w_class, w_r2, w_c2 in rows:
            assert w_class <= w_r2 + 1e-9
            assert w_r2 <= 2.0 + 1e-9
            assert w_c2 == pytest.approx(2.0, abs=1e-6)
            assert w_class == pytest.approx(umbrella_classical_value(c), abs=1e-12)
            assert w_r2 == pytest.approx(real_family_value(c), abs=1e-12)

    def test_bundle_bounds_report(self, tmp_path, capsys):
        bundle_path = tmp_path / "b.json"
        run_cli(
            capsys, "construct", "--method", "umbrella", "--c", "1",
            "--out", str(bundle_path),
        )
        out = tmp_path / "report.json"
        code, stdout, _ = run_cli(
            capsys,
            "bounds", "--bundle", str(bundle_path), "--model", "all",
            "--starts", "32", "--seed", "0", "--out", str(out),
        )
        assert code == 0
        payload = json.loads(out.read_text())
        results = payload["results"]
        assert results["classical"]["value"] == pytest.approx(SQ3, abs=1e-12)
        assert results["complex_qubit"]["value"] == pytest.approx(2.0, abs=1e-9)
        assert results["real_qubit"]["value"] == pytest.approx(1.8683, abs=2e-3)
        assert "run_record" in payload


class TestSimulateAndCertify:
    def test_pipeline(self, tmp_path, capsys):
        prefix = tmp_path / "run"
        code, stdout, _ = run_cli(
            capsys,
            "simulate", "--umbrella-c", "1", "--shots", "8192",
            "--seed", "5", "--out-prefix", str(prefix),
        )
        assert code == 0
        estimate = json.loads((tmp_path / "run.estimate.json").read_text())
        assert estimate["sigma_ideal"] == pytest.approx(0.009021, abs=1e-5)
        assert abs(estimate["value"] - 2.0) <= 5 * estimate["sigma"]

        cert_out = tmp_path / "cert.json"
        code, stdout, _ = run_cli(
            capsys,
            "certify", "--counts", str(tmp_path / "run.counts.csv"),
            "--c", "1", "--out", str(cert_out),
        )
        assert code == 0
        cert = json.loads(cert_out.read_text())
        assert cert["beats_classical"] is True
        assert cert["beats_real"] is True
        assert cert["z_real"] >= 10.0

    def test_depolarized_not_certified_exit_3(self, tmp_path, capsys):
        prefix = tmp_path / "noisy"
        code, _, _ = run_cli(
            capsys,
            "simulate", "--umbrella-c", "1", "--shots", "4096",
            "--seed", "7", "--noise", "0", "--out-prefix", str(prefix),
        )
        assert code == 0
        estimate = json.loads((tmp_path / "noisy.estimate.json").read_text())
        assert abs(estimate["value"]) <= 4 * estimate["sigma"] + 1e-9

        code, _, _ = run_cli(
            capsys, "certify", "--counts", str(tmp_path / "noisy.counts.csv"),
            "--c", "1",
        )
        assert code == 3

    def test_byte_identical_reruns(self, tmp_path, capsys):
        for prefix in ("a", "b"):
            run_cli(
                capsys,
                "simulate", "--umbrella-c", "0.5", "--shots", "512",
                "--seed", "9", "--out-prefix", str(tmp_path / prefix),
            )
        assert (tmp_path / "a.counts.csv").read_bytes() == (
            tmp_path / "b.counts.csv"
        ).read_bytes()
        assert (tmp_path / "a.circuits.jsonl").read_bytes() == (
            tmp_path / "b.circuits.jsonl"
        ).read_bytes()

    def test_simulate_from_bundle_and_certify_bundle(self, tmp_path, capsys):
        # Round trip through an arbitrary (non-umbrella) construction.
        states_file = tmp_path / "states.json"
        states_file.write_text(
            json.dumps(
                {
                    "states": [
                        [1, 0, 0],
                        [0.5, 0, SQ3 / 2],
                        [-SQ3 / 2, 0, -0.5],
                    ]
                }
            )
        )
        bundle_path = tmp_path / "b.json"
        run_cli(
            capsys, "construct", "--method", "general",
            "--states", str(states_file), "--r", f"1,1,{float(SQ3)!r}",
            "--out", str(bundle_path),
        )
        prefix = tmp_path / "gen"
        code, _, _ = run_cli(
            capsys,
            "simulate", "--bundle", str(bundle_path), "--shots", "4096",
            "--seed", "2", "--out-prefix", str(prefix),
        )
        assert code == 0
        code, stdout, stderr = run_cli(
            capsys,
            "certify", "--counts", str(tmp_path / "gen.counts.csv"),
            "--bundle", str(bundle_path), "--starts", "32", "--format", "machine",
        )
        assert code in (0, 3)
        payload = json.loads(stdout)
        assert payload["value"] == pytest.approx(2 + SQ3, abs=0.1)

    def test_malformed_counts_exit_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("x,y,b,count\n1,1,0,5\n")
        code, _, stderr = run_cli(capsys, "certify", "--counts", str(bad), "--c", "1")
        assert code == 2


class TestVerify:
    def test_umbrella_bundle_passes(self, tmp_path, capsys):
        bundle_path = tmp_path / "b.json"
        run_cli(
            capsys, "construct", "--method", "umbrella", "--c", "1",
            "--out", str(bundle_path),
        )
        out = tmp_path / "verify.json"
        code, stdout, _ = run_cli(
            capsys,
            "verify", "--bundle", str(bundle_path), "--trials", "12",
            "--seed", "3", "--out", str(out),
        )
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["passed"] is True
        assert payload["bound"] == pytest.approx(2.0, abs=1e-9)

    def test_4x6_sic_bundle(self, tmp_path, capsys):
        from pmst import sic_povm

        states_file = tmp_path / "states.json"
        states_file.write_text(
            json.dumps({"states": (-sic_povm().vectors).tolist()})
        )
        bundle_path = tmp_path / "b.json"
        code, _, _ = run_cli(
            capsys, "construct", "--method", "4x6", "--states", str(states_file),
            "--out", str(bundle_path),
        )
        assert code == 0
        code, stdout, _ = run_cli(
            capsys, "verify", "--bundle", str(bundle_path), "--trials", "12",
            "--seed", "1",
        )
        assert code == 0
        assert "passed" in stdout

    def test_missing_bundle_exit_2(self, capsys, tmp_path):
        code, _, stderr = run_cli(
            capsys, "verify", "--bundle", str(tmp_path / "nope.json")
        )
        assert code == 2
