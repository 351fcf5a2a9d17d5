import json
from pathlib import Path

import numpy as np
import pytest

from spinpressure.cli import main
from spinpressure.errors import ModelFormatError
from spinpressure.modelio import parse_model, serialize_model, write_csv

MODELS = Path(__file__).resolve().parent.parent / "models"


class TestModelIo:
    def test_parse_tfi_chain(self):
        mf = parse_model(MODELS / "tfi_chain.toml")
        assert mf.kind == "spin_chain"
        assert mf.payload.site_dim == 2
        assert mf.payload.range_ == 2

    def test_parse_golden_mean(self):
        mf = parse_model(MODELS / "golden_mean.toml")
        assert mf.kind == "sft"
        assert np.array_equal(mf.payload.transition, [[1, 1], [1, 0]])

    def test_parse_riesz(self):
        mf = parse_model(MODELS / "riesz_standard.toml")
        assert mf.kind == "riesz"
        assert mf.payload.frequencies == (4, 16, 64)

    def test_round_trip_json(self, tmp_path):
        for name in ("tfi_chain", "golden_mean", "ising_sft", "riesz_standard"):
            mf = parse_model(MODELS / f"{name}.toml")
            p = tmp_path / f"{name}.json"
            p.write_text(json.dumps(serialize_model(mf)))
            mf2 = parse_model(p)
            assert mf2.kind == mf.kind
            assert serialize_model(mf2) == serialize_model(mf)

    def test_lower_triangle_mirrored(self, tmp_path):
        data = {"kind": "spin_chain",
                "payload": {"site_dim": 2, "range": 1,
                            "interaction": [[[1.0, 0.0]],
                                            [[0.5, 0.25], [-1.0, 0.0]]]}}
        p = tmp_path / "m.json"
        p.write_text(json.dumps(data))
        m = parse_model(p).payload.interaction
        assert m[0, 1] == pytest.approx(0.5 - 0.25j)

    def test_unknown_kind_rejected(self, tmp_path):
        p = tmp_path / "m.json"
        p.write_text(json.dumps({"kind": "nope", "payload": {}}))
        with pytest.raises(ModelFormatError):
            parse_model(p)

    def test_json_error_reports_location(self, tmp_path):
        p = tmp_path / "m.json"
        p.write_text('{"kind": "riesz",\n  "payload": }')
        with pytest.raises(ModelFormatError, match="line 2"):
            parse_model(p)

    def test_tight_lacunarity_rejected(self, tmp_path):
        p = tmp_path / "m.json"
        p.write_text(json.dumps({"kind": "riesz",
                                 "payload": {"frequencies": [3, 9, 27],
                                             "amplitudes": [0.5, 0.5, 0.5],
                                             "ratio_bound": 3.0}}))
        with pytest.raises(ModelFormatError):
            parse_model(p)

    def test_non_hermitian_rejected(self, tmp_path):
        data = {"kind": "spin_chain",
                "payload": {"site_dim": 2, "range": 1,
                            "interaction": [[[0.0, 0.0], [1.0, 0.0]],
                                            [[0.0, 0.0], [0.0, 0.0]]]}}
        p = tmp_path / "m.json"
        p.write_text(json.dumps(data))
        with pytest.raises(ModelFormatError):
            parse_model(p)

    def test_write_csv_format(self, tmp_path):
        p = tmp_path / "x.csv"
        write_csv(p, ["a", "b"], [[1, 0.1], [2, 1.0 / 3.0]])
        text = p.read_bytes().decode()
        assert text.splitlines()[0] == "a,b"
        assert "0.1000000000000000" in text
        assert "\r" not in text


def run_cli(tmp_path, *extra):
    out = tmp_path / "out"
    return main(list(extra) + ["--out", str(out)]), out


class TestCli:
    def test_pressure_tfi(self, tmp_path):
        code, out = run_cli(tmp_path, "--model", str(MODELS / "tfi_chain.toml"),
                            "--command", "pressure", "--volumes", "2:8")
        assert code == 0
        rep = json.loads((out / "report.json").read_text())
        assert rep["overall_pass"]
        assert (out / "pressure.csv").exists()
        assert np.isfinite(rep["summary"]["estimate"])

    def test_equilibrium_sft(self, tmp_path):
        code, out = run_cli(tmp_path, "--model", str(MODELS / "golden_mean.toml"),
                            "--command", "equilibrium")
        assert code == 0
        rep = json.loads((out / "report.json").read_text())
        phi = (1 + np.sqrt(5)) / 2
        assert rep["summary"]["pressure"] == pytest.approx(np.log(phi), abs=1e-10)

    def test_equilibrium_chain(self, tmp_path):
        code, out = run_cli(tmp_path, "--model", str(MODELS / "tfi_chain.toml"),
                            "--command", "equilibrium", "--volumes", "2:5")
        assert code == 0
        assert (out / "equilibrium.csv").exists()

    def test_kms_check(self, tmp_path):
        code, out = run_cli(tmp_path, "--model", str(MODELS / "tfi_chain.toml"),
                            "--command", "kms-check", "--volumes", "6:6",
                            "--samples", "5")
        assert code == 0
        assert (out / "kms.csv").exists()

    def test_evolve_check(self, tmp_path):
        code, out = run_cli(tmp_path, "--model", str(MODELS / "tfi_chain.toml"),
                            "--command", "evolve-check", "--volumes", "6:6",
                            "--samples", "3")
        assert code == 0

    def test_variational(self, tmp_path):
        code, out = run_cli(tmp_path, "--model", str(MODELS / "ising_sft.toml"),
                            "--command", "variational")
        assert code == 0
        rep = json.loads((out / "report.json").read_text())
        assert rep["summary"]["pressure"] == pytest.approx(
            np.log(2 * np.cosh(1.0)), abs=1e-12)

    def test_bridge(self, tmp_path):
        code, out = run_cli(tmp_path, "--model", str(MODELS / "golden_mean.toml"),
                            "--command", "bridge", "--volumes", "8:8")
        assert code == 0

    def test_properties(self, tmp_path):
        code, out = run_cli(tmp_path, "--model", str(MODELS / "tfi_chain.toml"),
                            "--command", "properties", "--volumes", "6:6")
        assert code == 0
        assert (out / "properties.csv").exists()

    def test_riesz_coeffs(self, tmp_path):
        code, out = run_cli(tmp_path,
                            "--model", str(MODELS / "riesz_standard.toml"),
                            "--command", "riesz-coeffs", "--n-max", "64")
        assert code == 0
        lines = (out / "coefficients.csv").read_bytes().decode().splitlines()
        table = {int(r.split(",")[0]): float(r.split(",")[1])
                 for r in lines[1:]}
        assert table[0] == 1.0
        assert table[4] == pytest.approx(0.25)
        assert table[20] == pytest.approx(0.0625)
        assert table[5] == 0.0

    def test_riesz_verify(self, tmp_path):
        code, out = run_cli(tmp_path,
                            "--model", str(MODELS / "riesz_standard.toml"),
                            "--command", "riesz-verify", "--n-max", "100")
        assert code == 0

    def test_missing_model_exit_2(self, tmp_path):
        code, _ = run_cli(tmp_path, "--model", str(tmp_path / "missing.toml"),
                          "--command", "pressure")
        assert code == 2

    def test_bad_model_exit_2(self, tmp_path):
        p = tmp_path / "bad.toml"
        p.write_text("kind = 'spin_chain'\n")
        code, _ = run_cli(tmp_path, "--model", str(p), "--command", "pressure")
        assert code == 2

    def test_budget_exit_3(self, tmp_path):
        code, _ = run_cli(tmp_path, "--model", str(MODELS / "tfi_chain.toml"),
                          "--command", "pressure", "--volumes", "2:20",
                          "--budget-mib", "1")
        assert code == 3

    def test_wrong_kind_exit_2(self, tmp_path):
        code, _ = run_cli(tmp_path, "--model", str(MODELS / "golden_mean.toml"),
                          "--command", "pressure")
        assert code == 2

    def test_deterministic_output(self, tmp_path):
        outs = []
        for i in range(2):
            out = tmp_path / f"run{i}"
            code = main(["--model", str(MODELS / "tfi_chain.toml"),
                         "--command", "pressure", "--volumes", "2:7",
                         "--out", str(out)])
            assert code == 0
            outs.append((out / "pressure.csv").read_bytes())
        assert outs[0] == outs[1]
