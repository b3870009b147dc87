import json

import numpy as np
import pytest

from mixedrv import cli
from mixedrv import face_gibbs


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def specs(tmp_path):
    return {
        "md_forced": write(tmp_path / "md.json", {"kind": "mixed-dirichlet", "w": [30.0, -30.0], "alpha": [1.0, 1.0]}),
        "md4": write(tmp_path / "md4.json", {"kind": "mixed-dirichlet", "w": [0.5, -0.5, 0.2, 0.0], "alpha": [1.0, 2.0, 0.5, 1.5]}),
        "gs2": write(tmp_path / "gs2.json", {"kind": "gaussian-sparsemax", "mu": [0.55, 0.45], "sigma": [0.8, 0.6]}),
        "me2": write(tmp_path / "me2.json", {"kind": "maxent", "k": 2, "n": 0}),
        "me3": write(tmp_path / "me3.json", {"kind": "maxent", "k": 3, "n": 0}),
        "khc": write(tmp_path / "khc.json", {"kind": "kd-hard-concrete", "z": [0.4, -0.3, 0.1], "beta": 0.66, "lambda": 1.1}),
        "bhc": write(tmp_path / "bhc.json", {"kind": "binary-hard-concrete", "log_alpha": 0.0, "beta": 0.6667}),
        "conc": write(tmp_path / "conc.json", {"kind": "concrete", "z": [0.2, -0.5, 1.0], "beta": 0.7}),
    }


class TestMaxentCommand:
    def test_values(self, capsys):
        assert cli.main(["maxent", "--k", "3", "--n-max", "0"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "K,N,H_maxent,H_discrete,H_continuous"
        k2 = lines[1].split(",")
        assert float(k2[2]) == pytest.approx(np.log(3), abs=1e-12)
        k3 = lines[2].split(",")
        assert float(k3[2]) == pytest.approx(np.log(6.5), abs=1e-12)

    def test_discrete_column_k10(self, capsys):
        cli.main(["maxent", "--k", "10", "--n-max", "0"])
        last = capsys.readouterr().out.strip().splitlines()[-1].split(",")
        assert float(last[3]) == pytest.approx(np.log(10), abs=1e-12)

    def test_json_and_bits(self, capsys):
        cli.main(["maxent", "--k", "2", "--n-max", "0", "--format", "json", "--bits"])
        rows = json.loads(capsys.readouterr().out)
        assert rows[0]["H_maxent"] == pytest.approx(np.log2(3), abs=1e-12)

    def test_usage_error(self, capsys):
        assert cli.main(["maxent", "--k", "1", "--n-max", "0"]) == 2

    def test_deterministic_stdout(self, capsys):
        cli.main(["maxent", "--k", "6", "--n-max", "3"])
        first = capsys.readouterr().out
        cli.main(["maxent", "--k", "6", "--n-max", "3"])
        assert capsys.readouterr().out == first


class TestSampleCommand:
    def test_schema_and_dims(self, tmp_path, specs):
        out = tmp_path / "s.jsonl"
        assert cli.main(["sample", "--dist", specs["me2"], "--num", "9", "--seed", "0", "--out", str(out)]) == 0
        lines = out.read_text().strip().splitlines()
        assert len(lines) == 9
        for line in lines:
            obj = json.loads(line)
            assert set(obj) == {"face", "dim", "y"}
            assert obj["dim"] in (0, 1)
            assert len(obj["y"]) == 2

    def test_forced_face(self, tmp_path, specs):
        out = tmp_path / "f.jsonl"
        cli.main(["sample", "--dist", specs["md_forced"], "--num", "20", "--seed", "3", "--out", str(out)])
        for line in out.read_text().strip().splitlines():
            assert json.loads(line)["face"] == [1]

    def test_byte_identical_reruns(self, tmp_path, specs):
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        for path in (a, b):
            cli.main(["sample", "--dist", specs["md4"], "--num", "50", "--seed", "11", "--out", str(path)])
        assert a.read_bytes() == b.read_bytes()

    @pytest.mark.parametrize("key", ["gs2", "khc", "bhc", "conc", "me3"])
    def test_all_kinds_sample(self, tmp_path, specs, key):
        out = tmp_path / f"{key}.jsonl"
        assert cli.main(["sample", "--dist", specs[key], "--num", "5", "--seed", "1", "--out", str(out)]) == 0
        for line in out.read_text().strip().splitlines():
            obj = json.loads(line)
            assert abs(sum(obj["y"]) - 1.0) < 1e-9

    def test_invalid_spec_exit_2(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"kind": "mixed-dirichlet", "w": [0.0, 0.0], "alpha": [1.0, -1.0]}')
        assert cli.main(["sample", "--dist", str(bad), "--num", "1", "--out", str(tmp_path / "x")]) == 2

    def test_unwritable_exit_3(self, specs):
        assert cli.main(["sample", "--dist", specs["me2"], "--num", "1", "--out", "/no/such/dir/x.jsonl"]) == 3


class TestEntropyKlCommands:
    def test_maxent_exact(self, capsys, specs):
        assert cli.main(["entropy", "--dist", specs["me2"], "--mode", "exact"]) == 0
        obj = json.loads(capsys.readouterr().out)
        assert obj["value"] == pytest.approx(1.0986122886681098, abs=1e-10)
        assert obj["unit"] == "nats"

    def test_gs2_exact_vs_mc(self, capsys, specs):
        cli.main(["entropy", "--dist", specs["gs2"], "--mode", "exact"])
        exact = json.loads(capsys.readouterr().out)["value"]
        cli.main(["entropy", "--dist", specs["gs2"], "--mode", "mc", "--samples", "4000", "--seed", "2"])
        obj = json.loads(capsys.readouterr().out)
        assert exact == pytest.approx(obj["value"], abs=3 * obj["std_error"])

    def test_exact_unsupported_kind(self, specs):
        assert cli.main(["entropy", "--dist", specs["khc"], "--mode", "exact"]) == 2
        assert cli.main(["entropy", "--dist", specs["conc"], "--mode", "mc"]) == 2

    def test_bits_flag(self, capsys, specs):
        cli.main(["entropy", "--dist", specs["me2"], "--mode", "exact", "--bits"])
        obj = json.loads(capsys.readouterr().out)
        assert obj["value"] == pytest.approx(np.log2(3), abs=1e-10)
        assert obj["unit"] == "bits"

    def test_kl_identical_specs(self, capsys, specs):
        assert cli.main(["kl", "--dist", specs["gs2"], "--dist2", specs["gs2"], "--mode", "exact"]) == 0
        assert json.loads(capsys.readouterr().out)["value"] == 0.0
        cli.main(["kl", "--dist", specs["md4"], "--dist2", specs["md4"], "--mode", "mc",
                  "--samples", "2000", "--seed", "5"])
        obj = json.loads(capsys.readouterr().out)
        assert not obj["support_violation"]
        assert obj["value"] == pytest.approx(0.0, abs=max(3 * obj["std_error"], 1e-12))

    def test_kl_exact_mixed_dirichlet(self, capsys, tmp_path, specs):
        other = write(tmp_path / "md4b.json",
                      {"kind": "mixed-dirichlet", "w": [0.1, 0.3, -0.2, 0.4], "alpha": [1.5, 1.0, 2.0, 0.7]})
        cli.main(["kl", "--dist", specs["md4"], "--dist2", other, "--mode", "exact"])
        exact = json.loads(capsys.readouterr().out)["value"]
        cli.main(["kl", "--dist", specs["md4"], "--dist2", other, "--mode", "mc",
                  "--samples", "20000", "--seed", "6"])
        obj = json.loads(capsys.readouterr().out)
        assert exact == pytest.approx(obj["value"], abs=3 * obj["std_error"])


class TestFaceHistCommand:
    def test_vertex_only_file(self, capsys, tmp_path, specs):
        out = tmp_path / "v.jsonl"
        cli.main(["sample", "--dist", specs["md_forced"], "--num", "30", "--seed", "1", "--out", str(out)])
        assert cli.main(["face-hist", "--in", str(out)]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "kind,label,count,fraction"
        assert "dim,0,30,1.0" in lines[1]

    def test_maxent_dim_fractions(self, capsys, tmp_path, specs):
        out = tmp_path / "m.jsonl"
        n = 10**5
        cli.main(["sample", "--dist", specs["me3"], "--num", str(n), "--seed", "4", "--out", str(out)])
        cli.main(["face-hist", "--in", str(out)])
        rows = capsys.readouterr().out.strip().splitlines()[1:]
        fractions = {}
        for row in rows:
            kind, label, count, frac = row.split(",")
            if kind == "dim":
                fractions[int(label)] = float(frac)
        g = np.array([3.0, 3.0, 0.5]) / 6.5
        for k in range(3):
            se = np.sqrt(g[k] * (1 - g[k]) / n)
            assert abs(fractions[k] - g[k]) < 4 * se

    def test_empty_file(self, tmp_path):
        empty = tmp_path / "e.jsonl"
        empty.write_text("")
        assert cli.main(["face-hist", "--in", str(empty)]) == 4

    def test_malformed_line_names_line_number(self, capsys, tmp_path):
        bad = tmp_path / "b.jsonl"
        bad.write_text('{"face": [1], "dim": 0, "y": [1.0, 0.0]}\nnot json\n')
        assert cli.main(["face-hist", "--in", str(bad)]) == 4
        assert ":2:" in capsys.readouterr().err


class TestGlmCommands:
    def test_gen_fit_roundtrip(self, capsys, tmp_path):
        data = tmp_path / "d.csv"
        model = tmp_path / "m.json"
        assert cli.main(["gen-glm-data", "--out", str(data), "--rows", "300", "--seed", "2"]) == 0
        header = data.read_text().splitlines()[0]
        assert header == "x1,x2,x3,x4,y1,y2,y3,y4,y5"
        assert cli.main(["fit-glm", "--data", str(data), "--out", str(model), "--seed", "3"]) == 0
        metrics = json.loads(capsys.readouterr().out)
        assert metrics["macro_f1"] > 0.9
        assert metrics["n_train"] == 60 and metrics["n_test"] == 240
        saved = json.loads(model.read_text())
        assert saved["k"] == 5 and saved["d"] == 4
        assert len(saved["w_face"]) == 5 and len(saved["w_face"][0]) == 4
        assert saved["conc_clamp"] == [1e-3, 1e3]

    def test_schema_violation_exit_4(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("x1,y1,y2\n0.5,-0.2,1.2\n")
        assert cli.main(["fit-glm", "--data", str(bad), "--out", str(tmp_path / "m.json")]) == 4

    def test_bad_target_sum_exit_4(self, tmp_path):
        bad = tmp_path / "bad2.csv"
        bad.write_text("x1,y1,y2\n0.5,0.7,0.6\n")
        assert cli.main(["fit-glm", "--data", str(bad), "--out", str(tmp_path / "m.json")]) == 4

    def test_renormalization_warning(self, capsys, tmp_path):
        data = tmp_path / "w.csv"
        rows = ["x1,y1,y2"]
        rng = np.random.default_rng(8)
        for _ in range(25):
            y1 = float(rng.uniform(0.2, 0.8))
            rows.append(f"{rng.normal():.6f},{y1 + 2e-6:.9f},{1 - y1:.9f}")
        data.write_text("\n".join(rows) + "\n")
        assert cli.main(["fit-glm", "--data", str(data), "--out", str(tmp_path / "m.json"),
                         "--steps", "5"]) == 0
        assert "renormalizing" in capsys.readouterr().err


class TestCheckCommand:
    def test_injected_bug_fails_enumeration_oracle(self, capsys, monkeypatch):
        good = face_gibbs.log_normalizer
        monkeypatch.setattr(face_gibbs, "log_normalizer", lambda w: -good(w))
        assert cli.main(["check", "--level", "fast"]) == 1
        out = capsys.readouterr().out
        assert "FAIL face_gibbs.log_normalizer_vs_enumeration" in out
        assert "FAILED:" in out

    def test_spec_error_exit_code(self, tmp_path):
        missing = tmp_path / "missing.json"
        assert cli.main(["entropy", "--dist", str(missing), "--mode", "exact"]) == 2
