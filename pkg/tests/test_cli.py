import json
import math

import numpy as np
import pytest

from kirkwood_lab import (
    computational_basis,
    fourier_basis,
    hadamard_basis,
    kirkwood,
    make_state,
    pure_density,
    random_density,
)
from kirkwood_lab.cli import run

TWO_PI = 2.0 * math.pi


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    monkeypatch.delenv("KIRKWOOD_LAB_CONFIG", raising=False)


@pytest.fixture
def inputs(tmp_path):
    root = tmp_path / "inputs"
    root.mkdir()

    def dump(name, payload):
        path = root / name
        path.write_text(json.dumps(payload))
        return str(path)

    plus = make_state([1.0, 1.0])
    files = {
        "rho": dump("rho.json", pure_density(plus).to_dict()),
        "mixed": dump("mixed.json", random_density(3, rank=2, seed=21).to_dict()),
        "pre": dump("pre.json", plus.to_dict()),
        "post": dump("post.json", make_state([1.0, 1j]).to_dict()),
        "obs": dump("obs.json", {
            "dim": 2,
            "entries": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-1.0, 0.0]]],
        }),
        "segment": dump("segment.json", {
            "label": "real segment", "param": [0.0, 1.0], "points": [[0.0, 0.0], [1.0, 0.0]],
        }),
        "bowtie": dump("bowtie.json", {
            "label": "bowtie", "param": [0, 1, 2, 3],
            "points": [[0, 0], [1, 1], [1, 0], [0, 1]],
        }),
    }
    return files


def _read_json(path):
    return json.loads(path.read_text())


# --- kirkwood -------------------------------------------------------------------


def test_kirkwood_subcommand_artifacts(tmp_path, inputs):
    out = tmp_path / "out"
    code = run(["kirkwood", "--rho", inputs["rho"], "--basis-a", "computational",
                "--basis-b", "hadamard", "--out-dir", str(out), "--format", "both"])
    assert code == 0

    table = _read_json(out / "kirkwood.json")
    expected = kirkwood(pure_density(make_state([1.0, 1.0])),
                        computational_basis(2), hadamard_basis(2))
    got = np.array([[complex(*pair) for pair in row] for row in table["values"]])
    np.testing.assert_allclose(got, expected.values, atol=1e-15)

    lines = (out / "kirkwood.csv").read_text().strip().splitlines()
    assert lines[0] == "a_index,b_index,re,im"
    assert len(lines) == 5
    a, b, re, im = lines[1].split(",")
    assert (int(a), int(b)) == (0, 0)
    assert float(re) == expected.values[0, 0].real  # repr round-trips exactly

    marginals = _read_json(out / "marginals.json")
    np.testing.assert_allclose(marginals["basis_a_probs"], [0.5, 0.5], atol=1e-12)
    np.testing.assert_allclose(marginals["total_sum"], [1.0, 0.0], atol=1e-12)

    manifest = _read_json(out / "manifest.json")
    assert manifest["subcommand"] == "kirkwood"
    assert set(manifest["artifacts"]) == {"kirkwood.json", "kirkwood.csv", "marginals.json"}
    assert all(len(digest) == 64 for digest in manifest["artifacts"].values())


def test_kirkwood_basis_from_file(tmp_path, inputs):
    basis_file = tmp_path / "basis.json"
    basis_file.write_text(json.dumps(fourier_basis(2, label="f2").to_dict()))
    out = tmp_path / "out"
    code = run(["kirkwood", "--rho", inputs["rho"], "--basis-a", "computational",
                "--basis-b", str(basis_file), "--out-dir", str(out)])
    assert code == 0
    assert _read_json(out / "kirkwood.json")["basisB"] == "f2"


# --- audit ---------------------------------------------------------------------


def test_audit_admissible_exit_zero(tmp_path, inputs):
    out = tmp_path / "out"
    code = run(["audit", "--curve", inputs["segment"], "--out-dir", str(out)])
    assert code == 0
    report = _read_json(out / "audit.json")
    assert report["verdict"] == "Admissible"
    assert report["ranking"]["mapped_values"] == [0.0, 1.0]


def test_audit_inadmissible_exit_three(tmp_path, inputs):
    out = tmp_path / "out"
    code = run(["audit", "--curve", inputs["bowtie"], "--out-dir", str(out)])
    assert code == 3
    report = _read_json(out / "audit.json")
    assert report["verdict"] == "SelfIntersecting"
    [(point, i, j)] = report["intersections"]
    assert point == pytest.approx([0.5, 0.5], abs=1e-12)


def test_audit_multiple_curves_and_scale(tmp_path, inputs):
    out = tmp_path / "out"
    second = tmp_path / "second.json"
    second.write_text(json.dumps({
        "label": "tail", "param": [0.0, 1.0], "points": [[2.0, 0.0], [3.0, 0.0]],
    }))
    code = run(["audit", "--curve", inputs["segment"], "--curve", str(second),
                "--vf", "0", "--vt", "2", "--out-dir", str(out)])
    assert code == 0
    report = _read_json(out / "audit.json")
    assert report["ranking"]["v_true"] == 2.0
    assert "junction" in report["notes"]


# --- oam -----------------------------------------------------------------------


def test_oam_subcommand_fit_and_exit(tmp_path):
    out = tmp_path / "out"
    code = run(["oam", "--dim", "64", "--m", "1", "--n", "0", "--delta", "0.6",
                "--out-dir", str(out), "--format", "both"])
    assert code == 3  # a full interference period audits as ClosedCurve
    [entry] = _read_json(out / "oam_report.json")
    assert entry["verdict"] == "ClosedCurve"
    assert entry["fit_center"][0] == pytest.approx(1.0 / TWO_PI, abs=1e-9)
    assert entry["fit_radius"] == pytest.approx(entry["expected_radius"], abs=1e-9)

    lines = (out / "oam_samples.csv").read_text().strip().splitlines()
    assert lines[0] == "phi,re,im"
    assert len(lines) == 66  # 64 grid samples plus the closing repeat


def test_oam_sweep_writes_suffixed_files(tmp_path):
    out = tmp_path / "out"
    code = run(["oam", "--dim", "64", "--m", "1", "--n", "0",
                "--sweep-delta", "0.4,0.8", "--out-dir", str(out), "--format", "csv"])
    assert code == 3
    assert (out / "oam_samples_delta0.4.csv").exists()
    assert (out / "oam_samples_delta0.8.csv").exists()
    report = _read_json(out / "oam_report.json")
    assert [entry["delta"] for entry in report] == [0.4, 0.8]


def test_oam_requires_delta(tmp_path):
    code = run(["oam", "--dim", "64", "--m", "1", "--n", "0",
                "--out-dir", str(tmp_path / "out")])
    assert code == 2


# --- tomo ----------------------------------------------------------------------


def test_tomo_round_trip_report(tmp_path, inputs):
    out = tmp_path / "out"
    code = run(["tomo", "--rho", inputs["mixed"], "--basis-a", "computational",
                "--basis-b", "fourier", "--out-dir", str(out)])
    assert code == 0
    report = _read_json(out / "tomo_report.json")
    assert report["frobenius_error"] <= 1e-10
    recon = _read_json(out / "reconstructed.json")
    assert recon["dim"] == 3


def test_tomo_vanishing_overlap_is_domain_error(tmp_path, inputs, capsys):
    code = run(["tomo", "--rho", inputs["mixed"], "--basis-a", "computational",
                "--basis-b", "computational", "--out-dir", str(tmp_path / "out")])
    assert code == 4
    err = json.loads(capsys.readouterr().err)
    assert err["code"] == "VanishingOverlap"


# --- weaksim --------------------------------------------------------------------


def test_weaksim_exact_mode(tmp_path, inputs):
    out = tmp_path / "out"
    code = run(["weaksim", "--pre", inputs["pre"], "--post", inputs["post"],
                "--obs", inputs["obs"], "--g", "0.01", "--out-dir", str(out)])
    assert code == 0
    [record] = _read_json(out / "weaksim_records.json")
    assert record["shots"] == 0
    assert record["stderr"] == 0.0
    assert record["estimate"] == pytest.approx([0.0, 1.0], abs=1e-12)


def test_weaksim_sweep_and_determinism(tmp_path, inputs):
    args = ["weaksim", "--pre", inputs["pre"], "--post", inputs["post"],
            "--obs", inputs["obs"], "--sweep-g", "0.08,0.04,0.02",
            "--shots", "5000", "--seed", "9", "--format", "both"]
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert run(args + ["--out-dir", str(out_a)]) == 0
    assert run(args + ["--out-dir", str(out_b)]) == 0
    # identical manifests imply byte-identical data files
    assert (out_a / "manifest.json").read_bytes() == (out_b / "manifest.json").read_bytes()
    for name in ("weaksim_records.json", "weaksim_records.csv"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()
    records = _read_json(out_a / "weaksim_records.json")
    assert [r["g"] for r in records] == [0.08, 0.04, 0.02]
    assert all(r["rng_id"] == "numpy-default_rng-pcg64" for r in records)


def test_weaksim_orthogonal_postselection_error(tmp_path, inputs, capsys):
    ortho = tmp_path / "ortho.json"
    ortho.write_text(json.dumps(make_state([1.0, -1.0]).to_dict()))
    code = run(["weaksim", "--pre", inputs["pre"], "--post", str(ortho),
                "--obs", inputs["obs"], "--g", "0.01",
                "--out-dir", str(tmp_path / "out")])
    assert code == 4
    err = json.loads(capsys.readouterr().err)
    assert err["code"] == "NearOrthogonalPostSelection"
    assert "message" in err and "context" in err


# --- bayes ---------------------------------------------------------------------


def test_bayes_prints_posterior(tmp_path, capsys):
    out = tmp_path / "out"
    code = run(["bayes", "--prior", "0.5,0.5", "--likelihood", "0.8,0.4",
                "--out-dir", str(out)])
    assert code == 0
    assert capsys.readouterr().out.strip() == "0.666667,0.333333"
    report = _read_json(out / "bayes.json")
    np.testing.assert_allclose(report["posterior"], [2.0 / 3.0, 1.0 / 3.0], atol=1e-12)


def test_bayes_zero_evidence_exit(tmp_path, capsys):
    code = run(["bayes", "--prior", "1,0", "--likelihood", "0,1",
                "--out-dir", str(tmp_path / "out")])
    assert code == 4
    assert json.loads(capsys.readouterr().err)["code"] == "ZeroEvidence"


def test_bayes_malformed_list_is_usage_error(tmp_path, capsys):
    code = run(["bayes", "--prior", "0.5;0.5", "--likelihood", "0.8,0.4",
                "--out-dir", str(tmp_path / "out")])
    assert code == 2
    assert json.loads(capsys.readouterr().err)["code"] == "UsageError"


# --- shared plumbing --------------------------------------------------------------


def test_unknown_subcommand_usage_error(capsys):
    assert run(["frobnicate"]) == 2


def test_missing_input_file_is_io_error(tmp_path, capsys):
    code = run(["kirkwood", "--rho", str(tmp_path / "absent.json"),
                "--basis-a", "computational", "--basis-b", "fourier",
                "--out-dir", str(tmp_path / "out")])
    assert code == 5
    err = json.loads(capsys.readouterr().err)
    assert err["code"] == "InputError"


def test_invalid_density_is_domain_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({
        "dim": 2,
        "entries": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]],  # trace 2
    }))
    code = run(["kirkwood", "--rho", str(bad), "--basis-a", "computational",
                "--basis-b", "fourier", "--out-dir", str(tmp_path / "out")])
    assert code == 4
    assert json.loads(capsys.readouterr().err)["code"] == "ValueError"


def test_env_config_and_flag_override(tmp_path, monkeypatch, inputs):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"format": "both", "seed": 5,
                                  "out_dir": str(tmp_path / "from_env")}))
    monkeypatch.setenv("KIRKWOOD_LAB_CONFIG", str(config))

    code = run(["weaksim", "--pre", inputs["pre"], "--post", inputs["post"],
                "--obs", inputs["obs"], "--g", "0.05", "--shots", "100"])
    assert code == 0
    out = tmp_path / "from_env"
    assert (out / "weaksim_records.csv").exists()  # format came from the env config
    [record] = _read_json(out / "weaksim_records.json")
    assert record["seed"] == 5

    override = tmp_path / "explicit"
    code = run(["weaksim", "--pre", inputs["pre"], "--post", inputs["post"],
                "--obs", inputs["obs"], "--g", "0.05", "--shots", "100",
                "--seed", "8", "--out-dir", str(override), "--format", "json"])
    assert code == 0
    [record] = _read_json(override / "weaksim_records.json")
    assert record["seed"] == 8
    assert not (override / "weaksim_records.csv").exists()


def test_env_config_unknown_key_is_usage_error(tmp_path, monkeypatch, capsys):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"formats": "both"}))
    monkeypatch.setenv("KIRKWOOD_LAB_CONFIG", str(config))
    assert run(["bayes", "--prior", "0.5,0.5", "--likelihood", "0.8,0.4"]) == 2


def test_env_config_tolerance_overrides(tmp_path, monkeypatch, inputs):
    config = tmp_path / "config.json"
    # a huge closure tolerance makes the open segment count as closed
    config.write_text(json.dumps({"tolerances": {"closure": 10.0}}))
    monkeypatch.setenv("KIRKWOOD_LAB_CONFIG", str(config))
    out = tmp_path / "out"
    code = run(["audit", "--curve", inputs["segment"], "--out-dir", str(out)])
    assert code == 3
    assert _read_json(out / "audit.json")["verdict"] == "ClosedCurve"
    manifest = _read_json(out / "manifest.json")
    assert manifest["config"]["tolerances"]["closure"] == 10.0


def test_manifest_excludes_output_directory(tmp_path, inputs):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    base = ["audit", "--curve", inputs["segment"]]
    assert run(base + ["--out-dir", str(out_a)]) == 0
    assert run(base + ["--out-dir", str(out_b)]) == 0
    assert (out_a / "manifest.json").read_bytes() == (out_b / "manifest.json").read_bytes()
