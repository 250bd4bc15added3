"""
Test the command-line front end
"""

import json

from app.cli import main


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_compile_fixture(capsys):
    code, out = _run(capsys, "compile", "--family", "biased_k1", "--param", "0")
    report = json.loads(out)
    assert code == 0
    assert report["command"] == "compile"
    assert report["result"]["distribution"]["probs"] == {"0": "3/4", "1": "1/4"}


def test_compile_bad_path(capsys):
    assert main(["compile", "--family", "does/not/exist.json"]) == 2
    assert "error" in capsys.readouterr().err


def test_compile_from_file(tmp_path, capsys):
    path = tmp_path / "and.json"
    path.write_text(json.dumps({"param_bits": 0, "rand_bits": 2, "out_bits": 1,
                                "gates": [{"op": "AND", "in": [0, 1]}], "outputs": [2]}))
    code, out = _run(capsys, "compile", "--family", str(path), "--param", "")
    assert code == 0
    assert json.loads(out)["result"]["distribution"]["probs"]["1"] == "1/4"


def test_learn_point_mass(capsys):
    code, out = _run(capsys, "learn", "--instance", "learn_point_mass_k3", "--mode", "sd", "--seed", "3")
    report = json.loads(out)
    assert code == 0
    assert report["result"]["hypothesis"] == "101"
    assert report["config"]["seed"] == 3


def test_learn_mle_from_sample_file(tmp_path, capsys):
    samples = tmp_path / "samples.txt"
    samples.write_text("0\n0\n0\n")
    code, out = _run(capsys, "learn", "--family", "biased_k1", "--samples", str(samples), "--mode", "mle")
    result = json.loads(out)["result"]
    assert code == 0
    assert result["argmax_z"] == "0"
    assert result["max_likelihood"] == "27/64"


def test_learn_needs_precision(tmp_path, capsys):
    samples = tmp_path / "samples.txt"
    samples.write_text("1\n")
    assert main(["learn", "--family", "biased_k1", "--samples", str(samples), "--mode", "sd"]) == 2


def test_benchmark_exit_codes(capsys):
    code, _ = _run(capsys, "learn", "--instance", "owpuzz_identity_k2", "--mode", "proper",
                   "--learner", "cheating", "--trials", "20")
    assert code == 0
    code, _ = _run(capsys, "learn", "--instance", "owpuzz_identity_k2", "--mode", "proper",
                   "--learner", "constant:00", "--eps", "2", "--trials", "60")
    assert code == 1


def test_owpuzz(capsys):
    code, out = _run(capsys, "owpuzz", "--instance", "owpuzz_identity_k2", "--trials", "20")
    result = json.loads(out)["result"]
    assert code == 0
    assert result["completeness"]["rate"] == 1.0
    assert result["best_attack"]["success"] == "1"


def test_verify_csv_to_file(tmp_path, capsys):
    out = tmp_path / "reports" / "claims.csv"
    code = main(["verify", "--claim", "mle_oracle", "--claim", "postselection",
                 "--scale", "0.1", "--format", "csv", "--out", str(out)])
    assert code == 0
    assert capsys.readouterr().out == ""
    lines = out.read_text().splitlines()
    assert "claim" in lines[0].split(",")
    assert len(lines) == 3


def test_invalid_scale(capsys):
    assert main(["verify", "--claim", "mle_oracle", "--scale", "2"]) == 2


def test_identical_runs_identical_bytes(capsys):
    _, first = _run(capsys, "verify", "--claim", "sd_kl_axioms", "--scale", "0.05", "--seed", "1")
    _, second = _run(capsys, "verify", "--claim", "sd_kl_axioms", "--scale", "0.05", "--seed", "1")
    assert first == second
