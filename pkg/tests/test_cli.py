import json
import subprocess
import sys

import numpy as np
import pytest

from cstarmod import AlgebraElement, AlgebraShape, ModuleVector
from cstarmod.cli import main
from cstarmod.fixtures import form_to_json, vector_from_json, vector_to_json
from cstarmod.forms import MultiForm


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def diag_vector(*diag):
    shape = AlgebraShape([len(diag)])
    return ModuleVector.from_entries([AlgebraElement(shape, [np.diag(diag).astype(complex)])])


@pytest.fixture
def example_dir(tmp_path):
    assert main(["export-example", "--example", "2.1", "--dir", str(tmp_path)]) == 0
    return tmp_path


def test_export_example_roundtrip(example_dir):
    x = vector_from_json(json.loads((example_dir / "x.json").read_text()))
    y = vector_from_json(json.loads((example_dir / "y.json").read_text()))
    assert np.array_equal(x.blocks[0][0], np.eye(2))
    assert np.array_equal(y.blocks[0][0], np.diag([1.0, 0.0]))
    # rewriting the parsed vectors gives the same files
    assert vector_to_json(x) == json.loads((example_dir / "x.json").read_text())


def test_reproduce_example(capsys):
    assert main(["reproduce", "--example", "2.1"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["passed"] and out["seed"] == 42
    assert out["details"]["strong_bj"]["min_value"] == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("relation,code", [("sbj", 0), ("bj", 0), ("bj-state", 0),
                                           ("ip", 1), ("reversed", 1), ("mod", 1), ("mod2", 1)])
def test_check_orth_on_example(example_dir, relation, code, capsys):
    argv = ["check-orth", "--relation", relation,
            "--x", str(example_dir / "x.json"), "--y", str(example_dir / "y.json")]
    assert main(argv) == code
    out = json.loads(capsys.readouterr().out)
    assert out["verdict"]["holds"] is (code == 0)
    assert out["seed"] == 42


def test_check_orth_ip_holds_on_orthogonal_fixture(tmp_path, capsys):
    x = write(tmp_path / "x.json", vector_to_json(diag_vector(1.0, 0.0)))
    y = write(tmp_path / "y.json", vector_to_json(diag_vector(0.0, 1.0)))
    assert main(["check-orth", "--relation", "ip", "--x", x, "--y", y]) == 0
    assert json.loads(capsys.readouterr().out)["verdict"]["holds"] is True


def test_malformed_fixture_exit_2(tmp_path, capsys):
    doc = vector_to_json(diag_vector(1.0, 0.0))
    doc["entries"][0]["blocks"][0][1][0] = "oops"
    x = write(tmp_path / "x.json", doc)
    assert main(["check-orth", "--relation", "ip", "--x", x, "--y", x]) == 2
    assert "$.entries[0].blocks[0][1][0]" in capsys.readouterr().err


def test_mismatched_fixtures_exit_2(tmp_path):
    x = write(tmp_path / "x.json", vector_to_json(diag_vector(1.0, 0.0)))
    y = write(tmp_path / "y.json", vector_to_json(diag_vector(1.0)))
    assert main(["check-orth", "--relation", "ip", "--x", x, "--y", y]) == 2


def test_bad_tolerance_exit_2(example_dir):
    argv = ["check-orth", "--relation", "ip", "--x", str(example_dir / "x.json"),
            "--y", str(example_dir / "y.json"), "--tol-eq", "-1"]
    assert main(argv) == 2


def test_unknown_flag_rejected(capsys):
    with pytest.raises(SystemExit) as info:
        main(["reproduce", "--example", "2.1", "--bogus"])
    assert info.value.code == 2


def test_factorize_and_preserve(tmp_path, capsys):
    rng = np.random.default_rng(0)
    shape = AlgebraShape([1, 1])
    E = MultiForm.random(shape, 2, 2, rng)
    c = AlgebraElement.random(shape, rng)
    e = write(tmp_path / "E.json", form_to_json(E))
    f = write(tmp_path / "F.json", form_to_json(E.scaled(c)))
    g = write(tmp_path / "G.json", form_to_json(MultiForm.random(shape, 2, 2, rng)))
    out_path = tmp_path / "res.json"
    assert main(["factorize", "--E", e, "--F", f, "--out", str(out_path)]) == 0
    res = json.loads(out_path.read_text())
    c_hat = res["result"]["c"]["blocks"]
    assert np.allclose([complex(*b[0][0]) for b in c_hat], [b[0, 0] for b in c.blocks])
    assert main(["factorize", "--E", e, "--F", g]) == 1
    assert main(["preserve-check", "--E", e, "--F", f, "--trials", "10"]) == 0
    assert main(["preserve-check", "--E", e, "--F", g, "--trials", "10"]) == 1
    capsys.readouterr()


def test_factorize_nonabelian_needs_flag(tmp_path):
    rng = np.random.default_rng(1)
    E = MultiForm.random((2,), 1, 2, rng)
    e = write(tmp_path / "E.json", form_to_json(E))
    f = write(tmp_path / "F.json", form_to_json(E * 2.0))
    assert main(["factorize", "--E", e, "--F", f]) == 2
    assert main(["factorize", "--E", e, "--F", f, "--experimental", "--out",
                 str(tmp_path / "o.json")]) == 0


def test_zero_form_is_config_error(tmp_path):
    z = write(tmp_path / "Z.json", form_to_json(MultiForm.zero((1,), 1, 2)))
    assert main(["factorize", "--E", z, "--F", z]) == 2


def test_run_suite_deterministic(tmp_path):
    outs = []
    for i in range(2):
        p = tmp_path / f"r{i}.json"
        argv = ["run-suite", "--id", "theorem-2-4", "--shape", "2", "--k", "2",
                "--trials", "6", "--seed", "7", "--out", str(p)]
        assert main(argv) == 0
        d = json.loads(p.read_text())
        d.pop("elapsed")
        outs.append(d)
    assert outs[0] == outs[1]
    assert outs[0]["seed"] == 7


@pytest.mark.parametrize("argv", [
    ["run-suite", "--id", "kernel", "--shape", "0"],
    ["run-suite", "--id", "kernel", "--shape", "a"],
    ["run-suite", "--id", "kernel", "--k", "0"],
    ["run-suite", "--id", "kernel", "--n", "2"],
    ["run-suite", "--id", "preservation-maps", "--shape", "2", "--trials", "2"],
])
def test_run_suite_config_errors(argv):
    assert main(argv) == 2


def test_run_suite_shape_forms(tmp_path):
    p = tmp_path / "r.json"
    assert main(["run-suite", "--id", "kernel", "--shape", "1,1", "--trials", "5",
                 "--out", str(p)]) == 0
    assert main(["run-suite", "--id", "kernel", "--shape", "1", "2", "--trials", "5",
                 "--out", str(p)]) == 0
    assert json.loads(p.read_text())["passed"]


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "cstarmod", "reproduce", "--example", "2.1"],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0, proc.stderr
    assert json.loads(proc.stdout)["suite_id"] == "example-2-1"
