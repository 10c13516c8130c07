import json
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from dimermahler.cli import run


def _run(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_charpoly_family_example(capsys):
    code, out, _ = _run(capsys, "charpoly", "--family", "3", "--m", "1", "--w", "1")
    assert code == 0
    assert out.strip() == "X^2*Z + X*Y^2 - 3*X*Y*Z + Y*Z^2"


def test_charpoly_family_cubic_json(capsys):
    code, out, _ = _run(capsys, "--json", "charpoly", "--family", "6", "--s", "10")
    assert code == 0
    data = json.loads(out)
    assert {"i": 1, "j": 1, "k": 1, "c": "-10"} in data["homogeneous"]


def test_charpoly_symbolic(capsys):
    code, out, _ = _run(capsys, "charpoly", "--symbolic")
    assert code == 0 and out.count("*") > 42


def test_charpoly_from_weights_file(capsys, tmp_path):
    path = tmp_path / "w.json"
    path.write_text(json.dumps({"weights": {k: 1 for k in "Aa Ba Ga Bb Cb Hb Ac Cc Ic Ad Dd Ed Be Ee Fe Cf Df Ff Dg Gg Hg Eh Hh Ih Fi Gi Ii".split()}}))
    code, out, _ = _run(capsys, "charpoly", "--weights", str(path))
    assert code == 0 and "21*X*Y*Z" in out


def test_mahler_both_methods(capsys):
    code, out, _ = _run(capsys, "--json", "mahler", "--family", "6", "--s", "11", "--resolution", "64")
    assert code == 0
    data = json.loads(out)
    assert data["difference"] < 1e-8


def test_partition_with_brute_force(capsys):
    code, out, _ = _run(capsys, "--json", "partition", "--family", "3", "--brute-force")
    assert code == 0
    data = json.loads(out)
    assert data["Z"] == "6" and data["brute_force"] == "6" and data["signed"] == "-6"


def test_qseries_listing_and_solve(capsys):
    code, out, _ = _run(capsys, "qseries", "--what", "mcmahon", "--order", "4")
    assert code == 0 and "q^4: 13" in out
    code, out, _ = _run(capsys, "--json", "qseries", "solve", "--family", "6", "--s", "11", "--check")
    assert code == 0 and json.loads(out)["gap"] < 1e-6


def test_qseries_temperate_regime_is_a_domain_error(capsys):
    code, _, err = _run(capsys, "qseries", "solve", "--family", "3", "--s", "2")
    assert code == 1 and "temperate" in err


def test_lseries(capsys):
    code, out, _ = _run(capsys, "--json", "lseries", "--family", "3", "--s", "5", "--pmax", "2000", "--show", "20")
    assert code == 0
    data = json.loads(out)
    assert data["conductor"] == 14 and data["rational"] == "7"
    assert data["ap"]["7"]["reduction"] == "split node"


def test_tiling_svg(capsys, tmp_path):
    out_file = tmp_path / "t.svg"
    code, out, _ = _run(capsys, "tiling", "--family", "3", "--index", "2", "--out", str(out_file))
    assert code == 0 and "wrote" in out
    root = ET.parse(out_file).getroot()
    assert root.tag.endswith("svg")
    code, _, _ = _run(capsys, "tiling", "--family", "3", "--index", "99")
    assert code == 1


def test_verify_subset(capsys):
    code, out, _ = _run(capsys, "verify", "--only", "1", "3")
    assert code == 0
    assert out.count("[PASS]") == 2


@pytest.mark.parametrize("argv", [["charpoly", "--bogus"], [], ["mahler"], ["qseries", "solve", "--family", "6"]])
def test_usage_errors(capsys, argv):
    code, _, _ = _run(capsys, *argv)
    assert code == 2


def test_domain_errors(capsys, tmp_path):
    code, _, _ = _run(capsys, "charpoly", "--family", "3", "--m", "0")
    assert code == 1
    code, _, _ = _run(capsys, "mahler", "--poly", str(tmp_path / "missing.json"))
    assert code == 1


def test_thread_variable_is_validated(capsys, monkeypatch):
    monkeypatch.setenv("KASTELEYN_THREADS", "zero")
    assert _run(capsys, "charpoly", "--family", "3")[0] == 2
    monkeypatch.setenv("KASTELEYN_THREADS", "4")
    assert _run(capsys, "charpoly", "--family", "3")[0] == 0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "dimermahler", "charpoly", "--family", "6"],
                          capture_output=True, text=True, check=True)
    assert "- 11*X*Y*Z" in proc.stdout
