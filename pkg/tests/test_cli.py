import json
import subprocess
import sys

from fellquant import definition_path
from fellquant.cli import main


def test_validate(capsys):
    assert main(["validate", str(definition_path("pair3.qf"))]) == 0
    assert "9 arrows" in capsys.readouterr().out


def test_check_z2_fails_with_witnesses(tmp_path, capsys):
    out = tmp_path / "z2.json"
    assert main(["check", str(definition_path("z2.qf")), "--samples", "50", "--json", str(out)]) == 1
    report = json.loads(out.read_text())
    verdicts = {c["property"]: c for c in report["checks"]}
    assert verdicts["stable"]["verdict"] == "fails"
    assert verdicts["stable"]["witness"]["U"] == ["0"]
    ipi = verdicts["ipi-stable"]
    assert ipi["verdict"] == "fails"
    assert ipi["witness"]["lhs_support"] == ["0", "1"]
    capsys.readouterr()


def test_check_pair3_holds_and_is_reproducible(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    path = str(definition_path("pair3.qf"))
    assert main(["check", path, "--samples", "100", "--seed", "7", "--json", str(a)]) == 0
    assert main(["check", path, "--samples", "100", "--seed", "7", "--json", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    checks = json.loads(a.read_text())["checks"]
    assert all(c["verdict"] != "fails" for c in checks)
    assert {c["property"]: c["verdict"] for c in checks}["recover_G"] == "holds-exhaustive"


def test_weyl_command(capsys):
    assert main(["weyl", str(definition_path("z2.qf")), "--generators", "file"]) == 0
    out = capsys.readouterr().out
    assert "1 objects, 4 arrows" in out and "Weyl groupoid: 1 objects, 1 arrows" in out


def test_paper_examples_json(capsys):
    assert main(["paper-examples", "--json", "--samples", "50"]) == 0
    cases = json.loads(capsys.readouterr().out)["cases"]
    status = {c["case"]: c["status"] for c in cases}
    assert status["scalar subalgebra of M3"] == "unconfirmed"
    assert all(s == "reproduced" for k, s in status.items() if k != "scalar subalgebra of M3")


def test_errors_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.qf"
    bad.write_text("[groupoid]\nbuiltin = pair 2\n[checks]\nstabel\n")
    assert main(["check", str(bad)]) == 2
    assert "unknown check" in capsys.readouterr().err


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "fellquant", "validate", str(definition_path("z2.qf"))],
                         capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.startswith("ok:")
