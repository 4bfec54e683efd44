import io
import subprocess
import sys

import pytest

from voganish import cli


def run(*argv):
    out = io.StringIO()
    code = cli.main(list(argv), out=out)
    return code, out.getvalue()


def test_verify_all_bundles_passes():
    code, text = run("--bundle", "all", "verify")
    assert code == 0
    assert text.count(": PASS") == 6


def test_strict_turns_warnings_into_failure():
    assert run("--bundle", "so5sing", "verify")[0] == 0
    code, text = run("--bundle", "so5sing", "--strict", "verify")
    assert code == 1
    assert "warn [printed values]" in text
    code, text = run("--strict", "--bundle", "so7", "verify", "--section", "endoscopy")
    assert code == 1 and "[disputed restriction row]" in text


def test_flags_after_the_command():
    code, text = run("verify", "--bundle", "so3", "--strict")
    assert code == 0 and text.startswith("so3 (SO(3)): PASS")


def test_usage_errors_exit_2(capsys):
    assert run("verify")[0] == 2
    assert run("--bundle", "nope", "verify")[0] == 2
    assert run("--bundle", "all", "orbits")[0] == 2
    assert run("--bundle", "so3", "report", "--tables", "bogus")[0] == 2
    assert run("--bundle", "so3", "eta", "--psi", "psi9")[0] == 2
    assert run("--bundle", "so3", "eta", "--s", "x")[0] == 2
    assert run("--bundle", "so3", "endoscopy")[0] == 2
    assert run("--bundle", "so3", "closure", "C0")[0] == 2
    assert run("--bundle", "so3", "frobnicate")[0] == 2
    assert run("--bundle", "so3", "--format", "xml", "orbits")[0] == 2
    assert "error" in capsys.readouterr().err


def test_check_failure_exits_1(tmp_path):
    from voganish.datasets import DATA_DIR
    text = (DATA_DIR / "so3.json").read_text(encoding="utf-8")
    bad = tmp_path / "bad.json"
    bad.write_text(text.replace('"dim": 1', '"dim": 0', 1), encoding="utf-8")
    code, out = run("--bundle", str(bad), "verify")
    assert code == 1
    assert "[orbit dimension]" in out


def test_closure_query():
    code, text = run("--bundle", "so7", "closure", "C1", "C5")
    assert code == 0 and "| C1 | C5 | yes | yes |" in text
    code, text = run("--bundle", "so7", "closure", "C1", "C2")
    assert code == 0 and "| C1 | C2 | no | no |" in text


def test_dual_and_orbits():
    code, text = run("--bundle", "so5sing", "dual", "C2")
    assert code == 0 and "| C2 | C2 | C2 | 1 | ok |" in text
    code, text = run("--bundle", "so3", "orbits")
    assert code == 0 and "| Cy | 1 | C0 | 0 | E12 | 0 |" in text


def test_eta_single_element():
    code, text = run("--bundle", "pgl4", "eta", "--psi", "psi0", "--s", "1")
    assert code == 0
    assert "+(i)[(phi1+i,1)]" in text and "MISMATCH" not in text


def test_endoscopy_tables():
    code, text = run("--bundle", "so7", "endoscopy")
    assert code == 0
    assert "### endo-SO(7)-SO(5)xSO(3)" in text
    assert "| E_C7 | Cux×Cy | C7 | 1 | 1 | (1,1) | ok |" in text


def test_report_is_byte_stable(tmp_path):
    a, b = tmp_path / "a.md", tmp_path / "b.md"
    assert run("--bundle", "all", "report", "-o", str(a))[0] == 0
    assert run("--bundle", "all", "report", "-o", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    text = a.read_text(encoding="utf-8")
    for tid in ("Evs-SO(7)", "NEvs-SO(5)-singular", "mrep-PGL(4)", "mgeo-SL(2)", "eta-SO(7)", "twist-SO(7)"):
        assert f"### {tid}\n" in text


def test_report_csv_subset():
    code, text = run("--bundle", "so3", "--format", "csv", "report", "--tables", "evs,mrep")
    assert code == 0
    lines = text.splitlines()
    assert lines[0] == "table,Evs-SO(3)"
    assert "table,mrep-SO(3)" in lines


def test_seed_from_environment(monkeypatch):
    args = cli.build_parser().parse_args(["--seed", "3", "--bundle", "so3", "verify"])
    monkeypatch.delenv("VOGANISH_SEED", raising=False)
    assert cli._seed(args) == 3
    monkeypatch.setenv("VOGANISH_SEED", "11")
    assert cli._seed(args) == 11
    monkeypatch.setenv("VOGANISH_SEED", "eleven")
    assert run("--bundle", "so3", "verify")[0] == 2


def test_output_does_not_depend_on_seed(monkeypatch):
    monkeypatch.setenv("VOGANISH_SEED", "0")
    a = run("--bundle", "so5sing", "report")[1]
    monkeypatch.setenv("VOGANISH_SEED", "12345")
    b = run("--bundle", "so5sing", "report")[1]
    assert a == b


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "voganish.cli", "--bundle", "sl2", "verify"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("sl2 (SL(2)): PASS")


@pytest.mark.parametrize("cmd", ["orbits", "dual", "closure", "packets", "eta", "verify", "report"])
def test_every_command_runs_on_so7(cmd):
    code, text = run("--bundle", "so7", cmd)
    assert code == 0, text
    assert text
