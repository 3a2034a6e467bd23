from __future__ import annotations

import io
import subprocess
import sys

import pytest

from p6groups.cli import main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def test_count():
    assert run("count", "--p", "7") == (0, "860\n")
    assert run("count", "--p", "13") == (0, "1476\n")


def test_count_machine_format():
    code, text = run("count", "--p", "11", "--format", "machine")
    assert code == 0
    lines = text.splitlines()
    assert lines[0] == "p=11 count=1192"
    assert "term=3p^2 value=363" in lines


@pytest.mark.parametrize("argv", [
    ("count", "--p", "6"),
    ("count", "--p", "5"),
    ("count", "--p", "3"),
    ("verify", "--p", "5"),
    ("list", "--p", "7", "--budget", "0"),
    ("frobnicate",),
    ("list", "--p", "7", "--label", "(99,1)"),
    ("list", "--p", "7", "--data", "/nonexistent"),
])
def test_usage_errors_exit_2(argv):
    assert run(*argv)[0] == 2


def test_list_family_1():
    code, text = run("list", "--p", "7", "--family", "1")
    assert code == 0
    lines = text.splitlines()
    assert len(lines) == 11
    assert lines[0] == "1 (1,1)"


def test_list_label_selection_machine():
    code, text = run("list", "--p", "7", "--label", "(21,7rs)", "--format", "machine")
    lines = text.splitlines()
    assert code == 0 and len(lines) == 21
    assert all(line.startswith("id=") and "family=21" in line for line in lines)


def test_inspect_reports_nilpotency_class():
    code, text = run("inspect", "--p", "7", "--index", "1")
    assert code == 0
    assert "nilpotency_class: 1" in text
    assert text.startswith("1 (1,1) | order type 6 |")


def test_inspect_machine():
    code, text = run("inspect", "--p", "7", "--index", "2", "--index", "100", "--format", "machine")
    lines = text.splitlines()
    assert code == 0 and len(lines) == 2
    assert lines[0].startswith("id=2 ") and "nilpotency_class=" in lines[0]


def test_export_label_writes_one_script_per_entry(tmp_path):
    code, text = run("export", "--p", "7", "--label", "(21,7rs)", "--out", str(tmp_path))
    assert code == 0
    files = sorted(tmp_path.iterdir())
    assert len(files) == 21
    assert all(f.suffix == ".g" for f in files)
    assert "(21,7rs)" in files[0].read_text()
    assert "wrote 21 gap-style scripts" in text


def test_export_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run("export", "--p", "7", "--family", "5", "--dialect", "magma-style", "--out", str(a))
    run("export", "--p", "7", "--family", "5", "--dialect", "magma-style", "--out", str(b))
    names = sorted(f.name for f in a.iterdir())
    assert names == sorted(f.name for f in b.iterdir()) and len(names) == 7
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes()


def test_allow_p5_warns(capsys):
    code, text = run("list", "--p", "5", "--allow-p5", "--family", "1")
    assert code == 0 and len(text.splitlines()) == 11
    assert "Φ35" in capsys.readouterr().err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "p6groups", "count", "--p", "17"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "1944\n"
