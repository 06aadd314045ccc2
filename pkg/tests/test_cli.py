from __future__ import annotations

import io
import json
import subprocess
import sys

import pytest

from relindet.cli import EXIT_INVALID, EXIT_OK, EXIT_RUNTIME, main
from relindet.scenario import BUILTINS, builtin_text


class TtyIO(io.StringIO):
    def isatty(self):
        return True


@pytest.fixture
def fig2_file(tmp_path):
    path = tmp_path / "fig2.json"
    path.write_text(builtin_text("fig2"))
    return path


def test_builtin_piped_into_run(monkeypatch, capsys):
    assert main(["builtin", "fig2"]) == EXIT_OK
    doc = capsys.readouterr().out
    monkeypatch.setattr(sys, "stdin", io.StringIO(doc))
    assert main(["run", "-", "--format", "structured"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    frontier = next(q for q in report["queries"] if q["kind"] == "frontier")
    assert frontier["result"]["t"] == "1/2"


def test_structured_report_reproducible(fig2_file, capsys):
    outs = []
    for _ in range(2):
        assert main(["run", str(fig2_file), "--seed", "7", "--format", "structured"]) == EXIT_OK
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1]
    assert json.loads(outs[0])["seed"] == 7


def test_hex_seed_accepted(fig2_file, capsys):
    assert main(["run", str(fig2_file), "--seed", "0xff", "--format", "structured"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["seed"] == 255


def test_text_report_written_to_file(fig2_file, tmp_path):
    out = tmp_path / "report.txt"
    assert main(["run", str(fig2_file), "-o", str(out)]) == EXIT_OK
    text = out.read_text()
    assert "1:00:30 pm" in text and "\x1b[" not in text


def test_color_follows_tty_and_no_color(fig2_file, monkeypatch, capsys):
    tty = TtyIO()
    monkeypatch.setattr(sys, "stdout", tty)
    monkeypatch.delenv("NO_COLOR", raising=False)
    assert main(["run", str(fig2_file)]) == EXIT_OK
    assert "\x1b[" in tty.getvalue()
    tty = TtyIO()
    monkeypatch.setattr(sys, "stdout", tty)
    monkeypatch.setenv("NO_COLOR", "1")
    assert main(["run", str(fig2_file)]) == EXIT_OK
    assert "\x1b[" not in tty.getvalue()


def test_invalid_scenario_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"c": 1,\n  "name": }')
    assert main(["run", str(bad)]) == EXIT_INVALID
    err = capsys.readouterr().err
    assert f"{bad}: 2:11: syntax error" in err
    empty = tmp_path / "empty.json"
    empty.write_text("{}")
    assert main(["check", str(empty)]) == EXIT_INVALID
    assert "missing required field: c" in capsys.readouterr().err


def test_runtime_error_exit_codes(tmp_path, capsys):
    assert main(["run", str(tmp_path / "missing.json")]) == EXIT_RUNTIME
    assert "cannot read" in capsys.readouterr().err
    assert main(["frobnicate"]) == 2
    assert main(["run", "x.json", "--seed", "-1"]) == 2
    assert main(["builtin"]) == EXIT_RUNTIME


def test_diagram_written(fig2_file, tmp_path):
    out = tmp_path / "fig2.svg"
    assert main(["diagram", str(fig2_file), "-o", str(out)]) == EXIT_OK
    svg = out.read_text()
    assert svg.startswith("<?xml") and "<svg" in svg


def test_tolerance_override(tmp_path, capsys):
    # an event 1e-6 outside the light cone counts as inside once the tolerance is widened
    doc = {"c": 1, "events": [{"variable": "a", "at": [0, 0], "value": 0}],
           "queries": [{"kind": "truth", "proposition": "a=0", "at": [1, "1.000001"]}]}
    path = tmp_path / "edge.json"
    path.write_text(json.dumps(doc))
    values = []
    for extra in ([], ["--tolerance", "1e-5"]):
        assert main(["run", str(path), "--format", "structured", *extra]) == EXIT_OK
        values.append(json.loads(capsys.readouterr().out)["queries"][0]["result"]["value"])
    assert values == ["Indeterminate", "True"]


def test_builtin_list_and_check(fig2_file, capsys):
    assert main(["builtin", "--list"]) == EXIT_OK
    assert capsys.readouterr().out.split() == list(BUILTINS)
    assert main(["check", str(fig2_file)]) == EXIT_OK
    assert capsys.readouterr().out.startswith("ok: ")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "relindet", "builtin", "--list"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "fig1" in proc.stdout
