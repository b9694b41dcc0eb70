import json
import shutil
import subprocess
import sys
from importlib import resources
from pathlib import Path

import pytest

from jimmlab.cli import COMMANDS, load_manifest, main, validate_manifest

MANIFEST_DIR = resources.files("jimmlab") / "data" / "manifests"
GOLDEN_DIR = resources.files("jimmlab") / "data" / "golden"


def _write(tmp_path, manifest, name="m.json"):
    p = tmp_path / name
    p.write_text(json.dumps(manifest))
    return str(p)


def _shipped():
    return sorted(p.name for p in MANIFEST_DIR.iterdir() if p.name.endswith(".json"))


@pytest.mark.parametrize("name", _shipped())
def test_shipped_manifests_validate(name):
    m = load_manifest(str(MANIFEST_DIR / name))
    validate_manifest(m)
    assert m["id"] == name[:-5]


def test_every_command_has_a_manifest():
    used = {load_manifest(str(MANIFEST_DIR / n))["command"] for n in _shipped()}
    assert used == set(COMMANDS)


def test_expand_output_is_deterministic(tmp_path):
    m = {"id": "e", "command": "expand", "params": {"source": {"kind": "pi"}, "n_terms": 10}}
    path = _write(tmp_path, m)
    assert main(["expand", "--manifest", path, "--out", str(tmp_path / "a")]) == 0
    assert main(["expand", "--manifest", path, "--out", str(tmp_path / "b")]) == 0
    a = (tmp_path / "a" / "e.json").read_bytes()
    assert a == (tmp_path / "b" / "e.json").read_bytes()
    word = json.loads(a)["word"]
    assert word["integer_part"] == 3 and word["quotients"][:4] == [7, 15, 1, 292]


def test_shipped_manifest_by_name(tmp_path):
    assert main(["theoretical-table", "--manifest", "run-census", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "run-census.csv").read_text().splitlines()
    assert lines[0] == "i,k,m,u,p"
    assert lines[2].startswith("1,0.4150374993,0.1699250014,")


def test_surd_table(tmp_path):
    m = {"id": "s", "command": "surd-table", "params": {"values": [2, 3, 4, 7]}}
    assert main(["surd-table", "--manifest", _write(tmp_path, m), "--out", str(tmp_path)]) == 0
    rows = json.loads((tmp_path / "s.json").read_text())["rows"]
    assert [r["N"] for r in rows] == [2, 3, 7]
    assert rows[0]["jimm"] == "1 + √2" and rows[0]["norm"] == "-1"


@pytest.mark.parametrize("manifest, path", [
    ({"id": "x", "command": "expand", "params": {"source": {"kind": "pi"}}}, "params"),
    ({"id": "x", "command": "expand", "params": {"source": {"kind": "tau"}, "n_terms": 3}},
     "params.source.kind"),
    ({"id": "x", "command": "expand", "params": {"source": {"kind": "pi"}, "n_terms": 0}},
     "params.n_terms"),
    ({"command": "expand", "params": {}}, "<root>"),
    ({"id": "x", "command": "conj-ops", "params": {"operands": {}, "operations": [{"op": "add", "a": "p"}]}},
     "params.operations.0"),
])
def test_schema_violations_exit_1(tmp_path, capsys, manifest, path):
    cmd = manifest["command"]
    assert main([cmd, "--manifest", _write(tmp_path, manifest), "--out", str(tmp_path)]) == 1
    err = capsys.readouterr().err
    assert f"manifest error: {path}" in err


def test_command_mismatch(tmp_path, capsys):
    m = {"id": "x", "command": "expand", "params": {"source": {"kind": "pi"}, "n_terms": 3}}
    assert main(["jimm", "--manifest", _write(tmp_path, m)]) == 1
    assert "command" in capsys.readouterr().err


def test_bad_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{nope")
    assert main(["expand", "--manifest", str(p)]) == 1


def test_missing_manifest_or_digits_exit_2(tmp_path):
    assert main(["expand", "--manifest", str(tmp_path / "absent.json")]) == 2
    m = {"id": "g", "command": "expand",
         "params": {"source": {"kind": "digit-stream", "path": str(tmp_path / "gamma.txt"), "name": "gamma"},
                    "n_terms": 5}}
    assert main(["expand", "--manifest", _write(tmp_path, m), "--out", str(tmp_path)]) == 2


def test_precision_exit_2(tmp_path):
    (tmp_path / "x.txt").write_text("3.14159")
    m = {"id": "j", "command": "jimm",
         "params": {"source": {"kind": "digit-stream", "path": str(tmp_path / "x.txt")}, "digits": 30}}
    assert main(["jimm", "--manifest", _write(tmp_path, m), "--out", str(tmp_path)]) == 2
    assert not (tmp_path / "j.json").exists()


def test_budget_exit_3(tmp_path, capsys):
    m = {"id": "s", "command": "surd-table", "params": {"values": [7], "k_max": 1}}
    assert main(["surd-table", "--manifest", _write(tmp_path, m), "--out", str(tmp_path)]) == 3
    assert "budget" in capsys.readouterr().err


def test_heavy_overrides(tmp_path, monkeypatch):
    seen = {}

    def fake(p):
        seen.update(p)
        return {"json": {}}

    monkeypatch.setitem(__import__("jimmlab.cli").cli.HANDLERS, "stats", fake)
    m = {"id": "t", "command": "stats", "params": {"source": {"kind": "pi"}, "input_terms": 10},
         "heavy": {"input_terms": 100000}}
    path = _write(tmp_path, m)
    main(["stats", "--manifest", path, "--out", str(tmp_path)])
    assert seen["input_terms"] == 10
    main(["stats", "--manifest", path, "--out", str(tmp_path), "--heavy"])
    assert seen["input_terms"] == 100000


def test_stats_csv(tmp_path):
    m = {"id": "t", "command": "stats",
         "params": {"source": {"kind": "pi", "label": "pi"}, "input_terms": 300, "max_quotient": 3}}
    assert main(["stats", "--manifest", _write(tmp_path, m), "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert lines[0] == "quotient,percent,series"
    assert [ln.split(",")[0] for ln in lines[1:]] == ["1", "2", "3"]
    assert lines[1].endswith(",J(pi)")


def test_reproduce_subset_passes(tmp_path, capsys):
    m = {"id": "r", "command": "reproduce", "params": {"only": [2, 8]}}
    assert main(["reproduce", "--manifest", _write(tmp_path, m), "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "[PASS] criterion  2" in out and "[PASS] criterion  8" in out


def test_tampered_golden_fails(tmp_path, capsys):
    golden = tmp_path / "golden"
    shutil.copytree(str(GOLDEN_DIR), golden)
    t = json.loads((golden / "jimm_frequencies.json").read_text())
    t["jimm_cbrt2"]["percent"]["1"] = "90.000"
    (golden / "jimm_frequencies.json").write_text(json.dumps(t))
    m = {"id": "r", "command": "reproduce", "params": {"only": [5], "golden_dir": str(golden)}}
    assert main(["reproduce", "--manifest", _write(tmp_path, m), "--out", str(tmp_path / "o")]) == 1
    assert "[FAIL] criterion  5" in capsys.readouterr().out


def test_console_script_help():
    r = subprocess.run([sys.executable, "-m", "jimmlab.cli", "--help"], capture_output=True, text=True)
    assert r.returncode == 0
    for c in COMMANDS:
        assert c in r.stdout


def test_golden_dir_flag(tmp_path, capsys):
    golden = tmp_path / "golden"
    shutil.copytree(str(GOLDEN_DIR), golden)
    g = json.loads((golden / "surd_images.json").read_text())
    assert main(["reproduce", "--manifest", _write(tmp_path, {"id": "r", "command": "reproduce",
                                                              "params": {"only": [2]}}),
                 "--golden-dir", str(golden), "--out", str(tmp_path / "o")]) == 0
    g["rows"] = g["rows"][:3]
    g["rows"][0]["d"] = 3  # sqrt 2 row now claims a different surd
    (golden / "surd_images.json").write_text(json.dumps(g))
    rc = main(["reproduce", "--manifest", _write(tmp_path, {"id": "r", "command": "reproduce",
                                                            "params": {"only": [1]}}),
               "--golden-dir", str(golden), "--out", str(tmp_path / "o")])
    assert rc == 1
    assert "[FAIL] criterion  1" in capsys.readouterr().out
