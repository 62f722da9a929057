import json
import subprocess
import sys

import pytest

from gen import random_termbase
from termcore import new_termbase, store
from termcore.cli import main

BASE = "http://ex.org/tb"


@pytest.fixture
def fig3_path(tmp_path, fig3):
    path = tmp_path / "fig3.json"
    path.write_text(store.dumps(fig3), encoding="utf-8")
    return path


def test_validate_ok(fig3_path, capsys):
    assert main(["validate", str(fig3_path)]) == 0
    assert capsys.readouterr().out == "OK: 0 violations\n"


def test_validate_violations(tmp_path, fig3, capsys):
    fig3.remove_link("Denoted", "c2", "t3")
    path = tmp_path / "broken.json"
    path.write_text(store.dumps(fig3))
    assert main(["validate", str(path)]) == 1
    out = capsys.readouterr().out.splitlines()
    assert len(out) == 2 and all(line.startswith("below-min") for line in out)


def test_validate_duplicate_ids(tmp_path, capsys):
    doc = {
        "schemaName": "unified-terminology", "schemaVersion": "1",
        "entities": {"Collection": [{"id": "k", "attrs": {}}, {"id": "k", "attrs": {}}]}, "links": [],
    }
    path = tmp_path / "dup.json"
    path.write_text(json.dumps(doc))
    assert main(["validate", str(path)]) == 1
    assert capsys.readouterr().out.startswith("duplicate-id: Collection k")


def test_validate_missing_and_corrupt(tmp_path):
    assert main(["validate", str(tmp_path / "nope.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["validate", str(bad)]) == 2


def test_store_tbx_store_round_trip(tmp_path):
    inst = random_termbase(5, max_concepts=8, restricted=True)
    src, tbx, back = tmp_path / "in.json", tmp_path / "out.tbx", tmp_path / "back.json"
    src.write_text(store.dumps(inst))
    assert main(["convert", str(src), str(tbx), "--from", "store", "--to", "tbx"]) == 0
    assert main(["convert", str(tbx), str(back), "--from", "tbx", "--to", "store"]) == 0
    assert back.read_bytes() == src.read_bytes()


def test_ntriples(fig3_path, tmp_path):
    out = tmp_path / "out.nt"
    assert main(["convert", str(fig3_path), str(out), "--from", "store", "--to", "ntriples", "--base", BASE]) == 0
    assert len(out.read_text().splitlines()) == 14
    assert main(["convert", str(fig3_path), str(out), "--from", "store", "--to", "ntriples"]) == 2
    assert main(["convert", str(fig3_path), str(out), "--from", "store", "--to", "ntriples", "--base", "nope"]) == 2


def test_ddl(fig3_path, tmp_path):
    out = tmp_path / "schema.sql"
    assert main(["convert", str(fig3_path), str(out), "--from", "store", "--to", "ddl"]) == 0
    assert out.read_text().count("CREATE TABLE") == 16


def test_tbx_conflict_exit_2(tmp_path, capsys):
    doc = tmp_path / "c.tbx"
    entry = (
        '<conceptEntry id="{c}"><descrip type="characteristic">{v}:width</descrip>'
        '<langSec xml:lang="en"><termSec id="{t}"><term>x</term></termSec></langSec></conceptEntry>'
    )
    doc.write_text(
        '<tbx xmlns="urn:iso:std:iso:30042:ed-2"><tbxHeader><fileDesc><titleStmt><title>t</title></titleStmt>'
        "</fileDesc></tbxHeader><text><body>"
        + entry.format(c="c1", t="t1", v="delimiting")
        + entry.format(c="c2", t="t2", v="essential")
        + "</body></text></tbx>"
    )
    assert main(["convert", str(doc), str(tmp_path / "o.json"), "--from", "tbx", "--to", "store"]) == 2
    assert "width" in capsys.readouterr().err


def test_force_and_loss(tmp_path, fig3, capsys):
    fig3.add_entity("Characteristic", "kind", {"variety": "type"})
    fig3.add_entity("Frame", "f1", {"name": "motion"})
    src, out = tmp_path / "in.json", tmp_path / "out.tbx"
    src.write_text(store.dumps(fig3))
    assert main(["convert", str(src), str(out), "--from", "store", "--to", "tbx"]) == 1
    assert not out.exists()
    capsys.readouterr()
    assert main(["convert", str(src), str(out), "--from", "store", "--to", "tbx", "--force", "--title", "x"]) == 1
    err = capsys.readouterr().err
    assert "lost 1 Frame" in err and "lost 1 Characteristic" in err
    assert "<title>x</title>" in out.read_text()


def test_tbx_refused_for_hard_violations(tmp_path, fig3):
    fig3.remove_link("Denoted", "c2", "t3")
    src = tmp_path / "in.json"
    src.write_text(store.dumps(fig3))
    assert main(["convert", str(src), str(tmp_path / "o.tbx"), "--from", "store", "--to", "tbx", "--force"]) == 1


def test_view(fig3, tmp_path, capsysbinary):
    fig3.add_entity("Frame", "f1", {"name": "motion"})
    src = tmp_path / "in.json"
    src.write_text(store.dumps(fig3))
    assert main(["view", str(src), "--approach", "onomasiological"]) == 0
    doc = json.loads(capsysbinary.readouterr().out)
    assert "Frame" not in doc["entities"] and len(doc["links"]) == 3
    assert main(["view", str(src), "--approach", "frame-based"]) == 0
    doc = json.loads(capsysbinary.readouterr().out)
    assert "Frame" in doc["entities"] and len(doc["entities"]["Term"]) == 3
    assert main(["view", str(src), "--approach", "semasiologicall"]) == 2


def test_stats(fig3_path, tmp_path, capsys):
    assert main(["stats", str(fig3_path)]) == 0
    counts = dict(line.split() for line in capsys.readouterr().out.splitlines() if line.startswith("  "))
    assert counts["Concept"] == "2" and counts["Term"] == "3" and counts["Denoted"] == "3"
    assert counts["Frame"] == "0" and len(counts) == 20

    empty = tmp_path / "empty.json"
    empty.write_text(store.dumps(new_termbase()))
    assert main(["stats", str(empty)]) == 0
    assert {v for line in capsys.readouterr().out.splitlines() if line.startswith("  ") for v in [line.split()[1]]} == {"0"}


@pytest.mark.parametrize(
    "argv",
    [[], ["frobnicate"], ["convert", "a", "b", "--fro", "store", "--to", "ddl"], ["view", "x"], ["stats"]],
)
def test_usage_errors(argv):
    assert main(argv) == 2


def test_module_entry_point(fig3_path):
    proc = subprocess.run([sys.executable, "-m", "termcore", "validate", str(fig3_path)], capture_output=True, text=True)
    assert (proc.returncode, proc.stdout) == (0, "OK: 0 violations\n")
