import json

import pytest

from charnet.cli import main
from charnet.graph_io import check_gexf, read_gexf
from conftest import PRIDE_FIXTURE

CANONICAL = """\
version: 1
input: novel.txt
language: eng
steps:
  - tokenizer
  - ner
  - name: graph_rules_unifier
    options: {min_appearance: 2}
  - name: cooccurrence_extractor
    options: {co_occurrences_dist: 10}
output:
  format: gexf
  path: out/novel.gexf
"""


@pytest.fixture
def workdir(tmp_path):
    (tmp_path / "novel.txt").write_text(PRIDE_FIXTURE, encoding="utf-8")
    (tmp_path / "run.yaml").write_text(CANONICAL, encoding="utf-8")
    return tmp_path


def test_run_canonical(workdir):
    assert main(["run", str(workdir / "run.yaml")]) == 0
    data = (workdir / "out" / "novel.gexf").read_bytes()
    assert check_gexf(data) == []
    canon = {v.canonical for v in read_gexf(data).vertices}
    assert canon == {"Elizabeth", "Jane", "Mr. Darcy"}


def test_extractor_first_is_invalid(workdir, capsys):
    (workdir / "bad.yaml").write_text(
        "version: 1\ninput: novel.txt\nsteps: [cooccurrence_extractor, tokenizer]\n", encoding="utf-8")
    assert main(["run", str(workdir / "bad.yaml")]) == 2
    err = capsys.readouterr().err
    assert "cooccurrence_extractor" in err and "characters" in err


def test_validate_prints_trace(workdir, capsys):
    assert main(["validate", str(workdir / "run.yaml")]) == 0
    out = capsys.readouterr().out
    for name in ("tokenizer", "ner", "graph_rules_unifier", "cooccurrence_extractor"):
        assert name in out
    assert "pipeline is valid" in out


def test_validate_invalid(workdir, capsys):
    (workdir / "bad.yaml").write_text("version: 1\nsteps: [ner]\n", encoding="utf-8")
    assert main(["validate", str(workdir / "bad.yaml")]) == 2
    err = capsys.readouterr().err
    assert "sentences" in err and "tokens" in err


def test_flags_override_config(workdir):
    out = workdir / "x.json"
    assert main(["run", str(workdir / "run.yaml"), "--format", "json", "--output", str(out),
                 "--min-appearance", "3"]) == 0
    doc = json.loads(out.read_text(encoding="utf-8"))
    assert {v["canonical"] for v in doc["vertices"]} == {"Mr. Darcy"}


def test_json_deterministic(workdir):
    paths = [workdir / "a.json", workdir / "b.json"]
    for p in paths:
        assert main(["run", str(workdir / "run.yaml"), "--format", "json", "--output", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_state_and_export(workdir):
    state = workdir / "state.json"
    assert main(["run", str(workdir / "run.yaml"), "--state", str(state)]) == 0
    for fmt in ("gexf", "graphml", "dot", "json"):
        out = workdir / f"exp.{fmt}"
        assert main(["export", str(state), "--format", fmt, "--output", str(out)]) == 0
        assert out.stat().st_size > 0
    assert read_gexf((workdir / "exp.gexf").read_bytes()) == read_gexf((workdir / "out" / "novel.gexf").read_bytes())


def test_dynamic_flags(workdir):
    out = workdir / "dyn.gexf"
    assert main(["run", str(workdir / "run.yaml"), "--dynamic", "--dynamic-window", "10",
                 "--output", str(out)]) == 0
    net = read_gexf(out.read_bytes())
    assert len(net.slices) >= 2


def test_injection(workdir):
    (workdir / "ents.tsv").write_text("0\t1\tPER\n5\t5\tPER\n", encoding="utf-8")
    (workdir / "inj.yaml").write_text(
        "version: 1\ninput: novel.txt\nsteps:\n  - tokenizer\n  - name: naive_unifier\n"
        "    options: {min_appearance: 1}\n  - cooccurrence_extractor\n"
        "inject: {entities: ents.tsv}\noutput: {format: json, path: inj.json}\n", encoding="utf-8")
    assert main(["run", str(workdir / "inj.yaml")]) == 0
    doc = json.loads((workdir / "inj.json").read_text(encoding="utf-8"))
    assert [e["weight"] for e in doc["edges"]] == [1]


def test_malformed_injection(workdir, capsys):
    (workdir / "ents.tsv").write_text("4\t1\tPER\n", encoding="utf-8")
    (workdir / "inj.yaml").write_text(
        "version: 1\ninput: novel.txt\nsteps: [tokenizer, naive_unifier, cooccurrence_extractor]\n"
        "inject: {entities: ents.tsv}\n", encoding="utf-8")
    assert main(["run", str(workdir / "inj.yaml")]) == 2
    assert "line 1" in capsys.readouterr().err


def test_step_failure_exit_1(workdir, tmp_path, capsys):
    # no French hypocorism table in an empty resource directory
    res = tmp_path / "res"
    res.mkdir()
    (workdir / "ents.tsv").write_text("0\t1\tPER\n", encoding="utf-8")
    (workdir / "fra.yaml").write_text(
        "version: 1\ninput: novel.txt\nlanguage: fra\nsteps: [tokenizer, graph_rules_unifier]\n"
        "inject: {entities: ents.tsv}\noutput: {state: s.json}\n", encoding="utf-8")
    assert main(["run", str(workdir / "fra.yaml"), "--resources", str(res)]) == 1
    assert "graph_rules_unifier" in capsys.readouterr().err


def test_config_errors(workdir):
    (workdir / "v2.yaml").write_text("version: 2\nsteps: []\n", encoding="utf-8")
    assert main(["validate", str(workdir / "v2.yaml")]) == 2
    (workdir / "unk.yaml").write_text("version: 1\nsteps: [lemmatizer]\n", encoding="utf-8")
    assert main(["validate", str(workdir / "unk.yaml")]) == 2
    (workdir / "opt.yaml").write_text("version: 1\nsteps: [{name: ner, options: {colour: red}}]\n", encoding="utf-8")
    assert main(["validate", str(workdir / "opt.yaml")]) == 2
    assert main(["validate", str(workdir / "missing.yaml")]) == 2


def test_stdout_output(workdir, capsysbinary):
    (workdir / "s.yaml").write_text(CANONICAL.replace("  path: out/novel.gexf\n", "").replace("gexf", "dot"),
                                    encoding="utf-8")
    assert main(["run", str(workdir / "s.yaml")]) == 0
    assert capsysbinary.readouterr().out.startswith(b"graph ")
