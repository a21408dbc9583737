"""CLI entrypoint and artifact serialization."""

from __future__ import annotations

import json

import pytest

from cgrl import serialize as S
from cgrl.cli import main

from conftest import FIXTURES, fixture_source, run_fixture

FIG2 = str(FIXTURES / "fig2.mjs-mini")

ARTIFACTS = ("trace.jsonl", "dcg.json", "fg.json", "cg.json", "flows.json",
             "report.json", "report.csv", "summary.txt")


def run_cli(tmp_path, *argv):
    out = tmp_path / "out"
    code = main(["run", *argv, "--out", str(out)])
    return code, out


def test_run_writes_all_artifacts(tmp_path):
    code, out = run_cli(tmp_path, FIG2)
    assert code == 0
    (unit_dir,) = [p for p in out.iterdir() if p.is_dir()]
    for name in ARTIFACTS:
        assert (unit_dir / name).exists(), name
    report = json.loads((unit_dir / "report.json").read_text())
    assert report["kind"] == "report"
    assert report["schemaVersion"] == S.SCHEMA_VERSION
    assert report["missedEdges"] == 1


def test_usage_error_without_program(tmp_path, capsys):
    assert main(["run", "--out", str(tmp_path / "o")]) == 2
    assert "PROGRAM" in capsys.readouterr().err


def test_usage_error_with_both_program_and_corpus(tmp_path):
    assert main(["run", FIG2, "--corpus", str(FIXTURES),
                 "--out", str(tmp_path / "o")]) == 2


def test_usage_error_on_empty_corpus(tmp_path):
    empty = tmp_path / "empty"
    empty.mkdir()
    assert main(["run", "--corpus", str(empty),
                 "--out", str(tmp_path / "o")]) == 2


def test_analysis_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.mjs-mini"
    bad.write_text("function (((\n")
    code, _ = run_cli(tmp_path, str(bad))
    assert code == 1
    assert "cgrl:" in capsys.readouterr().err


def test_corpus_run_writes_aggregate(tmp_path):
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    for name in ("fig2", "depcall"):
        (corpus / f"{name}.mjs-mini").write_text(
            fixture_source(f"{name}.mjs-mini"))
    code = main(["run", "--corpus", str(corpus),
                 "--out", str(tmp_path / "out")])
    assert code == 0
    agg = json.loads((tmp_path / "out" / "aggregate.json").read_text())
    assert agg["kind"] == "aggregate-report"
    assert agg["programs"] == 2
    assert {m["metric"] for m in agg["metrics"]} == \
        {"callSiteTargets", "reachableNodes", "reachableEdges"}


def test_reports_are_deterministic(tmp_path):
    _, out1 = run_cli(tmp_path / "a", FIG2, "--fine-grained")
    _, out2 = run_cli(tmp_path / "b", FIG2, "--fine-grained")
    for name in ARTIFACTS:
        (d1,) = [p for p in out1.iterdir() if p.is_dir()]
        (d2,) = [p for p in out2.iterdir() if p.is_dir()]
        assert (d1 / name).read_bytes() == (d2 / name).read_bytes(), name


def test_from_artifacts_round_trip(tmp_path):
    code, out = run_cli(tmp_path, FIG2)
    assert code == 0
    (unit_dir,) = [p for p in out.iterdir() if p.is_dir()]
    paths = ",".join(str(unit_dir / n)
                     for n in ("trace.jsonl", "dcg.json", "fg.json",
                               "cg.json"))
    out2 = tmp_path / "replay"
    code = main(["run", FIG2, "--from-artifacts", paths,
                 "--out", str(out2)])
    assert code == 0
    (unit2,) = [p for p in out2.iterdir() if p.is_dir()]
    assert (unit2 / "report.json").read_bytes() == \
        (unit_dir / "report.json").read_bytes()


def test_trace_round_trip():
    result = run_fixture("fig2.mjs-mini")
    text = S.trace_to_jsonl(result.trace)
    back = S.trace_from_jsonl(text)
    assert len(back.entries) == len(result.trace.entries)
    for a, b in zip(result.trace.entries, back.entries):
        assert (a.kind, a.loc, a.name, a.binding, a.func_id, a.args,
                a.flags) == (b.kind, b.loc, b.name, b.binding, b.func_id,
                             b.args, b.flags)


def test_graph_round_trips():
    result = run_fixture("depcall.mjs-mini")
    dcg2 = S.dcg_from_json(S.dcg_to_json(result.dcg))
    assert dcg2.edge_pairs() == result.dcg.edge_pairs()
    fg2 = S.fg_from_json(S.fg_to_json(result.fg))
    assert set(fg2.nodes) == set(result.fg.nodes)
    cg2 = S.cg_from_json(S.cg_to_json(result.cg))
    assert cg2.edges == result.cg.edges
    assert cg2.variant == result.cg.variant


def test_serialized_output_is_stable():
    result = run_fixture("fig2.mjs-mini")
    assert S.dumps(S.dcg_to_json(result.dcg)) == \
        S.dumps(S.dcg_to_json(result.dcg))


def test_unknown_subcommand_rejected():
    with pytest.raises(SystemExit):
        main(["frobnicate"])
