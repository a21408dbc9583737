"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Every test prints `ACCEPTANCE <n> <name>: PASS` (or FAIL) straight to the
terminal so the gate's status is visible in any pytest run.
"""

from __future__ import annotations

import random
import time
from contextlib import contextmanager

import pytest

from cgrl.acg import FlowGraph, build_call_graph, callee_node, func_node
from cgrl.bindings import resolve_bindings
from cgrl.cli import main
from cgrl.copies import find_dynamic_copies
from cgrl.detector import MissingFGPath
from cgrl.interp import execute
from cgrl.labeler import (
    CALLS_FROM_UNMODELLED_NATIVE, CALL_TO_BOUNDED_FUNCTION,
    CALL_TO_GETTER_SETTER, CALL_TO_UNMODELLED_NATIVE,
    CREATION_VIA_FUNCTION_CONSTRUCTOR, DYNAMIC_PROPERTY_ACCESS,
    EVAL_VIA_NEW_FUNCTION, FUNCTION_RETURN, MULTIPLE_LEVELS_OF_NATIVE,
    PARAMETER_PASS, USE_OF_EVAL,
)
from cgrl.parser import parse_program

from conftest import FIXTURES, fixture_source, run_fixture
from corpusgen import generate_corpus
from oracles import chain_as_triples, closure_reachable, oracle_copy_chain


@contextmanager
def criterion(capsys, number: int, name: str):
    started = time.monotonic()
    try:
        yield started
    except BaseException:
        with capsys.disabled():
            print(f"\nACCEPTANCE {number} {name}: FAIL")
        raise
    with capsys.disabled():
        print(f"\nACCEPTANCE {number} {name}: PASS")


def corpus_sources():
    """All checked-in MiniJS programs, as (unit, source) pairs."""
    out = []
    for path in sorted(FIXTURES.rglob("*.mjs-mini")):
        out.append((path.stem, path.read_text()))
    return out


def test_criterion_1_worked_example(capsys):
    with criterion(capsys, 1, "worked example end-to-end") as started:
        result = run_fixture("fig2.mjs-mini")
        assert [(e.site.line, e.callee) for e in result.missed] == \
            [(6, "fig2::f2#1")]
        (edge,) = result.missed
        (flow,) = result.flows[edge.key]
        assert isinstance(flow, MissingFGPath)
        assert flow.src.kind == "Prop" and flow.src.name == "MyPhone"
        assert flow.dst == callee_node(edge.site)
        assert result.labels[edge.key] == [DYNAMIC_PROPERTY_ACCESS]
        metrics = {m.metric: m for m in result.metrics}
        assert metrics["reachableEdges"].recall == pytest.approx(2 / 3)
        assert metrics["callSiteTargets"].recall == pytest.approx(2 / 3)
        assert metrics["reachableNodes"].recall == pytest.approx(3 / 4)
        assert time.monotonic() - started < 1.0


def test_criterion_2_dependent_call(capsys):
    with criterion(capsys, 2, "dependent-call resolution") as started:
        from cgrl.detector import (
            DependentCall, find_missing_flows, missed_edges,
        )
        bound = resolve_bindings(
            parse_program(fixture_source("depcall.mjs-mini"), "depcall"))
        res = execute(bound)
        fg, cg = build_call_graph(bound, variant="optimistic")
        missed = missed_edges(res.dcg, cg)
        assert len(missed) == 2
        initial = {
            e.callee: find_missing_flows(
                find_dynamic_copies(res.trace,
                                    res.trace.entries[e.witness]), fg, cg)
            for e in missed
        }
        assert any(isinstance(f, DependentCall)
                   for f in initial["depcall::f#0"])
        result = run_fixture("depcall.mjs-mini")
        for edge in result.missed:
            (flow,) = result.flows[edge.key]
            assert isinstance(flow, MissingFGPath)
            assert result.labels[edge.key] == [DYNAMIC_PROPERTY_ACCESS]
        assert result.distribution.coarse_pct == \
            {DYNAMIC_PROPERTY_ACCESS: pytest.approx(100.0)}
        assert time.monotonic() - started < 1.0


def test_criterion_3_infeasible_copy(capsys):
    with criterion(capsys, 3, "known-infeasible copy pinned"):
        import cgrl.trace as T
        bound = resolve_bindings(
            parse_program(fixture_source("limitation.mjs-mini"),
                          "limitation"))
        res = execute(bound)
        invoke = next(e for e in res.trace.entries
                      if e.kind == T.INVOKE
                      and e.func_id == "limitation::bar#1")
        chain = find_dynamic_copies(res.trace, invoke)
        assert chain.complete
        infeasible = chain.copies[-2]
        assert (infeasible.source.kind, infeasible.source.name,
                infeasible.source.loc.line) == (T.VAR_READ, "y", 5)
        assert (infeasible.write.kind, infeasible.write.func_id) == \
            (T.INVOKE, "limitation::foo#0")
        assert (infeasible.dest.kind, infeasible.dest.name,
                infeasible.dest.loc.line) == (T.VAR_READ, "p", 1)


def test_criterion_4_pessimistic_vs_optimistic(capsys):
    with criterion(capsys, 4, "pessimistic vs optimistic") as started:
        programs = sorted((FIXTURES / "pessimistic").glob("*.mjs-mini"))
        assert len(programs) == 10
        interprocedural = {PARAMETER_PASS, FUNCTION_RETURN}
        seen = set()
        for path in programs:
            src = path.read_text()
            opt = run_fixture(f"pessimistic/{path.name}")
            pes = run_fixture(f"pessimistic/{path.name}",
                              variant="pessimistic")
            opt_keys = {e.key for e in opt.missed}
            for edge in pes.missed:
                if edge.key in opt_keys:
                    continue
                labels = set(pes.labels[edge.key])
                assert labels and labels <= interprocedural, (path.name, src)
                seen |= labels
        assert seen == interprocedural
        assert time.monotonic() - started < 5.0


def test_criterion_5_label_coverage(capsys):
    with criterion(capsys, 5, "label coverage 8/8"):
        expected = {
            "label_native_call": CALL_TO_UNMODELLED_NATIVE,
            "label_native_callback": CALLS_FROM_UNMODELLED_NATIVE,
            "label_function_ctor": CREATION_VIA_FUNCTION_CONSTRUCTOR,
            "label_getter": CALL_TO_GETTER_SETTER,
            "label_eval": USE_OF_EVAL,
            "label_eval_ctor": EVAL_VIA_NEW_FUNCTION,
            "label_bound": CALL_TO_BOUNDED_FUNCTION,
            "label_multilevel": MULTIPLE_LEVELS_OF_NATIVE,
        }
        passed = 0
        for name, label in expected.items():
            result = run_fixture(name + ".mjs-mini")
            produced = {lab for e in result.missed
                        for lab in result.labels[e.key]}
            assert label in produced, name
            passed += 1
        assert passed == 8


def test_criterion_6_oracles(capsys):
    with criterion(capsys, 6, "oracle suites") as started:
        # (a) reachability vs transitive-closure oracle.
        rng = random.Random(6)
        for _ in range(100):
            n = rng.randrange(1, 51)
            nodes = [func_node(f"o::n{i}#0") for i in range(n)]
            fg = FlowGraph()
            edges = set()
            for _ in range(rng.randrange(0, 3 * n)):
                a, b = rng.choice(nodes), rng.choice(nodes)
                fg.add_edge(a, b)
                edges.add((a, b))
            sources = rng.sample(nodes, rng.randrange(1, n + 1))
            assert fg.reachable(sources) == \
                closure_reachable(nodes, edges, sources)

        # (b) copy chains vs exhaustive backward-search oracle on 100
        # executed generated programs.
        traces = 0
        for i, src in enumerate(generate_corpus(100, seed=60)):
            bound = resolve_bindings(parse_program(src, f"acc6b_{i}"))
            res = execute(bound)
            assert res.error is None, src
            traces += 1
            for invoke in res.trace.invokes():
                chain = find_dynamic_copies(res.trace, invoke)
                expected, reason = oracle_copy_chain(res.trace, invoke)
                assert chain_as_triples(chain) == expected, src
                assert chain.reason == reason, src
        assert traces == 100

        # (c) iff-path call-graph invariant on every checked-in program.
        for unit, src in corpus_sources():
            bound = resolve_bindings(parse_program(src, unit))
            for variant in ("optimistic", "pessimistic"):
                fg, cg = build_call_graph(bound, variant=variant)
                funcs = set(bound.program.functions) | \
                    {nm for nm in bound.natives.specs
                     if bound.natives.is_modeled(nm)}
                for site in fg.sites:
                    for f in funcs:
                        assert ((site, f) in cg.edges) == \
                            (callee_node(site) in
                             fg.reachable([func_node(f)])), (unit, variant)

        # (d) flows are non-empty for every missed edge with a complete
        # chain, on a 200-program generated corpus.
        from cgrl.cli import analyze
        checked = 0
        for i, src in enumerate(generate_corpus(200, seed=61)):
            assert len(src.splitlines()) <= 30
            for variant in ("optimistic", "pessimistic"):
                result = analyze(src, f"acc6d_{i}", variant=variant)
                assert result.error is None, src
                for edge in result.missed:
                    if result.chains[edge.key].complete:
                        assert result.flows[edge.key], (src, variant)
                        checked += 1
        assert checked > 0
        assert time.monotonic() - started < 60.0


def test_criterion_7_fine_grained(capsys):
    with criterion(capsys, 7, "fine-grained classification"):
        result = run_fixture("finegrained.mjs-mini", fine_grained=True)
        by_line = {}
        for edge in result.missed:
            for cat in result.fine[edge.key]:
                by_line.setdefault(edge.site.line, set()).add(
                    (cat.kind, cat.const_prefix_or_suffix))
        assert by_line[5] == {("ForInLoop", None)}
        assert by_line[6] == {("ParameterPassed", None)}
        assert by_line[9] == {("OuterScopeVariable", None)}
        assert by_line[12] == {("PropertyRead", None)}
        assert by_line[14] == {("StringConcat", True)}
        assert by_line[16] == {("StringConcat", False)}
        assert by_line[18] == {("LocalComputation", None)}


def test_criterion_8_determinism(capsys, tmp_path):
    with criterion(capsys, 8, "deterministic reports"):
        outs = []
        for run in ("a", "b"):
            out = tmp_path / run
            assert main(["run", "--corpus", str(FIXTURES),
                         "--fine-grained", "--out", str(out)]) == 0
            outs.append(out)
        reports = sorted(p.relative_to(outs[0])
                         for p in outs[0].rglob("*.json"))
        assert reports
        for rel in reports:
            assert (outs[0] / rel).read_bytes() == \
                (outs[1] / rel).read_bytes(), rel
