"""Static flow-graph and call-graph tests."""

from __future__ import annotations

from cgrl.acg import (
    build_call_graph, build_flow_graph, callee_node, func_node, prop_node,
    solve_call_graph, var_node,
)
from cgrl.bindings import VarId, resolve_bindings
from cgrl.parser import parse_program

from conftest import fixture_source


def graphs(source: str, variant: str = "optimistic", unit: str = "t"):
    bound = resolve_bindings(parse_program(source, unit))
    fg, cg = build_call_graph(bound, variant)
    return bound, fg, cg


def lines(cg):
    return sorted((s.line, f) for s, f in cg.edges)


def test_fig2_optimistic_call_graph():
    _, _, cg = graphs(fixture_source("fig2.mjs-mini"), unit="fig2")
    assert lines(cg) == [(5, "fig2::f1#0"), (8, "fig2::main#2")]


def test_dynamic_property_write_breaks_static_flow():
    src = 'var o = {};\no["a" + "b"] = function f() { return null; };\no.ab();\n'
    _, fg, cg = graphs(src)
    assert lines(cg) == []
    # The static read still creates the Prop node; the write never feeds it.
    assert prop_node("ab") in fg.nodes


def test_param_and_return_wiring_optimistic():
    src = ("function id(x) { return x; }\n"
           "function g() { return null; }\n"
           "var h = id(g);\nh();\n")
    _, _, cg = graphs(src)
    assert (4, "t::g#1") in lines(cg)


def test_pessimistic_skips_param_and_return_wiring():
    src = ("function id(x) { x(); return x; }\n"
           "function g() { return null; }\n"
           "var h = id(g);\nh();\n")
    _, _, opt = graphs(src)
    _, _, pess = graphs(src, "pessimistic")
    assert (1, "t::g#1") in lines(opt)
    assert (4, "t::g#1") in lines(opt)
    assert (1, "t::g#1") not in lines(pess)
    assert (4, "t::g#1") not in lines(pess)


def test_pessimistic_one_shot_closure_is_wired():
    src = ("function g() { return null; }\n"
           "(function one(x) { x(); })(g);\n")
    _, _, pess = graphs(src, "pessimistic")
    assert (2, "t::g#0") in lines(pess)
    assert (2, "t::one#1") in lines(pess)


def test_optimistic_is_superset_of_pessimistic():
    for name in ("fig2.mjs-mini", "depcall.mjs-mini", "limitation.mjs-mini"):
        src = fixture_source(name)
        _, _, opt = graphs(src)
        _, _, pess = graphs(src, "pessimistic")
        assert pess.edges <= opt.edges


def test_reflective_call_wiring():
    src = ("function f(x) { x(); return x; }\n"
           "function g() { return null; }\n"
           "var r = f.call(null, g);\nr();\n")
    _, _, cg = graphs(src)
    got = lines(cg)
    assert (3, "call") in got       # the site invokes the reflective native
    assert (3, "t::f#0") in got     # and dispatches to the receiver
    assert (1, "t::g#1") in got     # argument shifted past thisArg
    assert (4, "t::g#1") in got     # return value wired back


def test_reflective_apply_skips_argument_wiring():
    src = ("function f(x) { x(); return x; }\n"
           "function g() { return null; }\n"
           "var r = f.apply(null, [g]);\nr();\n")
    _, _, cg = graphs(src)
    got = lines(cg)
    assert (3, "t::f#0") in got
    assert (1, "t::g#1") not in got  # apply arguments are not modeled
    assert (4, "t::g#1") not in got  # f returns its (unmodeled) parameter


def test_bind_receiver_is_not_dispatched():
    src = ("function f() { return null; }\n"
           "var h = f.bind(null);\nh();\n")
    _, _, cg = graphs(src)
    got = lines(cg)
    assert (2, "bind") in got
    assert (2, "t::f#0") not in got
    assert (3, "t::f#0") not in got


def test_modeled_native_reachable_unmodeled_not():
    src = ("function g() { return null; }\neach(g);\nmysteryFn();\n")
    _, fg, cg = graphs(src)
    got = lines(cg)
    assert (2, "each") in got
    assert (3, "mysteryFn") not in got
    assert func_node("each") in fg.nodes
    assert func_node("mysteryFn") not in fg.nodes


def test_named_function_expression_self_reference():
    src = ("var f = function rec(n) { if (n > 0) { rec(n - 1); } return null; };\n"
           "f(2);\n")
    bound = resolve_bindings(parse_program(src, "t"))
    fg, cg = build_call_graph(bound)
    fid = next(iter(bound.program.functions))
    assert (1, fid) in lines(cg)  # the inner rec(...) site resolves


def test_iff_path_invariant_by_construction():
    src = fixture_source("depcall.mjs-mini")
    bound = resolve_bindings(parse_program(src, "depcall"))
    fg = build_flow_graph(bound)
    cg = solve_call_graph(fg, bound)
    funcs = set(bound.program.functions) | \
        {n for n in bound.natives.specs if bound.natives.is_modeled(n)}
    for site in fg.sites:
        for f in funcs:
            in_cg = (site, f) in cg.edges
            has_path = callee_node(site) in fg.reachable([func_node(f)])
            assert in_cg == has_path


def test_prepopulated_nodes():
    src = "function f(a, b) { return a; }\n"
    bound = resolve_bindings(parse_program(src, "t"))
    fg = build_flow_graph(bound)
    fid = "t::f#0"
    assert func_node(fid) in fg.nodes
    assert var_node(VarId(fid, "a", 0)) in fg.nodes
    assert var_node(VarId(fid, "b", 1)) in fg.nodes
