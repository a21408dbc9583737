"""Lexer, parser, printer, and binding tests."""

from __future__ import annotations

from pathlib import Path

import pytest

from cgrl.bindings import NATIVE_OWNER, TOPLEVEL, resolve_bindings
from cgrl.errors import ParseError, UnboundVariable
from cgrl.lexer import tokenize
from cgrl.parser import parse_program
from cgrl.printer import print_program
from cgrl.syntax import Call, PropAccess, structure, walk

from conftest import FIXTURES


def all_fixture_sources():
    return sorted(FIXTURES.rglob("*.mjs-mini"))


def test_tokenize_basics():
    toks = tokenize('var x = 1 + "a"; // comment', "u")
    kinds = [t.kind for t in toks]
    assert "eof" in kinds[-1:]
    assert any(t.kind == "string" and t.value == "a" for t in toks)


def test_tokenize_rejects_garbage():
    with pytest.raises(ParseError):
        tokenize("var x = @;", "u")


@pytest.mark.parametrize("path", all_fixture_sources(),
                         ids=lambda p: p.stem)
def test_parse_print_parse_fixpoint(path: Path):
    program = parse_program(path.read_text(), path.stem)
    printed = print_program(program)
    reparsed = parse_program(printed, path.stem)
    assert structure(program.body) == structure(reparsed.body)
    assert print_program(reparsed) == printed


@pytest.mark.parametrize("path", all_fixture_sources(),
                         ids=lambda p: p.stem)
def test_distinguishing_locs_are_injective(path: Path):
    program = parse_program(path.read_text(), path.stem)
    locs = []
    for node in walk(program.body):
        if isinstance(node, (Call, PropAccess)):
            locs.append(node.loc)
    assert len(locs) == len(set(locs))


def test_function_ids_are_unique_and_stable():
    src = "function a() { return null; }\nvar b = function () { return null; };\n"
    p1 = parse_program(src, "u")
    p2 = parse_program(src, "u")
    assert sorted(p1.functions) == sorted(p2.functions)
    assert len(p1.functions) == 2
    assert all(fid.startswith("u::") for fid in p1.functions)


def test_unbound_variable_rejected():
    program = parse_program("missing();", "u")
    with pytest.raises(UnboundVariable):
        resolve_bindings(program)


def test_lenient_binding_maps_unknowns_to_toplevel():
    program = parse_program("missing();", "u")
    bound = resolve_bindings(program, lenient=True)
    ident = program.body[0].expr.callee
    assert ident.binding.var_id.owner == TOPLEVEL


def test_native_globals_bind_to_native_owner():
    program = parse_program("each(each);", "u")
    bound = resolve_bindings(program)
    ident = program.body[0].expr.callee
    assert ident.binding.var_id.owner == NATIVE_OWNER
    assert bound is not None


def test_binder_records_for_in_and_assignments():
    src = "var o = {};\nfor (k in o) { o[k] = null; }\nvar n = \"x\";\n"
    program = parse_program(src, "u")
    bound = resolve_bindings(program)
    all_forin = set()
    for vs in bound.for_in_vars.values():
        all_forin |= vs
    assert any(v.name == "k" for v in all_forin)
    assert any(v.name == "n" for v in bound.assignments)


def test_parse_error_has_location():
    with pytest.raises(ParseError) as exc:
        parse_program("var = 3;", "u")
    assert exc.value.loc is not None
