"""Root-cause labeling: coarse labels and fine-grained property-name
categories, frozen against the label fixture suite."""

from __future__ import annotations

import pytest

from cgrl.labeler import (
    ALL_LABELS, CALLS_FROM_UNMODELLED_NATIVE, CALL_TO_BOUNDED_FUNCTION,
    CALL_TO_GETTER_SETTER, CALL_TO_UNMODELLED_NATIVE,
    CREATION_VIA_FUNCTION_CONSTRUCTOR, DYNAMIC_PROPERTY_ACCESS,
    EVAL_VIA_NEW_FUNCTION, MULTIPLE_LEVELS_OF_NATIVE, OTHERS,
    PARAMETER_PASS, PropertyNameCategory, USE_OF_EVAL, USE_OF_WITH,
)

from conftest import run_fixture, run_source

COARSE_EXPECTATIONS = [
    ("label_native_call", CALL_TO_UNMODELLED_NATIVE),
    ("label_native_callback", CALLS_FROM_UNMODELLED_NATIVE),
    ("label_function_ctor", CREATION_VIA_FUNCTION_CONSTRUCTOR),
    ("label_getter", CALL_TO_GETTER_SETTER),
    ("label_eval", USE_OF_EVAL),
    ("label_bound", CALL_TO_BOUNDED_FUNCTION),
    ("label_multilevel", MULTIPLE_LEVELS_OF_NATIVE),
]


@pytest.mark.parametrize("fixture,expected", COARSE_EXPECTATIONS)
def test_single_label_fixtures(fixture, expected):
    result = run_fixture(fixture + ".mjs-mini")
    (edge,) = result.missed
    assert result.labels[edge.key] == [expected]


def test_eval_via_new_function_fixture():
    result = run_fixture("label_eval_ctor.mjs-mini")
    by_callee = {e.callee: result.labels[e.key] for e in result.missed}
    assert by_callee["label_eval_ctor::g#0"] == [EVAL_VIA_NEW_FUNCTION]
    assert by_callee["label_eval_ctor$eval1::fn#0"] == \
        [CREATION_VIA_FUNCTION_CONSTRUCTOR]


def test_dynamic_property_access_label():
    result = run_fixture("fig2.mjs-mini")
    (edge,) = result.missed
    assert result.labels[edge.key] == [DYNAMIC_PROPERTY_ACCESS]


def test_eval_outranks_dynamic_property_access():
    result = run_source(
        'var o = { p: function f() { return null; } };\n'
        'evalCode("o[\\"p\\"]();");\n')
    (edge,) = result.missed
    assert result.labels[edge.key] == [USE_OF_EVAL]


def test_parameter_pass_label_under_pessimistic():
    result = run_source(
        "function call1(g) { g(); }\n"
        "function f() { return null; }\n"
        "call1(f);\n", variant="pessimistic")
    labels = {lab for e in result.missed for lab in result.labels[e.key]}
    assert labels == {PARAMETER_PASS}


def test_use_of_with_declared_but_unused():
    assert USE_OF_WITH in ALL_LABELS
    for name in ("fig2", "depcall", "limitation", "label_eval"):
        result = run_fixture(name + ".mjs-mini")
        for e in result.missed:
            assert USE_OF_WITH not in result.labels[e.key]


def test_all_labels_has_thirteen_entries():
    assert len(ALL_LABELS) == 13
    assert len(set(ALL_LABELS)) == 13
    assert OTHERS in ALL_LABELS


FINE_EXPECTATIONS = [
    (5, "ForInLoop", None),
    (6, "ParameterPassed", None),
    (9, "OuterScopeVariable", None),
    (12, "PropertyRead", None),
    (14, "StringConcat", True),
    (16, "StringConcat", False),
    (18, "LocalComputation", None),
]


def test_fine_grained_categories():
    result = run_fixture("finegrained.mjs-mini", fine_grained=True)
    by_line = {}
    for edge in result.missed:
        for cat in result.fine[edge.key]:
            by_line.setdefault(edge.site.line, set()).add(cat)
    for line, kind, const in FINE_EXPECTATIONS:
        assert by_line[line] == {PropertyNameCategory(kind, const)}, line


def test_fine_grained_disabled_by_default():
    result = run_fixture("fig2.mjs-mini")
    assert result.fine is None
