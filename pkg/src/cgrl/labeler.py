"""Root-cause labeling of missing flows.

Each missing flow is mapped to one coarse label naming the language
feature responsible for the missed call edge.  Flows touching dynamically
evaluated code are labeled by the evaluation channel first (UseOfEval /
EvalViaNewFunction), overriding any other cause found in the same flow;
the only exception is the synthetic Create of a function built from source
strings, which labels as CreationViaFunctionConstructor so that merely
calling such a function is distinguished from running code inside it.

Dynamic-property root causes can additionally be classified fine-grained
by how the property name expression is computed, using a backward
intra-procedural walk over the name expression.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import copies as C
from . import trace as T
from .bindings import BoundProgram
from .detector import MissingFGNode, MissingFGPath, Unresolved
from .syntax import Binary, BoolLit, Ident, NumberLit, PropAccess, SourceLoc, StringLit

# coarse root-cause labels
DYNAMIC_PROPERTY_ACCESS = "DynamicPropertyAccess"
PARAMETER_PASS = "ParameterPass"
FUNCTION_RETURN = "FunctionReturn"
CALL_TO_UNMODELLED_NATIVE = "CallToUnmodelledNative"
CALLS_FROM_UNMODELLED_NATIVE = "CallsFromUnmodelledNative"
CREATION_VIA_FUNCTION_CONSTRUCTOR = "CreationViaFunctionConstructor"
CALL_TO_GETTER_SETTER = "CallToGetterSetter"
USE_OF_EVAL = "UseOfEval"
EVAL_VIA_NEW_FUNCTION = "EvalViaNewFunction"
CALL_TO_BOUNDED_FUNCTION = "CallToBoundedFunction"
MULTIPLE_LEVELS_OF_NATIVE = "MultipleLevelsOfNative"
USE_OF_WITH = "UseOfWith"  # declared for completeness; never produced
OTHERS = "Others"

ALL_LABELS = (
    DYNAMIC_PROPERTY_ACCESS, PARAMETER_PASS, FUNCTION_RETURN,
    CALL_TO_UNMODELLED_NATIVE, CALLS_FROM_UNMODELLED_NATIVE,
    CREATION_VIA_FUNCTION_CONSTRUCTOR, CALL_TO_GETTER_SETTER,
    USE_OF_EVAL, EVAL_VIA_NEW_FUNCTION, CALL_TO_BOUNDED_FUNCTION,
    MULTIPLE_LEVELS_OF_NATIVE, USE_OF_WITH, OTHERS,
)

# fine-grained property-name categories
FOR_IN_LOOP = "ForInLoop"
PARAMETER_PASSED = "ParameterPassed"
OUTER_SCOPE_VARIABLE = "OuterScopeVariable"
PROPERTY_READ = "PropertyRead"
STRING_CONCAT = "StringConcat"
LOCAL_COMPUTATION = "LocalComputation"
UNKNOWN = "Unknown"


@dataclass(frozen=True)
class PropertyNameCategory:
    kind: str
    const_prefix_or_suffix: bool | None = None  # set for StringConcat only


def _involved_entries(flow):
    if isinstance(flow, Unresolved):
        return (flow.invoke,)
    return flow.copy.entries()


def _eval_label(flow, trace: T.FlowTrace) -> str | None:
    for entry in _involved_entries(flow):
        if entry.loc.eval_depth == 0:
            continue
        if entry.kind == T.CREATE and entry.has(T.VIA_FUNCTION_CTOR):
            # Creating a function from strings is its own root cause; only
            # flows running code inside evaluated units take the eval label.
            continue
        channel = trace.channel_of(entry.loc)
        if channel == "functionCtor":
            return EVAL_VIA_NEW_FUNCTION
        return USE_OF_EVAL
    return None


def _is_dynamic_prop(entry) -> bool:
    return entry.kind in (T.PROP_READ, T.PROP_WRITE) \
        and entry.has(T.DYNAMIC_ACCESS)


def label_flow(flow, trace: T.FlowTrace) -> str:
    """The coarse root-cause label of a single (resolved) missing flow."""
    eval_label = _eval_label(flow, trace)
    if eval_label is not None:
        return eval_label
    if isinstance(flow, MissingFGNode):
        entry = flow.entry
        if entry.kind == T.INVOKE:
            if entry.has(T.GETTER) or entry.has(T.SETTER):
                return CALL_TO_GETTER_SETTER
            if entry.has(T.NATIVE_CALLBACK_BOUNDARY):
                return CALLS_FROM_UNMODELLED_NATIVE
        if entry.is_native_origin:
            return CALL_TO_UNMODELLED_NATIVE
        if entry.kind == T.CREATE and entry.has(T.VIA_FUNCTION_CTOR):
            return CREATION_VIA_FUNCTION_CONSTRUCTOR
        if _is_dynamic_prop(entry):
            return DYNAMIC_PROPERTY_ACCESS
        return OTHERS
    if isinstance(flow, MissingFGPath):
        copy = flow.copy
        dest = copy.dest
        if dest.kind == T.INVOKE and dest.has(T.NATIVE_CALLBACK_BOUNDARY):
            return CALLS_FROM_UNMODELLED_NATIVE
        if any(_is_dynamic_prop(e) for e in copy.entries()):
            return DYNAMIC_PROPERTY_ACCESS
        write = copy.write
        if write is not None:
            if write.kind == T.INVOKE or (write.kind == T.VAR_WRITE
                                          and write.binding is not None
                                          and write.binding.is_param):
                return PARAMETER_PASS
            if write.kind == T.RETURN:
                return FUNCTION_RETURN
        return OTHERS
    if isinstance(flow, Unresolved):
        if flow.reason == C.BOUND_FUNCTION:
            return CALL_TO_BOUNDED_FUNCTION
        if flow.reason == C.MULTI_LEVEL_NATIVE:
            return MULTIPLE_LEVELS_OF_NATIVE
        if flow.reason == C.NATIVE_OPAQUE \
                and flow.invoke.has(T.NATIVE_CALLBACK_BOUNDARY):
            return CALLS_FROM_UNMODELLED_NATIVE
        return OTHERS
    raise TypeError(f"unknown flow {type(flow).__name__}")


def label_edge_flows(flows, trace: T.FlowTrace) -> list:
    """Labels of all flows of one missed edge, deduplicated in order."""
    labels = []
    for flow in flows:
        label = label_flow(flow, trace)
        if label not in labels:
            labels.append(label)
    return labels


# --- fine-grained property-name classification -----------------------------

def dynamic_access_locs(flows) -> list:
    """Locations of the dynamic property accesses behind an edge's
    DynamicPropertyAccess flows."""
    locs = []
    for flow in flows:
        entries = ()
        if isinstance(flow, MissingFGNode):
            entries = (flow.entry,)
        elif isinstance(flow, MissingFGPath):
            entries = flow.copy.entries()
        for e in entries:
            if _is_dynamic_prop(e) and e.loc not in locs:
                locs.append(e.loc)
    return locs


def classify_property_name(access_loc: SourceLoc,
                           bound: BoundProgram) -> PropertyNameCategory:
    """Classify how the name of a dynamic property access is computed."""
    info = bound.accesses.get(access_loc)
    if info is None:
        return PropertyNameCategory(UNKNOWN)
    node, owner = info
    if not isinstance(node, PropAccess) or node.name_expr is None:
        return PropertyNameCategory(UNKNOWN)
    return _classify(node.name_expr, owner, bound, frozenset())


def _classify(expr, owner, bound, seen) -> PropertyNameCategory:
    if isinstance(expr, Ident):
        var = expr.binding.var_id
        if any(var in vs for vs in bound.for_in_vars.values()):
            return PropertyNameCategory(FOR_IN_LOOP)
        cls = expr.binding.scope_class
        if cls == "param":
            return PropertyNameCategory(PARAMETER_PASSED)
        if cls in ("outer", "global"):
            if var.is_native:
                return PropertyNameCategory(UNKNOWN)
            return PropertyNameCategory(OUTER_SCOPE_VARIABLE)
        assigns = bound.assignments.get(var, [])
        if len(assigns) == 1 and var not in seen:
            return _classify(assigns[0], owner, bound, seen | {var})
        return PropertyNameCategory(UNKNOWN)
    if isinstance(expr, PropAccess):
        return PropertyNameCategory(PROPERTY_READ)
    if isinstance(expr, Binary) and expr.op == "+":
        spine = _concat_spine(expr)
        const_edge = _is_literal(spine[0], owner, bound) \
            or _is_literal(spine[-1], owner, bound)
        return PropertyNameCategory(STRING_CONCAT, const_edge)
    if isinstance(expr, (StringLit, NumberLit, BoolLit)):
        return PropertyNameCategory(LOCAL_COMPUTATION)
    return PropertyNameCategory(UNKNOWN)


def _concat_spine(expr) -> list:
    """Operands of a left/right-nested `+` chain, in source order."""
    if isinstance(expr, Binary) and expr.op == "+":
        return _concat_spine(expr.left) + _concat_spine(expr.right)
    return [expr]


def _is_literal(expr, owner, bound, depth: int = 0) -> bool:
    if isinstance(expr, (StringLit, NumberLit, BoolLit)):
        return True
    if depth >= 8:
        return False
    if isinstance(expr, Ident) and expr.binding.scope_class == "local":
        assigns = bound.assignments.get(expr.binding.var_id, [])
        if len(assigns) == 1:
            return _is_literal(assigns[0], owner, bound, depth + 1)
    return False
