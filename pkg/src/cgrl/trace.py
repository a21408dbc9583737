"""Dynamic flow trace and dynamic call graph data structures.

A trace logs every creation, read, write, invocation and return of a
function value.  Property entries carry only the property name, never a
base-object identity, matching the field-based heap abstraction of the
static analysis under study.  Parameter passing is implicit in Invoke
entries (which record the function-valued arguments per position); formal
parameter reads and return-value reads at call sites appear as VarRead
entries with param / return pseudo-bindings.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .bindings import VarId
from .syntax import SourceLoc

# Entry kinds
CREATE = "Create"
VAR_READ = "VarRead"
VAR_WRITE = "VarWrite"
PROP_READ = "PropRead"
PROP_WRITE = "PropWrite"
INVOKE = "Invoke"
RETURN = "Return"

KINDS = (CREATE, VAR_READ, VAR_WRITE, PROP_READ, PROP_WRITE, INVOKE, RETURN)

# Flags
GETTER = "getter"
SETTER = "setter"
SYNTHETIC = "synthetic"
EVAL_ORIGIN = "evalOrigin"
NATIVE_CALLBACK_BOUNDARY = "nativeCallbackBoundary"
BOUND_CALL = "boundCall"
MULTI_LEVEL_NATIVE = "multiLevelNative"
VIA_FUNCTION_CTOR = "viaFunctionCtor"
DYNAMIC_ACCESS = "dynamicAccess"


@dataclass(frozen=True)
class TraceEntry:
    index: int
    kind: str
    func_value: int            # runtime id of the function value involved
    loc: SourceLoc
    name: str | None = None    # variable or property name
    binding: VarId | None = None
    func_id: str | None = None  # Create/Invoke/Return: function id or native name
    args: tuple | None = None   # Invoke: func_value id (or None) per arg position
    flags: frozenset = frozenset()

    def has(self, flag: str) -> bool:
        return flag in self.flags

    @property
    def is_read(self) -> bool:
        return self.kind in (VAR_READ, PROP_READ)

    @property
    def is_read_or_create(self) -> bool:
        return self.kind == CREATE or self.is_read

    @property
    def is_param_read(self) -> bool:
        return self.kind == VAR_READ and self.binding is not None \
            and self.binding.is_param

    @property
    def is_ret_read(self) -> bool:
        return self.kind == VAR_READ and self.binding is not None \
            and self.binding.is_ret

    @property
    def is_native_origin(self) -> bool:
        """Read of a predeclared native global; chain origins, like Create."""
        return self.kind == VAR_READ and self.binding is not None \
            and self.binding.is_native


@dataclass
class FlowTrace:
    entries: list = field(default_factory=list)
    # func_value id -> creating FunctionId or native name
    functions: dict = field(default_factory=dict)
    # eval unit name -> channel ("eval" | "functionCtor")
    eval_units: dict = field(default_factory=dict)
    # FunctionIds of functions created at runtime via makeFunction
    function_ctor_funcs: set = field(default_factory=set)

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i) -> TraceEntry:
        return self.entries[i]

    def append(self, **kw) -> TraceEntry:
        entry = TraceEntry(index=len(self.entries), **kw)
        self.entries.append(entry)
        return entry

    def invokes(self):
        return [e for e in self.entries if e.kind == INVOKE]

    def channel_of(self, loc: SourceLoc) -> str | None:
        return self.eval_units.get(loc.unit)


TOPLEVEL = "<toplevel>"


@dataclass(frozen=True)
class CallEdge:
    caller: str       # FunctionId, TOPLEVEL, or native name
    site: SourceLoc
    callee: str       # FunctionId or native name


@dataclass
class DynamicCallGraph:
    # edge -> index of first witnessing Invoke entry
    edges: dict = field(default_factory=dict)
    entrypoints: set = field(default_factory=lambda: {TOPLEVEL})

    def add(self, caller, site, callee, witness_index):
        edge = CallEdge(caller, site, callee)
        self.edges.setdefault(edge, witness_index)

    def edge_pairs(self):
        """(site, callee) view used when comparing with static call graphs."""
        return {(e.site, e.callee) for e in self.edges}

    def nodes(self):
        out = set(self.entrypoints)
        for e in self.edges:
            out.add(e.caller)
            out.add(e.callee)
        return out
