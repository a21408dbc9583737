"""AST for MiniJS: a small JavaScript-like language with first-class
functions, objects with data and accessor properties, static and dynamic
property accesses, and for-in loops.

Every expression node and function definition carries a SourceLoc placed on
the token that distinguishes the construct (the '(' of a call, the '.' or
'[' of a property access, the operator of a binary expression), so that no
two distinct constructs in a unit share a location.  Statement wrappers
(ExprStmt) reuse their child's location and are excluded from that
guarantee.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields


@dataclass(frozen=True)
class SourceLoc:
    unit: str
    line: int  # 1-based
    col: int   # 0-based
    eval_depth: int = 0

    def key(self):
        return (self.unit, self.line, self.col, self.eval_depth)

    def __str__(self):
        d = f"@e{self.eval_depth}" if self.eval_depth else ""
        return f"{self.unit}:{self.line}:{self.col}{d}"


class Node:
    """Base class for AST nodes (statements and expressions)."""

    loc: SourceLoc

    def children(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, Node):
                yield v
            elif isinstance(v, list):
                for item in v:
                    if isinstance(item, Node):
                        yield item


# --- expressions -----------------------------------------------------------

@dataclass
class NumberLit(Node):
    loc: SourceLoc
    value: float


@dataclass
class StringLit(Node):
    loc: SourceLoc
    value: str


@dataclass
class BoolLit(Node):
    loc: SourceLoc
    value: bool


@dataclass
class NullLit(Node):
    loc: SourceLoc


@dataclass
class Ident(Node):
    loc: SourceLoc
    name: str
    binding: object = None  # filled by bindings.resolve_bindings


@dataclass
class FunctionExpr(Node):
    loc: SourceLoc
    func_id: str
    name: str | None
    params: list[str]
    body: list[Node]
    is_decl: bool = False


@dataclass
class ObjectProp(Node):
    loc: SourceLoc
    kind: str  # "data" | "get" | "set"
    name: str
    value: Node  # FunctionExpr for accessors


@dataclass
class ObjectLit(Node):
    loc: SourceLoc
    props: list[ObjectProp]


@dataclass
class ArrayLit(Node):
    loc: SourceLoc
    elements: list[Node]


@dataclass
class PropAccess(Node):
    loc: SourceLoc
    base: Node
    computed: bool
    name: str | None = None       # literal name (x.p, or x["p"])
    name_expr: Node | None = None  # name expression for computed accesses

    @property
    def is_static(self) -> bool:
        # Static iff the name is a single literal string in the source.
        return not self.computed or isinstance(self.name_expr, StringLit)

    @property
    def static_name(self) -> str | None:
        if not self.computed:
            return self.name
        if isinstance(self.name_expr, StringLit):
            return self.name_expr.value
        return None


@dataclass
class Assign(Node):
    loc: SourceLoc
    target: Node
    value: Node


@dataclass
class Call(Node):
    loc: SourceLoc
    callee: Node
    args: list[Node]


@dataclass
class Binary(Node):
    loc: SourceLoc
    op: str
    left: Node
    right: Node


@dataclass
class Unary(Node):
    loc: SourceLoc
    op: str
    operand: Node


# --- statements ------------------------------------------------------------

@dataclass
class VarDecl(Node):
    loc: SourceLoc
    name: str
    init: Node | None = None
    binding: object = None


@dataclass
class FunctionDecl(Node):
    loc: SourceLoc
    fn: FunctionExpr
    binding: object = None


@dataclass
class ExprStmt(Node):
    loc: SourceLoc
    expr: Node


@dataclass
class ReturnStmt(Node):
    loc: SourceLoc
    expr: Node | None = None


@dataclass
class IfStmt(Node):
    loc: SourceLoc
    cond: Node
    then: list[Node]
    els: list[Node] = field(default_factory=list)


@dataclass
class WhileStmt(Node):
    loc: SourceLoc
    cond: Node
    body: list[Node] = field(default_factory=list)


@dataclass
class ForInStmt(Node):
    loc: SourceLoc
    var_name: str
    obj: Node = None
    body: list[Node] = field(default_factory=list)
    declares: bool = False
    binding: object = None


# --- program ---------------------------------------------------------------

@dataclass
class FunctionDef:
    func_id: str
    name: str | None
    params: list[str]
    body: list[Node]
    loc: SourceLoc
    via_function_ctor: bool = False


@dataclass
class Program:
    unit: str
    body: list[Node]
    functions: dict[str, FunctionDef]

    def function_by_name(self, name: str) -> FunctionDef:
        for f in self.functions.values():
            if f.name == name:
                return f
        raise KeyError(name)


def walk(node_or_list):
    """Yield every node in an AST fragment, pre-order."""
    stack = list(reversed(node_or_list)) if isinstance(node_or_list, list) \
        else [node_or_list]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(reversed(list(n.children())))


_SKIP_FIELDS = {"loc", "binding", "func_id"}


def structure(node):
    """Structural fingerprint of a node, ignoring locations, bindings and
    function ids.  Used for the parse-print-parse fixpoint check."""
    if isinstance(node, list):
        return [structure(n) for n in node]
    if not isinstance(node, Node):
        return node
    out = {"kind": type(node).__name__}
    for f in fields(node):
        if f.name in _SKIP_FIELDS:
            continue
        out[f.name] = structure(getattr(node, f.name))
    return out


def to_dict(node):
    """Full JSON-serializable dump of an AST node, locations included."""
    if isinstance(node, list):
        return [to_dict(n) for n in node]
    if isinstance(node, SourceLoc):
        return {"unit": node.unit, "line": node.line, "col": node.col,
                "evalDepth": node.eval_depth}
    if not isinstance(node, Node):
        return node
    out = {"kind": type(node).__name__}
    for f in fields(node):
        if f.name == "binding":
            continue
        out[f.name] = to_dict(getattr(node, f.name))
    return out
