"""Lexical binding resolution for MiniJS programs.

Annotates every variable reference with a Binding (declaration-site VarId
plus a scope class: local / param / outer / global) and classifies every
property access as static or dynamic.  Also collects side tables used by
later stages: enclosing function of each call site, for-in loop variables,
and intra-procedural assignments (for property-name classification).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import UnboundVariable
from .natives import NativeConfig
from .syntax import (
    ArrayLit, Assign, Binary, Call, ExprStmt, ForInStmt, FunctionDecl,
    FunctionExpr, Ident, IfStmt, ObjectLit, Program, PropAccess,
    ReturnStmt, SourceLoc, Unary, VarDecl, WhileStmt,
)

TOPLEVEL = "<toplevel>"
NATIVE_OWNER = "<native>"
RET_NAME = "<ret>"


@dataclass(frozen=True)
class VarId:
    owner: str  # FunctionId, "<toplevel>", or "<native>"
    name: str
    param_index: int | None = None

    @property
    def is_param(self) -> bool:
        return self.param_index is not None

    @property
    def is_native(self) -> bool:
        return self.owner == NATIVE_OWNER

    @property
    def is_ret(self) -> bool:
        return self.name == RET_NAME


def ret_var(func_id: str) -> VarId:
    """Pseudo-variable carrying a function's return value."""
    return VarId(func_id, RET_NAME)


@dataclass(frozen=True)
class Binding:
    var_id: VarId
    scope_class: str  # "local" | "param" | "outer" | "global"


class _Scope:
    def __init__(self, owner: str, kind: str):
        self.owner = owner
        self.kind = kind  # "toplevel" | "function" | "selfname"
        self.names: dict[str, VarId] = {}


@dataclass
class BoundProgram:
    program: Program
    natives: NativeConfig
    # call-site loc -> enclosing function id (or TOPLEVEL)
    call_sites: dict[SourceLoc, str] = field(default_factory=dict)
    # call-site loc -> Call node
    call_nodes: dict[SourceLoc, Call] = field(default_factory=dict)
    # property-access loc -> (PropAccess node, enclosing owner)
    accesses: dict[SourceLoc, tuple] = field(default_factory=dict)
    # owner -> set of for-in loop VarIds
    for_in_vars: dict[str, set] = field(default_factory=dict)
    # VarId -> list of expressions assigned to it (decl inits + assignments)
    assignments: dict[VarId, list] = field(default_factory=dict)
    # function id -> enclosing owner
    parents: dict[str, str] = field(default_factory=dict)

    @property
    def unit(self) -> str:
        return self.program.unit

    def enclosing_function(self, loc: SourceLoc) -> str:
        return self.call_sites.get(loc, TOPLEVEL)


class _Resolver:
    def __init__(self, program: Program, natives: NativeConfig, lenient: bool):
        self.program = program
        self.natives = natives
        self.lenient = lenient
        self.bound = BoundProgram(program, natives)
        self.scopes: list[_Scope] = []

    # -- scope handling -----------------------------------------------------

    def push_scope(self, owner: str, kind: str, params=(), body=None):
        scope = _Scope(owner, kind)
        for i, p in enumerate(params):
            scope.names[p] = VarId(owner, p, i)
        if body is not None:
            for name in _declared_names(body):
                scope.names.setdefault(name, VarId(owner, name))
        self.scopes.append(scope)
        return scope

    def current_owner(self) -> str:
        for scope in reversed(self.scopes):
            if scope.kind in ("function", "toplevel"):
                return scope.owner
        return TOPLEVEL

    def lookup(self, name: str, loc) -> Binding:
        owner = self.current_owner()
        seen_function_boundary = False
        for scope in reversed(self.scopes):
            if name in scope.names:
                var_id = scope.names[name]
                if scope.kind == "toplevel":
                    # Script-level declarations behave as globals.
                    cls = "global"
                elif not seen_function_boundary and scope.owner == owner:
                    cls = "param" if var_id.is_param else "local"
                else:
                    cls = "outer"
                return Binding(var_id, cls)
            if scope.kind == "function":
                seen_function_boundary = True
        if name in self.natives and self.natives.get(name).global_binding:
            return Binding(VarId(NATIVE_OWNER, name), "global")
        if self.lenient:
            return Binding(VarId(TOPLEVEL, name), "global")
        raise UnboundVariable(name, loc)

    # -- traversal ----------------------------------------------------------

    def run(self) -> BoundProgram:
        self.push_scope(TOPLEVEL, "toplevel", body=self.program.body)
        for stmt in self.program.body:
            self.stmt(stmt)
        return self.bound

    def stmt(self, s):
        if isinstance(s, VarDecl):
            binding = self.lookup(s.name, s.loc)
            s.binding = binding
            if s.init is not None:
                self.expr(s.init)
                self.bound.assignments.setdefault(binding.var_id, []).append(s.init)
        elif isinstance(s, FunctionDecl):
            s.binding = self.lookup(s.fn.name, s.loc)
            self.bound.assignments.setdefault(s.binding.var_id, []).append(s.fn)
            self.function(s.fn)
        elif isinstance(s, ExprStmt):
            self.expr(s.expr)
        elif isinstance(s, ReturnStmt):
            if s.expr is not None:
                self.expr(s.expr)
        elif isinstance(s, IfStmt):
            self.expr(s.cond)
            for x in s.then:
                self.stmt(x)
            for x in s.els:
                self.stmt(x)
        elif isinstance(s, WhileStmt):
            self.expr(s.cond)
            for x in s.body:
                self.stmt(x)
        elif isinstance(s, ForInStmt):
            binding = self.lookup(s.var_name, s.loc)
            s.binding = binding
            owner = self.current_owner()
            self.bound.for_in_vars.setdefault(owner, set()).add(binding.var_id)
            self.expr(s.obj)
            for x in s.body:
                self.stmt(x)
        else:
            raise TypeError(f"unknown statement {type(s).__name__}")

    def function(self, fn: FunctionExpr):
        owner = self.current_owner()
        self.bound.parents[fn.func_id] = owner
        if fn.name and not fn.is_decl:
            # Named function expression: its own name is visible in the body.
            scope = self.push_scope(owner, "selfname")
            scope.names[fn.name] = VarId(fn.func_id, fn.name)
        self.push_scope(fn.func_id, "function", fn.params, fn.body)
        for stmt in fn.body:
            self.stmt(stmt)
        self.scopes.pop()
        if fn.name and not fn.is_decl:
            self.scopes.pop()

    def expr(self, e):
        if isinstance(e, Ident):
            e.binding = self.lookup(e.name, e.loc)
        elif isinstance(e, FunctionExpr):
            self.function(e)
        elif isinstance(e, ObjectLit):
            for p in e.props:
                self.expr(p.value)
        elif isinstance(e, ArrayLit):
            for x in e.elements:
                self.expr(x)
        elif isinstance(e, PropAccess):
            self.expr(e.base)
            if e.computed:
                self.expr(e.name_expr)
            self.bound.accesses[e.loc] = (e, self.current_owner())
        elif isinstance(e, Assign):
            self.expr(e.target)
            self.expr(e.value)
            if isinstance(e.target, Ident):
                self.bound.assignments.setdefault(
                    e.target.binding.var_id, []).append(e.value)
        elif isinstance(e, Call):
            self.bound.call_sites[e.loc] = self.current_owner()
            self.bound.call_nodes[e.loc] = e
            self.expr(e.callee)
            for a in e.args:
                self.expr(a)
        elif isinstance(e, Binary):
            self.expr(e.left)
            self.expr(e.right)
        elif isinstance(e, Unary):
            self.expr(e.operand)
        # literals: nothing to do


def _declared_names(body) -> list[str]:
    """var / function-declaration / for-in names declared in a body, not
    descending into nested functions (MiniJS var scoping is per-function)."""
    names = []

    def visit(stmts):
        for s in stmts:
            if isinstance(s, VarDecl):
                names.append(s.name)
            elif isinstance(s, FunctionDecl):
                names.append(s.fn.name)
            elif isinstance(s, IfStmt):
                visit(s.then)
                visit(s.els)
            elif isinstance(s, WhileStmt):
                visit(s.body)
            elif isinstance(s, ForInStmt):
                names.append(s.var_name)
                visit(s.body)

    visit(body)
    return names


def resolve_bindings(program: Program, natives: NativeConfig | None = None,
                     lenient: bool = False) -> BoundProgram:
    """Annotate every variable reference and classify property accesses.

    lenient=True resolves unknown names as globals instead of raising
    UnboundVariable; used for dynamically evaluated code, which executes in
    its caller's environment.
    """
    if natives is None:
        natives = NativeConfig.default()
    return _Resolver(program, natives, lenient).run()
