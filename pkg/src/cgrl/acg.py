"""Field-based static flow graphs and approximate call graphs.

The flow graph tracks where function values may flow.  Its nodes are:

  Func(f)      the function literal f
  Var(v)       a variable binding
  Prop(p)      all properties named p, regardless of receiver (field-based)
  Param(f,i)   the i-th formal parameter of f
  Ret(f)       the return value of f
  Arg(s,i)     the i-th actual argument at call site s
  Callee(s)    the callee position of call site s
  Res(s)       the result of call site s
  ReflBase(s)  the receiver of a call/apply/bind invocation at site s

A call graph edge (s, f) exists iff Func(f) reaches Callee(s) in the flow
graph; every call-resolution rule is therefore expressed as flow-graph
edges, never as direct call-graph insertions.

Two variants are supported.  The optimistic variant runs a fixpoint that
wires arguments to parameters and returns to results whenever a function
reaches a callee position, and models call/apply/bind.  The pessimistic
variant wires parameters and returns only for one-shot closures (function
literals invoked directly) and adds no reflective handling.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .bindings import NATIVE_OWNER, BoundProgram, VarId
from .natives import REFLECTIVE_METHODS
from .syntax import (
    ArrayLit, Assign, Binary, Call, ExprStmt, ForInStmt, FunctionDecl,
    FunctionExpr, Ident, IfStmt, ObjectLit, PropAccess, ReturnStmt, SourceLoc,
    Unary, VarDecl, WhileStmt,
)

VARIANTS = ("optimistic", "pessimistic")


@dataclass(frozen=True)
class FGNode:
    kind: str
    func_id: str | None = None
    var: VarId | None = None
    name: str | None = None
    index: int | None = None
    loc: SourceLoc | None = None

    def __repr__(self):
        if self.kind == "Func":
            return f"Func({self.func_id})"
        if self.kind == "Var":
            return f"Var({self.var.owner}.{self.var.name})"
        if self.kind == "Prop":
            return f"Prop({self.name})"
        if self.kind == "Param":
            return f"Param({self.func_id},{self.index})"
        if self.kind == "Ret":
            return f"Ret({self.func_id})"
        at = f"{self.loc.unit}:{self.loc.line}:{self.loc.col}"
        if self.kind == "Arg":
            return f"Arg({at},{self.index})"
        return f"{self.kind}({at})"


def func_node(func_id: str) -> FGNode:
    return FGNode("Func", func_id=func_id)


def var_node(var: VarId) -> FGNode:
    return FGNode("Var", var=var)


def prop_node(name: str) -> FGNode:
    return FGNode("Prop", name=name)


def param_node(func_id: str, index: int) -> FGNode:
    return FGNode("Param", func_id=func_id, index=index)


def ret_node(func_id: str) -> FGNode:
    return FGNode("Ret", func_id=func_id)


def callee_node(loc: SourceLoc) -> FGNode:
    return FGNode("Callee", loc=loc)


def res_node(loc: SourceLoc) -> FGNode:
    return FGNode("Res", loc=loc)


def arg_node(loc: SourceLoc, index: int) -> FGNode:
    return FGNode("Arg", loc=loc, index=index)


def refl_base_node(loc: SourceLoc) -> FGNode:
    return FGNode("ReflBase", loc=loc)


@dataclass
class SiteInfo:
    loc: SourceLoc
    num_args: int
    reflective: str | None = None  # "call" | "apply" | "bind"


@dataclass
class FlowGraph:
    nodes: set = field(default_factory=set)
    succ: dict = field(default_factory=dict)  # FGNode -> set[FGNode]
    sites: dict = field(default_factory=dict)  # SourceLoc -> SiteInfo

    def add_node(self, node: FGNode) -> FGNode:
        self.nodes.add(node)
        return node

    def add_edge(self, src: FGNode, dst: FGNode) -> bool:
        self.nodes.add(src)
        self.nodes.add(dst)
        out = self.succ.setdefault(src, set())
        if dst in out:
            return False
        out.add(dst)
        return True

    def edges(self):
        for src, dsts in self.succ.items():
            for dst in dsts:
                yield src, dst

    def reachable(self, sources) -> set:
        """All nodes reachable from `sources` (which are included)."""
        seen = set()
        queue = deque()
        for s in sources:
            if s not in seen:
                seen.add(s)
                queue.append(s)
        while queue:
            node = queue.popleft()
            for nxt in self.succ.get(node, ()):
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        return seen


@dataclass
class CallGraph:
    variant: str
    # (call-site loc, FunctionId or native name)
    edges: set = field(default_factory=set)

    def targets(self, loc: SourceLoc) -> set:
        return {f for (s, f) in self.edges if s == loc}

    def callees(self) -> set:
        return {f for (_, f) in self.edges}


class _Builder:
    def __init__(self, bound: BoundProgram, variant: str):
        self.bound = bound
        self.variant = variant
        self.fg = FlowGraph()

    def build(self) -> FlowGraph:
        fg = self.fg
        program = self.bound.program
        for func in program.functions.values():
            fg.add_node(func_node(func.func_id))
            fg.add_node(ret_node(func.func_id))
            for i, p in enumerate(func.params):
                fg.add_edge(param_node(func.func_id, i),
                            var_node(VarId(func.func_id, p, i)))
        for name in self.bound.natives.specs:
            spec = self.bound.natives.get(name)
            if not spec.modeled:
                continue
            fg.add_node(func_node(name))
            if spec.global_binding:
                fg.add_edge(func_node(name), var_node(VarId(NATIVE_OWNER,
                                                            name)))
        self.stmts(program.body, None)
        return fg

    # -- statements ---------------------------------------------------------

    def stmts(self, body, owner):
        for s in body:
            self.stmt(s, owner)

    def stmt(self, s, owner):
        if isinstance(s, VarDecl):
            if s.init is not None:
                self.flow(self.expr(s.init), var_node(s.binding.var_id))
        elif isinstance(s, FunctionDecl):
            self.function(s.fn)
            self.fg.add_edge(func_node(s.fn.func_id),
                             var_node(s.binding.var_id))
        elif isinstance(s, ExprStmt):
            self.expr(s.expr)
        elif isinstance(s, ReturnStmt):
            sources = self.expr(s.expr) if s.expr is not None else ()
            if owner is not None:
                self.flow(sources, ret_node(owner))
        elif isinstance(s, IfStmt):
            self.expr(s.cond)
            self.stmts(s.then, owner)
            self.stmts(s.els, owner)
        elif isinstance(s, WhileStmt):
            self.expr(s.cond)
            self.stmts(s.body, owner)
        elif isinstance(s, ForInStmt):
            self.expr(s.obj)
            self.stmts(s.body, owner)
        else:
            raise TypeError(f"unknown statement {type(s).__name__}")

    # -- expressions --------------------------------------------------------

    def expr(self, e) -> tuple:
        """Wire the flow edges of `e` and return the nodes holding its value.

        Expressions the analysis does not track (literals, arithmetic,
        dynamic property accesses) return no nodes.
        """
        if isinstance(e, Ident):
            return (self.fg.add_node(var_node(e.binding.var_id)),)
        if isinstance(e, FunctionExpr):
            self.function(e)
            return (func_node(e.func_id),)
        if isinstance(e, ObjectLit):
            for p in e.props:
                if p.kind == "data":
                    self.flow(self.expr(p.value), prop_node(p.name))
                else:
                    # Accessor bodies are analyzed; their invocation is not.
                    self.expr(p.value)
            return ()
        if isinstance(e, ArrayLit):
            for i, el in enumerate(e.elements):
                self.flow(self.expr(el), prop_node(str(i)))
            return ()
        if isinstance(e, PropAccess):
            self.expr(e.base)
            if e.computed and e.name_expr is not None:
                self.expr(e.name_expr)
            if e.is_static:
                return (self.fg.add_node(prop_node(e.static_name)),)
            return ()
        if isinstance(e, Assign):
            sources = self.expr(e.value)
            target = e.target
            if isinstance(target, Ident):
                self.flow(sources, var_node(target.binding.var_id))
            elif isinstance(target, PropAccess):
                self.expr(target.base)
                if target.computed and target.name_expr is not None:
                    self.expr(target.name_expr)
                if target.is_static:
                    self.flow(sources, prop_node(target.static_name))
            return sources
        if isinstance(e, Call):
            return self.call(e)
        if isinstance(e, Binary):
            self.expr(e.left)
            self.expr(e.right)
            return ()
        if isinstance(e, Unary):
            self.expr(e.operand)
            return ()
        return ()  # literals

    def function(self, fn: FunctionExpr):
        func = self.bound.program.functions[fn.func_id]
        if fn.name and not fn.is_decl:
            # A named function expression can refer to itself by name.
            self.fg.add_edge(func_node(fn.func_id),
                             var_node(VarId(fn.func_id, fn.name)))
        self.stmts(func.body, fn.func_id)

    def call(self, e: Call) -> tuple:
        fg = self.fg
        site = e.loc
        callee = callee_node(site)
        fg.add_node(callee)
        refl = None
        c = e.callee
        if isinstance(c, PropAccess) and c.is_static \
                and c.static_name in REFLECTIVE_METHODS \
                and c.static_name in self.bound.natives:
            refl = c.static_name
            self.flow(self.expr(c.base), refl_base_node(site))
            if c.computed and c.name_expr is not None:
                self.expr(c.name_expr)
            # The reflective native itself is what the site invokes.
            fg.add_edge(func_node(refl), callee)
        else:
            self.flow(self.expr(c), callee)
        for i, a in enumerate(e.args):
            self.flow(self.expr(a), arg_node(site, i))
        fg.add_node(res_node(site))
        fg.sites[site] = SiteInfo(site, len(e.args), refl)
        if self.variant == "pessimistic" and isinstance(c, FunctionExpr):
            # One-shot closure: the only interprocedural flow pessimism keeps.
            func = self.bound.program.functions[c.func_id]
            for i in range(min(len(e.args), len(func.params))):
                fg.add_edge(arg_node(site, i), param_node(c.func_id, i))
            fg.add_edge(ret_node(c.func_id), res_node(site))
        return (res_node(site),)

    def flow(self, sources, dst: FGNode):
        self.fg.add_node(dst)
        for src in sources:
            self.fg.add_edge(src, dst)


def build_flow_graph(bound: BoundProgram,
                     variant: str = "optimistic") -> FlowGraph:
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    return _Builder(bound, variant).build()


def _function_universe(bound: BoundProgram):
    funcs = dict(bound.program.functions)
    natives = {name for name in bound.natives.specs
               if bound.natives.is_modeled(name)}
    return funcs, natives


def solve_call_graph(fg: FlowGraph, bound: BoundProgram,
                     variant: str = "optimistic") -> CallGraph:
    """Close the flow graph over interprocedural rules, then read off the
    call graph as reachability from Func nodes into Callee nodes."""
    funcs, natives = _function_universe(bound)
    func_nodes = [func_node(f) for f in funcs] + \
        [func_node(n) for n in natives if func_node(n) in fg.nodes]
    if variant == "optimistic":
        _optimistic_fixpoint(fg, bound, funcs, func_nodes)
    cg = CallGraph(variant)
    for fn in func_nodes:
        for node in fg.reachable([fn]):
            if node.kind == "Callee":
                cg.edges.add((node.loc, fn.func_id))
    return cg


def _optimistic_fixpoint(fg: FlowGraph, bound: BoundProgram, funcs,
                         func_nodes):
    changed = True
    while changed:
        changed = False
        reach = {fn: fg.reachable([fn]) for fn in func_nodes}
        for site, info in fg.sites.items():
            callee = callee_node(site)
            base = refl_base_node(site)
            for fn in func_nodes:
                fid = fn.func_id
                if callee in reach[fn]:
                    changed |= _wire_direct(fg, bound, funcs, fid, site, info)
                if info.reflective and base in reach[fn]:
                    changed |= _wire_reflective(fg, funcs, fid, site, info)


def _wire_direct(fg, bound, funcs, fid, site, info) -> bool:
    changed = False
    if fid in funcs:
        func = funcs[fid]
        for i in range(min(info.num_args, len(func.params))):
            changed |= fg.add_edge(arg_node(site, i), param_node(fid, i))
        changed |= fg.add_edge(ret_node(fid), res_node(site))
        return changed
    spec = bound.natives.get(fid)
    if spec is not None and spec.behavior == "returns-function" \
            and info.num_args > 0:
        changed |= fg.add_edge(arg_node(site, 0), res_node(site))
    return changed


def _wire_reflective(fg, funcs, fid, site, info) -> bool:
    """A function value reached the receiver of f.call/f.apply/f.bind."""
    if info.reflective == "bind":
        return False
    changed = fg.add_edge(func_node(fid), callee_node(site))
    if fid not in funcs:
        return changed
    func = funcs[fid]
    if info.reflective == "call":
        for i in range(min(info.num_args - 1, len(func.params))):
            changed |= fg.add_edge(arg_node(site, i + 1), param_node(fid, i))
    changed |= fg.add_edge(ret_node(fid), res_node(site))
    return changed


def build_call_graph(bound: BoundProgram, variant: str = "optimistic"):
    """Convenience wrapper returning (flow graph, call graph)."""
    fg = build_flow_graph(bound, variant)
    cg = solve_call_graph(fg, bound, variant)
    return fg, cg
