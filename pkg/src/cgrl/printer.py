"""Pretty-printer for MiniJS ASTs.

Output reparses to a structurally identical Program (modulo locations);
function ordinals are preserved because printing keeps parse order.
"""

from __future__ import annotations

import json

from .syntax import (
    ArrayLit, Assign, Binary, BoolLit, Call, ExprStmt, ForInStmt,
    FunctionDecl, FunctionExpr, Ident, IfStmt, NullLit, NumberLit,
    ObjectLit, Program, PropAccess, ReturnStmt, StringLit, Unary,
    VarDecl, WhileStmt,
)


def _num(value: float) -> str:
    if value == int(value):
        return str(int(value))
    return repr(value)


def print_expr(e) -> str:
    if isinstance(e, NumberLit):
        return _num(e.value)
    if isinstance(e, StringLit):
        return json.dumps(e.value)
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, NullLit):
        return "null"
    if isinstance(e, Ident):
        return e.name
    if isinstance(e, FunctionExpr):
        body = " ".join(print_stmt(s) for s in e.body)
        name = f" {e.name}" if e.name else ""
        return f"function{name}({', '.join(e.params)}) {{ {body} }}"
    if isinstance(e, ObjectLit):
        parts = []
        for p in e.props:
            if p.kind == "data":
                parts.append(f"{p.name}: {print_expr(p.value)}")
            else:
                fn = p.value
                body = " ".join(print_stmt(s) for s in fn.body)
                parts.append(f"{p.kind} {p.name}({', '.join(fn.params)})"
                             f" {{ {body} }}")
        return "{ " + ", ".join(parts) + " }" if parts else "{}"
    if isinstance(e, ArrayLit):
        return "[" + ", ".join(print_expr(x) for x in e.elements) + "]"
    if isinstance(e, PropAccess):
        base = print_expr(e.base)
        if not e.computed:
            return f"{base}.{e.name}"
        return f"{base}[{print_expr(e.name_expr)}]"
    if isinstance(e, Assign):
        return f"{print_expr(e.target)} = {print_expr(e.value)}"
    if isinstance(e, Call):
        return f"{print_expr(e.callee)}({', '.join(print_expr(a) for a in e.args)})"
    if isinstance(e, Binary):
        return f"({print_expr(e.left)} {e.op} {print_expr(e.right)})"
    if isinstance(e, Unary):
        return f"({e.op}{print_expr(e.operand)})"
    raise TypeError(f"unknown expression {type(e).__name__}")


def print_stmt(s) -> str:
    if isinstance(s, VarDecl):
        if s.init is not None:
            return f"var {s.name} = {print_expr(s.init)};"
        return f"var {s.name};"
    if isinstance(s, FunctionDecl):
        fn = s.fn
        body = " ".join(print_stmt(x) for x in fn.body)
        return f"function {fn.name}({', '.join(fn.params)}) {{ {body} }}"
    if isinstance(s, ExprStmt):
        return f"{print_expr(s.expr)};"
    if isinstance(s, ReturnStmt):
        if s.expr is not None:
            return f"return {print_expr(s.expr)};"
        return "return;"
    if isinstance(s, IfStmt):
        then = " ".join(print_stmt(x) for x in s.then)
        out = f"if ({print_expr(s.cond)}) {{ {then} }}"
        if s.els:
            els = " ".join(print_stmt(x) for x in s.els)
            out += f" else {{ {els} }}"
        return out
    if isinstance(s, WhileStmt):
        body = " ".join(print_stmt(x) for x in s.body)
        return f"while ({print_expr(s.cond)}) {{ {body} }}"
    if isinstance(s, ForInStmt):
        body = " ".join(print_stmt(x) for x in s.body)
        var = f"var {s.var_name}" if s.declares else s.var_name
        return f"for ({var} in {print_expr(s.obj)}) {{ {body} }}"
    raise TypeError(f"unknown statement {type(s).__name__}")


def print_program(program: Program) -> str:
    return "\n".join(print_stmt(s) for s in program.body) + "\n"
