"""Recursive-descent parser for MiniJS.

Semicolons are required after expression statements, var declarations and
returns; the grammar is deterministic and every construct gets a unique
source location (see syntax.py).  Function ids are assigned in parse order
as "<unit>::<name>#<ordinal>", which is stable across parses of identical
input and survives pretty-printing.
"""

from __future__ import annotations

from .errors import ParseError
from .lexer import Token, tokenize
from .syntax import (
    ArrayLit, Assign, Binary, BoolLit, Call, ExprStmt, ForInStmt,
    FunctionDecl, FunctionDef, FunctionExpr, Ident, IfStmt, NullLit,
    NumberLit, ObjectLit, ObjectProp, Program, PropAccess, ReturnStmt,
    SourceLoc, StringLit, Unary, VarDecl, WhileStmt,
)


class _Parser:
    def __init__(self, tokens: list[Token], unit: str, eval_depth: int):
        self.tokens = tokens
        self.pos = 0
        self.unit = unit
        self.eval_depth = eval_depth
        self.functions: dict[str, "FunctionDef"] = {}
        self.fn_counter = 0

    # -- token helpers ------------------------------------------------------

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def at(self, kind: str, value: str | None = None) -> bool:
        t = self.peek()
        return t.kind == kind and (value is None or t.value == value)

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def loc_of(self, tok: Token) -> SourceLoc:
        return tok.loc(self.unit, self.eval_depth)

    def expect(self, kind: str, value: str | None = None) -> Token:
        t = self.peek()
        if t.kind != kind or (value is not None and t.value != value):
            want = value if value is not None else kind
            got = t.value if t.value else t.kind
            raise ParseError(f"unexpected {got!r}", self.loc_of(t), expected=want)
        return self.advance()

    # -- program ------------------------------------------------------------

    def parse_program(self) -> Program:
        body = []
        while not self.at("eof"):
            body.append(self.statement())
        return Program(self.unit, body, self.functions)

    # -- statements ---------------------------------------------------------

    def statement(self):
        t = self.peek()
        if t.kind == "keyword":
            if t.value == "var":
                return self.var_decl()
            if t.value == "function":
                fn = self.function_expr(require_name=True, is_decl=True)
                return FunctionDecl(fn.loc, fn)
            if t.value == "return":
                tok = self.advance()
                expr = None
                if not self.at("punct", ";"):
                    expr = self.expression()
                self.expect("punct", ";")
                return ReturnStmt(self.loc_of(tok), expr)
            if t.value == "if":
                return self.if_stmt()
            if t.value == "while":
                tok = self.advance()
                self.expect("punct", "(")
                cond = self.expression()
                self.expect("punct", ")")
                return WhileStmt(self.loc_of(tok), cond, self.block())
            if t.value == "for":
                return self.for_in_stmt()
        expr = self.expression()
        self.expect("punct", ";")
        return ExprStmt(expr.loc, expr)

    def var_decl(self):
        tok = self.expect("keyword", "var")
        name = self.expect("ident").value
        init = None
        if self.at("punct", "="):
            self.advance()
            init = self.expression()
        self.expect("punct", ";")
        return VarDecl(self.loc_of(tok), name, init)

    def if_stmt(self):
        tok = self.expect("keyword", "if")
        self.expect("punct", "(")
        cond = self.expression()
        self.expect("punct", ")")
        then = self.block()
        els = []
        if self.at("keyword", "else"):
            self.advance()
            if self.at("keyword", "if"):
                els = [self.if_stmt()]
            else:
                els = self.block()
        return IfStmt(self.loc_of(tok), cond, then, els)

    def for_in_stmt(self):
        tok = self.expect("keyword", "for")
        self.expect("punct", "(")
        declares = False
        if self.at("keyword", "var"):
            self.advance()
            declares = True
        name = self.expect("ident").value
        self.expect("keyword", "in")
        obj = self.expression()
        self.expect("punct", ")")
        body = self.block()
        return ForInStmt(self.loc_of(tok), name, obj, body, declares)

    def block(self) -> list:
        self.expect("punct", "{")
        stmts = []
        while not self.at("punct", "}"):
            if self.at("eof"):
                raise ParseError("unexpected end of input",
                                 self.loc_of(self.peek()), expected="}")
            stmts.append(self.statement())
        self.expect("punct", "}")
        return stmts

    # -- expressions --------------------------------------------------------

    def expression(self):
        return self.assignment()

    def assignment(self):
        left = self.equality()
        if self.at("punct", "="):
            tok = self.advance()
            if not isinstance(left, (Ident, PropAccess)):
                raise ParseError("invalid assignment target", left.loc)
            value = self.assignment()
            return Assign(self.loc_of(tok), left, value)
        return left

    def equality(self):
        left = self.relational()
        while self.at("punct", "==") or self.at("punct", "!="):
            tok = self.advance()
            left = Binary(self.loc_of(tok), tok.value, left, self.relational())
        return left

    def relational(self):
        left = self.additive()
        while self.peek().kind == "punct" and self.peek().value in ("<", ">", "<=", ">="):
            tok = self.advance()
            left = Binary(self.loc_of(tok), tok.value, left, self.additive())
        return left

    def additive(self):
        left = self.multiplicative()
        while self.peek().kind == "punct" and self.peek().value in ("+", "-"):
            tok = self.advance()
            left = Binary(self.loc_of(tok), tok.value, left, self.multiplicative())
        return left

    def multiplicative(self):
        left = self.unary()
        while self.peek().kind == "punct" and self.peek().value in ("*", "/"):
            tok = self.advance()
            left = Binary(self.loc_of(tok), tok.value, left, self.unary())
        return left

    def unary(self):
        if self.at("punct", "!") or self.at("punct", "-"):
            tok = self.advance()
            return Unary(self.loc_of(tok), tok.value, self.unary())
        return self.postfix()

    def postfix(self):
        expr = self.primary()
        while True:
            if self.at("punct", "("):
                tok = self.advance()
                args = []
                if not self.at("punct", ")"):
                    args.append(self.expression())
                    while self.at("punct", ","):
                        self.advance()
                        args.append(self.expression())
                self.expect("punct", ")")
                expr = Call(self.loc_of(tok), expr, args)
            elif self.at("punct", "."):
                tok = self.advance()
                name = self.expect("ident").value
                expr = PropAccess(self.loc_of(tok), expr, computed=False, name=name)
            elif self.at("punct", "["):
                tok = self.advance()
                name_expr = self.expression()
                self.expect("punct", "]")
                expr = PropAccess(self.loc_of(tok), expr, computed=True,
                                  name_expr=name_expr)
            else:
                return expr

    def primary(self):
        t = self.peek()
        if t.kind == "number":
            self.advance()
            return NumberLit(self.loc_of(t), float(t.value))
        if t.kind == "string":
            self.advance()
            return StringLit(self.loc_of(t), t.value)
        if t.kind == "keyword":
            if t.value in ("true", "false"):
                self.advance()
                return BoolLit(self.loc_of(t), t.value == "true")
            if t.value == "null":
                self.advance()
                return NullLit(self.loc_of(t))
            if t.value == "function":
                return self.function_expr(require_name=False)
        if t.kind == "ident":
            self.advance()
            return Ident(self.loc_of(t), t.value)
        if self.at("punct", "("):
            self.advance()
            expr = self.expression()
            self.expect("punct", ")")
            return expr
        if self.at("punct", "{"):
            return self.object_literal()
        if self.at("punct", "["):
            tok = self.advance()
            elements = []
            if not self.at("punct", "]"):
                elements.append(self.expression())
                while self.at("punct", ","):
                    self.advance()
                    elements.append(self.expression())
            self.expect("punct", "]")
            return ArrayLit(self.loc_of(tok), elements)
        got = t.value if t.value else t.kind
        raise ParseError(f"unexpected {got!r}", self.loc_of(t),
                         expected="expression")

    def function_expr(self, require_name: bool, is_decl: bool = False) -> FunctionExpr:
        tok = self.expect("keyword", "function")
        name = None
        if self.at("ident"):
            name = self.advance().value
        elif require_name:
            raise ParseError("function declaration requires a name",
                             self.loc_of(self.peek()), expected="name")
        self.expect("punct", "(")
        params = []
        if not self.at("punct", ")"):
            params.append(self.expect("ident").value)
            while self.at("punct", ","):
                self.advance()
                params.append(self.expect("ident").value)
        self.expect("punct", ")")
        body = self.block()
        loc = self.loc_of(tok)
        func_id = f"{self.unit}::{name or 'fn'}#{self.fn_counter}"
        self.fn_counter += 1
        fn = FunctionExpr(loc, func_id, name, params, body, is_decl)
        self.functions[func_id] = FunctionDef(func_id, name, params, body, loc)
        return fn

    def object_literal(self) -> ObjectLit:
        tok = self.expect("punct", "{")
        props = []
        while not self.at("punct", "}"):
            props.append(self.object_prop())
            if self.at("punct", ","):
                self.advance()
            elif not self.at("punct", "}"):
                raise ParseError("expected ',' or '}' in object literal",
                                 self.loc_of(self.peek()), expected=",")
        self.expect("punct", "}")
        return ObjectLit(self.loc_of(tok), props)

    def object_prop(self) -> ObjectProp:
        t = self.peek()
        # get/set are contextual: an accessor is "get name() {...}" where the
        # next token is a property name rather than ':'.
        if t.kind == "ident" and t.value in ("get", "set") \
                and self.tokens[self.pos + 1].kind in ("ident", "string"):
            kind_tok = self.advance()
            name_tok = self.advance()
            loc = self.loc_of(name_tok)
            accessor_kind = kind_tok.value
            self.expect("punct", "(")
            params = []
            if not self.at("punct", ")"):
                params.append(self.expect("ident").value)
            self.expect("punct", ")")
            body = self.block()
            func_id = (f"{self.unit}::{accessor_kind}_{name_tok.value}"
                       f"#{self.fn_counter}")
            self.fn_counter += 1
            fn_loc = self.loc_of(kind_tok)
            fn = FunctionExpr(fn_loc, func_id, None, params, body)
            self.functions[func_id] = FunctionDef(func_id, None, params, body, fn_loc)
            return ObjectProp(loc, accessor_kind, name_tok.value, fn)
        if t.kind in ("ident", "string", "keyword"):
            name_tok = self.advance()
        elif t.kind == "number":
            name_tok = self.advance()
        else:
            raise ParseError("expected property name", self.loc_of(t),
                             expected="name")
        self.expect("punct", ":")
        value = self.expression()
        return ObjectProp(self.loc_of(name_tok), "data", name_tok.value, value)


def parse_program(source: str, unit_name: str, eval_depth: int = 0) -> Program:
    """Parse MiniJS source into a Program.

    Raises ParseError with a location and expected-token message; no partial
    AST is produced on error.
    """
    tokens = tokenize(source, unit_name, eval_depth)
    return _Parser(tokens, unit_name, eval_depth).parse_program()
