"""Language frontend facade: lexing, parsing, printing, and binding.

The implementation lives in the lexer/parser/printer/bindings/syntax
modules; this module gathers the public entry points so callers can treat
the frontend as one unit.
"""

from .bindings import (  # noqa: F401
    NATIVE_OWNER, RET_NAME, TOPLEVEL, Binding, BoundProgram, VarId,
    resolve_bindings, ret_var,
)
from .errors import ParseError, UnboundVariable  # noqa: F401
from .lexer import Token, tokenize  # noqa: F401
from .parser import parse_program  # noqa: F401
from .printer import print_program  # noqa: F401
from .syntax import FunctionDef, Program, SourceLoc, walk  # noqa: F401


def parse_and_bind(source: str, unit: str, natives=None,
                   lenient: bool = False) -> BoundProgram:
    """Parse a MiniJS source and resolve all variable references."""
    return resolve_bindings(parse_program(source, unit), natives, lenient)
