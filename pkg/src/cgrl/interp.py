"""Tree-walking interpreter for MiniJS that records a dynamic call graph
and a dynamic flow trace of function values.

The interpreter exposes the call-related behavior of the constructs the
static analysis struggles with: getter/setter invocations (recorded at the
property-access location), reflective call/apply/bind, callbacks from
native functions (via a shadow stack of native markers), and dynamically
evaluated code (every event from such code carries an eval-marked source
location).

Trace conventions:
  * Only operations on function values produce entries.
  * A normal call records its function-valued arguments inside the Invoke
    entry; the callee's formal reads appear as VarRead entries with a
    param binding.  Reflective call/apply additionally emit explicit
    formal VarWrite entries (apply's flagged synthetic).
  * A return of a function value writes the callee's return pseudo-variable
    (a Return entry); the caller then reads it at the call site (a VarRead
    of the "<ret>" pseudo-binding).
  * Callbacks out of natives carry nativeCallbackBoundary and record no
    argument information; with two or more nested native levels only the
    outermost boundary is recorded and the entry is multiLevelNative.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import trace as T
from .bindings import (
    BoundProgram, RET_NAME, TOPLEVEL, VarId, resolve_bindings, ret_var,
)
from .errors import (
    MiniJSRuntimeError, NotCallable, ParseError, StepBudgetExceeded,
)
from .natives import REFLECTIVE_METHODS, NativeConfig
from .parser import parse_program
from .syntax import (
    ArrayLit, Assign, Binary, BoolLit, Call, ExprStmt, ForInStmt,
    FunctionDecl, FunctionDef, FunctionExpr, Ident, IfStmt, NullLit,
    NumberLit, ObjectLit, PropAccess, ReturnStmt, SourceLoc, StringLit,
    Unary, VarDecl, WhileStmt,
)

DEFAULT_STEP_BUDGET = 10_000_000


# --- runtime values --------------------------------------------------------

class ObjectValue:
    def __init__(self):
        self.props: dict[str, object] = {}
        self.accessors: dict[str, list] = {}  # name -> [getter, setter]

    def own_keys(self):
        keys = list(self.props)
        for name in self.accessors:
            if name not in self.props:
                keys.append(name)
        return keys


class ArrayValue:
    def __init__(self, elements):
        self.elements = list(elements)

    def own_keys(self):
        return [str(i) for i in range(len(self.elements))]


class Closure:
    def __init__(self, func: FunctionDef, env, vid: int):
        self.func = func
        self.env = env
        self.vid = vid


class NativeFunction:
    def __init__(self, name: str, vid: int):
        self.name = name
        self.vid = vid


class NativeMethod:
    """`f.call` / `f.apply` / `f.bind` looked up on a function value."""

    def __init__(self, kind: str, target, vid: int):
        self.kind = kind
        self.target = target
        self.vid = vid


class BoundFunction:
    def __init__(self, target, bound_args, vid: int):
        self.target = target
        self.bound_args = list(bound_args)
        self.vid = vid


FUNC_TYPES = (Closure, NativeFunction, NativeMethod, BoundFunction)


def is_func(value) -> bool:
    return isinstance(value, FUNC_TYPES)


class Env:
    __slots__ = ("vars", "parent")

    def __init__(self, parent=None):
        self.vars: dict[str, object] = {}
        self.parent = parent

    def holder(self, name):
        env = self
        while env is not None:
            if name in env.vars:
                return env
            env = env.parent
        return None

    def root(self):
        env = self
        while env.parent is not None:
            env = env.parent
        return env


@dataclass
class ExecutionResult:
    dcg: T.DynamicCallGraph
    trace: T.FlowTrace
    error: str | None = None
    # FunctionDefs created at runtime (eval'd code, makeFunction)
    runtime_functions: dict = field(default_factory=dict)


# --- interpreter -----------------------------------------------------------

class Interpreter:
    def __init__(self, bound: BoundProgram, natives: NativeConfig | None = None,
                 step_budget: int = DEFAULT_STEP_BUDGET, seed: int = 0):
        self.bound = bound
        self.natives = natives if natives is not None else bound.natives
        self.step_budget = step_budget
        self.steps = 0
        self.rng = random.Random(seed)
        self.trace = T.FlowTrace()
        self.dcg = T.DynamicCallGraph()
        self.runtime_functions: dict[str, FunctionDef] = {}
        self.vid_counter = 0
        self.eval_counter = 0
        # shadow stack of (kind, name): kind in {"toplevel","user","native"}
        self.stack: list[tuple] = []
        self.globals = Env()
        for name in self.natives.global_names():
            self.globals.vars[name] = self._make_native(name)

    # -- bookkeeping --------------------------------------------------------

    def _new_vid(self) -> int:
        self.vid_counter += 1
        return self.vid_counter

    def _make_native(self, name: str) -> NativeFunction:
        nf = NativeFunction(name, self._new_vid())
        self.trace.functions[nf.vid] = name
        return nf

    def step(self, loc):
        self.steps += 1
        if self.steps > self.step_budget:
            raise StepBudgetExceeded(self.step_budget)

    def emit(self, kind, value, loc, *, name=None, binding=None, func_id=None,
             args=None, flags=frozenset()):
        flags = frozenset(flags)
        if loc.eval_depth > 0:
            flags = flags | {T.EVAL_ORIGIN}
        return self.trace.append(kind=kind, func_value=value.vid, loc=loc,
                                 name=name, binding=binding, func_id=func_id,
                                 args=args, flags=flags)

    def current_caller(self) -> str:
        return self.stack[-1][1]

    def native_run(self) -> list[str]:
        """Contiguous native markers on top of the shadow stack, outermost
        first."""
        run = []
        for kind, name in reversed(self.stack):
            if kind != "native":
                break
            run.append(name)
        run.reverse()
        return run

    # -- top level ----------------------------------------------------------

    def run(self) -> ExecutionResult:
        self.stack.append(("toplevel", T.TOPLEVEL))
        error = None
        try:
            self.exec_stmts(self.bound.program.body, self.globals)
        except (MiniJSRuntimeError, StepBudgetExceeded) as ex:
            # Analysis inputs must survive crashes: keep the partial trace.
            error = str(ex)
        return ExecutionResult(self.dcg, self.trace, error,
                               self.runtime_functions)

    # -- statements ---------------------------------------------------------

    def exec_stmts(self, stmts, env):
        for s in stmts:
            signal = self.exec_stmt(s, env)
            if signal is not None:
                return signal
        return None

    def exec_stmt(self, s, env):
        self.step(s.loc)
        if isinstance(s, VarDecl):
            value = self.eval(s.init, env) if s.init is not None else None
            env.vars[s.name] = value
            if is_func(value):
                self.emit(T.VAR_WRITE, value, s.loc, name=s.name,
                          binding=s.binding.var_id if s.binding else None)
            return None
        if isinstance(s, FunctionDecl):
            closure = self.make_closure(s.fn, env)
            env.vars[s.fn.name] = closure
            self.emit(T.VAR_WRITE, closure, s.loc, name=s.fn.name,
                      binding=s.binding.var_id if s.binding else None)
            return None
        if isinstance(s, ExprStmt):
            self.eval(s.expr, env)
            return None
        if isinstance(s, ReturnStmt):
            value = self.eval(s.expr, env) if s.expr is not None else None
            func_id = self._current_user_function()
            if func_id is None:
                raise MiniJSRuntimeError(s.loc, "return outside function")
            if is_func(value):
                self.emit(T.RETURN, value, s.loc, func_id=func_id)
            return ("return", value)
        if isinstance(s, IfStmt):
            branch = s.then if truthy(self.eval(s.cond, env)) else s.els
            return self.exec_stmts(branch, env)
        if isinstance(s, WhileStmt):
            while truthy(self.eval(s.cond, env)):
                signal = self.exec_stmts(s.body, env)
                if signal is not None:
                    return signal
                self.step(s.loc)
            return None
        if isinstance(s, ForInStmt):
            obj = self.eval(s.obj, env)
            keys = obj.own_keys() if isinstance(obj, (ObjectValue, ArrayValue)) \
                else []
            for key in keys:
                holder = env.holder(s.var_name) or env
                holder.vars[s.var_name] = key
                signal = self.exec_stmts(s.body, env)
                if signal is not None:
                    return signal
                self.step(s.loc)
            return None
        raise TypeError(f"unknown statement {type(s).__name__}")

    def _current_user_function(self):
        for kind, name in reversed(self.stack):
            if kind == "user":
                return name
        return None

    # -- expressions --------------------------------------------------------

    def eval(self, e, env):
        self.step(e.loc)
        if isinstance(e, NumberLit):
            return e.value
        if isinstance(e, StringLit):
            return e.value
        if isinstance(e, BoolLit):
            return e.value
        if isinstance(e, NullLit):
            return None
        if isinstance(e, Ident):
            return self.read_ident(e, env)
        if isinstance(e, FunctionExpr):
            return self.make_closure(e, env)
        if isinstance(e, ObjectLit):
            return self.eval_object(e, env)
        if isinstance(e, ArrayLit):
            elements = []
            for el in e.elements:
                v = self.eval(el, env)
                elements.append(v)
            arr = ArrayValue(elements)
            for i, v in enumerate(elements):
                if is_func(v):
                    self.emit(T.PROP_WRITE, v, e.elements[i].loc, name=str(i))
            return arr
        if isinstance(e, PropAccess):
            base = self.eval(e.base, env)
            name = self.prop_name(e, env)
            return self.get_prop(base, name, e)
        if isinstance(e, Assign):
            return self.eval_assign(e, env)
        if isinstance(e, Call):
            return self.eval_call(e, env)
        if isinstance(e, Binary):
            return self.eval_binary(e, env)
        if isinstance(e, Unary):
            v = self.eval(e.operand, env)
            if e.op == "!":
                return not truthy(v)
            return -as_number(v, e.loc)
        raise TypeError(f"unknown expression {type(e).__name__}")

    def read_ident(self, e: Ident, env):
        holder = env.holder(e.name)
        if holder is None:
            raise MiniJSRuntimeError(e.loc, f"'{e.name}' is not defined")
        value = holder.vars[e.name]
        if is_func(value):
            self.emit(T.VAR_READ, value, e.loc, name=e.name,
                      binding=e.binding.var_id if e.binding else None)
        return value

    def make_closure(self, fn: FunctionExpr, env) -> Closure:
        func = self.bound.program.functions.get(fn.func_id) \
            or self.runtime_functions.get(fn.func_id)
        if func is None:
            func = FunctionDef(fn.func_id, fn.name, fn.params, fn.body, fn.loc)
            self.runtime_functions[fn.func_id] = func
        closure_env = env
        if fn.name and not fn.is_decl:
            # Named function expression: bind its own name for recursion.
            closure_env = Env(env)
        closure = Closure(func, closure_env, self._new_vid())
        self.trace.functions[closure.vid] = func.func_id
        self.emit(T.CREATE, closure, fn.loc, func_id=func.func_id)
        if fn.name and not fn.is_decl:
            closure_env.vars[fn.name] = closure
            self.emit(T.VAR_WRITE, closure, fn.loc, name=fn.name,
                      binding=VarId(func.func_id, fn.name))
        return closure

    def eval_object(self, e: ObjectLit, env) -> ObjectValue:
        obj = ObjectValue()
        for p in e.props:
            if p.kind == "data":
                v = self.eval(p.value, env)
                obj.props[p.name] = v
                if is_func(v):
                    self.emit(T.PROP_WRITE, v, p.loc, name=p.name)
            else:
                closure = self.eval(p.value, env)
                pair = obj.accessors.setdefault(p.name, [None, None])
                pair[0 if p.kind == "get" else 1] = closure
        return obj

    def prop_name(self, e: PropAccess, env) -> str:
        if not e.computed:
            return e.name
        return to_prop_name(self.eval(e.name_expr, env))

    def get_prop(self, base, name: str, e: PropAccess):
        dynamic = not e.is_static
        flags = {T.DYNAMIC_ACCESS} if dynamic else set()
        if is_func(base) and name in REFLECTIVE_METHODS:
            method = NativeMethod(name, base, self._new_vid())
            self.trace.functions[method.vid] = name
            self.emit(T.PROP_READ, method, e.loc, name=name, flags=flags)
            return method
        if isinstance(base, ObjectValue):
            accessor = base.accessors.get(name)
            if accessor and accessor[0] is not None:
                return self.invoke(accessor[0], [], e.loc,
                                   extra_flags={T.GETTER})
            value = base.props.get(name)
        elif isinstance(base, ArrayValue):
            try:
                value = base.elements[int(name)]
            except (ValueError, IndexError):
                value = None
        elif isinstance(base, str):
            value = float(len(base)) if name == "length" else None
        else:
            raise MiniJSRuntimeError(e.loc,
                                     f"cannot read property '{name}' of "
                                     f"{describe(base)}")
        if is_func(value):
            self.emit(T.PROP_READ, value, e.loc, name=name, flags=flags)
        return value

    def eval_assign(self, e: Assign, env):
        target = e.target
        if isinstance(target, Ident):
            value = self.eval(e.value, env)
            holder = env.holder(target.name) or env.root()
            holder.vars[target.name] = value
            if is_func(value):
                self.emit(T.VAR_WRITE, value, e.loc, name=target.name,
                          binding=target.binding.var_id if target.binding
                          else None)
            return value
        assert isinstance(target, PropAccess)
        base = self.eval(target.base, env)
        name = self.prop_name(target, env)
        value = self.eval(e.value, env)
        dynamic = not target.is_static
        flags = {T.DYNAMIC_ACCESS} if dynamic else set()
        if isinstance(base, ObjectValue):
            accessor = base.accessors.get(name)
            if accessor and accessor[1] is not None:
                self.invoke(accessor[1], [value], target.loc,
                            extra_flags={T.SETTER})
                return value
            base.props[name] = value
        elif isinstance(base, ArrayValue):
            try:
                idx = int(name)
            except ValueError:
                raise MiniJSRuntimeError(target.loc,
                                         f"bad array index '{name}'")
            while len(base.elements) <= idx:
                base.elements.append(None)
            base.elements[idx] = value
        else:
            raise MiniJSRuntimeError(target.loc,
                                     f"cannot set property '{name}' on "
                                     f"{describe(base)}")
        if is_func(value):
            self.emit(T.PROP_WRITE, value, target.loc, name=name, flags=flags)
        return value

    def eval_call(self, e: Call, env):
        callee = self.eval(e.callee, env)
        args = [self.eval(a, env) for a in e.args]
        # evalCode executes in its caller's scope; remember it here since
        # native dispatch does not otherwise see an environment.
        self._current_env = env
        return self.invoke(callee, args, e.loc)

    def eval_binary(self, e: Binary, env):
        left = self.eval(e.left, env)
        right = self.eval(e.right, env)
        op = e.op
        if op == "+":
            if isinstance(left, str) or isinstance(right, str):
                return to_display(left) + to_display(right)
            return as_number(left, e.loc) + as_number(right, e.loc)
        if op == "-":
            return as_number(left, e.loc) - as_number(right, e.loc)
        if op == "*":
            return as_number(left, e.loc) * as_number(right, e.loc)
        if op == "/":
            denom = as_number(right, e.loc)
            if denom == 0:
                raise MiniJSRuntimeError(e.loc, "division by zero")
            return as_number(left, e.loc) / denom
        if op == "==":
            return left == right
        if op == "!=":
            return left != right
        if op in ("<", ">", "<=", ">="):
            try:
                if op == "<":
                    return left < right
                if op == ">":
                    return left > right
                if op == "<=":
                    return left <= right
                return left >= right
            except TypeError:
                raise MiniJSRuntimeError(e.loc,
                                         f"cannot compare {describe(left)} and "
                                         f"{describe(right)}")
        raise MiniJSRuntimeError(e.loc, f"unknown operator {op!r}")

    # -- invocation ---------------------------------------------------------

    def invoke(self, callee, args, site: SourceLoc, *,
               extra_flags=frozenset(), caller=None, record_args=True):
        self.step(site)
        if isinstance(callee, Closure):
            return self._invoke_closure(callee, args, site,
                                        extra_flags=extra_flags, caller=caller,
                                        record_args=record_args)
        if isinstance(callee, NativeFunction):
            return self._invoke_native(callee, args, site,
                                       extra_flags=extra_flags, caller=caller)
        if isinstance(callee, NativeMethod):
            return self._invoke_reflective(callee, args, site, caller=caller)
        if isinstance(callee, BoundFunction):
            flags = set(extra_flags) | {T.BOUND_CALL}
            return self.invoke(callee.target, callee.bound_args + args, site,
                               extra_flags=flags, caller=caller,
                               record_args=record_args)
        raise NotCallable(site, describe(callee))

    def _invoke_closure(self, closure: Closure, args, site, *,
                        extra_flags, caller, record_args):
        func = closure.func
        arg_vids = None
        if record_args:
            arg_vids = tuple(a.vid if is_func(a) else None for a in args)
        entry = self.emit(T.INVOKE, closure, site, func_id=func.func_id,
                          args=arg_vids, flags=extra_flags)
        self.dcg.add(caller or self.current_caller(), site, func.func_id,
                     entry.index)
        frame_env = Env(closure.env)
        for i, p in enumerate(func.params):
            frame_env.vars[p] = args[i] if i < len(args) else None
        self.stack.append(("user", func.func_id))
        try:
            signal = self.exec_stmts(func.body, frame_env)
        finally:
            self.stack.pop()
        result = signal[1] if signal is not None else None
        if is_func(result):
            self.emit(T.VAR_READ, result, site, name=RET_NAME,
                      binding=ret_var(func.func_id),
                      flags=frozenset(extra_flags) & {T.GETTER, T.SETTER})
        return result

    def _invoke_native(self, native: NativeFunction, args, site, *,
                       extra_flags=frozenset(), caller=None):
        spec = self.natives.get(native.name)
        arg_vids = tuple(a.vid if is_func(a) else None for a in args)
        entry = self.emit(T.INVOKE, native, site, func_id=native.name,
                          args=arg_vids, flags=extra_flags)
        self.dcg.add(caller or self.current_caller(), site, native.name,
                     entry.index)
        self.stack.append(("native", native.name))
        try:
            return self._native_behavior(spec, args, site)
        finally:
            self.stack.pop()

    def _native_behavior(self, spec, args, site):
        behavior = spec.behavior
        if behavior == "pure":
            if spec.name == "rand":
                return self.rng.random()
            return None
        if behavior == "evaluates-code":
            code = args[0] if args and isinstance(args[0], str) else ""
            return self.eval_dynamic_code(code, self._current_env, site,
                                          "eval")
        if behavior == "creates-function":
            params = args[0] if args and isinstance(args[0], str) else ""
            body = args[1] if len(args) > 1 and isinstance(args[1], str) else ""
            return self.make_dynamic_function(params, body, site)
        if behavior == "returns-function":
            return args[0] if args else None
        if behavior == "invokes-argument":
            target = next((a for a in args if is_func(a)), None)
            if target is not None:
                self._native_callback(target, site)
            return None
        raise MiniJSRuntimeError(site,
                                 f"native {spec.name!r} cannot be called "
                                 "directly")

    def _native_callback(self, target, site):
        run = self.native_run()
        flags = {T.NATIVE_CALLBACK_BOUNDARY}
        caller = run[-1] if run else self.current_caller()
        if len(run) >= 2:
            # Only the outermost native boundary is recorded.
            flags.add(T.MULTI_LEVEL_NATIVE)
            caller = run[0]
        self.invoke(target, [], site, extra_flags=flags, caller=caller,
                    record_args=False)

    def _invoke_reflective(self, method: NativeMethod, args, site, *,
                           caller=None):
        arg_vids = tuple(a.vid if is_func(a) else None for a in args)
        entry = self.emit(T.INVOKE, method, site, func_id=method.kind,
                          args=arg_vids)
        self.dcg.add(caller or self.current_caller(), site, method.kind,
                     entry.index)
        target = method.target
        if method.kind == "bind":
            bound = BoundFunction(target, args[1:], self._new_vid())
            target_id = self.trace.functions.get(target.vid, "?")
            self.trace.functions[bound.vid] = f"<bound:{target_id}>"
            self.emit(T.CREATE, bound, site, func_id=f"<bound:{target_id}>",
                      flags={T.SYNTHETIC})
            return bound
        if method.kind == "call":
            passed = args[1:]
            synthetic = False
        else:  # apply
            arr = args[1] if len(args) > 1 else None
            passed = list(arr.elements) if isinstance(arr, ArrayValue) else []
            synthetic = True
        self.stack.append(("native", method.kind))
        try:
            if isinstance(target, Closure):
                flags = {T.SYNTHETIC} if synthetic else set()
                for i, a in enumerate(passed):
                    if is_func(a) and i < len(target.func.params):
                        self.emit(T.VAR_WRITE, a, site,
                                  name=target.func.params[i],
                                  binding=VarId(target.func.func_id,
                                                target.func.params[i], i),
                                  flags=flags)
            return self.invoke(target, passed, site)
        finally:
            self.stack.pop()

    # -- dynamic code evaluation --------------------------------------------

    def eval_dynamic_code(self, code: str, env, site: SourceLoc, channel: str):
        if not code.strip():
            return None
        depth = site.eval_depth + 1
        self.eval_counter += 1
        unit = f"{self.bound.unit}$eval{self.eval_counter}"
        try:
            program = parse_program(code, unit, eval_depth=depth)
        except ParseError as ex:
            raise MiniJSRuntimeError(site, f"eval syntax error: {ex}")
        sub = resolve_bindings(program, self.natives, lenient=True)
        self.trace.eval_units[unit] = channel
        self.runtime_functions.update(program.functions)
        saved = self.bound
        self.bound = sub
        try:
            self.exec_stmts(program.body, env)
        finally:
            self.bound = saved
        return None

    def make_dynamic_function(self, params_src: str, body_src: str,
                              site: SourceLoc) -> Closure:
        depth = site.eval_depth + 1
        self.eval_counter += 1
        unit = f"{self.bound.unit}$eval{self.eval_counter}"
        # Wrapping the pieces lets the parser and binder handle parameter
        # scoping; the created closure captures only the global scope.
        src = f"(function ({params_src}) {{\n{body_src}\n}});"
        try:
            program = parse_program(src, unit, eval_depth=depth)
        except ParseError as ex:
            raise MiniJSRuntimeError(site, f"makeFunction syntax error: {ex}")
        resolve_bindings(program, self.natives, lenient=True)
        self.trace.eval_units[unit] = "functionCtor"
        func_id = f"{unit}::fn#0"
        func = program.functions[func_id]
        func.via_function_ctor = True
        self.runtime_functions.update(program.functions)
        self.trace.function_ctor_funcs.add(func_id)
        closure = Closure(func, self.globals, self._new_vid())
        self.trace.functions[closure.vid] = func_id
        self.emit(T.CREATE, closure, func.loc, func_id=func_id,
                  flags={T.VIA_FUNCTION_CTOR, T.SYNTHETIC})
        return closure

    # innermost environment at the most recent call expression; used by
    # evalCode, which runs in its caller's scope
    _current_env: Env = None


def truthy(value) -> bool:
    if value is None or value is False:
        return False
    if value == 0 or value == "":
        return False
    return True


def as_number(value, loc) -> float:
    if isinstance(value, bool):
        return 1.0 if value else 0.0
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(value)
        except ValueError:
            pass
    raise MiniJSRuntimeError(loc, f"{describe(value)} is not a number")


def to_display(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return str(int(value)) if value == int(value) else str(value)
    if isinstance(value, str):
        return value
    if isinstance(value, ObjectValue):
        return "[object]"
    if isinstance(value, ArrayValue):
        return ",".join(to_display(v) for v in value.elements)
    if is_func(value):
        return "[function]"
    return str(value)


def to_prop_name(value) -> str:
    return to_display(value)


def describe(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, ObjectValue):
        return "object"
    if isinstance(value, ArrayValue):
        return "array"
    if is_func(value):
        return "function"
    return type(value).__name__


def execute(bound: BoundProgram, natives: NativeConfig | None = None,
            step_budget: int = DEFAULT_STEP_BUDGET,
            seed: int = 0) -> ExecutionResult:
    """Run a bound program, returning the dynamic call graph and flow trace.

    Runtime errors abort execution but the partial trace and call graph
    gathered so far are returned (with the error message attached), so the
    analysis can still run over crashed executions.
    """
    return Interpreter(bound, natives, step_budget, seed).run()
