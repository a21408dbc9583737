"""Reconstruction of dynamic copy chains from a flow trace.

Given the Invoke entry that witnessed a call, the chain explains how the
invoked function value travelled through memory: it starts at the value's
creation (or at a read of an opaque native-provided value) and ends at the
call.  Each link is a dynamic copy `source --write--> dest`: the value was
read (or created) at `source` and stored by `write` into the location later
read at `dest`.  The final copy has no write — its dest is the Invoke
itself, recording the read that produced the callee.

Reconstruction walks the trace backwards, always taking the closest
matching entry.  Calls act as the writes for parameter passing (the read of
the actual argument is the source) and for function returns (matching the
callee's Return entry).  The closest-preceding heuristic can pick the wrong
read when one call passes the same function value in several positions;
the resulting infeasible copy is a known, accepted imprecision.

Chains can be incomplete.  Calls through bound functions and callbacks
crossing several native levels are not reconstructed at all; a failed
read or write match ends the chain with a reason describing why.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import trace as T

# incompleteness reasons
BOUND_FUNCTION = "BoundFunction"
MULTI_LEVEL_NATIVE = "MultiLevelNative"
NATIVE_OPAQUE = "NativeOpaque"
UNMATCHED_READ = "UnmatchedRead"
UNMATCHED_WRITE = "UnmatchedWrite"

READ_OR_CREATE = (T.CREATE, T.VAR_READ, T.PROP_READ)


@dataclass(frozen=True)
class DynamicCopy:
    """One link `source --write--> dest` of a copy chain.

    `write` is None for the final link, whose dest is the Invoke entry."""

    source: T.TraceEntry
    write: T.TraceEntry | None
    dest: T.TraceEntry

    @property
    def is_invoke(self) -> bool:
        return self.write is None

    def entries(self):
        if self.write is None:
            return (self.source, self.dest)
        return (self.source, self.write, self.dest)


@dataclass
class CopyChain:
    invoke: T.TraceEntry
    copies: list = field(default_factory=list)  # creation first
    reason: str | None = None  # incompleteness reason, None when complete

    @property
    def complete(self) -> bool:
        return self.reason is None


def preceding_read_or_create(entries, index: int,
                             value: int) -> T.TraceEntry | None:
    """The closest read or create of `value` before position `index`."""
    for i in range(index - 1, -1, -1):
        e = entries[i]
        if e.func_value == value and e.kind in READ_OR_CREATE:
            return e
    return None


def matching_write(entries, read: T.TraceEntry):
    """The closest write before `read` that stored the value it observed.

    Returns (entry, None) on success and (None, reason) on failure."""
    value = read.func_value
    if read.kind == T.PROP_READ:
        for i in range(read.index - 1, -1, -1):
            e = entries[i]
            if e.kind == T.PROP_WRITE and e.name == read.name \
                    and e.func_value == value:
                return e, None
        return None, UNMATCHED_WRITE
    binding = read.binding
    if binding is not None and binding.is_ret:
        # The value came out of a call: its write is the callee's Return.
        for i in range(read.index - 1, -1, -1):
            e = entries[i]
            if e.kind == T.RETURN and e.func_id == binding.owner \
                    and e.func_value == value:
                return e, None
        return None, UNMATCHED_WRITE
    if binding is not None and binding.is_param:
        # The value arrived as an argument: its write is the Invoke that
        # passed it (or an explicit formal write from a reflective call).
        opaque = False
        for i in range(read.index - 1, -1, -1):
            e = entries[i]
            if e.kind == T.VAR_WRITE and e.binding == binding \
                    and e.func_value == value:
                return e, None
            if e.kind == T.INVOKE and e.func_id == binding.owner:
                if e.args is None:
                    opaque = True
                    continue
                if binding.param_index < len(e.args) \
                        and e.args[binding.param_index] == value:
                    return e, None
        return None, NATIVE_OPAQUE if opaque else UNMATCHED_WRITE
    for i in range(read.index - 1, -1, -1):
        e = entries[i]
        if e.kind == T.VAR_WRITE and e.binding == binding \
                and e.func_value == value:
            return e, None
    return None, UNMATCHED_WRITE


def find_dynamic_copies(trace: T.FlowTrace,
                        invoke: T.TraceEntry) -> CopyChain:
    """Reconstruct how the function invoked by `invoke` reached the call."""
    if invoke.kind != T.INVOKE:
        raise ValueError(f"expected an Invoke entry, got {invoke.kind}")
    if invoke.has(T.BOUND_CALL):
        return CopyChain(invoke, [], BOUND_FUNCTION)
    if invoke.has(T.MULTI_LEVEL_NATIVE):
        return CopyChain(invoke, [], MULTI_LEVEL_NATIVE)
    entries = trace.entries
    value = invoke.func_value
    read = preceding_read_or_create(entries, invoke.index, value)
    if read is None:
        reason = NATIVE_OPAQUE if invoke.has(T.NATIVE_CALLBACK_BOUNDARY) \
            else UNMATCHED_READ
        return CopyChain(invoke, [], reason)
    chain = CopyChain(invoke, [DynamicCopy(read, None, invoke)])
    while not (read.kind == T.CREATE or read.is_native_origin):
        write, reason = matching_write(entries, read)
        if write is None:
            chain.reason = reason
            return chain
        if write.has(T.BOUND_CALL):
            chain.reason = BOUND_FUNCTION
            return chain
        if write.has(T.MULTI_LEVEL_NATIVE):
            chain.reason = MULTI_LEVEL_NATIVE
            return chain
        source = preceding_read_or_create(entries, write.index, value)
        if source is None:
            chain.reason = UNMATCHED_READ
            return chain
        chain.copies.insert(0, DynamicCopy(source, write, read))
        read = source
    return chain
