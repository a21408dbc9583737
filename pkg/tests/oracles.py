"""Independent reference implementations used as test oracles.

These deliberately use different algorithms from the library code:
reachability via Floyd–Warshall transitive closure, and copy-chain
reconstruction via exhaustive candidate enumeration instead of the
library's single backward scan.
"""

from __future__ import annotations

from cgrl import trace as T
from cgrl.copies import (
    BOUND_FUNCTION, MULTI_LEVEL_NATIVE, NATIVE_OPAQUE, UNMATCHED_READ,
    UNMATCHED_WRITE,
)


def closure_reachable(nodes, edges, sources):
    """Nodes reachable from `sources` computed by transitive closure."""
    index = {n: i for i, n in enumerate(nodes)}
    n = len(nodes)
    reach = [[False] * n for _ in range(n)]
    for i in range(n):
        reach[i][i] = True
    for a, b in edges:
        reach[index[a]][index[b]] = True
    for k in range(n):
        for i in range(n):
            if reach[i][k]:
                row_k = reach[k]
                row_i = reach[i]
                for j in range(n):
                    if row_k[j]:
                        row_i[j] = True
    out = set()
    for s in sources:
        if s not in index:
            continue
        for node, j in index.items():
            if reach[index[s]][j]:
                out.add(node)
    return out


def _all_reads_or_creates(entries, before, value):
    return [e for e in entries[:before]
            if e.func_value == value
            and e.kind in (T.CREATE, T.VAR_READ, T.PROP_READ)]


def _all_matching_writes(entries, read):
    """Every plausible write before `read`, plus whether an opaque invoke
    of the param's owner was seen."""
    value = read.func_value
    matches = []
    opaque = False
    for e in entries[:read.index]:
        if read.kind == T.PROP_READ:
            if e.kind == T.PROP_WRITE and e.name == read.name \
                    and e.func_value == value:
                matches.append(e)
        elif read.binding is not None and read.binding.is_ret:
            if e.kind == T.RETURN and e.func_id == read.binding.owner \
                    and e.func_value == value:
                matches.append(e)
        elif read.binding is not None and read.binding.is_param:
            if e.kind == T.VAR_WRITE and e.binding == read.binding \
                    and e.func_value == value:
                matches.append(e)
            elif e.kind == T.INVOKE and e.func_id == read.binding.owner:
                if e.args is None:
                    opaque = True
                elif read.binding.param_index < len(e.args) \
                        and e.args[read.binding.param_index] == value:
                    matches.append(e)
        else:
            if e.kind == T.VAR_WRITE and e.binding == read.binding \
                    and e.func_value == value:
                matches.append(e)
    return matches, opaque


def oracle_copy_chain(trace, invoke):
    """(copies-as-index-triples, reason) for one Invoke entry."""
    if invoke.has(T.BOUND_CALL):
        return [], BOUND_FUNCTION
    if invoke.has(T.MULTI_LEVEL_NATIVE):
        return [], MULTI_LEVEL_NATIVE
    entries = trace.entries
    value = invoke.func_value
    reads = _all_reads_or_creates(entries, invoke.index, value)
    if not reads:
        reason = NATIVE_OPAQUE if invoke.has(T.NATIVE_CALLBACK_BOUNDARY) \
            else UNMATCHED_READ
        return [], reason
    read = max(reads, key=lambda e: e.index)
    copies = [(read.index, None, invoke.index)]
    while not (read.kind == T.CREATE or read.is_native_origin):
        writes, opaque = _all_matching_writes(entries, read)
        if not writes:
            return copies, NATIVE_OPAQUE if opaque else UNMATCHED_WRITE
        write = max(writes, key=lambda e: e.index)
        if write.has(T.BOUND_CALL):
            return copies, BOUND_FUNCTION
        if write.has(T.MULTI_LEVEL_NATIVE):
            return copies, MULTI_LEVEL_NATIVE
        sources = _all_reads_or_creates(entries, write.index, value)
        if not sources:
            return copies, UNMATCHED_READ
        source = max(sources, key=lambda e: e.index)
        copies.insert(0, (source.index, write.index, read.index))
        read = source
    return copies, None


def chain_as_triples(chain):
    return [(c.source.index,
             c.write.index if c.write is not None else None,
             c.dest.index) for c in chain.copies]
