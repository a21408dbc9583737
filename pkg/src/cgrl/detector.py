"""Detection of missing flows: why is a dynamically observed call edge
absent from the static call graph?

For every missed edge, the invoked function's dynamic copy chain is
replayed against the static flow graph.  Each copy is mapped to a source
and destination flow-graph node; a missing node yields a MissingFGNode,
an unconnected pair yields a MissingFGPath.  When the copy's write was
itself a call (parameter passing or a function return) whose target the
call graph also missed, the flow is reported as a DependentCall instead:
the root cause lies with that other call, not with parameter/return
modeling.  Chains that could not be fully reconstructed contribute an
Unresolved flow carrying the reconstruction failure reason.

resolve_dependent_calls then replaces each DependentCall with the flows of
the call it depends on (transitively), so every missed edge ends up with
flows describing genuine root causes.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import trace as T
from .acg import (
    CallGraph, FGNode, FlowGraph, callee_node, func_node, prop_node,
    res_node, ret_node, var_node,
)
from .copies import CopyChain, DynamicCopy, find_dynamic_copies
from .syntax import SourceLoc

CYCLIC_DEPENDENCE = "CyclicDependence"


@dataclass(frozen=True)
class MissedEdge:
    caller: str
    site: SourceLoc
    callee: str
    witness: int  # trace index of the Invoke entry

    @property
    def key(self):
        return (self.site, self.callee)


@dataclass(frozen=True)
class MissingFGNode:
    copy: DynamicCopy
    entry: T.TraceEntry  # the trace entry with no flow-graph counterpart
    node: FGNode | None  # the node it would have mapped to


@dataclass(frozen=True)
class MissingFGPath:
    copy: DynamicCopy
    src: FGNode
    dst: FGNode


@dataclass(frozen=True)
class DependentCall:
    copy: DynamicCopy
    site: SourceLoc
    callee: str


@dataclass(frozen=True)
class Unresolved:
    reason: str
    invoke: T.TraceEntry


def missed_edges(dcg: T.DynamicCallGraph, cg: CallGraph) -> list:
    """Dynamic call edges absent from the static call graph."""
    missed = []
    for edge, witness in dcg.edges.items():
        if (edge.site, edge.callee) not in cg.edges:
            missed.append(MissedEdge(edge.caller, edge.site, edge.callee,
                                     witness))
    missed.sort(key=lambda m: m.witness)
    return missed


def entry_node(entry: T.TraceEntry) -> FGNode | None:
    """The flow-graph node abstracting the location a trace entry touched."""
    if entry.kind == T.CREATE:
        return func_node(entry.func_id)
    if entry.kind in (T.VAR_READ, T.VAR_WRITE):
        if entry.binding is None:
            return None
        if entry.binding.is_ret:
            # Call results live at the call site's result node.
            return res_node(entry.loc)
        if entry.binding.is_native:
            # Reads of native globals originate chains: the value "is" the
            # native function, so the node to look for is its Func node
            # (absent exactly when the native is unmodeled).
            return func_node(entry.binding.name)
        return var_node(entry.binding)
    if entry.kind in (T.PROP_READ, T.PROP_WRITE):
        return prop_node(entry.name)
    if entry.kind == T.INVOKE:
        return callee_node(entry.loc)
    if entry.kind == T.RETURN:
        return ret_node(entry.func_id)
    return None


def _write_call(copy: DynamicCopy):
    """If the copy's write was a call, its (site, callee); else None.

    Invokes pass parameters, Returns hand results to the call site read at
    the copy's dest, and synthetic formal writes stand for reflective calls.
    """
    w = copy.write
    if w is None:
        return None
    if w.kind == T.INVOKE:
        return (w.loc, w.func_id)
    if w.kind == T.RETURN:
        return (copy.dest.loc, w.func_id)
    if w.kind == T.VAR_WRITE and w.binding is not None \
            and w.binding.is_param:
        return (w.loc, w.binding.owner)
    return None


def find_missing_flows(chain: CopyChain, fg: FlowGraph,
                       cg: CallGraph) -> list:
    """Explain one missed edge by replaying its copy chain over the flow
    graph."""
    flows = []
    for copy in chain.copies:
        src = entry_node(copy.source)
        dst = entry_node(copy.dest)
        if src is None or src not in fg.nodes:
            flows.append(MissingFGNode(copy, copy.source, src))
            continue
        if dst is None or dst not in fg.nodes:
            flows.append(MissingFGNode(copy, copy.dest, dst))
            continue
        if dst in fg.reachable([src]):
            continue
        call = _write_call(copy)
        if call is not None and call not in cg.edges:
            # The flow is missing because that call's target was missed.
            flows.append(DependentCall(copy, call[0], call[1]))
            continue
        flows.append(MissingFGPath(copy, src, dst))
    if not chain.complete:
        flows.append(Unresolved(chain.reason, chain.invoke))
    return flows


def resolve_dependent_calls(flows_by_edge: dict) -> dict:
    """Replace DependentCall flows by the flows of the calls they depend on.

    `flows_by_edge` maps (site, callee) keys to flow lists.  Resolution is
    transitive; an edge whose flows all bottom out in a dependency cycle
    gets an Unresolved(CyclicDependence) flow instead.
    """
    resolved: dict = {}

    def resolve(key, seen):
        if key in resolved:
            return resolved[key]
        if key in seen:
            return []
        own = []
        for flow in flows_by_edge.get(key, []):
            if isinstance(flow, DependentCall):
                for sub in resolve((flow.site, flow.callee), seen | {key}):
                    if sub not in own:
                        own.append(sub)
            elif flow not in own:
                own.append(flow)
        return own

    for key in flows_by_edge:
        resolved[key] = resolve(key, frozenset())
    return resolved


def analyze_missed_edges(trace: T.FlowTrace, dcg: T.DynamicCallGraph,
                         fg: FlowGraph, cg: CallGraph):
    """Full detection pipeline: missed edges, chains, flows, resolution.

    Returns (missed, chains, flows) where chains and flows are keyed by
    each missed edge's (site, callee)."""
    missed = missed_edges(dcg, cg)
    chains = {}
    raw_flows = {}
    for edge in missed:
        chain = find_dynamic_copies(trace, trace.entries[edge.witness])
        chains[edge.key] = chain
        raw_flows[edge.key] = find_missing_flows(chain, fg, cg)
    flows = resolve_dependent_calls(raw_flows)
    for edge in missed:
        if not flows[edge.key]:
            chain = chains[edge.key]
            flows[edge.key] = [Unresolved(CYCLIC_DEPENDENCE, chain.invoke)]
    return missed, chains, flows
