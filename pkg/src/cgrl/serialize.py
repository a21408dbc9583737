"""JSON artifact schemas for every pipeline stage.

All artifacts carry `schemaVersion` and `kind` fields.  The trace is JSON
Lines (a header line, then one entry per line); the graphs, flows, and
report are single JSON documents.  Serialization is deterministic: keys
are sorted and collections are emitted in a stable order, so identical
runs produce byte-identical files.  Each artifact round-trips, allowing
externally produced traces or graphs to be fed back into later stages.
"""

from __future__ import annotations

import json

from . import trace as T
from .acg import CallGraph, FGNode, FlowGraph, SiteInfo
from .bindings import VarId
from .detector import (
    DependentCall, MissedEdge, MissingFGNode, MissingFGPath, Unresolved,
)
from .syntax import SourceLoc

SCHEMA_VERSION = 1


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


# --- primitives ------------------------------------------------------------

def loc_to_json(loc: SourceLoc) -> dict:
    return {"unit": loc.unit, "line": loc.line, "col": loc.col,
            "evalDepth": loc.eval_depth}


def loc_from_json(d: dict) -> SourceLoc:
    return SourceLoc(d["unit"], d["line"], d["col"], d.get("evalDepth", 0))


def loc_sort_key(loc: SourceLoc):
    return (loc.unit, loc.line, loc.col, loc.eval_depth)


def var_to_json(var: VarId) -> dict:
    out = {"owner": var.owner, "name": var.name}
    if var.param_index is not None:
        out["paramIndex"] = var.param_index
    return out


def var_from_json(d: dict) -> VarId:
    return VarId(d["owner"], d["name"], d.get("paramIndex"))


def node_to_json(node: FGNode | None) -> dict | None:
    if node is None:
        return {"kind": "Unknown"}
    out = {"kind": node.kind}
    if node.func_id is not None:
        out["funcId"] = node.func_id
    if node.var is not None:
        out["var"] = var_to_json(node.var)
    if node.name is not None:
        out["name"] = node.name
    if node.index is not None:
        out["index"] = node.index
    if node.loc is not None:
        out["loc"] = loc_to_json(node.loc)
    return out


def node_from_json(d: dict) -> FGNode | None:
    if d["kind"] == "Unknown":
        return None
    return FGNode(d["kind"], func_id=d.get("funcId"),
                  var=var_from_json(d["var"]) if "var" in d else None,
                  name=d.get("name"), index=d.get("index"),
                  loc=loc_from_json(d["loc"]) if "loc" in d else None)


def _node_sort_key(node: FGNode):
    return (node.kind, node.func_id or "",
            (node.var.owner, node.var.name) if node.var else ("", ""),
            node.name or "", node.index if node.index is not None else -1,
            loc_sort_key(node.loc) if node.loc else ("", 0, 0, 0))


# --- trace (JSON Lines) ----------------------------------------------------

def entry_to_json(e: T.TraceEntry) -> dict:
    out = {"index": e.index, "kind": e.kind, "funcValue": e.func_value,
           "loc": loc_to_json(e.loc)}
    if e.name is not None:
        out["name"] = e.name
    if e.binding is not None:
        out["binding"] = var_to_json(e.binding)
    if e.func_id is not None:
        out["funcId"] = e.func_id
    if e.args is not None:
        out["args"] = list(e.args)
    if e.flags:
        out["flags"] = sorted(e.flags)
    return out


def entry_from_json(d: dict) -> T.TraceEntry:
    return T.TraceEntry(
        index=d["index"], kind=d["kind"], func_value=d["funcValue"],
        loc=loc_from_json(d["loc"]), name=d.get("name"),
        binding=var_from_json(d["binding"]) if "binding" in d else None,
        func_id=d.get("funcId"),
        args=tuple(d["args"]) if "args" in d else None,
        flags=frozenset(d.get("flags", ())))


def trace_to_jsonl(trace: T.FlowTrace) -> str:
    header = {"schemaVersion": SCHEMA_VERSION, "kind": "trace",
              "functions": {str(k): v for k, v in trace.functions.items()},
              "evalUnits": trace.eval_units,
              "functionCtorFuncs": sorted(trace.function_ctor_funcs)}
    lines = [json.dumps(header, sort_keys=True)]
    lines.extend(json.dumps(entry_to_json(e), sort_keys=True)
                 for e in trace.entries)
    return "\n".join(lines) + "\n"


def trace_from_jsonl(text: str) -> T.FlowTrace:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    header = json.loads(lines[0])
    if header.get("kind") != "trace":
        raise ValueError("not a trace artifact")
    trace = T.FlowTrace()
    trace.functions = {int(k): v for k, v in header["functions"].items()}
    trace.eval_units = dict(header.get("evalUnits", {}))
    trace.function_ctor_funcs = set(header.get("functionCtorFuncs", ()))
    for ln in lines[1:]:
        trace.entries.append(entry_from_json(json.loads(ln)))
    return trace


# --- dynamic call graph ----------------------------------------------------

def dcg_to_json(dcg: T.DynamicCallGraph) -> dict:
    edges = [{"caller": e.caller, "site": loc_to_json(e.site),
              "callee": e.callee, "witness": w}
             for e, w in dcg.edges.items()]
    edges.sort(key=lambda d: d["witness"])
    return {"schemaVersion": SCHEMA_VERSION, "kind": "dcg",
            "entrypoints": sorted(dcg.entrypoints), "edges": edges}


def dcg_from_json(d: dict) -> T.DynamicCallGraph:
    if d.get("kind") != "dcg":
        raise ValueError("not a dcg artifact")
    dcg = T.DynamicCallGraph()
    dcg.entrypoints = set(d["entrypoints"])
    for e in d["edges"]:
        dcg.add(e["caller"], loc_from_json(e["site"]), e["callee"],
                e["witness"])
    return dcg


# --- flow graph and call graph ---------------------------------------------

def fg_to_json(fg: FlowGraph) -> dict:
    nodes = sorted(fg.nodes, key=_node_sort_key)
    edges = sorted(fg.edges(), key=lambda p: (_node_sort_key(p[0]),
                                              _node_sort_key(p[1])))
    sites = sorted(fg.sites.values(), key=lambda s: loc_sort_key(s.loc))
    return {"schemaVersion": SCHEMA_VERSION, "kind": "flow-graph",
            "nodes": [node_to_json(n) for n in nodes],
            "edges": [[node_to_json(a), node_to_json(b)] for a, b in edges],
            "sites": [{"loc": loc_to_json(s.loc), "numArgs": s.num_args,
                       "reflective": s.reflective} for s in sites]}


def fg_from_json(d: dict) -> FlowGraph:
    if d.get("kind") != "flow-graph":
        raise ValueError("not a flow-graph artifact")
    fg = FlowGraph()
    for n in d["nodes"]:
        fg.add_node(node_from_json(n))
    for a, b in d["edges"]:
        fg.add_edge(node_from_json(a), node_from_json(b))
    for s in d["sites"]:
        loc = loc_from_json(s["loc"])
        fg.sites[loc] = SiteInfo(loc, s["numArgs"], s.get("reflective"))
    return fg


def cg_to_json(cg: CallGraph) -> dict:
    edges = sorted(cg.edges, key=lambda e: (loc_sort_key(e[0]), e[1]))
    return {"schemaVersion": SCHEMA_VERSION, "kind": "call-graph",
            "variant": cg.variant,
            "edges": [{"site": loc_to_json(s), "callee": f}
                      for s, f in edges]}


def cg_from_json(d: dict) -> CallGraph:
    if d.get("kind") != "call-graph":
        raise ValueError("not a call-graph artifact")
    cg = CallGraph(d.get("variant", "optimistic"))
    for e in d["edges"]:
        cg.edges.add((loc_from_json(e["site"]), e["callee"]))
    return cg


# --- flows and report ------------------------------------------------------

def _copy_to_json(copy) -> dict:
    return {"source": copy.source.index,
            "write": copy.write.index if copy.write is not None else None,
            "dest": copy.dest.index}


def flow_to_json(flow) -> dict:
    if isinstance(flow, MissingFGNode):
        return {"type": "MissingFGNode", "copy": _copy_to_json(flow.copy),
                "entry": flow.entry.index, "node": node_to_json(flow.node)}
    if isinstance(flow, MissingFGPath):
        return {"type": "MissingFGPath", "copy": _copy_to_json(flow.copy),
                "src": node_to_json(flow.src), "dst": node_to_json(flow.dst)}
    if isinstance(flow, DependentCall):
        return {"type": "DependentCall", "copy": _copy_to_json(flow.copy),
                "site": loc_to_json(flow.site), "callee": flow.callee}
    if isinstance(flow, Unresolved):
        return {"type": "Unresolved", "reason": flow.reason,
                "invoke": flow.invoke.index}
    raise TypeError(f"unknown flow {type(flow).__name__}")


def flows_to_json(missed, chains, flows, labels, fine=None) -> dict:
    out = []
    for edge in missed:
        chain = chains[edge.key]
        record = {
            "caller": edge.caller, "site": loc_to_json(edge.site),
            "callee": edge.callee, "witness": edge.witness,
            "chain": {"reason": chain.reason,
                      "copies": [_copy_to_json(c) for c in chain.copies]},
            "flows": [flow_to_json(f) for f in flows[edge.key]],
            "labels": list(labels[edge.key]),
        }
        if fine is not None and edge.key in fine:
            record["fine"] = [
                {"kind": c.kind,
                 "constPrefixOrSuffix": c.const_prefix_or_suffix}
                for c in fine[edge.key]]
        out.append(record)
    return {"schemaVersion": SCHEMA_VERSION, "kind": "missing-flows",
            "edges": out}


def metric_to_json(m) -> dict:
    return {"metric": m.metric, "recall": m.recall, "precision": m.precision,
            "recallNumerator": m.recall_numerator,
            "recallDenominator": m.recall_denominator,
            "precisionNumerator": m.precision_numerator,
            "precisionDenominator": m.precision_denominator,
            "emptyRecall": m.empty_recall, "emptyPrecision": m.empty_precision}


def report_to_json(program: str, variant: str, metrics, dist,
                   missed_count: int, dynamic_count: int,
                   error: str | None = None) -> dict:
    return {
        "schemaVersion": SCHEMA_VERSION, "kind": "report",
        "program": program, "variant": variant,
        "executionError": error,
        "dynamicEdges": dynamic_count, "missedEdges": missed_count,
        "metrics": [metric_to_json(m) for m in metrics],
        "distribution": {
            "coarse": {k: {"units": v, "pct": dist.coarse_pct[k]}
                       for k, v in sorted(dist.coarse.items())},
            "fine": {k: {"count": v, "pct": dist.fine_pct[k]}
                     for k, v in sorted(dist.fine.items())},
            "stringConcatConstPrefixOrSuffix": dist.string_concat_const,
            "totalEdges": dist.total_edges,
            "unresolvedPct": dist.unresolved_pct,
        },
    }
