"""Recall/precision metrics and root-cause distributions.

Recall asks how much of the dynamically observed call graph the static
call graph covers; precision asks the converse.  Three metrics are
computed: per-call-site target sets (averaged per site), functions
reachable from the dynamic entrypoints, and call edges whose source
function appears in the dynamic call graph.  Empty denominators (for
instance, a program with no calls) are defined as 1.0 and flagged.

Root-cause distributions count one unit per attributed missed edge,
split equally among the edge's distinct labels so units are conserved.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from . import trace as T
from .acg import CallGraph
from .bindings import BoundProgram
from .detector import Unresolved
from .labeler import DYNAMIC_PROPERTY_ACCESS

METRICS = ("callSiteTargets", "reachableNodes", "reachableEdges")


@dataclass
class MetricResult:
    metric: str
    recall: float
    precision: float
    recall_numerator: float
    recall_denominator: float
    precision_numerator: float
    precision_denominator: float
    empty_recall: bool = False
    empty_precision: bool = False


def _ratio(numerator: float, denominator: float):
    if denominator == 0:
        return 1.0, True
    return numerator / denominator, False


def _static_site_caller(bound: BoundProgram, site) -> str:
    return bound.call_sites.get(site, T.TOPLEVEL)


def _dynamic_reachable(dcg: T.DynamicCallGraph) -> set:
    reach = set(dcg.entrypoints)
    queue = deque(reach)
    by_caller: dict = {}
    for edge in dcg.edges:
        by_caller.setdefault(edge.caller, set()).add(edge.callee)
    while queue:
        node = queue.popleft()
        for callee in by_caller.get(node, ()):
            if callee not in reach:
                reach.add(callee)
                queue.append(callee)
    return reach


def _static_reachable(cg: CallGraph, dcg: T.DynamicCallGraph,
                      bound: BoundProgram) -> set:
    reach = set(dcg.entrypoints)
    changed = True
    while changed:
        changed = False
        for site, callee in cg.edges:
            if _static_site_caller(bound, site) in reach \
                    and callee not in reach:
                reach.add(callee)
                changed = True
    return reach


def recall_precision(cg: CallGraph, dcg: T.DynamicCallGraph,
                     metric: str, bound: BoundProgram) -> MetricResult:
    if metric == "callSiteTargets":
        return _call_site_targets(cg, dcg)
    if metric == "reachableNodes":
        dyn = _dynamic_reachable(dcg)
        stat = _static_reachable(cg, dcg, bound)
        common = len(dyn & stat)
        recall, er = _ratio(common, len(dyn))
        precision, ep = _ratio(common, len(stat))
        return MetricResult(metric, recall, precision, common, len(dyn),
                            common, len(stat), er, ep)
    if metric == "reachableEdges":
        dyn_nodes = dcg.nodes()
        dyn_edges = dcg.edge_pairs()
        stat_edges = {(s, f) for (s, f) in cg.edges
                      if _static_site_caller(bound, s) in dyn_nodes}
        common = len(dyn_edges & stat_edges)
        recall, er = _ratio(common, len(dyn_edges))
        precision, ep = _ratio(common, len(stat_edges))
        return MetricResult(metric, recall, precision, common, len(dyn_edges),
                            common, len(stat_edges), er, ep)
    raise ValueError(f"unknown metric {metric!r}")


def _call_site_targets(cg: CallGraph, dcg: T.DynamicCallGraph) -> MetricResult:
    dyn_by_site: dict = {}
    for edge in dcg.edges:
        dyn_by_site.setdefault(edge.site, set()).add(edge.callee)
    stat_by_site: dict = {}
    for site, callee in cg.edges:
        stat_by_site.setdefault(site, set()).add(callee)
    recall_sum = 0.0
    for site, targets in dyn_by_site.items():
        found = targets & stat_by_site.get(site, set())
        recall_sum += len(found) / len(targets)
    precision_sum = 0.0
    for site, targets in stat_by_site.items():
        found = targets & dyn_by_site.get(site, set())
        precision_sum += len(found) / len(targets)
    recall, er = _ratio(recall_sum, len(dyn_by_site))
    precision, ep = _ratio(precision_sum, len(stat_by_site))
    return MetricResult("callSiteTargets", recall, precision, recall_sum,
                        len(dyn_by_site), precision_sum, len(stat_by_site),
                        er, ep)


def all_metrics(cg: CallGraph, dcg: T.DynamicCallGraph,
                bound: BoundProgram) -> list:
    return [recall_precision(cg, dcg, m, bound) for m in METRICS]


@dataclass
class RootCauseDistribution:
    # label -> units (one unit per edge, split equally among its labels)
    coarse: dict = field(default_factory=dict)
    coarse_pct: dict = field(default_factory=dict)
    # property-name category kind -> count among DynamicPropertyAccess edges
    fine: dict = field(default_factory=dict)
    fine_pct: dict = field(default_factory=dict)
    # StringConcat occurrences with a constant prefix or suffix
    string_concat_const: int = 0
    total_edges: int = 0
    unresolved_pct: float = 0.0


def aggregate(labels_by_edge: dict, flows_by_edge: dict,
              fine_by_edge: dict | None = None) -> RootCauseDistribution:
    """Combine per-edge labels into a distribution.

    `labels_by_edge` maps edge keys to distinct-label lists;
    `fine_by_edge` (optional) maps edge keys to PropertyNameCategory lists
    for edges labeled DynamicPropertyAccess.
    """
    dist = RootCauseDistribution(total_edges=len(labels_by_edge))
    for key, labels in labels_by_edge.items():
        if not labels:
            continue
        share = 1.0 / len(labels)
        for label in labels:
            dist.coarse[label] = dist.coarse.get(label, 0.0) + share
    total = sum(dist.coarse.values())
    for label, units in dist.coarse.items():
        dist.coarse_pct[label] = 100.0 * units / total if total else 0.0
    if fine_by_edge:
        for key, categories in fine_by_edge.items():
            if DYNAMIC_PROPERTY_ACCESS not in labels_by_edge.get(key, ()):
                continue
            for cat in categories:
                dist.fine[cat.kind] = dist.fine.get(cat.kind, 0) + 1
                if cat.kind == "StringConcat" and cat.const_prefix_or_suffix:
                    dist.string_concat_const += 1
        fine_total = sum(dist.fine.values())
        for kind, count in dist.fine.items():
            dist.fine_pct[kind] = 100.0 * count / fine_total if fine_total \
                else 0.0
    unresolved = sum(
        1 for flows in flows_by_edge.values()
        if any(isinstance(f, Unresolved) for f in flows))
    dist.unresolved_pct = 100.0 * unresolved / len(flows_by_edge) \
        if flows_by_edge else 0.0
    return dist
