"""Command-line pipeline: parse, execute, build static graphs, detect and
label missed call edges, and write all artifacts.

    cgrl run program.mjs-mini --variant optimistic --out results/

Every stage's output is a versioned JSON artifact; `--from-artifacts`
accepts previously written trace/graph files and skips the stages that
would regenerate them.  `--corpus` batches over a directory and adds an
aggregate report.  Exit codes: 0 success, 1 analysis error, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import serialize as S
from .acg import VARIANTS, build_call_graph
from .bindings import resolve_bindings
from .detector import analyze_missed_edges
from .errors import CgrlError
from .interp import DEFAULT_STEP_BUDGET, execute
from .labeler import (
    DYNAMIC_PROPERTY_ACCESS, classify_property_name, dynamic_access_locs,
    label_edge_flows,
)
from .metrics import aggregate, all_metrics
from .natives import NativeConfig
from .parser import parse_program

DEFAULT_OUTPUT_DIR = "cgrl-out"
OUTPUT_DIR_ENV = "CGRL_OUTPUT_DIR"


@dataclass
class AnalysisResult:
    unit: str
    variant: str
    bound: object
    trace: object
    dcg: object
    fg: object
    cg: object
    missed: list
    chains: dict
    flows: dict
    labels: dict
    fine: dict | None
    metrics: list
    distribution: object
    error: str | None
    report: dict = field(default_factory=dict)


def analyze(source: str, unit: str, *, variant: str = "optimistic",
            seed: int = 0, step_budget: int = DEFAULT_STEP_BUDGET,
            fine_grained: bool = False, natives: NativeConfig | None = None,
            artifacts: dict | None = None) -> AnalysisResult:
    """Run the full pipeline over one program.

    `artifacts` may supply pre-built stages keyed by artifact kind
    ("trace", "dcg", "flow-graph", "call-graph")."""
    artifacts = artifacts or {}
    natives = natives or NativeConfig.default()
    bound = resolve_bindings(parse_program(source, unit), natives)
    error = None
    if "trace" in artifacts and "dcg" in artifacts:
        trace = artifacts["trace"]
        dcg = artifacts["dcg"]
    else:
        result = execute(bound, natives, step_budget=step_budget, seed=seed)
        trace, dcg, error = result.trace, result.dcg, result.error
    if "flow-graph" in artifacts and "call-graph" in artifacts:
        fg = artifacts["flow-graph"]
        cg = artifacts["call-graph"]
    else:
        fg, cg = build_call_graph(bound, variant)
    missed, chains, flows = analyze_missed_edges(trace, dcg, fg, cg)
    labels = {m.key: label_edge_flows(flows[m.key], trace) for m in missed}
    fine = None
    if fine_grained:
        fine = {}
        for m in missed:
            if DYNAMIC_PROPERTY_ACCESS not in labels[m.key]:
                continue
            cats = [classify_property_name(loc, bound)
                    for loc in dynamic_access_locs(flows[m.key])]
            if cats:
                fine[m.key] = cats
    metrics = all_metrics(cg, dcg, bound)
    dist = aggregate(labels, flows, fine)
    report = S.report_to_json(unit, variant, metrics, dist, len(missed),
                              len(dcg.edges), error)
    return AnalysisResult(unit, variant, bound, trace, dcg, fg, cg, missed,
                          chains, flows, labels, fine, metrics, dist, error,
                          report)


def write_artifacts(result: AnalysisResult, outdir: Path) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "trace.jsonl").write_text(S.trace_to_jsonl(result.trace))
    (outdir / "dcg.json").write_text(S.dumps(S.dcg_to_json(result.dcg)))
    (outdir / "fg.json").write_text(S.dumps(S.fg_to_json(result.fg)))
    (outdir / "cg.json").write_text(S.dumps(S.cg_to_json(result.cg)))
    (outdir / "flows.json").write_text(S.dumps(S.flows_to_json(
        result.missed, result.chains, result.flows, result.labels,
        result.fine)))
    (outdir / "report.json").write_text(S.dumps(result.report))
    (outdir / "report.csv").write_text(_report_csv(result.report))
    (outdir / "summary.txt").write_text(_report_text(result.report))


def _report_csv(report: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["section", "name", "value"])
    for m in report["metrics"]:
        writer.writerow(["recall", m["metric"], f"{m['recall']:.6f}"])
        writer.writerow(["precision", m["metric"], f"{m['precision']:.6f}"])
    for label, v in report["distribution"]["coarse"].items():
        writer.writerow(["coarse", label, f"{v['pct']:.2f}"])
    for cat, v in report["distribution"]["fine"].items():
        writer.writerow(["fine", cat, f"{v['pct']:.2f}"])
    return buf.getvalue()


def _report_text(report: dict) -> str:
    lines = [f"program: {report['program']}",
             f"variant: {report['variant']}",
             f"dynamic edges: {report['dynamicEdges']}",
             f"missed edges: {report['missedEdges']}"]
    if report["executionError"]:
        lines.append(f"execution error: {report['executionError']}")
    for m in report["metrics"]:
        lines.append(f"{m['metric']}: recall {m['recall']:.3f}, "
                     f"precision {m['precision']:.3f}")
    coarse = report["distribution"]["coarse"]
    if coarse:
        lines.append("root causes (one unit per missed edge, split equally "
                     "among an edge's labels):")
        for label, v in coarse.items():
            lines.append(f"  {label}: {v['pct']:.1f}%")
    return "\n".join(lines) + "\n"


def load_artifacts(paths: str) -> dict:
    """Load comma-separated artifact files, keyed by their `kind` field."""
    loaded = {}
    for raw in paths.split(","):
        p = Path(raw.strip())
        text = p.read_text()
        if p.suffix == ".jsonl" or text.lstrip().startswith('{"'):
            first = json.loads(text.splitlines()[0])
        else:
            first = json.loads(text)
        kind = first.get("kind")
        if kind == "trace":
            loaded["trace"] = S.trace_from_jsonl(text)
        elif kind == "dcg":
            loaded["dcg"] = S.dcg_from_json(json.loads(text))
        elif kind == "flow-graph":
            loaded["flow-graph"] = S.fg_from_json(json.loads(text))
        elif kind == "call-graph":
            loaded["call-graph"] = S.cg_from_json(json.loads(text))
        else:
            raise ValueError(f"{p}: unrecognized artifact kind {kind!r}")
    return loaded


def _aggregate_reports(reports: list) -> dict:
    metric_sums: dict = {}
    coarse: dict = {}
    fine: dict = {}
    total_missed = 0
    total_dynamic = 0
    for rep in reports:
        total_missed += rep["missedEdges"]
        total_dynamic += rep["dynamicEdges"]
        for m in rep["metrics"]:
            sums = metric_sums.setdefault(m["metric"], [0.0, 0.0])
            sums[0] += m["recall"]
            sums[1] += m["precision"]
        for label, v in rep["distribution"]["coarse"].items():
            coarse[label] = coarse.get(label, 0.0) + v["units"]
        for cat, v in rep["distribution"]["fine"].items():
            fine[cat] = fine.get(cat, 0) + v["count"]
    n = len(reports)
    unit_total = sum(coarse.values())
    fine_total = sum(fine.values())
    return {
        "schemaVersion": S.SCHEMA_VERSION, "kind": "aggregate-report",
        "programs": n, "dynamicEdges": total_dynamic,
        "missedEdges": total_missed,
        "metrics": [{"metric": name, "meanRecall": s[0] / n,
                     "meanPrecision": s[1] / n}
                    for name, s in sorted(metric_sums.items())],
        "distribution": {
            "coarse": {k: {"units": v,
                           "pct": 100.0 * v / unit_total if unit_total
                           else 0.0}
                       for k, v in sorted(coarse.items())},
            "fine": {k: {"count": v,
                         "pct": 100.0 * v / fine_total if fine_total
                         else 0.0}
                     for k, v in sorted(fine.items())},
        },
    }


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cgrl",
        description="Dynamic-vs-static call graph analysis for MiniJS")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="analyze one program or a corpus")
    run.add_argument("program", nargs="?", help="MiniJS source file")
    run.add_argument("--variant", choices=VARIANTS, default="optimistic")
    run.add_argument("--out", default=None, help="output directory "
                     f"(default ${OUTPUT_DIR_ENV} or ./{DEFAULT_OUTPUT_DIR})")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--step-budget", type=int, default=DEFAULT_STEP_BUDGET)
    run.add_argument("--fine-grained", action="store_true",
                     help="classify dynamic property-name expressions")
    run.add_argument("--from-artifacts", default=None, metavar="FILES",
                     help="comma-separated artifact files replacing the "
                          "stages that would produce them")
    run.add_argument("--natives", default=None,
                     help="native-function configuration JSON")
    run.add_argument("--corpus", default=None, metavar="DIR",
                     help="analyze every *.mjs-mini file in DIR")
    return parser


def _output_dir(args) -> Path:
    if args.out:
        return Path(args.out)
    return Path(os.environ.get(OUTPUT_DIR_ENV, DEFAULT_OUTPUT_DIR))


def _run_one(path: Path, args, natives, artifacts, outroot: Path) -> dict:
    source = path.read_text()
    result = analyze(source, path.stem, variant=args.variant, seed=args.seed,
                     step_budget=args.step_budget,
                     fine_grained=args.fine_grained, natives=natives,
                     artifacts=artifacts)
    write_artifacts(result, outroot / path.stem)
    return result.report


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if (args.program is None) == (args.corpus is None):
        parser.print_usage(sys.stderr)
        print("cgrl run: exactly one of PROGRAM or --corpus is required",
              file=sys.stderr)
        return 2
    natives = NativeConfig.load(args.natives) if args.natives else None
    outroot = _output_dir(args)
    try:
        artifacts = load_artifacts(args.from_artifacts) \
            if args.from_artifacts else {}
        if args.corpus:
            programs = sorted(Path(args.corpus).glob("*.mjs-mini"))
            if not programs:
                print(f"cgrl run: no *.mjs-mini files in {args.corpus}",
                      file=sys.stderr)
                return 2
            reports = [_run_one(p, args, natives, artifacts, outroot)
                       for p in programs]
            outroot.mkdir(parents=True, exist_ok=True)
            (outroot / "aggregate.json").write_text(
                S.dumps(_aggregate_reports(reports)))
        else:
            _run_one(Path(args.program), args, natives, artifacts, outroot)
    except (CgrlError, OSError, ValueError) as ex:
        print(f"cgrl: {ex}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
