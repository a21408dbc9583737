"""cgrl — why does the static call graph miss calls the program made?

The toolkit parses a small JS-like language (MiniJS), runs it while
recording a dynamic call graph and a flow trace of function values, builds
a field-based static flow graph and call graph, and then explains every
dynamically observed call edge the static analysis missed: it reconstructs
the runtime copy chain of the invoked function, locates the precise gap in
the flow graph, and labels the root cause.
"""

from .acg import CallGraph, FlowGraph, build_call_graph  # noqa: F401
from .cli import analyze, main  # noqa: F401
from .copies import CopyChain, DynamicCopy, find_dynamic_copies  # noqa: F401
from .detector import (  # noqa: F401
    DependentCall, MissedEdge, MissingFGNode, MissingFGPath, Unresolved,
    analyze_missed_edges, find_missing_flows, missed_edges,
    resolve_dependent_calls,
)
from .frontend import parse_and_bind, parse_program, resolve_bindings  # noqa: F401
from .interp import ExecutionResult, execute  # noqa: F401
from .labeler import classify_property_name, label_flow  # noqa: F401
from .metrics import aggregate, all_metrics, recall_precision  # noqa: F401
from .natives import NativeConfig  # noqa: F401
from .trace import DynamicCallGraph, FlowTrace, TraceEntry  # noqa: F401

__version__ = "0.1.0"
