"""Static and dynamic analysis of I/O native-method reachability in JVM bytecode."""

from .callgraph import (
    Algorithm,
    CallGraph,
    EntryPoint,
    EntryPointKind,
    UnresolvedTarget,
    build_call_graph,
    dump_graph,
    find_entry_points,
    is_source_method,
)
from .classfile import ScanError, ScanResult, parse_class, scan_container
from .dyntrace import (
    DynResult,
    DynSummary,
    EntryEvent,
    NativeCallEvent,
    attribute,
    merge_results,
    parse_trace,
    summarize_dynamic,
)
from .errors import (
    BadRecord,
    BadTraceLine,
    InvalidDescriptor,
    IoFailure,
    IoreachError,
    MalformedClassFile,
    NoEntryPoints,
    UncataloguedNative,
    UnsupportedVersion,
)
from .model import CallKind, CallSite, ClassModel, MethodModel, MethodRef, Origin
from .natives import (
    AnalysisMode,
    CategoryDb,
    NativeCategory,
    diff_natives,
    extract_natives,
    is_io,
    load_category_db,
    save_category_db,
)
from .reach import (
    MethodReach,
    ReachabilityResult,
    StaticSummary,
    natives_reachable,
    reachable_methods,
    summarize_static,
)
from .report import (
    DistributionReport,
    LintCriterion,
    LintFinding,
    SizeHistogram,
    SizeMetric,
    lint_corpus,
    project_distribution,
    size_histogram,
    top_natives,
)

__version__ = "0.1.0"
