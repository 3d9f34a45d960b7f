"""Corpus lint and derived report tables.

All outputs are plain data (CSV or JSON); rendering is left to standard
plotting tools. Writers produce fixed file names inside a caller-supplied
output directory and are fully deterministic.
"""

from __future__ import annotations

import csv
import enum
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Mapping, Sequence

from .callgraph import CallGraph, CorpusIndex, find_entry_points
from .dyntrace import DynResult, DynSummary
from .model import DYNAMIC_CLASS, ClassModel, MethodRef, Origin
from .natives import CategoryDb, NativeCategory, extract_natives
from .reach import ReachabilityResult, StaticSummary

# Namespace roots reserved for the JDK; references into these that the
# runtime corpus cannot satisfy are runtime-module problems, not missing
# application dependencies.
JDK_NAMESPACE_ROOTS = (
    "java", "javax", "jdk", "sun", "com.sun", "org.w3c", "org.xml", "org.ietf", "javafx",
)

# Package prefixes covered by the default custom runtime image: the Java SE
# ``java.*`` module family (which also owns javax, jdk.internal, sun and
# com.sun internals) plus the XML/W3C exports.
DEFAULT_ALLOWLIST = (
    "java", "javax", "jdk.internal", "sun", "com.sun", "org.w3c", "org.xml", "org.ietf",
)


def load_allowlist(stream: IO[str] | Iterable[str]) -> tuple[str, ...]:
    """One package prefix per line; ``#`` comments; slashes tolerated."""
    prefixes = []
    for raw in stream:
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        prefixes.append(line.replace("/", "."))
    return tuple(prefixes)


def _has_prefix(dotted: str, prefix: str) -> bool:
    return dotted == prefix or dotted.startswith(prefix + ".")


def _is_jdk_namespace(dotted: str) -> bool:
    return any(_has_prefix(dotted, root) for root in JDK_NAMESPACE_ROOTS)


class LintCriterion(enum.Enum):
    E3_UNRESOLVED = "E3"
    E4_CUSTOM_NATIVE = "E4"
    E5_FOREIGN_MODULE = "E5"
    I6_NO_ENTRY_POINT = "I6"


@dataclass(frozen=True)
class LintFinding:
    criterion: LintCriterion
    subject: str
    detail: str


def lint_corpus(
    corpus: Sequence[ClassModel],
    graph: CallGraph | None,
    db: CategoryDb,
    allowlist: Sequence[str] = DEFAULT_ALLOWLIST,
) -> list[LintFinding]:
    """Dataset hygiene checks; an empty result means the corpus is clean.

    E3: classes referenced by reachable call sites but absent from the
    corpus (JDK-namespace references are reported under E5 instead).
    E4: native methods declared by project or dependency classes that the
    category database does not know.
    E5: references into JDK namespaces not covered by the runtime
    allowlist.
    I6: no entry point anywhere in the project classes.
    """
    findings: list[LintFinding] = []
    corpus_names = {cls.name for cls in corpus}

    if graph is not None:
        missing_classes: dict[str, MethodRef] = {}
        for record in graph.unresolved:
            dotted = record.target.class_name.replace("/", ".")
            if _is_jdk_namespace(dotted):
                continue
            missing_classes.setdefault(record.target.class_name, record.target)
        for class_name in sorted(missing_classes):
            findings.append(
                LintFinding(
                    LintCriterion.E3_UNRESOLVED,
                    class_name,
                    f"unresolved reference to {missing_classes[class_name]}",
                )
            )

    db_keys = set(db.entries)
    origin_of = {m.ref: m.origin for cls in corpus for m in cls.methods}
    for ref in extract_natives(corpus):
        if origin_of[ref] is not Origin.RUNTIME and ref not in db_keys:
            findings.append(
                LintFinding(
                    LintCriterion.E4_CUSTOM_NATIVE,
                    str(ref),
                    "custom native method outside the categorized runtime",
                )
            )

    foreign: set[str] = set()
    for cls in corpus:
        if cls.origin is Origin.RUNTIME:
            continue
        for referenced in cls.referenced_classes:
            if referenced in corpus_names:
                continue
            dotted = referenced.replace("/", ".")
            if _is_jdk_namespace(dotted) and not any(_has_prefix(dotted, p) for p in allowlist):
                foreign.add(referenced)
    for class_name in sorted(foreign):
        findings.append(
            LintFinding(
                LintCriterion.E5_FOREIGN_MODULE,
                class_name,
                "reference into a JDK module outside the runtime allowlist",
            )
        )

    if not find_entry_points(corpus):
        findings.append(
            LintFinding(
                LintCriterion.I6_NO_ENTRY_POINT,
                "corpus",
                "no main method or JUnit 3/4/5 test method in project classes",
            )
        )
    return sorted(findings, key=lambda f: (f.criterion.value, f.subject))


@dataclass(frozen=True)
class DistributionReport:
    """Per-project I/O-caller percentages plus binned counts for plotting."""

    rows: tuple[tuple[str, float | None], ...]
    bins: Mapping[float, int]
    bin_width: float


def project_distribution(
    summaries: Sequence[StaticSummary], bin_width: float = 5.0
) -> DistributionReport:
    """One row per project; projects without reachable methods carry an
    absent percentage and contribute to no bin."""
    rows = []
    bins: dict[float, int] = {}
    for i, summary in enumerate(summaries):
        project_id = summary.project_id if summary.project_id is not None else f"project-{i}"
        pct = summary.pct_calls_io
        rows.append((project_id, pct))
        if pct is not None:
            lower = math.floor(pct / bin_width) * bin_width
            bins[lower] = bins.get(lower, 0) + 1
    return DistributionReport(rows=tuple(rows), bins=bins, bin_width=bin_width)


class SizeMetric(enum.Enum):
    STATEMENT_UNITS = "statement-units"
    BYTECODE_BYTES = "bytecode-bytes"


@dataclass(frozen=True)
class SizeHistogram:
    """I/O vs non-I/O method counts per size value, plus a threshold cut."""

    metric: SizeMetric
    bins: Mapping[int, tuple[int, int]]  # size -> (io_count, non_io_count)
    threshold: int
    threshold_population: int
    threshold_io_count: int

    @property
    def threshold_io_pct(self) -> float | None:
        if self.threshold_population == 0:
            return None
        return 100.0 * self.threshold_io_count / self.threshold_population


def size_histogram(
    result: ReachabilityResult | DynResult,
    corpus: Sequence[ClassModel],
    metric: SizeMetric,
    threshold: int,
) -> SizeHistogram:
    """Histogram over the analyzed (reachable source) or executed methods.

    Methods without a corpus model have no defined size and are skipped.
    The threshold statistic covers methods of size >= threshold.
    """
    index = CorpusIndex(corpus)
    if isinstance(result, ReachabilityResult):
        population = [(ref, r.calls_io) for ref, r in result.per_method.items()]
    else:
        population = [(ref, result.calls_io(ref)) for ref in result.executed]

    bins: dict[int, list[int]] = {}
    over = io_over = 0
    for ref, calls_io in population:
        model = index.methods.get(ref)
        if model is None:
            continue
        size = model.statement_units if metric is SizeMetric.STATEMENT_UNITS else model.code_size_bytes
        slot = bins.setdefault(size, [0, 0])
        slot[0 if calls_io else 1] += 1
        if size >= threshold:
            over += 1
            io_over += calls_io
    return SizeHistogram(
        metric=metric,
        bins={size: (io, non_io) for size, (io, non_io) in bins.items()},
        threshold=threshold,
        threshold_population=over,
        threshold_io_count=io_over,
    )


@dataclass(frozen=True)
class TopNative:
    ref: MethodRef
    callers: int


def top_natives(
    result: ReachabilityResult | DynResult, db: CategoryDb, k: int
) -> dict[NativeCategory, list[TopNative]]:
    """Top-k natives per category by distinct attributed caller count.

    Ties break lexicographically by method reference, so the ranking is
    stable under input permutation.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    callers: dict[MethodRef, set[MethodRef]] = {}
    if isinstance(result, ReachabilityResult):
        for ref, r in result.per_method.items():
            for native in r.native_set:
                callers.setdefault(native, set()).add(ref)
    else:
        for ref in result.executed:
            for native in result.native_sets.get(ref, frozenset()):
                callers.setdefault(native, set()).add(ref)

    ranking: dict[NativeCategory, list[TopNative]] = {category: [] for category in NativeCategory}
    for native, methods in callers.items():
        category = NativeCategory.INVOCATION if native.class_name == DYNAMIC_CLASS else db.entries[native]
        ranking[category].append(TopNative(native, len(methods)))
    for category in ranking:
        ranking[category].sort(key=lambda t: (-t.callers, t.ref))
        del ranking[category][k:]
    return ranking


# ---------------------------------------------------------------------------
# Writers: fixed file names, deterministic bytes.

def _fmt_pct(value: float | None) -> str:
    return "" if value is None else f"{value:.4f}"


def _write_csv(path: Path, header: list[str], rows: Iterable[list]) -> None:
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def write_lint(findings: Sequence[LintFinding], outdir: Path, fmt: str = "csv") -> Path:
    if fmt == "json":
        path = outdir / "lint.json"
        _write_json(path, [
            {"criterion": f.criterion.value, "subject": f.subject, "detail": f.detail}
            for f in findings
        ])
        return path
    path = outdir / "lint.csv"
    _write_csv(path, ["criterion", "subject", "detail"],
               ([f.criterion.value, f.subject, f.detail] for f in findings))
    return path


def write_distribution(report: DistributionReport, outdir: Path, fmt: str = "csv") -> Path:
    if fmt == "json":
        path = outdir / "distribution.json"
        _write_json(path, {
            "bin_width": report.bin_width,
            "projects": [{"project_id": p, "pct_calls_io": pct} for p, pct in report.rows],
            "bins": [{"lower": lower, "count": report.bins[lower]} for lower in sorted(report.bins)],
        })
        return path
    path = outdir / "distribution.csv"
    rows = [["project", project_id, _fmt_pct(pct), "", ""] for project_id, pct in report.rows]
    rows += [["bin", "", "", _fmt_pct(lower), str(report.bins[lower])] for lower in sorted(report.bins)]
    _write_csv(path, ["row", "project_id", "pct_calls_io", "bin_lower", "count"], rows)
    return path


def write_size_histogram(hist: SizeHistogram, outdir: Path, fmt: str = "csv") -> Path:
    if fmt == "json":
        path = outdir / "size_hist.json"
        _write_json(path, {
            "metric": hist.metric.value,
            "bins": [
                {"size": size, "io_count": hist.bins[size][0], "non_io_count": hist.bins[size][1]}
                for size in sorted(hist.bins)
            ],
            "threshold": size_threshold_payload(hist),
        })
        return path
    path = outdir / "size_hist.csv"
    _write_csv(path, ["size", "io_count", "non_io_count"],
               ([size, hist.bins[size][0], hist.bins[size][1]] for size in sorted(hist.bins)))
    return path


def write_top_natives(
    ranking: Mapping[NativeCategory, Sequence[TopNative]], outdir: Path, fmt: str = "csv"
) -> Path:
    if fmt == "json":
        path = outdir / "top_natives.json"
        _write_json(path, {
            category.value: [{"native": str(t.ref), "callers": t.callers} for t in ranking[category]]
            for category in NativeCategory
        })
        return path
    path = outdir / "top_natives.csv"
    rows = []
    for category in NativeCategory:
        for rank, top in enumerate(ranking.get(category, ()), start=1):
            rows.append([category.value, rank, str(top.ref), top.callers])
    _write_csv(path, ["category", "rank", "native", "callers"], rows)
    return path


def static_summary_payload(summary: StaticSummary) -> dict:
    return {
        "mode": "static",
        "project_id": summary.project_id,
        "total_source_methods": summary.total_source_methods,
        "reachable_count": summary.reachable_count,
        "reachable_pct": summary.reachable_pct,
        "pct_calls_native": summary.pct_calls_native,
        "pct_calls_io": summary.pct_calls_io,
        "category_pct": (
            None if summary.category_pct is None
            else {c.value: summary.category_pct[c] for c in NativeCategory}
        ),
    }


def dynamic_summary_payload(summary: DynSummary) -> dict:
    return {
        "mode": "dynamic",
        "executed_count": summary.executed_count,
        "pct_calls_native": summary.pct_calls_native,
        "pct_calls_io": summary.pct_calls_io,
        "category_pct": (
            None if summary.category_pct is None
            else {c.value: summary.category_pct[c] for c in NativeCategory}
        ),
    }


def size_threshold_payload(hist: SizeHistogram) -> dict:
    return {
        "metric": hist.metric.value,
        "threshold": hist.threshold,
        "population": hist.threshold_population,
        "io_count": hist.threshold_io_count,
        "pct_calls_io": hist.threshold_io_pct,
    }


def write_summary(payload: dict, outdir: Path) -> Path:
    path = outdir / "summary.json"
    _write_json(path, payload)
    return path


def write_method_records(lines: Sequence[str], outdir: Path) -> Path:
    path = outdir / "methods.tsv"
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    return path
