"""Command-line front end.

Subcommands: ``scan-natives``, ``lint``, ``graph``, ``analyze``,
``trace-analyze``. Exit codes: 0 success, 1 analysis error, 2 usage error.
Diagnostics go to stderr; data goes to report files or stdout only.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import click

from .callgraph import Algorithm, build_call_graph, dump_graph, find_entry_points
from .classfile import scan_container
from .dyntrace import attribute, merge_results, parse_trace, summarize_dynamic
from .dyntrace import export_records as export_dynamic_records
from .errors import IoreachError
from .model import ClassModel, Origin
from .natives import AnalysisMode, CategoryDb, diff_natives, extract_natives, load_category_db
from .reach import export_records, natives_reachable, summarize_static
from .report import (
    DEFAULT_ALLOWLIST,
    SizeMetric,
    dynamic_summary_payload,
    lint_corpus,
    load_allowlist,
    project_distribution,
    size_histogram,
    size_threshold_payload,
    static_summary_payload,
    top_natives,
    write_distribution,
    write_lint,
    write_method_records,
    write_size_histogram,
    write_summary,
    write_top_natives,
)

VENDORED_DB = "data/jre17_natives.tsv"
TOP_K = 10


@dataclass
class RunConfig:
    """One analysis run: inputs, knobs, and output location."""

    projects: tuple[str, ...] = ()
    deps: tuple[str, ...] = ()
    runtimes: tuple[str, ...] = ()
    db_path: str | None = None
    algorithm: Algorithm = Algorithm.CHA
    mode: AnalysisMode = AnalysisMode.STATIC
    trace_paths: tuple[str, ...] = ()
    output_dir: str | None = None
    allowlist_path: str | None = None
    size_threshold: int = 5
    bin_width: float = 5.0
    fmt: str = "csv"

    def __post_init__(self):
        if self.mode is AnalysisMode.DYNAMIC and not self.trace_paths:
            raise ValueError("dynamic analysis requires at least one trace file")


def _load_corpus(config: RunConfig) -> list[ClassModel]:
    corpus: list[ClassModel] = []
    for paths, origin in (
        (config.projects, Origin.PROJECT),
        (config.deps, Origin.DEPENDENCY),
        (config.runtimes, Origin.RUNTIME),
    ):
        for path in paths:
            result = scan_container(path, origin)
            for error in result.errors:
                click.echo(f"warning: {path}: {error.entry}: {error.message}", err=True)
            corpus.extend(result.classes)
    return corpus


def _load_db(config: RunConfig) -> CategoryDb:
    if config.db_path is not None:
        with open(config.db_path, encoding="utf-8") as handle:
            return load_category_db(handle)
    record = resources.files("ioreach").joinpath(VENDORED_DB)
    with record.open(encoding="utf-8") as handle:
        return load_category_db(handle)


def _load_allowlist(config: RunConfig) -> tuple[str, ...]:
    if config.allowlist_path is None:
        return DEFAULT_ALLOWLIST
    with open(config.allowlist_path, encoding="utf-8") as handle:
        return load_allowlist(handle)


def _project_id(config: RunConfig) -> str:
    if not config.projects:
        return "corpus"
    return Path(config.projects[0]).stem


def run(config: RunConfig) -> int:
    """Execute the static or dynamic pipeline, writing the report set."""
    outdir = Path(config.output_dir) if config.output_dir else None
    if outdir is not None:
        outdir.mkdir(parents=True, exist_ok=True)
    corpus = _load_corpus(config)
    db = _load_db(config)

    if config.mode is AnalysisMode.STATIC:
        entries = find_entry_points(corpus)
        graph = build_call_graph(corpus, entries, config.algorithm) if entries else None
        findings = lint_corpus(corpus, graph, db, _load_allowlist(config))
        if outdir is not None:
            write_lint(findings, outdir, config.fmt)
        if graph is None:
            click.echo("error: corpus has no entry points (criterion I6)", err=True)
            return 1
        result = natives_reachable(graph, db)
        summary = summarize_static(result, corpus, project_id=_project_id(config))
        hist = size_histogram(result, corpus, SizeMetric.STATEMENT_UNITS, config.size_threshold)
        payload = static_summary_payload(summary)
        payload["algorithm"] = config.algorithm.value
        payload["size_threshold"] = size_threshold_payload(hist)
        payload["lint_findings"] = len(findings)
        if outdir is not None:
            write_summary(payload, outdir)
            write_method_records(export_records(result, corpus), outdir)
            write_distribution(project_distribution([summary], config.bin_width), outdir, config.fmt)
            write_size_histogram(hist, outdir, config.fmt)
            write_top_natives(top_natives(result, db, TOP_K), outdir, config.fmt)
        return 0

    origins = {m.ref: m.origin for cls in corpus for m in cls.methods}
    flags = {m.ref: m.flags for cls in corpus for m in cls.methods}
    results = []
    for trace_path in config.trace_paths:
        with open(trace_path, encoding="utf-8") as handle:
            results.append(attribute(parse_trace(handle), db, origins, flags))
    merged = merge_results(results)
    for ref in merged.unknown_methods:
        click.echo(f"warning: trace frame not in corpus metadata: {ref}", err=True)
    summary = summarize_dynamic(merged)
    hist = size_histogram(merged, corpus, SizeMetric.BYTECODE_BYTES, config.size_threshold)
    payload = dynamic_summary_payload(summary)
    payload["size_threshold"] = size_threshold_payload(hist)
    if outdir is not None:
        write_summary(payload, outdir)
        write_method_records(export_dynamic_records(merged), outdir)
        write_size_histogram(hist, outdir, config.fmt)
        write_top_natives(top_natives(merged, db, TOP_K), outdir, config.fmt)
    return 0


def _container_options(command):
    for decorator in (
        click.option("--runtime", "runtimes", multiple=True, type=click.Path(exists=True),
                     help="Runtime (JRE) class container; repeatable."),
        click.option("--dep", "deps", multiple=True, type=click.Path(exists=True),
                     help="Dependency class container; repeatable."),
        click.option("--project", "projects", multiple=True, type=click.Path(exists=True),
                     help="Project class container; repeatable."),
    ):
        command = decorator(command)
    return command


_DB_OPTION = click.option("--db", "db_path", type=click.Path(exists=True),
                          help="Category database TSV (defaults to the vendored JDK 17 set).")
_ALGO_OPTION = click.option("--algo", "algorithm", type=click.Choice(["cha", "rta"]),
                            default="cha", show_default=True, help="Call-graph algorithm.")
_FORMAT_OPTION = click.option("--format", "fmt", type=click.Choice(["csv", "json"]),
                              default="csv", show_default=True, help="Report file format.")
_ALLOWLIST_OPTION = click.option("--modules-allowlist", "allowlist_path",
                                 type=click.Path(exists=True),
                                 help="Runtime package-prefix allowlist file.")


@click.group()
def main():
    """Analyze which JVM methods can or do reach I/O-performing natives."""


@main.command("scan-natives")
@_container_options
@_DB_OPTION
def scan_natives_command(projects, deps, runtimes, db_path):
    """Extract native methods and diff them against the category database."""
    config = RunConfig(projects=projects, deps=deps, runtimes=runtimes, db_path=db_path)
    try:
        corpus = _load_corpus(config)
        db = _load_db(config)
        diff = diff_natives(extract_natives(corpus), db)
    except IoreachError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    for ref in diff.uncatalogued:
        click.echo(f"uncatalogued\t{ref}")
    for ref in diff.stale:
        click.echo(f"stale\t{ref}")
    click.echo(
        f"natives: {len(extract_natives(corpus))} scanned, "
        f"{len(diff.uncatalogued)} uncatalogued, {len(diff.stale)} stale",
        err=True,
    )


@main.command("lint")
@_container_options
@_DB_OPTION
@_ALGO_OPTION
@_ALLOWLIST_OPTION
@_FORMAT_OPTION
@click.option("--out", "output_dir", type=click.Path(), help="Write lint report here instead of stdout.")
def lint_command(projects, deps, runtimes, db_path, algorithm, allowlist_path, fmt, output_dir):
    """Run the corpus hygiene checks (E3, E4, E5, I6)."""
    config = RunConfig(projects=projects, deps=deps, runtimes=runtimes, db_path=db_path,
                       algorithm=Algorithm(algorithm), allowlist_path=allowlist_path, fmt=fmt)
    try:
        corpus = _load_corpus(config)
        db = _load_db(config)
        entries = find_entry_points(corpus)
        graph = build_call_graph(corpus, entries, config.algorithm) if entries else None
        findings = lint_corpus(corpus, graph, db, _load_allowlist(config))
    except IoreachError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    if output_dir:
        outdir = Path(output_dir)
        outdir.mkdir(parents=True, exist_ok=True)
        write_lint(findings, outdir, fmt)
    else:
        click.echo("criterion,subject,detail")
        for finding in findings:
            click.echo(f"{finding.criterion.value},{finding.subject},{finding.detail}")


@main.command("graph")
@_container_options
@_DB_OPTION
@_ALGO_OPTION
def graph_command(projects, deps, runtimes, db_path, algorithm):
    """Build the call graph and dump its edges and entries to stdout."""
    config = RunConfig(projects=projects, deps=deps, runtimes=runtimes, db_path=db_path,
                       algorithm=Algorithm(algorithm))
    try:
        corpus = _load_corpus(config)
        entries = find_entry_points(corpus)
        if not entries:
            click.echo("error: corpus has no entry points (criterion I6)", err=True)
            sys.exit(1)
        graph = build_call_graph(corpus, entries, config.algorithm)
    except IoreachError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    for line in dump_graph(graph):
        click.echo(line)
    for record in graph.unresolved:
        click.echo(f"warning: unresolved {record.kind.value} call to {record.target}", err=True)


@main.command("analyze")
@_container_options
@_DB_OPTION
@_ALGO_OPTION
@_ALLOWLIST_OPTION
@_FORMAT_OPTION
@click.option("--out", "output_dir", type=click.Path(), required=True, help="Report directory.")
@click.option("--size-threshold", default=5, show_default=True,
              help="Minimum statement-unit size for the threshold statistic.")
@click.option("--bin-width", default=5.0, show_default=True,
              help="Bin width for the per-project distribution.")
def analyze_command(projects, deps, runtimes, db_path, algorithm, allowlist_path, fmt,
                    output_dir, size_threshold, bin_width):
    """Static pipeline: scan, graph, attribute natives, write reports."""
    config = RunConfig(
        projects=projects, deps=deps, runtimes=runtimes, db_path=db_path,
        algorithm=Algorithm(algorithm), mode=AnalysisMode.STATIC,
        output_dir=output_dir, allowlist_path=allowlist_path,
        size_threshold=size_threshold, bin_width=bin_width, fmt=fmt,
    )
    try:
        sys.exit(run(config))
    except IoreachError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


@main.command("trace-analyze")
@_container_options
@_DB_OPTION
@_FORMAT_OPTION
@click.option("--trace", "trace_paths", multiple=True, required=True,
              type=click.Path(exists=True), help="Execution trace file; repeatable.")
@click.option("--out", "output_dir", type=click.Path(), required=True, help="Report directory.")
@click.option("--size-threshold", default=11, show_default=True,
              help="Minimum bytecode-byte size for the threshold statistic.")
def trace_analyze_command(projects, deps, runtimes, db_path, fmt, trace_paths,
                          output_dir, size_threshold):
    """Dynamic pipeline: attribute recorded traces, write reports."""
    config = RunConfig(
        projects=projects, deps=deps, runtimes=runtimes, db_path=db_path,
        mode=AnalysisMode.DYNAMIC, trace_paths=trace_paths, output_dir=output_dir,
        size_threshold=size_threshold, fmt=fmt,
    )
    try:
        sys.exit(run(config))
    except IoreachError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
