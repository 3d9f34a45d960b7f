import json
import random

import pytest

from ioreach.callgraph import Algorithm, build_call_graph, find_entry_points
from ioreach.dyntrace import DynResult
from ioreach.model import CallKind, MethodRef, Origin
from ioreach.natives import CategoryDb, NativeCategory
from ioreach.reach import MethodReach, ReachabilityResult, StaticSummary
from ioreach.report import (
    DEFAULT_ALLOWLIST,
    LintCriterion,
    SizeMetric,
    lint_corpus,
    load_allowlist,
    project_distribution,
    size_histogram,
    top_natives,
    write_distribution,
    write_lint,
    write_size_histogram,
    write_summary,
    write_top_natives,
)

from support.corpora import clazz, method


MAIN_DESC = "([Ljava/lang/String;)V"
EMPTY_DB = CategoryDb(entries={})


def main_method(owner="app/Main", calls=(), **kwargs):
    return method(owner, "main", MAIN_DESC, flags=("public", "static"), calls=calls, **kwargs)


class TestLintCorpus:
    def test_clean_corpus_with_main(self):
        corpus = [clazz("app/Main", main_method())]
        graph = build_call_graph(corpus, find_entry_points(corpus))
        assert lint_corpus(corpus, graph, EMPTY_DB) == []

    def test_e4_custom_native(self):
        corpus = [
            clazz("app/Main", main_method(),
                  method("app/Main", "jni", "()J", flags=("private", "static", "native"))),
        ]
        graph = build_call_graph(corpus, find_entry_points(corpus))
        findings = lint_corpus(corpus, graph, EMPTY_DB)
        assert [f.criterion for f in findings] == [LintCriterion.E4_CUSTOM_NATIVE]
        assert findings[0].subject == "app/Main.jni()J"

    def test_runtime_native_not_e4(self):
        corpus = [
            clazz("app/Main", main_method()),
            clazz("java/lang/System",
                  method("java/lang/System", "nanoTime", "()J",
                         flags=("public", "static", "native"), origin=Origin.RUNTIME),
                  origin=Origin.RUNTIME),
        ]
        graph = build_call_graph(corpus, find_entry_points(corpus))
        assert lint_corpus(corpus, graph, EMPTY_DB) == []

    def test_e3_unresolved_reference(self):
        corpus = [clazz("app/Main", main_method(calls=((CallKind.STATIC, "missing/Gone", "f", "()V"),)),
                        referenced=("missing/Gone",))]
        graph = build_call_graph(corpus, find_entry_points(corpus))
        findings = lint_corpus(corpus, graph, EMPTY_DB)
        assert [f.criterion for f in findings] == [LintCriterion.E3_UNRESOLVED]
        assert findings[0].subject == "missing/Gone"

    def test_e3_requires_graph(self):
        corpus = [clazz("app/Main", main_method(calls=((CallKind.STATIC, "missing/Gone", "f", "()V"),)))]
        assert lint_corpus(corpus, None, EMPTY_DB) == []

    def test_e5_foreign_jdk_module(self):
        corpus = [clazz("app/Main", main_method(),
                        referenced=("jdk/incubator/vector/IntVector", "java/lang/Object"))]
        findings = lint_corpus(corpus, None, EMPTY_DB)
        assert [f.criterion for f in findings] == [LintCriterion.E5_FOREIGN_MODULE]
        assert findings[0].subject == "jdk/incubator/vector/IntVector"

    def test_e5_respects_allowlist(self):
        corpus = [clazz("app/Main", main_method(), referenced=("jdk/incubator/vector/IntVector",))]
        widened = DEFAULT_ALLOWLIST + ("jdk.incubator",)
        assert lint_corpus(corpus, None, EMPTY_DB, allowlist=widened) == []

    def test_unresolved_jdk_reference_is_e5_not_e3(self):
        call = (CallKind.STATIC, "jdk/incubator/vector/IntVector", "zero", "()V")
        corpus = [clazz("app/Main", main_method(calls=(call,)),
                        referenced=("jdk/incubator/vector/IntVector",))]
        graph = build_call_graph(corpus, find_entry_points(corpus))
        criteria = [f.criterion for f in lint_corpus(corpus, graph, EMPTY_DB)]
        assert criteria == [LintCriterion.E5_FOREIGN_MODULE]

    def test_i6_no_entry_point(self):
        corpus = [clazz("app/Lib", method("app/Lib", "util"))]
        findings = lint_corpus(corpus, None, EMPTY_DB)
        assert [f.criterion for f in findings] == [LintCriterion.I6_NO_ENTRY_POINT]

    def test_allowlist_loader(self):
        lines = ["# runtime packages\n", "java\n", "jdk/internal\n", "\n"]
        assert load_allowlist(lines) == ("java", "jdk.internal")


def summary(project_id, pct_io):
    reachable = 0 if pct_io is None else 10
    return StaticSummary(
        total_source_methods=20,
        reachable_count=reachable,
        reachable_pct=None if pct_io is None else 50.0,
        pct_calls_native=pct_io,
        pct_calls_io=pct_io,
        category_pct=None,
        project_id=project_id,
    )


class TestProjectDistribution:
    def test_two_projects_two_bins(self):
        report = project_distribution([summary("p1", 10.0), summary("p2", 90.0)])
        assert report.rows == (("p1", 10.0), ("p2", 90.0))
        assert report.bins == {10.0: 1, 90.0: 1}

    def test_zero_reachable_project_absent_from_bins(self):
        report = project_distribution([summary("p1", None)])
        assert report.rows == (("p1", None),)
        assert report.bins == {}

    def test_engineered_bins(self):
        pcts = [0.0, 4.9, 5.0, 12.5, 99.9]
        report = project_distribution([summary(f"p{i}", p) for i, p in enumerate(pcts)])
        assert report.bins == {0.0: 2, 5.0: 1, 10.0: 1, 95.0: 1}
        assert sum(report.bins.values()) == 5

    def test_custom_bin_width(self):
        report = project_distribution([summary("p", 12.0)], bin_width=10.0)
        assert report.bins == {10.0: 1}


def reach_result(entries):
    per_method = {
        ref: MethodReach(reachable=True, native_set=frozenset({MethodRef("jre/X", "n", "()V")}) if io else frozenset(),
                         mask=frozenset({NativeCategory.FILES}) if io else frozenset())
        for ref, io in entries.items()
    }
    return ReachabilityResult(per_method=per_method)


class TestSizeHistogram:
    def _corpus(self, sizes):
        methods = [
            method("app/K", name, units=size, size=size * 3)
            for name, size in sizes.items()
        ]
        return [clazz("app/K", *methods)]

    def test_all_sizes_zero(self):
        corpus = self._corpus({"a": 0, "b": 0})
        result = reach_result({MethodRef("app/K", "a", "()V"): False,
                               MethodRef("app/K", "b", "()V"): False})
        hist = size_histogram(result, corpus, SizeMetric.STATEMENT_UNITS, threshold=5)
        assert hist.bins == {0: (0, 2)}
        assert hist.threshold_population == 0
        assert hist.threshold_io_pct is None

    def test_threshold_example(self):
        corpus = self._corpus({"a": 2, "b": 7, "c": 9})
        result = reach_result({MethodRef("app/K", "a", "()V"): False,
                               MethodRef("app/K", "b", "()V"): True,
                               MethodRef("app/K", "c", "()V"): True})
        hist = size_histogram(result, corpus, SizeMetric.STATEMENT_UNITS, threshold=5)
        assert hist.threshold_population == 2
        assert hist.threshold_io_pct == 100.0
        assert hist.bins == {2: (0, 1), 7: (1, 0), 9: (1, 0)}

    def test_mass_conservation(self):
        rng = random.Random(3)
        sizes = {f"m{i}": rng.randint(0, 12) for i in range(40)}
        corpus = self._corpus(sizes)
        flags = {MethodRef("app/K", name, "()V"): rng.random() < 0.5 for name in sizes}
        result = reach_result(flags)
        hist = size_histogram(result, corpus, SizeMetric.STATEMENT_UNITS, threshold=5)
        assert sum(io + non for io, non in hist.bins.values()) == len(sizes)
        # independent recount
        expected_io_over = sum(1 for name, io in
                               ((n, flags[MethodRef("app/K", n, "()V")]) for n in sizes)
                               if sizes[name] >= 5 and io)
        assert hist.threshold_io_count == expected_io_over

    def test_bytecode_bytes_metric_for_dynamic_results(self):
        corpus = self._corpus({"a": 4})  # code size 12
        ref = MethodRef("app/K", "a", "()V")
        result = DynResult(executed=frozenset({ref}), masks={}, native_sets={})
        hist = size_histogram(result, corpus, SizeMetric.BYTECODE_BYTES, threshold=11)
        assert hist.bins == {12: (0, 1)}
        assert hist.threshold_population == 1

    def test_methods_without_model_skipped(self):
        corpus = self._corpus({"a": 1})
        ghost = MethodRef("gone/G", "g", "()V")
        result = reach_result({MethodRef("app/K", "a", "()V"): False, ghost: True})
        hist = size_histogram(result, corpus, SizeMetric.STATEMENT_UNITS, threshold=1)
        assert sum(io + non for io, non in hist.bins.values()) == 1


def _static_result(native_callers):
    per_method = {}
    for caller, natives in native_callers.items():
        per_method[caller] = MethodReach(
            reachable=True,
            native_set=frozenset(natives),
            mask=frozenset(),
        )
    return ReachabilityResult(per_method=per_method)


class TestTopNatives:
    N1 = MethodRef("jre/A", "one", "()V")
    N2 = MethodRef("jre/B", "two", "()V")
    DB = CategoryDb(entries={N1: NativeCategory.FILES, N2: NativeCategory.FILES})

    def _callers(self, n1_count, n2_count):
        callers = {}
        for i in range(n1_count):
            callers[MethodRef("app/K", f"a{i}", "()V")] = {self.N1}
        for i in range(n2_count):
            callers.setdefault(MethodRef("app/K", f"b{i}", "()V"), set()).add(self.N2)
        return callers

    def test_top_one(self):
        ranking = top_natives(_static_result(self._callers(3, 1)), self.DB, k=1)
        assert [t.ref for t in ranking[NativeCategory.FILES]] == [self.N1]
        assert ranking[NativeCategory.FILES][0].callers == 3

    def test_tie_breaks_lexicographically(self):
        ranking = top_natives(_static_result(self._callers(2, 2)), self.DB, k=2)
        assert [t.ref for t in ranking[NativeCategory.FILES]] == [self.N1, self.N2]

    def test_stable_under_permutation(self):
        callers = self._callers(2, 2)
        forward = top_natives(_static_result(dict(callers)), self.DB, k=2)
        backward = top_natives(_static_result(dict(reversed(list(callers.items())))), self.DB, k=2)
        assert forward == backward

    def test_k_must_be_positive(self):
        with pytest.raises(ValueError):
            top_natives(_static_result({}), self.DB, k=0)

    def test_dynamic_results_count_executed_only(self):
        executed = MethodRef("app/K", "ran", "()V")
        ghost = MethodRef("app/K", "ghost", "()V")
        result = DynResult(
            executed=frozenset({executed}),
            masks={},
            native_sets={executed: frozenset({self.N1}), ghost: frozenset({self.N1})},
        )
        ranking = top_natives(result, self.DB, k=5)
        assert ranking[NativeCategory.FILES][0].callers == 1


class TestWriters:
    def test_fixed_names_and_valid_json(self, tmp_path):
        findings = lint_corpus([clazz("app/Lib", method("app/Lib", "m"))], None, EMPTY_DB)
        assert write_lint(findings, tmp_path).name == "lint.csv"
        assert write_lint(findings, tmp_path, "json").name == "lint.json"
        report = project_distribution([summary("p", 42.0)])
        assert write_distribution(report, tmp_path).name == "distribution.csv"
        payload = json.loads(write_distribution(report, tmp_path, "json").read_text())
        assert payload["projects"][0]["pct_calls_io"] == 42.0
        hist = size_histogram(reach_result({}), [], SizeMetric.STATEMENT_UNITS, 5)
        assert write_size_histogram(hist, tmp_path).name == "size_hist.csv"
        ranking = top_natives(_static_result({}), EMPTY_DB, k=3)
        assert write_top_natives(ranking, tmp_path).name == "top_natives.csv"
        assert write_summary({"mode": "static"}, tmp_path).name == "summary.json"

    def test_csv_headers(self, tmp_path):
        findings = []
        path = write_lint(findings, tmp_path)
        assert path.read_text().splitlines()[0] == "criterion,subject,detail"
