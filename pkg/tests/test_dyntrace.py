import random

import pytest

from ioreach.dyntrace import (
    DynResult,
    EntryEvent,
    NativeCallEvent,
    attribute,
    export_records,
    merge_results,
    parse_trace,
    summarize_dynamic,
)
from ioreach.errors import BadTraceLine, UncataloguedNative
from ioreach.model import MethodRef, Origin
from ioreach.natives import CategoryDb, NativeCategory


def ref(owner, name, desc="()V"):
    return MethodRef(owner, name, desc)


MAIN = ref("app/Main", "main", "([Ljava/lang/String;)V")
WORK = ref("app/Main", "work")
NANO = ref("java/lang/System", "nanoTime", "()J")
READ = ref("java/io/FileInputStream", "read0", "()I")

DB = CategoryDb(entries={NANO: NativeCategory.TIME, READ: NativeCategory.FILES})

ORIGINS = {
    MAIN: Origin.PROJECT,
    WORK: Origin.PROJECT,
    NANO: Origin.RUNTIME,
    READ: Origin.RUNTIME,
}
FLAGS = {
    MAIN: frozenset({"public", "static"}),
    WORK: frozenset({"public"}),
    NANO: frozenset({"public", "static", "native"}),
    READ: frozenset({"private", "native"}),
}


class TestParseTrace:
    def test_entry_record(self):
        events = list(parse_trace(["E 1 com/x/A m ()V\n"]))
        assert events == [EntryEvent(1, ref("com/x/A", "m"))]

    def test_native_record_with_three_frames(self):
        text = [
            "N 1 3\n",
            "F java/lang/System nanoTime ()J\n",
            "F app/Main work ()V\n",
            "F app/Main main ([Ljava/lang/String;)V\n",
        ]
        (event,) = parse_trace(text)
        assert isinstance(event, NativeCallEvent)
        assert len(event.stack) == 3
        assert event.native == NANO
        assert event.stack[2] == MAIN

    def test_unknown_tag(self):
        with pytest.raises(BadTraceLine) as exc:
            list(parse_trace(["Q 1 2\n"]))
        assert exc.value.line_no == 1

    def test_comments_and_blanks_skipped(self):
        events = list(parse_trace(["# header\n", "\n", "E 2 a/B m ()V\n"]))
        assert events == [EntryEvent(2, ref("a/B", "m"))]

    def test_wrong_field_count(self):
        with pytest.raises(BadTraceLine):
            list(parse_trace(["E 1 a/B m\n"]))

    def test_bad_descriptor(self):
        with pytest.raises(BadTraceLine):
            list(parse_trace(["E 1 a/B m junk\n"]))

    def test_truncated_native_record(self):
        with pytest.raises(BadTraceLine):
            list(parse_trace(["N 1 2\n", "F a/B m ()V\n"]))

    def test_non_frame_inside_native_record(self):
        with pytest.raises(BadTraceLine):
            list(parse_trace(["N 1 1\n", "E 1 a/B m ()V\n"]))

    def test_lazy(self):
        events = parse_trace(iter(["E 1 a/B m ()V\n", "Q bad\n"]))
        assert next(events) == EntryEvent(1, ref("a/B", "m"))
        with pytest.raises(BadTraceLine):
            next(events)


class TestAttribute:
    def test_entry_without_native_calls(self):
        result = attribute([EntryEvent(1, MAIN)], DB, ORIGINS, FLAGS)
        assert result.executed == {MAIN}
        assert result.mask_of(MAIN) == frozenset()

    def test_marking_rule_covers_whole_stack(self):
        events = [
            EntryEvent(1, MAIN),
            EntryEvent(1, WORK),
            NativeCallEvent(1, (NANO, WORK, MAIN)),
        ]
        result = attribute(events, DB, ORIGINS, FLAGS)
        assert result.mask_of(WORK) == {NativeCategory.TIME}
        assert result.mask_of(MAIN) == {NativeCategory.TIME}
        assert result.calls_io(MAIN)

    def test_runtime_frames_not_attributed(self):
        events = [NativeCallEvent(1, (NANO, MAIN))]
        result = attribute(events, DB, ORIGINS, FLAGS)
        assert NANO not in result.masks

    def test_exclusion_filter(self):
        clinit = ref("app/Main", "<clinit>")
        synthetic = ref("app/Main", "lambda$0")
        abstract = ref("app/Base", "tpl")
        origins = {**ORIGINS, clinit: Origin.PROJECT, synthetic: Origin.PROJECT,
                   abstract: Origin.PROJECT}
        flags = {**FLAGS, clinit: frozenset({"static"}),
                 synthetic: frozenset({"synthetic"}),
                 abstract: frozenset({"public", "abstract"})}
        events = [
            EntryEvent(1, clinit),
            EntryEvent(1, synthetic),
            EntryEvent(1, abstract),
            NativeCallEvent(1, (NANO, synthetic, clinit, MAIN)),
        ]
        result = attribute(events, DB, origins, flags)
        assert result.executed == set()
        assert synthetic not in result.masks and clinit not in result.masks
        assert result.mask_of(MAIN) == {NativeCategory.TIME}

    def test_unknown_frame_warned_and_skipped(self):
        ghost = ref("gone/Ghost", "g")
        events = [EntryEvent(1, ghost), NativeCallEvent(1, (NANO, ghost, MAIN))]
        result = attribute(events, DB, ORIGINS, FLAGS)
        assert ghost not in result.executed
        assert ghost not in result.masks
        assert result.unknown_methods == (ghost,)

    def test_uncatalogued_native_raises(self):
        mystery = ref("app/Native", "custom")
        origins = {**ORIGINS, mystery: Origin.PROJECT}
        with pytest.raises(UncataloguedNative):
            attribute([NativeCallEvent(1, (mystery, MAIN))], DB, origins, FLAGS)

    def test_idempotent_under_duplicate_events(self):
        events = [EntryEvent(1, MAIN), NativeCallEvent(1, (NANO, MAIN))]
        once = attribute(events, DB, ORIGINS, FLAGS)
        twice = attribute(events + events, DB, ORIGINS, FLAGS)
        assert once == twice

    def test_thread_interleaving_invariance(self):
        thread_a = [EntryEvent(1, MAIN), NativeCallEvent(1, (NANO, MAIN))]
        thread_b = [EntryEvent(2, WORK), NativeCallEvent(2, (READ, WORK))]
        rng = random.Random(7)
        baseline = attribute(thread_a + thread_b, DB, ORIGINS, FLAGS)
        for _ in range(10):
            merged, a, b = [], list(thread_a), list(thread_b)
            while a or b:
                pick = a if (a and (not b or rng.random() < 0.5)) else b
                merged.append(pick.pop(0))
            assert attribute(merged, DB, ORIGINS, FLAGS) == baseline

    def test_merge_results_unions(self):
        first = attribute([EntryEvent(1, MAIN), NativeCallEvent(1, (NANO, MAIN))], DB, ORIGINS, FLAGS)
        second = attribute([EntryEvent(1, WORK), NativeCallEvent(1, (READ, WORK, MAIN))], DB, ORIGINS, FLAGS)
        merged = merge_results([first, second])
        assert merged.executed == {MAIN, WORK}
        assert merged.mask_of(MAIN) == {NativeCategory.TIME, NativeCategory.FILES}


class TestSummarizeDynamic:
    def _result(self, executed_masks):
        executed = frozenset(executed_masks)
        masks = {m: frozenset(c) for m, c in executed_masks.items() if c}
        return summarize_dynamic(DynResult(executed=executed, masks=masks, native_sets={}))

    def test_fractions(self):
        methods = {ref("p/K", f"m{i}"): set() for i in range(10)}
        for i in range(3):
            methods[ref("p/K", f"m{i}")] = {NativeCategory.FILES}
        summary = self._result(methods)
        assert summary.executed_count == 10
        assert summary.category_pct[NativeCategory.FILES] == 30.0
        assert summary.pct_calls_native == 30.0
        assert summary.pct_calls_io == 30.0

    def test_invocation_only_counts_native_not_io(self):
        summary = self._result({MAIN: {NativeCategory.INVOCATION}})
        assert summary.pct_calls_native == 100.0
        assert summary.pct_calls_io == 0.0

    def test_empty_executed_set(self):
        summary = self._result({})
        assert summary.executed_count == 0
        assert summary.pct_calls_native is None
        assert summary.category_pct is None


class TestExport:
    def test_sorted_records(self):
        events = [
            EntryEvent(1, WORK),
            EntryEvent(1, MAIN),
            NativeCallEvent(1, (NANO, WORK)),
        ]
        result = attribute(events, DB, ORIGINS, FLAGS)
        lines = export_records(result)
        assert lines == [
            "app/Main.main([Ljava/lang/String;)V\ttrue\t\tfalse\tfalse",
            "app/Main.work()V\ttrue\ttime\ttrue\ttrue",
        ]
