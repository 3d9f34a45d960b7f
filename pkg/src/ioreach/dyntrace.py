"""Execution-trace parsing and executed-method attribution.

Wire format, UTF-8, one record per line::

    E <thread> <class> <name> <descriptor>    method entry
    N <thread> <k>                            native call, then exactly k
    F <class> <name> <descriptor>             stack frames, innermost first

Lines beginning with ``#`` are comments. The stack travels inline on every
native-call record, so attribution is stateless: interleaved threads and
truncated traces need no reconstruction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import IO, Iterable, Iterator, Mapping

from .errors import BadTraceLine, InvalidDescriptor, UncataloguedNative
from .model import MethodRef, Origin
from .natives import AnalysisMode, CategoryDb, NativeCategory, is_io


@dataclass(frozen=True)
class EntryEvent:
    thread_id: int
    method: MethodRef


@dataclass(frozen=True)
class NativeCallEvent:
    thread_id: int
    stack: tuple[MethodRef, ...]  # innermost first; stack[0] is the native

    def __post_init__(self):
        if not self.stack:
            raise ValueError("native-call event with empty stack")

    @property
    def native(self) -> MethodRef:
        return self.stack[0]


TraceEvent = EntryEvent | NativeCallEvent


def _method_ref(fields: list[str], line_no: int) -> MethodRef:
    try:
        return MethodRef(fields[0], fields[1], fields[2])
    except InvalidDescriptor as exc:
        raise BadTraceLine(line_no, str(exc)) from exc


def parse_trace(stream: IO[str] | Iterable[str]) -> Iterator[TraceEvent]:
    """Lazily yield trace events in file order.

    Raises BadTraceLine (with the 1-based line number) on an unknown tag,
    wrong field count, bad frame count, or unparsable method reference.
    """
    lines = enumerate(stream, start=1)
    for line_no, raw in lines:
        line = raw.rstrip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split(" ")
        tag = fields[0]
        if tag == "E":
            if len(fields) != 5:
                raise BadTraceLine(line_no, f"entry record needs 5 fields, got {len(fields)}")
            thread = _int_field(fields[1], line_no)
            yield EntryEvent(thread, _method_ref(fields[2:], line_no))
        elif tag == "N":
            if len(fields) != 3:
                raise BadTraceLine(line_no, f"native record needs 3 fields, got {len(fields)}")
            thread = _int_field(fields[1], line_no)
            depth = _int_field(fields[2], line_no)
            if depth < 1:
                raise BadTraceLine(line_no, "native record needs at least one frame")
            frames = []
            for _ in range(depth):
                frame_no, frame_raw = next(lines, (line_no, None))
                if frame_raw is None:
                    raise BadTraceLine(frame_no, "trace ends inside a native-call record")
                frame_fields = frame_raw.rstrip("\n").split(" ")
                if len(frame_fields) != 4 or frame_fields[0] != "F":
                    raise BadTraceLine(frame_no, "expected a frame record")
                frames.append(_method_ref(frame_fields[1:], frame_no))
            yield NativeCallEvent(thread, tuple(frames))
        else:
            raise BadTraceLine(line_no, f"unknown record tag {tag!r}")


def _int_field(text: str, line_no: int) -> int:
    try:
        return int(text)
    except ValueError:
        raise BadTraceLine(line_no, f"not an integer: {text!r}") from None


@dataclass(frozen=True)
class DynResult:
    """Executed methods and their observed native-category attribution."""

    executed: frozenset[MethodRef]
    masks: Mapping[MethodRef, frozenset[NativeCategory]]
    native_sets: Mapping[MethodRef, frozenset[MethodRef]]
    unknown_methods: tuple[MethodRef, ...] = ()

    def mask_of(self, ref: MethodRef) -> frozenset[NativeCategory]:
        return self.masks.get(ref, frozenset())

    def calls_native(self, ref: MethodRef) -> bool:
        return bool(self.mask_of(ref))

    def calls_io(self, ref: MethodRef) -> bool:
        return any(is_io(c, AnalysisMode.DYNAMIC) for c in self.mask_of(ref))


def attribute(
    events: Iterable[TraceEvent],
    db: CategoryDb,
    origins: Mapping[MethodRef, Origin],
    flags: Mapping[MethodRef, frozenset[str]],
) -> DynResult:
    """Apply the marking rule: every filtered stack frame of a native call
    is a caller of that native.

    Excluded from both the executed set and attribution: static
    initializers, runtime-origin methods, synthetic and abstract methods.
    Methods absent from the corpus metadata are recorded as warnings and
    excluded. A native without a database entry raises UncataloguedNative.
    """
    executed: set[MethodRef] = set()
    masks: dict[MethodRef, set[NativeCategory]] = {}
    native_sets: dict[MethodRef, set[MethodRef]] = {}
    unknown: set[MethodRef] = set()

    def passes(ref: MethodRef) -> bool:
        if ref.method_name == "<clinit>":
            return False
        origin = origins.get(ref)
        if origin is None:
            unknown.add(ref)
            return False
        if origin is Origin.RUNTIME:
            return False
        method_flags = flags.get(ref, frozenset())
        return "synthetic" not in method_flags and "abstract" not in method_flags

    for event in events:
        if isinstance(event, EntryEvent):
            if passes(event.method):
                executed.add(event.method)
        else:
            native = event.native
            if native not in db:
                raise UncataloguedNative([native])
            category = db.entries[native]
            for frame in event.stack:
                if passes(frame):
                    masks.setdefault(frame, set()).add(category)
                    native_sets.setdefault(frame, set()).add(native)

    return DynResult(
        executed=frozenset(executed),
        masks={ref: frozenset(cats) for ref, cats in masks.items()},
        native_sets={ref: frozenset(ns) for ref, ns in native_sets.items()},
        unknown_methods=tuple(sorted(unknown)),
    )


def merge_results(results: Iterable[DynResult]) -> DynResult:
    """Union of independent trace attributions (per-method mask union)."""
    executed: set[MethodRef] = set()
    masks: dict[MethodRef, set[NativeCategory]] = {}
    native_sets: dict[MethodRef, set[MethodRef]] = {}
    unknown: set[MethodRef] = set()
    for result in results:
        executed |= result.executed
        unknown.update(result.unknown_methods)
        for ref, mask in result.masks.items():
            masks.setdefault(ref, set()).update(mask)
        for ref, natives in result.native_sets.items():
            native_sets.setdefault(ref, set()).update(natives)
    return DynResult(
        executed=frozenset(executed),
        masks={ref: frozenset(cats) for ref, cats in masks.items()},
        native_sets={ref: frozenset(ns) for ref, ns in native_sets.items()},
        unknown_methods=tuple(sorted(unknown)),
    )


@dataclass(frozen=True)
class DynSummary:
    executed_count: int
    pct_calls_native: float | None
    pct_calls_io: float | None
    category_pct: Mapping[NativeCategory, float] | None


def summarize_dynamic(result: DynResult) -> DynSummary:
    """Fractions over executed methods; absent when nothing executed."""
    count = len(result.executed)
    if count == 0:
        return DynSummary(0, None, None, None)
    calls_native = sum(1 for m in result.executed if result.calls_native(m))
    calls_io = sum(1 for m in result.executed if result.calls_io(m))
    category_pct = {
        category: 100.0 * sum(1 for m in result.executed if category in result.mask_of(m)) / count
        for category in NativeCategory
    }
    return DynSummary(
        executed_count=count,
        pct_calls_native=100.0 * calls_native / count,
        pct_calls_io=100.0 * calls_io / count,
        category_pct=category_pct,
    )


def export_records(result: DynResult) -> list[str]:
    """One TSV record per executed method, mirroring the static export."""
    from .reach import mask_to_csv  # shared mask serialization

    lines = []
    for ref in sorted(result.executed):
        lines.append(
            "\t".join(
                (
                    str(ref),
                    "true",
                    mask_to_csv(result.mask_of(ref)),
                    "true" if result.calls_native(ref) else "false",
                    "true" if result.calls_io(ref) else "false",
                )
            )
        )
    return lines
