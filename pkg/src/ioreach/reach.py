"""Reachable-method computation and native-category attribution.

Per-method native sets are aggregated over the condensation of the call
graph: Tarjan emits strongly connected components successors-first, so one
linear pass unions each component's own natives with those of its
successors. The result is identical to a per-method forward traversal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .callgraph import CallGraph, is_source_method
from .errors import UncataloguedNative
from .model import DYNAMIC_CLASS, ClassModel, MethodRef
from .natives import AnalysisMode, CategoryDb, NativeCategory, is_io

CategoryMask = frozenset  # of NativeCategory

EMPTY_MASK: frozenset[NativeCategory] = frozenset()


def mask_to_csv(mask: frozenset[NativeCategory]) -> str:
    return ",".join(c.value for c in NativeCategory if c in mask)


def reachable_methods(g: CallGraph) -> frozenset[MethodRef]:
    """Nodes reachable from the entry set, entry points included."""
    adjacency = g.successors()
    seen: set[MethodRef] = set()
    stack = [e for e in g.entry_points if e in adjacency]
    seen.update(stack)
    while stack:
        for succ in adjacency[stack.pop()]:
            if succ not in seen:
                seen.add(succ)
                stack.append(succ)
    return frozenset(seen)


@dataclass(frozen=True)
class MethodReach:
    reachable: bool
    native_set: frozenset[MethodRef] = frozenset()
    mask: frozenset[NativeCategory] = EMPTY_MASK

    @property
    def calls_native(self) -> bool:
        return bool(self.native_set)

    @property
    def calls_io(self) -> bool:
        return any(is_io(c, AnalysisMode.STATIC) for c in self.mask)


UNREACHABLE = MethodReach(reachable=False)


@dataclass(frozen=True)
class ReachabilityResult:
    """Attribution for every reachable source method.

    Source methods outside the map are unreachable and carry empty
    attribution by definition.
    """

    per_method: Mapping[MethodRef, MethodReach]

    def lookup(self, ref: MethodRef) -> MethodReach:
        return self.per_method.get(ref, UNREACHABLE)


def _category_of(ref: MethodRef, db: CategoryDb) -> NativeCategory:
    if ref.class_name == DYNAMIC_CLASS:
        return NativeCategory.INVOCATION
    return db.entries[ref]


def natives_reachable(g: CallGraph, db: CategoryDb) -> ReachabilityResult:
    """Per reachable source method, the natives and categories it can reach.

    Raises UncataloguedNative when a native node has no database entry
    (custom project natives cannot be categorized).
    """
    missing = sorted(r for r in g.native_nodes if r not in db)
    if missing:
        raise UncataloguedNative(missing)

    reach = reachable_methods(g)
    adjacency = {node: succs for node, succs in g.successors().items() if node in reach}
    for node in adjacency:
        adjacency[node] = [s for s in adjacency[node] if s in reach]

    components = _tarjan(adjacency)  # successors-first order
    component_of: dict[MethodRef, int] = {}
    for i, component in enumerate(components):
        for node in component:
            component_of[node] = i

    natives_per_component: list[frozenset[MethodRef]] = []
    for i, component in enumerate(components):
        collected: set[MethodRef] = {
            node for node in component
            if node in g.native_nodes or node.class_name == DYNAMIC_CLASS
        }
        for node in component:
            for succ in adjacency[node]:
                j = component_of[succ]
                if j != i:
                    collected |= natives_per_component[j]
        natives_per_component.append(frozenset(collected))

    per_method: dict[MethodRef, MethodReach] = {}
    for ref in g.source_nodes & reach:
        native_set = natives_per_component[component_of[ref]]
        mask = frozenset(_category_of(n, db) for n in native_set)
        per_method[ref] = MethodReach(reachable=True, native_set=native_set, mask=mask)
    return ReachabilityResult(per_method=per_method)


def _tarjan(adjacency: Mapping[MethodRef, Sequence[MethodRef]]) -> list[list[MethodRef]]:
    """Iterative Tarjan; components are emitted successors-first."""
    index: dict[MethodRef, int] = {}
    lowlink: dict[MethodRef, int] = {}
    on_stack: set[MethodRef] = set()
    stack: list[MethodRef] = []
    components: list[list[MethodRef]] = []
    counter = 0

    for root in adjacency:
        if root in index:
            continue
        work = [(root, iter(adjacency[root]))]
        index[root] = lowlink[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, children = work[-1]
            advanced = False
            for child in children:
                if child not in index:
                    index[child] = lowlink[child] = counter
                    counter += 1
                    stack.append(child)
                    on_stack.add(child)
                    work.append((child, iter(adjacency[child])))
                    advanced = True
                    break
                if child in on_stack:
                    lowlink[node] = min(lowlink[node], index[child])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[node])
            if lowlink[node] == index[node]:
                component = []
                while True:
                    member = stack.pop()
                    on_stack.remove(member)
                    component.append(member)
                    if member == node:
                        break
                components.append(component)
    return components


@dataclass(frozen=True)
class StaticSummary:
    """Corpus-level fractions over reachable source methods.

    Percentages are None when the denominator is empty rather than NaN.
    """

    total_source_methods: int
    reachable_count: int
    reachable_pct: float | None
    pct_calls_native: float | None
    pct_calls_io: float | None
    category_pct: Mapping[NativeCategory, float] | None
    project_id: str | None = None


def summarize_static(
    result: ReachabilityResult,
    corpus: Iterable[ClassModel],
    project_id: str | None = None,
) -> StaticSummary:
    total = sum(1 for cls in corpus for m in cls.methods if is_source_method(m))
    reachable_count = len(result.per_method)
    if reachable_count == 0:
        return StaticSummary(
            total_source_methods=total,
            reachable_count=0,
            reachable_pct=(0.0 if total else None),
            pct_calls_native=None,
            pct_calls_io=None,
            category_pct=None,
            project_id=project_id,
        )
    calls_native = sum(1 for r in result.per_method.values() if r.calls_native)
    calls_io = sum(1 for r in result.per_method.values() if r.calls_io)
    category_pct = {
        category: 100.0 * sum(1 for r in result.per_method.values() if category in r.mask) / reachable_count
        for category in NativeCategory
    }
    return StaticSummary(
        total_source_methods=total,
        reachable_count=reachable_count,
        reachable_pct=(100.0 * reachable_count / total if total else None),
        pct_calls_native=100.0 * calls_native / reachable_count,
        pct_calls_io=100.0 * calls_io / reachable_count,
        category_pct=category_pct,
        project_id=project_id,
    )


def export_records(result: ReachabilityResult, corpus: Iterable[ClassModel]) -> list[str]:
    """One TSV record per source method: ref, reachable, mask, flags."""
    lines = []
    refs = sorted(m.ref for cls in corpus for m in cls.methods if is_source_method(m))
    for ref in refs:
        r = result.lookup(ref)
        lines.append(
            "\t".join(
                (
                    str(ref),
                    "true" if r.reachable else "false",
                    mask_to_csv(r.mask),
                    "true" if r.calls_native else "false",
                    "true" if r.calls_io else "false",
                )
            )
        )
    return lines
