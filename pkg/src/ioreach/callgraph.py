"""Entry-point detection and whole-program call-graph construction.

Graphs are built on the fly from the entry set. Virtual and interface
sites are resolved by class-hierarchy analysis (every non-abstract
override in the receiver's subtype tree, plus the implementation the
receiver inherits); rapid-type analysis restricts dispatch to types
instantiated somewhere in the reachable part of the program. Both
over-approximate run-time dispatch.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import NoEntryPoints
from .model import (
    DYNAMIC_INVOKE,
    CallKind,
    ClassModel,
    MethodModel,
    MethodRef,
    Origin,
)

MAIN_DESCRIPTOR = "([Ljava/lang/String;)V"
JUNIT3_BASE = "junit/framework/TestCase"
JUNIT4_ANNOTATION = "org/junit/Test"
JUNIT5_ANNOTATION = "org/junit/jupiter/api/Test"


class EntryPointKind(enum.Enum):
    MAIN = "main"
    JUNIT3 = "junit3"
    JUNIT4 = "junit4"
    JUNIT5 = "junit5"


class Algorithm(enum.Enum):
    CHA = "cha"
    RTA = "rta"


@dataclass(frozen=True)
class EntryPoint:
    ref: MethodRef
    kind: EntryPointKind = EntryPointKind.MAIN


@dataclass(frozen=True)
class UnresolvedTarget:
    """A call site whose target could not be resolved within the corpus."""

    caller: MethodRef
    target: MethodRef
    kind: CallKind

    @property
    def sort_key(self):
        return (self.caller, self.target, self.kind.value)


@dataclass(frozen=True)
class CallGraph:
    nodes: frozenset[MethodRef]
    edges: frozenset[tuple[MethodRef, MethodRef]]
    entry_points: frozenset[MethodRef]
    algorithm: Algorithm
    native_nodes: frozenset[MethodRef]
    source_nodes: frozenset[MethodRef]
    unresolved: tuple[UnresolvedTarget, ...] = ()

    def successors(self) -> dict[MethodRef, list[MethodRef]]:
        adjacency: dict[MethodRef, list[MethodRef]] = {node: [] for node in self.nodes}
        for caller, callee in self.edges:
            adjacency[caller].append(callee)
        return adjacency


def is_source_method(m: MethodModel) -> bool:
    """Project-owned, human-written, non-initializer methods."""
    return (
        m.origin is Origin.PROJECT
        and not m.is_synthetic
        and not m.is_bridge
        and m.ref.method_name != "<clinit>"
    )


class CorpusIndex:
    """Lookup structures over a scanned corpus."""

    def __init__(self, corpus: Iterable[ClassModel]):
        self.classes: dict[str, ClassModel] = {}
        self.methods: dict[MethodRef, MethodModel] = {}
        self.declared: dict[tuple[str, str, str], MethodModel] = {}
        self.children: dict[str, set[str]] = {}
        for cls in corpus:
            self.classes[cls.name] = cls
            for m in cls.methods:
                self.methods[m.ref] = m
                self.declared[(cls.name, m.ref.method_name, m.ref.descriptor)] = m
        for cls in self.classes.values():
            if cls.super_name:
                self.children.setdefault(cls.super_name, set()).add(cls.name)
            for iface in cls.interfaces:
                self.children.setdefault(iface, set()).add(cls.name)
        self._subtree_cache: dict[str, frozenset[str]] = {}
        self._superiface_cache: dict[str, frozenset[str]] = {}

    def _super_chain(self, class_name: str):
        """Yield class_name and its superclasses; stops on cycles and on
        classes absent from the corpus (yielding None as a marker)."""
        seen = set()
        current: str | None = class_name
        while current is not None and current not in seen:
            seen.add(current)
            yield current
            cls = self.classes.get(current)
            if cls is None:
                yield None
                return
            current = cls.super_name

    def subtree(self, root: str) -> frozenset[str]:
        """root plus every corpus class reachable via extends/implements."""
        cached = self._subtree_cache.get(root)
        if cached is not None:
            return cached
        seen = {root}
        stack = [root]
        while stack:
            for child in self.children.get(stack.pop(), ()):
                if child not in seen:
                    seen.add(child)
                    stack.append(child)
        result = frozenset(seen)
        self._subtree_cache[root] = result
        return result

    def resolve_static(self, class_name: str, name: str, desc: str) -> MethodModel | None:
        """Declaration lookup walking up the superclass chain; None if the
        chain leaves the corpus or no declaration exists."""
        for current in self._super_chain(class_name):
            if current is None:
                return None
            model = self.declared.get((current, name, desc))
            if model is not None:
                return model
        return None

    def dispatch_targets(self, concrete: str, name: str, desc: str,
                         allow_private_here: bool = False) -> set[MethodRef]:
        """Implementations selected when (name, desc) is dispatched on an
        instance of `concrete`: the superclass-chain implementation, or the
        maximally-specific superinterface defaults when the chain has none.
        Private declarations above the receiver never dispatch; an abstract
        declaration re-abstracts and stops the search."""
        depth = 0
        for current in self._super_chain(concrete):
            if current is None:
                return set()
            model = self.declared.get((current, name, desc))
            if model is not None and not model.is_static:
                if "private" in model.flags:
                    if depth == 0 and allow_private_here:
                        return {model.ref}
                elif model.is_abstract:
                    return set()
                else:
                    return {model.ref}
            depth += 1
        defaults = set()
        for iface in self.superinterfaces(concrete):
            model = self.declared.get((iface, name, desc))
            if (model is not None and not model.is_static and not model.is_abstract
                    and "private" not in model.flags):
                defaults.add(model.ref)
        return defaults

    def superinterfaces(self, class_name: str) -> frozenset[str]:
        cached = self._superiface_cache.get(class_name)
        if cached is not None:
            return cached
        seen: set[str] = set()
        visited: set[str] = set()
        stack = [class_name]
        while stack:
            current = stack.pop()
            if current in visited:
                continue
            visited.add(current)
            cls = self.classes.get(current)
            if cls is None:
                continue
            for iface in cls.interfaces:
                seen.add(iface)
                stack.append(iface)
            if cls.super_name:
                stack.append(cls.super_name)
        result = frozenset(seen)
        self._superiface_cache[class_name] = result
        return result

    def extends_transitively(self, class_name: str, base: str) -> bool:
        chain = [c for c in self._super_chain(class_name) if c is not None]
        return base in chain[1:]


def find_entry_points(corpus: Sequence[ClassModel]) -> list[EntryPoint]:
    """All main and JUnit 3/4/5 test methods among project classes.

    Superclass chains for JUnit 3 are resolved within the corpus; a chain
    that leaves the corpus is treated as non-JUnit 3. An empty result is
    not an error here; corpus lint reports it.
    """
    index = CorpusIndex(corpus)
    entries: list[EntryPoint] = []
    for cls in corpus:
        if cls.origin is not Origin.PROJECT:
            continue
        for m in cls.methods:
            if m.is_abstract:
                continue
            kind = _entry_kind(cls, m, index)
            if kind is not None:
                entries.append(EntryPoint(m.ref, kind))
    return sorted(entries, key=lambda e: e.ref)


def _entry_kind(cls: ClassModel, m: MethodModel, index: CorpusIndex) -> EntryPointKind | None:
    ref = m.ref
    if ref.method_name == "main" and ref.descriptor == MAIN_DESCRIPTOR and m.is_public and m.is_static:
        return EntryPointKind.MAIN
    annotations = cls.annotations_per_method.get(ref, frozenset())
    if JUNIT5_ANNOTATION in annotations:
        return EntryPointKind.JUNIT5
    if JUNIT4_ANNOTATION in annotations:
        return EntryPointKind.JUNIT4
    if (
        ref.method_name.startswith("test")
        and ref.descriptor == "()V"
        and m.is_public
        and not m.is_static
        and index.extends_transitively(cls.name, JUNIT3_BASE)
    ):
        return EntryPointKind.JUNIT3
    return None


def build_call_graph(
    corpus: Sequence[ClassModel],
    entries: Sequence[EntryPoint],
    algorithm: Algorithm = Algorithm.CHA,
) -> CallGraph:
    """Construct the reachable call graph from the given entry points.

    Static and special sites resolve up the superclass chain. Virtual and
    interface sites fan out per the chosen algorithm. invokedynamic sites
    all collapse onto the ``<dynamic>/invoke`` pseudo-node. Targets whose
    class (or declaration) is absent from the corpus become
    UnresolvedTarget records, not errors.
    """
    if not entries:
        raise NoEntryPoints("call-graph construction requires at least one entry point")
    index = CorpusIndex(corpus)
    nodes: set[MethodRef] = set()
    edges: set[tuple[MethodRef, MethodRef]] = set()
    unresolved: set[UnresolvedTarget] = set()
    instantiated: set[str] = set()
    virtual_sites: set[tuple[MethodRef, CallKind, MethodRef]] = set()
    worklist: list[MethodRef] = []

    def add_edge(caller: MethodRef, callee: MethodRef) -> None:
        edges.add((caller, callee))
        if callee not in nodes:
            worklist.append(callee)

    def dispatch(caller: MethodRef, kind: CallKind, target: MethodRef) -> None:
        receiver = target.class_name
        if receiver not in index.classes:
            unresolved.add(UnresolvedTarget(caller, target, kind))
            return
        if algorithm is Algorithm.CHA:
            candidates = _cha_targets(index, receiver, target.method_name, target.descriptor)
        else:
            candidates = _rta_targets(index, instantiated, receiver, target.method_name, target.descriptor)
        for callee in candidates:
            add_edge(caller, callee)

    def visit(ref: MethodRef) -> None:
        nodes.add(ref)
        model = index.methods.get(ref)
        if model is None or ref.method_name == "<clinit>":
            return
        instantiated.update(model.new_classes)
        for site in model.call_sites:
            target = site.target
            if target.method_name == "<clinit>":
                continue
            if site.kind is CallKind.DYNAMIC:
                add_edge(ref, DYNAMIC_INVOKE)
            elif site.kind in (CallKind.STATIC, CallKind.SPECIAL):
                resolved = index.resolve_static(target.class_name, target.method_name, target.descriptor)
                if resolved is None or resolved.is_abstract:
                    unresolved.add(UnresolvedTarget(ref, target, site.kind))
                else:
                    add_edge(ref, resolved.ref)
            else:
                virtual_sites.add((ref, site.kind, target))
                dispatch(ref, site.kind, target)

    for entry in entries:
        if entry.ref not in nodes:
            visit(entry.ref)
    while True:
        while worklist:
            ref = worklist.pop()
            if ref not in nodes:
                visit(ref)
        if algorithm is Algorithm.CHA:
            break
        # RTA fixpoint: newly observed instantiations can admit new targets.
        before = len(edges)
        for caller, kind, target in list(virtual_sites):
            dispatch(caller, kind, target)
        if len(edges) == before and not worklist:
            break

    native_nodes = frozenset(r for r in nodes if r in index.methods and index.methods[r].is_native)
    source_nodes = frozenset(r for r in nodes if r in index.methods and is_source_method(index.methods[r]))
    return CallGraph(
        nodes=frozenset(nodes),
        edges=frozenset(edges),
        entry_points=frozenset(e.ref for e in entries),
        algorithm=algorithm,
        native_nodes=native_nodes,
        source_nodes=source_nodes,
        unresolved=tuple(sorted(unresolved, key=lambda u: u.sort_key)),
    )


def _cha_targets(index: CorpusIndex, receiver: str, name: str, desc: str) -> set[MethodRef]:
    """Dispatch as if every corpus subtype of the receiver were live."""
    targets: set[MethodRef] = set()
    for subtype in index.subtree(receiver):
        targets |= index.dispatch_targets(subtype, name, desc, allow_private_here=subtype == receiver)
    return targets


def _rta_targets(
    index: CorpusIndex, instantiated: set[str], receiver: str, name: str, desc: str
) -> set[MethodRef]:
    """CHA restricted to subtypes actually instantiated somewhere reachable."""
    targets: set[MethodRef] = set()
    for subtype in index.subtree(receiver) & instantiated:
        targets |= index.dispatch_targets(subtype, name, desc, allow_private_here=subtype == receiver)
    return targets


def dump_graph(graph: CallGraph) -> list[str]:
    """Line dump for oracle diffing: sorted edge and entry records."""
    lines = [f"edge\t{caller}\t{callee}" for caller, callee in graph.edges]
    lines.extend(f"entry\t{ref}" for ref in graph.entry_points)
    return sorted(lines)
