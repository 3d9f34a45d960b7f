"""Structural model of parsed JVM classes and methods.

Class names throughout are binary names in their internal, slash-separated
form (``java/io/FileOutputStream``). Method identity is the triple
(class name, method name, descriptor); nothing else participates in
equality.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping

from .errors import InvalidDescriptor

BASE_TYPES = frozenset("BCDFIJSZ")

# Reserved class name used for invokedynamic call sites, whose real target
# is only known at run time.
DYNAMIC_CLASS = "<dynamic>"


@lru_cache(maxsize=None)
def parse_method_descriptor(descriptor: str) -> tuple[tuple[str, ...], str]:
    """Split a method descriptor into parameter descriptors and return type.

    Raises InvalidDescriptor unless the whole string matches the grammar
    ``( FieldType* ) (FieldType | V)``.
    """
    if not descriptor.startswith("("):
        raise InvalidDescriptor(f"method descriptor must start with '(': {descriptor!r}")
    params = []
    i = 1
    while i < len(descriptor) and descriptor[i] != ")":
        start = i
        i = _scan_field_type(descriptor, i)
        params.append(descriptor[start:i])
    if i >= len(descriptor):
        raise InvalidDescriptor(f"unterminated parameter list: {descriptor!r}")
    i += 1  # closing paren
    if i >= len(descriptor):
        raise InvalidDescriptor(f"missing return type: {descriptor!r}")
    if descriptor[i] == "V":
        end = i + 1
    else:
        end = _scan_field_type(descriptor, i)
    if end != len(descriptor):
        raise InvalidDescriptor(f"trailing characters after return type: {descriptor!r}")
    return tuple(params), descriptor[i:end]


def _scan_field_type(s: str, i: int) -> int:
    dims = 0
    while i < len(s) and s[i] == "[":
        i += 1
        dims += 1
        if dims > 255:
            raise InvalidDescriptor(f"more than 255 array dimensions: {s!r}")
    if i >= len(s):
        raise InvalidDescriptor(f"truncated field type: {s!r}")
    c = s[i]
    if c in BASE_TYPES:
        return i + 1
    if c == "L":
        end = s.find(";", i + 1)
        if end == -1 or end == i + 1:
            raise InvalidDescriptor(f"unterminated object type: {s!r}")
        return end + 1
    raise InvalidDescriptor(f"unknown field type tag {c!r} in {s!r}")


class Origin(enum.Enum):
    """Which corpus partition a class was loaded from."""

    PROJECT = "project"
    DEPENDENCY = "dependency"
    RUNTIME = "runtime"


class CallKind(enum.Enum):
    VIRTUAL = "virtual"
    SPECIAL = "special"
    STATIC = "static"
    INTERFACE = "interface"
    DYNAMIC = "dynamic"


@dataclass(frozen=True, order=True)
class MethodRef:
    """Globally unique method identity: (class, name, descriptor)."""

    class_name: str
    method_name: str
    descriptor: str

    def __post_init__(self):
        parse_method_descriptor(self.descriptor)

    def __str__(self) -> str:
        return f"{self.class_name}.{self.method_name}{self.descriptor}"

    @classmethod
    def from_text(cls, text: str) -> "MethodRef":
        """Parse the canonical ``class.name(descriptor)`` form."""
        paren = text.find("(")
        if paren == -1:
            raise InvalidDescriptor(f"no descriptor in method reference {text!r}")
        dot = text.rfind(".", 0, paren)
        if dot <= 0:
            raise InvalidDescriptor(f"no class/method separator in {text!r}")
        return cls(text[:dot], text[dot + 1 : paren], text[paren:])


# Pseudo-node all invokedynamic sites resolve to in the call graph.
DYNAMIC_INVOKE = MethodRef(DYNAMIC_CLASS, "invoke", "()V")


@dataclass(frozen=True)
class CallSite:
    """One invocation instruction inside a method body."""

    kind: CallKind
    target: MethodRef


@dataclass(frozen=True)
class MethodModel:
    """A declared method plus the body facts the analyses need.

    code_size_bytes is the length of the bytecode array (0 for native and
    abstract methods). statement_units approximates source statement count:
    stores to locals, array stores, field writes, iinc, invocations, value
    returns, throws and monitor ops each count one; a bare void return
    counts zero.
    """

    ref: MethodRef
    flags: frozenset[str]
    origin: Origin
    call_sites: tuple[CallSite, ...] = ()
    code_size_bytes: int = 0
    statement_units: int = 0
    new_classes: tuple[str, ...] = ()

    def __post_init__(self):
        if self.is_native or self.is_abstract:
            if self.call_sites or self.code_size_bytes:
                kind = "native" if self.is_native else "abstract"
                raise ValueError(f"{kind} method {self.ref} cannot carry a body")
        if self.statement_units < 0:
            raise ValueError(f"negative statement_units on {self.ref}")

    @property
    def is_native(self) -> bool:
        return "native" in self.flags

    @property
    def is_static(self) -> bool:
        return "static" in self.flags

    @property
    def is_abstract(self) -> bool:
        return "abstract" in self.flags

    @property
    def is_synthetic(self) -> bool:
        return "synthetic" in self.flags

    @property
    def is_bridge(self) -> bool:
        return "bridge" in self.flags

    @property
    def is_public(self) -> bool:
        return "public" in self.flags


@dataclass(frozen=True)
class ClassModel:
    """One parsed class file."""

    name: str
    super_name: str | None
    interfaces: tuple[str, ...]
    methods: tuple[MethodModel, ...]
    annotations_per_method: Mapping[MethodRef, frozenset[str]] = field(default_factory=dict)
    flags: frozenset[str] = frozenset()
    origin: Origin = Origin.PROJECT
    referenced_classes: frozenset[str] = frozenset()

    def __post_init__(self):
        for m in self.methods:
            if m.ref.class_name != self.name:
                raise ValueError(f"method {m.ref} declared under class {self.name}")

    @property
    def is_interface(self) -> bool:
        return "interface" in self.flags
