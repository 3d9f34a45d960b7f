"""Native-method taxonomy, category database, and the I/O policy.

The category database is a UTF-8 TSV file, one native per line::

    class_name<TAB>method_name<TAB>descriptor<TAB>category

Blank lines and lines starting with ``#`` are ignored. Lines starting with
``#!`` carry ``key=value`` metadata (``runtime_id``, ``source``). Category
tokens are the lowercase names below.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import IO, Iterable, Mapping

from .errors import BadRecord, InvalidDescriptor
from .model import ClassModel, MethodRef


class NativeCategory(enum.Enum):
    NON_IO = "non-io"
    INVOCATION = "invocation"
    DESKTOP = "desktop"
    TIME = "time"
    FILES = "files"
    NETWORK = "network"
    OS = "os"


CATEGORIES = tuple(NativeCategory)
_TOKEN_TO_CATEGORY = {c.value: c for c in NativeCategory}


class AnalysisMode(enum.Enum):
    STATIC = "static"
    DYNAMIC = "dynamic"


def is_io(category: NativeCategory, mode: AnalysisMode) -> bool:
    """Whether a category counts as I/O under the given analysis mode.

    Reflective invocation can hide an arbitrary call, so it is treated as
    I/O when analyzing statically; a dynamic trace sees the concrete native
    behind the reflection, so there it is not.
    """
    if category is NativeCategory.NON_IO:
        return False
    if category is NativeCategory.INVOCATION:
        return mode is AnalysisMode.STATIC
    return True


@dataclass(frozen=True)
class CategoryDb:
    """Immutable map from native MethodRef to its category."""

    entries: Mapping[MethodRef, NativeCategory]
    runtime_id: str = ""
    source: str = ""

    def __contains__(self, ref: MethodRef) -> bool:
        return ref in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def category_counts(self) -> dict[NativeCategory, int]:
        counts = {c: 0 for c in CATEGORIES}
        for category in self.entries.values():
            counts[category] += 1
        return counts


def load_category_db(stream: IO[str] | Iterable[str]) -> CategoryDb:
    """Parse the TSV category database.

    Raises BadRecord (with the 1-based line number) on a wrong field count,
    malformed descriptor, unknown category token, or duplicate method key.
    """
    entries: dict[MethodRef, NativeCategory] = {}
    meta = {"runtime_id": "", "source": ""}
    for line_no, raw in enumerate(stream, start=1):
        line = raw.rstrip("\n")
        if line.startswith("#!"):
            key, sep, value = line[2:].partition("=")
            if sep and key.strip() in meta:
                meta[key.strip()] = value.strip()
            continue
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 4:
            raise BadRecord(line_no, f"expected 4 tab-separated fields, got {len(fields)}")
        class_name, method_name, descriptor, token = fields
        category = _TOKEN_TO_CATEGORY.get(token)
        if category is None:
            raise BadRecord(line_no, f"unknown category token {token!r}")
        try:
            ref = MethodRef(class_name, method_name, descriptor)
        except InvalidDescriptor as exc:
            raise BadRecord(line_no, str(exc)) from exc
        if ref in entries:
            raise BadRecord(line_no, f"duplicate entry for {ref}")
        entries[ref] = category
    return CategoryDb(entries=entries, runtime_id=meta["runtime_id"], source=meta["source"])


def save_category_db(db: CategoryDb, stream: IO[str]) -> None:
    """Write a database in the TSV format; load(save(db)) preserves entries."""
    if db.runtime_id:
        stream.write(f"#! runtime_id={db.runtime_id}\n")
    if db.source:
        stream.write(f"#! source={db.source}\n")
    for ref in sorted(db.entries):
        category = db.entries[ref]
        stream.write(f"{ref.class_name}\t{ref.method_name}\t{ref.descriptor}\t{category.value}\n")


def extract_natives(classes: Iterable[ClassModel]) -> list[MethodRef]:
    """All native-flagged methods in the corpus, any visibility, sorted."""
    found = {m.ref for cls in classes for m in cls.methods if m.is_native}
    return sorted(found)


@dataclass(frozen=True)
class NativesDiff:
    uncatalogued: tuple[MethodRef, ...] = ()
    stale: tuple[MethodRef, ...] = ()


def diff_natives(found: Iterable[MethodRef], db: CategoryDb) -> NativesDiff:
    """Set difference between scanned natives and database keys, both sorted."""
    found_set = set(found)
    keys = set(db.entries)
    return NativesDiff(
        uncatalogued=tuple(sorted(found_set - keys)),
        stale=tuple(sorted(keys - found_set)),
    )
