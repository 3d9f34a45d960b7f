"""JVM class-file parsing and container scanning.

Parses just enough of the class-file format for the analyses: method
declarations with their access flags, invocation instructions, method
annotations, instantiated classes, and body size metrics. Verification,
stack maps, and attribute contents we do not use are skipped structurally.
"""

from __future__ import annotations

import struct
import zipfile
from dataclasses import dataclass, field
from pathlib import Path

from .errors import IoFailure, InvalidDescriptor, MalformedClassFile, UnsupportedVersion
from .model import CallKind, CallSite, ClassModel, MethodModel, MethodRef, Origin
from .model import DYNAMIC_CLASS

MAGIC = 0xCAFEBABE
# Latest supported release: class files as emitted for Java 17 (major 61).
SUPPORTED_MAJOR_CEILING = 61

# Constant pool tags.
_UTF8, _INT, _FLOAT, _LONG, _DOUBLE = 1, 3, 4, 5, 6
_CLASS, _STRING, _FIELDREF, _METHODREF, _IFACE_METHODREF = 7, 8, 9, 10, 11
_NAME_AND_TYPE, _METHOD_HANDLE, _METHOD_TYPE = 12, 15, 16
_DYNAMIC, _INVOKE_DYNAMIC, _MODULE, _PACKAGE = 17, 18, 19, 20

_CLASS_FLAG_BITS = (
    (0x0200, "interface"),
    (0x0400, "abstract"),
    (0x1000, "synthetic"),
    (0x2000, "annotation"),
    (0x8000, "module"),
)
_METHOD_FLAG_BITS = (
    (0x0001, "public"),
    (0x0002, "private"),
    (0x0004, "protected"),
    (0x0008, "static"),
    (0x0040, "bridge"),
    (0x0100, "native"),
    (0x0400, "abstract"),
    (0x1000, "synthetic"),
)

_INVOKE_KINDS = {
    0xB6: CallKind.VIRTUAL,
    0xB7: CallKind.SPECIAL,
    0xB8: CallKind.STATIC,
    0xB9: CallKind.INTERFACE,
    0xBA: CallKind.DYNAMIC,
}

# Operand byte counts for fixed-length instructions.
_EXTRA_BYTES: dict[int, int] = {}
for _op in range(0x00, 0x10):
    _EXTRA_BYTES[_op] = 0
_EXTRA_BYTES.update({0x10: 1, 0x11: 2, 0x12: 1, 0x13: 2, 0x14: 2})
for _op in range(0x15, 0x1A):  # iload..aload with index
    _EXTRA_BYTES[_op] = 1
for _op in range(0x1A, 0x36):
    _EXTRA_BYTES[_op] = 0
for _op in range(0x36, 0x3B):  # istore..astore with index
    _EXTRA_BYTES[_op] = 1
for _op in range(0x3B, 0x84):
    _EXTRA_BYTES[_op] = 0
_EXTRA_BYTES[0x84] = 2  # iinc
for _op in range(0x85, 0x99):
    _EXTRA_BYTES[_op] = 0
for _op in range(0x99, 0xA9):  # ifeq..jsr
    _EXTRA_BYTES[_op] = 2
_EXTRA_BYTES[0xA9] = 1  # ret
for _op in range(0xAC, 0xB2):  # ireturn..return
    _EXTRA_BYTES[_op] = 0
for _op in range(0xB2, 0xB9):  # getstatic..invokestatic
    _EXTRA_BYTES[_op] = 2
_EXTRA_BYTES.update({0xB9: 4, 0xBA: 4, 0xBB: 2, 0xBC: 1, 0xBD: 2, 0xBE: 0, 0xBF: 0})
_EXTRA_BYTES.update({0xC0: 2, 0xC1: 2, 0xC2: 0, 0xC3: 0, 0xC5: 3, 0xC6: 2, 0xC7: 2, 0xC8: 4, 0xC9: 4})

_LOCAL_STORES = set(range(0x36, 0x3B)) | set(range(0x3B, 0x4F))
_ARRAY_STORES = set(range(0x4F, 0x57))
_VALUE_RETURNS = set(range(0xAC, 0xB1))
_UNIT_SINGLES = (
    _LOCAL_STORES
    | _ARRAY_STORES
    | {0xB3, 0xB5}          # putstatic, putfield
    | {0x84}                # iinc
    | set(_INVOKE_KINDS)    # all five invocation kinds
    | _VALUE_RETURNS        # `return expr;` statements; bare void return is not counted
    | {0xBF, 0xC2, 0xC3}    # athrow, monitorenter, monitorexit
)


class _Reader:
    __slots__ = ("data", "pos", "source")

    def __init__(self, data: bytes, source: str | None):
        self.data = data
        self.pos = 0
        self.source = source

    def u1(self) -> int:
        return self._unpack(">B", 1)

    def u2(self) -> int:
        return self._unpack(">H", 2)

    def u4(self) -> int:
        return self._unpack(">I", 4)

    def raw(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise MalformedClassFile("truncated stream", self.source)
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def skip(self, n: int) -> None:
        if self.pos + n > len(self.data):
            raise MalformedClassFile("truncated stream", self.source)
        self.pos += n

    def _unpack(self, fmt: str, size: int) -> int:
        if self.pos + size > len(self.data):
            raise MalformedClassFile("truncated stream", self.source)
        (value,) = struct.unpack_from(fmt, self.data, self.pos)
        self.pos += size
        return value


def _decode_modified_utf8(raw: bytes, source: str | None) -> str:
    out: list[str] = []
    i, n = 0, len(raw)
    while i < n:
        b = raw[i]
        if 0 < b < 0x80:
            out.append(chr(b))
            i += 1
        elif b & 0xE0 == 0xC0:
            if i + 1 >= n or raw[i + 1] & 0xC0 != 0x80:
                raise MalformedClassFile("bad modified-UTF-8 sequence", source)
            out.append(chr(((b & 0x1F) << 6) | (raw[i + 1] & 0x3F)))
            i += 2
        elif b & 0xF0 == 0xE0:
            if i + 2 >= n or raw[i + 1] & 0xC0 != 0x80 or raw[i + 2] & 0xC0 != 0x80:
                raise MalformedClassFile("bad modified-UTF-8 sequence", source)
            out.append(chr(((b & 0x0F) << 12) | ((raw[i + 1] & 0x3F) << 6) | (raw[i + 2] & 0x3F)))
            i += 3
        else:
            raise MalformedClassFile(f"bad modified-UTF-8 byte 0x{b:02x}", source)
    return "".join(out)


class _ConstantPool:
    """Raw constant pool; entries are validated when first referenced."""

    def __init__(self, reader: _Reader):
        self.source = reader.source
        count = reader.u2()
        if count == 0:
            raise MalformedClassFile("constant pool count is zero", self.source)
        self.entries: list[tuple[int, object] | None] = [None] * count
        i = 1
        while i < count:
            tag = reader.u1()
            if tag == _UTF8:
                length = reader.u2()
                payload: object = _decode_modified_utf8(reader.raw(length), self.source)
            elif tag in (_INT, _FLOAT):
                reader.skip(4)
                payload = None
            elif tag in (_LONG, _DOUBLE):
                reader.skip(8)
                payload = None
            elif tag in (_CLASS, _STRING, _METHOD_TYPE, _MODULE, _PACKAGE):
                payload = reader.u2()
            elif tag in (_FIELDREF, _METHODREF, _IFACE_METHODREF, _NAME_AND_TYPE, _DYNAMIC, _INVOKE_DYNAMIC):
                payload = (reader.u2(), reader.u2())
            elif tag == _METHOD_HANDLE:
                payload = (reader.u1(), reader.u2())
            else:
                raise MalformedClassFile(f"unknown constant pool tag {tag} at index {i}", self.source)
            self.entries[i] = (tag, payload)
            i += 2 if tag in (_LONG, _DOUBLE) else 1

    def _entry(self, index: int, expected: tuple[int, ...]) -> tuple[int, object]:
        if not 0 < index < len(self.entries):
            raise MalformedClassFile(f"constant pool index {index} out of range", self.source)
        entry = self.entries[index]
        if entry is None or entry[0] not in expected:
            found = "empty slot" if entry is None else f"tag {entry[0]}"
            raise MalformedClassFile(
                f"constant pool index {index}: expected tag in {expected}, found {found}", self.source
            )
        return entry

    def utf8(self, index: int) -> str:
        return self._entry(index, (_UTF8,))[1]  # type: ignore[return-value]

    def class_name(self, index: int) -> str:
        name_index = self._entry(index, (_CLASS,))[1]
        return self.utf8(name_index)  # type: ignore[arg-type]

    def name_and_type(self, index: int) -> tuple[str, str]:
        name_index, desc_index = self._entry(index, (_NAME_AND_TYPE,))[1]  # type: ignore[misc]
        return self.utf8(name_index), self.utf8(desc_index)

    def method_target(self, index: int, tags: tuple[int, ...]) -> MethodRef:
        class_index, nat_index = self._entry(index, tags)[1]  # type: ignore[misc]
        owner = self.class_name(class_index)
        name, descriptor = self.name_and_type(nat_index)
        try:
            return MethodRef(owner, name, descriptor)
        except InvalidDescriptor as exc:
            raise MalformedClassFile(f"invalid method descriptor {descriptor!r}", self.source) from exc

    def dynamic_target(self, index: int) -> MethodRef:
        _, nat_index = self._entry(index, (_INVOKE_DYNAMIC,))[1]  # type: ignore[misc]
        name, descriptor = self.name_and_type(nat_index)
        try:
            return MethodRef(DYNAMIC_CLASS, name, descriptor)
        except InvalidDescriptor as exc:
            raise MalformedClassFile(f"invalid dynamic call descriptor {descriptor!r}", self.source) from exc

    def referenced_class_names(self) -> frozenset[str]:
        """Class constants that resolve cleanly; junk unused slots are skipped."""
        names = set()
        for entry in self.entries:
            if entry is None or entry[0] != _CLASS:
                continue
            target = self.entries[entry[1]] if 0 < entry[1] < len(self.entries) else None  # type: ignore[index,arg-type]
            if target is None or target[0] != _UTF8:
                continue
            name = target[1]
            while name.startswith("["):
                name = name[1:]
            if name.startswith("L") and name.endswith(";"):
                name = name[1:-1]
            elif "[" in name or len(name) <= 1:
                continue
            names.add(name)
        return frozenset(names)


def _flag_set(raw: int, table: tuple[tuple[int, str], ...]) -> frozenset[str]:
    return frozenset(name for bit, name in table if raw & bit)


def _scan_code(code: bytes, pool: _ConstantPool, source: str | None):
    """Walk the bytecode array collecting call sites, units, and `new` types."""
    sites: list[CallSite] = []
    news: list[str] = []
    units = 0
    i, n = 0, len(code)
    while i < n:
        op = code[i]
        if op in _UNIT_SINGLES:
            units += 1
        kind = _INVOKE_KINDS.get(op)
        if kind is not None:
            if i + 1 + _EXTRA_BYTES[op] > n:
                raise MalformedClassFile("truncated invocation instruction", source)
            index = int.from_bytes(code[i + 1 : i + 3], "big")
            if kind is CallKind.DYNAMIC:
                sites.append(CallSite(kind, pool.dynamic_target(index)))
            elif kind is CallKind.INTERFACE:
                sites.append(CallSite(kind, pool.method_target(index, (_IFACE_METHODREF, _METHODREF))))
            else:
                sites.append(CallSite(kind, pool.method_target(index, (_METHODREF, _IFACE_METHODREF))))
            i += 1 + _EXTRA_BYTES[op]
        elif op == 0xBB:  # new
            if i + 3 > n:
                raise MalformedClassFile("truncated new instruction", source)
            index = int.from_bytes(code[i + 1 : i + 3], "big")
            news.append(pool.class_name(index))
            i += 3
        elif op == 0xC4:  # wide
            if i + 1 >= n:
                raise MalformedClassFile("truncated wide instruction", source)
            modified = code[i + 1]
            if modified == 0x84:  # wide iinc
                units += 1
                i += 6
            elif modified in range(0x15, 0x1A) or modified in range(0x36, 0x3B) or modified == 0xA9:
                if modified in range(0x36, 0x3B):
                    units += 1
                i += 4
            else:
                raise MalformedClassFile(f"wide prefix on opcode 0x{modified:02x}", source)
        elif op == 0xAA:  # tableswitch
            base = i + 1 + (-(i + 1)) % 4
            if base + 12 > n:
                raise MalformedClassFile("truncated tableswitch", source)
            _, low, high = struct.unpack_from(">iii", code, base)
            if high < low:
                raise MalformedClassFile("tableswitch bounds inverted", source)
            i = base + 12 + 4 * (high - low + 1)
        elif op == 0xAB:  # lookupswitch
            base = i + 1 + (-(i + 1)) % 4
            if base + 8 > n:
                raise MalformedClassFile("truncated lookupswitch", source)
            _, npairs = struct.unpack_from(">ii", code, base)
            if npairs < 0:
                raise MalformedClassFile("negative lookupswitch pair count", source)
            i = base + 8 + 8 * npairs
        else:
            extra = _EXTRA_BYTES.get(op)
            if extra is None:
                raise MalformedClassFile(f"unknown opcode 0x{op:02x}", source)
            i += 1 + extra
    if i != n:
        raise MalformedClassFile("instruction runs past end of code array", source)
    return tuple(sites), units, tuple(news)


def _parse_code_attribute(reader: _Reader, pool: _ConstantPool):
    reader.skip(4)  # max_stack, max_locals
    code_length = reader.u4()
    code = reader.raw(code_length)
    handler_count = reader.u2()
    reader.skip(8 * handler_count)
    for _ in range(reader.u2()):  # nested attributes
        reader.skip(2)
        reader.skip(reader.u4())
    sites, units, news = _scan_code(code, pool, reader.source)
    return code_length, sites, units, news


def _skip_element_value(reader: _Reader) -> None:
    tag = chr(reader.u1())
    if tag in "BCDFIJSZs":
        reader.skip(2)
    elif tag == "e":
        reader.skip(4)
    elif tag == "c":
        reader.skip(2)
    elif tag == "@":
        _parse_annotation(reader, None)
    elif tag == "[":
        for _ in range(reader.u2()):
            _skip_element_value(reader)
    else:
        raise MalformedClassFile(f"unknown annotation element tag {tag!r}", reader.source)


def _parse_annotation(reader: _Reader, pool: _ConstantPool | None) -> str | None:
    type_index = reader.u2()
    name = None
    if pool is not None:
        descriptor = pool.utf8(type_index)
        if descriptor.startswith("L") and descriptor.endswith(";"):
            name = descriptor[1:-1]
    for _ in range(reader.u2()):
        reader.skip(2)  # element name
        _skip_element_value(reader)
    return name


def parse_class(data: bytes, origin: Origin = Origin.PROJECT, source: str | None = None) -> ClassModel:
    """Parse one class file into a ClassModel.

    Raises MalformedClassFile on structural problems and UnsupportedVersion
    when the major version exceeds SUPPORTED_MAJOR_CEILING.
    """
    reader = _Reader(data, source)
    if reader.u4() != MAGIC:
        raise MalformedClassFile("bad magic number", source)
    reader.u2()  # minor version
    major = reader.u2()
    if major > SUPPORTED_MAJOR_CEILING:
        raise UnsupportedVersion(major, SUPPORTED_MAJOR_CEILING, source)

    pool = _ConstantPool(reader)
    class_flags = _flag_set(reader.u2(), _CLASS_FLAG_BITS)
    name = pool.class_name(reader.u2())
    super_index = reader.u2()
    super_name = pool.class_name(super_index) if super_index else None
    interfaces = tuple(pool.class_name(reader.u2()) for _ in range(reader.u2()))

    for _ in range(reader.u2()):  # fields: structure only
        reader.skip(6)
        for _ in range(reader.u2()):
            reader.skip(2)
            reader.skip(reader.u4())

    methods: list[MethodModel] = []
    annotations: dict[MethodRef, frozenset[str]] = {}
    for _ in range(reader.u2()):
        raw_flags = reader.u2()
        method_name = pool.utf8(reader.u2())
        descriptor = pool.utf8(reader.u2())
        try:
            ref = MethodRef(name, method_name, descriptor)
        except InvalidDescriptor as exc:
            raise MalformedClassFile(f"invalid descriptor {descriptor!r} on {method_name}", source) from exc
        flags = set(_flag_set(raw_flags, _METHOD_FLAG_BITS))

        code_length, sites, units, news = 0, (), 0, ()
        method_annotations: set[str] = set()
        for _ in range(reader.u2()):
            attr_name = pool.utf8(reader.u2())
            attr_length = reader.u4()
            attr_end = reader.pos + attr_length
            if attr_name == "Code":
                if flags & {"native", "abstract"}:
                    raise MalformedClassFile(f"code attribute on bodiless method {ref}", source)
                code_length, sites, units, news = _parse_code_attribute(reader, pool)
            elif attr_name == "Synthetic":
                flags.add("synthetic")
            elif attr_name in ("RuntimeVisibleAnnotations", "RuntimeInvisibleAnnotations"):
                for _ in range(reader.u2()):
                    annotation = _parse_annotation(reader, pool)
                    if annotation:
                        method_annotations.add(annotation)
            else:
                reader.skip(attr_length)
            if reader.pos != attr_end:
                raise MalformedClassFile(f"attribute {attr_name!r} length mismatch on {ref}", source)

        methods.append(
            MethodModel(
                ref=ref,
                flags=frozenset(flags),
                origin=origin,
                call_sites=sites,
                code_size_bytes=code_length,
                statement_units=units,
                new_classes=news,
            )
        )
        if method_annotations:
            annotations[ref] = frozenset(method_annotations)

    for _ in range(reader.u2()):  # class attributes
        reader.skip(2)
        reader.skip(reader.u4())
    if reader.pos != len(data):
        raise MalformedClassFile("trailing bytes after class structure", source)

    return ClassModel(
        name=name,
        super_name=super_name,
        interfaces=interfaces,
        methods=tuple(methods),
        annotations_per_method=annotations,
        flags=class_flags,
        origin=origin,
        referenced_classes=pool.referenced_class_names(),
    )


@dataclass(frozen=True)
class ScanError:
    entry: str
    message: str


@dataclass
class ScanResult:
    """Parsed classes plus per-entry errors; parse failures are not fatal."""

    classes: list[ClassModel] = field(default_factory=list)
    errors: list[ScanError] = field(default_factory=list)
    modules: list[str] = field(default_factory=list)


def scan_container(path: str | Path, origin: Origin) -> ScanResult:
    """Parse every ``.class`` entry of a directory tree or JAR/ZIP container.

    Entries are processed in lexicographic name order. Nested JARs are not
    descended into. Unreadable containers raise IoFailure; unparsable
    entries are collected as ScanError records.
    """
    path = Path(path)
    result = ScanResult()
    if path.is_dir():
        entries = sorted(
            (p.relative_to(path).as_posix(), p) for p in path.rglob("*.class") if p.is_file()
        )
        for entry_name, file_path in entries:
            try:
                data = file_path.read_bytes()
            except OSError as exc:
                result.errors.append(ScanError(entry_name, f"unreadable: {exc}"))
                continue
            _parse_entry(entry_name, data, origin, result)
    elif path.is_file():
        try:
            archive = zipfile.ZipFile(path)
        except (OSError, zipfile.BadZipFile) as exc:
            raise IoFailure(f"{path}: not a readable JAR/ZIP container: {exc}") from exc
        with archive:
            for entry_name in sorted(archive.namelist()):
                if not entry_name.endswith(".class") or entry_name.endswith("/"):
                    continue
                try:
                    data = archive.read(entry_name)
                except (OSError, zipfile.BadZipFile) as exc:
                    result.errors.append(ScanError(entry_name, f"unreadable: {exc}"))
                    continue
                _parse_entry(entry_name, data, origin, result)
    else:
        raise IoFailure(f"{path}: no such file or directory")
    return result


def _parse_entry(entry_name: str, data: bytes, origin: Origin, result: ScanResult) -> None:
    if entry_name.rsplit("/", 1)[-1] == "module-info.class":
        result.modules.append(entry_name[: -len(".class")])
        return
    try:
        model = parse_class(data, origin, source=entry_name)
    except (MalformedClassFile, UnsupportedVersion) as exc:
        result.errors.append(ScanError(entry_name, str(exc)))
        return
    if "module" in model.flags:
        result.modules.append(model.name)
        return
    result.classes.append(model)
