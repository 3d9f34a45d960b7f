import pytest
from hypothesis import given, strategies as st

from ioreach.errors import InvalidDescriptor
from ioreach.model import (
    CallSite,
    CallKind,
    MethodModel,
    MethodRef,
    Origin,
    parse_method_descriptor,
)


class TestDescriptorGrammar:
    @pytest.mark.parametrize(
        "descriptor,params,ret",
        [
            ("()V", (), "V"),
            ("([BII)V", ("[B", "I", "I"), "V"),
            ("(Ljava/lang/String;)Ljava/lang/Object;", ("Ljava/lang/String;",), "Ljava/lang/Object;"),
            ("(J[Ljava/lang/String;Z)[I", ("J", "[Ljava/lang/String;", "Z"), "[I"),
            ("()[[D", (), "[[D"),
        ],
    )
    def test_valid(self, descriptor, params, ret):
        assert parse_method_descriptor(descriptor) == (params, ret)

    @pytest.mark.parametrize(
        "descriptor",
        ["", "()", "V", "(V)V", "(L;)V", "(Ljava/lang/String)V", "()VV", "(I", "()Vx", "(Q)V", "([)V"],
    )
    def test_invalid(self, descriptor):
        with pytest.raises(InvalidDescriptor):
            parse_method_descriptor(descriptor)

    @given(
        st.lists(
            st.sampled_from(["I", "J", "Z", "[B", "Ljava/lang/String;", "[[Lfoo/Bar;"]),
            max_size=6,
        ),
        st.sampled_from(["V", "I", "Ljava/util/List;", "[J"]),
    )
    def test_roundtrip(self, params, ret):
        descriptor = "(" + "".join(params) + ")" + ret
        assert parse_method_descriptor(descriptor) == (tuple(params), ret)


class TestMethodRef:
    def test_equality_is_the_triple(self):
        a = MethodRef("a/B", "m", "()V")
        assert a == MethodRef("a/B", "m", "()V")
        assert a != MethodRef("a/B", "m", "()I")
        assert a != MethodRef("a/B", "n", "()V")
        assert a != MethodRef("a/C", "m", "()V")

    def test_ordering_is_class_name_descriptor(self):
        refs = [
            MethodRef("b/B", "a", "()V"),
            MethodRef("a/B", "z", "()V"),
            MethodRef("a/B", "a", "()V"),
            MethodRef("a/B", "a", "()I"),
        ]
        ordered = sorted(refs)
        assert [str(r) for r in ordered] == [
            "a/B.a()I",
            "a/B.a()V",
            "a/B.z()V",
            "b/B.a()V",
        ]

    def test_bad_descriptor_rejected_at_construction(self):
        with pytest.raises(InvalidDescriptor):
            MethodRef("a/B", "m", "nonsense")

    def test_text_roundtrip(self):
        ref = MethodRef("java/io/FileOutputStream", "write", "([BII)V")
        assert MethodRef.from_text(str(ref)) == ref
        init = MethodRef("a/B", "<init>", "()V")
        assert MethodRef.from_text(str(init)) == init


class TestMethodModel:
    def test_native_must_not_carry_body(self):
        ref = MethodRef("a/B", "now", "()J")
        with pytest.raises(ValueError):
            MethodModel(ref=ref, flags=frozenset({"native"}), origin=Origin.RUNTIME, code_size_bytes=3)
        site = CallSite(CallKind.STATIC, MethodRef("a/B", "f", "()V"))
        with pytest.raises(ValueError):
            MethodModel(ref=ref, flags=frozenset({"native"}), origin=Origin.RUNTIME, call_sites=(site,))

    def test_abstract_has_no_code(self):
        ref = MethodRef("a/B", "m", "()V")
        with pytest.raises(ValueError):
            MethodModel(ref=ref, flags=frozenset({"abstract"}), origin=Origin.PROJECT, code_size_bytes=1)
