import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from instructgen.errors import (
    AmbiguousRoles,
    BadCount,
    BadName,
    ExtractorTimeout,
    NoComponentsFound,
    SingleComponent,
    TransportError,
    UnknownComponent,
    WrongArity,
)
from instructgen.extraction import (
    DEFAULT_INSTRUCTION,
    ExtractorConfig,
    Lexicon,
    RawTriple,
    normalize_surface,
    parse_llm_output,
    remote_extract,
    resolve_names,
    rule_extract,
    rule_extract_raw,
    serialize_extraction,
)
from instructgen.model import CanonicalName, ExtractionResult

FASTEN_BASE_STEP = (
    "You need to fasten the base onto the assembled components and check "
    "that the four holes in the base align perfectly with the small screws."
)

name_strategy = st.from_regex(r"[a-z0-9]+(_[a-z0-9]+)*", fullmatch=True)
triple_strategy = (
    st.tuples(name_strategy, name_strategy, st.integers(min_value=1, max_value=99))
    .filter(lambda t: t[0] != t[1])
    .map(lambda t: ExtractionResult(CanonicalName(t[0]), CanonicalName(t[1]), t[2]))
)


class TestNormalizeSurface:
    def test_case_and_whitespace_folding(self):
        assert normalize_surface("Small  Screws ") == "small screws"

    def test_identity_on_clean_input(self):
        assert normalize_surface("base") == "base"

    def test_tabs_collapse_to_single_spaces(self):
        assert normalize_surface("Top\tCap") == "top cap"


class TestRuleExtract:
    def test_fasten_base_sentence(self, pneumatic_lexicon):
        result = rule_extract(FASTEN_BASE_STEP, pneumatic_lexicon)
        assert result == ExtractionResult("small_screw", "base", 1)

    def test_fasten_base_sentence_raw_surface_forms(self, pneumatic_lexicon):
        raw = rule_extract_raw(FASTEN_BASE_STEP, pneumatic_lexicon)
        assert serialize_extraction(raw) == "small screws, base, 1"

    def test_insert_piston(self, pneumatic_lexicon):
        result = rule_extract("Insert the piston into the cylinder.", pneumatic_lexicon)
        assert result == ExtractionResult("cylinder", "piston", 1)

    def test_no_components(self, pneumatic_lexicon):
        with pytest.raises(NoComponentsFound):
            rule_extract("Weather is nice today.", pneumatic_lexicon)

    def test_single_component(self, pneumatic_lexicon):
        with pytest.raises(SingleComponent):
            rule_extract("Inspect the piston for scratches.", pneumatic_lexicon)

    def test_ambiguous_roles_without_verb(self, pneumatic_lexicon):
        with pytest.raises(AmbiguousRoles):
            rule_extract("The base and the top and the cylinder.", pneumatic_lexicon)

    def test_ambiguous_roles_three_components_no_marker(self, pneumatic_lexicon):
        with pytest.raises(AmbiguousRoles):
            rule_extract("Fasten the base, the top and the cylinder.", pneumatic_lexicon)

    def test_marker_resolves_three_component_sentence(self, pneumatic_lexicon):
        result = rule_extract(
            "Fasten the cylinder onto the base with the large screws.", pneumatic_lexicon
        )
        assert result == ExtractionResult("base", "cylinder", 1)

    def test_count_word_and_digit(self, pneumatic_lexicon):
        assert rule_extract("Insert four small screws into the base.", pneumatic_lexicon).count == 4
        assert rule_extract("Insert 4 small screws into the base.", pneumatic_lexicon).count == 4

    def test_numeral_not_attached_to_successor_is_ignored(self, pneumatic_lexicon):
        result = rule_extract(
            "Place the base on the fixture and check the four holes.", pneumatic_lexicon
        )
        assert result.count == 1

    def test_pure_function(self, pneumatic_lexicon):
        text = "Mount the cylinder onto the base."
        assert rule_extract(text, pneumatic_lexicon) == rule_extract(text, pneumatic_lexicon)

    def test_longest_match_wins(self):
        lexicon = Lexicon.from_dict(
            {"screw": "screw", "small screw": "small_screw", "base": "base"}
        )
        result = rule_extract("Insert the small screw into the base.", lexicon)
        assert result.successor == "small_screw"

    def test_labeled_corpus_exact(self, pneumatic_lexicon, labeled_cases):
        for case in labeled_cases:
            expected = ExtractionResult(
                case["predecessor"], case["successor"], case["count"]
            )
            assert rule_extract(case["text"], pneumatic_lexicon) == expected, case["text"]


class TestParseLlmOutput:
    def test_surface_forms_become_underscored(self):
        assert parse_llm_output("small screws, base, 1") == RawTriple("small_screws", "base", 1)

    def test_already_canonical(self):
        assert parse_llm_output("cylinder, piston, 1") == RawTriple("cylinder", "piston", 1)

    def test_two_fields_is_wrong_arity(self):
        with pytest.raises(WrongArity) as exc_info:
            parse_llm_output("base, 1")
        assert exc_info.value.raw == "base, 1"

    def test_bad_count(self):
        with pytest.raises(BadCount):
            parse_llm_output("base, top, lots")
        with pytest.raises(BadCount):
            parse_llm_output("base, top, 0")

    def test_empty_name(self):
        with pytest.raises(BadName):
            parse_llm_output(", top, 1")


class TestResolveNames:
    def test_plural_surface_resolves(self, pneumatic_lexicon):
        triple = resolve_names(RawTriple("small_screws", "base", 1), pneumatic_lexicon)
        assert triple == ExtractionResult("small_screw", "base", 1)

    def test_identity_on_canonical(self, pneumatic_lexicon):
        triple = resolve_names(RawTriple("base", "top", 1), pneumatic_lexicon)
        assert triple == ExtractionResult("base", "top", 1)

    def test_unknown_component(self, pneumatic_lexicon):
        with pytest.raises(UnknownComponent) as exc_info:
            resolve_names(RawTriple("widget", "base", 1), pneumatic_lexicon)
        assert "widget" in str(exc_info.value)


class TestSerializeExtraction:
    def test_direct_formatting(self):
        assert serialize_extraction(ExtractionResult("small_screw", "base", 1)) == "small_screw, base, 1"
        assert serialize_extraction(ExtractionResult("cylinder", "piston", 4)) == "cylinder, piston, 4"

    @settings(max_examples=300)
    @given(triple_strategy)
    def test_parse_of_serialize_is_identity(self, triple):
        parsed = parse_llm_output(serialize_extraction(triple))
        assert (parsed.predecessor, parsed.successor, parsed.count) == (
            triple.predecessor,
            triple.successor,
            triple.count,
        )


class TestRemoteExtract:
    def config(self, url, timeout=5.0):
        return ExtractorConfig(mode="remote", endpoint=url, timeout=timeout)

    def test_round_trip_through_the_wire(self, stub_endpoint, pneumatic_lexicon):
        stub = stub_endpoint(reply=b"small screws, base, 1")
        result = remote_extract(self.config(stub.url), FASTEN_BASE_STEP, pneumatic_lexicon)
        assert result == ExtractionResult("small_screw", "base", 1)
        assert stub.requests == [
            {"instruction": DEFAULT_INSTRUCTION, "input": FASTEN_BASE_STEP}
        ]

    def test_garbage_reply_raises_wrong_arity_with_raw(self, stub_endpoint, pneumatic_lexicon):
        stub = stub_endpoint(reply=b"garbage")
        with pytest.raises(WrongArity) as exc_info:
            remote_extract(self.config(stub.url), "Attach the top.", pneumatic_lexicon)
        assert exc_info.value.raw == "garbage"

    def test_unknown_name_keeps_raw_reply(self, stub_endpoint, pneumatic_lexicon):
        stub = stub_endpoint(reply=b"widget, base, 1")
        with pytest.raises(UnknownComponent) as exc_info:
            remote_extract(self.config(stub.url), "Attach the widget.", pneumatic_lexicon)
        assert exc_info.value.raw == "widget, base, 1"

    def test_unreachable_endpoint(self, pneumatic_lexicon):
        with pytest.raises(TransportError):
            remote_extract(
                self.config("http://127.0.0.1:9/generate"), "Attach the top.", pneumatic_lexicon
            )

    def test_timeout(self, stub_endpoint, pneumatic_lexicon):
        stub = stub_endpoint(delay=0.5)
        with pytest.raises(ExtractorTimeout):
            remote_extract(
                self.config(stub.url, timeout=0.05), "Attach the top.", pneumatic_lexicon
            )

    def test_mode_must_be_remote(self, pneumatic_lexicon):
        with pytest.raises(ValueError):
            remote_extract(ExtractorConfig(mode="rule"), "x", pneumatic_lexicon)


class TestLexicon:
    def test_values_must_be_canonical(self):
        with pytest.raises(ValueError):
            Lexicon.from_dict({"base": "Not Canonical"})

    def test_surface_collision_rejected(self):
        with pytest.raises(ValueError):
            Lexicon.from_dict({"Base": "base", "base ": "top"})

    def test_keys_normalized(self):
        lexicon = Lexicon.from_dict({"Small  Screws": "small_screw"})
        assert "small screws" in lexicon.entries


class TestExtractorConfig:
    def test_remote_requires_endpoint(self):
        with pytest.raises(ValueError):
            ExtractorConfig(mode="remote")

    def test_round_trip(self):
        config = ExtractorConfig(mode="remote", endpoint="http://example/g", timeout=3.0)
        assert ExtractorConfig.from_dict(config.to_dict()) == config
