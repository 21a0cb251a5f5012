import pytest
from hypothesis import given, settings, strategies as st

from fcn.errors import ConfigError
from fcn.ids import IdentifierKind, mint_identifier
from fcn.preprocess import (
    CleanupConfig,
    Lexicon,
    detect_food_mentions,
    segment_sentences,
    strip_markup,
)

DOC = mint_identifier(IdentifierKind.DOCUMENT, "test-doc")


# ── strip_markup ──────────────────────────────────────────────────────


def test_strip_tags_and_collapse_whitespace():
    assert strip_markup("<p>Turmeric  heals</p>") == "Turmeric heals"


def test_quote_stripping_on_escaped_quote_line():
    assert strip_markup("&gt; quoted reply\nMy claim") == "My claim"


def test_quote_lines_kept_when_disabled():
    config = CleanupConfig(strip_quotes=False)
    assert strip_markup("&gt; quoted reply\nMy claim", config) == "> quoted reply My claim"


def test_empty_input_empty_output():
    assert strip_markup("") == ""


def test_user_handles_and_sub_links_removed():
    assert strip_markup("ask @someone or u/other in r/nutrition about it") == (
        "ask or in about it"
    )


def test_markdown_links_survive_cleanup():
    text = "see [the trial](https://example.org/t) for details"
    assert strip_markup(text) == text


def test_comparison_operators_survive_tag_stripping():
    assert strip_markup("2 < 3 and 5 > 4") == "2 < 3 and 5 > 4"


# ── segment_sentences ─────────────────────────────────────────────────


def test_two_terminated_sentences():
    spans = segment_sentences("Cumin aids digestion. Garlic lowers BP.", DOC)
    assert [s.text for s in spans] == ["Cumin aids digestion.", "Garlic lowers BP."]
    assert [s.index for s in spans] == [0, 1]


def test_abbreviation_does_not_split():
    spans = segment_sentences("Dr. Rao says cumin aids digestion.", DOC)
    assert len(spans) == 1


def test_multi_dot_abbreviations():
    spans = segment_sentences("Spices, e.g. Cumin, are common. Second sentence here.", DOC)
    assert len(spans) == 2


def test_no_terminator_whole_text_span():
    spans = segment_sentences("no terminator", DOC)
    assert len(spans) == 1
    assert spans[0].text == "no terminator"


def test_empty_text_no_spans():
    assert segment_sentences("", DOC) == []
    assert segment_sentences("   ", DOC) == []


def test_span_offsets_match_text():
    text = "First point here. Second one follows! Third asks? Fourth ends."
    spans = segment_sentences(text, DOC)
    assert len(spans) == 4
    for span in spans:
        assert text[span.start : span.end] == span.text
        assert 0 <= span.start < span.end <= len(text)


def test_spans_ordered_and_non_overlapping():
    text = "One sentence. Two sentences. Three now. Four total."
    spans = segment_sentences(text, DOC)
    for left, right in zip(spans, spans[1:]):
        assert left.end <= right.start


@settings(max_examples=60, deadline=None)
@given(
    st.lists(
        st.sampled_from(
            ["Cumin aids digestion", "Garlic lowers BP", "It rained today",
             "Dr. Rao agreed", "The 3 results differ"]
        ),
        min_size=1,
        max_size=6,
    )
)
def test_segmentation_reconstructs_input(parts):
    text = ". ".join(parts) + "."
    spans = segment_sentences(text, DOC)
    assert " ".join(s.text for s in spans) == text
    for span in spans:
        assert text[span.start : span.end] == span.text


# ── detect_food_mentions ──────────────────────────────────────────────


def _lexicon():
    return Lexicon({"almond": ["almonds", "soaked almonds"], "rice": [], "rice water": []})


def _brute_force(text, lexicon):
    """Oracle: every alias occurrence, longest first, leftmost on ties."""
    import re

    candidates = []
    for alias, canon in lexicon._aliases.items():
        for match in re.finditer(r"\b" + re.escape(alias) + r"\b", text, re.IGNORECASE):
            candidates.append((match.start(), match.end(), canon))
    chosen = []
    for start, end, canon in sorted(candidates, key=lambda c: (-(c[1] - c[0]), c[0])):
        if all(end <= s or start >= e for s, e, _ in chosen):
            chosen.append((start, end, canon))
    return sorted(chosen)


def test_longest_match_wins():
    spans = segment_sentences("soaked almonds make one smarter", DOC)
    mentions = detect_food_mentions(spans, _lexicon())
    assert len(mentions) == 1
    assert mentions[0].lexicon_key == "almond"
    assert mentions[0].surface == "soaked almonds"


def test_no_hit_empty_list():
    spans = segment_sentences("nothing edible mentioned here", DOC)
    assert detect_food_mentions(spans, _lexicon()) == []


def test_rice_and_rice_water_against_oracle():
    text = "rice and rice water"
    spans = segment_sentences(text, DOC)
    mentions = detect_food_mentions(spans, _lexicon())
    oracle = _brute_force(text, _lexicon())
    assert [(m.start, m.end, m.lexicon_key) for m in mentions] == oracle
    assert len(mentions) == 2
    assert {m.lexicon_key for m in mentions} == {"rice", "rice water"}


def test_casefold_matching():
    spans = segment_sentences("SOAKED ALMONDS everywhere", DOC)
    mentions = detect_food_mentions(spans, _lexicon())
    assert mentions[0].surface == "SOAKED ALMONDS"
    assert mentions[0].lexicon_key == "almond"


def test_surface_matches_sentence_slice():
    text = "Rice water first. Soaked almonds after."
    spans = segment_sentences(text, DOC)
    for mention in detect_food_mentions(spans, _lexicon()):
        sentence = spans[mention.sentence_index]
        assert sentence.text[mention.start : mention.end] == mention.surface


def test_order_permutation_invariance():
    text = "Rice water first. Soaked almonds after."
    spans = segment_sentences(text, DOC)
    forward = detect_food_mentions(spans, _lexicon())
    backward = detect_food_mentions(list(reversed(spans)), _lexicon())

    def key(mentions):
        return sorted(tuple(sorted(m.to_dict().items())) for m in mentions)

    assert key(forward) == key(backward)


def test_empty_lexicon_is_config_error():
    with pytest.raises(ConfigError):
        Lexicon({})


def test_lexicon_csv_round_trip(tmp_path):
    path = tmp_path / "lex.csv"
    path.write_text("# comment\nalmond,almonds\nalmond,soaked almonds\nrice\n")
    lexicon = Lexicon.from_csv(path)
    assert lexicon.resolve("Soaked Almonds") == "almond"
    assert lexicon.resolve("rice") == "rice"
    assert lexicon.resolve("unknown") is None
