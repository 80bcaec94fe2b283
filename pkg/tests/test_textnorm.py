import pytest
from hypothesis import given, strategies as st

from geodis.textnorm import (
    EmptyResult,
    fold_ascii,
    normalize,
    normalize_name,
    strip_parentheticals,
)


@pytest.mark.parametrize("raw, expected", [
    ("Abra (Cordillera)", ("Abra", ["Cordillera"])),
    ("Dakar", ("Dakar", [])),
    ("A (x) B (y)", ("A  B", ["x", "y"])),
    ("Outer (a (b) c) tail", ("Outer  tail", ["a (b) c"])),
])
def test_strip_parentheticals(raw, expected):
    assert strip_parentheticals(raw) == expected


@pytest.mark.parametrize("raw", ["Broken (paren", "close) only", "a ) b ( c"])
def test_unbalanced_parentheses_stay_literal(raw):
    base, spans = strip_parentheticals(raw)
    assert spans == []
    assert base == raw.strip()


@pytest.mark.parametrize("raw, strip, expected", [
    ("São Paulo", False, "sao paulo"),
    ("Sindh Province", True, "sindh"),
    ("dakar", False, "dakar"),
    ("Province", True, "province"),
    ("Province of Batangas", True, "batangas"),
    ("Région de Dakar", True, "dakar"),
    ("Côte-d'Ivoire", False, "cote-d'ivoire"),
    ("Łódź", False, "lodz"),
    ("Reykjavík, Ísafjörður", False, "reykjavik isafjordur"),
    ("  Many   spaces\t", False, "many spaces"),
    ("Abra (Cordillera) Region", True, "abra"),
])
def test_normalize_name_examples(raw, strip, expected):
    assert normalize_name(raw, strip).text == expected


def test_parentheticals_are_captured():
    out = normalize_name("Lahore (Punjab)")
    assert out.text == "lahore"
    assert out.parentheticals == ("Punjab",)


def test_connector_kept_without_adjacent_descriptor():
    assert normalize("La Paz") == "la paz"
    assert normalize("Rio de Janeiro") == "rio de janeiro"


@pytest.mark.parametrize("raw", ["", "   ", "()", "(x)", "..."])
def test_empty_result(raw):
    with pytest.raises(EmptyResult):
        normalize_name(raw)


def test_non_latin_passes_through_lowercased():
    assert normalize("ΑΘΗΝΑ") == "αθηνα"


def test_fold_ascii_drops_marks():
    assert fold_ascii("Ñuñoa") == "nunoa"


def test_custom_lexicon():
    assert normalize_name("Kreis Lippe", True, descriptors={"kreis"}).text == "lippe"


names = st.text(alphabet=st.characters(blacklist_categories=("Cs",)), min_size=1, max_size=30)


@given(names, st.booleans())
def test_idempotent(raw, strip):
    try:
        once = normalize_name(raw, strip).text
    except EmptyResult:
        return
    assert normalize_name(once, strip).text == once


@given(st.text(alphabet="abcdefghijklmnopqrstuvwxyzáéíöüß -'(),", min_size=1, max_size=30))
def test_case_insensitive(raw):
    try:
        lower = normalize(raw)
    except EmptyResult:
        with pytest.raises(EmptyResult):
            normalize(raw.upper())
        return
    assert normalize(raw.upper()) == lower


@given(names)
def test_output_shape(raw):
    try:
        text = normalize(raw)
    except EmptyResult:
        return
    assert text == text.strip() and "  " not in text
    assert "(" not in text and ")" not in text
    assert text == text.lower()


@given(st.lists(st.sampled_from(["region", "of", "district", "de", "province", "state"]),
                min_size=1, max_size=5))
def test_stripping_never_empties(tokens):
    assert normalize(" ".join(tokens)) != ""


@given(st.text(alphabet="ab (x)", max_size=25))
def test_parenthetical_reassembly_keeps_characters(raw):
    base, spans = strip_parentheticals(raw)
    kept = sorted(c for c in base + "".join(spans) if c not in " ()")
    source = sorted(c for c in raw if c not in " ()")
    assert kept == source
