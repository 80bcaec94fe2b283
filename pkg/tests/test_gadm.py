import json

import pytest
from shapely.geometry import box, mapping

from geodis.gadm import (
    CountryTable,
    DEFAULT_COUNTRIES,
    EmptyCountry,
    GadmIndex,
    GadmUnit,
    MissingLayer,
    SchemaMismatch,
    UnknownCountry,
    load_gadm,
    match_tree,
    match_unit,
)
from geodis.gadm import gpkg
from geodis.parser import validate_tree
from world import UNITS, unit_rows, write_gadm


def test_loads_fixture(index):
    assert len(index) == len(UNITS)
    lahore = index["PAK.1.1_1"]
    assert lahore.parent_gid == "PAK.1_1" and lahore.level == 2
    assert {u.gid for u in index.children("PAK.1_1")} == {"PAK.1.1_1", "PAK.1.2_1", "PAK.1.3_1"}
    assert index.countries() == ["IND", "PAK"]


def test_three_plus_five(tmp_path):
    units = [u for u in UNITS if u[3] == "PAK" and u[2] <= 2]
    idx = load_gadm(write_gadm(tmp_path / "g.gpkg", units))
    assert len(idx) == 8
    assert len(idx.units_at("PAK", 1)) == 3 and len(idx.units_at("PAK", 2)) == 5


def test_country_filter(gadm_path):
    idx = load_gadm(gadm_path, ["India"])
    assert idx.countries() == ["IND"]


def test_unknown_filter_country_is_empty_country(gadm_path):
    with pytest.raises(EmptyCountry):
        load_gadm(gadm_path, ["Chile"])


def test_missing_name_field(tmp_path):
    with pytest.raises(SchemaMismatch) as err:
        load_gadm(write_gadm(tmp_path / "bad.gpkg", drop="NAME_1"))
    assert err.value.field == "NAME_1"
    assert "NAME_1" in str(err.value)


def test_missing_layer(tmp_path):
    path = tmp_path / "only2.gpkg"
    gpkg.write_layer(path, "ADM_ADM_2", unit_rows(level=2))
    with pytest.raises(MissingLayer):
        load_gadm(path)
    with pytest.raises(MissingLayer):
        load_gadm(tmp_path / "absent.gpkg")


def test_dangling_parent_rejected():
    orphan = GadmUnit("X.1.1_1", "Nowhere", 2, "XXX", box(0, 0, 1, 1), "X.1_1")
    with pytest.raises(SchemaMismatch):
        GadmIndex([orphan])


def test_geojson_directory(tmp_path):
    for lv in (1, 2):
        feats = [{"type": "Feature", "properties": a, "geometry": mapping(g)}
                 for a, g in unit_rows(level=lv)]
        (tmp_path / f"gadm41_ALL_{lv}.json").write_text(
            json.dumps({"type": "FeatureCollection", "features": feats}))
    idx = load_gadm(tmp_path)
    assert len(idx) == sum(1 for u in UNITS if u[2] <= 2)


def test_gpkg_blob_round_trip():
    g = box(1, 2, 3, 4)
    assert gpkg.decode_blob(gpkg.encode_blob(g)).equals(g)


def test_variant_names_indexed(index):
    m = match_unit("Baluchistan", 1, None, index, country="PAK")
    assert m.unit.gid == "PAK.3_1" and m.score == 100.0
    m = match_unit("Quilon", 2, None, index, country="IND")
    assert m.unit.gid == "IND.2.1_1"


@pytest.mark.parametrize("name, gid, exact", [
    ("sindh", "PAK.2_1", True),
    ("Sindh Province", "PAK.2_1", True),
    ("sindhh", "PAK.2_1", False),
])
def test_match_unit_examples(index, name, gid, exact):
    m = match_unit(name, 1, None, index, country="PAK")
    assert m is not None and m.unit.gid == gid
    assert (m.score == 100.0) is exact and m.score >= 85


def test_no_match_for_nonsense(index):
    assert match_unit("atlantis", 1, None, index, country="PAK") is None


def test_parent_constraint(index):
    punjab = index["PAK.1_1"]
    m = match_unit("Karachi", 2, punjab, index)
    assert m is None  # Karachi is in Sindh
    m = match_unit("Lahore", 2, punjab, index)
    assert m.unit.parent_gid == punjab.gid


def test_threshold_monotone(index):
    names = ["sindhh", "lahor", "multann", "karachee", "rawalpndi", "xyz"]
    for name in names:
        for lo, hi in [(70, 85), (85, 95), (95, 100)]:
            m_hi = match_unit(name, 2, None, index, hi, country="PAK")
            m_lo = match_unit(name, 2, None, index, lo, country="PAK")
            if m_hi is not None:
                assert m_lo is not None


def test_tie_breaks_on_smaller_gid():
    units = [GadmUnit("Z.2_1", "Springfield", 1, "ZZZ", box(0, 0, 1, 1)),
             GadmUnit("Z.1_1", "Springfield", 1, "ZZZ", box(1, 0, 2, 1))]
    idx = GadmIndex(units)
    assert match_unit("springfield", 1, None, idx, country="ZZZ").unit.gid == "Z.1_1"


def test_match_tree_hierarchy(index):
    tree = validate_tree({"Admin1": ["Punjab"],
                          "Admin2": [{"name": "Lahore", "parent": "Punjab"},
                                     {"name": "Karachi", "parent": None}],
                          "Admin3": [{"name": "Raiwind", "parent": "Lahore"}]})
    out = match_tree(tree, "Pakistan", index)
    got = {em.entry.name: em.match.unit.gid for em in out}
    assert got == {"Punjab": "PAK.1_1", "Lahore": "PAK.1.1_1", "Raiwind": "PAK.1.1.2_1",
                   "Karachi": "PAK.2.1_1"}


def test_match_tree_unmatched_parent_falls_back_to_country(index):
    tree = validate_tree({"Admin1": ["Atlantis"],
                          "Admin2": [{"name": "Hyderabad", "parent": "Atlantis"}]})
    out = {em.entry.name: em.match for em in match_tree(tree, "PAK", index)}
    assert out["Atlantis"] is None
    assert out["Hyderabad"].unit.gid == "PAK.2.2_1"


def test_match_tree_empty_and_unknown(index):
    assert match_tree(validate_tree({}), "Pakistan", index) == []
    with pytest.raises(UnknownCountry):
        match_tree(validate_tree({}), "Atlantis", index)
    with pytest.raises(UnknownCountry):
        match_tree(validate_tree({}), "Chile", index)


def test_country_table():
    assert DEFAULT_COUNTRIES.resolve("Pakistan") == "PAK"
    assert DEFAULT_COUNTRIES.resolve("pak") == "PAK"
    assert DEFAULT_COUNTRIES.resolve("Iran (Islamic Republic of)") == "IRN"
    assert DEFAULT_COUNTRIES.same_country("Türkiye", "Turkey")
    with pytest.raises(UnknownCountry):
        DEFAULT_COUNTRIES.resolve("Atlantis")
    extended = CountryTable.default({"Atlantis": "ATL"})
    assert extended.resolve("atlantis") == "ATL"


def test_short_name_substitution_bound():
    # a substitution on an L-letter name scores 100 * (1 - 1/L); below 85 when L < 7
    m = match_unit("sindx", 1, None, index_of([("X.1_1", "Sindh")]), country="XXX")
    assert m is None
    m = match_unit("karachx", 1, None, index_of([("X.1_1", "Karachi")]), country="XXX")
    assert m is not None and m.score == pytest.approx(100 * (1 - 1 / 7))


def index_of(pairs):
    return GadmIndex([GadmUnit(gid, name, 1, "XXX", box(i, 0, i + 1, 1))
                      for i, (gid, name) in enumerate(pairs)])
