"""Twenty-record hermetic fixture: CSV, scripted model replies and service answers."""
from __future__ import annotations

import csv
import json
import zlib

from world import MockWorld, bounds_of

# (dis_no, Location, Country, reply tree)
RECORDS = [
    ("2010-0001-PAK", "Lahore (Punjab)", "Pakistan",
     {"Admin1": ["Punjab"], "Admin2": [{"name": "Lahore", "parent": "Punjab"}]}),
    ("2010-0002-PAK", "Sindh province", "Pakistan", {"Admin1": ["Sindh"]}),
    ("2010-0003-PAK", "Karachi, Hyderabad", "Pakistan",
     {"Admin2": [{"name": "Karachi", "parent": None}, {"name": "Hyderabad", "parent": None}]}),
    ("2011-0004-PAK", "Multan district", "Pakistan", {"Admin2": [{"name": "Multan", "parent": None}]}),
    ("2011-0005-PAK", "Rawalpindi", "Pakistan", {"Admin2": [{"name": "Rawalpindi", "parent": None}]}),
    ("2011-0006-PAK", "Balochistan", "Pakistan", {"Admin1": ["Balochistan"]}),
    ("2012-0007-IND", "Kollam (Kerala)", "India",
     {"Admin1": ["Kerala"], "Admin2": [{"name": "Kollam", "parent": "Kerala"}]}),
    ("2012-0008-IND", "Ernakulam", "India", {"Admin2": [{"name": "Ernakulam", "parent": None}]}),
    ("2012-0009-IND", "Punjab", "India", {"Admin1": ["Punjab"]}),
    ("2013-0010-IND", "Kerala", "India", {"Admin1": ["Kerala"]}),
    ("2013-0011-PAK", "Raiwind (Lahore district)", "Pakistan",
     {"Admin2": [{"name": "Lahore", "parent": None}], "Admin3": [{"name": "Raiwind", "parent": "Lahore"}]}),
    ("2013-0012-PAK", "Baluchistan", "Pakistan", {"Admin1": ["Baluchistan"]}),
    ("2014-0013-IND", "Quilon", "India", {"Admin2": [{"name": "Quilon", "parent": None}]}),
    ("2014-0014-PAK", "Anarkali Bazaar (Lahore)", "Pakistan",
     {"Admin2": [{"name": "Lahore", "parent": None}],
      "Admin3": [{"name": "Anarkali Bazaar", "parent": "Lahore"}]}),
    ("2014-0015-PAK", "Sindh and Punjab provinces", "Pakistan", {"Admin1": ["Sindh", "Punjab"]}),
    ("2015-0016-PAK", "Hyderabad (Sindh)", "Pakistan",
     {"Admin1": ["Sindh"], "Admin2": [{"name": "Hyderabad", "parent": "Sindh"}]}),
    ("2015-0017-PAK", "Karachi", "Pakistan", {"Admin2": [{"name": "Karachi", "parent": None}]}),
    ("2015-0018-PAK", "Punjab, Sindh", "Pakistan", {"Admin1": ["Punjab", "Sindh"]}),
    ("2016-0019-PAK", "Multan, Lahore", "Pakistan",
     {"Admin2": [{"name": "Multan", "parent": None}, {"name": "Lahore", "parent": None}]}),
    ("2016-0020-IND", "Ernakulam, Kollam districts", "India",
     {"Admin2": [{"name": "Ernakulam", "parent": None}, {"name": "Kollam", "parent": None}]}),
]

# one OSM-only place, reprojected onto the Admin3 unit holding it
ANARKALI = (74.5, 31.5)


def _centre(b):
    return ((b[0] + b[2]) / 2, (b[1] + b[3]) / 2)


def build_world() -> MockWorld:
    osm, wiki = {}, {}
    for name in ("Punjab", "Sindh", "Balochistan", "Lahore", "Multan", "Karachi", "Hyderabad",
                 "Rawalpindi", "Raiwind"):
        osm[name] = ("polygon", bounds_of(name))
        x, y = _centre(bounds_of(name))
        wiki[name] = [(f"Q{zlib.crc32(name.encode()) % 10**6}", x, y, "Pakistan")]
    for name in ("Kerala", "Kollam", "Ernakulam"):
        osm[name] = ("polygon", bounds_of(name, "IND"))
        x, y = _centre(bounds_of(name, "IND"))
        wiki[name] = [(f"Q{zlib.crc32(name.encode()) % 10**6 + 1}", x, y, "India")]
    wiki["Punjab"] = wiki["Punjab"] + [("Q22424", 77.0, 31.0, "India")]
    osm["Anarkali Bazaar"] = ("point", ANARKALI)
    llm = {loc: "Here is the parse:\n" + json.dumps({"Admin1": [], "Admin2": [], "Admin3": [], **tree})
           for _, loc, _, tree in RECORDS}
    return MockWorld(osm=osm, wiki=wiki, llm=llm)


def write_records(path, rows=RECORDS):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["DisNo.", "Disaster Subgroup", "Disaster Type", "Country", "Location"])
        for dis_no, loc, country, _ in rows:
            w.writerow([dis_no, "Hydrological", "Flood", country, loc])
    return path


NOMINATIM_INTERVAL = 0.05
WIKIDATA_INTERVAL = 0.02


def write_config(path, server_url, gadm_path, cache_dir):
    path.write_text(f"""
[paths]
gadm_path = "{gadm_path}"
cache_dir = "{cache_dir}"

[parser]
provider_url = "{server_url}/v1/chat/completions"
provider_model = "mock"
parse_backoff_base = 0.01
parse_backoff_cap = 0.05

[remote]
nominatim_url = "{server_url}/search"
wikidata_url = "{server_url}/sparql"
nominatim_interval = {NOMINATIM_INTERVAL}
wikidata_interval = {WIKIDATA_INTERVAL}
jitter_low = 0.0
jitter_high = 0.01
request_timeout = 5

[run]
workers = 4
seed = 7
""")
    return path
