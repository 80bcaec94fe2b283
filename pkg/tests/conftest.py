import os

import pytest

from geodis.gadm import load_gadm
from world import write_gadm


def pytest_collection_modifyitems(config, items):
    if os.environ.get("GEODIS_LIVE") == "1":
        return
    skip = pytest.mark.skip(reason="live services; set GEODIS_LIVE=1")
    for item in items:
        if "network" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope="session")
def gadm_path(tmp_path_factory):
    return write_gadm(tmp_path_factory.mktemp("gadm") / "fixture.gpkg")


@pytest.fixture(scope="session")
def index(gadm_path):
    return load_gadm(gadm_path)
