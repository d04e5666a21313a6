"""Shared fixtures: domain bundles pinned to a fixed clock.

Bundles are loaded once per session; tests must not mutate them.
"""

import datetime as dt

import pytest

from semac.domains import load_bundle

FIXED_NOW = dt.date(2026, 8, 24)


@pytest.fixture(scope="session")
def now():
    return FIXED_NOW


@pytest.fixture(scope="session")
def bonds():
    return load_bundle("bonds", now=FIXED_NOW)


@pytest.fixture(scope="session")
def equities():
    return load_bundle("equities", now=FIXED_NOW)


@pytest.fixture(scope="session")
def news():
    return load_bundle("news", now=FIXED_NOW)


@pytest.fixture(scope="session")
def bonds_engines(bonds):
    return bonds.engines()


@pytest.fixture(scope="session")
def bonds_coordinator(bonds):
    coord = bonds.coordinator()
    yield coord
    coord.close()


@pytest.fixture(scope="session")
def equities_coordinator(equities):
    coord = equities.coordinator()
    yield coord
    coord.close()


@pytest.fixture(scope="session")
def news_coordinator(news):
    coord = news.coordinator()
    yield coord
    coord.close()
