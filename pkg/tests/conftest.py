"""Shared fixtures.

The tables and oracle are session-scoped: table loading parses three TSV
files and the oracle memoizes pair classes, so sharing one instance across
test modules keeps the suite fast without changing any semantics (the
oracle is stateless apart from its cache).
"""

import pytest

from quantnli.corpus import build_lexicon
from quantnli.natlog import Tables
from quantnli.oracle import Oracle
from quantnli.tables import default_tables


@pytest.fixture(scope="session")
def tables() -> Tables:
    return default_tables()


@pytest.fixture(scope="session")
def lexicon():
    return build_lexicon(0, words_per_category=100)


@pytest.fixture(scope="session")
def small_lexicon():
    return build_lexicon(0, words_per_category=2)


@pytest.fixture(scope="session")
def oracle() -> Oracle:
    return Oracle(bound=3)


@pytest.fixture(scope="session")
def oracle2() -> Oracle:
    return Oracle(bound=2)
