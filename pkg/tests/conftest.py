import pathlib

import pytest

from edparse import parse_conllu

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


def load_fixture(name):
    with open(FIXTURES / name, encoding="utf-8") as fh:
        return parse_conllu(fh)


@pytest.fixture(scope="session")
def dutch_sentence():
    return load_fixture("dutch_ellipsis.conllu")[0]


@pytest.fixture(scope="session")
def english_sentence():
    return load_fixture("english_control.conllu")[0]


@pytest.fixture(scope="session")
def train_doc():
    return load_fixture("synthetic_train_50.conllu")


@pytest.fixture(scope="session")
def fixture_dir():
    return FIXTURES
