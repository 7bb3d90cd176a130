import shutil

import pytest

from plp.corpus import Corpus
from plp.fixtures import load_dipyrone
from plp.store import LineageKey


@pytest.fixture(scope="session")
def golden_dir(tmp_path_factory):
    """The golden corpus, loaded once; treat as read-only."""
    path = tmp_path_factory.mktemp("golden")
    load_dipyrone(Corpus(path))
    return path


@pytest.fixture(scope="session")
def golden(golden_dir):
    return Corpus(golden_dir)


@pytest.fixture
def golden_copy(golden_dir, tmp_path):
    """A private mutable copy of the golden corpus."""
    target = tmp_path / "corpus"
    shutil.copytree(golden_dir, target)
    return Corpus(target)


@pytest.fixture
def corpus(tmp_path):
    """An empty corpus in a private directory."""
    return Corpus(tmp_path / "data")


def make_lineage(**overrides) -> LineageKey:
    fields = {
        "source": "Test Source",
        "registration_id": "REG-1",
        "doc_kind": "professional_insert",
        "medication_name": "testdrug",
    }
    fields.update(overrides)
    return LineageKey(**fields)
