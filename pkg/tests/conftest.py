import pytest

from etdgraph.fixture import fixture_store
from etdgraph.model import Iri
from etdgraph.store import DEFAULT_BASE_IRI


@pytest.fixture(scope="session")
def network():
    """The bundled two-university fixture (no batch date, so quad
    round-trips are exact)."""
    return fixture_store()


@pytest.fixture(scope="session")
def iri():
    def make(path: str) -> Iri:
        return Iri(f"{DEFAULT_BASE_IRI}/{path}")

    return make
