"""
Shared fixtures for the engine tests
"""
import pytest

from services.cache_service import reset_cache_service
from services.field_arith import make_field
from services.residue_chars import DirichletCharacter, epsilon_two_prime


@pytest.fixture(autouse=True, scope="session")
def isolated_cache(tmp_path_factory):
    """Point the unit-group cache at a throwaway directory"""
    cache = reset_cache_service(str(tmp_path_factory.mktemp("hmf-cache")))
    yield cache
    reset_cache_service()


@pytest.fixture
def ctx2():
    return make_field(2)


@pytest.fixture
def q(ctx2):
    """Totally positive generator 2+√2 of the prime above 2"""
    return ctx2.two_prime()


@pytest.fixture
def trivial(ctx2):
    return DirichletCharacter.trivial(ctx2)


@pytest.fixture
def phi(ctx2):
    return epsilon_two_prime(ctx2)
