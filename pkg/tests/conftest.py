import pytest
from hypothesis import HealthCheck, settings

from twinledger.crypto import Keypair

settings.register_profile(
    "suite",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("suite")


# A small pool of deterministic keypairs shared by the whole run; key
# generation is setup cost, not what any test measures.
_KEY_POOL = [Keypair.from_seed(f"test-key-{i}".encode()) for i in range(12)]


@pytest.fixture(scope="session")
def key_pool():
    return list(_KEY_POOL)


@pytest.fixture()
def keys(key_pool):
    return key_pool
