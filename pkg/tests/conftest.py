import pytest

from affbcast.core import get_engine


@pytest.fixture(scope="session")
def compiled_engine():
    """Compiled kernel, or skip the test when only the fallback is present."""
    try:
        return get_engine("compiled")
    except RuntimeError as exc:
        pytest.skip(f"compiled engine unavailable: {exc}")


@pytest.fixture(scope="session")
def pure_engine():
    return get_engine("pure")
