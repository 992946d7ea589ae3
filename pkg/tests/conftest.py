import pytest

from pdmkit.config import SEED_ENV_VAR


@pytest.fixture(autouse=True)
def _isolate_seed_env(monkeypatch):
    """Keep an ambient seed override from changing test behavior."""
    monkeypatch.delenv(SEED_ENV_VAR, raising=False)
