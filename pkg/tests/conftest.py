import random

import pytest

from app.core.config import settings


@pytest.fixture
def rng():
    return random.Random(settings.RANDOM_SEED)


@pytest.fixture
def restore_settings():
    """Undo settings overrides made by a test, e.g. through CLI flags"""
    saved = settings.model_dump()
    yield settings
    for key, value in saved.items():
        setattr(settings, key, value)
