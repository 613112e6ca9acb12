from pathlib import Path

import pytest

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "actorforge" / "fixtures"


@pytest.fixture
def fixtures():
    return FIXTURES
