from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from corpus import e1_instance, eight_player_corpus


@pytest.fixture
def e1():
    return e1_instance()


@pytest.fixture(scope="session")
def eight_corpus():
    return eight_player_corpus(200)
