from __future__ import annotations

from pathlib import Path

import pytest
from hypothesis import settings

from obg import io_formats

settings.register_profile("default", deadline=None)
settings.load_profile("default")

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


def load_chain_doc(name: str) -> io_formats.ChainDocument:
    return io_formats.parse_chain_document(fixture_text(name))


def load_game(name: str):
    return io_formats.parse_game_document(fixture_text(name)).game


def load_automaton(name: str):
    return io_formats.parse_automaton_document(fixture_text(name))


@pytest.fixture(scope="session")
def fig6():
    return load_game("fig6.game.json")


@pytest.fixture(scope="session")
def fig5():
    return load_game("fig5.game.json")
