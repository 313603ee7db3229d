import random

import pytest
from hypothesis import settings

from occurfree.cli import corpus_dir
from occurfree.parser import parse_program

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


def load_corpus(name: str):
    return parse_program((corpus_dir() / name).read_text())


@pytest.fixture(scope="session")
def corpus():
    return load_corpus


@pytest.fixture
def rng():
    return random.Random(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
