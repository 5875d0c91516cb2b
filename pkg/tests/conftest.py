import logging

import pytest

from lcpabe.cpabe import preset, setup
from lcpabe.zq import Rng

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(autouse=True)
def _quiet_toy_warnings():
    logging.getLogger("lcpabe").setLevel(logging.ERROR)
    yield


@pytest.fixture(scope="session")
def toy():
    params = preset("toy-exact")
    return setup(Rng(2024).child("toy"), params)


@pytest.fixture(scope="session")
def noisy():
    params = preset("noisy-mock")
    return setup(Rng(2024).child("noisy"), params)


@pytest.fixture
def report():
    def record(number: int, name: str, ok: bool, detail: str = "") -> None:
        line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'} {name}"
        if detail:
            line += f" ({detail})"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
