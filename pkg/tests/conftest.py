import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20220201)


VERDICTS = []


@pytest.fixture
def verdict(capsys):
    """Record and print one PASS/FAIL line; returns the boolean."""

    def report(label, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
        VERDICTS.append(line)
        with capsys.disabled():
            print("\n" + line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in VERDICTS:
            terminalreporter.write_line(line)
