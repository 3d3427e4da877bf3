import numpy as np
import pytest

from seldonian_ml import Dataset, gen_illustrative


@pytest.fixture(scope="session")
def big_synthetic():
    return gen_illustrative(1_000_000, seed=2024)


def make_dataset(rows):
    """``rows`` of ``(features..., y, t)`` with the constant feature appended."""
    a = np.asarray(rows, dtype=float)
    return Dataset.from_features(a[:, :-2], a[:, -2], a[:, -1].astype(int))


ACCEPTANCE_LINES = []


def report(criterion, passed, detail):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
