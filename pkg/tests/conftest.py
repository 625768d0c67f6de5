import random

import pytest

from heishecke.exact_linalg import IntMatrix, mul2


def random_unimodular(rng: random.Random, steps: int = 6) -> tuple[int, int, int, int]:
    """Product of random elementary matrices, so det is +-1 by construction."""
    m = (1, 0, 0, 1)
    for _ in range(rng.randint(1, steps)):
        t = rng.randint(-4, 4)
        e = rng.choice([(1, t, 0, 1), (1, 0, t, 1), (0, 1, 1, 0), (-1, 0, 0, 1)])
        m = mul2(e, m)
    return m


def as_matrix(t) -> IntMatrix:
    return IntMatrix.of((t[:2], t[2:]))


@pytest.fixture
def rng():
    return random.Random(20240229)


ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, ok: bool, detail: str) -> str:
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
