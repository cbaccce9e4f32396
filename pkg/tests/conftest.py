import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_measure(rng, n=None, lo=-1.0, hi=1.0):
    from hydrodim import AtomicMeasure
    n = int(rng.integers(2, 300)) if n is None else n
    return AtomicMeasure(rng.uniform(lo, hi, n), rng.uniform(0.01, 1.0, n))


# one line per acceptance criterion, echoed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def record(criterion: str, passed: bool, detail: str, gated: bool = True) -> str:
    tag = "PASS" if passed else "FAIL"
    if not gated:
        tag += " (reported, not gated)"
    line = f"[criterion {criterion}] {tag}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
