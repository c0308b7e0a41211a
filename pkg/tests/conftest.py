import pytest

from sdanet.datasets import bars, synthetic_digits

# Lines recorded by the acceptance tests; echoed after the run summary so
# they stay visible even though pytest captures per-test stdout.
ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_report():
    def record(criterion: int, ok: bool, detail: str) -> None:
        line = f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} - {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def bars_ds():
    return bars(seed=1)


@pytest.fixture(scope="session")
def digits14k():
    # 14000 samples at 10/14, 2/14, 2/14 give exactly 10000/2000/2000.
    return synthetic_digits(n_samples=14000, seed=0, fractions=(10 / 14, 2 / 14, 2 / 14))
