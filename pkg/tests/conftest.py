import pytest

from cdsite.fixtures import toy_category, toy_cd, toy_density


@pytest.fixture
def toy():
    return toy_category()


@pytest.fixture
def toy_p(toy):
    return toy_cd(toy)


@pytest.fixture
def toy_d(toy):
    return toy_density(toy)


ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def verdict():
    """Record and print one pass/fail line for an acceptance criterion."""
    def record(number: int, ok: bool, detail: str) -> bool:
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
        ACCEPTANCE[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
