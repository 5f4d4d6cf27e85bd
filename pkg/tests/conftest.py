import pytest

from patprof.library import default_universe

YEARS = [
    "1901", "1902", "1903", "1900",
    "1817", "1898", "1857", "1861", "1805", "1884",
    "1813?", "1875?", "1822?", "1890?",
    "?", "",
]


@pytest.fixture(scope="session")
def universe():
    return default_universe()


@pytest.fixture
def years():
    return list(YEARS)


def atom(universe, name, width=0):
    a = universe[name]
    return a.with_width(width) if width else a


ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, title, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {title}  [{detail}]")
