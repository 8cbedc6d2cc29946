from functools import lru_cache

import pytest

from abgrowth.abelian import load_group

GROUPS = {
    "Z": "gens a,A; inv a~A",
    "Z2": "gens a,A,b,B; inv a~A, b~B; rel ab=ba",
    "Z3": "gens a,A,b,B,c,C; inv a~A, b~B, c~C; rel abAB; rel acAC; rel bcBC",
    "hex": "gens a,A,b,B,c,C; inv a~A, b~B, c~C; rel ab=ba; rel c=ab",
    "ex31": "gens a,A,b,B,c,C; inv a~A, b~B, c~C; rel aa=b; rel ac=ca",
    "torsionZ": "gens a,A,b,B; inv a~A, b~B; rel aa=b; rel ab=ba",
    "C5": "gens a,A; inv a~A; rel aaaaa",
}

# groups used for language, partition and shape checks
TEST_GROUPS = ["Z", "Z2", "hex", "torsionZ"]


@lru_cache(maxsize=None)
def group(name):
    return load_group(GROUPS[name])


@pytest.fixture(params=sorted(GROUPS))
def any_group(request):
    return (request.param,) + group(request.param)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
