import pytest

from almostctl.corpus import load_corpus
from almostctl.ground import FieldSpec, RingSpec
from almostctl.runtime import limits

DOMAIN = RingSpec("domain", FieldSpec.fp(5))
TRUNC = RingSpec("truncated", FieldSpec.fp(5))


@pytest.fixture
def domain():
    return DOMAIN


@pytest.fixture
def trunc():
    return TRUNC


@pytest.fixture(params=["domain", "truncated"])
def ring(request):
    return RingSpec(request.param, FieldSpec.fp(5))


@pytest.fixture
def cap8():
    with limits(8):
        yield 8


@pytest.fixture(scope="session")
def corpus_domain():
    return load_corpus(DOMAIN)


@pytest.fixture(scope="session")
def corpus_trunc():
    return load_corpus(TRUNC)


# acceptance criteria report one line each at the end of the run
CRITERIA: dict[int, str] = {}


def record_criterion(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    CRITERIA[n] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        terminalreporter.write_line(CRITERIA[n])
