import numpy as np
import pytest

from coherent_control.fixtures import NAMED

_CRITERIA: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def record():
    """Record the outcome of an acceptance criterion for the summary."""

    def _record(number: int, ok: bool, detail: str = "") -> bool:
        _CRITERIA[number] = (bool(ok), detail)
        return bool(ok)

    return _record


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=sorted(NAMED))
def named_state(request):
    return request.param, NAMED[request.param]()


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in range(1, 12):
        if n in _CRITERIA:
            ok, detail = _CRITERIA[n]
            terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
        else:
            terminalreporter.write_line(f"criterion {n:2d}: not run")
