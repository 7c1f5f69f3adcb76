import contextlib

import pytest

from graphs import NAMED

_results = []


@pytest.fixture(params=sorted(NAMED))
def named_graph(request):
    return NAMED[request.param]()


class _Outcome:
    detail = ""


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion.

    Lines are printed immediately (visible with -s) and repeated in the
    terminal summary.
    """

    @contextlib.contextmanager
    def record(number, title):
        out = _Outcome()
        try:
            yield out
        except BaseException as exc:
            line = f"criterion {number:>2} FAIL  {title}: {exc!s:.300}".replace("\n", " ")
            _results.append(line)
            print(line)
            raise
        line = f"criterion {number:>2} PASS  {title}" + (f" ({out.detail})" if out.detail else "")
        _results.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if _results:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_results, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
