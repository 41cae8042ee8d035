from pathlib import Path

import pytest

from infodiet import _kernels

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "infodiet" / "data" / "fixtures"
GOLDEN = Path(__file__).resolve().parent / "golden"

BACKENDS = [_kernels.NUMPY] + ([_kernels.NUMBA] if _kernels.NUMBA is not None else [])


@pytest.fixture(params=BACKENDS, ids=lambda b: b.name)
def backend(request, monkeypatch):
    """Route every library kernel call through one backend."""
    b = request.param
    for name in ("diet_tally", "topic_counts", "select_topics", "kl_rows"):
        monkeypatch.setattr(_kernels, name, getattr(b, name))
    return b


@pytest.fixture
def mini_dir():
    return FIXTURES / "mini"


@pytest.fixture
def skewed_dir():
    return FIXTURES / "skewed"


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.RESULTS, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
