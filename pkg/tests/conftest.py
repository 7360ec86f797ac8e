import importlib

import pytest

from successodds import _pykernels, kernels

_ACCEPTANCE: list[str] = []


def _backends():
    out = [pytest.param(_pykernels, id="python")]
    try:
        out.append(pytest.param(importlib.import_module("successodds._ckernels"), id="cython"))
    except ImportError:
        out.append(pytest.param(None, id="cython", marks=pytest.mark.skip(reason="extension not built")))
    return out


@pytest.fixture(scope="module", params=_backends())
def backend(request):
    return request.param


@pytest.fixture(params=["python", "compiled"])
def kernel_mode(request, monkeypatch):
    """Run a test once through each kernel backend of ``successodds.kernels``."""
    if request.param == "python":
        monkeypatch.setattr(kernels, "_ckernels", None)
    elif kernels._ckernels is None:
        pytest.skip("extension not built")
    return request.param


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion, then assert."""

    def record(number, title, checks):
        ok = all(passed for _, passed in checks)
        lines = [f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}"]
        lines += [f"       {'ok  ' if passed else 'FAIL'} {desc}" for desc, passed in checks]
        _ACCEPTANCE.extend(lines)
        print("\n".join(lines))
        failed = [desc for desc, passed in checks if not passed]
        assert not failed, f"criterion {number} failed: {failed}"

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
