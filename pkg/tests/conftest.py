import pytest
from hypothesis import settings

settings.register_profile("rtflab", max_examples=60, deadline=None)
settings.load_profile("rtflab")

ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, elapsed, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  ({elapsed:.1f} s)  {detail}")


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE
