import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

from cpdl.calculus import clear_caches  # noqa: E402

ACCEPTANCE = {}


def record(n, ok, detail):
    ACCEPTANCE[n] = (ok, detail)
    line = 'criterion %d: %s  %s' % (n, 'PASS' if ok else 'FAIL', detail)
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section('acceptance criteria')
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line('criterion %d: %s  %s' % (n, 'PASS' if ok else 'FAIL', detail))


def pytest_sessionfinish(session):
    clear_caches()
