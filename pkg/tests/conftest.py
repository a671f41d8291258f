import functools
import warnings

import pytest

from rplscl.classical import PotentialConfig
from rplscl.quantum import solve_spectrum

# criterion number -> list of (check name, passed, detail)
ACCEPTANCE = {}


def record(criterion, check, passed, detail=""):
    ACCEPTANCE.setdefault(criterion, []).append((check, bool(passed), detail))


@functools.lru_cache(maxsize=None)
def spectrum(alpha, eps_max):
    """Quantum spectrum shared between test modules (solved once per session)."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return solve_spectrum(PotentialConfig(alpha), eps_max, threads=4)


@pytest.fixture(scope="session")
def get_spectrum():
    return spectrum


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        checks = ACCEPTANCE[n]
        ok = all(p for _, p, _ in checks)
        tr.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}")
        for name, p, detail in checks:
            tr.write_line(f"    [{'ok' if p else 'FAIL'}] {name}: {detail}")
