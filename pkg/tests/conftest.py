import pytest

from isqlab.families import gaussian
from isqlab.scattering import half_wave_limit, schrodinger_wave_limit
from isqlab.sector import RadialProfile, make_sector

# forward Schrodinger run used by several modules: n = 3, a = 1, l = 0
BIG_RADIUS = 1100.0
BIG_SIZE = 3000
SCHEDULE = (10.0, 20.0, 40.0, 80.0)


def big_gaussian(alpha=0.5, beta=0.0):
    sec = make_sector(3, 1.0, 0)
    return RadialProfile.from_function(sec, gaussian(sec, alpha, beta), "free", BIG_RADIUS, BIG_SIZE)


@pytest.fixture(scope="session")
def big_sector():
    return make_sector(3, 1.0, 0)


@pytest.fixture(scope="session")
def big_input():
    return big_gaussian()


@pytest.fixture(scope="session")
def forward_report(big_sector, big_input):
    return schrodinger_wave_limit(big_sector, 1.0, big_input, "forward", SCHEDULE)


@pytest.fixture(scope="session")
def half_wave_report(big_sector, big_input):
    return half_wave_limit(big_sector, 1.0, big_input, "forward", 1, SCHEDULE)


# acceptance bookkeeping: criterion -> list of (ok, detail), printed after the run
ACCEPTANCE = {}


@pytest.fixture
def record():
    def _record(criterion, ok, detail):
        ACCEPTANCE.setdefault(criterion, []).append((bool(ok), detail))
        print(f"criterion {criterion:2d} part: {'PASS' if ok else 'FAIL'}  {detail}")

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for k in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[k]
        ok = all(p for p, _ in parts)
        detail = "; ".join(d for _, d in parts)
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
