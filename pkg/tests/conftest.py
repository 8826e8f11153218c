import pytest

from lambertdde import DelaySystem, Preshape

# Worked systems used throughout: (a, delay coefficients, h).
SINGLE = DelaySystem(-1.0, (-1.0,), 1.0)
TWO_A = DelaySystem(-1.0, (-1.0, -0.5), 1.0)
TWO_B = DelaySystem(-1.0, (0.5, 0.25), 1.0)
THREE = DelaySystem(-1.0, (0.5, -1.0, -1.0), 1.0)
OMEGA_SYS = DelaySystem(0.0, (1.0,), 1.0)

FIXTURES = {"single": SINGLE, "two_a": TWO_A, "two_b": TWO_B, "three": THREE}


def unit_history(sys):
    """phi = 1 on the whole history interval and x0 = 1."""
    return Preshape.constant(1.0, sys.history_span, x0=1.0)


@pytest.fixture(params=sorted(FIXTURES))
def fixture_system(request):
    return FIXTURES[request.param]


ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
