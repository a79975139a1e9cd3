import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from znthomae.curve import CurveSpec
from znthomae.kernels import KernelContext
from znthomae.periods import period_matrix

settings.register_profile(
    "default", deadline=None, max_examples=25, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def hutch():
    spec = CurveSpec(3, 1, (0.0, 0.3, 1.0))
    return spec, period_matrix(spec)


@pytest.fixture(scope="session")
def curves():
    """A handful of curves reused across modules, keyed by (N, m)."""
    out = {}
    for (N, m), bp in {
        (2, 1): (0.0, 0.4, 1.3),
        (2, 2): (0.0, 0.7, 1.5, 2.6, 3.2),
        (3, 1): (-0.5, 0.2, 1.1),
        (3, 2): (0.0, 0.8, 1.7, 2.5, 3.6),
        (4, 1): (0.0, 0.45, 1.2),
    }.items():
        spec = CurveSpec(N, m, bp)
        out[N, m] = (spec, period_matrix(spec))
    return out


@pytest.fixture(scope="session")
def kernel_ctx(curves):
    cache = {}

    def get(N, m):
        if (N, m) not in cache:
            spec, pd = curves[N, m]
            cache[N, m] = KernelContext(spec, pd)
        return cache[N, m]

    return get


def seeded_points(spec, n, seed):
    rng = np.random.default_rng(seed)
    lo, hi = spec.branch_points[0], spec.branch_points[-1]
    span = hi - lo
    return [complex(a, b) for a, b in zip(rng.uniform(lo - 0.1 * span, hi + 0.1 * span, n),
                                         rng.uniform(0.2 * span, 0.8 * span, n))]


ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
