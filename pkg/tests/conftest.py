import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from quaddeg import diamond

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

SANDWICH_SLACK = 1e-8

# every diamond-norm SDP solved during the session, as (d_in, d_out, lower, value, upper)
AUDIT = []
# one line per acceptance criterion, filled in by test_acceptance
ACCEPTANCE = {}


def install_audit():
    """Wrap the diamond-norm entry point so every solve records its bounds; returns an undo."""
    original = diamond.diamond_norm_solution

    def audited(phi):
        value, sol = original(phi)
        lower = diamond.diamond_lower_entangled(phi, diamond.maximally_entangled(phi.d_in))
        upper = diamond.diamond_upper_maxnorm(phi)
        AUDIT.append((phi.d_in, phi.d_out, lower, value, upper))
        return value, sol

    diamond.diamond_norm_solution = audited

    def restore():
        diamond.diamond_norm_solution = original

    return restore


@pytest.fixture(autouse=True, scope="session")
def _audit_diamond():
    restore = install_audit()
    yield
    restore()


def sandwich_violations():
    return [a for a in AUDIT if not a[2] - SANDWICH_SLACK <= a[3] <= a[4] + SANDWICH_SLACK]


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(20240611))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
    bad = sandwich_violations()
    terminalreporter.write_line(
        f"diamond sandwich audit: {len(AUDIT)} SDP evaluations, {len(bad)} violations"
    )


def pytest_sessionfinish(session, exitstatus):
    if sandwich_violations() and exitstatus == 0:
        session.exitstatus = 1
