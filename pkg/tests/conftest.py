import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from topsqueeze.evolve import Propagator
from topsqueeze.gaussian import full_quad_cov, physicality_min_eig, symplectic_eigenvalues

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def assert_physical(state, photons_before=None, propagator=None, pure=True):
    """Invariants every evolved state must satisfy."""
    assert np.abs(state.nmat - state.nmat.conj().T).max() < 1e-12
    assert np.abs(state.mmat - state.mmat.T).max() < 1e-12
    v = full_quad_cov(state)
    assert physicality_min_eig(v) >= -1e-10
    if pure:
        assert np.abs(symplectic_eigenvalues(v) - 0.25).max() < 1e-9
    if photons_before is not None:
        total = np.trace(state.nmat).real
        assert abs(total - photons_before) <= 1e-10 * max(photons_before, 1.0)
    if propagator is not None:
        u = propagator.umat if isinstance(propagator, Propagator) else np.asarray(propagator)
        assert np.abs(u.conj().T @ u - np.eye(u.shape[0])).max() < 1e-10


@pytest.fixture
def rng():
    return np.random.default_rng(2024)



_ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def record_acceptance(request):
    """Store a one-line verdict for the terminal summary and echo it."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, {})

    def record(key, passed, detail):
        lines[str(key)] = f"criterion {key}: {'PASS' if passed else 'FAIL'}  {detail}"
        print(lines[str(key)])
        return passed

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for key in sorted(lines):
            terminalreporter.write_line(lines[key])
