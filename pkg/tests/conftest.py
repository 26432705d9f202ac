import numpy as np
import pytest
from hypothesis import settings

from coherence_audit import validate_density

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def plus_state():
    psi = np.array([1, 1]) / np.sqrt(2)
    return validate_density(np.outer(psi, psi))


def ladder_state(dim, top=1):
    """(|0> + |top>)/sqrt2 as amplitudes."""
    psi = np.zeros(dim, dtype=complex)
    psi[0] = psi[top] = 1 / np.sqrt(2)
    return psi


def random_hermitian(rng, dim):
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (a + a.conj().T) / 2


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if not test_acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(test_acceptance.RESULTS):
        title, ok, detail = test_acceptance.RESULTS[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number}. {title}: {detail}")
