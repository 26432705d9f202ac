"""Acceptance gate: one test per exit criterion, at its stated tolerance and time budget.

A PASS/FAIL line per criterion is printed in the pytest terminal summary.
"""
import time

import numpy as np
import pytest

from coherence_audit import audit as au
from coherence_audit.channels import is_incoherent_kraus, permutation_of, sample_pure_state
from coherence_audit.cli import main
from coherence_audit.linalg import PureState, observable, validate_density
from coherence_audit.measures import equal_spacing_hamiltonian, make_measure, qfi_pure, qfi_spectral
from coherence_audit.serialize import dumps

RESULTS = {}


def record(number, title, ok, detail):
    RESULTS[number] = (title, ok, detail)
    assert ok, f"criterion {number} ({title}) failed: {detail}"


@pytest.fixture(scope="module", autouse=True)
def warm_jit():
    # numba compiles (or loads its cache) on first call; that is not part of the timed work
    au.counterexample(2)
    au.search_max_violation(validate_density(np.eye(3) / 3), equal_spacing_hamiltonian(2), "qfi")


def ladder_density(dim):
    psi = np.zeros(dim)
    psi[:2] = 1 / np.sqrt(2)
    return validate_density(np.outer(psi, psi))


def test_1_counterexample_reproduction():
    t0 = time.perf_counter()
    errs = []
    for n in range(2, 11):
        w = au.counterexample(n)
        errs.append(max(abs(w.value_before - 1.0), abs(w.value_after - n * n)))
    elapsed = time.perf_counter() - t0
    worst = max(errs)
    record(1, "counterexample 1 -> N^2, N=2..10", worst <= 1e-9 and elapsed < 1.0,
           f"max error {worst:.2e} (tol 1e-9), {elapsed:.3f}s (< 1s)")


def test_2_witness_channel_incoherent():
    ok = all(is_incoherent_kraus(au.counterexample(n).channel) for n in range(2, 11))
    record(2, "counterexample unitary is incoherent", ok, "N=2..10")


def test_3_pure_state_equivalence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(20260101)
    worst = 0.0
    for k in range(100):
        d = 2 + k % 11
        psi = PureState(sample_pure_state(d, rng))
        H = observable(np.diag(rng.standard_normal(d)))
        f_pure = qfi_pure(psi, H)
        worst = max(worst, abs(qfi_spectral(psi.density(), H) - f_pure) / (1 + f_pure))
    elapsed = time.perf_counter() - t0
    record(3, "qfi_spectral == qfi_pure on 100 pure states", worst <= 1e-8 and elapsed < 5.0,
           f"max relative gap {worst:.2e} (tol 1e-8), {elapsed:.2f}s (< 5s)")


def _control_reports():
    reports = []
    for name in ("l1", "rel_ent"):
        for d in range(2, 7):
            m = make_measure(name)
            for axiom in au.AXIOMS:
                reports.append(au.run_audit(m, axiom, d, 1000, seed=7, tol=1e-8))
    return reports


def test_4_control_monotonicity():
    t0 = time.perf_counter()
    reports = _control_reports()
    elapsed = time.perf_counter() - t0
    bad = [(r.measure_name, r.axiom, r.n_violations) for r in reports if r.n_violations]
    record(4, "l1 / rel_ent clean on C1, C2a, C2b, C3", not bad and elapsed < 60.0,
           f"{len(reports)} audits x 1000 trials, dims 2-6, violations {bad or 0}, "
           f"{elapsed:.1f}s (< 60s)")


def test_5_qfi_audit_flags_failure(capsys):
    t0 = time.perf_counter()
    details, ok = [], True
    for d in range(3, 7):
        r = au.audit_c2a(make_measure("qfi", dim=d), d, 1000, seed=0)
        need = (d - 1) ** 2 - 1
        ok &= r.n_violations >= 1 and r.worst_witness.delta >= need - 1e-9
        details.append(f"dim {d}: {r.n_violations} viol, worst {r.worst_witness.delta:.3g} >= {need}")
    code = main(["audit", "--measure", "qfi", "--axiom", "c2a", "--dim", "4", "--trials", "200"])
    capsys.readouterr()
    elapsed = time.perf_counter() - t0
    ok &= code == 2 and elapsed < 10.0
    record(5, "QFI C2a audit reports the violation", ok,
           "; ".join(details) + f"; CLI exit {code}; {elapsed:.2f}s (< 10s)")


def test_6_qfi_convexity():
    t0 = time.perf_counter()
    r = au.audit_c3(make_measure("qfi", dim=4), 4, 500, seed=0, tol=1e-8)
    elapsed = time.perf_counter() - t0
    record(6, "QFI convex over 500 mixtures", r.n_violations == 0 and elapsed < 10.0,
           f"{r.n_violations} violations, {elapsed:.2f}s (< 10s)")


def test_7_exhaustive_search():
    t0 = time.perf_counter()
    H = equal_spacing_hamiltonian(3)
    w = au.search_max_violation(ladder_density(4), H, "qfi", "exhaustive")
    elapsed = time.perf_counter() - t0
    perm = permutation_of(w.channel)
    paper_delta = au.counterexample(3).delta
    ok = (abs(w.delta - 8.0) <= 1e-9 and {perm[0], perm[1]} == {0, 3}
          and w.delta >= paper_delta - 1e-9 and elapsed < 1.0)
    record(7, "exhaustive search optimum at n_max=3", ok,
           f"delta {w.delta:.12g}, permutation {perm}, {elapsed:.3f}s (< 1s)")


def test_8_determinism():
    H = equal_spacing_hamiltonian(3)
    runs = []
    for _ in range(2):
        docs = [r.to_json() for r in _control_reports()]
        docs += [au.audit_c2a(make_measure("qfi", dim=d), d, 1000, seed=0).to_json()
                 for d in range(3, 7)]
        docs.append(au.audit_c3(make_measure("qfi", dim=4), 4, 500, seed=0).to_json())
        docs.append(au.search_max_violation(ladder_density(4), H, "qfi").to_json())
        docs.append(au.search_max_violation(ladder_density(4), H, "qfi", "random",
                                            seed=5, n_samples=200).to_json())
        runs.append(dumps(docs))
    record(8, "reruns are byte-identical", runs[0] == runs[1],
           f"{len(runs[0])} bytes of serialized reports compared")
