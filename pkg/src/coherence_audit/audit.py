"""Axiom audits (C1, C2a, C2b, C3), the ladder counterexample, and the permutation search."""
from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from . import kernels
from ._accel import thread_count
from .channels import (KrausChannel, apply_channel, build_permutation_unitary, permutation_of,
                       build_swap_unitary, c_offdiag_mass, sample_density_matrix,
                       sample_diagonal_state, sample_incoherent_channel,
                       sample_monomial_unitary, selective_outcomes)
from .errors import DimensionMismatch, DimensionTooLargeForExhaustive, InvalidN, UnknownAxiom
from .linalg import DensityMatrix, Observable, eigh, validate_density
from .measures import (EIG_FLOOR, CoherenceMeasure, EqualSpacingHamiltonian,
                       equal_spacing_hamiltonian, make_measure, qfi_measure)
from .serialize import channel_from_json, channel_to_json, matrix_from_json, matrix_to_json

TOL = 1e-8
AXIOMS = ("C1", "C2a", "C2b", "C3")
MAX_EXHAUSTIVE_DIM = 8
# coherent C1 samples below this off-diagonal mass are not tested for faithfulness
COHERENT_MASS = 1e-3


@dataclass(frozen=True, eq=False)
class ViolationWitness:
    """Concrete inputs showing that ``measure_name`` breaks ``axiom``.

    C1: value_before == value_after == C(rho); delta is the size of the failure.
    C2a: before C(rho), after C(channel(rho)).
    C2b: before C(rho), after sum_n p_n C(rho_n).
    C3: before sum_n p_n C(rho_n), after C(sum_n p_n rho_n); input_state is the mixture.
    """

    measure_name: str
    axiom: str
    input_state: DensityMatrix
    value_before: float
    value_after: float
    delta: float
    seed: int
    tolerance_used: float
    channel: Optional[KrausChannel] = None
    mixture: Optional[tuple] = None  # (weights, states)

    def to_json(self) -> dict:
        mixture = None
        if self.mixture is not None:
            weights, states = self.mixture
            mixture = {"weights": [float(w) for w in weights],
                       "states": [matrix_to_json(s.matrix) for s in states]}
        return {
            "measure_name": self.measure_name,
            "axiom": self.axiom,
            "input_state": matrix_to_json(self.input_state.matrix),
            "channel": None if self.channel is None else channel_to_json(self.channel),
            "mixture": mixture,
            "value_before": float(self.value_before),
            "value_after": float(self.value_after),
            "delta": float(self.delta),
            "seed": int(self.seed),
            "tolerance_used": float(self.tolerance_used),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "ViolationWitness":
        mixture = None
        if doc.get("mixture") is not None:
            mixture = (tuple(doc["mixture"]["weights"]),
                       tuple(validate_density(matrix_from_json(m))
                             for m in doc["mixture"]["states"]))
        channel = doc.get("channel")
        return cls(
            measure_name=doc["measure_name"],
            axiom=doc["axiom"],
            input_state=validate_density(matrix_from_json(doc["input_state"])),
            channel=None if channel is None else channel_from_json(channel),
            mixture=mixture,
            value_before=float(doc["value_before"]),
            value_after=float(doc["value_after"]),
            delta=float(doc["delta"]),
            seed=int(doc["seed"]),
            tolerance_used=float(doc["tolerance_used"]),
        )


@dataclass(frozen=True, eq=False)
class AuditReport:
    measure_name: str
    axiom: str
    n_trials: int
    n_violations: int
    worst_witness: Optional[ViolationWitness]
    seed: int
    tolerance: float

    def to_json(self) -> dict:
        return {
            "measure_name": self.measure_name,
            "axiom": self.axiom,
            "n_trials": self.n_trials,
            "n_violations": self.n_violations,
            "worst_witness": None if self.worst_witness is None else self.worst_witness.to_json(),
            "seed": self.seed,
            "tolerance": self.tolerance,
        }


@dataclass(frozen=True)
class NoViolationFound:
    measure_name: str
    best_delta: float
    n_candidates: int
    tolerance: float

    def to_json(self) -> dict:
        return {"result": "NoViolationFound", "measure_name": self.measure_name,
                "best_delta": float(self.best_delta), "n_candidates": self.n_candidates,
                "tolerance": self.tolerance}


def trial_seed(master: int, index: int) -> int:
    """Independent per-trial seed derived from (master, index)."""
    ss = np.random.SeedSequence([int(master), int(index)])
    return int(ss.generate_state(1, np.uint64)[0])


# --- single-instance checks --------------------------------------------------

def monotonicity_delta(measure: CoherenceMeasure, rho: DensityMatrix,
                       channel: KrausChannel) -> tuple:
    before = measure(rho)
    after = measure(apply_channel(rho, channel))
    return before, after, after - before


def selective_delta(measure: CoherenceMeasure, rho: DensityMatrix,
                    channel: KrausChannel) -> tuple:
    """Vanished branches contribute nothing to the average."""
    before = measure(rho)
    ens = selective_outcomes(rho, channel)
    after = sum(o.probability * measure(o.state) for o in ens.outcomes if o.state is not None)
    return before, float(after), float(after) - before


def convexity_delta(measure: CoherenceMeasure, weights: Sequence[float],
                    states: Sequence[DensityMatrix]) -> tuple:
    w = np.asarray(weights, dtype=float)
    mix = validate_density(sum(p * s.matrix for p, s in zip(w, states)))
    average = float(sum(p * measure(s) for p, s in zip(w, states)))
    value = measure(mix)
    return mix, average, value, value - average


def replay(witness: ViolationWitness, measure: CoherenceMeasure) -> tuple:
    """Recompute (value_before, value_after) from the stored inputs."""
    if witness.axiom == "C1":
        v = measure(witness.input_state)
        return v, v
    if witness.axiom == "C2a":
        before, after, _ = monotonicity_delta(measure, witness.input_state, witness.channel)
        return before, after
    if witness.axiom == "C2b":
        before, after, _ = selective_delta(measure, witness.input_state, witness.channel)
        return before, after
    if witness.axiom == "C3":
        _, average, value, _ = convexity_delta(measure, *witness.mixture)
        return average, value
    raise UnknownAxiom(witness.axiom)


# --- the ladder counterexample -----------------------------------------------

def counterexample(n_max: int, tol: float = TOL) -> ViolationWitness:
    """(|0> + |1>)/sqrt2 under the swap of levels 1 and n_max, with H = diag(0..n_max).

    QFI goes from 1 to n_max**2.
    """
    if n_max < 2:
        raise InvalidN(f"n_max must be >= 2 (the swap must move level 1 upward), got {n_max}")
    dim = n_max + 1
    H = equal_spacing_hamiltonian(n_max)
    psi = np.zeros(dim, dtype=np.complex128)
    psi[0] = psi[1] = 1 / np.sqrt(2)
    rho = validate_density(np.outer(psi, psi.conj()))
    swap = build_swap_unitary(dim, 1, n_max)
    before, after, delta = monotonicity_delta(qfi_measure(H), rho, swap)
    return ViolationWitness("qfi", "C2a", rho, before, after, delta, 0, tol, channel=swap)


def _pins_counterexample(measure: CoherenceMeasure, dim: int) -> bool:
    H = measure.hamiltonian
    return (measure.name == "qfi" and isinstance(H, EqualSpacingHamiltonian)
            and H.dim == dim and dim >= 3)


# --- randomized audits -------------------------------------------------------

def _random_state(rng: np.random.Generator, dim: int) -> DensityMatrix:
    rank = int(rng.integers(1, dim + 1))
    return sample_density_matrix(dim, rank, rng)


def _c1_trial(measure, dim, i, seed, tol):
    rng = np.random.default_rng(seed)
    if i % 2 == 0:
        rho = sample_diagonal_state(dim, rng)
        value = measure(rho)
        delta = abs(value)
    else:
        rho = _random_state(rng, dim)
        value = measure(rho)
        mass = c_offdiag_mass(rho)
        delta = -value
        if mass > COHERENT_MASS and value <= tol:
            # coherence the measure failed to register
            delta = max(delta, mass)
    if delta > tol:
        return ViolationWitness(measure.name, "C1", rho, value, value, delta, seed, tol)
    return None


def _c2a_trial(measure, dim, i, seed, tol):
    rng = np.random.default_rng(seed)
    rho = _random_state(rng, dim)
    channel = sample_incoherent_channel(dim, int(rng.integers(1, 4)), rng)
    before, after, delta = monotonicity_delta(measure, rho, channel)
    if delta > tol:
        return ViolationWitness(measure.name, "C2a", rho, before, after, delta, seed, tol,
                                channel=channel)
    return None


def _c2b_trial(measure, dim, i, seed, tol):
    rng = np.random.default_rng(seed)
    rho = _random_state(rng, dim)
    channel = sample_incoherent_channel(dim, int(rng.integers(2, 5)), rng)
    before, after, delta = selective_delta(measure, rho, channel)
    if delta > tol:
        return ViolationWitness(measure.name, "C2b", rho, before, after, delta, seed, tol,
                                channel=channel)
    return None


def _c3_trial(measure, dim, i, seed, tol):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(2, 4))
    states = tuple(_random_state(rng, dim) for _ in range(k))
    weights = tuple(float(w) for w in rng.dirichlet(np.ones(k)))
    mix, average, value, delta = convexity_delta(measure, weights, states)
    if delta > tol:
        return ViolationWitness(measure.name, "C3", mix, average, value, delta, seed, tol,
                                mixture=(weights, states))
    return None


def _pinned_c2a(measure, dim, tol):
    w = counterexample(dim - 1, tol)
    before, after, delta = monotonicity_delta(measure, w.input_state, w.channel)
    return ViolationWitness(measure.name, "C2a", w.input_state, before, after, delta, 0, tol,
                            channel=w.channel)


def _pinned_c2b(measure, dim, tol):
    w = counterexample(dim - 1, tol)
    before, after, delta = selective_delta(measure, w.input_state, w.channel)
    return ViolationWitness(measure.name, "C2b", w.input_state, before, after, delta, 0, tol,
                            channel=w.channel)


def _run(measure, axiom, trial_fn, pinned_fn, dim, n_trials, seed, tol) -> AuditReport:
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    if dim < 2:
        raise ValueError("audits need dim >= 2")
    pinned = pinned_fn is not None and _pins_counterexample(measure, dim)
    indices = range(1 if pinned else 0, n_trials)

    def one(i):
        return trial_fn(measure, dim, i, trial_seed(seed, i), tol)

    workers = min(thread_count(), len(indices)) if len(indices) else 1
    if workers <= 1:
        results = [one(i) for i in indices]
    else:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(one, indices))
    if pinned:
        results.insert(0, pinned_fn(measure, dim, tol))
        results = [r if r is None or r.delta > tol else None for r in results]

    found = [w for w in results if w is not None]
    worst = None
    for w in found:  # first maximum wins, i.e. ties go to the lowest trial index
        if worst is None or w.delta > worst.delta:
            worst = w
    return AuditReport(measure.name, axiom, n_trials, len(found), worst, int(seed), tol)


def audit_c1(measure, dim, n_trials, seed=0, tol=TOL) -> AuditReport:
    return _run(measure, "C1", _c1_trial, None, dim, n_trials, seed, tol)


def audit_c2a(measure, dim, n_trials, seed=0, tol=TOL) -> AuditReport:
    """Incoherent-channel monotonicity; trial 0 is the ladder counterexample for QFI."""
    return _run(measure, "C2a", _c2a_trial, _pinned_c2a, dim, n_trials, seed, tol)


def audit_c2b(measure, dim, n_trials, seed=0, tol=TOL) -> AuditReport:
    return _run(measure, "C2b", _c2b_trial, _pinned_c2b, dim, n_trials, seed, tol)


def audit_c3(measure, dim, n_trials, seed=0, tol=TOL) -> AuditReport:
    return _run(measure, "C3", _c3_trial, None, dim, n_trials, seed, tol)


AUDITS = {"C1": audit_c1, "C2a": audit_c2a, "C2b": audit_c2b, "C3": audit_c3}


def run_audit(measure, axiom: str, dim, n_trials, seed=0, tol=TOL) -> AuditReport:
    key = {a.lower(): a for a in AXIOMS}.get(axiom.lower())
    if key is None:
        raise UnknownAxiom(f"unknown axiom {axiom!r}; choose from c1, c2a, c2b, c3, all")
    return AUDITS[key](measure, dim, n_trials, seed, tol)


# --- permutation search ------------------------------------------------------

def _first_best(values: np.ndarray) -> int:
    best = float(np.max(values))
    # values equal up to rounding count as ties
    return int(np.flatnonzero(values >= best - 1e-12 * (1.0 + abs(best)))[0])


def _permuted_values(rho, measure, perms) -> np.ndarray:
    H = measure.hamiltonian
    if measure.name == "qfi" and H is not None and H.is_diagonal():
        spec = eigh(rho.matrix)
        energies = np.ascontiguousarray(np.diag(H.matrix).real)
        return kernels.permuted_qfi_batch(spec.eigenvalues, np.ascontiguousarray(spec.eigenvectors),
                                          energies, np.ascontiguousarray(perms, dtype=np.int64),
                                          EIG_FLOOR)
    d = rho.dim
    out = np.empty(len(perms))
    for n, p in enumerate(perms):
        m = np.empty_like(rho.matrix)
        m[np.ix_(p, p)] = rho.matrix
        out[n] = measure(DensityMatrix(m))
    return out


def search_max_violation(rho: DensityMatrix, H: Optional[Observable],
                         measure: Union[str, CoherenceMeasure], strategy: str = "exhaustive",
                         seed: int = 0, n_samples: int = 1000, tol: float = TOL
                         ) -> Union[ViolationWitness, NoViolationFound]:
    """Maximise C(U rho U^dag) - C(rho) over incoherent unitaries.

    ``exhaustive`` scans all dim! permutations in lexicographic order (ties go to
    the smallest); ``random`` draws ``n_samples`` permutations and ``n_samples``
    random-phase monomial unitaries.
    """
    if isinstance(measure, str):
        measure = make_measure(measure, H, dim=rho.dim)
    elif H is not None and measure.hamiltonian is not None and \
            not np.array_equal(H.matrix, measure.hamiltonian.matrix):
        raise ValueError("measure is bound to a different Hamiltonian")
    if measure.hamiltonian is not None and measure.hamiltonian.dim != rho.dim:
        raise DimensionMismatch(f"state dim {rho.dim} != Hamiltonian dim {measure.hamiltonian.dim}")
    d = rho.dim
    before = measure(rho)

    if strategy == "exhaustive":
        if d > MAX_EXHAUSTIVE_DIM:
            raise DimensionTooLargeForExhaustive(
                f"exhaustive search needs dim <= {MAX_EXHAUSTIVE_DIM} (got {d}); use the random strategy")
        perms = np.array(list(itertools.permutations(range(d))), dtype=np.int64)
        values = _permuted_values(rho, measure, perms)
        candidates = [build_permutation_unitary(perms[_first_best(values)])]
        n_candidates = len(perms)
    elif strategy == "random":
        if n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        rng = np.random.default_rng(seed)
        perms = np.array([rng.permutation(d) for _ in range(n_samples)], dtype=np.int64)
        values = _permuted_values(rho, measure, perms)
        best_perm = build_permutation_unitary(perms[_first_best(values)])
        monomials = [sample_monomial_unitary(d, rng) for _ in range(n_samples)]
        mono_values = np.array([measure(apply_channel(rho, u)) for u in monomials])
        candidates = [best_perm, monomials[_first_best(mono_values)]]
        n_candidates = 2 * n_samples
    else:
        raise ValueError(f"unknown strategy {strategy!r}; use 'exhaustive' or 'random'")

    best = None
    for u in candidates:
        after = measure(apply_channel(rho, u))
        if best is None or after - before > best[1] - before + 1e-12 * (1.0 + abs(best[1])):
            best = (u, after)
    u, after = best
    delta = after - before
    if delta > tol:
        return ViolationWitness(measure.name, "C2a", rho, before, after, delta, int(seed), tol,
                                channel=u)
    return NoViolationFound(measure.name, delta, n_candidates, tol)
