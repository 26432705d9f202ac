"""Kraus channels, incoherence predicates, and samplers for incoherent operations."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import (DimensionMismatch, EqualIndices, IncompleteChannel,
                     IndexOutOfRange, NotABijection, NotSquare)
from .linalg import DensityMatrix, as_matrix, validate_density

COMPLETENESS_TOL = 1e-9
INCOHERENCE_TOL = 1e-10
P_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Ordered Kraus operators stacked as an ``(n_ops, dim, dim)`` array."""

    operators: np.ndarray

    def __post_init__(self):
        ops = np.array(self.operators, dtype=np.complex128, copy=True)
        if ops.ndim == 2:
            ops = ops[None]
        if ops.ndim != 3 or ops.shape[0] < 1 or ops.shape[1] != ops.shape[2]:
            raise NotSquare(f"Kraus operators must be square, got shape {ops.shape}")
        ops.setflags(write=False)
        object.__setattr__(self, "operators", ops)

    @property
    def dim(self) -> int:
        return self.operators.shape[1]

    @property
    def n_ops(self) -> int:
        return self.operators.shape[0]

    def completeness_error(self) -> float:
        s = np.einsum("nki,nkj->ij", self.operators.conj(), self.operators)
        return float(np.max(np.abs(s - np.eye(self.dim))))


def kraus_channel(operators: Sequence, tol: float = COMPLETENESS_TOL) -> KrausChannel:
    """Build a channel after checking sum_n A_n^dag A_n = I."""
    ops = [as_matrix(a) for a in operators]
    if not ops:
        raise IncompleteChannel("a channel needs at least one Kraus operator")
    if len({a.shape for a in ops}) != 1:
        raise DimensionMismatch("Kraus operators have differing shapes")
    ch = KrausChannel(np.stack(ops))
    err = ch.completeness_error()
    if err > tol:
        raise IncompleteChannel(f"max |sum A^dag A - I| = {err:.3e} exceeds {tol:.0e}")
    return ch


@dataclass(frozen=True)
class Outcome:
    probability: float
    state: Optional[DensityMatrix]

    @property
    def vanished(self) -> bool:
        """True for branches at or below the probability floor (no state kept)."""
        return self.state is None


@dataclass(frozen=True)
class OutcomeEnsemble:
    outcomes: tuple

    def probabilities(self) -> np.ndarray:
        return np.array([o.probability for o in self.outcomes])

    def mixture(self) -> np.ndarray:
        d = next(o.state.dim for o in self.outcomes if o.state is not None)
        out = np.zeros((d, d), dtype=np.complex128)
        for o in self.outcomes:
            if o.state is not None:
                out += o.probability * o.state.matrix
        return out


def is_incoherent_state(rho: DensityMatrix, tol: float = INCOHERENCE_TOL) -> bool:
    m = rho.matrix
    off = np.abs(m - np.diag(np.diag(m)))
    return bool(np.all(off <= tol))


def is_incoherent_kraus(channel: KrausChannel, tol: float = INCOHERENCE_TOL) -> bool:
    """At most one entry of modulus > tol in every column of every operator."""
    counts = (np.abs(channel.operators) > tol).sum(axis=1)
    return bool(np.all(counts <= 1))


def _check_dims(rho: DensityMatrix, channel: KrausChannel):
    if rho.dim != channel.dim:
        raise DimensionMismatch(f"state dim {rho.dim} != channel dim {channel.dim}")


def apply_channel(rho: DensityMatrix, channel: KrausChannel) -> DensityMatrix:
    _check_dims(rho, channel)
    a = channel.operators
    out = np.einsum("nij,jk,nlk->il", a, rho.matrix, a.conj())
    return validate_density(out)


def selective_outcomes(rho: DensityMatrix, channel: KrausChannel,
                       p_floor: float = P_FLOOR) -> OutcomeEnsemble:
    """Per-operator probabilities and normalised post-measurement states.

    Branches with p_n <= p_floor keep their slot (aligned with the Kraus index)
    but carry no state.
    """
    _check_dims(rho, channel)
    outcomes = []
    for a in channel.operators:
        branch = a @ rho.matrix @ a.conj().T
        p = float(np.trace(branch).real)
        if p <= p_floor:
            outcomes.append(Outcome(max(p, 0.0), None))
        else:
            outcomes.append(Outcome(p, validate_density(branch / p)))
    return OutcomeEnsemble(tuple(outcomes))


def build_permutation_unitary(perm: Sequence[int]) -> KrausChannel:
    """Single-operator channel with P|k> = |perm[k]>."""
    p = np.asarray(perm)
    d = p.shape[0] if p.ndim == 1 else 0
    if d == 0 or not np.issubdtype(p.dtype, np.integer) or \
            not np.array_equal(np.sort(p), np.arange(d)):
        raise NotABijection(f"{list(np.ravel(p))} is not a permutation of 0..{max(d - 1, 0)}")
    u = np.zeros((d, d), dtype=np.complex128)
    u[p, np.arange(d)] = 1.0
    return KrausChannel(u)


def build_swap_unitary(dim: int, a: int, b: int) -> KrausChannel:
    """Exchange basis states ``a`` and ``b``, identity elsewhere."""
    for idx in (a, b):
        if not 0 <= idx < dim:
            raise IndexOutOfRange(f"index {idx} outside 0..{dim - 1}")
    if a == b:
        raise EqualIndices(f"swap needs two distinct indices, got {a} twice")
    perm = np.arange(dim)
    perm[[a, b]] = perm[[b, a]]
    return build_permutation_unitary(perm)


def build_dephasing(dim: int) -> KrausChannel:
    ops = np.zeros((dim, dim, dim), dtype=np.complex128)
    ops[np.arange(dim), np.arange(dim), np.arange(dim)] = 1.0
    return KrausChannel(ops)


def permutation_of(channel: KrausChannel) -> Optional[tuple]:
    """Recover ``perm`` from a single monomial operator, or None."""
    if channel.n_ops != 1 or not is_incoherent_kraus(channel):
        return None
    u = channel.operators[0]
    perm = np.argmax(np.abs(u), axis=0)
    if not np.array_equal(np.sort(perm), np.arange(channel.dim)):
        return None
    return tuple(int(k) for k in perm)


def _complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def sample_incoherent_channel(dim: int, n_ops: int, seed) -> KrausChannel:
    """Random incoherent channel, deterministic in ``seed``.

    Column j of operator n holds one amplitude c[n, j] at row f_n(j). Operator 0
    routes columns by a random permutation; the others draw f_n uniformly, and
    where several columns share a row only one of them (chosen at random) keeps
    a nonzero amplitude. Distinct columns therefore never overlap inside one
    operator, so normalising each column of c over n gives completeness exactly.
    """
    if n_ops < 1:
        raise ValueError("n_ops must be >= 1")
    rng = np.random.default_rng(seed)
    rows = rng.integers(0, dim, size=(n_ops, dim))
    rows[0] = rng.permutation(dim)
    active = np.zeros((n_ops, dim), dtype=bool)
    active[0] = True
    for n in range(1, n_ops):
        order = rng.permutation(dim)
        taken = set()
        for j in order:
            if rows[n, j] not in taken:
                taken.add(rows[n, j])
                active[n, j] = True
    amps = _complex_normal(rng, (n_ops, dim)) * active
    amps /= np.linalg.norm(amps, axis=0)
    ops = np.zeros((n_ops, dim, dim), dtype=np.complex128)
    for n in range(n_ops):
        ops[n, rows[n], np.arange(dim)] = amps[n]
    return KrausChannel(ops)


def sample_monomial_unitary(dim: int, seed) -> KrausChannel:
    """Random permutation with random phases."""
    rng = np.random.default_rng(seed)
    perm = rng.permutation(dim)
    phases = np.exp(2j * np.pi * rng.random(dim))
    u = np.zeros((dim, dim), dtype=np.complex128)
    u[perm, np.arange(dim)] = phases
    return KrausChannel(u)


def sample_density_matrix(dim: int, rank: int, seed) -> DensityMatrix:
    """Ginibre state G G^dag / Tr(G G^dag) with G of shape (dim, rank)."""
    if not 1 <= rank <= dim:
        raise ValueError(f"rank must lie in 1..{dim}, got {rank}")
    rng = np.random.default_rng(seed)
    g = _complex_normal(rng, (dim, rank))
    rho = g @ g.conj().T
    return validate_density(rho / np.trace(rho).real)


def sample_pure_state(dim: int, seed) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v = _complex_normal(rng, dim)
    return v / np.linalg.norm(v)


def sample_diagonal_state(dim: int, seed) -> DensityMatrix:
    rng = np.random.default_rng(seed)
    p = rng.dirichlet(np.ones(dim))
    return DensityMatrix(np.diag(p))


def c_offdiag_mass(rho: DensityMatrix) -> float:
    """Sum of off-diagonal moduli (same quantity as the l1 coherence)."""
    m = rho.matrix
    return float(np.abs(m).sum() - np.abs(np.diag(m)).sum())
