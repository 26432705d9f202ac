"""Quantum Fisher information and two reference coherence measures."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import kernels
from .errors import DimensionMismatch, UnknownMeasure
from .linalg import DensityMatrix, Observable, PureState, eigh, expectation

EIG_FLOOR = 1e-12
ENTROPY_FLOOR = 1e-14

MEASURE_NAMES = ("qfi", "l1", "rel_ent")


@dataclass(frozen=True, eq=False)
class EqualSpacingHamiltonian(Observable):
    """diag(0, 1, ..., n_max) on an (n_max + 1)-level system."""

    n_max: int = 0


def equal_spacing_hamiltonian(n_max: int) -> EqualSpacingHamiltonian:
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    levels = np.arange(n_max + 1, dtype=float)
    return EqualSpacingHamiltonian(np.diag(levels), tuple(str(k) for k in range(n_max + 1)),
                                   n_max=n_max)


def _match(dim_a: int, dim_b: int):
    if dim_a != dim_b:
        raise DimensionMismatch(f"state dim {dim_a} != Hamiltonian dim {dim_b}")


def qfi_spectral(rho: DensityMatrix, H: Observable, eig_floor: float = EIG_FLOOR) -> float:
    """F = 2 sum_ij (l_i - l_j)^2 / (l_i + l_j) |<l_i|H|l_j>|^2.

    Ordered pairs with l_i + l_j <= eig_floor are skipped.
    """
    _match(rho.dim, H.dim)
    spec = eigh(rho.matrix)
    v = spec.eigenvectors
    m = v.conj().T @ H.matrix @ v
    f = kernels.qfi_pair_sum(spec.eigenvalues, np.abs(m) ** 2, eig_floor)
    return max(float(f), 0.0)


def qfi_pure(psi: PureState, H: Observable) -> float:
    """Four times the variance of H in |psi>."""
    _match(psi.dim, H.dim)
    mean = expectation(psi, H)
    h_psi = H.matrix @ psi.amplitudes
    second = float(np.vdot(h_psi, h_psi).real)
    return max(4.0 * (second - mean * mean), 0.0)


def c_l1(rho: DensityMatrix) -> float:
    return float(kernels.offdiag_abs_sum(np.ascontiguousarray(rho.matrix)))


def von_neumann_entropy(eigenvalues: np.ndarray, floor: float = ENTROPY_FLOOR) -> float:
    p = eigenvalues[eigenvalues >= floor]
    return float(-np.sum(p * np.log(p)))


def c_rel_ent(rho: DensityMatrix) -> float:
    """S(diag part of rho) - S(rho), natural log."""
    s_rho = von_neumann_entropy(np.linalg.eigvalsh(rho.matrix))
    s_diag = von_neumann_entropy(np.diag(rho.matrix).real)
    return max(s_diag - s_rho, 0.0)


@dataclass(frozen=True, eq=False)
class CoherenceMeasure:
    """A named functional on states, with its Hamiltonian (if any) bound in."""

    name: str
    evaluate: Callable[[DensityMatrix], float]
    hamiltonian: Optional[Observable] = None

    def __call__(self, rho: DensityMatrix) -> float:
        return self.evaluate(rho)


def qfi_measure(H: Observable) -> CoherenceMeasure:
    return CoherenceMeasure("qfi", lambda rho: qfi_spectral(rho, H), H)


def make_measure(name: str, H: Optional[Observable] = None,
                 dim: Optional[int] = None) -> CoherenceMeasure:
    """Look up ``name`` in the registry.

    ``qfi`` needs a Hamiltonian; without one, the equal-spacing Hamiltonian of
    dimension ``dim`` is used.
    """
    if name == "qfi":
        if H is None:
            if dim is None:
                raise ValueError("qfi needs a Hamiltonian or a dimension")
            H = equal_spacing_hamiltonian(dim - 1)
        return qfi_measure(H)
    if name == "l1":
        return CoherenceMeasure("l1", c_l1, H)
    if name == "rel_ent":
        return CoherenceMeasure("rel_ent", c_rel_ent, H)
    raise UnknownMeasure(f"unknown measure {name!r}; choose from {', '.join(MEASURE_NAMES)}")
