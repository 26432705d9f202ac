"""State and observable types, validation, and Hermitian spectral decomposition."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import (ConvergenceFailure, DimensionMismatch, NegativeEigenvalue,
                     NonFinite, NonRealExpectation, NotHermitian, NotNormalized,
                     NotSquare, TraceDeviation)

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-10
NORM_TOL = 1e-10


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128, copy=True)
    a.setflags(write=False)
    return a


def as_matrix(matrix) -> np.ndarray:
    """Coerce to a finite complex 2-d array."""
    m = np.asarray(matrix, dtype=np.complex128)
    if m.ndim != 2:
        raise NotSquare(f"expected a 2-d matrix, got shape {m.shape}")
    if m.size == 0:
        raise NotSquare("empty matrix")
    if not np.all(np.isfinite(m)):
        raise NonFinite("matrix has NaN or Inf entries")
    return m


def _square(matrix) -> np.ndarray:
    m = as_matrix(matrix)
    if m.shape[0] != m.shape[1]:
        raise NotSquare(f"matrix is {m.shape[0]}x{m.shape[1]}, not square")
    return m


def hermitian_part(matrix, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Return (M + M^dag)/2, refusing matrices whose asymmetry exceeds ``tol``."""
    m = _square(matrix)
    asym = float(np.max(np.abs(m - m.conj().T)))
    if asym > tol:
        raise NotHermitian(f"max |M - M^dag| = {asym:.3e} exceeds tolerance {tol:.1e}")
    return (m + m.conj().T) / 2


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated state. Build through :func:`validate_density`."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(self.matrix))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", _frozen(self.amplitudes))

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def density(self) -> DensityMatrix:
        v = self.amplitudes
        return DensityMatrix(np.outer(v, v.conj()))


@dataclass(frozen=True, eq=False)
class Observable:
    """Hermitian operator written in the fixed reference basis."""

    matrix: np.ndarray
    basis_labels: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(self.matrix))
        if self.basis_labels is not None:
            labels = tuple(str(s) for s in self.basis_labels)
            if len(labels) != self.dim:
                raise DimensionMismatch(
                    f"{len(labels)} basis labels for a {self.dim}-dimensional observable")
            object.__setattr__(self, "basis_labels", labels)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def is_diagonal(self, tol: float = 0.0) -> bool:
        off = self.matrix - np.diag(np.diag(self.matrix))
        return bool(np.all(np.abs(off) <= tol))


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Ascending eigenvalues; column ``k`` of ``eigenvectors`` pairs with ``eigenvalues[k]``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray = field(repr=False)

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def validate_density(matrix, tol: float = HERMITIAN_TOL) -> DensityMatrix:
    """Check trace, Hermiticity and positivity, returning the symmetrised state.

    Raises NotSquare, NotHermitian, TraceDeviation or NegativeEigenvalue.
    """
    m = hermitian_part(matrix, tol)
    tr = np.trace(m).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise TraceDeviation(f"trace is {tr!r}, expected 1 within {TRACE_TOL:.0e}")
    lo = float(np.linalg.eigvalsh(m)[0])
    if lo < -PSD_TOL:
        raise NegativeEigenvalue(f"smallest eigenvalue {lo:.3e} below -{PSD_TOL:.0e}")
    return DensityMatrix(m)


def validate_pure(amplitudes) -> PureState:
    v = np.asarray(amplitudes, dtype=np.complex128)
    if v.ndim != 1 or v.size == 0:
        raise NotSquare(f"expected a non-empty vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise NonFinite("amplitudes contain NaN or Inf")
    norm = float(np.linalg.norm(v))
    if abs(norm - 1.0) > NORM_TOL:
        raise NotNormalized(f"norm is {norm!r}, expected 1 within {NORM_TOL:.0e}")
    return PureState(v)


def observable(matrix, basis_labels: Optional[Sequence[str]] = None,
               tol: float = HERMITIAN_TOL) -> Observable:
    return Observable(hermitian_part(matrix, tol), basis_labels)


def eigh(matrix, tol: float = HERMITIAN_TOL) -> Spectrum:
    """Hermitian eigendecomposition (LAPACK ``heevd`` via numpy)."""
    m = hermitian_part(matrix, tol)
    try:
        w, v = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    return Spectrum(w, v)


def expectation(state: PureState, obs: Observable, tol: float = 1e-10) -> float:
    """<psi|H|psi> as a real number."""
    if state.dim != obs.dim:
        raise DimensionMismatch(f"state dim {state.dim} != observable dim {obs.dim}")
    psi = state.amplitudes
    val = np.vdot(psi, obs.matrix @ psi)
    if abs(val.imag) > tol:
        raise NonRealExpectation(f"imaginary part {val.imag:.3e} exceeds {tol:.0e}")
    return float(val.real)


def maximally_mixed(dim: int) -> DensityMatrix:
    return DensityMatrix(np.eye(dim) / dim)


def basis_state(dim: int, k: int) -> PureState:
    v = np.zeros(dim, dtype=np.complex128)
    v[k] = 1.0
    return PureState(v)
