"""Dense Hermitian linear algebra: operators, spectral data, functional calculus.

All types are immutable after construction (arrays are marked
read-only), so any operation here may be called concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .errors import (
    DimensionMismatch,
    EigensolverFailure,
    EvaluationError,
    HermiticityViolation,
    NonSquareError,
)
from .intervals import Interval, IntervalUnion

__all__ = [
    "HermitianOperator",
    "SpectralDecomposition",
    "DensityMatrix",
    "StateVector",
    "validate_hermitian",
    "spectral_decompose",
    "spectral_projector",
    "apply_borel",
    "expectation",
    "trace_expectation",
    "commutator_norm",
    "commutes",
]

# Tolerances (see module-level conventions): hermiticity is relative to
# the Frobenius norm of the input, eigenvalue merging to the spectral
# norm, the commutation threshold to the product of Frobenius norms.
HERMITICITY_RTOL = 1e-12
EIGENVALUE_MERGE_RTOL = 1e-9
COMMUTATOR_RTOL = 1e-10
DENSITY_TRACE_TOL = 1e-10
DENSITY_EIGENVALUE_FLOOR = -1e-10


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def _as_complex_matrix(raw) -> np.ndarray:
    m = np.array(raw, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NonSquareError(f"expected a square matrix, got shape {m.shape}")
    return m


@dataclass(frozen=True)
class HermitianOperator:
    """A d x d complex Hermitian matrix."""

    entries: np.ndarray
    correction: float = 0.0  # Frobenius norm of the symmetrized-away skew part

    def __post_init__(self):
        object.__setattr__(self, "entries", _readonly(np.array(self.entries, dtype=complex)))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class StateVector:
    """A nonzero complex vector; the zero vector is rejected."""

    components: np.ndarray

    def __post_init__(self):
        v = np.array(self.components, dtype=complex).reshape(-1)
        if v.size == 0 or not np.any(v):
            raise ValueError("state vector must be nonzero")
        object.__setattr__(self, "components", _readonly(v))

    @property
    def dim(self) -> int:
        return self.components.shape[0]

    def normalized(self) -> np.ndarray:
        v = self.components
        return v / np.linalg.norm(v)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, positive semidefinite, unit trace."""

    entries: np.ndarray

    def __post_init__(self):
        m = _as_complex_matrix(self.entries)
        skew = np.linalg.norm(m - m.conj().T)
        if skew > HERMITICITY_RTOL * max(1.0, np.linalg.norm(m)):
            raise HermiticityViolation(f"density matrix not Hermitian (skew norm {skew:.3e})")
        m = (m + m.conj().T) / 2.0
        trace = np.trace(m).real
        if abs(trace - 1.0) > DENSITY_TRACE_TOL:
            raise ValueError(f"density matrix trace {trace!r} != 1")
        eigenvalues = np.linalg.eigvalsh(m)
        if eigenvalues.min() < DENSITY_EIGENVALUE_FLOOR:
            raise ValueError(f"density matrix has negative eigenvalue {eigenvalues.min():.3e}")
        object.__setattr__(self, "entries", _readonly(m))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class SpectralDecomposition:
    """Distinct eigenvalues (ascending) with orthogonal spectral projectors."""

    eigenvalues: np.ndarray  # shape (m,), strictly increasing
    projectors: np.ndarray  # shape (m, d, d)
    source_norm: float = field(init=False)  # max |eigenvalue|

    def __post_init__(self):
        w = _readonly(np.array(self.eigenvalues, dtype=float))
        p = _readonly(np.array(self.projectors, dtype=complex))
        object.__setattr__(self, "eigenvalues", w)
        object.__setattr__(self, "projectors", p)
        object.__setattr__(self, "source_norm", float(np.max(np.abs(w))) if w.size else 0.0)

    @property
    def dim(self) -> int:
        return self.projectors.shape[1]

    def reconstruct(self) -> np.ndarray:
        """Sum of eigenvalue * projector; reproduces the source operator."""
        return np.tensordot(self.eigenvalues, self.projectors, axes=1)


def validate_hermitian(raw) -> HermitianOperator:
    """Accept a square matrix as Hermitian, symmetrizing rounding residue.

    The skew part (H - H^dagger)/2 is folded back into the operator and
    its Frobenius norm recorded as `correction`; above tolerance the
    input is rejected instead.
    """
    m = _as_complex_matrix(raw)
    skew = (m - m.conj().T) / 2.0
    correction = float(np.linalg.norm(skew))
    if correction > HERMITICITY_RTOL * max(1.0, float(np.linalg.norm(m))):
        raise HermiticityViolation(
            f"matrix is not Hermitian within tolerance (skew Frobenius norm {correction:.3e})"
        )
    return HermitianOperator(entries=m - skew, correction=correction)


def spectral_decompose(T: HermitianOperator) -> SpectralDecomposition:
    """Eigendecompose T and merge near-degenerate eigenvalues.

    Eigenvalues closer than EIGENVALUE_MERGE_RTOL * max(1, ||T||_2) are
    clustered into a single spectral projector; the cluster carries the
    mean of its eigenvalues.
    """
    try:
        w, v = np.linalg.eigh(T.entries)
    except np.linalg.LinAlgError as exc:
        raise EigensolverFailure(str(exc)) from exc
    scale = max(1.0, float(np.max(np.abs(w))) if w.size else 0.0)
    gap_tol = EIGENVALUE_MERGE_RTOL * scale
    eigenvalues = []
    projectors = []
    start = 0
    for stop in range(1, len(w) + 1):
        if stop == len(w) or w[stop] - w[stop - 1] > gap_tol:
            block = v[:, start:stop]
            proj = block @ block.conj().T
            projectors.append((proj + proj.conj().T) / 2.0)
            eigenvalues.append(float(np.mean(w[start:stop])))
            start = stop
    return SpectralDecomposition(
        eigenvalues=np.array(eigenvalues), projectors=np.array(projectors)
    )


BorelSetDescriptor = Union[Interval, IntervalUnion, Callable[[float], bool]]


def spectral_projector(S: SpectralDecomposition, B: BorelSetDescriptor) -> np.ndarray:
    """Projector onto the eigenspaces whose eigenvalue lies in B.

    B is an Interval, an IntervalUnion, or any membership predicate.
    The empty selection yields the zero matrix.
    """
    member = B.contains if hasattr(B, "contains") else B
    out = np.zeros((S.dim, S.dim), dtype=complex)
    for lam, proj in zip(S.eigenvalues, S.projectors):
        if member(float(lam)):
            out += proj
    return out


def apply_borel(S: SpectralDecomposition, b) -> HermitianOperator:
    """Functional calculus: the operator with eigenvalue b(lambda_i) on each eigenspace.

    `b` is a BorelExpr or any real-valued callable defined on the
    eigenvalue list.
    """
    try:
        values = np.array([float(b(lam)) for lam in S.eigenvalues], dtype=float)
    except Exception as exc:
        raise EvaluationError(f"function undefined on the spectrum: {exc}") from exc
    if not np.all(np.isfinite(values)):
        raise EvaluationError("function takes a non-finite value on the spectrum")
    entries = np.tensordot(values, S.projectors, axes=1)
    return HermitianOperator(entries=(entries + entries.conj().T) / 2.0)


def _check_dims(a: int, b: int) -> None:
    if a != b:
        raise DimensionMismatch(f"dimension mismatch: {a} vs {b}")


def expectation(T: HermitianOperator, psi: StateVector) -> float:
    """<T psi, psi> / <psi, psi>; depends only on the ray of psi."""
    _check_dims(T.dim, psi.dim)
    v = psi.components
    num = np.vdot(v, T.entries @ v).real
    return float(num / np.vdot(v, v).real)


def trace_expectation(T: HermitianOperator, D: DensityMatrix) -> float:
    """Trace[T D]."""
    _check_dims(T.dim, D.dim)
    return float(np.einsum("ij,ji->", T.entries, D.entries).real)


def commutator_norm(A: HermitianOperator, B: HermitianOperator) -> float:
    """Frobenius norm of AB - BA."""
    _check_dims(A.dim, B.dim)
    return float(np.linalg.norm(A.entries @ B.entries - B.entries @ A.entries))


def commutes(A: HermitianOperator, B: HermitianOperator) -> bool:
    """Commutation test at the relative threshold used across the package."""
    threshold = (
        COMMUTATOR_RTOL
        * max(1.0, float(np.linalg.norm(A.entries)))
        * max(1.0, float(np.linalg.norm(B.entries)))
    )
    return commutator_norm(A, B) <= threshold
