"""Finite-dimensional complex linear algebra: states, projectors, unitaries, tensors.

Everything here is a pure function over immutable values; arrays are frozen
after construction so instances can be shared freely between threads. Dense
numpy matrices only, aimed at desk scale (dims up to ~64, tensor rank up to ~6).

Tensor index order is big-endian: in a product the first factor varies
slowest, i.e. ``kron(a, b)[i * dim_b + j] == a[i] * b[j]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DegenerateSpanError,
    DimensionError,
    EmptyTensorError,
    InvariantError,
    NormalizationError,
)

# Absolute tolerances, entrywise max-norm unless stated otherwise.
HERMITIAN_TOL = 1e-10
IDEMPOTENT_TOL = 1e-10
UNITARY_TOL = 1e-10
NORMALIZATION_TOL = 1e-12  # on <v|v> - 1
SPAN_RESIDUAL_TOL = 1e-10
RANK_TRACE_TOL = 1e-8


def _frozen_complex_matrix(m, name: str) -> np.ndarray:
    a = np.array(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise DimensionError(f"{name} must be a nonempty square matrix, got shape {a.shape}")
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class TensorFactorization:
    """Ordered factor dimensions of a tensor-product space."""

    factor_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.factor_dims)
        if not dims or any(d < 1 for d in dims):
            raise DimensionError(f"factor dims must be positive, got {self.factor_dims}")
        object.__setattr__(self, "factor_dims", dims)

    @property
    def total_dim(self) -> int:
        n = 1
        for d in self.factor_dims:
            n *= d
        return n

    @property
    def rank(self) -> int:
        return len(self.factor_dims)


@dataclass(frozen=True, eq=False)
class StateVector:
    """Complex amplitude vector. Physical states are normalized; intermediate
    results of projections may not be."""

    amplitudes: np.ndarray
    factorization: TensorFactorization | None = field(default=None)

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=np.complex128)
        if a.ndim != 1 or a.size == 0:
            raise DimensionError(f"amplitudes must be a nonempty 1-D vector, got shape {a.shape}")
        if self.factorization is not None and self.factorization.total_dim != a.size:
            raise DimensionError(
                f"factorization covers dim {self.factorization.total_dim}, vector has dim {a.size}"
            )
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @classmethod
    def of(cls, amplitudes: Iterable[complex]) -> "StateVector":
        return cls(np.array(list(amplitudes), dtype=np.complex128))

    @classmethod
    def basis(cls, dim: int, index: int) -> "StateVector":
        if not 0 <= index < dim:
            raise DimensionError(f"basis index {index} outside dim {dim}")
        a = np.zeros(dim, dtype=np.complex128)
        a[index] = 1.0
        return cls(a)

    @property
    def space_dim(self) -> int:
        return int(self.amplitudes.size)

    def norm_sq(self) -> float:
        return float(np.real(np.vdot(self.amplitudes, self.amplitudes)))

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, tol: float = NORMALIZATION_TOL) -> bool:
        return abs(self.norm_sq() - 1.0) <= tol

    def require_normalized(self, tol: float = NORMALIZATION_TOL) -> None:
        if not self.is_normalized(tol):
            raise NormalizationError(f"state has <v|v> = {self.norm_sq()!r}, expected 1")

    def normalized(self) -> "StateVector":
        n = self.norm()
        if n == 0.0:
            raise NormalizationError("cannot normalize the zero vector")
        return StateVector(self.amplitudes / n, self.factorization)


@dataclass(frozen=True, eq=False)
class Projector:
    """Hermitian idempotent matrix (orthogonal projector)."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen_complex_matrix(self.matrix, "projector")
        if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
            raise InvariantError("projector matrix is not Hermitian within tolerance")
        if np.max(np.abs(m @ m - m)) > IDEMPOTENT_TOL:
            raise InvariantError("projector matrix is not idempotent within tolerance")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls, dim: int) -> "Projector":
        return cls(np.eye(dim, dtype=np.complex128))

    @classmethod
    def zero(cls, dim: int) -> "Projector":
        return cls(np.zeros((dim, dim), dtype=np.complex128))

    @property
    def space_dim(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def rank(self) -> int:
        """Rank read off the trace, which is integral for projectors."""
        tr = float(np.real(np.trace(self.matrix)))
        r = round(tr)
        if abs(tr - r) > RANK_TRACE_TOL:
            raise InvariantError(f"projector trace {tr} is not close to an integer")
        return int(r)


@dataclass(frozen=True, eq=False)
class UnitaryMap:
    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen_complex_matrix(self.matrix, "unitary")
        if np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))) > UNITARY_TOL:
            raise InvariantError("matrix is not unitary within tolerance")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls, dim: int) -> "UnitaryMap":
        return cls(np.eye(dim, dtype=np.complex128))

    @property
    def space_dim(self) -> int:
        return int(self.matrix.shape[0])


def _check_same_dim(a: int, b: int, what: str) -> None:
    if a != b:
        raise DimensionError(f"{what}: dimension mismatch {a} vs {b}")


def inner_product(u: StateVector, v: StateVector) -> complex:
    """<u|v>, conjugate-linear in the first argument."""
    _check_same_dim(u.space_dim, v.space_dim, "inner_product")
    return complex(np.vdot(u.amplitudes, v.amplitudes))


def projector_from_span(vectors: Sequence[StateVector]) -> Projector:
    """Orthogonal projector onto the span of the given vectors.

    The input list must be linearly independent; near-dependence is detected
    when a Gram-Schmidt residual drops to or below SPAN_RESIDUAL_TOL.
    """
    if not vectors:
        raise DegenerateSpanError("empty spanning set")
    dim = vectors[0].space_dim
    basis: list[np.ndarray] = []
    for v in vectors:
        _check_same_dim(v.space_dim, dim, "projector_from_span")
        n = v.norm()
        if n == 0.0:
            raise DegenerateSpanError("zero vector in spanning set")
        w = v.amplitudes / n
        for q in basis:           # two passes for numerical stability
            w = w - np.vdot(q, w) * q
        for q in basis:
            w = w - np.vdot(q, w) * q
        r = float(np.linalg.norm(w))
        if r <= SPAN_RESIDUAL_TOL:
            raise DegenerateSpanError("spanning set is linearly dependent within tolerance")
        basis.append(w / r)
    q = np.column_stack(basis)
    return Projector(q @ q.conj().T)


def ketbra(state: StateVector) -> Projector:
    """Rank-one projector |s><s| for a normalized state."""
    state.require_normalized()
    a = state.amplitudes
    return Projector(np.outer(a, a.conj()))


def apply_projector(p: Projector, v: StateVector) -> StateVector:
    """Pv. The result is generally unnormalized."""
    _check_same_dim(p.space_dim, v.space_dim, "apply_projector")
    return StateVector(p.matrix @ v.amplitudes, v.factorization)


def born_probability(p: StateVector, proj: Projector) -> float:
    """||P p||^2 for a normalized state p; clamped into [0, 1]."""
    p.require_normalized()
    _check_same_dim(p.space_dim, proj.space_dim, "born_probability")
    w = proj.matrix @ p.amplitudes
    val = float(np.real(np.vdot(w, w)))
    if val < -NORMALIZATION_TOL or val > 1.0 + NORMALIZATION_TOL:
        raise InvariantError(f"probability {val!r} outside [0,1] beyond tolerance")
    return min(max(val, 0.0), 1.0)


def complement_projector(p: Projector) -> Projector:
    return Projector(np.eye(p.space_dim, dtype=np.complex128) - p.matrix)


def tensor_vectors(factors: Sequence[StateVector]) -> StateVector:
    """Kronecker product of the factors, first factor varying slowest."""
    if not factors:
        raise EmptyTensorError("tensor product of no vectors")
    amp = reduce(np.kron, (f.amplitudes for f in factors))
    fact = TensorFactorization(tuple(f.space_dim for f in factors))
    return StateVector(amp, fact)


def tensor_projectors(factors: Sequence[Projector]) -> Projector:
    """Kronecker product of projectors, same ordering as tensor_vectors."""
    if not factors:
        raise EmptyTensorError("tensor product of no projectors")
    m = reduce(np.kron, (f.matrix for f in factors))
    return Projector(m)


def conjugate(p: Projector, u: UnitaryMap) -> Projector:
    """U P U^dagger."""
    _check_same_dim(p.space_dim, u.space_dim, "conjugate")
    return Projector(u.matrix @ p.matrix @ u.matrix.conj().T)


def complex_pair(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def vector_to_json(v: StateVector) -> list[list[float]]:
    """Amplitudes as [re, im] pairs, basis order."""
    return [complex_pair(z) for z in v.amplitudes]


def matrix_to_json(m: np.ndarray) -> list[list[float]]:
    """Row-major flattening to [re, im] pairs."""
    return [complex_pair(z) for z in np.asarray(m).reshape(-1)]
