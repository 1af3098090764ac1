"""Finite-dimensional states, density matrices, and orthonormal bases.

All value types are immutable after construction: arrays are copied in and
frozen, and every invariant is checked at construction time.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .config import DEFAULT_TOLERANCES
from .errors import DimensionMismatch, InvalidRank, ZeroVector

# Dense linear algebra stays comfortable on a desk machine up to this size.
MAX_DIM = 4096


def _frozen_array(values, dtype, ndim: int, name: str) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    if arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    arr.setflags(write=False)
    return arr


def _check_dim(dim: int) -> None:
    if not 1 <= dim <= MAX_DIM:
        raise ValueError(f"dimension {dim} outside supported range 1..{MAX_DIM}")


@dataclass(frozen=True, eq=False)
class StateVector:
    """Unit-norm complex amplitude vector."""

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        arr = _frozen_array(self.amplitudes, complex, 1, "amplitudes")
        _check_dim(arr.size)
        nrm = float(np.linalg.norm(arr))
        if abs(nrm - 1.0) > DEFAULT_TOLERANCES.norm:
            raise ValueError(f"state vector norm is {nrm!r}, expected 1")
        object.__setattr__(self, "amplitudes", arr)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def to_dict(self) -> dict:
        return {"dim": self.dim, "amplitudes": complex_seq_to_pairs(self.amplitudes)}

    @classmethod
    def from_dict(cls, payload: dict) -> "StateVector":
        amps = pairs_to_complex_seq(payload["amplitudes"])
        if int(payload["dim"]) != amps.size:
            raise ValueError("dim field does not match amplitude count")
        return cls(amps)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite matrix."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        arr = _frozen_array(self.entries, complex, 2, "entries")
        if arr.shape[0] != arr.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {arr.shape}")
        _check_dim(arr.shape[0])
        tol = DEFAULT_TOLERANCES
        herm_defect = float(np.max(np.abs(arr - arr.conj().T)))
        if herm_defect > tol.herm:
            raise ValueError(f"density matrix not Hermitian (defect {herm_defect:.3e})")
        trace = complex(np.trace(arr))
        if abs(trace - 1.0) > tol.norm:
            raise ValueError(f"density matrix trace is {trace!r}, expected 1")
        min_eig = float(np.min(np.linalg.eigvalsh(arr)))
        if min_eig < -tol.psd:
            raise ValueError(f"density matrix not PSD (min eigenvalue {min_eig:.3e})")
        object.__setattr__(self, "entries", arr)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def to_dict(self) -> dict:
        return {"dim": self.dim, "entries": complex_matrix_to_pairs(self.entries)}

    @classmethod
    def from_dict(cls, payload: dict) -> "DensityMatrix":
        entries = pairs_to_complex_matrix(payload["entries"])
        if int(payload["dim"]) != entries.shape[0]:
            raise ValueError("dim field does not match matrix size")
        return cls(entries)


@dataclass(frozen=True, eq=False)
class OrthonormalBasis:
    """Complete orthonormal basis: exactly ``dim`` unit vectors of dimension ``dim``."""

    vectors: tuple[StateVector, ...]
    label: str = ""
    # column matrix with vectors[k] in column k, built at construction
    matrix: np.ndarray = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        vecs = tuple(self.vectors)
        if not vecs:
            raise ValueError("basis needs at least one vector")
        dim = vecs[0].dim
        if any(v.dim != dim for v in vecs):
            raise DimensionMismatch("basis vectors have mixed dimensions")
        if len(vecs) != dim:
            raise ValueError(f"basis of dimension {dim} needs {dim} vectors, got {len(vecs)}")
        mat = np.column_stack([v.amplitudes for v in vecs])
        gram_defect = float(np.max(np.abs(mat.conj().T @ mat - np.eye(dim))))
        if gram_defect > DEFAULT_TOLERANCES.ortho:
            raise ValueError(f"basis is not orthonormal (Gram defect {gram_defect:.3e})")
        mat.setflags(write=False)
        object.__setattr__(self, "vectors", vecs)
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return len(self.vectors)

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "label": self.label,
            "vectors": [complex_seq_to_pairs(v.amplitudes) for v in self.vectors],
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "OrthonormalBasis":
        vectors = tuple(StateVector(pairs_to_complex_seq(v)) for v in payload["vectors"])
        basis = cls(vectors, label=str(payload.get("label", "")))
        if int(payload["dim"]) != basis.dim:
            raise ValueError("dim field does not match vector count")
        return basis


# --- construction helpers -----------------------------------------------------

def make_state(amplitudes: Iterable[complex]) -> StateVector:
    """Normalize raw amplitudes into a StateVector.

    Raises ZeroVector when every amplitude is below the zero threshold.
    """
    arr = np.asarray(list(amplitudes) if not isinstance(amplitudes, np.ndarray) else amplitudes,
                     dtype=complex)
    if arr.ndim != 1:
        raise ValueError("amplitudes must be a flat sequence")
    if arr.size == 0 or float(np.max(np.abs(arr))) < DEFAULT_TOLERANCES.zero_vector:
        raise ZeroVector("cannot normalize a numerically zero vector", dim=int(arr.size))
    return StateVector(arr / np.linalg.norm(arr))


def overlap(x: StateVector, y: StateVector) -> complex:
    """Inner product <x|y> = sum_k conj(x_k) y_k."""
    if x.dim != y.dim:
        raise DimensionMismatch(
            f"overlap of dimension {x.dim} with {y.dim}", dim_x=x.dim, dim_y=y.dim
        )
    return complex(np.vdot(x.amplitudes, y.amplitudes))


def pure_density(state: StateVector) -> DensityMatrix:
    """Rank-1 projector |s><s|."""
    return DensityMatrix(np.outer(state.amplitudes, state.amplitudes.conj()))


def computational_basis(dim: int, label: str = "computational") -> OrthonormalBasis:
    """Standard basis e_0 .. e_{dim-1}."""
    _check_dim(dim)
    eye = np.eye(dim, dtype=complex)
    return OrthonormalBasis(tuple(StateVector(eye[:, k]) for k in range(dim)), label=label)


def fourier_basis(dim: int, label: str = "fourier") -> OrthonormalBasis:
    """Discrete Fourier basis; vector m has amplitudes exp(i*m*2*pi*k/dim)/sqrt(dim).

    Mutually unbiased with the computational basis: all cross overlaps have
    magnitude 1/sqrt(dim).
    """
    _check_dim(dim)
    k = np.arange(dim)
    vectors = tuple(
        StateVector(np.exp(2j * np.pi * m * k / dim) / np.sqrt(dim)) for m in range(dim)
    )
    return OrthonormalBasis(vectors, label=label)


def hadamard_basis(dim: int, label: str = "hadamard") -> OrthonormalBasis:
    """Tensor-power Hadamard basis; dim must be a power of two."""
    _check_dim(dim)
    if dim & (dim - 1):
        raise ValueError(f"hadamard basis needs a power-of-two dimension, got {dim}")
    h = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
    mat = np.array([[1.0]])
    while mat.shape[0] < dim:
        mat = np.kron(mat, h)
    return OrthonormalBasis(tuple(StateVector(mat[:, k]) for k in range(dim)), label=label)


def random_basis(dim: int, seed: int, label: str = "random") -> OrthonormalBasis:
    """Haar-ish random orthonormal basis, deterministic in the seed."""
    _check_dim(dim)
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(g)
    # fix the QR phase ambiguity so the result is unique and reproducible
    phases = np.diagonal(r) / np.abs(np.diagonal(r))
    q = q * phases.conj()
    return OrthonormalBasis(tuple(StateVector(q[:, k]) for k in range(dim)), label=label)


def random_density(dim: int, rank: int, seed: int) -> DensityMatrix:
    """Random mixture of ``rank`` pure states, deterministic in the seed."""
    _check_dim(dim)
    if not 1 <= rank <= dim:
        raise InvalidRank(f"rank must be in 1..{dim}, got {rank}", dim=dim, rank=rank)
    rng = np.random.default_rng(seed)
    weights = rng.random(rank) + 1e-3  # bounded away from zero, then normalized
    weights /= weights.sum()
    rho = np.zeros((dim, dim), dtype=complex)
    for w in weights:
        amps = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        amps /= np.linalg.norm(amps)
        rho += w * np.outer(amps, amps.conj())
    return DensityMatrix(rho)


NAMED_BASES = {
    "computational": computational_basis,
    "fourier": fourier_basis,
    "hadamard": hadamard_basis,
}


def named_basis(name: str, dim: int) -> OrthonormalBasis:
    """Look up one of the built-in basis families by name."""
    try:
        factory = NAMED_BASES[name]
    except KeyError:
        raise ValueError(
            f"unknown basis {name!r}; choose from {sorted(NAMED_BASES)}"
        ) from None
    return factory(dim)


# --- JSON-level encoding of complex data ---------------------------------------

def complex_to_pair(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def pair_to_complex(pair: Sequence[float]) -> complex:
    re, im = pair
    return complex(float(re), float(im))


def complex_seq_to_pairs(values: np.ndarray) -> list[list[float]]:
    return [complex_to_pair(z) for z in np.asarray(values, dtype=complex)]


def pairs_to_complex_seq(pairs: Sequence[Sequence[float]]) -> np.ndarray:
    return np.array([pair_to_complex(p) for p in pairs], dtype=complex)


def complex_matrix_to_pairs(matrix: np.ndarray) -> list[list[list[float]]]:
    return [complex_seq_to_pairs(row) for row in np.asarray(matrix, dtype=complex)]


def pairs_to_complex_matrix(rows: Sequence[Sequence[Sequence[float]]]) -> np.ndarray:
    return np.array([[pair_to_complex(p) for p in row] for row in rows], dtype=complex)
