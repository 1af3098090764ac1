"""Kirkwood quasiprobability tables, conditionals, weak values, and Bayes updates.

The joint table over two orthonormal bases is

    K[a][b] = <b|a> <a|rho|b>

It is complex in general, sums to 1, and its row/column sums reproduce the
Born probabilities in either basis.  Conditioning on a pre/post pair gives

    K[m | a, b] = <b|m><m|a> / <b|a>

which sums to 1 over any complete basis m, and contracts against an
observable's eigenvalues to the weak value <b|A|a>/<b|a>.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .config import DEFAULT_TOLERANCES
from .errors import (
    DimensionMismatch,
    ImaginaryResidue,
    InvariantViolation,
    NearOrthogonalPostSelection,
    NotHermitian,
    VanishingOverlap,
    ZeroEvidence,
)
from .hilbert import (
    DensityMatrix,
    OrthonormalBasis,
    StateVector,
    complex_matrix_to_pairs,
    overlap,
    pairs_to_complex_matrix,
)


@dataclass(frozen=True, eq=False)
class KirkwoodMatrix:
    """Joint quasiprobability table of a density matrix over two bases."""

    values: np.ndarray
    basis_a: OrthonormalBasis
    basis_b: OrthonormalBasis

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=complex, copy=True)
        if arr.shape != (self.basis_a.dim, self.basis_b.dim):
            raise DimensionMismatch(
                f"values shape {arr.shape} does not match bases "
                f"({self.basis_a.dim}, {self.basis_b.dim})"
            )
        tol = DEFAULT_TOLERANCES.kirkwood_sum
        total = complex(arr.sum())
        if abs(total - 1.0) > tol:
            raise ValueError(f"Kirkwood table sums to {total!r}, expected 1")
        row_imag = float(np.max(np.abs(arr.sum(axis=1).imag)))
        col_imag = float(np.max(np.abs(arr.sum(axis=0).imag)))
        if max(row_imag, col_imag) > tol:
            raise ValueError(
                f"Kirkwood row/column sums are not real "
                f"(imaginary residue {max(row_imag, col_imag):.3e})"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def dim_a(self) -> int:
        return self.values.shape[0]

    @property
    def dim_b(self) -> int:
        return self.values.shape[1]

    def to_dict(self) -> dict:
        return {
            "dimA": self.dim_a,
            "dimB": self.dim_b,
            "values": complex_matrix_to_pairs(self.values),
            "basisA": self.basis_a.label,
            "basisB": self.basis_b.label,
        }

    @classmethod
    def from_dict(
        cls, payload: dict, basis_a: OrthonormalBasis, basis_b: OrthonormalBasis
    ) -> "KirkwoodMatrix":
        values = pairs_to_complex_matrix(payload["values"])
        if values.shape != (int(payload["dimA"]), int(payload["dimB"])):
            raise ValueError("dimA/dimB fields do not match the values array")
        for label, basis in ((payload.get("basisA"), basis_a), (payload.get("basisB"), basis_b)):
            if label and basis.label and label != basis.label:
                raise ValueError(f"basis label {label!r} does not match {basis.label!r}")
        return cls(values, basis_a, basis_b)


@dataclass(frozen=True, eq=False)
class ClassicalDistribution:
    """Ordinary probability vector.

    ``imag_residue`` records the largest imaginary part discarded when the
    distribution was extracted from a complex table (0 for native ones).
    """

    probs: np.ndarray
    imag_residue: float = 0.0

    def __post_init__(self) -> None:
        arr = np.array(self.probs, dtype=float, copy=True)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("probs must be a non-empty flat sequence")
        tol = DEFAULT_TOLERANCES.classical_sum
        if float(arr.min()) < -tol:
            raise ValueError(f"negative probability {arr.min()!r}")
        arr[arr < 0.0] = 0.0  # clamp roundoff-level negatives only
        total = float(arr.sum())
        if abs(total - 1.0) > tol:
            raise ValueError(f"probabilities sum to {total!r}, expected 1")
        arr.setflags(write=False)
        object.__setattr__(self, "probs", arr)

    @property
    def dim(self) -> int:
        return self.probs.size


@dataclass(frozen=True, eq=False)
class ConditionalKirkwood:
    """Complex conditional distribution over a basis, given a pre/post pair."""

    values: np.ndarray
    pre: StateVector
    post: StateVector
    basis_m: OrthonormalBasis

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=complex, copy=True)
        if arr.ndim != 1 or arr.size != self.basis_m.dim:
            raise DimensionMismatch(
                f"values length {arr.size} does not match basis dimension {self.basis_m.dim}"
            )
        total = complex(arr.sum())
        if abs(total - 1.0) > DEFAULT_TOLERANCES.conditional_sum:
            raise ValueError(f"conditional table sums to {total!r}, expected 1")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def dim_m(self) -> int:
        return self.values.size


# --- operations -----------------------------------------------------------------

def kirkwood(
    rho: DensityMatrix, basis_a: OrthonormalBasis, basis_b: OrthonormalBasis
) -> KirkwoodMatrix:
    """Joint table K[a][b] = <b|a><a|rho|b>."""
    if not (rho.dim == basis_a.dim == basis_b.dim):
        raise DimensionMismatch(
            f"dimensions disagree: rho {rho.dim}, basis A {basis_a.dim}, basis B {basis_b.dim}"
        )
    va, vb = basis_a.matrix, basis_b.matrix
    cross = va.conj().T @ vb              # cross[a, b] = <a|b>
    sandwich = va.conj().T @ rho.entries @ vb  # sandwich[a, b] = <a|rho|b>
    return KirkwoodMatrix(cross.conj() * sandwich, basis_a, basis_b)


def _real_marginal(sums: np.ndarray) -> ClassicalDistribution:
    residue = float(np.max(np.abs(sums.imag)))
    if residue >= DEFAULT_TOLERANCES.imag_residue:
        raise ImaginaryResidue(
            f"marginal imaginary residue {residue:.3e} exceeds discard threshold",
            residue=residue,
        )
    return ClassicalDistribution(sums.real, imag_residue=residue)


def marginal_over_b(k: KirkwoodMatrix) -> ClassicalDistribution:
    """Born distribution in basis A: real part of row sums."""
    return _real_marginal(k.values.sum(axis=1))


def marginal_over_a(k: KirkwoodMatrix) -> ClassicalDistribution:
    """Born distribution in basis B: real part of column sums."""
    return _real_marginal(k.values.sum(axis=0))


def conditional_kirkwood(
    basis_m: OrthonormalBasis, pre: StateVector, post: StateVector
) -> ConditionalKirkwood:
    """Conditional table K[m | pre, post] = <post|m><m|pre> / <post|pre>."""
    if not (basis_m.dim == pre.dim == post.dim):
        raise DimensionMismatch(
            f"dimensions disagree: basis {basis_m.dim}, pre {pre.dim}, post {post.dim}"
        )
    den = overlap(post, pre)
    if abs(den) < DEFAULT_TOLERANCES.overlap_eps:
        raise NearOrthogonalPostSelection(
            f"pre/post overlap magnitude {abs(den):.3e} is numerically zero",
            overlap=abs(den),
        )
    m_dag = basis_m.matrix.conj().T
    post_in_m = m_dag @ post.amplitudes   # <m|post>
    pre_in_m = m_dag @ pre.amplitudes     # <m|pre>
    values = post_in_m.conj() * pre_in_m / den
    return ConditionalKirkwood(values, pre, post, basis_m)


def weak_value(observable: np.ndarray, pre: StateVector, post: StateVector) -> complex:
    """Weak value <post|A|pre> / <post|pre> for a Hermitian observable."""
    a = np.asarray(observable, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"observable must be square, got shape {a.shape}")
    if a.shape[0] != pre.dim or pre.dim != post.dim:
        raise DimensionMismatch(
            f"dimensions disagree: observable {a.shape[0]}, pre {pre.dim}, post {post.dim}"
        )
    defect = float(np.max(np.abs(a - a.conj().T)))
    if defect > DEFAULT_TOLERANCES.herm:
        raise NotHermitian(f"observable Hermiticity defect {defect:.3e}", defect=defect)
    den = overlap(post, pre)
    if abs(den) < DEFAULT_TOLERANCES.overlap_eps:
        raise NearOrthogonalPostSelection(
            f"pre/post overlap magnitude {abs(den):.3e} is numerically zero",
            overlap=abs(den),
        )
    return complex(np.vdot(post.amplitudes, a @ pre.amplitudes) / den)


def reconstruct_density(k: KirkwoodMatrix) -> DensityMatrix:
    """Rebuild the density matrix from its Kirkwood table.

    Uses rho_ab = K[a][b] / <b|a> so that kirkwood -> reconstruct_density is
    an exact round trip.
    """
    va, vb = k.basis_a.matrix, k.basis_b.matrix
    cross = va.conj().T @ vb  # cross[a, b] = <a|b>; <b|a> is its conjugate
    min_overlap = float(np.min(np.abs(cross)))
    if min_overlap < DEFAULT_TOLERANCES.overlap_eps:
        raise VanishingOverlap(
            f"smallest basis-pair overlap {min_overlap:.3e} is numerically zero",
            min_overlap=min_overlap,
        )
    coeffs = k.values / cross.conj()
    rho = va @ coeffs @ vb.conj().T
    try:
        return DensityMatrix(rho)
    except ValueError as exc:
        raise InvariantViolation(
            f"reconstructed matrix violates density invariants: {exc}"
        ) from exc


def bayes_update(
    prior: ClassicalDistribution,
    likelihood: Iterable[float],
    evidence: float | None = None,
) -> ClassicalDistribution:
    """Posterior p(a|b) = p(a) p(b|a) / p(b); evidence is computed when omitted."""
    lk = np.asarray(list(likelihood) if not isinstance(likelihood, np.ndarray) else likelihood,
                    dtype=float)
    if lk.ndim != 1 or lk.size != prior.dim:
        raise DimensionMismatch(
            f"likelihood length {lk.size} does not match prior length {prior.dim}"
        )
    if float(lk.min()) < 0.0:
        raise ValueError(f"negative likelihood entry {lk.min()!r}")
    computed = float(prior.probs @ lk)
    if evidence is None:
        evidence = computed
    elif abs(evidence - computed) > DEFAULT_TOLERANCES.evidence_match:
        raise ValueError(
            f"supplied evidence {evidence!r} disagrees with contraction {computed!r}"
        )
    if evidence <= 0.0:
        raise ZeroEvidence("evidence must be positive", evidence=float(evidence))
    return ClassicalDistribution(prior.probs * lk / evidence)


def kirkwood_csv_rows(k: KirkwoodMatrix) -> list[tuple[int, int, float, float]]:
    """Flatten a table to (a_index, b_index, re, im) rows in row-major order."""
    rows = []
    for a in range(k.dim_a):
        for b in range(k.dim_b):
            z = k.values[a, b]
            rows.append((a, b, float(z.real), float(z.imag)))
    return rows
