"""Centralized numerical tolerance policy.

Every magic threshold used by the library lives in one frozen record so a
run can be audited (and overridden) in a single place.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances shared across the library.

    Attributes
    ----------
    norm : float
        Allowed deviation of state norms and trace-1 checks.
    herm : float
        Allowed Hermiticity defect ``max|M - M^dag|``.
    psd : float
        Most negative eigenvalue accepted for a density matrix.
    ortho : float
        Allowed deviation of basis Gram matrices from the identity.
    overlap_eps : float
        Overlaps smaller than this in magnitude are treated as vanishing
        denominators.
    imag_residue : float
        Marginals whose imaginary residue reaches this bound are rejected.
    kirkwood_sum : float
        Allowed deviation of a Kirkwood table's total sum from 1 (and of
        row/column sums from the real axis).
    conditional_sum : float
        Allowed deviation of a conditional table's sum from 1.
    classical_sum : float
        Allowed deviation of a probability vector's sum from 1.
    evidence_match : float
        Allowed mismatch between a caller-supplied evidence term and the
        prior/likelihood contraction.
    zero_vector : float
        Amplitude magnitude below which a raw vector counts as zero.
    duplicate_point : float
        Distance below which consecutive curve points merge.
    intersection : float
        Geometric tolerance for segment-intersection tests.
    closure : float
        Endpoint gap below which a curve counts as closed.
    snap : float
        Maximum distance from the curve accepted when ranking queries.
    proportionality : float
        Entrywise bound for the wavefunction proportionality cross-check.
    postselect_floor : float
        Postselection success probabilities below this abort a run.
    """

    norm: float = 1e-10
    herm: float = 1e-10
    psd: float = 1e-9
    ortho: float = 1e-10
    overlap_eps: float = 1e-12
    imag_residue: float = 1e-8
    kirkwood_sum: float = 1e-10
    conditional_sum: float = 1e-10
    classical_sum: float = 1e-12
    evidence_match: float = 1e-12
    zero_vector: float = 1e-15
    duplicate_point: float = 1e-14
    intersection: float = 1e-12
    closure: float = 1e-9
    snap: float = 1e-9
    proportionality: float = 1e-10
    postselect_floor: float = 1e-15

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if not (value > 0.0):
                raise ValueError(f"tolerance {f.name!r} must be positive, got {value!r}")

    def updated(self, **overrides: float) -> "Tolerances":
        """Return a copy with the given fields replaced."""
        return replace(self, **overrides)


DEFAULT_TOLERANCES = Tolerances()
