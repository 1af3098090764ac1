"""Kirkwood quasiprobability tables, curve rankability audits, and weak-value
estimation on a qubit-meter model."""

from .audit import (
    AuditReport,
    ComplexCurve,
    Intersection,
    OrderPreservingMap,
    PlausibilityScale,
    Verdict,
    audit,
    is_closed,
    rank,
    self_intersections,
    trace_curve,
    unwind,
)
from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import (
    CollinearPoints,
    CurveClosed,
    CurveSelfIntersects,
    DegenerateScale,
    DimensionMismatch,
    ImaginaryResidue,
    InvalidRank,
    InvariantViolation,
    KirkwoodLabError,
    NearOrthogonalPostSelection,
    NonMonotoneParameter,
    NotHermitian,
    PostSelectionFailed,
    QueryOffCurve,
    TooFewPoints,
    VanishingOverlap,
    ZeroEvidence,
    ZeroMomentumComponent,
    ZeroVector,
)
from .estimator import CurveRanker
from .hilbert import (
    DensityMatrix,
    NAMED_BASES,
    OrthonormalBasis,
    StateVector,
    computational_basis,
    fourier_basis,
    hadamard_basis,
    make_state,
    named_basis,
    overlap,
    pure_density,
    random_basis,
    random_density,
)
from .quasiprob import (
    ClassicalDistribution,
    ConditionalKirkwood,
    KirkwoodMatrix,
    bayes_update,
    conditional_kirkwood,
    kirkwood,
    marginal_over_a,
    marginal_over_b,
    reconstruct_density,
    weak_value,
)
from .scenarios import (
    CircleFitResult,
    OamScenario,
    PhaseSweep,
    WavefunctionScenario,
    circle_fit,
    conjugate_pair,
    oam_conditional,
    wavefunction_conditional,
)
from .weaksim import (
    RNG_ID,
    WeakMeasurementRecord,
    WeakMeasurementScenario,
    convergence_sweep,
    couple_and_postselect,
    estimate_weak_value,
    monte_carlo_run,
    run_exact,
)

__version__ = "0.1.0"

__all__ = [
    "AuditReport",
    "CircleFitResult",
    "ClassicalDistribution",
    "CollinearPoints",
    "ComplexCurve",
    "ConditionalKirkwood",
    "CurveClosed",
    "CurveRanker",
    "CurveSelfIntersects",
    "DEFAULT_TOLERANCES",
    "DegenerateScale",
    "DensityMatrix",
    "DimensionMismatch",
    "ImaginaryResidue",
    "Intersection",
    "InvalidRank",
    "InvariantViolation",
    "KirkwoodLabError",
    "KirkwoodMatrix",
    "NAMED_BASES",
    "NearOrthogonalPostSelection",
    "NonMonotoneParameter",
    "NotHermitian",
    "OamScenario",
    "OrderPreservingMap",
    "OrthonormalBasis",
    "PhaseSweep",
    "PlausibilityScale",
    "PostSelectionFailed",
    "QueryOffCurve",
    "RNG_ID",
    "StateVector",
    "TooFewPoints",
    "Tolerances",
    "VanishingOverlap",
    "Verdict",
    "WavefunctionScenario",
    "WeakMeasurementRecord",
    "WeakMeasurementScenario",
    "ZeroEvidence",
    "ZeroMomentumComponent",
    "ZeroVector",
    "audit",
    "bayes_update",
    "circle_fit",
    "computational_basis",
    "conditional_kirkwood",
    "conjugate_pair",
    "convergence_sweep",
    "couple_and_postselect",
    "estimate_weak_value",
    "fourier_basis",
    "hadamard_basis",
    "is_closed",
    "kirkwood",
    "make_state",
    "marginal_over_a",
    "marginal_over_b",
    "monte_carlo_run",
    "named_basis",
    "oam_conditional",
    "overlap",
    "pure_density",
    "random_basis",
    "random_density",
    "rank",
    "reconstruct_density",
    "run_exact",
    "self_intersections",
    "trace_curve",
    "unwind",
    "wavefunction_conditional",
    "weak_value",
]
