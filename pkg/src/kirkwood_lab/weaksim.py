"""Qubit-meter weak measurement of a complex weak value.

The meter is a single qubit prepared in the +1 eigenstate of sigma_x and
coupled to the system through U = exp(-i * g * A (x) sigma_y).  After
postselection the two meter expectation values transverse to the initial
axis carry the real and imaginary parts of the weak value; readout divides
by a calibration slope measured on the identity observable, so A = identity
estimates exactly 1 at any coupling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .config import DEFAULT_TOLERANCES
from .errors import (
    DimensionMismatch,
    NearOrthogonalPostSelection,
    NotHermitian,
    PostSelectionFailed,
)
from .hilbert import DensityMatrix, StateVector, complex_to_pair, pair_to_complex
from .quasiprob import weak_value

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
for _m in (SIGMA_X, SIGMA_Y, SIGMA_Z):
    _m.setflags(write=False)

# meter starts in the +1 eigenstate of the first Pauli axis
_METER_INIT = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0)
_METER_INIT.setflags(write=False)

RNG_ID = "numpy-default_rng-pcg64"


@dataclass(frozen=True, eq=False)
class WeakMeasurementScenario:
    """Pre/post selected system, Hermitian observable, coupling strength."""

    pre: StateVector
    post: StateVector
    observable: np.ndarray
    coupling: float

    def __post_init__(self) -> None:
        obs = np.array(self.observable, dtype=complex, copy=True)
        if obs.ndim != 2 or obs.shape != (self.pre.dim, self.pre.dim):
            raise DimensionMismatch(
                f"observable shape {obs.shape} does not match system dimension {self.pre.dim}"
            )
        if self.post.dim != self.pre.dim:
            raise DimensionMismatch(
                f"pre dimension {self.pre.dim} differs from post dimension {self.post.dim}"
            )
        defect = float(np.max(np.abs(obs - obs.conj().T)))
        if defect > DEFAULT_TOLERANCES.herm:
            raise NotHermitian(f"observable Hermiticity defect {defect:.3e}", defect=defect)
        if not (np.isfinite(self.coupling) and self.coupling >= 0.0):
            raise ValueError(f"coupling must be a nonnegative real, got {self.coupling!r}")
        ov = abs(complex(np.vdot(self.post.amplitudes, self.pre.amplitudes)))
        if ov < DEFAULT_TOLERANCES.overlap_eps:
            raise NearOrthogonalPostSelection(
                f"pre/post overlap magnitude {ov:.3e} is numerically zero", overlap=ov
            )
        obs.setflags(write=False)
        object.__setattr__(self, "observable", obs)


@dataclass(frozen=True)
class WeakMeasurementRecord:
    """One estimation run: sampled (or exact) estimate next to the analytic value."""

    estimate: complex
    exact: complex
    shots: int
    stderr: float
    g: float
    seed: int
    rng_id: str

    def __post_init__(self) -> None:
        if self.shots < 0:
            raise ValueError("shots must be nonnegative")
        if self.stderr < 0.0:
            raise ValueError("stderr must be nonnegative")
        if self.shots == 0 and self.stderr != 0.0:
            raise ValueError("exact-expectation records must carry stderr 0")

    @property
    def error(self) -> float:
        return abs(self.estimate - self.exact)

    def to_dict(self) -> dict:
        return {
            "estimate": complex_to_pair(self.estimate),
            "exact": complex_to_pair(self.exact),
            "shots": self.shots,
            "stderr": self.stderr,
            "g": self.g,
            "seed": self.seed,
            "rng_id": self.rng_id,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "WeakMeasurementRecord":
        return cls(
            estimate=pair_to_complex(payload["estimate"]),
            exact=pair_to_complex(payload["exact"]),
            shots=int(payload["shots"]),
            stderr=float(payload["stderr"]),
            g=float(payload["g"]),
            seed=int(payload["seed"]),
            rng_id=str(payload["rng_id"]),
        )


def couple_and_postselect(s: WeakMeasurementScenario) -> tuple[DensityMatrix, float]:
    """Exact joint evolution and postselection.

    Returns the conditional 2x2 meter state and the postselection success
    probability; raises PostSelectionFailed when that probability is
    numerically zero.
    """
    dim = s.pre.dim
    generator = np.kron(s.observable, SIGMA_Y)
    eigvals, eigvecs = np.linalg.eigh(generator)
    unitary = (eigvecs * np.exp(-1j * s.coupling * eigvals)) @ eigvecs.conj().T
    joint = unitary @ np.kron(s.pre.amplitudes, _METER_INIT)
    meter_vec = s.post.amplitudes.conj() @ joint.reshape(dim, 2)
    success = float(np.vdot(meter_vec, meter_vec).real)
    if success < DEFAULT_TOLERANCES.postselect_floor:
        raise PostSelectionFailed(
            f"postselection success probability {success:.3e} is numerically zero",
            success=success,
        )
    meter = np.outer(meter_vec, meter_vec.conj()) / success
    return DensityMatrix(meter), success


@lru_cache(maxsize=64)
def _calibration_slope(g: float) -> float:
    """Signed readout slope, measured operationally on the identity observable."""
    basis0 = StateVector(np.array([1.0, 0.0], dtype=complex))
    scenario = WeakMeasurementScenario(
        pre=basis0, post=basis0, observable=np.eye(2, dtype=complex), coupling=g
    )
    meter, _ = couple_and_postselect(scenario)
    return float(np.trace(meter.entries @ SIGMA_Z).real)


def _transverse_expectations(meter: DensityMatrix) -> tuple[float, float]:
    ez = float(np.trace(meter.entries @ SIGMA_Z).real)
    ey = float(np.trace(meter.entries @ SIGMA_Y).real)
    return ez, ey


def estimate_weak_value(meter: DensityMatrix, g: float) -> complex:
    """Invert the two transverse meter expectations into a complex estimate."""
    if meter.dim != 2:
        raise DimensionMismatch(f"meter must be a qubit, got dimension {meter.dim}")
    if not g > 0.0:
        raise ValueError(f"readout inversion needs coupling g > 0, got {g!r}")
    slope = _calibration_slope(g)
    ez, ey = _transverse_expectations(meter)
    return complex(ez / slope, -ey / slope)


def run_exact(s: WeakMeasurementScenario) -> WeakMeasurementRecord:
    """Exact-expectation estimate (shots = 0, stderr = 0)."""
    meter, _ = couple_and_postselect(s)
    estimate = estimate_weak_value(meter, s.coupling)
    exact = weak_value(s.observable, s.pre, s.post)
    return WeakMeasurementRecord(
        estimate=estimate, exact=exact, shots=0, stderr=0.0,
        g=s.coupling, seed=0, rng_id="exact",
    )


def _outcome_stats(rng: np.random.Generator, n: int, p_plus: float
                   ) -> tuple[float, float]:
    """Empirical expectation of a +/-1 outcome and its variance estimate.

    Uses a continuity-corrected frequency so degenerate counts still give a
    finite, nonzero error bar; n = 0 falls back to the uninformative prior.
    """
    if n == 0:
        return 0.0, 1.0
    k = int(rng.binomial(n, min(max(p_plus, 0.0), 1.0)))
    expectation = 2.0 * k / n - 1.0
    smoothed = (k + 0.5) / (n + 1.0)
    variance = 4.0 * smoothed * (1.0 - smoothed) / n
    return expectation, variance


def monte_carlo_run(s: WeakMeasurementScenario, shots: int, seed: int = 0
                    ) -> WeakMeasurementRecord:
    """Sampled estimate from projective meter readouts in the two transverse bases.

    Shots are split evenly (the first basis takes any odd remainder); counts
    are drawn from the exact Born probabilities with a seeded generator, so a
    given (scenario, shots, seed) always reproduces the same record.
    """
    if shots < 1:
        raise ValueError(f"monte carlo needs shots >= 1, got {shots}")
    if not s.coupling > 0.0:
        raise ValueError("monte carlo needs coupling g > 0")
    meter, _ = couple_and_postselect(s)
    ez, ey = _transverse_expectations(meter)
    n_z = shots - shots // 2
    n_y = shots // 2
    rng = np.random.default_rng(seed)
    # draw order is fixed: sigma_z basis first, then sigma_y
    emp_z, var_z = _outcome_stats(rng, n_z, (1.0 + ez) / 2.0)
    emp_y, var_y = _outcome_stats(rng, n_y, (1.0 + ey) / 2.0)
    slope = _calibration_slope(s.coupling)
    estimate = complex(emp_z / slope, -emp_y / slope)
    stderr = math.sqrt(var_z + var_y) / abs(slope)
    exact = weak_value(s.observable, s.pre, s.post)
    return WeakMeasurementRecord(
        estimate=estimate, exact=exact, shots=shots, stderr=stderr,
        g=s.coupling, seed=seed, rng_id=RNG_ID,
    )


def convergence_sweep(
    s: WeakMeasurementScenario,
    g_values,
    shots: int = 0,
    seed: int = 0,
) -> tuple[WeakMeasurementRecord, ...]:
    """One record per coupling in a decreasing sweep.

    With shots = 0 uses exact expectations; otherwise each coupling gets an
    independent child seed derived deterministically from (seed, index).
    """
    gs = [float(g) for g in g_values]
    if not gs:
        raise ValueError("convergence sweep needs at least one coupling value")
    if any(g <= 0.0 for g in gs):
        raise ValueError("couplings must be positive")
    if any(b >= a for a, b in zip(gs, gs[1:])):
        raise ValueError("couplings must be strictly decreasing")
    records = []
    for index, g in enumerate(gs):
        scenario = replace(s, coupling=g)
        if shots == 0:
            records.append(run_exact(scenario))
        else:
            child = int(np.random.SeedSequence(entropy=seed, spawn_key=(index,))
                        .generate_state(1)[0])
            records.append(monte_carlo_run(scenario, shots, seed=child))
    return tuple(records)
