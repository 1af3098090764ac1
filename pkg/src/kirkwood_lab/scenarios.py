"""Worked scenarios that trace conditional quasiprobabilities as curves.

Three families:

* Orbital-angular-momentum interference on a phase grid.  With preselection
  on OAM mode m and postselection on sqrt(1-d^2)|n> + d|m>, the conditional
  distribution over the phase grid is a circle in the complex plane,
  centered at 1/(2*pi) with radius sqrt(1-d^2)/(2*pi*d): the weaker the
  postselection overlap d, the larger the circle.
* Position amplitudes from zero-momentum postselection: the conditional
  distribution over the position grid is proportional to the wavefunction
  itself; the proportionality constant comes out of the computation.
* A Kirkwood entry swept along a phase path together with its complex
  conjugate, which is the same entry with the bases swapped.  The two
  mirror-image curves meet wherever the entry is real.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .audit import ComplexCurve
from .config import DEFAULT_TOLERANCES
from .errors import (
    CollinearPoints,
    DimensionMismatch,
    InvariantViolation,
    ZeroMomentumComponent,
)
from .hilbert import (
    DensityMatrix,
    OrthonormalBasis,
    StateVector,
    computational_basis,
    fourier_basis,
    overlap,
)
from .quasiprob import conditional_kirkwood

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class OamScenario:
    """Phase-grid interference between two OAM modes.

    ``delta`` is the postselection overlap; dim phase samples cover one
    period, and the traced curve repeats the first sample at 2*pi so the
    period is closed.
    """

    dim: int
    m: int
    n: int
    delta: float

    def __post_init__(self) -> None:
        if self.dim < 4:
            raise ValueError(f"phase grid needs dim >= 4, got {self.dim}")
        if not 0.0 < self.delta <= 1.0:
            raise ValueError(f"delta must lie in (0, 1], got {self.delta}")
        if (self.m - self.n) % self.dim == 0:
            raise ValueError(
                f"modes m={self.m} and n={self.n} coincide on a grid of {self.dim} points"
            )

    @property
    def phi_grid(self) -> np.ndarray:
        return np.arange(self.dim) * (TWO_PI / self.dim)

    @property
    def expected_center(self) -> float:
        return 1.0 / TWO_PI

    @property
    def expected_radius(self) -> float:
        return math.sqrt(1.0 - self.delta**2) / (TWO_PI * self.delta)


@dataclass(frozen=True)
class CircleFitResult:
    """Least-squares circle through a point cloud."""

    center: complex
    radius: float
    rms_residual: float


@dataclass(frozen=True, eq=False)
class WavefunctionScenario:
    """Position-grid state postselected on the zero-momentum vector.

    ``k_norm`` is computed at construction from the definition
    <p0|x0> / <p0|psi>; it is the constant relating the conditional values
    to the position amplitudes.
    """

    psi: StateVector
    k_norm: complex = 0j

    def __post_init__(self) -> None:
        if self.psi.dim < 2:
            raise ValueError("wavefunction scenario needs dim >= 2")
        p0 = fourier_basis(self.psi.dim).vectors[0]
        ov = overlap(p0, self.psi)
        if abs(ov) < DEFAULT_TOLERANCES.overlap_eps:
            raise ZeroMomentumComponent(
                f"zero-momentum component magnitude {abs(ov):.3e} vanishes",
                overlap=abs(ov),
            )
        object.__setattr__(self, "k_norm", complex((1.0 / math.sqrt(self.psi.dim)) / ov))

    @property
    def dim(self) -> int:
        return self.psi.dim


@dataclass(frozen=True)
class PhaseSweep:
    """Relative-phase path exp(i*theta) applied to one postselection vector."""

    start: float = 0.0
    stop: float = math.pi
    samples: int = 65

    def __post_init__(self) -> None:
        if self.samples < 33:
            raise ValueError(f"phase sweep needs at least 33 samples, got {self.samples}")
        if not self.stop > self.start:
            raise ValueError("sweep stop must exceed start")

    @property
    def thetas(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.samples)


def oam_conditional(s: OamScenario) -> ComplexCurve:
    """Conditional distribution over the phase grid, as a curve.

    Values are scaled by dim/(2*pi) so they match the continuum density
    1/(2*pi) + sqrt(1-delta^2)/(2*pi*delta) * exp(i*phi*(m-n)).  The first
    sample is repeated at phi = 2*pi, closing the period, so the traced
    curve of a full interference circle audits as ClosedCurve.
    """
    grid = computational_basis(s.dim, label="phi-grid")
    modes = fourier_basis(s.dim, label="oam")
    pre = modes.vectors[s.m % s.dim]
    post_amps = (
        math.sqrt(1.0 - s.delta**2) * modes.vectors[s.n % s.dim].amplitudes
        + s.delta * pre.amplitudes
    )
    post = StateVector(post_amps)
    cond = conditional_kirkwood(grid, pre, post)
    density = cond.values * (s.dim / TWO_PI)
    points = np.concatenate((density, density[:1]))
    param = np.concatenate((s.phi_grid, [TWO_PI]))
    return ComplexCurve(points, param,
                        label=f"oam(m={s.m},n={s.n},delta={s.delta})")


def circle_fit(points) -> CircleFitResult:
    """Algebraic least-squares circle fit.

    Minimizes sum((|z - c|^2 - r^2)^2) in its linearized form; raises
    CollinearPoints when the points do not determine a circle.
    """
    z = np.asarray(points, dtype=complex).ravel()
    if z.size < 3:
        raise CollinearPoints(f"circle fit needs at least 3 points, got {z.size}",
                              n_points=int(z.size))
    x, y = z.real, z.imag
    design = np.column_stack((2.0 * x, 2.0 * y, np.ones(z.size)))
    target = x * x + y * y
    solution, _, rank_, _ = np.linalg.lstsq(design, target, rcond=None)
    if rank_ < 3:
        raise CollinearPoints("points are collinear; no circle is determined")
    cx, cy, offset = solution
    radius_sq = offset + cx * cx + cy * cy
    if radius_sq <= 0.0:
        raise CollinearPoints("degenerate fit: non-positive squared radius")
    center = complex(cx, cy)
    radius = math.sqrt(radius_sq)
    rms = float(np.sqrt(np.mean((np.abs(z - center) - radius) ** 2)))
    return CircleFitResult(center=center, radius=radius, rms_residual=rms)


def wavefunction_conditional(s: WavefunctionScenario) -> ComplexCurve:
    """Conditional distribution over the position grid, as a curve.

    The values equal k_norm times the position amplitudes; this is checked
    entrywise and an InvariantViolation is raised on disagreement.
    """
    positions = computational_basis(s.dim, label="position")
    p0 = fourier_basis(s.dim).vectors[0]
    cond = conditional_kirkwood(positions, s.psi, p0)
    expected = s.k_norm * s.psi.amplitudes
    defect = float(np.max(np.abs(cond.values - expected)))
    if defect > DEFAULT_TOLERANCES.proportionality:
        raise InvariantViolation(
            f"conditional values deviate from k_norm * psi by {defect:.3e}",
            defect=defect,
        )
    return ComplexCurve(cond.values, np.arange(s.dim, dtype=float),
                        label="wavefunction")


def conjugate_pair(
    rho: DensityMatrix,
    basis_a: OrthonormalBasis,
    basis_b: OrthonormalBasis,
    sweep: PhaseSweep | None = None,
    entry: tuple[int, int] = (0, 0),
) -> tuple[ComplexCurve, ComplexCurve]:
    """Curves of a Kirkwood entry and its conjugate along a phase sweep.

    The sweep multiplies the last amplitude of the selected postselection
    vector by exp(i*theta); the entry K(a0, b0) = <b0|a0><a0|rho|b0> is
    evaluated at each theta.  The second curve is the pointwise conjugate
    (the same entry with the roles of the two bases swapped).
    """
    if not (rho.dim == basis_a.dim == basis_b.dim):
        raise DimensionMismatch(
            f"dimensions disagree: rho {rho.dim}, basis A {basis_a.dim}, "
            f"basis B {basis_b.dim}"
        )
    sweep = PhaseSweep() if sweep is None else sweep
    a_idx, b_idx = entry
    avec = basis_a.vectors[a_idx].amplitudes
    bvec = basis_b.vectors[b_idx].amplitudes
    thetas = sweep.thetas
    values = np.empty(thetas.size, dtype=complex)
    for k, theta in enumerate(thetas):
        bt = bvec.copy()
        bt[-1] *= np.exp(1j * theta)
        values[k] = np.vdot(bt, avec) * np.vdot(avec, rho.entries @ bt)
    label = f"K({a_idx},{b_idx})"
    forward = ComplexCurve(values, thetas, label=label)
    mirrored = ComplexCurve(values.conj(), thetas, label=label + "*")
    return forward, mirrored
