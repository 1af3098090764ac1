"""Rankability audit for complex-valued distributions.

A set of complex values can stand in for degrees of plausibility only if it
admits an order-preserving map onto a real interval.  Values traced as a
polyline in the complex plane pass exactly when the curve neither crosses
itself nor closes on itself: a self-intersection breaks transitivity of the
induced order, and a closed loop has no place to cut.  Admissible curves are
"unwound" by chord length onto [v_false, v_true].
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .config import DEFAULT_TOLERANCES
from .errors import (
    CurveClosed,
    CurveSelfIntersects,
    DegenerateScale,
    NonMonotoneParameter,
    QueryOffCurve,
    TooFewPoints,
)
from .hilbert import complex_seq_to_pairs, complex_to_pair, pairs_to_complex_seq

_TINY = 1e-300  # guards divisions by degenerate segment lengths


class Verdict(enum.Enum):
    ADMISSIBLE = "Admissible"
    SELF_INTERSECTING = "SelfIntersecting"
    CLOSED_CURVE = "ClosedCurve"
    DEGENERATE_SCALE = "DegenerateScale"


@dataclass(frozen=True, eq=False)
class ComplexCurve:
    """Polyline through complex values, ordered by a strictly increasing parameter.

    ``trace_curve`` is the canonical constructor: it merges consecutive
    duplicate points.  Scenario builders may construct degenerate constant
    curves directly (all values equal); the audit resolves those to a
    DegenerateScale verdict rather than rejecting them at the type level.
    """

    points: np.ndarray
    param: np.ndarray
    label: str = ""

    def __post_init__(self) -> None:
        pts = np.array(self.points, dtype=complex, copy=True)
        par = np.array(self.param, dtype=float, copy=True)
        if pts.ndim != 1 or par.ndim != 1:
            raise ValueError("points and param must be flat sequences")
        if pts.size != par.size:
            raise ValueError(f"{pts.size} points but {par.size} parameter values")
        if pts.size < 2:
            raise TooFewPoints(f"a curve needs at least 2 points, got {pts.size}",
                               n_points=int(pts.size))
        if not np.all(np.isfinite(pts)) or not np.all(np.isfinite(par)):
            raise ValueError("curve contains non-finite entries")
        if np.any(np.diff(par) <= 0.0):
            raise NonMonotoneParameter("curve parameter must be strictly increasing")
        pts.setflags(write=False)
        par.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "param", par)

    @property
    def n_points(self) -> int:
        return self.points.size

    @property
    def n_segments(self) -> int:
        return self.points.size - 1

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "param": [float(t) for t in self.param],
            "points": complex_seq_to_pairs(self.points),
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "ComplexCurve":
        return cls(
            pairs_to_complex_seq(payload["points"]),
            np.asarray(payload["param"], dtype=float),
            label=str(payload.get("label", "")),
        )


@dataclass(frozen=True)
class PlausibilityScale:
    """Target real interval; the false end defaults to 0."""

    v_false: float = 0.0
    v_true: float = 1.0

    def __post_init__(self) -> None:
        if not (np.isfinite(self.v_false) and np.isfinite(self.v_true)):
            raise DegenerateScale("scale endpoints must be finite")
        if self.v_true <= self.v_false:
            raise DegenerateScale(
                f"v_true ({self.v_true}) must exceed v_false ({self.v_false})",
                v_false=self.v_false, v_true=self.v_true,
            )

    @property
    def span(self) -> float:
        return self.v_true - self.v_false


@dataclass(frozen=True)
class Intersection:
    """Self-intersection evidence: a point and the two segment indices."""

    point: complex
    seg_i: int
    seg_j: int

    def to_json(self) -> list:
        return [complex_to_pair(self.point), self.seg_i, self.seg_j]


@dataclass(frozen=True, eq=False)
class OrderPreservingMap:
    """Chord-length positions along an admissible curve, scaled onto an interval."""

    curve: ComplexCurve
    cumulative_lengths: np.ndarray
    scale: PlausibilityScale

    def __post_init__(self) -> None:
        cum = np.array(self.cumulative_lengths, dtype=float, copy=True)
        if cum.ndim != 1 or cum.size != self.curve.n_points:
            raise ValueError("cumulative_lengths must align with the curve points")
        if cum[0] != 0.0:
            raise ValueError("cumulative lengths must start at 0")
        if np.any(np.diff(cum) <= 0.0):
            raise ValueError(
                "cumulative lengths must be strictly increasing; "
                "merge duplicate points with trace_curve first"
            )
        cum.setflags(write=False)
        object.__setattr__(self, "cumulative_lengths", cum)

    @property
    def mapped_values(self) -> np.ndarray:
        """Per-point ranks in [v_false, v_true]; endpoints land exactly."""
        total = self.cumulative_lengths[-1]
        out = self.scale.v_false + self.scale.span * (self.cumulative_lengths / total)
        out[0] = self.scale.v_false
        out[-1] = self.scale.v_true
        return out


@dataclass(frozen=True, eq=False)
class AuditReport:
    """Outcome of a rankability audit."""

    verdict: Verdict
    intersections: tuple[Intersection, ...]
    closure_gap: float
    ranking: OrderPreservingMap | None
    notes: str = ""

    def __post_init__(self) -> None:
        if self.verdict is Verdict.ADMISSIBLE:
            if self.intersections or self.ranking is None:
                raise ValueError("an admissible report needs a ranking and no intersections")

    def to_dict(self) -> dict:
        ranking = None
        if self.ranking is not None:
            ranking = {
                "v_false": self.ranking.scale.v_false,
                "v_true": self.ranking.scale.v_true,
                "cumulative_lengths": [float(x) for x in self.ranking.cumulative_lengths],
                "mapped_values": [float(x) for x in self.ranking.mapped_values],
            }
        return {
            "verdict": self.verdict.value,
            "intersections": [hit.to_json() for hit in self.intersections],
            "closure_gap": float(self.closure_gap),
            "ranking": ranking,
            "notes": self.notes,
        }


# --- curve construction ---------------------------------------------------------

def _merge_duplicates(points: np.ndarray, param: np.ndarray,
                      merge_tol: float) -> tuple[np.ndarray, np.ndarray]:
    keep = np.empty(points.size, dtype=bool)
    keep[0] = True
    keep[1:] = np.abs(np.diff(points)) >= merge_tol
    return points[keep], param[keep]


def trace_curve(values: Iterable[complex], param: Iterable[float],
                label: str = "") -> ComplexCurve:
    """Build the polyline through ``values`` in parameter order.

    Consecutive points closer than the duplicate threshold are merged
    (keeping the first of each run).  Raises TooFewPoints when fewer than
    two distinct points remain, NonMonotoneParameter when the parameter is
    not strictly increasing.
    """
    pts = np.asarray(list(values) if not isinstance(values, np.ndarray) else values,
                     dtype=complex)
    par = np.asarray(list(param) if not isinstance(param, np.ndarray) else param,
                     dtype=float)
    if pts.ndim != 1 or par.ndim != 1 or pts.size != par.size:
        raise ValueError("values and param must be flat sequences of equal length")
    if pts.size < 2:
        raise TooFewPoints(f"a curve needs at least 2 points, got {pts.size}",
                           n_points=int(pts.size))
    if np.any(np.diff(par) <= 0.0):
        raise NonMonotoneParameter("curve parameter must be strictly increasing")
    pts, par = _merge_duplicates(pts, par, DEFAULT_TOLERANCES.duplicate_point)
    if pts.size < 2:
        raise TooFewPoints(
            "fewer than 2 distinct points remain after duplicate merging",
            n_points=int(pts.size),
        )
    return ComplexCurve(pts, par, label=label)


# --- geometry -------------------------------------------------------------------

def _cross(a, b):
    """Scalar cross product Im(conj(a) * b) of complex vectors."""
    return (np.conj(a) * b).imag


def _collinear_overlap(p1: complex, r: complex, q1: complex, s: complex,
                       tol: float) -> complex | None:
    """Representative point of the overlap of two collinear segments, if any."""
    rlen = abs(r)
    if rlen < _TINY:
        return None
    # distance of the second segment's endpoints from the first segment's line
    if abs(_cross(q1 - p1, r)) / rlen > tol or abs(_cross(q1 + s - p1, r)) / rlen > tol:
        return None
    t0 = (np.conj(r) * (q1 - p1)).real / (rlen * rlen)
    t1 = (np.conj(r) * (q1 + s - p1)).real / (rlen * rlen)
    lo = max(0.0, min(t0, t1))
    hi = min(1.0, max(t0, t1))
    slack = tol / rlen
    if lo > hi + slack:
        return None
    mid = (max(lo, min(t0, t1)) + min(hi, max(t0, t1))) / 2.0
    mid = min(1.0, max(0.0, mid))
    return complex(p1 + mid * r)


def self_intersections(curve: ComplexCurve, tol: float | None = None
                       ) -> tuple[Intersection, ...]:
    """All crossings and touches between non-adjacent segments.

    Exhaustive O(n^2) pairwise test; adjacent segments (sharing an endpoint
    by construction) are exempt.  Points within ``tol`` of touching count,
    and near-degenerate collinear overlaps are reported conservatively with
    a representative point.  Results are sorted by segment index pair.
    """
    tol = DEFAULT_TOLERANCES.intersection if tol is None else float(tol)
    pts = curve.points
    n = curve.n_segments
    starts = pts[:-1]
    deltas = np.diff(pts)
    lengths = np.abs(deltas)
    hits: list[Intersection] = []
    for i in range(n - 2):
        js = np.arange(i + 2, n)
        r = deltas[i]
        p1 = starts[i]
        s = deltas[js]
        qp = starts[js] - p1
        denom = _cross(r, s)
        parallel = np.abs(denom) <= tol * (lengths[i] + lengths[js])
        with np.errstate(divide="ignore", invalid="ignore"):
            t = _cross(qp, s) / denom
            u = _cross(qp, r) / denom
        eps_t = tol / max(lengths[i], _TINY)
        eps_u = tol / np.maximum(lengths[js], _TINY)
        ok = (~parallel) & (t >= -eps_t) & (t <= 1.0 + eps_t) \
            & (u >= -eps_u) & (u <= 1.0 + eps_u)
        for idx in np.nonzero(ok)[0]:
            hits.append(Intersection(complex(p1 + t[idx] * r), i, int(js[idx])))
        for idx in np.nonzero(parallel)[0]:
            point = _collinear_overlap(p1, r, starts[js[idx]], s[idx], tol)
            if point is not None:
                hits.append(Intersection(point, i, int(js[idx])))
    return tuple(hits)


def is_closed(curve: ComplexCurve, tol: float | None = None) -> tuple[bool, float]:
    """Whether the endpoints coincide within ``tol``; the gap is always returned."""
    tol = DEFAULT_TOLERANCES.closure if tol is None else float(tol)
    gap = float(abs(curve.points[-1] - curve.points[0]))
    return gap < tol, gap


# --- unwinding and ranking --------------------------------------------------------

def _chord_map(curve: ComplexCurve, scale: PlausibilityScale) -> OrderPreservingMap:
    seg = np.abs(np.diff(curve.points))
    total = float(seg.sum())
    if total < DEFAULT_TOLERANCES.duplicate_point * curve.n_points:
        raise DegenerateScale(
            f"curve has numerically zero length ({total:.3e}); nothing to rank",
            total_length=total,
        )
    cum = np.concatenate(([0.0], np.cumsum(seg)))
    return OrderPreservingMap(curve, cum, scale)


def unwind(curve: ComplexCurve, scale: PlausibilityScale | None = None,
           intersection_tol: float | None = None,
           closure_tol: float | None = None) -> OrderPreservingMap:
    """Order-preserving map of an admissible curve onto [v_false, v_true].

    Positions are cumulative chord lengths, rescaled so the first point maps
    exactly to v_false and the last exactly to v_true.  Raises CurveClosed,
    CurveSelfIntersects (with the intersection evidence), or DegenerateScale.
    """
    scale = PlausibilityScale() if scale is None else scale
    closed, gap = is_closed(curve, closure_tol)
    if closed:
        raise CurveClosed(
            f"curve endpoints coincide (gap {gap:.3e}); no place to cut",
            closure_gap=gap,
        )
    hits = self_intersections(curve, intersection_tol)
    if hits:
        raise CurveSelfIntersects(
            f"curve crosses itself {len(hits)} time(s); ordering is not transitive",
            intersections=[hit.to_json() for hit in hits],
        )
    return _chord_map(curve, scale)


def rank(opmap: OrderPreservingMap, queries: Iterable[complex],
         snap_tol: float | None = None) -> np.ndarray:
    """Ranks of query points, interpolated along the curve.

    Each query must lie within ``snap_tol`` of the curve; otherwise
    QueryOffCurve is raised with the offending query and its distance.
    """
    snap_tol = DEFAULT_TOLERANCES.snap if snap_tol is None else float(snap_tol)
    qs = np.asarray(list(queries) if not isinstance(queries, np.ndarray) else queries,
                    dtype=complex)
    if qs.ndim != 1:
        raise ValueError("queries must be a flat sequence")
    pts = opmap.curve.points
    starts = pts[:-1]
    deltas = np.diff(pts)
    seg_len = np.abs(deltas)
    safe_len2 = np.maximum(seg_len * seg_len, _TINY)
    cum = opmap.cumulative_lengths
    scale = opmap.scale
    total = cum[-1]
    out = np.empty(qs.size, dtype=float)
    for qi, q in enumerate(qs):
        rel = q - starts
        t = np.clip((np.conj(deltas) * rel).real / safe_len2, 0.0, 1.0)
        dist = np.abs(rel - t * deltas)
        seg = int(np.argmin(dist))
        if dist[seg] > snap_tol:
            raise QueryOffCurve(
                f"query {q!r} is {dist[seg]:.3e} away from the curve "
                f"(snap tolerance {snap_tol:.3e})",
                query=complex_to_pair(q), distance=float(dist[seg]),
            )
        position = cum[seg] + t[seg] * seg_len[seg]
        out[qi] = scale.v_false + scale.span * (position / total)
    return out


# --- the audit ------------------------------------------------------------------

def audit(curves: Sequence[ComplexCurve], scale: PlausibilityScale | None = None,
          intersection_tol: float | None = None,
          closure_tol: float | None = None) -> AuditReport:
    """Decide whether the concatenated curves support an order-preserving map.

    Curves are concatenated in the order given; discontinuous junctions are
    legal but flagged in the notes.  The verdict is ClosedCurve when the
    union's endpoints coincide, SelfIntersecting when any two non-adjacent
    segments meet, DegenerateScale when the union has no extent, and
    Admissible (with the ranking attached) otherwise.
    """
    if not curves:
        raise ValueError("audit needs at least one curve")
    scale = PlausibilityScale() if scale is None else scale
    merge_tol = DEFAULT_TOLERANCES.duplicate_point

    notes: list[str] = []
    points = np.concatenate([c.points for c in curves])
    if len(curves) > 1:
        for prev, nxt in zip(curves[:-1], curves[1:]):
            jump = float(abs(nxt.points[0] - prev.points[-1]))
            if jump > merge_tol:
                notes.append(
                    f"discontinuous junction between {prev.label or 'curve'!r} and "
                    f"{nxt.label or 'curve'!r} (jump {jump:.3e})"
                )
    merged, _ = _merge_duplicates(points, np.arange(points.size, dtype=float), merge_tol)
    label = "+".join(c.label or "curve" for c in curves)
    note_text = "; ".join(notes)

    if merged.size < 2:
        return AuditReport(
            verdict=Verdict.DEGENERATE_SCALE,
            intersections=(), closure_gap=0.0, ranking=None,
            notes="; ".join(notes + ["all points coincide; the curve has no extent"]),
        )
    union = ComplexCurve(merged, np.arange(merged.size, dtype=float), label=label)

    closed, gap = is_closed(union, closure_tol)
    if closed:
        return AuditReport(Verdict.CLOSED_CURVE, (), gap, None, notes=note_text)
    hits = self_intersections(union, intersection_tol)
    if hits:
        return AuditReport(Verdict.SELF_INTERSECTING, hits, gap, None, notes=note_text)
    try:
        ranking = _chord_map(union, scale)
    except DegenerateScale as exc:
        return AuditReport(
            Verdict.DEGENERATE_SCALE, (), gap, None,
            notes="; ".join(notes + [str(exc)]),
        )
    return AuditReport(Verdict.ADMISSIBLE, (), gap, ranking, notes=note_text)
