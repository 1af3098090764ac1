import json

import numpy as np
import pytest
from scipy.stats import kendalltau

from kirkwood_lab import (
    AuditReport,
    ComplexCurve,
    PlausibilityScale,
    Verdict,
    audit,
    is_closed,
    rank,
    self_intersections,
    trace_curve,
    unwind,
)
from kirkwood_lab.errors import (
    CurveClosed,
    CurveSelfIntersects,
    DegenerateScale,
    NonMonotoneParameter,
    QueryOffCurve,
    TooFewPoints,
)

from geometry_oracle import brute_force_intersections

BOWTIE = [0.0, 1.0 + 1.0j, 1.0 + 0.0j, 0.0 + 1.0j]  # open, one crossing at 0.5+0.5i


def _spiral(n=40, turns=1.5):
    theta = np.linspace(0.0, turns * np.pi, n)
    return (1.0 + 0.2 * theta) * np.exp(1j * theta)


def _random_polyline(rng, n_segments):
    return rng.uniform(-1.0, 1.0, n_segments + 1) + 1j * rng.uniform(-1.0, 1.0, n_segments + 1)


# --- curve construction ---------------------------------------------------------


def test_trace_curve_merges_consecutive_duplicates():
    curve = trace_curve([0.0, 0.0, 1.0, 1.0, 2.0], [0, 1, 2, 3, 4])
    np.testing.assert_allclose(curve.points, [0.0, 1.0, 2.0], atol=1e-15)
    np.testing.assert_allclose(curve.param, [0.0, 2.0, 4.0], atol=1e-15)


def test_trace_curve_rejects_too_few_points():
    with pytest.raises(TooFewPoints):
        trace_curve([1.0], [0.0])
    with pytest.raises(TooFewPoints):
        trace_curve([1.0, 1.0, 1.0], [0, 1, 2])  # merges to a single point


def test_trace_curve_rejects_non_monotone_parameter():
    with pytest.raises(NonMonotoneParameter):
        trace_curve([0.0, 1.0, 2.0], [0.0, 2.0, 1.0])
    with pytest.raises(NonMonotoneParameter):
        trace_curve([0.0, 1.0, 2.0], [0.0, 1.0, 1.0])


def test_curve_json_round_trip():
    curve = trace_curve([0.0, 1.0 + 1j, 2.0], [0.0, 0.5, 1.0], label="demo")
    payload = json.loads(json.dumps(curve.to_dict()))
    back = ComplexCurve.from_dict(payload)
    assert back.label == "demo"
    np.testing.assert_allclose(back.points, curve.points, atol=1e-15)
    np.testing.assert_allclose(back.param, curve.param, atol=1e-15)


def test_scale_validation():
    assert PlausibilityScale().span == 1.0
    assert PlausibilityScale(-2.0, 3.0).span == 5.0
    with pytest.raises(DegenerateScale):
        PlausibilityScale(1.0, 1.0)
    with pytest.raises(DegenerateScale):
        PlausibilityScale(2.0, 0.0)


# --- closure and intersections -----------------------------------------------------


def test_open_segment_gap():
    curve = trace_curve([0.0, 1.0], [0.0, 1.0])
    closed, gap = is_closed(curve)
    assert not closed
    assert gap == pytest.approx(1.0, abs=1e-15)


def test_closed_square():
    square = trace_curve([0.0, 1.0, 1.0 + 1j, 1j, 0.0], [0, 1, 2, 3, 4])
    closed, gap = is_closed(square)
    assert closed
    assert gap == 0.0


def test_bowtie_single_crossing():
    curve = trace_curve(BOWTIE, [0, 1, 2, 3])
    hits = self_intersections(curve)
    assert len(hits) == 1
    assert hits[0].seg_i == 0 and hits[0].seg_j == 2
    assert hits[0].point == pytest.approx(0.5 + 0.5j, abs=1e-12)


def test_endpoint_touch_counts_as_intersection():
    curve = trace_curve([0.0, 1.0, 1.0 + 1j, 0.5], [0, 1, 2, 3])
    hits = self_intersections(curve)
    assert len(hits) == 1
    assert (hits[0].seg_i, hits[0].seg_j) == (0, 2)
    assert hits[0].point == pytest.approx(0.5 + 0.0j, abs=1e-12)


def test_parallel_disjoint_segments_do_not_intersect():
    curve = trace_curve([0.0, 1.0, 1.0 + 1j, 2.0 + 1j], [0, 1, 2, 3])
    assert self_intersections(curve) == ()


def test_collinear_overlap_reported():
    # segment 3 doubles back along the real axis over segment 0
    curve = trace_curve([0.0, 2.0, 2.0 + 1j, 1.0, 3.0], [0, 1, 2, 3, 4])
    hits = self_intersections(curve)
    pairs = {(h.seg_i, h.seg_j): h.point for h in hits}
    assert set(pairs) == {(0, 2), (0, 3), (1, 3)}
    assert pairs[(0, 3)] == pytest.approx(1.5 + 0.0j, abs=1e-12)  # overlap midpoint
    assert pairs[(0, 2)] == pytest.approx(1.0 + 0.0j, abs=1e-12)
    assert pairs[(1, 3)] == pytest.approx(2.0 + 0.0j, abs=1e-12)


def test_intersections_sorted_by_segment_pair():
    rng = np.random.default_rng(3)
    curve = trace_curve(_random_polyline(rng, 30), np.arange(31))
    hits = self_intersections(curve)
    keys = [(h.seg_i, h.seg_j) for h in hits]
    assert keys == sorted(keys)
    assert all(j >= i + 2 for i, j in keys)


def test_checker_matches_brute_force_oracle():
    rng = np.random.default_rng(1234)
    for trial in range(60):
        n_segments = int(rng.integers(4, 41))
        curve = trace_curve(_random_polyline(rng, n_segments), np.arange(n_segments + 1))
        got = self_intersections(curve)
        expected = brute_force_intersections(curve.points)
        assert len(got) == len(expected)
        for hit, (point, i, j) in zip(got, expected):
            assert (hit.seg_i, hit.seg_j) == (i, j)
            assert abs(hit.point - point) <= 1e-9


# --- unwinding ------------------------------------------------------------------


def test_unwind_rejects_closed_curve():
    square = trace_curve([0.0, 1.0, 1.0 + 1j, 1j, 0.0], [0, 1, 2, 3, 4])
    with pytest.raises(CurveClosed):
        unwind(square)


def test_unwind_rejects_self_intersections_with_evidence():
    curve = trace_curve(BOWTIE, [0, 1, 2, 3])
    with pytest.raises(CurveSelfIntersects) as excinfo:
        unwind(curve)
    evidence = excinfo.value.context["intersections"]
    assert len(evidence) == 1
    (re, im), i, j = evidence[0]
    assert (i, j) == (0, 2)
    assert complex(re, im) == pytest.approx(0.5 + 0.5j, abs=1e-12)


def test_unwind_endpoints_exact_and_monotone():
    curve = trace_curve(_spiral(), np.arange(40))
    opmap = unwind(curve, PlausibilityScale(-1.0, 2.0))
    mapped = opmap.mapped_values
    assert mapped[0] == -1.0
    assert mapped[-1] == 2.0
    assert np.all(np.diff(mapped) > 0.0)


def test_unwind_kendall_tau_exactly_one():
    curve = trace_curve(_spiral(60, 2.0), np.arange(60))
    mapped = unwind(curve).mapped_values
    tau = kendalltau(curve.param, mapped).statistic
    assert tau == 1.0


def test_rank_identity_on_real_segment():
    curve = trace_curve([0.0, 1.0], [0.0, 1.0])
    opmap = unwind(curve)
    queries = np.array([0.0, 0.25, 0.7, 1.0])
    np.testing.assert_allclose(rank(opmap, queries.astype(complex)), queries, atol=1e-12)


def test_rank_rejects_off_curve_query():
    opmap = unwind(trace_curve([0.0, 1.0], [0.0, 1.0]))
    with pytest.raises(QueryOffCurve) as excinfo:
        rank(opmap, [1.0 + 1.0j])
    assert excinfo.value.context["distance"] == pytest.approx(1.0, abs=1e-12)


def test_rank_transitivity_over_random_triples():
    curve = trace_curve(_spiral(50), np.arange(50))
    opmap = unwind(curve)
    rng = np.random.default_rng(8)
    pts = curve.points
    for _ in range(200):
        ts = rng.random(3)
        segs = rng.integers(0, curve.n_segments, 3)
        queries = [pts[s] + t * (pts[s + 1] - pts[s]) for s, t in zip(segs, ts)]
        rx, ry, rz = rank(opmap, queries)
        if rx < ry and ry < rz:
            assert rx < rz


def test_rank_rotation_covariance():
    curve = trace_curve(_spiral(30), np.arange(30))
    queries = curve.points[[3, 11, 25]]
    base = rank(unwind(curve), queries)
    for theta in (0.3, 1.2, 2.9):
        phase = np.exp(1j * theta)
        turned = trace_curve(curve.points * phase, curve.param)
        np.testing.assert_allclose(rank(unwind(turned), queries * phase), base, atol=1e-12)


# --- the audit ------------------------------------------------------------------


def test_audit_admissible_report():
    report = audit([trace_curve([0.0, 1.0, 2.0 + 1j], [0, 1, 2])])
    assert report.verdict is Verdict.ADMISSIBLE
    assert report.intersections == ()
    assert report.ranking is not None
    assert report.ranking.mapped_values[0] == 0.0
    assert report.ranking.mapped_values[-1] == 1.0


def test_audit_closed_curve_verdict():
    theta = np.linspace(0.0, 2.0 * np.pi, 33)
    circle = ComplexCurve(np.exp(1j * theta[:-1]), theta[:-1])
    closing = ComplexCurve(np.array([np.exp(1j * theta[-2]), 1.0 + 0.0j]), theta[-2:])
    report = audit([circle, closing])
    assert report.verdict is Verdict.CLOSED_CURVE
    assert report.closure_gap < 1e-9
    assert report.ranking is None


def test_audit_self_intersecting_verdict():
    report = audit([trace_curve(BOWTIE, [0, 1, 2, 3])])
    assert report.verdict is Verdict.SELF_INTERSECTING
    assert len(report.intersections) == 1
    assert report.ranking is None


def test_audit_constant_curve_is_degenerate():
    constant = ComplexCurve(np.array([0.5 + 0.5j, 0.5 + 0.5j]), np.array([0.0, 1.0]))
    report = audit([constant])
    assert report.verdict is Verdict.DEGENERATE_SCALE
    assert "no extent" in report.notes


def test_audit_flags_discontinuous_junction():
    first = trace_curve([0.0, 1.0], [0.0, 1.0])
    second = trace_curve([5.0, 6.0 + 1j], [0.0, 1.0])
    report = audit([first, second])
    assert report.verdict is Verdict.ADMISSIBLE
    assert "junction" in report.notes


def test_audit_requires_curves():
    with pytest.raises(ValueError):
        audit([])


def test_audit_report_serialization():
    report = audit([trace_curve([0.0, 1.0 + 1j, 2.0], [0, 1, 2])],
                   PlausibilityScale(0.0, 2.0))
    payload = json.loads(json.dumps(report.to_dict()))
    assert payload["verdict"] == "Admissible"
    assert payload["ranking"]["v_true"] == 2.0
    assert payload["ranking"]["mapped_values"][-1] == 2.0
    assert payload["intersections"] == []

    crossing = audit([trace_curve(BOWTIE, [0, 1, 2, 3])])
    payload = json.loads(json.dumps(crossing.to_dict()))
    assert payload["verdict"] == "SelfIntersecting"
    (pair, i, j) = payload["intersections"][0]
    assert (i, j) == (0, 2)
    assert pair == pytest.approx([0.5, 0.5], abs=1e-12)


def test_audit_report_consistency_enforced():
    with pytest.raises(ValueError):
        AuditReport(Verdict.ADMISSIBLE, (), 1.0, None)
