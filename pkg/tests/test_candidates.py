"""Candidate enumeration and the length-ratio distance estimate."""

import math
from collections import Counter

import pytest

from hypstretch.services.candidates import (
    LEAF_KINDS,
    arc_distance_estimate,
    candidate_length,
    enumerate_candidates,
)
from hypstretch.services.stretch import generalized_stretch
from hypstretch.utils.errors import ErrorCode, HypStretchError


class TestEnumeration:
    def test_depth_zero_is_boundary_only(self, pants, torus):
        assert [c.kind for c in enumerate_candidates(pants, 0)] == ["boundary"] * 3
        assert [c.kind for c in enumerate_candidates(torus, 0)] == ["boundary"]

    def test_pants_depth_one(self, pants):
        candidates = enumerate_candidates(pants, 1)
        kinds = Counter(c.kind for c in candidates)
        assert kinds["boundary"] == 3
        assert kinds["leaf_arc"] == 3
        assert any(not c.is_curve and len(c.path.crossings) == 1 for c in candidates)

    def test_counts_grow_with_depth(self, torus):
        counts = [len(enumerate_candidates(torus, d)) for d in range(4)]
        assert counts == sorted(counts)
        assert counts[-1] > counts[0]

    def test_torus_finds_its_closed_leaf(self, torus):
        kinds = {c.kind for c in enumerate_candidates(torus, 2)}
        assert "closed_leaf" in kinds

    def test_closed_surface_has_no_arcs(self, punctured_torus):
        assert all(c.is_curve for c in enumerate_candidates(punctured_torus, 3))

    def test_curves_only(self, pants):
        assert all(c.is_curve for c in enumerate_candidates(pants, 2, curves_only=True))

    def test_every_candidate_has_a_length(self, torus):
        for c in enumerate_candidates(torus, 3):
            assert candidate_length(torus, c) > 0.0

    def test_negative_depth(self, pants):
        with pytest.raises(ValueError):
            enumerate_candidates(pants, -1)


class TestDistance:
    def test_distance_to_itself(self, pants):
        est = arc_distance_estimate(pants, pants, 2)
        assert est.value == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("t", [0.25, 1.0])
    def test_stretch_is_witnessed_by_a_leaf(self, pants, t):
        est = arc_distance_estimate(pants, generalized_stretch(pants, t), 2)
        assert t - 1e-9 <= est.value <= t + 1e-6
        assert est.witness.kind in LEAF_KINDS

    def test_torus_closed_leaf_witness(self, torus):
        t = 0.5
        est = arc_distance_estimate(torus, generalized_stretch(torus, t), 2)
        assert est.value == pytest.approx(t, abs=1e-6)
        assert est.witness.kind in LEAF_KINDS

    def test_curves_only_is_a_lower_bound(self, torus):
        y = generalized_stretch(torus, 0.5)
        d_a = arc_distance_estimate(torus, y, 2).value
        d_th = arc_distance_estimate(torus, y, 2, curves_only=True).value
        assert d_th <= d_a + 1e-12

    def test_mismatch(self, pants, torus):
        with pytest.raises(HypStretchError) as info:
            arc_distance_estimate(pants, torus, 1)
        assert info.value.code is ErrorCode.COMBINATORIAL_MISMATCH

    def test_table_is_sorted(self, pants):
        est = arc_distance_estimate(pants, generalized_stretch(pants, 0.5), 2)
        frame = est.table()
        assert list(frame.columns) == ["kind", "path", "length_x", "length_y", "log_ratio"]
        assert list(frame["log_ratio"]) == sorted(frame["log_ratio"], reverse=True)
        row = frame.iloc[0]
        assert row["log_ratio"] == pytest.approx(math.log(row["length_y"] / row["length_x"]))
