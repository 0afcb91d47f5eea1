"""Surfaces: file format, validation, developing, lengths and classification."""

import json

import pytest

from hypstretch.core.hyp_core import UhpPoint, apply, dist
from hypstretch.core.pieces import Hexagon, edge_lengths
from hypstretch.data.surface_io import (
    dumps_surface,
    file_sha256,
    load_surface,
    save_surface,
    surface_from_dict,
    surface_to_dict,
)
from hypstretch.services.surface import (
    DualPath,
    arc_length,
    boundary_curves,
    classify,
    closed_leaves,
    curve_length,
    develop,
    doubled_arc_length,
    gluing_isometry,
    inverse_word,
    measurable_leaves,
    reduce_word,
    same_combinatorics,
    validate,
    vertex_classes,
)
from hypstretch.utils.errors import ErrorCode, HypStretchError

EXAMPLES = ["pants_hexagons", "torus_quad_triangle", "punctured_torus", "crown_pentagons", "quad_pair_crown"]


def _edited(surface, edit):
    data = json.loads(json.dumps(surface_to_dict(surface)))
    edit(data)
    return surface_from_dict(data)


class TestFiles:
    def test_save_and_load(self, pants, tmp_path):
        path = tmp_path / "pants.json"
        save_surface(pants, path)
        assert load_surface(path) == pants
        assert dumps_surface(load_surface(path)) == dumps_surface(pants)

    def test_missing_file(self, tmp_path):
        with pytest.raises(HypStretchError) as info:
            load_surface(tmp_path / "missing.json")
        assert info.value.code is ErrorCode.BAD_FILE

    def test_not_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{topology", encoding="utf-8")
        with pytest.raises(HypStretchError) as info:
            load_surface(path)
        assert info.value.code is ErrorCode.BAD_FILE

    def test_malformed_document(self):
        with pytest.raises(HypStretchError) as info:
            surface_from_dict({"topology": {"g": 0, "b": 3}, "pieces": [], "gluings": []})
        assert info.value.code is ErrorCode.BAD_FILE

    def test_hash_is_stable(self, surface_path):
        path = surface_path("pants_hexagons")
        assert file_sha256(path) == file_sha256(path)
        assert len(file_sha256(path)) == 64

    def test_shear_table(self, torus):
        table = torus.shear_table()
        assert table["Q.s1"] == 1.0
        assert table["Q.l2~T.l2"] == -1.0
        assert table["T.l1~T.l3"] == 1.0


class TestValidate:
    @pytest.mark.parametrize("name", EXAMPLES)
    def test_shipped_examples(self, name, surface_path):
        report = validate(load_surface(surface_path(name)))
        assert report.valid, report.violations
        assert report.piece_count == report.expected_pieces

    def test_pants_counts(self, pants):
        report = validate(pants)
        assert report.piece_count == 2
        assert report.boundary_components == 3
        assert report.punctures == 0

    def test_dangling_leaf(self, pants):
        broken = _edited(pants, lambda d: d["gluings"].pop())
        report = validate(broken)
        assert not report.valid
        assert any("dangling" in v for v in report.violations)

    def test_mismatched_lengths(self, pants):
        def edit(d):
            d["pieces"][1]["shears"] = [2.0, 2.0, 2.0]

        report = validate(_edited(pants, edit))
        assert any("differ" in v for v in report.violations)

    def test_small_length_mismatch(self, pants):
        def edit(d):
            d["pieces"][1]["shears"] = [1.0, 1.0, 1.0 + 2e-7]

        report = validate(_edited(pants, edit))
        assert not report.valid
        assert any("differ" in v for v in report.violations)

    def test_piece_count(self, pants):
        def edit(d):
            d["topology"]["g"] = 1

        report = validate(_edited(pants, edit))
        assert any("needs 6" in v for v in report.violations)

    def test_missing_shear(self, torus):
        def edit(d):
            del d["gluings"][1]["shear"]

        report = validate(_edited(torus, edit))
        assert any("needs a shear" in v for v in report.violations)

    def test_closed_leaf_lengths(self, torus):
        report = validate(torus)
        assert len(report.closed_leaf_lengths) == 1
        assert report.closed_leaf_lengths[0] == pytest.approx(1.0, abs=1e-9)

    def test_punctured_torus(self, punctured_torus):
        report = validate(punctured_torus)
        assert report.punctures == 1
        assert report.boundary_components == 0


class TestDeveloping:
    def test_empty_path_is_identity(self, pants):
        m = develop(pants, DualPath(()))
        assert (m.a, m.b, m.c, m.d) == (1.0, 0.0, 0.0, 1.0)

    @pytest.mark.parametrize("name", EXAMPLES)
    def test_gluings_are_inverse_from_both_sides(self, name, surface_path):
        surface = load_surface(surface_path(name))
        p = UhpPoint(0.3, 1.1)
        for gl in surface.gluings:
            there_and_back = gluing_isometry(surface, gl.first) @ gluing_isometry(surface, gl.second)
            assert dist(apply(there_and_back, p), p) < 1e-9

    def test_cross_and_return(self, pants):
        m = develop(pants, DualPath((("H1", "l1"), ("H2", "l1"))))
        for p in (UhpPoint(0.3, 1.1), UhpPoint(-2.0, 0.4), UhpPoint(5.0, 3.0)):
            assert dist(apply(m, p), p) < 1e-9

    def test_broken_path(self, pants):
        with pytest.raises(HypStretchError) as info:
            develop(pants, DualPath((("H1", "l1"), ("H1", "l2"))))
        assert info.value.code is ErrorCode.PATH_BROKEN

    def test_reduce_word(self, pants):
        word = DualPath((("H1", "l2"), ("H2", "l3"), ("H1", "l1")))
        reduced = reduce_word(pants, DualPath((("H1", "l1"), ("H2", "l1"))))
        assert reduced.crossings == ()
        assert len(reduce_word(pants, word)) == 1

    def test_inverse_word(self, pants):
        assert inverse_word(pants, (("H1", "l2"),)) == (("H2", "l3"),)


class TestLengths:
    def test_pants_boundary_follows_hexagon_trigonometry(self, pants):
        side = edge_lengths(Hexagon(1.0, 1.0, 1.0))["a1"]
        for bc in boundary_curves(pants):
            assert len(bc.a_edges) == 2
            assert curve_length(pants, bc.word) == pytest.approx(2.0 * side, abs=1e-9)

    def test_square_doubles_length(self, torus):
        word = boundary_curves(torus)[0].word
        squared = DualPath(word.crossings * 2)
        assert curve_length(torus, squared) == pytest.approx(2.0 * curve_length(torus, word), abs=1e-9)

    def test_rotation_invariance(self, torus):
        word = boundary_curves(torus)[0].word
        base = curve_length(torus, word)
        for k in range(len(word)):
            rotated = DualPath(word.crossings[k:] + word.crossings[:k])
            assert curve_length(torus, rotated) == pytest.approx(base, abs=1e-9)

    def test_inverse_has_same_length(self, torus):
        word = boundary_curves(torus)[0].word
        inverse = DualPath(inverse_word(torus, word.crossings))
        assert curve_length(torus, inverse) == pytest.approx(curve_length(torus, word), abs=1e-9)

    def test_puncture_is_parabolic(self, punctured_torus):
        (cusp,) = [c for c in vertex_classes(punctured_torus) if c.is_parabolic()]
        with pytest.raises(HypStretchError) as info:
            curve_length(punctured_torus, cusp.word)
        assert info.value.code is ErrorCode.PARABOLIC_OR_TRIVIAL

    def test_seam_arc_is_the_leaf(self, pants):
        arc = DualPath((), ("H1", "a1"), ("H1", "a2"))
        assert arc_length(pants, arc) == pytest.approx(Hexagon(1.0, 1.0, 1.0).leaf_lengths()["l1"], abs=1e-9)

    def test_arc_doubling(self, pants):
        arc = DualPath((("H1", "l1"),), ("H1", "a1"), ("H2", "a1"))
        assert doubled_arc_length(pants, arc) == pytest.approx(2.0 * arc_length(pants, arc), abs=1e-9)

    def test_trivial_arc_rejected(self, pants):
        with pytest.raises(HypStretchError) as info:
            arc_length(pants, DualPath((), ("H1", "a1"), ("H1", "a1")))
        assert info.value.code is ErrorCode.GEODESICS_INTERSECT


class TestClassify:
    def test_pants_is_all_block(self, pants):
        dec = classify(pants)
        assert set(dec.block) == {"H1", "H2"}
        assert dec.complement == ()
        assert dec.crowns == ()

    def test_torus_crown(self, torus):
        dec = classify(torus)
        assert dec.block == ("Q",)
        assert dec.cycles == [("Q",)]
        assert [sp.case for sp in dec.crowns[0].spikes] == [1]

    def test_punctured_torus_has_empty_block(self, punctured_torus):
        dec = classify(punctured_torus)
        assert dec.block == ()
        assert len(dec.complement) == 2

    def test_pentagon_spike(self, crown_pentagons):
        dec = classify(crown_pentagons)
        assert dec.cycles == [("Q",)]
        assert dec.crowns[0].spikes[0].case == 2

    def test_quad_pair_spike(self, quad_pair):
        dec = classify(quad_pair)
        assert dec.cycles == [("Q0",)]
        assert dec.crowns[0].spikes[0].case == 3
        corners = dec.crowns[0].spikes[0].corners
        assert corners[0] == ("Q0", "C") and corners[-1] == ("Q0", "D")

    def test_torus_closed_leaves(self, torus):
        pairs = closed_leaves(torus)
        assert len(pairs) == 1
        sides = {frozenset(side.corners) for side in pairs[0]}
        assert frozenset({("T", "A")}) in sides
        assert measurable_leaves(torus) == {"finite": 0, "closed": 1}

    def test_same_combinatorics(self, pants, torus):
        assert same_combinatorics(pants, pants)
        assert not same_combinatorics(pants, torus)
        stretched = _edited(torus, lambda d: d["gluings"][1].update(shear=-2.0))
        assert same_combinatorics(torus, stretched)

    def test_pants_leaves_are_all_finite(self, pants):
        assert measurable_leaves(pants) == {"finite": 3, "closed": 0}
