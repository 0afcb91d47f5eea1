"""Stretch lines: shears, cylinders, shifts, cocycles and leaf lengths."""

import json
import math

import pytest

from hypstretch.core.pieces import Quad, displacement
from hypstretch.core.traintrack import positivity_test
from hypstretch.data.surface_io import surface_from_dict, surface_to_dict
from hypstretch.services.stretch import (
    build_cylinder,
    crown_adjacent_shear,
    epsilon_cocycle,
    generalized_stretch,
    has_measurable_leaf,
    horocyclic_shift,
    leaf_stretch_report,
    realized_crown_shear,
    realized_displacement,
    stretch_difference_check,
    thurston_stretch,
)
from hypstretch.services.surface import closed_leaves, curve_length, same_combinatorics, validate
from hypstretch.utils.errors import ErrorCode, HypStretchError

CROWNED = ["torus", "crown_pentagons", "quad_pair"]


@pytest.fixture
def crowned(request):
    return request.getfixturevalue(request.param)


class TestGeneralizedStretch:
    def test_zero_is_identity(self, torus):
        assert generalized_stretch(torus, 0.0).shear_table() == pytest.approx(torus.shear_table())

    def test_log_two_doubles_hexagon_shears(self, pants):
        out = generalized_stretch(pants, math.log(2.0))
        for _, piece in out.pieces:
            assert piece.shears == pytest.approx((2.0, 2.0, 2.0))

    def test_result_is_valid_with_same_combinatorics(self, torus):
        out = generalized_stretch(torus, 0.7)
        assert validate(out).valid
        assert same_combinatorics(torus, out)

    @pytest.mark.parametrize("a,b", [(0.3, 0.2), (0.1, 1.0)])
    def test_semigroup(self, torus, a, b):
        twice = generalized_stretch(generalized_stretch(torus, a), b)
        once = generalized_stretch(torus, a + b)
        for key, value in once.shear_table().items():
            assert twice.shear_table()[key] == pytest.approx(value, abs=1e-9)
        assert dict(twice.metadata)["stretch_t"] == pytest.approx(a + b)

    def test_crown_shear_scales(self):
        for sigma, s in ((-1.0, 1.0), (0.4, -2.0), (2.5, 0.3)):
            assert crown_adjacent_shear(sigma, s, 0.8) == pytest.approx(math.exp(0.8) * sigma, abs=1e-12)

    def test_realized_displacement(self):
        assert realized_displacement(Quad(0.0)) == pytest.approx(0.5 * math.log(2.0), abs=1e-12)
        for s in (-2.0, -0.5, 0.3, 1.0, 3.0):
            assert realized_displacement(Quad(s)) == pytest.approx(displacement(s), abs=1e-12)

    @pytest.mark.parametrize("crowned,quad_id", [("torus", "Q"), ("crown_pentagons", "Q"), ("quad_pair", "Q0")], indirect=["crowned"])
    @pytest.mark.parametrize("t", [0.25, 1.0, -0.5])
    def test_realized_crown_shear_matches_closed_form(self, crowned, quad_id, t):
        quad = crowned.piece(quad_id)
        sigma = crowned.gluing_at((quad_id, "l2")).shear
        realized = realized_crown_shear(sigma, quad, t)
        assert realized == pytest.approx(crown_adjacent_shear(sigma, quad.s, t), abs=1e-9)
        out = generalized_stretch(crowned, t)
        assert out.gluing_at((quad_id, "l2")).shear == pytest.approx(realized, abs=1e-12)

    def test_invalid_surface_rejected(self, pants):
        data = json.loads(json.dumps(surface_to_dict(pants)))
        data["gluings"].pop()
        with pytest.raises(HypStretchError) as info:
            generalized_stretch(surface_from_dict(data), 0.5)
        assert info.value.code is ErrorCode.INVALID_SURFACE

    def test_measurable_leaves(self, pants, torus, punctured_torus):
        assert has_measurable_leaf(pants)
        assert has_measurable_leaf(torus)
        assert not has_measurable_leaf(punctured_torus)


class TestThurstonStretch:
    def test_scales_every_shear(self, punctured_torus):
        out = thurston_stretch(punctured_torus, 0.5)
        for gl, gl_t in zip(punctured_torus.gluings, out.gluings):
            assert gl_t.shear == pytest.approx(math.exp(0.5) * gl.shear)

    def test_needs_triangles(self, torus):
        with pytest.raises(HypStretchError) as info:
            thurston_stretch(torus, 0.5)
        assert info.value.code is ErrorCode.NON_TRIANGLE_PIECE


class TestCrowns:
    @pytest.mark.parametrize("crowned", CROWNED, indirect=True)
    @pytest.mark.parametrize("t", [0.25, 1.0])
    def test_stretch_difference(self, crowned, t):
        model = build_cylinder(crowned, 0)
        assert max(stretch_difference_check(model, t)) < 1e-9

    @pytest.mark.parametrize("crowned", CROWNED, indirect=True)
    def test_cylinder_at_zero(self, crowned):
        assert max(stretch_difference_check(build_cylinder(crowned, 0), 0.0)) < 1e-12

    def test_pants_has_no_crown(self, pants):
        with pytest.raises(HypStretchError) as info:
            build_cylinder(pants, 0)
        assert info.value.code is ErrorCode.NOT_A_CROWN

    @pytest.mark.parametrize("crowned", CROWNED, indirect=True)
    @pytest.mark.parametrize("t", [0.25, 1.0])
    def test_horocyclic_shift_scales(self, crowned, t):
        for record in horocyclic_shift(crowned, 0, t):
            assert record.residual(t) < 1e-9

    def test_quad_pair_cylinder_case(self, quad_pair):
        assert build_cylinder(quad_pair, 0).case == (3,)


class TestCocycle:
    def test_vanishes_at_zero(self, torus):
        cocycle = epsilon_cocycle(torus, t=0.0)
        assert max(abs(v) for v in cocycle.epsilon.values()) < 1e-12

    @pytest.mark.parametrize("t", [0.25, 1.0])
    def test_omega_against_leaves(self, torus, t):
        cocycle = epsilon_cocycle(torus, t=t)
        assert max(abs(v) for v in cocycle.omega_epsilon().values()) < 1e-8

    def test_rho_decomposes(self, torus):
        assert epsilon_cocycle(torus, t=0.5).is_rho_consistent(1e-9)

    def test_positive_on_a_stretch_line(self, torus):
        assert epsilon_cocycle(torus, t=0.5).positive()

    def test_no_leaf_measures_on_a_punctured_torus(self, punctured_torus):
        assert epsilon_cocycle(punctured_torus, t=0.5).positive() is None

    @pytest.mark.parametrize("t", [0.0, 0.5, 1.0])
    def test_closed_leaf_measures_match_holonomy(self, torus, t):
        cocycle = epsilon_cocycle(torus, t=t)
        stretched = generalized_stretch(torus, t)
        (pair,) = closed_leaves(stretched)
        length = curve_length(stretched, pair[0].word)
        lengths = cocycle.leaf_lengths()
        assert sorted(lengths) == ["leaf0a", "leaf0b"]
        for value in lengths.values():
            assert value == pytest.approx(length, abs=1e-8)

    @pytest.mark.parametrize("t", [0.25, 1.0])
    def test_finite_leaf_measures_match_hexagon_lengths(self, pants, t):
        cocycle = epsilon_cocycle(pants, t=t)
        stretched = generalized_stretch(pants, t)
        lengths = cocycle.leaf_lengths()
        assert len(lengths) == 6
        for name, value in lengths.items():
            pid, label = name.split(":")[1].split(".")
            assert value == pytest.approx(stretched.piece(pid).leaf_lengths()[label], abs=1e-9)
        assert cocycle.positive()

    def test_reversed_weights_are_not_positive(self, torus, pants):
        for surface in (torus, pants):
            cocycle = epsilon_cocycle(surface, t=0.5)
            reversed_rho = {b: -v for b, v in cocycle.rho_t.items()}
            assert not positivity_test(cocycle.track, reversed_rho, list(cocycle.measures.values()))

    @pytest.mark.parametrize("crowned", CROWNED, indirect=True)
    @pytest.mark.parametrize("t", [0.25, 1.0])
    def test_crowned_surfaces(self, crowned, t):
        cocycle = epsilon_cocycle(crowned, t=t)
        assert cocycle.measures
        assert max(abs(v) for v in cocycle.omega_epsilon().values()) < 1e-8
        assert cocycle.is_rho_consistent(1e-9)
        assert cocycle.positive()


class TestLeafLengths:
    @pytest.mark.parametrize("t", [0.25, 1.0])
    def test_closed_leaf(self, torus, t):
        (record,) = leaf_stretch_report(torus, t)
        assert record.kind == "closed"
        assert record.length_t == pytest.approx(math.exp(t), abs=1e-9)

    def test_finite_leaves(self, pants):
        records = leaf_stretch_report(pants, 0.5)
        assert [r.kind for r in records] == ["finite"] * 3
        assert max(r.residual(0.5) for r in records) < 1e-9
