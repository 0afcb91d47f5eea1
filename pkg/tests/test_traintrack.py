"""Train tracks: switch relations, cusps, splitting, omega and positivity."""

import pytest
from hypothesis import given, settings, strategies as st

from hypstretch.core.traintrack import (
    Switch,
    TrainTrack,
    check_cusp_condition,
    check_switch_relations,
    cocycle_space_dimension,
    omega,
    positivity_test,
    split_to_generic,
)
from hypstretch.data.weights_io import format_weights, load_weights, parse_weights, save_weights
from hypstretch.utils.errors import ErrorCode, HypStretchError

weights = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False)


def trivalent():
    return TrainTrack((Switch("v", ("a",), ("b", "c")),), frozenset({"a", "b", "c"}))


def fan():
    return TrainTrack((Switch("v", ("a",), ("b", "c", "d")),), frozenset({"a", "b", "c", "d"}))


@st.composite
def trivalent_cocycles(draw):
    b, c = draw(weights), draw(weights)
    return {"a": b + c, "b": b, "c": c}


@st.composite
def fan_cocycles(draw):
    b, c, d = draw(weights), draw(weights), draw(weights)
    return {"a": b + c + d, "b": b, "c": c, "d": d}


class TestSwitchRelations:
    def test_balanced(self):
        ok, residual = check_switch_relations(trivalent(), {"a": 2.0, "b": 1.0, "c": 1.0})
        assert ok and residual == 0.0

    def test_unbalanced(self):
        ok, residual = check_switch_relations(trivalent(), {"a": 2.0, "b": 1.0, "c": 1.5})
        assert not ok
        assert residual == pytest.approx(0.5)

    def test_zero_weights(self):
        assert check_switch_relations(fan(), dict.fromkeys("abcd", 0.0)) == (True, 0.0)

    def test_missing_weight(self):
        with pytest.raises(HypStretchError) as info:
            check_switch_relations(trivalent(), {"a": 1.0, "b": 1.0})
        assert info.value.code is ErrorCode.MISSING_BRANCH_WEIGHT

    def test_every_branch_needs_two_slots(self):
        with pytest.raises(ValueError):
            TrainTrack((Switch("v", ("a",), ("b", "c")),))


class TestCuspCondition:
    def test_no_punctures(self):
        assert check_cusp_condition(trivalent(), {"a": 1.0, "b": 0.0, "c": 1.0})

    def test_loop(self):
        track = TrainTrack(trivalent().switches, trivalent().open_ends, (("b", "c"),))
        assert check_cusp_condition(track, {"a": 0.0, "b": 1.0, "c": -1.0})
        assert not check_cusp_condition(track, {"a": 1.0, "b": 1.0, "c": 0.0})


class TestOmega:
    @settings(max_examples=50, deadline=None)
    @given(trivalent_cocycles(), trivalent_cocycles())
    def test_antisymmetric(self, a, b):
        track = trivalent()
        assert omega(track, a, a) == 0.0
        assert abs(omega(track, a, b) + omega(track, b, a)) < 1e-12

    @settings(max_examples=50, deadline=None)
    @given(trivalent_cocycles(), trivalent_cocycles(), trivalent_cocycles())
    def test_bilinear(self, a, b, c):
        track = trivalent()
        ac = {k: a[k] + c[k] for k in a}
        assert omega(track, ac, b) == pytest.approx(omega(track, a, b) + omega(track, c, b), abs=1e-9)

    def test_value(self):
        a = {"a": 3.0, "b": 1.0, "c": 2.0}
        b = {"a": 1.0, "b": 1.0, "c": 0.0}
        # a(right) b(left) - a(left) b(right)
        assert omega(trivalent(), a, b) == pytest.approx(2.0)

    def test_needs_generic_track(self):
        with pytest.raises(HypStretchError) as info:
            omega(fan(), dict.fromkeys("abcd", 0.0), dict.fromkeys("abcd", 0.0))
        assert info.value.code is ErrorCode.NOT_GENERIC


class TestSplitting:
    def test_generic_track_unchanged(self):
        track = trivalent()
        w = {"a": 2.0, "b": 1.0, "c": 1.0}
        split, (out,) = split_to_generic(track, [w])
        assert split.switches == track.switches
        assert out == w

    def test_fan_splits_into_trivalent_switches(self):
        w = {"a": 6.0, "b": 1.0, "c": 2.0, "d": 3.0}
        split, (out,) = split_to_generic(fan(), [w])
        assert split.generic
        assert len(split.switches) == 2
        assert out["v/f1"] == pytest.approx(5.0)
        assert check_switch_relations(split, out)[0]

    def test_zero_weights_stay_zero(self):
        _, (out,) = split_to_generic(fan(), [dict.fromkeys("abcd", 0.0)])
        assert all(v == 0.0 for v in out.values())

    def test_incoming_side_split(self):
        track = TrainTrack((Switch("v", ("b", "c", "d"), ("a",)),), frozenset("abcd"))
        split, (out,) = split_to_generic(track, [{"a": 6.0, "b": 1.0, "c": 2.0, "d": 3.0}])
        assert split.generic
        assert check_switch_relations(split, out)[0]

    def test_unsplittable(self):
        track = TrainTrack((Switch("v", ("a", "b"), ("c", "d")),), frozenset("abcd"))
        with pytest.raises(HypStretchError) as info:
            split_to_generic(track, [dict.fromkeys("abcd", 0.0)])
        assert info.value.code is ErrorCode.UNSPLITTABLE

    @settings(max_examples=40, deadline=None)
    @given(fan_cocycles(), fan_cocycles())
    def test_omega_independent_of_split_order(self, a, b):
        left, (a1, b1) = split_to_generic(fan(), [a, b], from_left=True)
        right, (a2, b2) = split_to_generic(fan(), [a, b], from_left=False)
        assert omega(left, a1, b1) == pytest.approx(omega(right, a2, b2), abs=1e-9)


class TestPositivity:
    def test_zero_rho_is_not_positive(self):
        mu = {"a": 1.0, "b": 1.0, "c": 0.0}
        assert not positivity_test(trivalent(), dict.fromkeys("abc", 0.0), [mu])

    def test_sign_flips_with_rho(self):
        rho = {"a": 1.0, "b": -1.0, "c": 2.0}
        mu = {"a": 1.0, "b": 1.0, "c": 0.0}
        assert positivity_test(trivalent(), rho, [mu])
        assert not positivity_test(trivalent(), {k: -v for k, v in rho.items()}, [mu])

    def test_negative_measure(self):
        with pytest.raises(HypStretchError) as info:
            positivity_test(trivalent(), dict.fromkeys("abc", 1.0), [{"a": -1.0, "b": 0.0, "c": -1.0}])
        assert info.value.code is ErrorCode.NEGATIVE_MEASURE


def test_cocycle_space_dimension():
    assert cocycle_space_dimension(trivalent()) == 2
    assert cocycle_space_dimension(fan()) == 3
    other = TrainTrack((Switch("w", ("x",), ("y", "z")),), frozenset("xyz"))
    assert cocycle_space_dimension(trivalent().merged(other)) == 4


class TestWeightFiles:
    def test_parse_skips_comments(self):
        text = "# rho\n\na 1.5\nb -0.25\n"
        assert parse_weights(text) == {"a": 1.5, "b": -0.25}

    def test_malformed_line(self):
        with pytest.raises(HypStretchError) as info:
            parse_weights("a 1 2\n")
        assert info.value.code is ErrorCode.BAD_FILE

    def test_file_keeps_exact_values(self, tmp_path):
        w = {"crown0/b:Q": 0.1 + 0.2, "leaf0a/c1": 1e-17}
        path = tmp_path / "rho.txt"
        save_weights(w, path)
        assert load_weights(path) == w
        assert format_weights(w).count("\n") == 2

    def test_missing_file(self, tmp_path):
        with pytest.raises(HypStretchError) as info:
            load_weights(tmp_path / "nope.txt")
        assert info.value.code is ErrorCode.BAD_FILE
