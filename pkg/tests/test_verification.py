"""Invariant report over the shipped surfaces."""

import json

import pytest

from hypstretch.data.surface_io import surface_from_dict, surface_to_dict
from hypstretch.services import verification
from hypstretch.services.verification import Check, VerificationReport, verify_surface
from hypstretch.utils.errors import ErrorCode, HypStretchError


@pytest.mark.parametrize("name", ["pants", "torus", "punctured_torus", "crown_pentagons", "quad_pair"])
def test_shipped_surfaces_pass(request, name):
    surface = request.getfixturevalue(name)
    report = verify_surface(surface, name, [0.25], depth=2, samples=300)
    failed = [(c.name, c.value, c.detail) for c in report.checks if not c.passed]
    assert report.passed, failed


def test_report_names_its_checks(torus):
    report = verify_surface(torus, "torus", [0.5], depth=2, samples=200)
    names = {c.name for c in report.checks}
    assert {"validate", "special_points", "arc_doubling", "epsilon_zero", "semigroup[t=0.5]"} <= names
    assert "distance[t=0.5]" in names


def test_corrupted_surface_fails(pants):
    data = json.loads(json.dumps(surface_to_dict(pants)))
    data["pieces"][1]["shears"] = [1.5, 1.0, 1.0]
    report = verify_surface(surface_from_dict(data), "broken", [0.25], depth=1, samples=10)
    assert not report.passed
    assert [c.name for c in report.checks] == ["validate"]


def test_report_from_dict():
    report = VerificationReport("demo", [0.25, 1.0], 3)
    report.add("a", 1e-12, 1e-9)
    report.add("b", 2.0, 1.0, detail="too far")
    assert not report.passed
    back = VerificationReport.from_dict(json.loads(report.to_json()))
    assert back == report
    assert back.checks[1] == Check("b", 2.0, 1.0, False, "too far")


def test_stretch_error_fails_only_its_checks(torus, monkeypatch):
    stretch = verification.generalized_stretch

    def failing_at_one(surface, t, check=True):
        if t == 1.0:
            raise HypStretchError(ErrorCode.INVALID_SURFACE, "cannot stretch")
        return stretch(surface, t, check)

    monkeypatch.setattr(verification, "generalized_stretch", failing_at_one)
    report = verify_surface(torus, "torus", [0.25, 1.0], depth=1, samples=50)
    failed = {c.name for c in report.checks if not c.passed}
    assert {"leaf_stretch[t=1]", "semigroup[t=1]"} <= failed
    assert "semigroup[t=0.25]" not in failed
    assert "distance[t=0.25]" in {c.name for c in report.checks}
