# ==============================================================================
# VERIFICATION REPORT
# ==============================================================================
# Runs every invariant check on one surface over a grid of stretch times and
# collects the residuals. Each check records its value and tolerance; the
# report passes when every check does.
# ==============================================================================

import json
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from hypstretch.core.pieces import Hexagon, Triangle, sample_points, special_points
from hypstretch.core.piece_maps import piece_stretch_map, sampled_lipschitz
from hypstretch.data.surface_io import Surface
from hypstretch.services.candidates import arc_distance_estimate, enumerate_candidates
from hypstretch.services.stretch import (
    build_cylinder,
    epsilon_cocycle,
    generalized_stretch,
    has_measurable_leaf,
    horocyclic_shift,
    leaf_stretch_report,
    stretch_difference_check,
)
from hypstretch.services.surface import (
    DualPath,
    arc_length,
    classify,
    curve_length,
    doubled_arc_length,
    validate,
)
from hypstretch.utils.config import get_sample_count, get_seed
from hypstretch.utils.errors import HypStretchError

logger = logging.getLogger(__name__)


@dataclass
class Check:
    name: str
    value: float
    tolerance: float
    passed: bool
    detail: str = ""


@dataclass
class VerificationReport:
    surface: str
    t_grid: List[float]
    depth: int
    checks: List[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, value: float, tolerance: float, detail: str = "", passed: Optional[bool] = None):
        ok = (value <= tolerance) if passed is None else passed
        self.checks.append(Check(name, float(value), float(tolerance), bool(ok), detail))
        if not ok:
            logger.warning(f"Check {name} failed: {value:.12g} > {tolerance:.3g} {detail}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "surface": self.surface,
            "t_grid": list(self.t_grid),
            "depth": self.depth,
            "passed": self.passed,
            "checks": [asdict(c) for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "VerificationReport":
        report = cls(str(data["surface"]), [float(t) for t in data["t_grid"]], int(data["depth"]))
        report.checks = [Check(**c) for c in data["checks"]]
        return report


def _guard(report: VerificationReport, name: str, fn):
    """Runs one check; a library error fails the check instead of the run."""
    try:
        fn()
    except HypStretchError as e:
        report.add(name, math.inf, 0.0, detail=e.message, passed=False)


def _check_pieces(report: VerificationReport, surface: Surface, t_grid: Sequence[float], samples: int):
    rng = np.random.default_rng(get_seed())
    worst = 0.0
    distinct = []
    for _, piece in surface.pieces:
        if piece not in distinct:
            distinct.append(piece)
    for piece in distinct:
        if isinstance(piece, Triangle):
            continue
        for sp in special_points(piece).values():
            worst = max(worst, sp.residual)
    report.add("special_points", worst, 1e-9)
    for piece in distinct:
        if isinstance(piece, Hexagon):
            continue
        points = sample_points(piece, samples, rng)
        for t in t_grid:
            name = f"lipschitz[{piece.kind}{piece.shears},t={t:g}]"

            def lipschitz(piece=piece, t=t, name=name):
                f = piece_stretch_map(piece, t)
                usable = []
                for p in points:
                    try:
                        f(p)
                        usable.append(p)
                    except HypStretchError:
                        continue
                ratio = sampled_lipschitz(f, usable, samples, rng)
                bound = math.exp(t) * (1.0 + 1e-6)
                report.add(name, ratio / bound, 1.0)

            _guard(report, name, lipschitz)


def _check_lengths(report: VerificationReport, surface: Surface, depth: int):
    worst_double, worst_rotation = 0.0, 0.0
    for cand in enumerate_candidates(surface, depth):
        path = cand.path
        if cand.is_curve:
            base = curve_length(surface, path)
            for k in range(1, len(path.crossings)):
                rotated = DualPath(path.crossings[k:] + path.crossings[:k])
                worst_rotation = max(worst_rotation, abs(curve_length(surface, rotated) - base))
        else:
            worst_double = max(worst_double, abs(2.0 * arc_length(surface, path) - doubled_arc_length(surface, path)))
    report.add("curve_rotation_invariance", worst_rotation, 1e-9)
    report.add("arc_doubling", worst_double, 1e-9)


def _check_stretch(report: VerificationReport, surface: Surface, t_grid: Sequence[float], depth: int):
    decomposition = classify(surface)
    measurable = has_measurable_leaf(surface)
    for j in range(len(decomposition.crowns)):
        def crown_checks(j=j):
            model = build_cylinder(surface, j, decomposition)
            for t in t_grid:
                _guard(report, f"stretch_difference[crown{j},t={t:g}]",
                       lambda: report.add(f"stretch_difference[crown{j},t={t:g}]", max(stretch_difference_check(model, t)), 1e-9))
                _guard(report, f"horocyclic_shift[crown{j},t={t:g}]",
                       lambda: report.add(f"horocyclic_shift[crown{j},t={t:g}]",
                                          max(r.residual(t) for r in horocyclic_shift(surface, j, t)), 1e-9))

        _guard(report, f"cylinder[crown{j}]", crown_checks)

    def cocycle_at_zero():
        zero = epsilon_cocycle(surface, decomposition, 0.0)
        report.add("epsilon_zero", max((abs(v) for v in zero.epsilon.values()), default=0.0), 1e-12)

    _guard(report, "epsilon_zero", cocycle_at_zero)
    for t in t_grid:
        def cocycle_checks():
            cocycle = epsilon_cocycle(surface, decomposition, t)
            worst = max((abs(v) for v in cocycle.omega_epsilon().values()), default=0.0)
            report.add(f"omega_epsilon[t={t:g}]", worst, 1e-8)
            positive = cocycle.positive()
            if positive is None:
                report.add(f"positivity[t={t:g}]", 0.0, 0.0, detail="no measurable leaf")
            else:
                report.add(f"positivity[t={t:g}]", 0.0 if positive else 1.0, 0.0)

        _guard(report, f"cocycle[t={t:g}]", cocycle_checks)
        stretched: Dict[float, Surface] = {}

        def leaf_checks():
            stretched[t] = generalized_stretch(surface, t)
            leaves = leaf_stretch_report(surface, t, stretched[t])
            report.add(f"leaf_stretch[t={t:g}]", max((r.residual(t) for r in leaves), default=0.0), 1e-9)

        def semigroup_check():
            once = stretched[t] if t in stretched else generalized_stretch(surface, t)
            half = generalized_stretch(generalized_stretch(surface, t / 2.0), t / 2.0)
            table, table_half = once.shear_table(), half.shear_table()
            report.add(f"semigroup[t={t:g}]", max((abs(table[k] - table_half[k]) for k in table), default=0.0), 1e-9)

        _guard(report, f"leaf_stretch[t={t:g}]", leaf_checks)
        _guard(report, f"semigroup[t={t:g}]", semigroup_check)
        if measurable and t in stretched:
            _guard(report, f"distance[t={t:g}]", lambda: _check_distance(report, surface, stretched[t], t, depth))


def _check_distance(report: VerificationReport, surface: Surface, stretched: Surface, t: float, depth: int):
    estimate = arc_distance_estimate(surface, stretched, depth)
    gap = max(t - 1e-9 - estimate.value, estimate.value - t - 1e-6, 0.0)
    report.add(f"distance[t={t:g}]", gap, 0.0, detail=f"estimate {estimate.value:.12g} by {estimate.witness.label}")


def verify_surface(surface: Surface, name: str, t_grid: Sequence[float], depth: int = 4, samples: Optional[int] = None) -> VerificationReport:
    """All invariant checks for one surface."""
    samples = get_sample_count() if samples is None else samples
    report = VerificationReport(name, [float(t) for t in t_grid], depth)
    validation = validate(surface)
    report.add("validate", float(len(validation.violations)), 0.0, detail="; ".join(validation.violations))
    if not validation.valid:
        return report
    _check_pieces(report, surface, t_grid, samples)
    _guard(report, "lengths", lambda: _check_lengths(report, surface, depth))
    _check_stretch(report, surface, t_grid, depth)
    logger.info(f"Verification of {name}: {sum(c.passed for c in report.checks)}/{len(report.checks)} checks pass")
    return report
