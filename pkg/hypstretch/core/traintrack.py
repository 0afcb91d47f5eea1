# ==============================================================================
# TRAIN TRACKS
# ==============================================================================
# Branch-weighted train tracks: switch relations, the cusp condition, splitting
# to a generic track, Thurston's symplectic form and the positivity test.
#
# A switch lists its incoming branches and its outgoing branches; outgoing
# branches are ordered left to right as seen from the incoming side. Branches
# leaving a track cut out of a larger one are declared as open ends. Every
# branch occupies exactly two slots (switch sides or open ends).
# ==============================================================================

import logging
from collections import Counter
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from hypstretch.utils.config import get_tolerance
from hypstretch.utils.errors import ErrorCode, HypStretchError

logger = logging.getLogger(__name__)

Weights = Dict[str, float]


@dataclass(frozen=True)
class Switch:
    name: str
    incoming: Tuple[str, ...]
    outgoing: Tuple[str, ...]

    @property
    def generic(self) -> bool:
        return len(self.incoming) == 1 and len(self.outgoing) == 2

    @property
    def left(self) -> str:
        return self.outgoing[0]

    @property
    def right(self) -> str:
        return self.outgoing[-1]


@dataclass(frozen=True)
class TrainTrack:
    switches: Tuple[Switch, ...]
    open_ends: FrozenSet[str] = frozenset()
    puncture_loops: Tuple[Tuple[str, ...], ...] = ()

    def __post_init__(self):
        slots = Counter()
        for sw in self.switches:
            slots.update(sw.incoming)
            slots.update(sw.outgoing)
        slots.update(self.open_ends)
        bad = {b: n for b, n in slots.items() if n != 2}
        if bad:
            raise ValueError(f"branches must meet exactly two switch slots: {bad}")

    @property
    def branches(self) -> List[str]:
        seen: Dict[str, None] = {}
        for sw in self.switches:
            for b in sw.incoming + sw.outgoing:
                seen.setdefault(b, None)
        return list(seen)

    @property
    def generic(self) -> bool:
        return all(sw.generic for sw in self.switches)

    def merged(self, other: "TrainTrack") -> "TrainTrack":
        """Disjoint union of two tracks."""
        return TrainTrack(
            self.switches + other.switches,
            self.open_ends | other.open_ends,
            self.puncture_loops + other.puncture_loops,
        )


def _require(w: Mapping[str, float], branches: Sequence[str]):
    missing = [b for b in branches if b not in w]
    if missing:
        raise HypStretchError(ErrorCode.MISSING_BRANCH_WEIGHT, f"no weight for {missing}", branches=missing)


def switch_residuals(track: TrainTrack, w: Mapping[str, float]) -> Dict[str, float]:
    _require(w, track.branches)
    return {
        sw.name: abs(sum(w[b] for b in sw.incoming) - sum(w[b] for b in sw.outgoing))
        for sw in track.switches
    }


def check_switch_relations(track: TrainTrack, w: Mapping[str, float], tol: Optional[float] = None) -> Tuple[bool, float]:
    """Whether every switch balances, and the largest residual."""
    tol = get_tolerance() if tol is None else tol
    residuals = switch_residuals(track, w)
    worst = max(residuals.values(), default=0.0)
    return worst < tol, worst


def check_cusp_condition(track: TrainTrack, w: Mapping[str, float], tol: Optional[float] = None) -> bool:
    tol = get_tolerance() if tol is None else tol
    for loop in track.puncture_loops:
        _require(w, loop)
        if abs(sum(w[b] for b in loop)) >= tol:
            return False
    return True


def omega(track: TrainTrack, a: Mapping[str, float], b: Mapping[str, float]) -> float:
    """Thurston's form: sum over switches of a(right) b(left) - a(left) b(right)."""
    if not track.generic:
        raise HypStretchError(ErrorCode.NOT_GENERIC, "omega needs a generic track")
    _require(a, track.branches)
    _require(b, track.branches)
    total = 0.0
    for sw in track.switches:
        total += a[sw.right] * b[sw.left] - a[sw.left] * b[sw.right]
    return total


def split_to_generic(
    track: TrainTrack, weights: Sequence[Mapping[str, float]], from_left: bool = True
) -> Tuple[TrainTrack, List[Weights]]:
    """Splits every switch into trivalent ones and carries the weights along.

    A switch with one incoming and n outgoing branches becomes a chain of n-1
    switches; the new branch f_k carries the incoming weight minus the branches
    already peeled off. Switches with one outgoing and several incoming branches
    are read from the other side first. Several weight tables may be carried at once.
    """
    switches: List[Switch] = []
    out = [dict(w) for w in weights]
    for sw in track.switches:
        incoming, outgoing = sw.incoming, sw.outgoing
        if len(incoming) != 1:
            if len(outgoing) != 1:
                raise HypStretchError(ErrorCode.UNSPLITTABLE, f"switch {sw.name} has several branches on both sides")
            # seen from the other side, left and right swap
            incoming, outgoing = outgoing, tuple(reversed(incoming))
        if len(outgoing) <= 2:
            switches.append(Switch(sw.name, incoming, outgoing))
            continue
        order = list(outgoing) if from_left else list(reversed(outgoing))
        current = incoming[0]
        for k in range(len(order) - 1):
            peeled = order[k]
            if k == len(order) - 2:
                rest = order[k + 1]
            else:
                rest = f"{sw.name}/f{k + 1}"
                for w in out:
                    w[rest] = w[current] - w[peeled]
            pair = (peeled, rest) if from_left else (rest, peeled)
            switches.append(Switch(f"{sw.name}/{k}", (current,), pair))
            current = rest
    return TrainTrack(tuple(switches), track.open_ends, track.puncture_loops), out


def positivity_test(track: TrainTrack, rho: Mapping[str, float], measures: Sequence[Mapping[str, float]]) -> bool:
    """True when omega(rho, mu) > 0 for every supplied transverse measure."""
    for mu in measures:
        negative = [b for b, v in mu.items() if v < 0.0]
        if negative:
            raise HypStretchError(ErrorCode.NEGATIVE_MEASURE, f"negative measure on {negative}")
    if not track.generic:
        split, tables = split_to_generic(track, [rho] + list(measures))
        rho, measures = tables[0], tables[1:]
        track = split
    for mu in measures:
        value = omega(track, rho, mu)
        logger.debug(f"omega(rho, mu) = {value:.12g}")
        if value <= 1e-12:
            return False
    return True


def cocycle_space_dimension(track: TrainTrack) -> int:
    """Dimension of the solution space of the switch relations."""
    branches = track.branches + sorted(track.open_ends - set(track.branches))
    index = {b: i for i, b in enumerate(branches)}
    if not track.switches:
        return len(branches)
    matrix = np.zeros((len(track.switches), len(branches)))
    for row, sw in enumerate(track.switches):
        for b in sw.incoming:
            matrix[row, index[b]] += 1.0
        for b in sw.outgoing:
            matrix[row, index[b]] -= 1.0
    return len(branches) - int(np.linalg.matrix_rank(matrix))
