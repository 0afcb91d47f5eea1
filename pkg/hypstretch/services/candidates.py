# ==============================================================================
# CANDIDATE CURVES AND ARCS, DISTANCE ESTIMATES
# ==============================================================================
# Closed dual words and boundary arcs up to a crossing depth, canonicalized up to
# rotation and reversal, measured on two surfaces with the same combinatorics.
# The estimate is the largest log length ratio over the candidates.
# ==============================================================================

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set, Tuple

import pandas as pd

from hypstretch.core.pieces import EdgeKind, realize
from hypstretch.data.surface_io import EdgeRef, Surface
from hypstretch.services.surface import (
    DualPath,
    arc_length,
    boundary_curves,
    curve_length,
    inverse_word,
    same_combinatorics,
    vertex_classes,
)
from hypstretch.utils.errors import ErrorCode, HypStretchError

logger = logging.getLogger(__name__)

CURVE_KINDS = ("boundary", "curve", "closed_leaf")
ARC_KINDS = ("arc", "leaf_arc")
LEAF_KINDS = ("closed_leaf", "leaf_arc")
WITNESS_SLACK = 1e-9


@dataclass(frozen=True)
class Candidate:
    kind: str
    path: DualPath

    @property
    def is_curve(self) -> bool:
        return self.kind in CURVE_KINDS

    @property
    def label(self) -> str:
        return f"{self.kind} {self.path.describe()}"


def candidate_length(surface: Surface, candidate: Candidate) -> float:
    if candidate.is_curve:
        return curve_length(surface, candidate.path)
    return arc_length(surface, candidate.path)


# ==============================================================================
# CANONICAL FORMS
# ==============================================================================

def _canonical_word(surface: Surface, crossings: Tuple[EdgeRef, ...]) -> Tuple[EdgeRef, ...]:
    """Least rotation of the word or its inverse."""
    options = []
    for word in (crossings, inverse_word(surface, crossings)):
        for k in range(len(word)):
            options.append(word[k:] + word[:k])
    return min(options)


def _canonical_arc(surface: Surface, path: DualPath) -> Tuple:
    forward = (path.start, path.crossings, path.end)
    backward = (path.end, inverse_word(surface, path.crossings), path.start)
    return min(forward, backward)


def _leaf_arc_key(surface: Surface, path: DualPath) -> Optional[frozenset]:
    """The glued finite leaf an empty arc runs along, if it does."""
    if path.crossings:
        return None
    real = realize(surface.piece(path.start[0]))
    a, b = path.start[1], path.end[1]
    for leaf in (real.successor(a), real.predecessor(a)):
        if not leaf.startswith("l") or real.edge(leaf).kind is not EdgeKind.FINITE:
            continue
        if b in (real.successor(leaf), real.predecessor(leaf)):
            ref = (path.start[0], leaf)
            return frozenset((ref, surface.neighbor(ref)))
    return None


# ==============================================================================
# ENUMERATION
# ==============================================================================

def _leaf_edges(surface: Surface, piece_id: str) -> List[str]:
    return [lbl for lbl in realize(surface.piece(piece_id)).labels if lbl.startswith("l")]


def _walks(surface: Surface, start: str, length: int):
    """Reduced crossing sequences of the given length leaving start."""
    def extend(prefix: List[EdgeRef], here: str):
        if len(prefix) == length:
            yield tuple(prefix), here
            return
        for label in _leaf_edges(surface, here):
            ref = (here, label)
            if prefix and surface.neighbor(prefix[-1]) == ref:
                continue
            prefix.append(ref)
            yield from extend(prefix, surface.neighbor(ref)[0])
            prefix.pop()

    yield from extend([], start)


def _closed_words(surface: Surface, depth: int) -> List[Tuple[EdgeRef, ...]]:
    seen: Set[Tuple[EdgeRef, ...]] = set()
    words = []
    for length in range(1, depth + 1):
        for pid in surface.piece_ids:
            for word, end in _walks(surface, pid, length):
                if end != pid or surface.neighbor(word[-1]) == word[0]:
                    continue
                key = _canonical_word(surface, word)
                if key not in seen:
                    seen.add(key)
                    words.append(key)
    return words


def _a_edges(surface: Surface, piece_id: str) -> List[str]:
    return [lbl for lbl in realize(surface.piece(piece_id)).labels if lbl.startswith("a")]


def _arcs(surface: Surface, depth: int) -> List[DualPath]:
    seen: Set[Tuple] = set()
    leaves: Set[frozenset] = set()
    arcs = []
    for length in range(0, depth + 1):
        for pid in surface.piece_ids:
            starts = _a_edges(surface, pid)
            if not starts:
                continue
            for word, end in _walks(surface, pid, length):
                for a in starts:
                    for b in _a_edges(surface, end):
                        if not word and a == b:
                            continue
                        path = DualPath(word, (pid, a), (end, b))
                        key = _canonical_arc(surface, path)
                        if key in seen:
                            continue
                        seen.add(key)
                        leaf = _leaf_arc_key(surface, path)
                        if leaf is not None:
                            if leaf in leaves:
                                continue
                            leaves.add(leaf)
                        arcs.append(DualPath(key[1], key[0], key[2]))
    return arcs


def enumerate_candidates(surface: Surface, depth: int, curves_only: bool = False) -> List[Candidate]:
    """Boundary curves, closed words and arcs with at most depth crossings.

    Depth 0 gives only the boundary curves. Parabolic words and arcs whose
    boundary geodesics meet are dropped.
    """
    if depth < 0:
        raise ValueError("depth must be non-negative")
    out: List[Candidate] = []
    taken: Set[Tuple[EdgeRef, ...]] = set()
    for bc in boundary_curves(surface):
        key = _canonical_word(surface, bc.word.crossings)
        taken.add(key)
        out.append(Candidate("boundary", DualPath(key)))
    if depth == 0:
        return out
    leaf_words = {
        _canonical_word(surface, vc.word.crossings) for vc in vertex_classes(surface) if not vc.is_parabolic()
    }
    for word in _closed_words(surface, depth):
        if word in taken:
            continue
        candidate = Candidate("closed_leaf" if word in leaf_words else "curve", DualPath(word))
        try:
            curve_length(surface, candidate.path)
        except HypStretchError as e:
            if e.code is not ErrorCode.PARABOLIC_OR_TRIVIAL:
                raise
            continue
        taken.add(word)
        out.append(candidate)
    if curves_only or surface.topology.b == 0:
        return out
    for path in _arcs(surface, depth):
        kind = "leaf_arc" if _leaf_arc_key(surface, path) is not None else "arc"
        candidate = Candidate(kind, path)
        try:
            arc_length(surface, path)
        except HypStretchError as e:
            if e.code is not ErrorCode.GEODESICS_INTERSECT:
                raise
            continue
        out.append(candidate)
    logger.info(f"{len(out)} candidates up to depth {depth}")
    return out


# ==============================================================================
# DISTANCE ESTIMATE
# ==============================================================================

@dataclass
class DistanceEstimate:
    value: float
    witness: Optional[Candidate]
    depth: int
    rows: List[Dict] = field(default_factory=list)

    def table(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.rows, columns=["kind", "path", "length_x", "length_y", "log_ratio"])
        return frame.sort_values("log_ratio", ascending=False, kind="mergesort").reset_index(drop=True)


def arc_distance_estimate(x: Surface, y: Surface, depth: int, curves_only: bool = False) -> DistanceEstimate:
    """Largest log(length on y / length on x) over the candidates of x."""
    if not same_combinatorics(x, y):
        raise HypStretchError(ErrorCode.COMBINATORIAL_MISMATCH, "surfaces do not share pieces and gluings")
    best, witness = -math.inf, None
    rows = []
    for candidate in enumerate_candidates(x, depth, curves_only):
        try:
            lx, ly = candidate_length(x, candidate), candidate_length(y, candidate)
        except HypStretchError as e:
            logger.warning(f"Skipping {candidate.label}: {e.message}")
            continue
        ratio = math.log(ly / lx)
        rows.append({"kind": candidate.kind, "path": candidate.path.describe(), "length_x": lx, "length_y": ly, "log_ratio": ratio})
        better = ratio > best + WITNESS_SLACK
        tie_with_leaf = (
            abs(ratio - best) <= WITNESS_SLACK
            and candidate.kind in LEAF_KINDS
            and (witness is None or witness.kind not in LEAF_KINDS)
        )
        if better or tie_with_leaf:
            best, witness = max(best, ratio), candidate
    if witness is None:
        raise HypStretchError(ErrorCode.PARABOLIC_OR_TRIVIAL, f"no measurable candidate up to depth {depth}")
    logger.info(f"Distance estimate {best:.12g} witnessed by {witness.label}")
    return DistanceEstimate(best, witness, depth, rows)
