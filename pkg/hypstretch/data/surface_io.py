# ==============================================================================
# SURFACE MODEL AND FILE FORMAT
# ==============================================================================
# A surface is a list of named pieces plus the gluing of their l-edges. Files
# are JSON:
#
#   {"topology": {"g": 0, "b": 3, "p": 0},
#    "pieces":   [{"id": "H1", "kind": "hexagon", "shears": [1, 1, 1]}, ...],
#    "gluings":  [{"from": ["H1", "l1"], "to": ["H2", "l1"], "shear": 0.3}, ...],
#    "metadata": {...}}
#
# The shear is present exactly on bi-infinite gluings. Floats are written with
# repr so that loading a saved file gives back the same numbers.
# ==============================================================================

import hashlib
import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Tuple, Union

from hypstretch.core.pieces import Piece, make_piece
from hypstretch.utils.errors import ErrorCode, HypStretchError

logger = logging.getLogger(__name__)

EdgeRef = Tuple[str, str]


@dataclass(frozen=True)
class Topology:
    g: int
    b: int
    p: int

    @property
    def expected_pieces(self) -> int:
        return 4 * self.g - 4 + 2 * self.p + 2 * self.b


@dataclass(frozen=True)
class Gluing:
    first: EdgeRef
    second: EdgeRef
    shear: Optional[float] = None

    def other(self, ref: EdgeRef) -> EdgeRef:
        if ref == self.first:
            return self.second
        if ref == self.second:
            return self.first
        raise KeyError(ref)


@dataclass(frozen=True)
class Surface:
    topology: Topology
    pieces: Tuple[Tuple[str, Piece], ...]
    gluings: Tuple[Gluing, ...]
    metadata: Tuple[Tuple[str, Any], ...] = field(default=(), compare=False)

    def piece(self, piece_id: str) -> Piece:
        for pid, piece in self.pieces:
            if pid == piece_id:
                return piece
        raise HypStretchError(ErrorCode.INVALID_SURFACE, f"unknown piece {piece_id!r}")

    @property
    def piece_ids(self) -> List[str]:
        return [pid for pid, _ in self.pieces]

    def gluing_at(self, ref: EdgeRef) -> Optional[Gluing]:
        for gl in self.gluings:
            if ref == gl.first or ref == gl.second:
                return gl
        return None

    def neighbor(self, ref: EdgeRef) -> EdgeRef:
        gl = self.gluing_at(ref)
        if gl is None:
            raise HypStretchError(ErrorCode.PATH_BROKEN, f"edge {ref} is not glued")
        return gl.other(ref)

    def iter_pieces(self) -> Iterator[Tuple[str, Piece]]:
        return iter(self.pieces)

    def with_pieces(self, pieces: Dict[str, Piece]) -> "Surface":
        return replace(self, pieces=tuple((pid, pieces.get(pid, p)) for pid, p in self.pieces))

    def with_shears(self, shears: Dict[int, float]) -> "Surface":
        gluings = tuple(
            replace(gl, shear=shears[i]) if i in shears else gl for i, gl in enumerate(self.gluings)
        )
        return replace(self, gluings=gluings)

    def with_metadata(self, **values: Any) -> "Surface":
        merged = dict(self.metadata)
        merged.update(values)
        return replace(self, metadata=tuple(sorted(merged.items())))

    def shear_table(self) -> Dict[str, float]:
        """Every real parameter of the surface keyed by a readable name."""
        table: Dict[str, float] = {}
        for pid, piece in self.pieces:
            for k, s in enumerate(piece.shears, start=1):
                table[f"{pid}.s{k}"] = s
        for gl in self.gluings:
            if gl.shear is not None:
                table[f"{gl.first[0]}.{gl.first[1]}~{gl.second[0]}.{gl.second[1]}"] = gl.shear
        return table


# ==============================================================================
# JSON
# ==============================================================================

def surface_from_dict(data: Dict[str, Any]) -> Surface:
    """Builds a surface from decoded JSON, raising BAD_FILE on a malformed document."""
    try:
        topo = data["topology"]
        topology = Topology(int(topo["g"]), int(topo["b"]), int(topo["p"]))
        pieces = []
        for entry in data["pieces"]:
            pieces.append((str(entry["id"]), make_piece(str(entry["kind"]), entry.get("shears", []))))
        gluings = []
        for entry in data["gluings"]:
            first = (str(entry["from"][0]), str(entry["from"][1]))
            second = (str(entry["to"][0]), str(entry["to"][1]))
            shear = entry.get("shear")
            gluings.append(Gluing(first, second, None if shear is None else float(shear)))
    except (KeyError, TypeError, ValueError, IndexError) as e:
        raise HypStretchError(ErrorCode.BAD_FILE, f"malformed surface document: {e}") from e
    metadata = tuple(sorted((data.get("metadata") or {}).items()))
    return Surface(topology, tuple(pieces), tuple(gluings), metadata)


def surface_to_dict(surface: Surface) -> Dict[str, Any]:
    data: Dict[str, Any] = {
        "topology": {"g": surface.topology.g, "b": surface.topology.b, "p": surface.topology.p},
        "pieces": [{"id": pid, "kind": p.kind, "shears": list(p.shears)} for pid, p in surface.pieces],
        "gluings": [],
    }
    for gl in surface.gluings:
        entry: Dict[str, Any] = {"from": list(gl.first), "to": list(gl.second)}
        if gl.shear is not None:
            entry["shear"] = gl.shear
        data["gluings"].append(entry)
    if surface.metadata:
        data["metadata"] = dict(surface.metadata)
    return data


def dumps_surface(surface: Surface) -> str:
    # json writes floats with repr, which round-trips exactly
    return json.dumps(surface_to_dict(surface), indent=2) + "\n"


def load_surface(path: Union[str, Path]) -> Surface:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise HypStretchError(ErrorCode.BAD_FILE, f"cannot read {path}: {e}", path=path) from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise HypStretchError(ErrorCode.BAD_FILE, f"{path} is not JSON: {e}", path=path) from e
    surface = surface_from_dict(data)
    logger.info(f"Loaded {path.name}: {len(surface.pieces)} pieces, {len(surface.gluings)} gluings")
    return surface


def save_surface(surface: Surface, path: Union[str, Path]):
    path = Path(path)
    try:
        path.write_text(dumps_surface(surface), encoding="utf-8")
    except OSError as e:
        raise HypStretchError(ErrorCode.BAD_FILE, f"cannot write {path}: {e}", path=path) from e


def file_sha256(path: Union[str, Path]) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
