# ==============================================================================
# WEIGHT FILES
# ==============================================================================
# One branch per line: "branch_id value". Blank lines and lines starting with
# '#' are skipped. Values are written with repr, which reads back exactly.
# ==============================================================================

from pathlib import Path
from typing import Dict, Mapping, Union

from hypstretch.utils.errors import ErrorCode, HypStretchError


def format_weights(weights: Mapping[str, float]) -> str:
    return "".join(f"{branch} {float(value)!r}\n" for branch, value in weights.items())


def parse_weights(text: str) -> Dict[str, float]:
    weights: Dict[str, float] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise HypStretchError(ErrorCode.BAD_FILE, f"line {lineno}: expected 'branch value'")
        try:
            weights[parts[0]] = float(parts[1])
        except ValueError as e:
            raise HypStretchError(ErrorCode.BAD_FILE, f"line {lineno}: {e}") from e
    return weights


def save_weights(weights: Mapping[str, float], path: Union[str, Path]):
    try:
        Path(path).write_text(format_weights(weights), encoding="utf-8")
    except OSError as e:
        raise HypStretchError(ErrorCode.BAD_FILE, f"cannot write {path}: {e}") from e


def load_weights(path: Union[str, Path]) -> Dict[str, float]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise HypStretchError(ErrorCode.BAD_FILE, f"cannot read {path}: {e}") from e
    return parse_weights(text)
