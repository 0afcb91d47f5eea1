"""Shared fixtures: the shipped example surfaces and a clean configuration."""

from pathlib import Path

import pytest

from hypstretch.data.surface_io import load_surface
from hypstretch.utils.config import reset_config

SURFACES = Path(__file__).resolve().parent.parent / "DATA" / "surfaces"


@pytest.fixture(autouse=True)
def clean_config(monkeypatch):
    for key in ("HYPSTRETCH_TOL", "HYPSTRETCH_LOG_LEVEL", "HYPSTRETCH_SAMPLES", "HYPSTRETCH_MAX_UNROLL", "HYPSTRETCH_SEED"):
        monkeypatch.delenv(key, raising=False)
    reset_config()
    yield
    reset_config()


@pytest.fixture
def surface_path():
    def _path(name: str) -> Path:
        return SURFACES / f"{name}.json"

    return _path


@pytest.fixture
def pants():
    return load_surface(SURFACES / "pants_hexagons.json")


@pytest.fixture
def torus():
    return load_surface(SURFACES / "torus_quad_triangle.json")


@pytest.fixture
def punctured_torus():
    return load_surface(SURFACES / "punctured_torus.json")


@pytest.fixture
def crown_pentagons():
    return load_surface(SURFACES / "crown_pentagons.json")


@pytest.fixture
def quad_pair():
    return load_surface(SURFACES / "quad_pair_crown.json")
