"""SVG pictures of laid-out surfaces."""

import pytest

from hypstretch.core.hyp_core import UhpPoint, ideal
from hypstretch.services.render import RenderOptions, geodesic_segment, layout, render_surface, save_render
from hypstretch.utils.errors import ErrorCode, HypStretchError


def test_quad_marks(torus):
    svg = render_surface(torus, RenderOptions(clip=50.0))
    assert svg.startswith("<svg")
    for name in ("O_Q", "P_AD", "P_BC"):
        assert f'id="Q-{name}"' in svg


def test_without_marks(torus):
    svg = render_surface(torus, RenderOptions(clip=50.0, marks=False))
    assert "O_Q" not in svg


def test_foliation_group(torus):
    assert 'id="foliation-Q"' in render_surface(torus, RenderOptions(foliation=True))


def test_output_is_deterministic(pants):
    assert render_surface(pants) == render_surface(pants)


def test_every_piece_is_placed(crown_pentagons):
    assert set(layout(crown_pentagons)) == set(crown_pentagons.piece_ids)


def test_geodesic_segment_is_clipped():
    pts = geodesic_segment(ideal(-1.0), ideal(1.0), clip=0.5)
    assert pts[:, 1].max() <= 0.5 + 1e-12
    assert len(geodesic_segment(UhpPoint(0.0, 1.0), UhpPoint(0.0, 2.0), clip=4.0)) > 1


def test_save_render(pants, tmp_path):
    path = tmp_path / "pants.svg"
    save_render(pants, path)
    assert path.read_text(encoding="utf-8") == render_surface(pants)


def test_save_render_bad_path(pants, tmp_path):
    with pytest.raises(HypStretchError) as info:
        save_render(pants, tmp_path / "missing" / "pants.svg")
    assert info.value.code is ErrorCode.BAD_FILE
