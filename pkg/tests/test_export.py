"""
Tests for SVG and STL export.
"""

import re

import numpy as np
import pytest

from finray_compliance.data.models import Axis, Envelope, Fingertip, FingerDesign
from finray_compliance.errors import GeometryError
from finray_compliance.geometry.export import (
    STL_RECORD,
    body_outlines,
    export_stl,
    export_svg,
    export_trajectory_svg,
    extrude_polygon,
    stl_bytes,
    stl_triangle_count,
)
from finray_compliance.geometry.frame import build_frame
from finray_compliance.insertion.simulate import simulate_insert


def signed_volume(triangles: np.ndarray) -> float:
    v0, v1, v2 = triangles[:, 0], triangles[:, 1], triangles[:, 2]
    return float(np.einsum("ij,ij->i", v0, np.cross(v1 - v0, v2 - v0)).sum() / 6.0)


class TestFrameSvg:
    def test_one_polyline_per_element(self, design):
        frame = build_frame(design)
        svg = export_svg(frame)
        assert svg.startswith('<?xml version="1.0"')
        assert svg.count("<polyline") == len(frame.elements)
        members = {int(m) for m in re.findall(r'data-member="(\d+)"', svg)}
        assert members == {e.member for e in frame.elements}

    def test_roles_are_classes(self, design):
        svg = export_svg(build_frame(design))
        for role in ("wall", "rib", "tip", "rigid"):
            assert f'class="{role}"' in svg

    def test_deformed_overlay(self, design):
        frame = build_frame(design)
        deflection = [(0.5, 0.0)] * frame.node_count
        svg = export_svg(frame, deflection=deflection, scale=2.0)
        assert svg.count("<polyline") == 2 * len(frame.elements)
        assert 'id="deformed"' in svg

    def test_deflection_size_mismatch(self, design):
        frame = build_frame(design)
        with pytest.raises(GeometryError):
            export_svg(frame, deflection=[(0.0, 0.0)])


class TestExtrusion:
    def test_square_prism(self):
        triangles = extrude_polygon([(0, 0), (1, 0), (1, 1), (0, 1)], 2.0)
        assert triangles.shape == (12, 3, 3)
        assert signed_volume(triangles) == pytest.approx(2.0)

    def test_clockwise_outline_is_reoriented(self):
        triangles = extrude_polygon([(0, 0), (0, 1), (1, 1), (1, 0)], 2.0)
        assert signed_volume(triangles) == pytest.approx(2.0)

    @pytest.mark.parametrize(
        "outline, depth",
        [
            ([(0, 0), (1, 0)], 1.0),
            ([(0, 0), (1, 0), (2, 0)], 1.0),
            ([(0, 0), (1, 0), (1, 1)], 0.0),
        ],
    )
    def test_degenerate_input(self, outline, depth):
        with pytest.raises(GeometryError):
            extrude_polygon(outline, depth)


class TestStl:
    def test_binary_layout(self, design):
        payload = export_stl(design)
        count = stl_triangle_count(payload)
        assert payload.startswith(b"finray_compliance")
        assert len(payload) == 84 + 50 * count
        assert count == 12 * len(body_outlines(design))

    def test_extruded_to_envelope_depth(self, pla):
        design = FingerDesign(material=pla, envelope=Envelope(depth=12.0))
        payload = export_stl(design)
        records = np.frombuffer(payload[84:], dtype=STL_RECORD)
        heights = np.unique(records["vertices"][:, :, 2])
        assert heights.tolist() == [0.0, 12.0]

    def test_every_shell_is_closed_and_outward(self, design):
        payload = export_stl(design)
        records = np.frombuffer(payload[84:], dtype=STL_RECORD)
        shells = records["vertices"].astype(float).reshape(-1, 12, 3, 3)
        assert len(shells) == len(body_outlines(design))
        assert all(signed_volume(shell) > 0.0 for shell in shells)

    def test_mirror_keeps_mesh_size(self, design):
        assert stl_triangle_count(export_stl(design, mirror=True)) == stl_triangle_count(
            export_stl(design)
        )

    def test_notch_splits_the_cap(self, pla):
        notched = body_outlines(FingerDesign(material=pla, notch_width=2.0))
        flat = body_outlines(FingerDesign(material=pla, fingertip=Fingertip.FLAT))
        assert len(notched) == len(flat) + 2

    def test_short_payload(self):
        with pytest.raises(GeometryError):
            stl_triangle_count(b"\0" * 40)

    def test_empty_mesh(self):
        with pytest.raises(GeometryError):
            stl_bytes(np.zeros((0, 3, 3)))


class TestTrajectorySvg:
    def test_phases_drawn(self, scenario):
        trace = simulate_insert(scenario(misalignment=(0.0, 20.0)), axis=Axis.Y)
        svg = export_trajectory_svg(trace)
        assert 'class="command"' in svg
        for phase in ("approach", "slide_y", "insert_z"):
            assert f'class="{phase}"' in svg
        # a plug that never touches the socket has no contact markers
        assert 'class="contact"' not in svg
