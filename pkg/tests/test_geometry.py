"""
Tests for rib layout and frame generation.
"""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from finray_compliance.data.models import (
    FingerDesign,
    Fingertip,
    FrameElement,
    MemberRole,
    PlanarFrame,
)
from finray_compliance.errors import DegenerateRibLayoutError, GeometryError
from finray_compliance.geometry.frame import (
    build_frame,
    contact_point,
    count_ribs,
    fingertip_contact,
    rib_layout,
)

from .conftest import rectangle


class TestRibLayout:
    @pytest.mark.parametrize("density, ribs", [(0.1, 17), (0.2, 35), (0.3, 52)])
    def test_rib_count_at_zero_degrees(self, pla, density, ribs):
        design = FingerDesign(material=pla, infill_density=density, infill_direction=0.0)
        assert len(rib_layout(design)) == ribs
        assert count_ribs(build_frame(design)) == ribs

    def test_ribs_centred_in_usable_height(self, design):
        ribs = rib_layout(design)
        heights = [r.start[1] for r in ribs]
        # 17 ribs at 4 mm pitch leave 1 mm each side of 70 mm
        assert heights[0] == pytest.approx(13.0)
        assert heights[-1] == pytest.approx(77.0)
        assert all(r.start_on == "left" and r.end_on == "right" for r in ribs)

    def test_inclined_ribs_end_on_walls_or_base(self, pla):
        design = FingerDesign(material=pla, infill_direction=30.0)
        ribs = rib_layout(design)
        assert ribs
        assert {r.start_on for r in ribs} <= {"left", "tip"}
        assert {r.end_on for r in ribs} <= {"right", "base"}
        for rib in ribs:
            (t0, a0), (t1, a1) = rib.start, rib.end
            assert math.degrees(math.atan2(a0 - a1, t1 - t0)) == pytest.approx(30.0)

    @pytest.mark.parametrize("density", [0.1, 0.2, 0.3])
    def test_zero_degree_ribs_are_mirror_symmetric(self, pla, density):
        design = FingerDesign(material=pla, infill_density=density, infill_direction=0.0)
        for rib in rib_layout(design):
            (t0, a0), (t1, a1) = rib.start, rib.end
            assert t0 == pytest.approx(-t1)
            assert a0 == pytest.approx(a1)

    def test_pitch_beyond_height_is_degenerate(self, pla):
        design = FingerDesign(material=pla, infill_density=0.005)
        with pytest.raises(DegenerateRibLayoutError):
            rib_layout(design)


class TestBuildFrame:
    def test_supports_and_tip(self, design):
        frame = build_frame(design)
        assert frame.supports
        assert frame.tip_node not in frame.supports
        assert frame.mount_angle == design.mount_angle

    def test_tip_is_rotated_contact_point(self, design):
        frame = build_frame(design)
        t, a = contact_point(design)
        angle = math.radians(design.mount_angle)
        expected = (t * math.cos(angle) - a * math.sin(angle), t * math.sin(angle) + a * math.cos(angle))
        assert frame.nodes[frame.tip_node] == pytest.approx(expected)

    def test_notched_contact_point_is_recessed(self, pla):
        notched = FingerDesign(material=pla)
        flat = FingerDesign(material=pla, fingertip=Fingertip.FLAT)
        assert contact_point(notched)[0] == pytest.approx(contact_point(flat)[0] - 1.0)

    def test_no_element_below_minimum_length(self, pla):
        design = FingerDesign(material=pla, infill_direction=20.0, infill_density=0.3)
        frame = build_frame(design, elems_per_member=3, min_element_length=0.2)
        for element in frame.elements:
            (yi, zi), (yj, zj) = frame.nodes[element.node_i], frame.nodes[element.node_j]
            assert math.hypot(yj - yi, zj - zi) >= 0.2 - 1e-9

    def test_zero_degree_lattice_mirrors_about_the_axis(self, pla):
        design = FingerDesign(material=pla, infill_direction=0.0, mount_angle=0.0)
        frame = build_frame(design, elems_per_member=2)
        nodes = np.asarray(frame.nodes)
        segments = np.array([
            np.concatenate([nodes[e.node_i], nodes[e.node_j]])
            for e in frame.elements
            if e.role in (MemberRole.WALL, MemberRole.RIB)
        ])
        flip = np.array([-1.0, 1.0, -1.0, 1.0])
        for segment in segments * flip:
            forward = np.abs(segments - segment).max(axis=1)
            backward = np.abs(segments - np.roll(segment, 2)).max(axis=1)
            assert min(forward.min(), backward.min()) < 1e-9

    def test_rigid_links_tie_the_tip(self, design):
        frame = build_frame(design)
        rigid = [e for e in frame.elements if e.role == MemberRole.RIGID]
        assert len(rigid) == 2
        assert all(frame.tip_node in (e.node_i, e.node_j) for e in rigid)

    def test_elements_per_member(self, design):
        coarse = build_frame(design, elems_per_member=1)
        fine = build_frame(design, elems_per_member=2)
        assert len(fine.elements) > len(coarse.elements)
        assert coarse.joint_count == fine.joint_count

    def test_notch_wider_than_tip(self, pla):
        design = FingerDesign(material=pla, notch_width=25.0)
        with pytest.raises(GeometryError):
            build_frame(design)

    def test_invalid_member_count(self, design):
        with pytest.raises(GeometryError):
            build_frame(design, elems_per_member=0)


class TestFrameValidation:
    def test_tip_must_connect_to_supports(self, pla):
        section = rectangle(1.0, 10.0)
        with pytest.raises(ValidationError):
            PlanarFrame(
                nodes=[(0.0, 0.0), (0.0, 10.0), (5.0, 5.0)],
                elements=[FrameElement(node_i=0, node_j=1, section=section, material=pla)],
                supports=[0],
                tip_node=2,
            )

    def test_zero_length_element(self, pla):
        section = rectangle(1.0, 10.0)
        with pytest.raises(ValidationError):
            PlanarFrame(
                nodes=[(0.0, 0.0), (0.0, 0.0)],
                elements=[FrameElement(node_i=0, node_j=1, section=section, material=pla)],
                supports=[0],
                tip_node=1,
            )


class TestFingertipContact:
    def test_flat_angled_cancels_mount(self, pla):
        design = FingerDesign(material=pla, fingertip=Fingertip.FLAT_ANGLED, mount_angle=10.0)
        assert fingertip_contact(design).contact_plane_angle == pytest.approx(-10.0)

    def test_notched_width_from_notch(self, pla):
        design = FingerDesign(material=pla, notch_width=6.0)
        contact = fingertip_contact(design)
        assert contact.contact_half_width == pytest.approx(3.0)
        assert contact.friction_mu == pytest.approx(0.8)

    def test_rounded_is_narrower_than_flat(self, pla):
        rounded = fingertip_contact(FingerDesign(material=pla, fingertip=Fingertip.ROUNDED))
        flat = fingertip_contact(FingerDesign(material=pla, fingertip=Fingertip.FLAT))
        assert rounded.contact_half_width < flat.contact_half_width
