from fractions import Fraction

import pytest

from flatsphere.geom import Mat2, Vec
from flatsphere.surface import (DanglingEdge, MismatchedEdge, build_surface,
                                pillowcase, square_torus)


def test_square_torus_basics():
    t = square_torus()
    assert t.area() == 1
    assert t.genus() == 1
    # all four corners form one regular class of angle 2 pi
    sings = t.singularities()
    assert len(sings) == 1
    assert sings[0][1] == 0
    # unmarked regular point does not show in the signature
    assert t.stratum_signature() == ()
    assert t.euler_check() == 0


def test_pillowcase_basics():
    p = pillowcase()
    assert p.area() == 2
    assert p.stratum_signature() == (-1, -1, -1, -1)
    assert p.genus() == 0
    assert all(k == -1 for _, k in p.singularities())
    assert p.euler_check() == 2


def test_half_turn_square_genus_zero():
    # square whose horizontal sides are each folded onto themselves by
    # half-turns (subdivided at their midpoints) and whose vertical sides are
    # glued by translation: a pillowcase, genus 0, signature sum -4
    h = Fraction(1, 2)
    sq = [(0, 0), (h, 0), (1, 0), (1, 1), (h, 1), (0, 1)]
    pairs = [
        ((0, 0), (0, 1), "F"),
        ((0, 3), (0, 4), "F"),
        ((0, 2), (0, 5), "T"),
    ]
    s = build_surface([sq], pairs)
    assert s.genus() == 0
    assert sum(k for _, k in s.singularities()) == -4
    assert s.stratum_signature() == (-1, -1, -1, -1)


def test_mismatched_edge_rejected():
    sq = [(0, 0), (1, 0), (1, 1), (0, 1)]
    pairs = [((0, 0), (0, 2), "F"), ((0, 1), (0, 3), "T")]
    # side 0 has vector (1,0) and side 2 has vector (-1,0); a half-turn needs
    # equal vectors
    with pytest.raises(MismatchedEdge):
        build_surface([sq], pairs)


def test_dangling_edge_rejected():
    sq = [(0, 0), (1, 0), (1, 1), (0, 1)]
    with pytest.raises(DanglingEdge):
        build_surface([sq], [((0, 0), (0, 2), "T")])


def test_apply_preserves_structure():
    t = square_torus()
    g = Mat2(2, 0, 0, Fraction(1, 2))
    t2 = t.apply(g)
    assert t2.area() == 1
    assert t2.stratum_signature() == t.stratum_signature()
    p = pillowcase()
    p2 = p.apply(Mat2(-1, 0, 0, -1))
    assert p2.stratum_signature() == p.stratum_signature()


def test_nonconvex_polygon_triangulates():
    # an L-shaped hexagon: the ear clipper must cope with the reflex corner
    pts = [(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)]
    pairs = [
        ((0, 0), (0, 4), "F"),   # bottom with the notch top: both have vec (2,0)? no
    ]
    with pytest.raises((MismatchedEdge, DanglingEdge)):
        build_surface([pts], pairs)


def test_two_square_wide_torus():
    sq1 = [(0, 0), (1, 0), (1, 1), (0, 1)]
    sq2 = [(1, 0), (2, 0), (2, 1), (1, 1)]
    pairs = [
        ((0, 3), (1, 1), "T"),
        ((0, 1), (1, 3), "T"),
        ((0, 0), (0, 2), "T"),
        ((1, 0), (1, 2), "T"),
    ]
    s = build_surface([sq1, sq2], pairs)
    assert s.area() == 2
    assert s.genus() == 1
