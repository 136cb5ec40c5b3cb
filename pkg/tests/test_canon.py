from fractions import Fraction

from flatsphere.geom import Mat2, Vec
from flatsphere.canon import canonical_form, delaunay, isometric
from flatsphere.refine import refine_surface, remove_flat_vertices
from flatsphere.surface import build_surface, pillowcase, square_torus


def test_canonical_form_relabelled_polygons():
    sq = [(0, 0), (1, 0), (1, 1), (0, 1)]
    t1 = build_surface([sq], [((0, 0), (0, 2), "T"), ((0, 1), (0, 3), "T")])
    # same torus from a shifted, rotated description of the fundamental domain
    sq2 = [(5, 7), (6, 7), (6, 8), (5, 8)]
    t2 = build_surface([sq2], [((0, 1), (0, 3), "T"), ((0, 2), (0, 0), "T")])
    assert canonical_form(t1) == canonical_form(t2)


def test_canonical_form_half_turn_invariance():
    p = pillowcase(1, 2)
    p2 = p.apply(Mat2(-1, 0, 0, -1))
    assert canonical_form(p) == canonical_form(p2)
    t = square_torus()
    assert canonical_form(t) == canonical_form(t.apply(Mat2(-1, 0, 0, -1)))


def test_different_tori_differ():
    t1 = square_torus()
    t2 = t1.apply(Mat2(2, 0, 0, Fraction(1, 2)))
    assert canonical_form(t1) != canonical_form(t2)


def test_pillowcases_by_size():
    assert isometric(pillowcase(1, 2), pillowcase(1, 2))
    assert not isometric(pillowcase(1, 2), pillowcase(1, 3))
    # a pillowcase rotated by a quarter turn is generally not isometric as a
    # half-translation surface (vertical direction matters)
    assert not isometric(pillowcase(1, 2), pillowcase(2, 1))


def test_refine_then_canonical_form_stable():
    p = pillowcase(1, 2)
    # add an artificial vertex in the middle of a face; the canonical form
    # must not notice once the flat vertex is scrubbed
    f = 0
    target = p.corner_positions(f)
    centroid = (target[0] + target[1] + target[2]) / 3
    p2, info = refine_surface(p, face_points={f: [(centroid, "pt")]})
    assert len(p2.classes) == len(p.classes) + 1
    assert canonical_form(p2) == canonical_form(p)


def test_remove_flat_vertices_keeps_marked():
    p = pillowcase(1, 2)
    f = 0
    target = p.corner_positions(f)
    centroid = (target[0] + target[1] + target[2]) / 3
    p2, info = refine_surface(p, face_points={f: [(centroid, "pt")]})
    p3 = p2.with_marks({info["tag_class"]["pt"]})
    p4 = remove_flat_vertices(p3)
    assert len(p4.classes) == len(p.classes) + 1
    assert canonical_form(p3) != canonical_form(p)


def test_delaunay_preserves_surface_data():
    p = pillowcase(2, 3)
    d = delaunay(p)
    assert d.area() == p.area()
    assert d.stratum_signature() == p.stratum_signature()
