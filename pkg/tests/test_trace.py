from fractions import Fraction

import pytest

from flatsphere.geom import Vec
from flatsphere.surface import pillowcase, square_torus
from flatsphere.trace import (Transversal, enumerate_saddle_connections,
                              first_return_system, germs_at_class,
                              has_vertical_saddle_connection,
                              shortest_connections, trace_segment, UP)


def horizontal_corner(S, cid=None):
    """A corner germ containing the direction (1,0)."""
    classes = range(len(S.classes)) if cid is None else [cid]
    for c in classes:
        g = germs_at_class(S, c, Vec(1, 0))
        if g:
            return g[0][0]
    raise AssertionError("no horizontal germ found")


def test_torus_saddle_connections_at_one():
    t = square_torus()
    conns = enumerate_saddle_connections(t, 1)
    hols = sorted((c.holonomy.x, c.holonomy.y) for c in conns)
    assert hols == [(0, 1), (1, 0)]


def test_torus_saddle_connections_sqrt2():
    t = square_torus()
    conns = enumerate_saddle_connections(t, Fraction(15, 10))
    hols = sorted((c.holonomy.x, c.holonomy.y) for c in conns)
    assert hols == [(-1, 1), (0, 1), (1, 0), (1, 1)]
    # prefix stability
    short = enumerate_saddle_connections(t, 1)
    assert [c.holonomy for c in conns[:len(short)]] == \
        [c.holonomy for c in short]


def test_torus_vertical_connection_exists():
    assert has_vertical_saddle_connection(square_torus())


def test_pillowcase_short_pair():
    p = pillowcase(1, 2)
    conns = enumerate_saddle_connections(p, 1)
    assert len(conns) == 2
    for c in conns:
        assert c.holonomy == Vec(1, 0)
        assert c.start_class != c.end_class
    # the two are distinct geodesics with the same holonomy
    assert conns[0].endpoints() != conns[1].endpoints() or \
        conns[0].pieces != conns[1].pieces
    assert [c.length2 for c in shortest_connections(p)] == [1, 1]


def test_torus_full_circle_return_system():
    t = square_torus()
    corner = horizontal_corner(t)
    x = Transversal.from_corner(t, corner, 1)
    rs = first_return_system(t, x)
    assert rs.l == 1 and rs.m == 1
    assert rs.sigma == {1: 2, 2: 1}
    assert rs.heights[1] == 1 and rs.heights[2] == 1
    assert rs.flips[1] == 1


def test_sheared_torus_return_system():
    from flatsphere.geom import Mat2
    t = square_torus().apply(Mat2(1, Fraction(1, 3), 0, 1))
    corner = horizontal_corner(t)
    x = Transversal.from_corner(t, corner, 1)
    rs = first_return_system(t, x)
    assert sum(rs.lengths()[i] for i in range(1, rs.l + 1)) == 1
    for i, j in rs.sigma.items():
        assert rs.sigma[j] == i and i != j


def test_pillowcase_return_system_fixed_point_free():
    p = pillowcase(1, 2)
    # X along the bottom-left square side, full fold circle has singular left
    # end; use half of it
    corner = horizontal_corner(p)
    x = Transversal.from_corner(p, corner, Fraction(1, 2))
    rs = first_return_system(p, x)
    n = rs.l + rs.m
    for i in range(1, n + 1):
        assert rs.sigma[rs.sigma[i]] == i
        assert rs.sigma[i] != i


def test_trace_budget_ends_inside_face():
    t = square_torus()
    corner = horizontal_corner(t)
    tr = trace_segment(t, ("corner", corner), Vec(1, 2),
                       budget=Fraction(1, 5))
    assert tr.end_kind == "budget"
    total = sum((p1 - p0).norm2() for (_, p0, p1) in tr.pieces)
    # budget is a parameter multiple of d: |d|^2 * (1/5)^2 when one piece
    assert tr.params[-1] == Fraction(1, 5)


def test_vertical_travel_on_pillowcase():
    p = pillowcase(1, 2)
    # vertical germ from a bottom pole travels up the cylinder to a top pole
    for cid in range(len(p.classes)):
        for c, kind in germs_at_class(p, cid, UP):
            tr = trace_segment(p, ("corner", c), UP)
            assert tr.end_kind in ("vertex", "periodic")
            if tr.end_kind == "vertex":
                assert tr.vertical_travel() == 2
