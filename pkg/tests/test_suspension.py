from fractions import Fraction

import pytest

from flatsphere.canon import canonical_form
from flatsphere.geom import Vec
from flatsphere.suspension import (SuspensionData, make_suitable,
                                   suspension_from_surface,
                                   validate_suspension, zr_construct,
                                   is_suitable, VerticalSaddleConnection)
from flatsphere.surface import pillowcase
from flatsphere.trace import first_return_system, Transversal, germs_at_class


def quad_torus_data():
    # sigma = (1 4)(2 3) in 1-indexed terms, l = 2
    return SuspensionData([3, 2, 1, 0], 2,
                          [(1, 1), (1, -1), (1, -1), (1, 1)])


def test_validate_ok():
    assert validate_suspension(quad_torus_data()) is None


def test_validate_condition2():
    d = SuspensionData([3, 2, 1, 0], 2,
                       [(1, 1), (-1, -1), (-1, -1), (1, 1)])
    assert validate_suspension(d) == "2"


def test_validate_condition4():
    d = SuspensionData([2, 3, 0, 1], 2,
                       [(1, 1), (1, -1), (1, 1), (1, -1)])
    assert validate_suspension(d) == "4"


def test_zr_quad_is_torus():
    d = quad_torus_data()
    s = zr_construct(d)
    assert s.genus() == 1
    assert s.area() == 2
    assert s.stratum_signature() == (0,)   # the marked regular corner class
    sings = s.singularities()
    assert len(sings) == 1 and sings[0][1] == 0


def test_zr_hexagon_surface():
    d = SuspensionData([1, 0, 3, 2, 5, 4], 3,
                       [(1, 1), (1, 1), (1, -3), (1, -3), (1, 1), (1, 1)])
    assert validate_suspension(d) is None
    s = zr_construct(d)
    assert sum(k for _, k in s.singularities()) == -4
    assert s.genus() == 0


def test_construction_segment_returns_sigma():
    d = quad_torus_data()
    s = zr_construct(d)
    # sigma_X on the construction segment equals sigma
    from flatsphere.zipper import _origin_transversal
    x, rs, corner = _origin_transversal(s, d, Fraction(2))
    assert rs.sigma == {1: 4, 2: 3, 3: 2, 4: 1}
    assert rs.l == 2 and rs.m == 2


def test_suspension_round_trip_quad():
    d = quad_torus_data()
    s = zr_construct(d)
    d2 = suspension_from_surface(s)
    s2 = zr_construct(d2)
    assert canonical_form(s2) == canonical_form(s)


def test_suspension_round_trip_hexagon():
    d = SuspensionData([1, 0, 3, 2, 5, 4], 3,
                       [(1, 1), (1, 1), (1, -3), (1, -3), (1, 1), (1, 1)])
    s = zr_construct(d)
    d2 = suspension_from_surface(s)
    s2 = zr_construct(d2)
    assert canonical_form(s2) == canonical_form(s)


def test_make_suitable_idempotent():
    d = quad_torus_data()
    assert is_suitable(d)
    assert make_suitable(d) is d


def test_pillowcase_suspension():
    # the pillowcase carries vertical saddle connections through every
    # candidate segment, or yields an honest suspension; both are acceptable
    p = pillowcase(1, 2)
    try:
        d = suspension_from_surface(p)
    except VerticalSaddleConnection:
        return
    s2 = zr_construct(d)
    assert canonical_form(s2) == canonical_form(p)
