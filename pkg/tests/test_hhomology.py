from fractions import Fraction

import pytest

from flatsphere.hhomology import (AlreadyTranslationSurface, DoubleCover,
                                  component_graph, configuration_of,
                                  double_cover, homology_engine,
                                  is_hhom_algebraic, is_hhom_geometric,
                                  maximal_collection, qn_membership)
from flatsphere.surface import pillowcase, square_torus
from flatsphere.trace import enumerate_saddle_connections, shortest_connections


def fig1_pillowcase():
    return pillowcase(1, 2)


def test_double_cover_of_pillowcase_is_torus():
    p = fig1_pillowcase()
    d = double_cover(p)
    assert d.hat.area() == 2 * p.area()
    assert all(s == 1 for h, s in enumerate(d.hat.sign)
               if d.hat.opp[h] is not None)
    # four poles (odd order) each have a single preimage of angle 2 pi
    assert d.hat.genus() == 1
    sings = d.hat.singularities()
    assert len(sings) == 4
    assert all(k == 0 for _, k in sings)


def test_double_cover_rejects_translation_surface():
    with pytest.raises(AlreadyTranslationSurface):
        double_cover(square_torus())


def test_tau_involution():
    p = fig1_pillowcase()
    d = double_cover(p)
    for hh in range(len(d.hat.vecs)):
        assert d.tau_halfedge(d.tau_halfedge(hh)) == hh


def test_branching_rule():
    p = fig1_pillowcase()
    d = double_cover(p)
    # every pole is a branch point
    assert len(d.branch_classes()) == 4


def test_pillowcase_pair_hhomologous_both_ways():
    p = fig1_pillowcase()
    g1, g2 = shortest_connections(p)
    assert g1.length2 == g2.length2 == 1
    assert is_hhom_algebraic(p, g1, g2)
    assert is_hhom_geometric(p, g1, g2)


def test_hhom_reflexive_and_antiinvariant():
    p = fig1_pillowcase()
    g1, g2 = shortest_connections(p)
    eng = homology_engine(p)
    assert is_hhom_algebraic(p, g1, g1)
    assert eng.anti_invariant(eng.hat_class(g1))
    assert eng.anti_invariant(eng.hat_class(g2))


def test_non_parallel_not_hhomologous():
    p = fig1_pillowcase()
    conns = enumerate_saddle_connections(p, 2)
    horiz = [c for c in conns if c.holonomy.y == 0]
    vert = [c for c in conns if c.holonomy.x == 0]
    assert horiz and vert
    assert not is_hhom_algebraic(p, horiz[0], vert[0])
    assert not is_hhom_geometric(p, horiz[0], vert[0])


def test_maximal_collection_pillowcase():
    p = fig1_pillowcase()
    g1, g2 = shortest_connections(p)
    coll = maximal_collection(p, g1)
    assert len(coll) == 2


def test_component_graph_pillowcase():
    # removing the two folds leaves exactly the open cylinder; each fold
    # borders it on both sides, so the graph is one o-vertex with two loops
    p = fig1_pillowcase()
    coll = maximal_collection(p, shortest_connections(p)[0])
    g = component_graph(p, coll)
    assert g.labels == ["o"]
    assert len(g.edges) == 2
    assert all(e[0] == e[1] for e in g.edges)


def test_configuration_pillowcase():
    p = fig1_pillowcase()
    coll = maximal_collection(p, shortest_connections(p)[0])
    cfg = configuration_of(p, coll)
    assert cfg.graph.labels == ["o"]
    # two boundary circles, each made of the two sides of one fold, with
    # boundary angles pi at the poles
    assert len(cfg.boundaries[0]) == 2
    for circle in cfg.boundaries[0]:
        assert len(circle) == 2
        assert all(ang == 1 for _, ang in circle)
    assert cfg.interior_orders == [[]]
    assert cfg.lengths2[0] == cfg.lengths2[1]


def test_qn_membership():
    p = fig1_pillowcase()   # shortest pair length 1, next shortest length 2
    res = qn_membership(p, 1)
    assert res.in_qn
    assert len(res.collection) == 2
    res2 = qn_membership(p, Fraction(3))
    assert not res2.in_qn
    assert res2.witness is not None


def test_square_pillowcase_on_diagonal():
    p = pillowcase(1, 1)
    res = qn_membership(p, 1)
    assert not res.in_qn
