"""Hat-homology: the orientation double cover and both criteria.

Two saddle connections are hat-homologous when their lifted cycles on the
orientation double cover agree up to sign in relative homology.  The cover is
built combinatorially (two sheets, sheet swaps across half-turn gluings); the
relative H_1 is the cokernel of the face-boundary map over the integers, since
every vertex of the cover is in the relative set, and membership in the image
is decided through an exact integer column reduction.

The geometric criterion (no interior crossing plus a complementary piece of
trivial holonomy) is computed on a cut complex; the same machinery yields the
component graph and the configuration data of a maximal collection.
"""

from __future__ import annotations

from fractions import Fraction

from .geom import Vec, cross, dot, seg_intersect_open
from .surface import FlatSurface, SurfaceError
from .trace import (SaddleConnection, enumerate_saddle_connections,
                    shortest_connections, vertex_at, on_edge_param,
                    _sqrt_upper)
from .refine import refine_surface, RefineError


class AlreadyTranslationSurface(SurfaceError):
    pass


class NotMaximal(SurfaceError):
    pass


def has_trivial_holonomy(S) -> bool:
    """Can per-face signs be chosen so every transition is a translation?"""
    color = {}
    for f0 in range(S.nfaces):
        if f0 in color:
            continue
        color[f0] = 1
        stack = [f0]
        while stack:
            f = stack.pop()
            for r in range(3):
                h = 3 * f + r
                h2 = S.opp[h]
                if h2 is None:
                    continue
                f2 = h2 // 3
                want = color[f] * S.sign[h]
                if f2 not in color:
                    color[f2] = want
                    stack.append(f2)
                elif color[f2] != want:
                    return False
    return True


class DoubleCover:
    """The orientation double cover with its deck involution.

    Faces of the cover: (f, sheet) -> 2 f + (0 if sheet == +1 else 1).
    Crossing an edge with a half-turn gluing swaps sheets; all gluings of the
    cover are translations.  Sheet -1 carries the negated chart.
    """

    def __init__(self, S: FlatSurface):
        if not any(s == -1 for h, s in enumerate(S.sign)
                   if S.opp[h] is not None):
            raise AlreadyTranslationSurface(
                "surface already has trivial holonomy")
        if has_trivial_holonomy(S):
            raise AlreadyTranslationSurface(
                "surface already has trivial holonomy")
        self.base = S
        n = len(S.vecs)
        vecs = [None] * (2 * n)
        opp = [None] * (2 * n)
        sign = [1] * (2 * n)
        for h in range(n):
            for sheet in (0, 1):
                hh = self.lift(h, 1 if sheet == 0 else -1)
                vecs[hh] = S.vecs[h] if sheet == 0 else -S.vecs[h]
        for h in range(n):
            h2 = S.opp[h]
            if h2 is None:
                continue
            for sheet in (1, -1):
                a = self.lift(h, sheet)
                b = self.lift(h2, sheet * S.sign[h])
                opp[a] = b
                opp[b] = a
        marked_corners = []
        for cid in S.marked:
            c = S.classes[cid][0]
            marked_corners.append(self.lift(c, 1))
            marked_corners.append(self.lift(c, -1))
        self.hat = FlatSurface(vecs, opp, sign, marked_corners)

    @staticmethod
    def lift(h, sheet):
        f, r = h // 3, h % 3
        return 3 * (2 * f + (0 if sheet == 1 else 1)) + r

    @staticmethod
    def project(hh):
        ff, r = hh // 3, hh % 3
        return 3 * (ff // 2) + r, 1 if ff % 2 == 0 else -1

    def tau_halfedge(self, hh):
        h, sheet = self.project(hh)
        return self.lift(h, -sheet)

    def branch_classes(self):
        """Base classes of odd order (one preimage, doubled angle)."""
        return [cid for cid, k in self.base.singularities() if k % 2 == 1]


def double_cover(S) -> DoubleCover:
    return DoubleCover(S)


# ---------------------------------------------------------------------------
# Integer chains


class ChainSpace:
    """Relative 1-chains of the cover modulo face boundaries."""

    def __init__(self, hat: FlatSurface):
        self.hat = hat
        self.edge_rep = {}
        for h in range(len(hat.vecs)):
            h2 = hat.opp[h]
            self.edge_rep[h] = h if h2 is None else min(h, h2)
        self.edges = sorted(set(self.edge_rep.values()))
        self.edge_index = {e: i for i, e in enumerate(self.edges)}
        cols = []
        for f in range(hat.nfaces):
            col = [0] * len(self.edges)
            for r in range(3):
                h = 3 * f + r
                e = self.edge_rep[h]
                col[self.edge_index[e]] += 1 if e == h else -1
            cols.append(col)
        self._pivots = _column_reduce(cols)

    def halfedge_coeff(self, h):
        """(edge index, +-1) for the directed half-edge h."""
        e = self.edge_rep[h]
        return self.edge_index[e], (1 if e == h else -1)

    def in_boundary_image(self, x):
        return _reduce_membership(self._pivots, list(x))

    def zero(self):
        return [0] * len(self.edges)


def _column_reduce(cols):
    """Integer column echelon pivots of the span of ``cols``.

    Returns a list of (pivot_row, column) with columns reduced so pivot rows
    are strictly decreasingly... (order irrelevant; membership testing uses
    repeated euclidean reduction per pivot row).
    """
    pivots = []
    work = [list(c) for c in cols if any(c)]
    row_of = {}
    for col in work:
        col = _reduce_by_pivots(pivots, col)
        if col is None:
            continue
        pivots.append(col)
    return pivots


def _leading(col):
    for i, v in enumerate(col):
        if v != 0:
            return i
    return None


def _reduce_by_pivots(pivots, col):
    """Reduce col against pivot columns (gcd-style); None if it vanishes."""
    changed = True
    while changed:
        changed = False
        lead = _leading(col)
        if lead is None:
            return None
        for p in pivots:
            pl = _leading(p)
            if pl != lead:
                continue
            a, b = p[lead], col[lead]
            if b % a == 0:
                q = b // a
                for i in range(len(col)):
                    col[i] -= q * p[i]
            else:
                # gcd step: replace pivot by the gcd combination
                import math
                g, u, v = _xgcd(a, b)
                newp = [u * p[i] + v * col[i] for i in range(len(col))]
                q1, q2 = a // g, b // g
                newc = [q1 * col[i] - q2 * p[i] for i in range(len(col))]
                p[:] = newp
                col = newc
            changed = True
            break
    return col


def _xgcd(a, b):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t


def _reduce_membership(pivots, col):
    while True:
        lead = _leading(col)
        if lead is None:
            return True
        hit = False
        for p in pivots:
            if _leading(p) == lead:
                hit = True
                if col[lead] % p[lead] != 0:
                    return False
                q = col[lead] // p[lead]
                for i in range(len(col)):
                    col[i] -= q * p[i]
                break
        if not hit:
            return False


# ---------------------------------------------------------------------------
# Lifting saddle connections


class HatClass:
    """Anti-invariant relative cycle of a saddle connection on the cover."""

    __slots__ = ("chain", "degenerate")

    def __init__(self, chain, degenerate):
        self.chain = chain             # list[int] over the edge basis
        self.degenerate = degenerate   # True when [gamma1] == -[gamma2]


class HomologyEngine:
    """Cover + chain space + per-connection hat classes, cached per surface."""

    def __init__(self, S):
        self.S = S
        self.cover = DoubleCover(S)
        self.chains = ChainSpace(self.cover.hat)
        self._hat_cache = {}

    def hat_class(self, conn: SaddleConnection) -> HatClass:
        key = _connection_key(conn)
        if key not in self._hat_cache:
            self._hat_cache[key] = self._compute_hat_class(conn)
        return self._hat_cache[key]

    # -- edge-path representative on the base ------------------------------

    def _edge_path(self, conn):
        """Directed half-edges of a path homotopic to conn (rel endpoints)
        inside its unfolding strip, plus the sheet transports between them."""
        S = self.S
        faces = [f for (f, p0, p1) in conn.pieces]
        k = len(faces)
        # abstract disk: node ids (i, corner) with gluings through the
        # crossed edges between consecutive pieces
        crossed = []      # (i, h_i) the half-edge crossed leaving piece i
        for i in range(k - 1):
            f, p0, p1 = conn.pieces[i]
            for r in range(3):
                lam = on_edge_param(S, f, p1, r)
                if lam is not None and 0 < lam < 1:
                    crossed.append(3 * f + r)
                    break
            else:
                raise SurfaceError("crossing point not on an edge")
        # union-find on abstract corners (i, slot); corners identify across
        # each crossed edge: start(h) with end(opp h), end(h) with start(opp h)
        parent = {}

        def find(x):
            parent.setdefault(x, x)
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(x, y):
            parent[find(x)] = find(y)

        for i, h in enumerate(crossed):
            h2 = S.opp[h]
            union((i, h % 3), (i + 1, S.nxt(h2) % 3))
            union((i, S.nxt(h) % 3), (i + 1, h2 % 3))

        c_start = vertex_at(S, conn.pieces[0][0], conn.pieces[0][1])
        c_end = vertex_at(S, conn.pieces[-1][0], conn.pieces[-1][2])
        if c_start is None or c_end is None:
            raise SurfaceError("connection does not join vertices")
        start_node = find((0, c_start % 3))
        end_node = find((k - 1, c_end % 3))

        # graph over abstract nodes through uncrossed edges
        crossed_set = set()
        for i, h in enumerate(crossed):
            crossed_set.add((i, h % 3))
            crossed_set.add((i + 1, S.opp[h] % 3))
        adj = {}
        for i in range(k):
            f = faces[i]
            for r in range(3):
                if (i, r) in crossed_set:
                    continue
                h = 3 * f + r
                a = find((i, r))
                b = find((i, (r + 1) % 3))
                adj.setdefault(a, []).append((b, (i, h, 1)))
                adj.setdefault(b, []).append((a, (i, h, -1)))
        # BFS path start -> end
        prev = {start_node: None}
        queue = [start_node]
        while queue:
            cur = queue.pop(0)
            if cur == end_node:
                break
            for (nxt, lab) in adj.get(cur, ()):
                if nxt not in prev:
                    prev[nxt] = (cur, lab)
                    queue.append(nxt)
        if end_node not in prev:
            raise SurfaceError("no edge path through the strip")
        path = []
        cur = end_node
        while prev[cur] is not None:
            cur, lab = prev[cur]
            path.append(lab)
        path.reverse()
        return path, crossed, find

    def _compute_hat_class(self, conn):
        S = self.S
        path, crossed, find = self._edge_path(conn)
        # the strip is simply connected, so its lift to the cover is a pair
        # of disjoint disks; the sheet of each face occurrence propagates
        # through the crossed gluings
        sheets = [1]
        for h in crossed:
            sheets.append(sheets[-1] * S.sign[h])
        chain1 = self.chains.zero()
        for (i, h, direction) in path:
            eidx, orient = self.chains.halfedge_coeff(
                DoubleCover.lift(h, sheets[i]))
            chain1[eidx] += orient * direction
        chain2 = self._tau_chain(chain1)
        ssum = [a + b for a, b in zip(chain1, chain2)]
        if self.chains.in_boundary_image(ssum):
            return HatClass(chain1, True)
        return HatClass([a - b for a, b in zip(chain1, chain2)], False)

    def _tau_chain(self, chain):
        out = self.chains.zero()
        for idx, v in enumerate(chain):
            if v == 0:
                continue
            e = self.chains.edges[idx]
            te = self.cover.tau_halfedge(e)
            eidx, orient = self.chains.halfedge_coeff(te)
            out[eidx] += orient * v
        return out

    def anti_invariant(self, hc: HatClass) -> bool:
        t = self._tau_chain(hc.chain)
        return self.chains.in_boundary_image(
            [x + y for x, y in zip(hc.chain, t)])

    def equal_up_to_sign(self, h1: HatClass, h2: HatClass) -> bool:
        diff = [a - b for a, b in zip(h1.chain, h2.chain)]
        if self.chains.in_boundary_image(diff):
            return True
        ssum = [a + b for a, b in zip(h1.chain, h2.chain)]
        return self.chains.in_boundary_image(ssum)


_engines = {}


def homology_engine(S) -> HomologyEngine:
    key = id(S)
    if key not in _engines:
        _engines[key] = HomologyEngine(S)
    return _engines[key]


def hat_class(D, conn):
    if isinstance(D, HomologyEngine):
        return D.hat_class(conn)
    eng = homology_engine(D.base if isinstance(D, DoubleCover) else D)
    return eng.hat_class(conn)


def is_hhom_algebraic(S, c1: SaddleConnection, c2: SaddleConnection) -> bool:
    eng = homology_engine(S)
    if c1 is c2:
        return True
    return eng.equal_up_to_sign(eng.hat_class(c1), eng.hat_class(c2))


# ---------------------------------------------------------------------------
# Geometric criterion


def connections_cross(S, c1, c2) -> bool:
    """Do two connections share an interior point (transversal crossing)?"""
    if c1 is c2:
        return False
    for (f1, a1, b1) in c1.pieces:
        for (f2, a2, b2) in c2.pieces:
            if f1 != f2:
                continue
            if seg_intersect_open(a1, b1, a2, b2):
                return True
    return False


def cut_complex(S, conns):
    """Cut S along the given pairwise non-crossing connections.

    Returns (cut surface with boundary, side_tags) where side_tags maps each
    boundary half-edge of the cut surface to (connection index, side 0/1).
    """
    face_chords = {}
    piece_dir = {}
    for ci, c in enumerate(conns):
        for pi, (f, p0, p1) in enumerate(c.pieces):
            face_chords.setdefault(f, []).append(((p0, p1), ("conn", ci, pi)))
            piece_dir[(ci, pi)] = p1 - p0
    S2, info = refine_surface(S, face_chords=face_chords)
    info["class_corner"] = {cid: S2.classes[cid][0]
                            for cid in range(len(S2.classes))}
    side_tags = {}
    vecs = list(S2.vecs)
    opp = list(S2.opp)
    sign = list(S2.sign)
    for tag, hes in info["chord_halfedges"].items():
        _, ci, pi = tag
        d = piece_dir[(ci, pi)]
        for h in hes:
            h2 = opp[h]
            if h2 is None:
                continue
            opp[h] = None
            opp[h2] = None
            # side 0: the face lying left of the connection's direction,
            # i.e. the half-edge running along the connection
            if dot(vecs[h], d) > 0:
                side_tags[h] = (ci, 0)
                side_tags[h2] = (ci, 1)
            else:
                side_tags[h] = (ci, 1)
                side_tags[h2] = (ci, 0)
    marked_corners = [S2.classes[c][0] for c in S2.marked]
    cut = FlatSurface(vecs, opp, sign, marked_corners)
    return cut, side_tags, info


def _face_components(S):
    comp = {}
    for f0 in range(S.nfaces):
        if f0 in comp:
            continue
        comp[f0] = f0
        stack = [f0]
        while stack:
            f = stack.pop()
            for r in range(3):
                h2 = S.opp[3 * f + r]
                if h2 is None:
                    continue
                f2 = h2 // 3
                if f2 not in comp:
                    comp[f2] = f0
                    stack.append(f2)
    groups = {}
    for f, root in comp.items():
        groups.setdefault(root, set()).add(f)
    return list(groups.values())


def is_hhom_geometric(S, c1, c2) -> bool:
    """No interior intersection and a complementary piece with trivial
    holonomy (the geometric characterization of hat-homologous)."""
    if c1 is c2:
        return True
    if connections_cross(S, c1, c2):
        return False
    cut, side_tags, info = cut_complex(S, [c1, c2])
    for faces in _face_components(cut):
        if not _component_trivial_holonomy(cut, faces):
            continue
        # both connections must appear on the trivial component's boundary
        # (they always do when the pair is hat-homologous)
        touched = {side_tags[3 * f + r][0]
                   for f in faces for r in range(3)
                   if cut.opp[3 * f + r] is None
                   and (3 * f + r) in side_tags}
        if touched == {0, 1}:
            return True
    return False


def _component_trivial_holonomy(S, faces):
    color = {}
    f0 = next(iter(faces))
    color[f0] = 1
    stack = [f0]
    while stack:
        f = stack.pop()
        for r in range(3):
            h = 3 * f + r
            h2 = S.opp[h]
            if h2 is None:
                continue
            f2 = h2 // 3
            want = color[f] * S.sign[h]
            if f2 not in color:
                color[f2] = want
                stack.append(f2)
            elif color[f2] != want:
                return False
    return True


# ---------------------------------------------------------------------------
# Collections, Q^N membership


def is_hhomologous(S, c1, c2) -> bool:
    """The working notion: the algebraic criterion on the double cover."""
    return is_hhom_algebraic(S, c1, c2)


def maximal_collection(S, conn, bound_factor=Fraction(2)):
    """All saddle connections hat-homologous to conn.

    Hat-homologous connections are parallel with length ratios in
    {1/2, 1, 2}, so searching up to twice the seed's length is exhaustive.
    """
    radius = _sqrt_upper(conn.length2) * bound_factor
    conns = enumerate_saddle_connections(S, radius)
    seed = None
    for c in conns:
        if (c.holonomy == conn.holonomy and c.edges == conn.edges
                and c.endpoints() == conn.endpoints()):
            seed = c
            break
    if seed is None:
        raise SurfaceError("seed connection not found in enumeration")
    out = [c for c in conns if is_hhomologous(S, seed, c)]
    return out


class QNResult:
    __slots__ = ("in_qn", "collection", "witness")

    def __init__(self, in_qn, collection=None, witness=None):
        self.in_qn = in_qn
        self.collection = collection
        self.witness = witness

    def __bool__(self):
        return self.in_qn


def qn_membership(S, N=1) -> QNResult:
    """Is S in Q^N: every connection not hat-homologous to the shortest one
    is longer than N times the shortest.

    Returns the maximal collection of the shortest connection on success,
    else the witness pair (shortest, offender); for N = 1 a witness means the
    surface sits on the diagonal.
    """
    N = Fraction(N)
    shorts = shortest_connections(S)
    gamma1 = shorts[0]
    lmin2 = gamma1.length2
    for other in shorts[1:]:
        if not is_hhomologous(S, gamma1, other):
            return QNResult(False, witness=(gamma1, other))
    radius = _sqrt_upper(lmin2 * N * N)
    conns = enumerate_saddle_connections(S, radius)
    coll = [c for c in conns if c.length2 <= 4 * lmin2
            and is_hhomologous(S, gamma1, c)]
    for c in conns:
        if c.length2 * 1 <= lmin2 * N * N and not any(
                c is k or (c.edges == k.edges and c.holonomy == k.holonomy
                           and c.endpoints() == k.endpoints())
                for k in coll):
            return QNResult(False, witness=(gamma1, c))
    return QNResult(True, collection=coll)


# ---------------------------------------------------------------------------
# Component graphs and configurations


class ComponentGraph:
    """Vertices: components of the complement, labelled o / + / -;
    edges: the saddle connections of the collection."""

    def __init__(self, labels, edges):
        self.labels = labels          # list of "o" | "+" | "-"
        self.edges = edges            # per connection: (va, vb) or (v, v)

    def __repr__(self):
        return "ComponentGraph(%s, %s)" % (self.labels, self.edges)


class Configuration:
    """Combinatorial data of a maximal hat-homologous collection."""

    def __init__(self, graph, boundaries, interior_orders, lengths2):
        self.graph = graph
        # per component: list of boundary circles, each a cyclic list of
        # (connection index, angle_to_next_in_pi)
        self.boundaries = boundaries
        self.interior_orders = interior_orders   # per component, sorted
        self.lengths2 = lengths2                 # per connection

    def canonical(self):
        """Label-independent form: minimize over component and connection
        relabellings and cyclic rotations."""
        ncomp = len(self.graph.labels)
        nconn = len(self.graph.edges)
        from itertools import permutations
        best = None
        # normalize connection lengths to ratios against the minimum
        lmin = min(self.lengths2)
        ratios = tuple(sorted(v / lmin for v in self.lengths2))
        for perm in permutations(range(nconn)):
            rows = []
            for comp in range(ncomp):
                circles = []
                for circle in self.boundaries[comp]:
                    variants = []
                    k = len(circle)
                    relabeled = [(perm[ci], ang) for (ci, ang) in circle]
                    for r in range(k):
                        variants.append(tuple(relabeled[r:] + relabeled[:r]))
                    circles.append(min(variants))
                rows.append((self.graph.labels[comp], tuple(sorted(circles)),
                             tuple(self.interior_orders[comp]),
                             tuple(sorted(self.lengths2[ci2] / lmin
                                          for ci2 in range(nconn)))))
            cand = tuple(sorted(rows)), ratios
            if best is None or cand < best:
                best = cand
        return best

    def serialize(self):
        lab, ratios = self.canonical()
        comps = ";".join(
            "%s[%s|%s]" % (l, ",".join("(%s@%s)" % (c, a) for circ in circles
                                       for (c, a) in circ),
                           ",".join(str(k) for k in orders))
            for (l, circles, orders, _r) in lab)
        return comps + "//" + ",".join(str(r) for r in ratios)


def component_graph(S, conns) -> ComponentGraph:
    cut, side_tags, info = cut_complex(S, conns)
    comps = _face_components(cut)
    comp_of_face = {}
    for idx, faces in enumerate(comps):
        for f in faces:
            comp_of_face[f] = idx
    labels = []
    for idx, faces in enumerate(comps):
        labels.append(_component_label(cut, faces))
    edges = []
    for ci in range(len(conns)):
        touch = sorted({comp_of_face[h // 3]
                        for h, (cj, side) in side_tags.items() if cj == ci})
        if len(touch) == 1:
            edges.append((touch[0], touch[0]))
        elif len(touch) == 2:
            edges.append((touch[0], touch[1]))
        else:
            raise SurfaceError("connection borders %d components" % len(touch))
    return ComponentGraph(labels, edges)


def _component_label(cut, faces):
    loops = _component_boundary_loops(cut, faces)
    interior = _component_interior_orders(cut, faces)
    if len(loops) == 2 and not interior and _all_angles_pi(cut, faces, loops):
        return "o"
    return "+" if _component_trivial_holonomy(cut, faces) else "-"


def _component_boundary_loops(cut, faces):
    bset = {3 * f + r for f in faces for r in range(3)
            if cut.opp[3 * f + r] is None}
    loops = []
    todo = set(bset)
    while todo:
        h = min(todo)
        loop = []
        cur = h
        while True:
            loop.append(cur)
            todo.discard(cur)
            c = cut.nxt(cur)
            while cut.opp[c] is not None:
                c = cut.nxt(cut.opp[c])
            cur = c
            if cur == h:
                break
        loops.append(loop)
    return loops


def _component_interior_orders(cut, faces):
    """Orders of interior singularities (marked points count as order 0)."""
    face_set = set(faces)
    orders = []
    for cid in range(len(cut.classes)):
        if cut.is_boundary_class[cid]:
            continue
        if cut.classes[cid][0] // 3 not in face_set:
            continue
        k = cut.angle_pi[cid] - 2
        if k != 0 or cid in cut.marked:
            orders.append(k)
    return sorted(orders)


def _all_angles_pi(cut, faces, loops):
    for loop in loops:
        for h in loop:
            cid = cut.class_of[h]
            if cut.angle_pi[cid] != 1:
                # boundary angle at the walk corner; interior angle of the
                # class as a whole
                if cut.angle_pi[cid] is None or cut.angle_pi[cid] != 1:
                    return False
    return True


def _connection_key(c):
    return (c.holonomy.key(), c.edges, tuple(sorted(c.endpoints())))


def configuration_of(S, conns, check_maximal=True) -> Configuration:
    """The configuration of a maximal hat-homologous collection: component
    graph, cyclic boundary orders, boundary angles (multiples of pi) and
    interior singularity orders."""
    if check_maximal:
        maximal = maximal_collection(S, conns[0])
        if {_connection_key(c) for c in maximal} != \
                {_connection_key(c) for c in conns}:
            raise NotMaximal("a hat-homologous connection is missing from "
                             "the collection")
    cut, side_tags, info = cut_complex(S, conns)
    comps = _face_components(cut)
    comp_of_face = {}
    for idx, faces in enumerate(comps):
        for f in faces:
            comp_of_face[f] = idx
    labels = [_component_label(cut, faces) for faces in comps]
    edges = []
    for ci in range(len(conns)):
        touch = sorted({comp_of_face[h // 3]
                        for h, (cj, side) in side_tags.items() if cj == ci})
        if len(touch) == 1:
            edges.append((touch[0], touch[0]))
        else:
            edges.append((touch[0], touch[1]))
    graph = ComponentGraph(labels, edges)

    # real boundary vertices: classes containing a connection endpoint
    # corner; the cut surface and the refined surface share half-edge ids,
    # so classes transfer through a representative corner
    real_classes = set()
    for c in conns:
        for old in (c.start_class, c.end_class):
            new = info["class_map"][old]
            corner = info["class_corner"][new]
            real_classes.add(cut.class_of[corner])

    boundaries = []
    interior_orders = []
    for idx, faces in enumerate(comps):
        circles = []
        for loop in _component_boundary_loops(cut, faces):
            # rotate so the loop starts at a real vertex
            start = None
            for pos, h in enumerate(loop):
                if cut.class_of[h] in real_classes:
                    start = pos
                    break
            if start is None:
                raise SurfaceError("boundary circle without real vertices")
            loop = loop[start:] + loop[:start]
            runs = []
            for h in loop:
                ci, side = side_tags[h]
                if runs and runs[-1][0] == (ci, side) and \
                        cut.class_of[h] not in real_classes:
                    continue
                runs.append(((ci, side), h))
            circle = []
            for k, ((ci, side), h) in enumerate(runs):
                # angle at the vertex between this run and the next
                h_next = runs[(k + 1) % len(runs)][1]
                ang = cut.angle_pi[cut.class_of[h_next]]
                if ang is None:
                    raise SurfaceError("boundary angle not a pi multiple")
                circle.append((ci, ang))
            circles.append(circle)
        boundaries.append(circles)
        interior_orders.append(_component_interior_orders(cut, faces))
    lengths2 = [c.length2 for c in conns]
    return Configuration(graph, boundaries, interior_orders, lengths2)


