"""Triangulated half-translation surfaces over exact rationals.

A surface is a collection of euclidean triangles with a pairing of their
directed edges; each pairing carries a sign telling whether the transition
between the two charts is a translation (z -> z + c, sign +1) or a half-turn
(z -> -z + c, sign -1).  Cone points are the triangle vertices; their angles
are exact integer multiples of pi, counted combinatorially so no trigonometry
is ever needed.

Triangles are stored as edge vectors only; a chart for triangle f anchors its
first corner at the origin.  Half-edge ``h`` lives in face ``h // 3``; the
edges of face f are ``3f, 3f+1, 3f+2`` in counterclockwise order.
"""

from __future__ import annotations

from fractions import Fraction

from .geom import (Mat2, Vec, cross, dot, same_ray, sector_count_pi,
                   seg_intersect_open, point_in_triangle, SingularMatrix)


class SurfaceError(ValueError):
    pass


class MismatchedEdge(SurfaceError):
    pass


class DanglingEdge(SurfaceError):
    pass


class NonPositiveArea(SurfaceError):
    pass


class NotEmbedded(SurfaceError):
    pass


class FlatSurface:
    """Immutable triangulated half-translation surface (possibly with boundary).

    Parameters are raw arrays; most callers go through :func:`build_surface`
    or one of the constructors in other modules.

    - ``vecs[h]``: edge vector of half-edge h in its face's chart.
    - ``opp[h]``: paired half-edge, or None on a boundary edge.
    - ``sign[h]``: +1 for a translation gluing, -1 for a half-turn.
    - ``marked``: class ids of marked (order 0) points; recomputed ids.
    """

    def __init__(self, vecs, opp, sign, marked_corners=(), check=True):
        self.vecs = list(vecs)
        self.opp = list(opp)
        self.sign = list(sign)
        n = len(self.vecs)
        if n % 3:
            raise SurfaceError("half-edge count not a multiple of 3")
        self.nfaces = n // 3
        self._canonical = None
        if check:
            self._validate()
        self._build_classes()
        marked = set()
        for c in marked_corners:
            marked.add(self.class_of[c])
        self.marked = frozenset(marked)

    # -- basic combinatorics ------------------------------------------------

    @staticmethod
    def nxt(h):
        return h - h % 3 + (h + 1) % 3

    @staticmethod
    def prv(h):
        return h - h % 3 + (h + 2) % 3

    def face(self, h):
        return h // 3

    def _validate(self):
        for f in range(self.nfaces):
            a, b, c = self.vecs[3 * f], self.vecs[3 * f + 1], self.vecs[3 * f + 2]
            if a + b + c != Vec(0, 0):
                raise SurfaceError("face %d does not close up" % f)
            if cross(a, b) <= 0:
                raise NonPositiveArea("face %d is degenerate or clockwise" % f)
        for h, h2 in enumerate(self.opp):
            if h2 is None:
                continue
            if self.opp[h2] != h:
                raise DanglingEdge("pairing is not an involution at %d" % h)
            if h2 == h:
                raise SurfaceError("edge glued to itself")
            s = self.sign[h]
            if s not in (1, -1) or self.sign[h2] != s:
                raise MismatchedEdge("bad sign on edge %d" % h)
            if self.vecs[h2] != self.vecs[h] * (-s):
                raise MismatchedEdge(
                    "edge %d vector incompatible with its gluing tag" % h)

    # -- vertex classes and cone angles --------------------------------------

    def ccw_next_corner(self, c):
        """Corner counterclockwise-next around the vertex, or None at boundary."""
        e = self.prv(c)
        if self.opp[e] is None:
            return None
        return self.opp[e]

    def cw_next_corner(self, c):
        """Corner clockwise-next around the vertex, or None at boundary."""
        if self.opp[c] is None:
            return None
        return self.nxt(self.opp[c])

    def _build_classes(self):
        """Group corners into vertex classes and count cone angles (in pi)."""
        n = len(self.vecs)
        self.class_of = [-1] * n
        self.classes = []
        self.angle_pi = []
        self.is_boundary_class = []
        seen = [False] * n
        for start in range(n):
            if seen[start]:
                continue
            # rewind clockwise to a boundary corner, or detect a full cycle
            c = start
            steps = 0
            while self.opp[c] is not None:
                c2 = self.nxt(self.opp[c])
                if c2 == start:
                    c = start
                    break
                c = c2
                steps += 1
                if steps > n:
                    raise SurfaceError("corner walk does not close")
            first = c
            # collect the cycle counterclockwise, developing direction signs
            cycle = []
            fan = []
            sign_acc = 1
            boundary = False
            closing = None
            while True:
                cycle.append(c)
                fan.append(self.vecs[c] * sign_acc)
                e = self.prv(c)
                if self.opp[e] is None:
                    boundary = True
                    closing = -self.vecs[e] * sign_acc
                    break
                sign_acc *= self.sign[e]
                c = self.opp[e]
                if c == first:
                    closing = self.vecs[first] * sign_acc
                    break
            idx = len(self.classes)
            for cc in cycle:
                if seen[cc]:
                    raise SurfaceError("corner cycle walk inconsistent")
                seen[cc] = True
                self.class_of[cc] = idx
            self.classes.append(tuple(cycle))
            self.is_boundary_class.append(boundary)
            if boundary and cross(fan[0], closing) != 0:
                # boundary angle not a multiple of pi; no integer count exists
                self.angle_pi.append(None)
            else:
                self.angle_pi.append(sector_count_pi(fan[0], fan[1:], closing))

    def holonomy_around(self, class_id):
        """Sign picked up by a loop around an interior vertex class."""
        s = 1
        for c in self.classes[class_id]:
            e = self.prv(c)
            if self.opp[e] is not None:
                s *= self.sign[e]
        return s

    # -- boundary -------------------------------------------------------------

    def boundary_halfedges(self):
        return [h for h in range(len(self.vecs)) if self.opp[h] is None]

    def boundary_loops(self):
        """Boundary components as lists of half-edges in walk order."""
        bset = set(self.boundary_halfedges())
        loops = []
        while bset:
            h = min(bset)
            loop = []
            cur = h
            while True:
                loop.append(cur)
                bset.discard(cur)
                # walk: from end of cur, rotate CW through interior to next
                # boundary edge going out of that vertex
                c = self.nxt(cur)
                while self.opp[c] is not None:
                    c = self.nxt(self.opp[c])
                cur = c
                if cur == h:
                    break
            loops.append(loop)
        return loops

    @property
    def has_boundary(self):
        return any(o is None for o in self.opp)

    # -- metric quantities ------------------------------------------------------

    def area(self) -> Fraction:
        total = Fraction(0)
        for f in range(self.nfaces):
            total += cross(self.vecs[3 * f], self.vecs[3 * f + 1])
        return total / 2

    def corner_positions(self, f):
        """Positions of face f's corners in its standard chart."""
        a = self.vecs[3 * f]
        c = self.vecs[3 * f + 2]
        return (Vec(0, 0), a, -c)

    def corner_position(self, h):
        return self.corner_positions(h // 3)[h % 3]

    def order_of_class(self, class_id) -> int:
        a = self.angle_pi[class_id]
        if a is None or self.is_boundary_class[class_id]:
            raise SurfaceError("order undefined for boundary class")
        return a - 2

    def singularities(self):
        """(class_id, order) for every interior vertex class."""
        out = []
        for i in range(len(self.classes)):
            if not self.is_boundary_class[i]:
                out.append((i, self.angle_pi[i] - 2))
        return out

    def stratum_signature(self):
        """Orders of zeros and poles, plus explicitly marked order-0 points.

        Unmarked regular (angle 2 pi) vertex classes are treated as plumbing
        and do not show up in the signature.
        """
        if self.has_boundary:
            raise SurfaceError("signature undefined for surfaces with boundary")
        orders = []
        for i, k in self.singularities():
            if k != 0 or i in self.marked:
                orders.append(k)
        orders.sort()
        # Gauss-Bonnet, all classes included (regular points contribute 0)
        total = sum(k for _, k in self.singularities())
        if total % 4 != 0:
            raise SurfaceError("Gauss-Bonnet violated")
        return tuple(orders)

    def genus(self) -> int:
        total = sum(k for _, k in self.singularities())
        return (total + 4) // 4

    def euler_check(self):
        v = len(self.classes)
        e_int = sum(1 for o in self.opp if o is not None) // 2
        e_bnd = sum(1 for o in self.opp if o is None)
        return v - (e_int + e_bnd) + self.nfaces

    # -- linear action -----------------------------------------------------------

    def apply(self, m: Mat2) -> "FlatSurface":
        d = m.det()
        if d == 0:
            raise SingularMatrix("cannot act by a singular matrix")
        if d < 0:
            raise SurfaceError("orientation-reversing matrices not supported")
        marked_corners = [self.classes[i][0] for i in self.marked]
        return FlatSurface([m(v) for v in self.vecs], list(self.opp),
                           list(self.sign), marked_corners)

    def with_marks(self, marked_class_ids):
        corners = [self.classes[i][0] for i in marked_class_ids]
        return FlatSurface(self.vecs, self.opp, self.sign, corners, check=False)

    # -- developing helpers -----------------------------------------------------

    def cross_frame(self, h, s, c):
        """Cross half-edge h out of its face whose chart is placed by z -> s z + c.

        Returns (h2, s2, c2): the opposite half-edge and the frame of its face
        so both charts agree along the shared edge.
        """
        h2 = self.opp[h]
        if h2 is None:
            raise SurfaceError("crossed a boundary edge")
        sg = self.sign[h]
        s2 = s * sg
        pstart = self.corner_position(h)
        pend2 = self.corner_position(self.nxt(h2))
        c2 = (s * pstart + c) - s2 * pend2
        return h2, s2, c2

    def __repr__(self):
        return "FlatSurface(%d triangles, signature~%s)" % (
            self.nfaces,
            None if self.has_boundary else list(self.stratum_signature()))


# ---------------------------------------------------------------------------
# Polygon input


def validate_simple_polygon(pts):
    """Exact simplicity and orientation check; raises NotEmbedded."""
    n = len(pts)
    if n < 3:
        raise NotEmbedded("polygon needs at least 3 vertices")
    area2 = Fraction(0)
    for i in range(n):
        area2 += cross(pts[i], pts[(i + 1) % n])
    if area2 <= 0:
        raise NonPositiveArea("polygon not counterclockwise or degenerate")
    for i in range(n):
        if pts[i] == pts[(i + 1) % n]:
            raise NotEmbedded("zero-length polygon side")
        for j in range(i + 1, n):
            if pts[i] == pts[j]:
                raise NotEmbedded("repeated polygon vertex")
            if j in (i, (i + 1) % n) or i == (j + 1) % n:
                continue
            if seg_intersect_open(pts[i], pts[(i + 1) % n],
                                  pts[j], pts[(j + 1) % n]):
                raise NotEmbedded("polygon sides cross")
            # a vertex lying in the open interior of a non-adjacent side also
            # breaks simplicity
    for i in range(n):
        a, b = pts[i], pts[(i + 1) % n]
        d = b - a
        for j in range(n):
            if j == i or j == (i + 1) % n:
                continue
            r = pts[j] - a
            if cross(d, r) == 0 and 0 < dot(d, r) < d.norm2():
                raise NotEmbedded("polygon vertex lies inside a side")


def ear_clip(pts):
    """Triangulate a simple CCW polygon; returns index triples.

    Exact rational ear clipping; O(n^2), ample for desk scale.
    """
    n = len(pts)
    idx = list(range(n))
    tris = []
    guard = 0
    while len(idx) > 3:
        guard += 1
        if guard > 10 * n * n:
            raise SurfaceError("ear clipping failed to converge")
        m = len(idx)
        clipped = False
        for k in range(m):
            i0, i1, i2 = idx[(k - 1) % m], idx[k], idx[(k + 1) % m]
            a, b, c = pts[i0], pts[i1], pts[i2]
            if cross(b - a, c - b) <= 0:
                continue
            ok = True
            for j in idx:
                if j in (i0, i1, i2):
                    continue
                if point_in_triangle(pts[j], a, b, c):
                    ok = False
                    break
            if not ok:
                continue
            tris.append((i0, i1, i2))
            idx.pop(k)
            clipped = True
            break
        if not clipped:
            raise SurfaceError("no ear found; polygon not simple?")
    tris.append(tuple(idx))
    return tris


def build_surface(polygons, pairings, marked_points=(), allow_boundary=False):
    """Glue polygons (lists of CCW vertex positions) along paired sides.

    ``pairings`` is a list of ((poly_a, side_a), (poly_b, side_b), tag) with
    tag "T" (translation) or "F" (half-turn / flip).  Side i of a polygon runs
    from vertex i to vertex i+1.  ``marked_points`` lists (poly, vertex)
    corners whose class should be marked.

    Raises MismatchedEdge, DanglingEdge, NonPositiveArea, NotEmbedded.
    """
    all_tris = []       # (poly, (i0,i1,i2))
    side_to_halfedge = {}
    diag_pairs = []
    vecs = []
    corner_lookup = {}  # (poly, vertex) -> a half-edge whose corner sits there

    for pi, pts in enumerate(polygons):
        pts = [v if isinstance(v, Vec) else Vec(*v) for v in pts]
        validate_simple_polygon(pts)
        n = len(pts)
        tris = ear_clip(pts)
        # map directed vertex pair -> half-edge id for diagonal matching
        local_edge = {}
        for t in tris:
            base = len(vecs)
            for s in range(3):
                u, v = t[s], t[(s + 1) % 3]
                vecs.append(pts[v] - pts[u])
                local_edge[(u, v)] = base + s
                corner_lookup.setdefault((pi, u), base + s)
            all_tris.append((pi, t))
        for (u, v), h in local_edge.items():
            if (v, u) in local_edge:
                if u < v:
                    diag_pairs.append((h, local_edge[(v, u)]))
            else:
                # boundary side of the polygon: u -> v must be a polygon side
                if v != (u + 1) % n:
                    raise SurfaceError("triangulation produced a stray edge")
                side_to_halfedge[(pi, u)] = h

    opp = [None] * len(vecs)
    sign = [1] * len(vecs)
    for h, h2 in diag_pairs:
        opp[h], opp[h2] = h2, h
        sign[h] = sign[h2] = 1

    for (a, b, tag) in pairings:
        ka, kb = tuple(a), tuple(b)
        if ka not in side_to_halfedge or kb not in side_to_halfedge:
            raise DanglingEdge("pairing refers to unknown side %s %s" % (a, b))
        ha, hb = side_to_halfedge[ka], side_to_halfedge[kb]
        if opp[ha] is not None or opp[hb] is not None:
            raise DanglingEdge("side paired twice")
        if ha == hb:
            raise MismatchedEdge("cannot glue a side to itself")
        s = {"T": 1, "F": -1}[tag]
        if vecs[hb] != vecs[ha] * (-s):
            raise MismatchedEdge(
                "sides %s %s have vectors incompatible with tag %s" % (a, b, tag))
        opp[ha], opp[hb] = hb, ha
        sign[ha] = sign[hb] = s

    if not allow_boundary:
        for (pi, u), h in side_to_halfedge.items():
            if opp[h] is None:
                raise DanglingEdge("side (%d,%d) left unpaired" % (pi, u))

    marked_corners = []
    for (pi, u) in marked_points:
        marked_corners.append(corner_lookup[(pi, u)])
    return FlatSurface(vecs, opp, sign, marked_corners)


# ---------------------------------------------------------------------------
# Stock examples used throughout the test-suite and demos.


def square_torus():
    sq = [(0, 0), (1, 0), (1, 1), (0, 1)]
    pairs = [((0, 0), (0, 2), "T"), ((0, 1), (0, 3), "T")]
    return build_surface([sq], pairs)


def pillowcase(width=1, height=1):
    """The Q(-1,-1,-1,-1) surface: a width x height cylinder folded twice.

    Built from two squares glued into a cylinder whose top and bottom circles
    are folded onto themselves by half-turns, creating four poles.
    """
    w, h = Fraction(width), Fraction(height)
    r1 = [(0, 0), (w, 0), (w, h), (0, h)]
    r2 = [(w, 0), (2 * w, 0), (2 * w, h), (w, h)]
    pairs = [
        ((0, 1), (1, 3), "T"),       # middle vertical seam
        ((1, 1), (0, 3), "T"),       # outer vertical seam (cylinder closes)
        ((0, 0), (1, 0), "F"),       # bottom circle folded
        ((0, 2), (1, 2), "F"),       # top circle folded
    ]
    return build_surface([r1, r2], pairs)
