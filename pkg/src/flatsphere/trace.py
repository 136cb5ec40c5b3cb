"""Exact geodesic tracing on triangulated half-translation surfaces.

Points are (face, position) pairs with positions in the face's standard chart
(first corner at the origin).  A trace walks a straight segment across faces,
transiting through gluings z -> s z + c, stopping at vertices; the vertical
tracers additionally watch a horizontal transversal and detect periodic
orbits, which is decidable here because all data is rational.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt

from .geom import Vec, cross, dot, same_ray, ccw_arc_contains, direction_key
from .surface import FlatSurface, SurfaceError, NotEmbedded


class NonReturningOrbit(SurfaceError):
    pass


class VerticalSaddleConnectionError(SurfaceError):
    pass


class SegmentHitsSingularity(SurfaceError):
    pass


UP = Vec(0, 1)
DOWN = Vec(0, -1)


# ---------------------------------------------------------------------------
# Point bookkeeping


def on_edge_param(S, f, p, i):
    """Parameter of p along edge i of face f in [0,1], or None if not on it."""
    h = 3 * f + i
    a = S.corner_position(h)
    v = S.vecs[h]
    r = p - a
    if cross(v, r) != 0:
        return None
    t = dot(r, v)
    n = v.norm2()
    if 0 <= t <= n:
        return t / n
    return None


def vertex_at(S, f, p):
    for j in range(3):
        if S.corner_position(3 * f + j) == p:
            return 3 * f + j
    return None


def edge_point(S, h, lam):
    return S.corner_position(h) + S.vecs[h] * Fraction(lam)


def canonical_point(S, f, p):
    """Hashable identity of a surface point across chart representatives."""
    v = vertex_at(S, f, p)
    if v is not None:
        return ("V", S.class_of[v])
    reps = [(f, p)]
    for i in range(3):
        lam = on_edge_param(S, f, p, i)
        if lam is None or lam in (0, 1):
            continue
        h = 3 * f + i
        h2 = S.opp[h]
        if h2 is None:
            continue
        reps.append((h2 // 3, edge_point(S, h2, 1 - lam)))
    reps.sort(key=lambda t: (t[0], t[1].x, t[1].y))
    f0, p0 = reps[0]
    return ("P", f0, p0.x, p0.y)


def cross_edge(S, h, p, d):
    """Transit a point on edge h into the opposite chart: (face2, p2, d2)."""
    h2 = S.opp[h]
    if h2 is None:
        raise SurfaceError("attempted to cross a boundary edge")
    a = S.corner_position(h)
    v = S.vecs[h]
    lam = dot(p - a, v) / v.norm2()
    end2 = S.corner_position(S.nxt(h2))
    p2 = end2 - S.vecs[h2] * lam
    return h2 // 3, p2, d * S.sign[h]


# ---------------------------------------------------------------------------
# Core stepping


def ray_exit(S, f, p, d):
    """First exit of the ray p + t d (t > 0) from the closed face f.

    The ray must enter the open face immediately (riding handled elsewhere).
    Returns (t, kind, data): ("edge", half-edge) or ("vertex", corner).
    """
    best = None
    for i in range(3):
        h = 3 * f + i
        a = S.corner_position(h)
        v = S.vecs[h]
        den = cross(d, v)
        if den == 0:
            continue
        t = cross(a - p, v) / den
        if t <= 0:
            continue
        q = p + d * t
        u = dot(q - a, v) / v.norm2()
        if u < 0 or u > 1:
            continue
        if u == 0:
            cand = (t, "vertex", h)
        elif u == 1:
            cand = (t, "vertex", S.nxt(h))
        else:
            cand = (t, "edge", h)
        if best is None or cand[0] < best[0] or (
                cand[0] == best[0] and cand[1] == "vertex" and best[1] == "edge"):
            best = cand
    if best is None:
        raise SurfaceError("ray does not exit the face; bad start data")
    return best


def riding_halfedge(S, f, p, d):
    """(h, lam) if the segment from p along d rides an edge, else None.

    The returned half-edge satisfies vec(h) parallel to d with positive dot,
    i.e. its face lies left of the motion; p sits at parameter lam on h.
    """
    for i in range(3):
        h = 3 * f + i
        lam = on_edge_param(S, f, p, i)
        if lam is None:
            continue
        v = S.vecs[h]
        if cross(v, d) != 0:
            continue
        if dot(v, d) > 0:
            return h, lam
        h2 = S.opp[h]
        if h2 is None:
            return None
        return h2, 1 - lam
    return None


def _outward_edge(S, f, p, d):
    """Edge of f containing p with d pointing strictly out of f, or None."""
    for i in range(3):
        h = 3 * f + i
        lam = on_edge_param(S, f, p, i)
        if lam is None or lam in (0, 1):
            continue
        if cross(S.vecs[h], d) < 0:
            return h
    return None


def _param_scale(v, d):
    """t with v = t d (v parallel to d)."""
    if d.x != 0:
        return v.x / d.x
    return v.y / d.y


class Trace:
    __slots__ = ("pieces", "params", "end_kind", "end_data")

    def __init__(self):
        self.pieces = []   # (face, p0, p1), p0 != p1
        self.params = []   # cumulative parameter at each piece end
        self.end_kind = None   # "vertex" | "budget" | "hit" | "periodic"
        self.end_data = None

    def vertical_travel(self):
        return sum(abs(p1.y - p0.y) for (_, p0, p1) in self.pieces)


def trace_segment(S, start, d, budget=None, watch=None, max_steps=200000):
    """Trace p + t d from ``start``, stopping at vertices, budget or watcher.

    ``start``: ("corner", corner_id) or ("point", face, position).
    ``watch(face, q0, q1)``: optional; inspects a candidate piece and returns
    (frac, payload) with frac in (0, 1] to cut the trace at q0+frac*(q1-q0).
    ``budget``: maximal parameter t (None means trace until an event, with
    exact periodic-orbit detection).

    Terminal events: ("vertex", arrival_corner), ("budget", (f, p)),
    ("hit", payload), ("periodic", None).
    """
    tr = Trace()
    if start[0] == "corner":
        c = start[1]
        f, p = c // 3, S.corner_position(c)
    else:
        _, f, p = start
    t_acc = Fraction(0)
    visited = set()
    steps = 0

    def emit(face, q0, q1, t_end, kind, data):
        if q0 != q1:
            hit = watch(face, q0, q1, t_acc) if watch else None
            if hit is not None:
                frac, payload = hit
                qq = q0 + (q1 - q0) * frac
                if qq != q0:
                    tr.pieces.append((face, q0, qq))
                    tr.params.append(t_acc + (t_end - t_acc) * frac)
                tr.end_kind, tr.end_data = "hit", payload
                return True
            tr.pieces.append((face, q0, q1))
            tr.params.append(t_end)
        if kind is not None:
            tr.end_kind, tr.end_data = kind, data
            return True
        return False

    while True:
        steps += 1
        if steps > max_steps:
            raise SurfaceError("trace exceeded step limit")
        out = _outward_edge(S, f, p, d)
        if out is not None:
            f, p, d = cross_edge(S, out, p, d)
            continue
        ride = riding_halfedge(S, f, p, d)
        if ride is not None:
            h, lam = ride
            f = h // 3
            p = edge_point(S, h, lam)
            remain = (1 - lam) * _param_scale(S.vecs[h], d)
            if budget is not None and t_acc + remain >= budget:
                t_step = budget - t_acc
                q = p + d * t_step
                kind = ("vertex", S.nxt(h)) if t_acc + remain == budget \
                    else ("budget", (f, q))
                if emit(f, p, q, budget, *kind):
                    return tr
            if emit(f, p, edge_point(S, h, 1), t_acc + remain,
                    "vertex", S.nxt(h)):
                return tr
            raise SurfaceError("unreachable")
        t_exit, kind, data = ray_exit(S, f, p, d)
        if budget is not None and t_acc + t_exit >= budget:
            t_step = budget - t_acc
            q = p + d * t_step
            if t_acc + t_exit == budget and kind == "vertex":
                if emit(f, p, q, budget, "vertex", data):
                    return tr
            if emit(f, p, q, budget, "budget", (f, q)):
                return tr
            raise SurfaceError("unreachable")
        q = p + d * t_exit
        if kind == "vertex":
            if emit(f, p, q, t_acc + t_exit, "vertex", data):
                return tr
            raise SurfaceError("unreachable")
        if emit(f, p, q, t_acc + t_exit, None, None):
            return tr
        t_acc += t_exit
        h = data
        if budget is None:
            lamkey = on_edge_param(S, f, q, h % 3)
            state = (h, lamkey, d.x, d.y)
            if state in visited:
                tr.end_kind, tr.end_data = "periodic", None
                return tr
            visited.add(state)
        f, p, d = cross_edge(S, h, q, d)


# ---------------------------------------------------------------------------
# Germs


def germs_at_class(S, class_id, direction):
    """Corners of the class whose half-open sector [u, w) holds direction."""
    out = []
    for c in S.classes[class_id]:
        u = S.vecs[c]
        w = -S.vecs[S.prv(c)]
        if cross(u, w) <= 0:
            raise SurfaceError("degenerate corner sector")
        if same_ray(u, direction):
            out.append((c, "edge"))
        elif ccw_arc_contains(u, w, direction):
            out.append((c, "interior"))
    return out


def first_germ_rotating(S, corner, d_from, target, ccw=True):
    """First germ parallel to ``target`` when rotating from ``d_from``.

    ``d_from`` lies in ``corner``'s sector; the sweep starts strictly after
    it.  ``target`` is transported through gluing signs along the walk.
    Returns (corner2, direction2) in corner2's chart.
    """
    cur, d, t = corner, d_from, target
    first = True
    guard = 0
    while True:
        guard += 1
        if guard > 4 * len(S.vecs) + 8:
            raise SurfaceError("germ sweep did not terminate")
        u = S.vecs[cur]
        w = -S.vecs[S.prv(cur)]
        if ccw:
            if first:
                if cross(d, w) > 0 and ccw_arc_contains(d, w, t):
                    return cur, t
            else:
                if same_ray(u, t) or ccw_arc_contains(u, w, t):
                    return cur, t
            e = S.prv(cur)
            if S.opp[e] is None:
                raise SurfaceError("germ sweep reached the boundary")
            t = t * S.sign[e]
            cur = S.opp[e]
        else:
            if first:
                if cross(u, d) > 0 and (same_ray(u, t) or
                                        ccw_arc_contains(u, d, t)):
                    return cur, t
            else:
                if same_ray(u, t) or ccw_arc_contains(u, w, t):
                    return cur, t
            e = cur
            if S.opp[e] is None:
                raise SurfaceError("germ sweep reached the boundary")
            t = t * S.sign[e]
            cur = S.nxt(S.opp[e])
        first = False


def germ_rotate_pi(S, corner, direction, ccw=True):
    """Rotate a germ at a vertex by exactly pi (counter)clockwise.

    ``direction`` must lie in ``corner``'s sector (its chart coordinates).
    Returns (corner2, direction2) with direction2 in corner2's chart.

    Walking around the vertex away from the germ, the first direction hit
    on the line spanned by the (transported) germ sits at angle exactly pi:
    corner sectors are shorter than pi, so no line crossing can be skipped
    and the first one cannot be the 2-pi return.
    """
    cur, d = corner, direction
    guard = 0
    first = True
    while True:
        guard += 1
        if guard > 4 * len(S.vecs) + 8:
            raise SurfaceError("pi-rotation walk did not terminate")
        u = S.vecs[cur]
        w = -S.vecs[S.prv(cur)]
        t = -d
        if ccw:
            if first:
                # the remaining arc (d, w) is shorter than pi: t not in it
                pass
            elif same_ray(u, t) or ccw_arc_contains(u, w, t):
                return cur, t
            e = S.prv(cur)
            if S.opp[e] is None:
                raise SurfaceError("pi-rotation walked into the boundary")
            d = d * S.sign[e]
            cur = S.opp[e]
        else:
            if first:
                pass
            elif same_ray(w, t) or ccw_arc_contains(u, w, t):
                return cur, t
            e = cur
            if S.opp[e] is None:
                raise SurfaceError("pi-rotation walked into the boundary")
            d = d * S.sign[e]
            cur = S.nxt(S.opp[e])
        first = False


# ---------------------------------------------------------------------------
# Horizontal transversals


class Transversal:
    """An embedded horizontal segment with exact abscissas and a left end."""

    def __init__(self, surface, pieces, length):
        self.surface = surface
        self.pieces = pieces   # (face, p0, p1, s0, s1, parity)
        self.length = length

    @staticmethod
    def from_corner(surface, corner, length):
        tr = trace_segment(surface, ("corner", corner), Vec(1, 0),
                           budget=Fraction(length))
        return Transversal._from_trace(surface, tr, length)

    @staticmethod
    def from_point(surface, f, p, length):
        tr = trace_segment(surface, ("point", f, p), Vec(1, 0),
                           budget=Fraction(length))
        return Transversal._from_trace(surface, tr, length)

    @staticmethod
    def _from_trace(surface, tr, length):
        length = Fraction(length)
        if tr.end_kind == "vertex" and tr.params[-1] < length:
            raise SegmentHitsSingularity(
                "transversal hits a singularity before its right end")
        if tr.end_kind == "periodic":
            raise NotEmbedded("transversal wraps around periodically")
        pieces = []
        s_prev = Fraction(0)
        for (f, p0, p1), s_end in zip(tr.pieces, tr.params):
            par = 1 if (p1 - p0).x > 0 else -1
            pieces.append((f, p0, p1, s_prev, s_end, par))
            s_prev = s_end
        t = Transversal(surface, pieces, length)
        t._check_embedded()
        return t

    def _canonical_1d(self):
        """Each piece as (line key, lo, hi) in canonical 1-d coordinates."""
        S = self.surface
        out = []
        for (f, p0, p1, s0, s1, par) in self.pieces:
            ride = riding_halfedge(S, f, p0, p1 - p0)
            if ride is not None:
                h, lam0 = ride
                if h // 3 == f:
                    lam1 = on_edge_param(S, f, p1, h % 3)
                else:
                    mu1 = on_edge_param(S, f, p1, S.opp[h] % 3)
                    lam1 = 1 - mu1
                e = min(h, S.opp[h]) if S.opp[h] is not None else h
                if e != h:
                    lam0, lam1 = 1 - lam0, 1 - lam1
                out.append((("E", e), min(lam0, lam1), max(lam0, lam1)))
            else:
                out.append((("F", f, p0.y), min(p0.x, p1.x), max(p0.x, p1.x)))
        return out

    def _check_embedded(self):
        segs = self._canonical_1d()
        for i in range(len(segs)):
            for j in range(i + 1, len(segs)):
                (ka, lo1, hi1), (kb, lo2, hi2) = segs[i], segs[j]
                if ka != kb:
                    continue
                if min(hi1, hi2) > max(lo1, lo2):
                    raise NotEmbedded("transversal overlaps itself")
        # distinct crossing points: interior endpoints appear exactly twice,
        # once as a piece end and once as the next piece's start
        S = self.surface
        keys = {}
        for idx, (f, p0, p1, s0, s1, par) in enumerate(self.pieces):
            for pt, s in ((p0, s0), (p1, s1)):
                keys.setdefault(canonical_point(S, f, pt), set()).add(s)
        ends = {Fraction(0), self.length}
        for k, svals in keys.items():
            if len(svals) > 1 and not svals <= ends:
                # a closed transversal may return to its own left end
                raise NotEmbedded("transversal revisits a surface point")

    def point_at(self, s):
        s = Fraction(s)
        for (f, p0, p1, s0, s1, par) in self.pieces:
            if s0 <= s <= s1:
                return f, p0 + Vec(par, 0) * (s - s0)
        raise ValueError("abscissa outside the transversal")

    def parity_at(self, s):
        s = Fraction(s)
        for (f, p0, p1, s0, s1, par) in self.pieces:
            if s0 <= s <= s1:
                return par
        raise ValueError("abscissa outside the transversal")

    def make_watcher(self):
        """Crossing detector: payload (abscissa, arrival) with arrival +1 when
        the flow pierces the transversal going up in its frame, -1 down.
        Endpoint crossings (s in {0, length}) are ignored.

        Pieces riding a glued edge are registered in both adjacent charts so
        crossings arriving from either side are seen.
        """
        S = self.surface
        per_face = {}
        for (f, p0, p1, s0, s1, par) in self.pieces:
            per_face.setdefault(f, []).append((p0, p1, s0, s1, par))
            for i in range(3):
                if on_edge_param(S, f, p0, i) is None or \
                        on_edge_param(S, f, p1, i) is None:
                    continue
                h = 3 * f + i
                if S.opp[h] is None:
                    continue
                f2, r0, _ = cross_edge(S, h, p0, Vec(1, 0))
                _, r1, _ = cross_edge(S, h, p1, Vec(1, 0))
                par2 = par * S.sign[h]
                per_face.setdefault(f2, []).append((r0, r1, s0, s1, par2))
                break
        length = self.length

        def watch(face, q0, q1, t_acc=Fraction(1)):
            if face not in per_face:
                return None
            d = q1 - q0
            best = None
            for (p0, p1, s0, s1, par) in per_face[face]:
                e = p1 - p0
                den = cross(d, e)
                if den == 0:
                    continue
                t = cross(p0 - q0, e) / den
                u = cross(p0 - q0, d) / den
                if t < 0 or t > 1 or u < 0 or u > 1:
                    continue
                if t == 0 and t_acc == 0:
                    continue  # the trace starts on the transversal
                # piece point p(s) = p0 + (s-s0)*par*(1,0) and the crossing is
                # p0 + u (p1-p0), so s = s0 + u (s1-s0)
                s = s0 + (s1 - s0) * u
                if s <= 0 or s >= length:
                    continue
                va = 1 if d.y * par > 0 else -1
                if best is None or t < best[0]:
                    best = (t, (s, va))
            return best

        return watch


# ---------------------------------------------------------------------------
# Vertical dynamics


def vertical_separatrix_traces(S, transversal=None):
    watch = transversal.make_watcher() if transversal is not None else None
    for cid in range(len(S.classes)):
        for d in (UP, DOWN):
            for corner, kind in germs_at_class(S, cid, d):
                tr = trace_segment(S, ("corner", corner), d, watch=watch)
                yield cid, corner, d, tr


def has_vertical_saddle_connection(S):
    for cid, corner, d, tr in vertical_separatrix_traces(S):
        if tr.end_kind == "vertex":
            return True
    return False


def vertical_saddle_connections_exist_count(S):
    """Number of vertical germ traces ending at a vertex (2 per connection)."""
    n = 0
    for cid, corner, d, tr in vertical_separatrix_traces(S):
        if tr.end_kind == "vertex":
            n += 1
    return n


class ReturnSystem:
    """First-return data of the vertical flow on a horizontal transversal.

    Labels 1..l are the continuity intervals of the upward return map, labels
    l+1..l+m the downward ones.  ``sigma`` pairs each interval with its
    landing interval (a fixed-point-free involution); ``heights`` are return
    times, ``flips[i]`` is -1 when the return reverses orientation, and the
    affine return map on interval i is x -> flips[i] * x + offsets[i].
    """

    def __init__(self, transversal, top_cuts, bottom_cuts, sigma, heights,
                 flips, offsets):
        self.transversal = transversal
        self.top_cuts = top_cuts
        self.bottom_cuts = bottom_cuts
        self.sigma = sigma
        self.heights = heights
        self.flips = flips
        self.offsets = offsets
        self.l = len(top_cuts) + 1
        self.m = len(bottom_cuts) + 1

    def interval(self, label):
        L = self.transversal.length
        if label <= self.l:
            cuts = [Fraction(0)] + self.top_cuts + [L]
            return cuts[label - 1], cuts[label]
        j = label - self.l
        cuts = [Fraction(0)] + self.bottom_cuts + [L]
        return cuts[j - 1], cuts[j]

    def lengths(self):
        return {i: self.interval(i)[1] - self.interval(i)[0]
                for i in range(1, self.l + self.m + 1)}

    def as_permutation(self):
        return dict(self.sigma)


def first_return_system(S, transversal):
    """Vertical-flow return system on a horizontal transversal.

    Raises NonReturningOrbit when some orbit provably never returns.
    """
    top_cuts = set()
    bottom_cuts = set()
    for cid, corner, d, tr in vertical_separatrix_traces(S, transversal):
        if tr.end_kind != "hit":
            continue
        s, va = tr.end_data
        if va == -1:
            top_cuts.add(s)
        else:
            bottom_cuts.add(s)
    top_cuts = sorted(top_cuts)
    bottom_cuts = sorted(bottom_cuts)
    l, m = len(top_cuts) + 1, len(bottom_cuts) + 1
    L = transversal.length
    watch = transversal.make_watcher()

    sigma, heights, flips, offsets = {}, {}, {}, {}

    def locate(cuts, base, s):
        lo = [Fraction(0)] + cuts + [L]
        for k in range(len(lo) - 1):
            if lo[k] < s < lo[k + 1]:
                return base + k + 1
        raise NonReturningOrbit("return lands on a cut point")

    for label in range(1, l + m + 1):
        if label <= l:
            cuts = [Fraction(0)] + top_cuts + [L]
            a, b = cuts[label - 1], cuts[label]
            d = UP
        else:
            cuts = [Fraction(0)] + bottom_cuts + [L]
            a, b = cuts[label - l - 1], cuts[label - l]
            d = DOWN
        mid = (a + b) / 2
        f, p = transversal.point_at(mid)
        dd = d * transversal.parity_at(mid)
        tr = trace_segment(S, ("point", f, p), dd, watch=watch)
        if tr.end_kind == "periodic":
            raise NonReturningOrbit("vertical orbit never meets the segment")
        if tr.end_kind == "vertex":
            raise NonReturningOrbit("interval midpoint hits a singularity")
        s_land, va = tr.end_data
        sigma[label] = locate(bottom_cuts, l, s_land) if va == 1 \
            else locate(top_cuts, 0, s_land)
        heights[label] = tr.vertical_travel()
        # x-parity of the return map: +1 when the affine return preserves
        # orientation; the arrival direction equals (start direction)*parity
        start_dir = 1 if label <= l else -1
        par = va * start_dir
        flips[label] = par
        offsets[label] = s_land - par * mid

    for i, j in sigma.items():
        if sigma.get(j) != i or i == j:
            raise NonReturningOrbit("return maps do not pair into strips")

    rs = ReturnSystem(transversal, top_cuts, bottom_cuts, sigma, heights,
                      flips, offsets)
    lengths = rs.lengths()
    for i, j in sigma.items():
        if lengths[i] != lengths[j] or heights[i] != heights[j]:
            raise NonReturningOrbit("paired strips disagree")
    return rs


# ---------------------------------------------------------------------------
# Saddle connections


class SaddleConnection:
    """An unoriented saddle connection with a canonical orientation.

    The stored holonomy has y > 0, or y = 0 and x > 0; pieces develop the
    geodesic in that orientation.  ``edges`` lists crossed undirected edges.
    """

    __slots__ = ("start_class", "end_class", "holonomy", "length2", "pieces",
                 "edges", "uid")

    def __init__(self, start_class, end_class, holonomy, pieces, edges, uid):
        self.start_class = start_class
        self.end_class = end_class
        self.holonomy = holonomy
        self.length2 = holonomy.norm2()
        self.pieces = pieces
        self.edges = edges
        self.uid = uid

    def endpoints(self):
        return frozenset((self.start_class, self.end_class))

    def is_vertical(self):
        return self.holonomy.x == 0

    def __repr__(self):
        return "SaddleConnection(%s-%s, hol=%s)" % (
            self.start_class, self.end_class, self.holonomy)


def _canonical_orientation(h):
    return h.y > 0 or (h.y == 0 and h.x > 0)


def _primitive_direction(v):
    den = (v.x.denominator * v.y.denominator
           // gcd(v.x.denominator, v.y.denominator))
    x = int(v.x * den)
    y = int(v.y * den)
    g = gcd(abs(x), abs(y))
    x //= g
    y //= g
    if x < 0 or (x == 0 and y < 0):
        x, y = -x, -y
    return (x, y)


def _dist2_to_segment(a, b):
    d = b - a
    n = d.norm2()
    if n == 0:
        return a.norm2()
    t = -dot(a, d)
    if t <= 0:
        return a.norm2()
    if t >= n:
        return b.norm2()
    c = cross(a, b)
    return c * c / n


def enumerate_saddle_connections(S, lmax, max_steps=400000):
    """All saddle connections of length <= lmax, each once, sorted.

    Sorting: by length, then direction angle, then endpoint classes.  Every
    vertex class (zeros, poles, marked points) is an admissible endpoint.
    """
    lmax = Fraction(lmax)
    l2 = lmax * lmax
    found = {}

    for h in range(len(S.vecs)):
        if S.vecs[h].norm2() <= l2:
            _record_connection(S, found, ("corner", h), S.vecs[h])

    budget = [max_steps]
    for c in range(len(S.vecs)):
        u = S.vecs[c]
        w = -S.vecs[S.prv(c)]
        A = u
        B = u + S.vecs[S.nxt(c)]
        _wedge_search(S, found, c, S.nxt(c), 1,
                      Vec(0, 0) - S.corner_position(c), A, B, u, w, l2, budget)

    return sorted(found.values(),
                  key=lambda sc: (sc.length2, direction_key(sc.holonomy),
                                  sc.start_class, sc.end_class, sc.uid))


def _wedge_search(S, found, origin_corner, entry_edge, fs, fc, A, B, wa, wb,
                  l2, budget):
    budget[0] -= 1
    if budget[0] < 0:
        raise SurfaceError("saddle-connection search exceeded its budget")
    if _dist2_to_segment(A, B) > l2:
        return
    h2 = S.opp[entry_edge]
    if h2 is None:
        return
    s2 = fs * S.sign[entry_edge]
    pstart = S.corner_position(entry_edge)
    c2 = (pstart * fs + fc) - S.corner_position(S.nxt(h2)) * s2
    far_corner = S.prv(h2)
    C = S.corner_position(far_corner) * s2 + c2
    in_wedge = (not C.is_zero()) and cross(wa, C) > 0 and cross(C, wb) > 0
    if in_wedge and C.norm2() <= l2:
        _record_connection(S, found, ("corner", origin_corner), C)
    if in_wedge:
        left, right = (wa, C), (C, wb)
    elif cross(wa, C) <= 0:
        left, right = None, (wa, wb)
    else:
        left, right = (wa, wb), None
    # face h2 develops with start(h2) -> B, end(h2) -> A, far -> C;
    # edge nxt(h2) runs A -> C, edge prv(h2) runs C -> B
    if left is not None and cross(*left) > 0:
        _wedge_search(S, found, origin_corner, S.nxt(h2), s2, c2, A, C,
                      left[0], left[1], l2, budget)
    if right is not None and cross(*right) > 0:
        _wedge_search(S, found, origin_corner, S.prv(h2), s2, c2, C, B,
                      right[0], right[1], l2, budget)


def _record_connection(S, found, start, holonomy):
    tr = trace_segment(S, start, holonomy, budget=Fraction(1))
    if tr.end_kind != "vertex":
        raise SurfaceError("discovered connection does not end at a vertex")
    arrival = tr.end_data
    pieces = list(tr.pieces)
    start_class = S.class_of[start[1]]
    end_class = S.class_of[arrival]
    hol = holonomy
    if not _canonical_orientation(hol):
        hol = -hol
        pieces = [(f, p1, p0) for (f, p0, p1) in reversed(pieces)]
        start_class, end_class = end_class, start_class
    key = (_midpoint_key(S, pieces, hol), _primitive_direction(hol))
    if key in found:
        return
    found[key] = SaddleConnection(start_class, end_class, hol, pieces,
                                  tuple(_crossed_edges(S, pieces)), len(found))


def _midpoint_key(S, pieces, hol):
    lens = []
    tot = Fraction(0)
    for (f, p0, p1) in pieces:
        d = p1 - p0
        t = abs(_param_scale(d, hol))
        lens.append(t)
        tot += t
    half = tot / 2
    acc = Fraction(0)
    for (f, p0, p1), t in zip(pieces, lens):
        if t > 0 and acc + t >= half:
            lam = (half - acc) / t
            return canonical_point(S, f, p0 + (p1 - p0) * lam)
        acc += t
    raise SurfaceError("empty connection")


def _crossed_edges(S, pieces):
    out = []
    for i in range(len(pieces) - 1):
        f, p0, p1 = pieces[i]
        for j in range(3):
            lam = on_edge_param(S, f, p1, j)
            if lam is not None and 0 < lam < 1:
                h = 3 * f + j
                h2 = S.opp[h]
                out.append(min(h, h2) if h2 is not None else h)
                break
    return out


def min_edge_length_bound(S):
    """A rational upper bound for the shortest saddle connection length."""
    lmin2 = min(v.norm2() for v in S.vecs)
    return _sqrt_upper(lmin2)


def _sqrt_upper(x2):
    """A rational u with u*u >= x2 (reasonably tight)."""
    num, den = x2.numerator, x2.denominator
    lo = isqrt(den)
    if lo * lo != den:
        lo = max(lo, 1)
    return Fraction(isqrt(num) + 1, lo)


def shortest_connections(S):
    """All saddle connections of minimal length."""
    conns = enumerate_saddle_connections(S, min_edge_length_bound(S))
    lmin2 = min(c.length2 for c in conns)
    return [c for c in conns if c.length2 == lmin2]
