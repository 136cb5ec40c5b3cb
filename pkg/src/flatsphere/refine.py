"""Retriangulation tools: constraint insertion and flat-vertex removal.

``refine_surface`` rebuilds a surface so a given family of pairwise
non-crossing traced segments (and isolated points) becomes part of the edge
skeleton; every original face is retriangulated locally in its own chart, so
the whole computation is plane geometry over the rationals.

``remove_flat_vertices`` deletes unmarked regular (angle 2 pi) vertices by
re-triangulating their star, which keeps saddle-connection enumeration
honest after surgeries.
"""

from __future__ import annotations

from fractions import Fraction

from .geom import Vec, cross, dot, point_in_triangle
from .surface import FlatSurface, SurfaceError, ear_clip
from .trace import on_edge_param


class RefineError(SurfaceError):
    pass


class _LocalTri:
    """Triangulation of a single euclidean triangle in its own plane chart."""

    def __init__(self, corners):
        self.verts = list(corners)      # positions; 0,1,2 are the corners
        self.tris = [(0, 1, 2)]
        self.locked = set()             # frozenset({a,b}) chord edges

    def vid(self, p):
        for i, q in enumerate(self.verts):
            if q == p:
                return i
        return None

    def insert_point(self, p):
        i = self.vid(p)
        if i is not None:
            return i
        vid = len(self.verts)
        self.verts.append(p)
        for ti, (a, b, c) in enumerate(list(self.tris)):
            code = point_in_triangle(p, self.verts[a], self.verts[b],
                                     self.verts[c])
            if code == 0:
                continue
            if code == 2:
                self.tris[ti] = (a, b, vid)
                self.tris.append((b, c, vid))
                self.tris.append((c, a, vid))
                return vid
            # on an edge of this triangle: split the (up to two) incident tris
            for (u, v) in ((a, b), (b, c), (c, a)):
                if _on_open_segment(p, self.verts[u], self.verts[v]):
                    self._split_edge(u, v, vid)
                    return vid
            continue
        raise RefineError("point not inside the face")

    def _split_edge(self, u, v, vid):
        for ti, t in enumerate(list(self.tris)):
            for r in range(3):
                a, b, c = t[r], t[(r + 1) % 3], t[(r + 2) % 3]
                if (a, b) == (u, v) or (a, b) == (v, u):
                    self.tris[ti] = (a, vid, c)
                    self.tris.append((vid, b, c))
                    break

    def _edges(self):
        e = {}
        for ti, (a, b, c) in enumerate(self.tris):
            for (u, v) in ((a, b), (b, c), (c, a)):
                e.setdefault(frozenset((u, v)), []).append(ti)
        return e

    def has_edge(self, a, b):
        k = frozenset((a, b))
        return any(k in _tri_edge_sets(t) for t in self.tris)

    def ensure_edge(self, a, b):
        """Flip interior edges until segment a-b is an edge; then lock it."""
        pa, pb = self.verts[a], self.verts[b]
        guard = 0
        while not self.has_edge(a, b):
            guard += 1
            if guard > 40 * (len(self.verts) ** 2 + 10):
                raise RefineError("constraint insertion did not converge")
            edges = self._edges()
            progressed = False
            for key, tids in edges.items():
                if len(tids) != 2 or key in self.locked:
                    continue
                u, v = tuple(key)
                if not _open_segments_cross(pa, pb, self.verts[u],
                                            self.verts[v]):
                    continue
                if self._flip(key, edges):
                    progressed = True
                    break
            if not progressed:
                raise RefineError("no flippable edge crosses the constraint")
        self.locked.add(frozenset((a, b)))

    def _flip(self, key, edges):
        t1, t2 = edges[key]
        u, v = tuple(key)
        a = [x for x in self.tris[t1] if x not in key][0]
        b = [x for x in self.tris[t2] if x not in key][0]
        # quad a,u,b,v (some cyclic order); flip to diagonal a-b if strictly
        # convex
        pa, pu, pb, pv = (self.verts[a], self.verts[u], self.verts[b],
                          self.verts[v])
        # orient: t1 contains (u,v) or (v,u); normalize so t1 = (a,u,v)-CCW
        if not _ccw(pa, pu, pv):
            u, v = v, u
            pu, pv = pv, pu
        if not (_ccw(pa, pu, pb) and _ccw(pb, pv, pa)):
            return False
        self.tris[t1] = (a, u, b)
        self.tris[t2] = (b, v, a)
        return True


def _tri_edge_sets(t):
    a, b, c = t
    return (frozenset((a, b)), frozenset((b, c)), frozenset((c, a)))


def _ccw(a, b, c):
    return cross(b - a, c - a) > 0


def _on_open_segment(p, a, b):
    d = b - a
    r = p - a
    if cross(d, r) != 0:
        return False
    t = dot(r, d)
    return 0 < t < d.norm2()


def _open_segments_cross(a, b, c, d):
    """Proper interior crossing of open segments (no collinear handling)."""
    d1 = b - a
    d2 = d - c
    den = cross(d1, d2)
    if den == 0:
        return False
    t = cross(c - a, d2) / den
    s = cross(c - a, d1) / den
    return 0 < t < 1 and 0 < s < 1


def refine_surface(S, face_points=None, face_chords=None, keep_marks=True):
    """Retriangulate S so the given points and chords join the skeleton.

    ``face_points``: dict face -> list of (position, tag-or-None).
    ``face_chords``: dict face -> list of ((p, q), tag-or-None); p, q become
    vertices and the open segment p-q becomes a union of edges (the chord
    must not contain other constraint points in its interior).

    Returns (surface, info) where info has:
      - ``tag_class``: tag -> vertex class id in the new surface,
      - ``chord_halfedges``: tag -> list of half-edge ids realizing the chord
        (oriented along p -> q; one entry per sub-edge),
      - ``class_map``: old class id -> new class id.
    """
    face_points = dict(face_points or {})
    face_chords = dict(face_chords or {})

    # collect subdivision points per undirected edge so both sides agree
    edge_points = {}

    def note_edge_point(f, p):
        for i in range(3):
            lam = on_edge_param(S, f, p, i)
            if lam is None or lam == 0 or lam == 1:
                continue
            h = 3 * f + i
            h2 = S.opp[h]
            e = h if h2 is None else min(h, h2)
            lam_e = lam if e == h else 1 - lam
            edge_points.setdefault(e, set()).add(lam_e)

    for f, pts in face_points.items():
        for p, tag in pts:
            note_edge_point(f, p)
    for f, chords in face_chords.items():
        for (p, q), tag in chords:
            note_edge_point(f, p)
            note_edge_point(f, q)

    local = {}

    def local_for(f):
        if f not in local:
            local[f] = _LocalTri(list(S.corner_positions(f)))
        return local[f]

    # distribute edge points to both adjacent faces
    for e, lams in edge_points.items():
        h2 = S.opp[e]
        for lam in lams:
            lt = local_for(e // 3)
            lt.insert_point(S.corner_position(e) + S.vecs[e] * lam)
            if h2 is not None:
                lt2 = local_for(h2 // 3)
                lt2.insert_point(S.corner_position(h2) +
                                 S.vecs[h2] * (1 - lam))

    point_tags = []   # (face, position, tag)
    for f, pts in face_points.items():
        lt = local_for(f)
        for p, tag in pts:
            lt.insert_point(p)
            if tag is not None:
                point_tags.append((f, p, tag))

    chord_specs = []  # (face, p, q, tag)
    for f, chords in face_chords.items():
        lt = local_for(f)
        for (p, q), tag in chords:
            va = lt.insert_point(p)
            vb = lt.insert_point(q)
            lt.ensure_edge(va, vb)
            chord_specs.append((f, p, q, tag))

    # assemble the new surface
    vecs, opp, sign = [], [], []
    he_of = {}          # (face, local vid a, local vid b) -> half-edge id
    for f in range(S.nfaces):
        lt = local.get(f)
        if lt is None:
            lt = _LocalTri(list(S.corner_positions(f)))
            local[f] = lt
        for (a, b, c) in lt.tris:
            base = len(vecs)
            pa, pb, pc = lt.verts[a], lt.verts[b], lt.verts[c]
            if not _ccw(pa, pb, pc):
                raise RefineError("local triangulation flipped orientation")
            for (u, v, pu, pv) in ((a, b, pa, pb), (b, c, pb, pc),
                                   (c, a, pc, pa)):
                vecs.append(pv - pu)
                opp.append(None)
                sign.append(1)
                he_of[(f, u, v)] = len(vecs) - 1

    # internal gluings within each original face
    for (f, u, v), h in he_of.items():
        if (f, v, u) in he_of and opp[h] is None:
            h2 = he_of[(f, v, u)]
            opp[h], opp[h2] = h2, h
            sign[h] = sign[h2] = 1

    # gluings across original edges
    for f in range(S.nfaces):
        lt = local[f]
        for (fq, u, v), h in list(he_of.items()):
            if fq != f or opp[h] is not None:
                continue
            pu, pv = lt.verts[u], lt.verts[v]
            placed = False
            for i in range(3):
                lu = on_edge_param(S, f, pu, i)
                lv = on_edge_param(S, f, pv, i)
                if lu is None or lv is None:
                    continue
                ho = 3 * f + i
                h2o = S.opp[ho]
                if h2o is None:
                    placed = True  # stays boundary
                    break
                f2 = h2o // 3
                lt2 = local[f2]
                qu = S.corner_position(h2o) + S.vecs[h2o] * (1 - lu)
                qv = S.corner_position(h2o) + S.vecs[h2o] * (1 - lv)
                a2 = lt2.vid(qu)
                b2 = lt2.vid(qv)
                if a2 is None or b2 is None:
                    raise RefineError("edge subdivisions disagree")
                h2 = he_of[(f2, b2, a2)]
                opp[h] = h2
                opp[h2] = h
                sign[h] = sign[h2] = S.sign[ho]
                placed = True
                break
            if not placed:
                raise RefineError("unmatched sub-edge")

    marked_corners = []
    out = FlatSurface(vecs, opp, sign, ())
    # carry marks: classes containing a corner at an old marked position
    class_map = {}
    for oc in range(len(S.classes)):
        c0 = S.classes[oc][0]
        f0 = c0 // 3
        p0 = S.corner_position(c0)
        lv = local[f0].vid(p0)
        nh = he_of[(f0, lv, _second_vertex(local[f0], lv))]
        class_map[oc] = out.class_of[nh]
    marks = set()
    if keep_marks:
        for oc in S.marked:
            marks.add(class_map[oc])

    info = {
        "tag_class": {},
        "chord_halfedges": {},
        "class_map": class_map,
        "boundary_map": {},
    }
    for f in range(S.nfaces):
        for i in range(3):
            ho = 3 * f + i
            if S.opp[ho] is not None:
                continue
            subs = []
            for (fq, u, v), h in he_of.items():
                if fq != f or opp[h] is not None:
                    continue
                pu, pv = local[f].verts[u], local[f].verts[v]
                lu = on_edge_param(S, f, pu, i)
                lv = on_edge_param(S, f, pv, i)
                if lu is None or lv is None:
                    continue
                subs.append((lu, h))
            subs.sort()
            info["boundary_map"][ho] = [h for _, h in subs]
    for f, p, tag in point_tags:
        lv = local[f].vid(p)
        nh = he_of[(f, lv, _second_vertex(local[f], lv))]
        info["tag_class"][tag] = out.class_of[nh]
    for f, p, q, tag in chord_specs:
        lt = local[f]
        va, vb = lt.vid(p), lt.vid(q)
        path = _edge_path(lt, va, vb)
        hes = []
        for a, b in zip(path, path[1:]):
            h = he_of.get((f, a, b))
            if h is None:
                # a chord along an original edge exists in one direction only
                h = he_of[(f, b, a)]
            hes.append(h)
        info["chord_halfedges"].setdefault(tag, []).extend(hes)

    if marks:
        out = out.with_marks(marks)
    return out, info


def _second_vertex(lt, v):
    for t in lt.tris:
        if v in t:
            i = t.index(v)
            return t[(i + 1) % 3]
    raise RefineError("isolated vertex")


def _edge_path(lt, va, vb):
    """Vertices along the straight locked chord from va to vb."""
    pa, pb = lt.verts[va], lt.verts[vb]
    d = pb - pa
    onseg = []
    for i, p in enumerate(lt.verts):
        r = p - pa
        if cross(d, r) == 0:
            t = dot(r, d)
            if 0 <= t <= d.norm2():
                onseg.append((t, i))
    onseg.sort()
    return [i for _, i in onseg]


# ---------------------------------------------------------------------------
# Flat vertex removal


def remove_flat_vertices(S, protect=()):
    """Delete unmarked regular (2 pi) interior vertices by star re-meshing.

    Never removes marked classes, classes in ``protect`` (given as class
    ids), boundary classes, or the last remaining vertex class.
    """
    return remove_flat_vertices_tracked(S, protect)[0]


def remove_flat_vertices_tracked(S, protect=()):
    """Like remove_flat_vertices; also returns the class map old -> new
    for all surviving classes."""
    protect = set(protect)
    total = {c: c for c in range(len(S.classes))}
    while True:
        target = None
        for cid in range(len(S.classes)):
            if S.is_boundary_class[cid] or cid in S.marked or cid in protect:
                continue
            if S.angle_pi[cid] == 2 and len(S.classes) > 1:
                target = cid
                break
        if target is None:
            return S, total
        S, cmap = _remove_one_flat_vertex(S, target)
        protect = {cmap[c] for c in protect if c in cmap}
        total = {old: cmap[mid] for old, mid in total.items() if mid in cmap}


def flip_edge(S, h):
    """Flip the interior edge {h, opp(h)}.

    Returns (surface, corner_map) with corner_map sending old corners to new
    ones, or None when the surrounding quad is not strictly convex (the flip
    would create flipped or degenerate triangles).
    """
    h2 = S.opp[h]
    if h2 is None or h2 // 3 == h // 3:
        return None
    s = S.sign[h]
    a, b = S.nxt(h), S.prv(h)
    c, d = S.nxt(h2), S.prv(h2)
    A, B = S.vecs[a], S.vecs[b]
    C, D = S.vecs[c] * s, S.vecs[d] * s
    N = B + C            # new diagonal, in face(h)'s frame
    if not (cross(N, D) > 0 and cross(B, N) > 0):
        return None
    vecs = list(S.vecs)
    opp = list(S.opp)
    sign = list(S.sign)
    moves = {a: S.prv(h), d: S.nxt(h), b: S.nxt(h2), c: S.prv(h2)}
    frame = {a: 1, c: 1, b: s, d: s}   # frame change factor per moved edge
    oldvec = {a: A, d: D, b: B * s, c: S.vecs[c]}
    oldopp = {x: S.opp[x] for x in (a, b, c, d)}
    vecs[h] = N
    vecs[h2] = N * (-s)
    sign[h] = sign[h2] = s
    opp[h], opp[h2] = h2, h
    for x in (a, b, c, d):
        nx = moves[x]
        vecs[nx] = oldvec[x]
        px = oldopp[x]
        newsig = S.sign[x] * frame[x] * frame.get(px, 1)
        sign[nx] = newsig
        if px in moves:
            opp[nx] = moves[px]
        else:
            opp[nx] = px
            if px is not None:
                opp[px] = nx
                sign[px] = newsig
    out = FlatSurface(vecs, opp, sign, ())
    # corner correspondence: quad corners Q0..Q3 re-anchored
    corner_map = {h: S.prv(h2), a: S.prv(h), b: h,
                  h2: S.prv(h), c: S.prv(h2), d: h2}

    def cm(corner):
        return corner_map.get(corner, corner)

    marks = {out.class_of[cm(S.classes[oc][0])] for oc in S.marked}
    if marks:
        out = out.with_marks(marks)
    return out, cm


def _remove_one_flat_vertex(S, cid, budget=40):
    corners = S.classes[cid]
    # loop edges at the vertex obstruct the star re-mesh; flip them away,
    # flipping other incident edges first when a loop edge is stuck
    if any(S.class_of[S.nxt(c)] == cid for c in corners):
        if budget <= 0:
            raise RefineError("unflippable loop edges at a flat vertex")
        candidates = [c for c in corners if S.class_of[S.nxt(c)] == cid]
        candidates += [c for c in corners if S.class_of[S.nxt(c)] != cid]
        candidates += [S.prv(c) for c in corners]
        for c in candidates:
            if S.opp[c] is None:
                continue
            res = flip_edge(S, c)
            if res is None:
                continue
            out, cm = res
            cmap = {oc: out.class_of[cm(S.classes[oc][0])]
                    for oc in range(len(S.classes))}
            out2, cmap2 = _remove_one_flat_vertex(out, cmap[cid],
                                                  budget - 1)
            return out2, {oc: cmap2[cmap[oc]] for oc in cmap
                          if cmap[oc] in cmap2}
        raise RefineError("unflippable loop edges at a flat vertex")

    star_faces = {c // 3 for c in corners}
    # develop the link polygon around the vertex
    link_pts = []
    outer = []         # (developed sign, outer half-edge) per corner
    s_acc = 1
    c = corners[0]
    for _ in corners:
        link_pts.append(S.vecs[c] * s_acc)
        outer.append((s_acc, S.nxt(c)))
        e = S.prv(c)
        s_acc *= S.sign[e]
        c2 = S.opp[e]
        if c2 is None:
            raise RefineError("boundary star")
        c = c2
    if c != corners[0]:
        raise RefineError("star walk did not close")
    n = len(link_pts)
    tris = ear_clip(link_pts) if n > 3 else [(0, 1, 2)]

    face_map = {}
    vecs, opp, sign = [], [], []
    for f in range(S.nfaces):
        if f in star_faces:
            continue
        face_map[f] = len(vecs) // 3
        for r in range(3):
            h = 3 * f + r
            vecs.append(S.vecs[h])
            opp.append(None)
            sign.append(S.sign[h])

    def new_he(h):
        return 3 * face_map[h // 3] + h % 3

    he_by_pair = {}
    for (a, b, cc) in tris:
        base = len(vecs)
        for k, (u, v) in enumerate(((a, b), (b, cc), (cc, a))):
            vecs.append(link_pts[v] - link_pts[u])
            opp.append(None)
            sign.append(1)
            he_by_pair[(u, v)] = base + k

    # internal diagonals of the re-meshed star
    for (u, v), h in he_by_pair.items():
        if (v, u) in he_by_pair and opp[h] is None:
            h2 = he_by_pair[(v, u)]
            opp[h], opp[h2] = h2, h
            sign[h] = sign[h2] = 1

    # surviving old gluings
    for f in range(S.nfaces):
        if f in star_faces:
            continue
        for r in range(3):
            h = 3 * f + r
            h2 = S.opp[h]
            if h2 is None or h2 // 3 in star_faces:
                continue
            opp[new_he(h)] = new_he(h2)

    # link sides: side j runs from link vertex j to j+1 and replaces the old
    # outer half-edge nxt(corner_j)
    for j in range(n):
        h_new = he_by_pair[(j, (j + 1) % n)]
        if opp[h_new] is not None:
            continue
        s_j, h_old = outer[j]
        partner = S.opp[h_old]
        if partner is None:
            continue
        if partner // 3 in star_faces:
            jj = next(k for k in range(n) if outer[k][1] == partner)
            h2_new = he_by_pair[(jj, (jj + 1) % n)]
            sg = s_j * S.sign[h_old] * outer[jj][0]
            opp[h_new], opp[h2_new] = h2_new, h_new
            sign[h_new] = sign[h2_new] = sg
        else:
            h2 = new_he(partner)
            sg = S.sign[h_old] * s_j
            opp[h_new], opp[h2] = h2, h_new
            sign[h_new] = sign[h2] = sg

    out = FlatSurface(vecs, opp, sign, ())
    cmap = {}
    for oc in range(len(S.classes)):
        if oc == cid:
            continue
        rep = None
        for corner in S.classes[oc]:
            if corner // 3 not in star_faces:
                rep = new_he(corner)
                break
        if rep is None:
            for j in range(n):
                if S.class_of[outer[j][1]] == oc:
                    rep = he_by_pair[(j, (j + 1) % n)]
                    break
        if rep is None:
            raise RefineError("lost a vertex class while removing a flat one")
        cmap[oc] = out.class_of[rep]
    marks = {cmap[c] for c in S.marked if c in cmap}
    if marks:
        out = out.with_marks(marks)
    return out, cmap


