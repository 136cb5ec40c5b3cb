"""Isometry-complete canonical forms for half-translation surfaces.

Two surfaces get the same code exactly when they are isometric through maps
that are locally z -> +-z + c (so rotations are not quotiented out).  The code
is computed from the Delaunay cell decomposition of the flat metric: flip to a
(weak) Delaunay triangulation, merge the triangles across exactly-cocircular
edges into convex inscribed cells -- the cell complex is metric-intrinsic, no
cocircular tie-breaking needed -- then take the lexicographically smallest
development over all base boundary edges and both global signs.

Unmarked regular (2 pi) vertices are scrubbed first so the code does not
depend on leftover construction artifacts.
"""

from __future__ import annotations

from fractions import Fraction

from .geom import Vec, cross
from .surface import FlatSurface, SurfaceError
from .refine import flip_edge, remove_flat_vertices


def _incircle(pa, pb, pc, pd):
    """> 0 iff pd is strictly inside the circumcircle of CCW (pa, pb, pc)."""
    ax, ay = pa.x - pd.x, pa.y - pd.y
    bx, by = pb.x - pd.x, pb.y - pd.y
    cx, cy = pc.x - pd.x, pc.y - pd.y
    a2 = ax * ax + ay * ay
    b2 = bx * bx + by * by
    c2 = cx * cx + cy * cy
    return (ax * (by * c2 - b2 * cy)
            - ay * (bx * c2 - b2 * cx)
            + a2 * (bx * cy - by * cx))


def _edge_incircle(S, h):
    """Incircle sign for the quad around interior edge h (None on boundary)."""
    h2 = S.opp[h]
    if h2 is None:
        return None
    s = S.sign[h]
    q2 = S.corner_position(h)
    q0 = q2 + S.vecs[h]
    q1 = q0 + S.vecs[S.nxt(h)]
    q3 = q2 + S.vecs[S.nxt(h2)] * s
    return _incircle(q2, q0, q1, q3)


def delaunay(S, max_rounds=None):
    """Flip to a weakly Delaunay triangulation (exact, terminating)."""
    ne = len(S.vecs)
    guard = max_rounds if max_rounds is not None else 30 * ne * ne + 1000
    count = 0
    while True:
        flipped = False
        for h in range(len(S.vecs)):
            h2 = S.opp[h]
            if h2 is None or h2 < h:
                continue
            v = _edge_incircle(S, h)
            if v is not None and v > 0:
                res = flip_edge(S, h)
                if res is None:
                    raise SurfaceError(
                        "non-Delaunay edge is not flippable; degenerate data")
                S, _ = res
                flipped = True
                count += 1
                if count > guard:
                    raise SurfaceError("Delaunay flipping did not terminate")
                break
        if not flipped:
            return S


def _cell_partition(S):
    """Union faces across exactly-cocircular edges (never a cell with itself).

    Returns (cell_of, merged): cell label per face and the set of half-edges
    interior to a cell."""
    parent = list(range(S.nfaces))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    merged = set()
    self_skip = False
    changed = True
    while changed:
        changed = False
        for h in range(len(S.vecs)):
            h2 = S.opp[h]
            if h2 is None or h2 < h or h in merged:
                continue
            v = _edge_incircle(S, h)
            if v == 0:
                a, b = find(h // 3), find(h2 // 3)
                if a != b:
                    parent[a] = b
                    merged.add(h)
                    merged.add(h2)
                    changed = True
                else:
                    self_skip = True
    return [find(f) for f in range(S.nfaces)], merged, self_skip


def _cell_boundary(S, merged, b0):
    """Boundary half-edges of b0's cell, walked CCW starting at b0."""
    out = []
    cur = b0
    guard = 0
    while True:
        out.append(cur)
        guard += 1
        if guard > len(S.vecs) + 3:
            raise SurfaceError("cell boundary walk did not close")
        y = S.nxt(cur)
        while y in merged:
            y = S.nxt(S.opp[y])
        cur = y
        if cur == b0:
            return out


def _develop_cell(S, merged, boundary):
    """Vectors of the cell's boundary edges in the frame of boundary[0].

    Walks the cell's interior gluings, multiplying directions by the signs.
    """
    frame = {boundary[0] // 3: 1}
    stack = [boundary[0] // 3]
    while stack:
        f = stack.pop()
        for r in range(3):
            h = 3 * f + r
            if h not in merged:
                continue
            f2 = S.opp[h] // 3
            if f2 not in frame:
                frame[f2] = frame[f] * S.sign[h]
                stack.append(f2)
    return [S.vecs[h] * frame[h // 3] for h in boundary]


def _encode(S, cell_of, merged, b0, g, marked):
    """Developed code of the cell complex from base boundary edge b0."""
    cell_entry = {}     # cell root-face -> (order index, boundary list, sign)
    order = []
    queue = [(b0, g)]
    records = []
    boundary_index = {}   # half-edge -> (cell order idx, offset)
    while queue:
        entry, sgn = queue.pop(0)
        cell = cell_of[entry // 3]
        if cell in cell_entry:
            continue
        boundary = _cell_boundary(S, merged, entry)
        vectors = _develop_cell(S, merged, boundary)
        idx = len(order)
        cell_entry[cell] = (idx, boundary, sgn)
        order.append(cell)
        for off, h in enumerate(boundary):
            boundary_index[h] = (idx, off)
        rec = []
        for off, (h, v) in enumerate(zip(boundary, vectors)):
            vv = v * sgn
            start_marked = 1 if S.class_of[h] in marked else 0
            rec.append((vv.x, vv.y, start_marked))
            h2 = S.opp[h]
            if h2 is not None and cell_of[h2 // 3] not in cell_entry:
                # propagate the development sign across the gluing
                fsign = _frame_sign_of(S, cell_of, boundary, vectors, h)
                queue.append((h2, sgn * fsign * S.sign[h]))
        records.append((len(boundary), tuple(rec)))
    # second pass: adjacency table; the gluing derivative is determined by
    # the developed edge vectors, so only the combinatorics is recorded
    adj = []
    for cell in order:
        idx, boundary, sgn = cell_entry[cell]
        row = []
        for h in boundary:
            h2 = S.opp[h]
            if h2 is None:
                row.append((-1, -1))
            else:
                ci, off = boundary_index[h2]
                row.append((ci, off))
        adj.append(tuple(row))
    return tuple((records[i][0], records[i][1], adj[i])
                 for i in range(len(order)))


def _frame_sign_of(S, cell_of, boundary, vectors, h):
    """Sign of the development frame at h's face within its cell."""
    i = boundary.index(h)
    v = vectors[i]
    raw = S.vecs[h]
    if v == raw:
        return 1
    if v == -raw:
        return -1
    raise SurfaceError("development inconsistency")


def canonical_form(S: FlatSurface):
    """A hashable code equal for two surfaces iff they are isometric.

    The isometries considered preserve the half-translation structure
    (derivative +-1); rotations are not quotiented out.  Marked points are
    part of the data; unmarked regular vertices are not.
    """
    if S._canonical is not None:
        return S._canonical
    S1 = remove_flat_vertices(S)
    S1 = delaunay(S1)
    cell_of, merged, self_skip = _cell_partition(S1)
    if self_skip:
        # a cocircular edge joins a cell to itself: the cell merge would not
        # be presentation-independent, so canonicalize over the whole orbit
        # of cocircular flips with plain triangle-level codes instead
        best = _orbit_code(S1)
    else:
        marked = S1.marked
        best = None
        for h in range(len(S1.vecs)):
            if h in merged:
                continue  # interior to a cell
            for g in (1, -1):
                code = _encode(S1, cell_of, merged, h, g, marked)
                if best is None or code < best:
                    best = code
    S._canonical = best
    return best


def _triangle_code(S):
    best = None
    cell_of = list(range(S.nfaces))
    for h in range(len(S.vecs)):
        for g in (1, -1):
            code = _encode(S, cell_of, frozenset(), h, g, S.marked)
            if best is None or code < best:
                best = code
    return best


def _orbit_code(S, cap=20000):
    """Minimum triangle-level code over all weak-Delaunay triangulations.

    These are connected under flips of exactly-cocircular edges, so a BFS
    orbit enumeration is exhaustive.
    """
    start = _triangle_code(S)
    seen = {start: S}
    queue = [S]
    best = start
    while queue:
        cur = queue.pop()
        for h in range(len(cur.vecs)):
            h2 = cur.opp[h]
            if h2 is None or h2 < h:
                continue
            if _edge_incircle(cur, h) != 0:
                continue
            res = flip_edge(cur, h)
            if res is None:
                continue
            nxt, _ = res
            code = _triangle_code(nxt)
            if code not in seen:
                if len(seen) > cap:
                    raise SurfaceError("cocircular flip orbit too large")
                seen[code] = nxt
                queue.append(nxt)
                if code < best:
                    best = code
    return best


def isometric(S1, S2) -> bool:
    return canonical_form(S1) == canonical_form(S2)
