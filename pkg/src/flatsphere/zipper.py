"""Rectangle-family rebuild for non-embedded suspension data.

Given a suspension datum whose broken lines cross, the surface is assembled
from one rectangle per index pair: widths come from the datum's real parts,
heights from the first-return times of a *suitable* datum with the same
imaginary parts, and the vertical-wall identifications are read off from the
suitable surface by tracing the strip boundaries.  Those identifications only
depend on the combinatorics and the imaginary parts, so they transfer
verbatim to the new widths.

Rectangle chart conventions: the pair {i, j = sigma(i)} with base i = min
gets the chart [0, w] x [0, h], y being the distance flowed away from the
transversal.  Top-based charts are upright; bottom-based charts are rotated
by a half-turn, so every chart is positively oriented.
"""

from __future__ import annotations

from fractions import Fraction

from .geom import Vec, cross
from .surface import SurfaceError, build_surface
from .trace import (Transversal, first_return_system, germs_at_class,
                    germ_rotate_pi, first_germ_rotating, trace_segment,
                    canonical_point, on_edge_param, vertex_at, edge_point,
                    UP, DOWN)


class ZipperError(SurfaceError):
    pass


def _origin_transversal(S2, d2, width):
    """Construction segment reproducing the datum's return system."""
    target = {i + 1: d2.sigma[i] + 1 for i in range(d2.n)}
    for cid in range(len(S2.classes)):
        for corner, kind in germs_at_class(S2, cid, Vec(1, 0)):
            try:
                x = Transversal.from_corner(S2, corner, width)
                rs = first_return_system(S2, x)
            except SurfaceError:
                continue
            if rs.l != d2.l or rs.m != d2.m or rs.sigma != target:
                continue
            if any(rs.interval(i + 1)[1] - rs.interval(i + 1)[0]
                   != d2.zeta[i].x for i in range(d2.n)):
                continue
            return x, rs, corner
    raise ZipperError("no construction segment reproduces the datum")


def _canonical_point_and_updir(S, f, pm, d):
    """Canonical key of pm plus the sign of d seen in the canonical chart."""
    if vertex_at(S, f, pm) is not None:
        raise ZipperError("wall segment midpoint hit a vertex")
    reps = [(f, pm, d)]
    for i in range(3):
        lam = on_edge_param(S, f, pm, i)
        if lam is None or lam in (0, 1):
            continue
        h = 3 * f + i
        h2 = S.opp[h]
        if h2 is None:
            continue
        reps.append((h2 // 3, edge_point(S, h2, 1 - lam), d * S.sign[h]))
    reps.sort(key=lambda t: (t[0], t[1].x, t[1].y))
    f0, p0, d0 = reps[0]
    return ("P", f0, p0.x, p0.y), (1 if d0.y > 0 else -1)


def _key_reps(S, key):
    _, f0, x0, y0 = key
    p0 = Vec(x0, y0)
    reps = [(f0, p0)]
    for i in range(3):
        lam = on_edge_param(S, f0, p0, i)
        if lam is None or lam in (0, 1):
            continue
        h = 3 * f0 + i
        h2 = S.opp[h]
        if h2 is None:
            continue
        reps.append((h2 // 3, edge_point(S, h2, 1 - lam)))
    return reps


def _trace_wall(S2, start, chart_dir, turn_ccw, budget, xend_key):
    """Trace one rectangle wall on the suitable surface.

    Returns a list of sub-segments (y0, y1, midkey, middir, class_tag_at_y0)
    with y the distance from the transversal; walls turn by pi at singular
    points and break (without turning) when passing the transversal's right
    end.
    """
    y = Fraction(0)
    runs = []               # (y_at_run_start, [(f, p0, p1), ...])
    tags = {}
    if start[0] == "corner":
        tags[Fraction(0)] = S2.class_of[start[1]]
    state, d = start, chart_dir
    guard = 0
    while y < budget:
        guard += 1
        if guard > 10000:
            raise ZipperError("wall trace did not terminate")
        tr = trace_segment(S2, state, d, budget=budget - y)
        if tr.end_kind not in ("vertex", "budget"):
            raise ZipperError("wall trace interrupted: %s" % tr.end_kind)
        runs.append((y, list(tr.pieces)))
        y = y + tr.vertical_travel()
        if tr.end_kind == "budget":
            if y != budget:
                raise ZipperError("wall trace stopped early")
            break
        corner = tr.end_data
        tags[y] = S2.class_of[corner]
        if y == budget:
            break
        last = tr.pieces[-1]
        d_arr = Vec(0, 1) if (last[2] - last[1]).y > 0 else Vec(0, -1)
        c2, d2 = germ_rotate_pi(S2, corner, -d_arr, ccw=turn_ccw)
        state, d = ("corner", c2), d2
    if y != budget:
        raise ZipperError("wall height mismatch")

    breaks = set(tags)
    breaks.add(Fraction(0))
    breaks.add(budget)
    if xend_key is not None:
        key_reps = _key_reps(S2, xend_key)
        for y0, run in runs:
            yy = y0
            for (f, p0, p1) in run:
                dy = abs(p1.y - p0.y)
                if dy == 0:
                    continue
                for (rf, rp) in key_reps:
                    if rf != f:
                        continue
                    r = rp - p0
                    dd = p1 - p0
                    if cross(dd, r) != 0:
                        continue
                    off = abs(rp.y - p0.y)
                    if 0 <= off <= dy and abs(rp.y - p1.y) <= dy:
                        breaks.add(yy + off)
                yy += dy
    breaks = sorted(b for b in breaks if 0 <= b <= budget)

    segs = []
    for (b0, b1) in zip(breaks, breaks[1:]):
        if b0 == b1:
            continue
        midkey, middir = _locate_at_height(S2, runs, (b0 + b1) / 2)
        segs.append((b0, b1, midkey, middir, tags.get(b0)))
    return segs, tags


def _locate_at_height(S2, runs, y):
    for y0, run in runs:
        yy = y0
        for (f, p0, p1) in run:
            dy = abs(p1.y - p0.y)
            if dy == 0:
                continue
            if yy <= y <= yy + dy:
                lam = (y - yy) / dy
                pm = p0 + (p1 - p0) * lam
                d = Vec(0, 1) if (p1 - p0).y > 0 else Vec(0, -1)
                return _canonical_point_and_updir(S2, f, pm, d)
            yy += dy
    raise ZipperError("height not found on wall trace")


def rebuild_with_widths(d, d2):
    """Surface of datum ``d`` using the vertical data of suitable ``d2``."""
    from .suspension import zr_easy
    from .refine import remove_flat_vertices

    S2 = zr_easy(d2)
    n, l = d.n, d.l
    width2 = sum(v.x for v in d2.zeta[:l])
    x2, rs2, corner_x = _origin_transversal(S2, d2, width2)

    fR, pR = x2.point_at(x2.length)
    xend_key = canonical_point(S2, fR, pR)
    if xend_key[0] == "V":
        xend_key = None

    old_a = {i: rs2.interval(i + 1)[0] for i in range(n)}
    old_b = {i: rs2.interval(i + 1)[1] for i in range(n)}
    new_a, new_b = {}, {}
    acc = Fraction(0)
    for i in range(l):
        new_a[i] = acc
        acc += d.zeta[i].x
        new_b[i] = acc
    W = acc
    acc = Fraction(0)
    for j in range(l, n):
        new_a[j] = acc
        acc += d.zeta[j].x
        new_b[j] = acc
    if acc != W:
        raise ZipperError("top and bottom total widths disagree")

    pairs = d.pairs()
    rect_of = {p: k for k, p in enumerate(pairs)}

    # --- vertical walls -----------------------------------------------------
    walls = []   # (rect, side "L"/"R", segments)
    mark_positions = []   # (rect, side, height) at marked suitable-classes
    for (i, j) in pairs:
        k = rect_of[(i, j)]
        h = rs2.heights[i + 1]
        up = i < l
        dsurf = UP if up else DOWN
        for side in ("L", "R"):
            a_old = old_a[i] if side == "L" else old_b[i]
            hug_ccw = (side == "L") == up
            if a_old == 0:
                tgt = UP if up else DOWN
                c0, d0 = first_germ_rotating(S2, corner_x, Vec(1, 0), tgt,
                                             ccw=up)
                start, dd = ("corner", c0), d0
            else:
                f, p = x2.point_at(a_old)
                par = x2.parity_at(a_old)
                start, dd = ("point", f, p), dsurf * par
            segs, tags = _trace_wall(S2, start, dd, hug_ccw, h, xend_key)
            walls.append((k, side, segs))
            for yy, cls in tags.items():
                if cls in S2.marked:
                    mark_positions.append((k, side, yy))

    groups = {}
    for (k, side, segs) in walls:
        for (y0, y1, midkey, middir, tag) in segs:
            groups.setdefault(midkey, []).append((k, side, y0, y1, middir))
    vmatches = []
    for key, entries in groups.items():
        if len(entries) != 2:
            raise ZipperError("wall segment matched %d times" % len(entries))
        (ka, sa, a0, a1, da), (kb, sb, b0, b1, db) = entries
        if a1 - a0 != b1 - b0:
            raise ZipperError("matched wall segments differ in length")
        same = (da == db)
        if ({sa, sb} == {"L", "R"}) != same:
            raise ZipperError("wall orientation conventions violated")
        vmatches.append(((ka, sa, a0, a1), (kb, sb, b0, b1), same))

    # --- horizontal banks ----------------------------------------------------
    # occupancy record: (lo, hi, rect, edge, x_at_lo, slope)
    uppers, lowers = [], []
    for (i, j) in pairs:
        k = rect_of[(i, j)]
        par = rs2.flips[i + 1]
        w = new_b[i] - new_a[i]
        if i < l:
            uppers.append((new_a[i], new_b[i], k, "bottom", Fraction(0), 1))
        else:
            lowers.append((new_a[i], new_b[i], k, "bottom", w, -1))
        if j < l:
            if par != -1:
                raise ZipperError("top-top pair with preserving parity")
            uppers.append((new_a[j], new_b[j], k, "top",
                           new_b[j] - new_a[j], -1))
        elif i < l:
            if par != 1:
                raise ZipperError("mixed pair with reversing parity")
            lowers.append((new_a[j], new_b[j], k, "top", Fraction(0), 1))
        else:
            if par != -1:
                raise ZipperError("bottom-bottom pair with preserving parity")
            lowers.append((new_a[j], new_b[j], k, "top", Fraction(0), 1))

    for bank in (uppers, lowers):
        ivs = sorted((a, b) for (a, b, *_r) in bank)
        if ivs[0][0] != 0 or ivs[-1][1] != W or any(
                y != x for (_, y), (x, _2) in zip(ivs, ivs[1:])):
            raise ZipperError("bank does not tile the segment")

    events = sorted({v for (a, b, *_r) in uppers + lowers for v in (a, b)})
    hmatches = []
    for (c, e) in zip(events, events[1:]):
        u = [o for o in uppers if o[0] <= c and e <= o[1]]
        lo = [o for o in lowers if o[0] <= c and e <= o[1]]
        if len(u) != 1 or len(lo) != 1:
            raise ZipperError("ambiguous bank occupancy")
        hmatches.append((c, e, u[0], lo[0]))

    # --- assemble rectangle polygons ----------------------------------------
    xcuts = {k: {"bottom": set(), "top": set()} for k in rect_of.values()}
    for (c, e, u, lo) in hmatches:
        for (a, b, k, edge, x0, sl) in (u, lo):
            xcuts[k][edge].add(x0 + sl * (c - a))
            xcuts[k][edge].add(x0 + sl * (e - a))
    ycuts = {k: {"L": set(), "R": set()} for k in rect_of.values()}
    for ((ka, sa, a0, a1), (kb, sb, b0, b1), same) in vmatches:
        ycuts[ka][sa].update((a0, a1))
        ycuts[kb][sb].update((b0, b1))

    polys, sidemaps = [], []
    for (i, j) in pairs:
        k = rect_of[(i, j)]
        w = d.zeta[i].x
        h = rs2.heights[i + 1]
        bot = sorted(xcuts[k]["bottom"] | {Fraction(0), w})
        top = sorted(xcuts[k]["top"] | {Fraction(0), w})
        left = sorted(ycuts[k]["L"] | {Fraction(0), h})
        right = sorted(ycuts[k]["R"] | {Fraction(0), h})
        if bot[0] < 0 or bot[-1] > w or top[0] < 0 or top[-1] > w:
            raise ZipperError("subdivision outside the rectangle")
        pts = [Vec(x, 0) for x in bot[:-1]]
        pts += [Vec(w, y) for y in right[:-1]]
        pts += [Vec(x, h) for x in reversed(top[1:])]
        pts += [Vec(Fraction(0), y) for y in reversed(left[1:])]
        smap = {}
        for sidx in range(len(pts)):
            p, q = pts[sidx], pts[(sidx + 1) % len(pts)]
            if p.y == 0 and q.y == 0:
                smap[("bottom", min(p.x, q.x))] = sidx
            elif p.y == h and q.y == h:
                smap[("top", min(p.x, q.x))] = sidx
            elif p.x == 0 and q.x == 0:
                smap[("L", min(p.y, q.y))] = sidx
            elif p.x == w and q.x == w:
                smap[("R", min(p.y, q.y))] = sidx
            else:
                raise ZipperError("non-axis-aligned rectangle side")
        polys.append(pts)
        sidemaps.append(smap)

    def side_vec(k, sidx):
        pts = polys[k]
        return pts[(sidx + 1) % len(pts)] - pts[sidx]

    pairings = []
    for ((ka, sa, a0, a1), (kb, sb, b0, b1), same) in vmatches:
        cuts_a = sorted(y for y in (ycuts[ka][sa] | {a0, a1})
                        if a0 <= y <= a1)
        for (u0, u1) in zip(cuts_a, cuts_a[1:]):
            v0 = b0 + (u0 - a0) if same else b1 - (u1 - a0)
            ha = (ka, sidemaps[ka][(sa, u0)])
            hb = (kb, sidemaps[kb][(sb, v0)])
            tag = "T" if {sa, sb} == {"L", "R"} else "F"
            pairings.append((ha, hb, tag))
    for (c, e, u, lo) in hmatches:
        (a, b, ku, edgeu, x0u, slu) = u
        (a2, b2, kl, edgel, x0l, sll) = lo
        xu = min(x0u + slu * (c - a), x0u + slu * (e - a))
        xl = min(x0l + sll * (c - a2), x0l + sll * (e - a2))
        ha = (ku, sidemaps[ku][(edgeu, xu)])
        hb = (kl, sidemaps[kl][(edgel, xl)])
        va, vb = side_vec(*ha), side_vec(*hb)
        if vb == -va:
            tag = "T"
        elif vb == va:
            tag = "F"
        else:
            raise ZipperError("incompatible horizontal match")
        pairings.append((ha, hb, tag))

    seen = set()
    final = []
    for (ha, hb, tag) in pairings:
        key = frozenset((ha, hb))
        if key in seen:
            continue
        if ha == hb:
            raise ZipperError("side matched to itself")
        seen.add(key)
        final.append((ha, hb, tag))

    marked_points = []
    for (k, side, yy) in mark_positions:
        w = d.zeta[pairs[k][0]].x
        xpos = Fraction(0) if side == "L" else w
        target = Vec(xpos, yy)
        idx = next(t for t, pt in enumerate(polys[k]) if pt == target)
        marked_points.append((k, idx))

    S = build_surface(polys, final, marked_points=marked_points)
    S = remove_flat_vertices(S)
    if S.stratum_signature() != S2.stratum_signature():
        raise ZipperError("rebuild changed the stratum: %s vs %s"
                          % (S.stratum_signature(), S2.stratum_signature()))
    return S
