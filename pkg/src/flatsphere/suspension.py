"""Suspension data over a fixed-point-free involution and its surfaces.

A suspension datum is (sigma, l, zeta): an involution without fixed points of
{0..n-1}, a split index l (the first l entries describe the top broken line,
the rest the bottom one), and complex side vectors zeta.  Conditions:

  (1) zeta[i] == zeta[sigma[i]]
  (2) Re zeta[i] > 0                                  (standard variant)
  (3) Im(zeta[0] + .. + zeta[i]) > 0 for i < l-1
  (4) Im(zeta[l] + .. + zeta[l+j]) < 0 for j < m-1
  (5) sum(top) == sum(bottom)

The prime-vertical variant replaces (2) by: Re zeta[0] == 0 and Re > 0 away
from {0, sigma[0]} (the first top vector is the unique vertical pair).

``zr_construct`` builds the flat surface: directly when the two broken lines
bound an embedded polygon, otherwise through the rectangle transfer in
``zipper`` using a suitable datum with the same imaginary parts.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .geom import Vec, cross
from .surface import (FlatSurface, SurfaceError, NotEmbedded, build_surface,
                      validate_simple_polygon)
from .trace import (Transversal, first_return_system, germs_at_class,
                    trace_segment, vertical_separatrix_traces, canonical_point,
                    SegmentHitsSingularity, NonReturningOrbit, UP, DOWN)


class NotInvolution(SurfaceError):
    pass


class FixedPoint(SurfaceError):
    pass


class SuspensionInvalid(SurfaceError):
    def __init__(self, condition, msg=""):
        self.condition = condition
        super().__init__("condition (%s) violated %s" % (condition, msg))


class NoSuspensionExists(SurfaceError):
    pass


class EmptyFamily(SurfaceError):
    pass


class VerticalSaddleConnection(SurfaceError):
    pass


class UnrealizableSignature(SurfaceError):
    pass


class SuspensionData:
    """(sigma, l, zeta) with 0-indexed sigma; zeta are planar vectors."""

    def __init__(self, sigma, l, zeta, variant="standard"):
        self.sigma = tuple(sigma)
        self.l = int(l)
        self.zeta = [v if isinstance(v, Vec) else Vec(*v) for v in zeta]
        self.variant = variant
        n = len(self.sigma)
        if len(self.zeta) != n:
            raise ValueError("zeta length disagrees with sigma")
        if self.l < 1 or self.l >= n:
            raise ValueError("split index out of range")
        for i, j in enumerate(self.sigma):
            if not 0 <= j < n or self.sigma[j] != i:
                raise NotInvolution("sigma is not an involution")
            if j == i:
                raise FixedPoint("sigma has a fixed point")

    @property
    def n(self):
        return len(self.sigma)

    @property
    def m(self):
        return self.n - self.l

    def top(self):
        return self.zeta[:self.l]

    def bottom(self):
        return self.zeta[self.l:]

    def pairs(self):
        return sorted({tuple(sorted((i, self.sigma[i])))
                       for i in range(self.n)})

    def __repr__(self):
        return "SuspensionData(l=%d, sigma=%s, zeta=%s)" % (
            self.l, self.sigma, self.zeta)


def validate_suspension(d: SuspensionData):
    """Return None if valid; otherwise the first violated condition tag.

    Raises NotInvolution / FixedPoint from the constructor path only.
    """
    n, l, m = d.n, d.l, d.m
    z = d.zeta
    for i in range(n):
        if z[i] != z[d.sigma[i]]:
            return "1"
    if d.variant == "standard":
        for i in range(n):
            if not z[i].x > 0:
                return "2"
    else:
        if z[0].x != 0 or z[0].y == 0:
            return "2'"
        for i in range(n):
            if i in (0, d.sigma[0]):
                continue
            if not z[i].x > 0:
                return "2"
    s = Vec(0, 0)
    for i in range(l - 1):
        s = s + z[i]
        if not s.y > 0:
            return "3"
    s = Vec(0, 0)
    for j in range(m - 1):
        s = s + z[l + j]
        if not s.y < 0:
            return "4"
    if sum(z[:l], Vec(0, 0)) != sum(z[l:], Vec(0, 0)):
        return "5"
    return None


def require_valid(d):
    v = validate_suspension(d)
    if v is not None:
        raise SuspensionInvalid(v)


def polygon_vertices(d: SuspensionData):
    """The closed CCW vertex loop of the suspension polygon.

    Vertices: bottom path 0, V_1..V_m, then top path W_{l-1}..W_1.  Side j
    corresponds to zeta index ``side_to_zeta(d)[j]``.
    """
    pts = [Vec(0, 0)]
    acc = Vec(0, 0)
    for j in range(d.m):
        acc = acc + d.zeta[d.l + j]
        pts.append(acc)
    acc2 = sum(d.zeta[:d.l], Vec(0, 0))
    for t in range(1, d.l):
        acc2 = acc2 - d.zeta[d.l - t]
        pts.append(acc2)
    return pts


def side_to_zeta(d: SuspensionData):
    out = {}
    for j in range(d.m):
        out[j] = d.l + j
    for t in range(d.l):
        out[d.m + t] = d.l - 1 - t
    return out


def is_suitable(d: SuspensionData) -> bool:
    """Do the two broken lines meet only at their shared endpoints?"""
    try:
        validate_simple_polygon(polygon_vertices(d))
        return True
    except SurfaceError:
        return False


def _polygon_pairings(d):
    s2z = side_to_zeta(d)
    z2s = {}
    for s, zi in s2z.items():
        z2s.setdefault(zi, s)
    pairs = []
    for (i, j) in d.pairs():
        si, sj = z2s[i], z2s[j]
        # mixed top/bottom pairs glue by translation, same-side by half-turn
        ti = i < d.l
        tj = j < d.l
        tag = "T" if ti != tj else "F"
        pairs.append(((0, si), (0, sj), tag))
    return pairs


def zr_easy(d: SuspensionData) -> FlatSurface:
    """Surface of a suitable suspension datum (embedded polygon case)."""
    pts = polygon_vertices(d)
    S = build_surface([pts], _polygon_pairings(d))
    flat = [cid for cid, k in S.singularities() if k == 0]
    if flat:
        S = S.with_marks(set(S.marked) | set(flat))
    return S


def make_suitable(d: SuspensionData) -> SuspensionData:
    """A datum with the same imaginary parts defining an embedded polygon.

    Implements the two redistribution cases of the zippered-rectangle
    construction; raises NoSuspensionExists when the family admits no
    suspension at all.
    """
    require_valid(d)
    if d.variant != "standard":
        raise SurfaceError("make_suitable applies to standard data")
    if is_suitable(d):
        return d
    n, l, m = d.n, d.l, d.m
    total_im = sum(v.y for v in d.zeta[:l])
    if total_im == 0:
        # the two broken lines are separated by the horizontal axis
        raise SurfaceError("flat-total datum should already be suitable")
    if total_im > 0:
        last = n - 1          # last bottom index
        ref = l - 1           # last top index
        mirror = False
    else:
        last = l - 1          # mirror case: shrink the last top vector
        ref = n - 1
        mirror = True
    partner = d.sigma[last]
    if partner == ref:
        raise NoSuspensionExists("the boundary pair blocks every suspension")
    z = list(d.zeta)

    def with_re(vals, i, re):
        vals[i] = Vec(re, vals[i].y)

    top_side = (lambda i: i < l)
    if top_side(partner) != top_side(last):
        # mixed pair: shrink both ends, balance is automatic
        target = min(z[last].x, z[ref].x) / 2
        for K in range(1, 60):
            zz = list(z)
            with_re(zz, last, target)
            with_re(zz, partner, target)
            d2 = SuspensionData(d.sigma, l, zz)
            if validate_suspension(d2) is None and is_suitable(d2):
                return d2
            target = target / 2
        raise SurfaceError("could not make the datum suitable (mixed case)")
    # same-side pair: move Re(last) close to Re(ref), rebalancing through the
    # pairs living entirely on the other side
    pairs = d.pairs()
    same = [p for p in pairs if top_side(p[0]) == top_side(p[1]) ==
            top_side(last) and last not in p]
    other = [p for p in pairs if top_side(p[0]) == top_side(p[1]) !=
             top_side(last)]
    if not other:
        raise SurfaceError("no rebalancing pairs; datum cannot be reshaped")
    for K in range(1, 60):
        target = z[ref].x * Fraction(2 ** K - 1, 2 ** K)
        delta = target - z[last].x
        zz = list(z)
        with_re(zz, last, target)
        with_re(zz, d.sigma[last], target)
        osum = sum(zz[p[0]].x for p in other)
        factor = (osum + delta) / osum
        if factor <= 0:
            continue
        for p in other:
            with_re(zz, p[0], zz[p[0]].x * factor)
            with_re(zz, p[1], zz[p[1]].x * factor)
        d2 = SuspensionData(d.sigma, l, zz)
        if validate_suspension(d2) is None and is_suitable(d2):
            return d2
    raise SurfaceError("could not make the datum suitable (same-side case)")


def zr_construct(d: SuspensionData) -> FlatSurface:
    """The flat surface of a suspension datum.

    Embedded-polygon data build directly; otherwise the rectangle family is
    instantiated with vertical identifications taken from a suitable datum
    with the same imaginary parts.
    """
    v = validate_suspension(d)
    if v is not None:
        raise SuspensionInvalid(v)
    if d.n < 4:
        raise EmptyFamily("fewer than four sides cannot close up")
    if d.variant == "prime":
        if is_suitable_prime(d):
            return zr_easy(d)
        raise SurfaceError("non-embedded prime data not supported")
    if is_suitable(d):
        return zr_easy(d)
    try:
        d2 = make_suitable(d)
    except NoSuspensionExists as e:
        raise EmptyFamily(str(e))
    from .zipper import rebuild_with_widths
    return rebuild_with_widths(d, d2)


def is_suitable_prime(d):
    try:
        validate_simple_polygon(polygon_vertices(d))
        return True
    except SurfaceError:
        return False


# ---------------------------------------------------------------------------
# Suspension data from a surface


def construction_segment(S, corner, length):
    return Transversal.from_corner(S, corner, length)


def _horizontal_germs(S):
    for cid in range(len(S.classes)):
        for corner, kind in germs_at_class(S, cid, Vec(1, 0)):
            yield cid, corner


def _pick_transversal(S, corner=None, length=None):
    """A horizontal segment from a singularity, truncated as in the
    suspension construction: the upward geodesic from its right end must die
    on a singularity before returning."""
    candidates = ([corner] if corner is not None
                  else [c for _, c in _horizontal_germs(S)])
    for c in candidates:
        lam = Fraction(length) if length is not None else None
        if lam is None:
            tr = trace_segment(S, ("corner", c), Vec(1, 0))
            if tr.end_kind == "vertex":
                lam = tr.params[-1] * Fraction(5, 7)
            elif tr.end_kind == "periodic":
                lam = tr.params[min(2, len(tr.params) - 1)] * Fraction(5, 7)
            else:
                lam = tr.params[-1]
        for attempt in range(24):
            try:
                x = Transversal.from_corner(S, c, lam)
            except (SegmentHitsSingularity, NotEmbedded):
                lam = lam / 2
                continue
            res = _truncate_for_suspension(S, x)
            if res is not None:
                return res
            lam = lam * Fraction(2, 3)
    raise VerticalSaddleConnection(
        "no horizontal segment with a dying right end was found")


def _truncate_for_suspension(S, x):
    from .trace import vertex_at
    f, p = x.point_at(x.length)
    if vertex_at(S, f, p) is not None:
        return x   # right end at a singularity: its hitting time is zero
    cuts = []
    for cid, corner, dd, tr in vertical_separatrix_traces(S, x):
        if tr.end_kind == "hit":
            s, va = tr.end_data
            if va == -1:
                cuts.append(s)
    # the upward flow from the right end must hit a singularity before x
    watch = x.make_watcher()
    par = x.parity_at(x.length)
    tr = trace_segment(S, ("point", f, p), UP * par, watch=watch)
    if tr.end_kind == "vertex":
        return x
    if not cuts:
        return None
    s_cut = max(cuts)
    if s_cut <= 0:
        return None
    try:
        return _retrace(S, x, s_cut)
    except SurfaceError:
        return None


def _retrace(S, x, new_len):
    # x was built from a corner germ; retrace with the new length
    (f, p0, p1, s0, s1, par) = x.pieces[0]
    tr = trace_segment(S, ("point", f, p0), Vec(par, 0),
                       budget=Fraction(new_len))
    return Transversal._from_trace(S, tr, Fraction(new_len))


def suspension_from_surface(S, corner=None, length=None):
    """Suspension datum whose zippered rectangles rebuild S.

    The proof's construction: abscissas of the return-map discontinuities
    give the real parts, singularity hitting times the imaginary parts.  The
    pairing equalities zeta[i] == zeta[sigma[i]] are exactly what the
    no-vertical-saddle-connection hypothesis buys; they are verified here
    (together with the strips exhausting the surface) and
    VerticalSaddleConnection is raised when no segment passes.
    """
    last = None
    for x in _candidate_transversals(S, corner, length):
        try:
            return _suspension_from_transversal(S, x)
        except (VerticalSaddleConnection, NonReturningOrbit,
                SurfaceError) as e:
            last = e
            continue
    raise VerticalSaddleConnection(
        "no horizontal segment yields a complete suspension datum (%s)"
        % last)


def _candidate_transversals(S, corner=None, length=None):
    candidates = ([corner] if corner is not None
                  else [c for _, c in _horizontal_germs(S)])
    for c in candidates:
        lams = []
        if length is not None:
            lams.append(Fraction(length))
        else:
            tr = trace_segment(S, ("corner", c), Vec(1, 0))
            if tr.end_kind == "vertex":
                # the segment up to the next singularity, plus a shorter one
                lams.append(tr.params[-1])
                lams.append(tr.params[-1] * Fraction(6, 7))
            else:
                lams.append(tr.params[min(2, len(tr.params) - 1)]
                            * Fraction(6, 7))
        for lam0 in lams:
            lam = lam0
            for attempt in range(14):
                try:
                    x = Transversal.from_corner(S, c, lam)
                except (SegmentHitsSingularity, NotEmbedded):
                    lam = lam * Fraction(9, 13)
                    continue
                res = _truncate_for_suspension(S, x)
                if res is not None:
                    yield res
                lam = lam * Fraction(9, 13)


def _suspension_from_transversal(S, x):
    rs = first_return_system(S, x)
    l, m = rs.l, rs.m
    L = x.length
    # death times per cut and at the right end
    tau_top = {Fraction(0): Fraction(0)}
    tau_bot = {Fraction(0): Fraction(0)}
    for cid, corner2, dd, tr in vertical_separatrix_traces(S, x):
        if tr.end_kind != "hit":
            continue
        s, va = tr.end_data
        t = tr.vertical_travel()
        if va == -1:
            tau_top[s] = t
        else:
            tau_bot[s] = -t
    from .trace import vertex_at
    f, p = x.point_at(L)
    if vertex_at(S, f, p) is not None:
        tau_top[L] = Fraction(0)
    else:
        watch = x.make_watcher()
        par = x.parity_at(L)
        tr_up = trace_segment(S, ("point", f, p), UP * par, watch=watch)
        if tr_up.end_kind != "vertex":
            raise VerticalSaddleConnection("right end's upward flow returns")
        tau_top[L] = tr_up.vertical_travel()
    tau_bot[L] = tau_top[L]

    tops = [Fraction(0)] + rs.top_cuts + [L]
    bots = [Fraction(0)] + rs.bottom_cuts + [L]
    zeta = []
    for k in range(1, l + 1):
        if tops[k] not in tau_top:
            raise VerticalSaddleConnection("missing hitting time at a cut")
        zeta.append(Vec(tops[k] - tops[k - 1],
                        tau_top[tops[k]] - tau_top[tops[k - 1]]))
    for k in range(1, m + 1):
        if bots[k] not in tau_bot:
            raise VerticalSaddleConnection("missing hitting time at a cut")
        zeta.append(Vec(bots[k] - bots[k - 1],
                        tau_bot[bots[k]] - tau_bot[bots[k - 1]]))
    sigma = [rs.sigma[i + 1] - 1 for i in range(l + m)]
    d = SuspensionData(sigma, l, zeta)
    for i in range(d.n):
        if d.zeta[i] != d.zeta[d.sigma[i]]:
            raise VerticalSaddleConnection(
                "strip data does not pair up; a vertical saddle connection "
                "interferes with the chosen segment")
    v = validate_suspension(d)
    if v is not None:
        raise VerticalSaddleConnection("construction left the polytope (%s)"
                                       % v)
    strips_area = sum(d.zeta[i].x * rs.heights[i + 1]
                      for (i, j) in d.pairs())
    if strips_area != S.area():
        raise VerticalSaddleConnection(
            "the strips over the segment do not exhaust the surface")
    if d.n < 4:
        raise VerticalSaddleConnection(
            "degenerate two-sided datum; pick a fuller segment")
    return d


class NotExactlyOneVerticalSC(SurfaceError):
    pass


class LoopAtSameSingularity(SurfaceError):
    pass


def vertical_connections(S):
    """Vertical saddle connections as (class_from, corner, length, class_to),
    one entry per unoriented connection."""
    seen = {}
    for cid in range(len(S.classes)):
        for d in (UP, DOWN):
            for corner, kind in germs_at_class(S, cid, d):
                tr = trace_segment(S, ("corner", corner), d)
                if tr.end_kind != "vertex":
                    continue
                mid = _trace_midpoint(S, tr)
                if mid in seen:
                    continue
                seen[mid] = (cid, corner, tr.vertical_travel(),
                             S.class_of[tr.end_data])
    return list(seen.values())


def _trace_midpoint(S, tr):
    tot = tr.vertical_travel()
    half = tot / 2
    acc = Fraction(0)
    for (f, p0, p1) in tr.pieces:
        d = abs(p1.y - p0.y)
        if d > 0 and acc + d >= half:
            lam = (half - acc) / d
            return canonical_point(S, f, p0 + (p1 - p0) * lam)
        acc += d
    raise SurfaceError("empty trace")


def suspension_prime_from_surface(S, verify=True):
    """Prime-vertical suspension datum for a surface whose unique vertical
    saddle connection joins two distinct singularities.

    The polygon of the returned datum, which carries the connection as its
    vertical side pair, rebuilds a surface isometric to S (verified here
    via canonical forms unless ``verify`` is disabled).
    """
    conns = vertical_connections(S)
    if len(conns) != 1:
        raise NotExactlyOneVerticalSC("found %d vertical connections"
                                      % len(conns))
    cid_a, corner_a, eps, cid_b = conns[0]
    if cid_a == cid_b:
        raise LoopAtSameSingularity("the vertical connection is a loop")
    last = None
    for p1 in (cid_a, cid_b):
        for cid, corner in _horizontal_germs(S):
            if cid != p1:
                continue
            try:
                x = _pick_transversal(S, corner=corner)
                d = _prime_data(S, x, eps, verify)
                return d
            except (VerticalSaddleConnection, SurfaceError,
                    NonReturningOrbit) as e:
                last = e
                continue
    raise VerticalSaddleConnection(
        "no prime transversal produced a verified datum: %s" % last)


def _prime_data(S, x, eps, verify):
    rs = first_return_system(S, x)
    l, m = rs.l, rs.m
    L = x.length
    # the left end's upward geodesic must be the connection itself
    f0, p0 = x.point_at(0)
    tau_top = {Fraction(0): eps}
    tau_bot = {Fraction(0): Fraction(0)}
    for cid, corner2, dd, tr in vertical_separatrix_traces(S, x):
        if tr.end_kind != "hit":
            continue
        s, va = tr.end_data
        t = tr.vertical_travel()
        if va == -1:
            tau_top[s] = t
        else:
            tau_bot[s] = -t
    watch = x.make_watcher()
    f, p = x.point_at(L)
    par = x.parity_at(L)
    tr_up = trace_segment(S, ("point", f, p), UP * par, watch=watch)
    if tr_up.end_kind != "vertex":
        raise VerticalSaddleConnection("right end's upward flow returns")
    tau_top[L] = tr_up.vertical_travel()
    tau_bot[L] = tau_top[L]
    tops = [Fraction(0)] + rs.top_cuts + [L]
    bots = [Fraction(0)] + rs.bottom_cuts + [L]
    for k in tops[1:-1]:
        if k not in tau_top:
            raise VerticalSaddleConnection("missing top hitting time")
    for k in bots[1:-1]:
        if k not in tau_bot:
            raise VerticalSaddleConnection("missing bottom hitting time")
    raw_top = [Vec(tops[k] - tops[k - 1],
                   tau_top[tops[k]] - tau_top[tops[k - 1]])
               for k in range(1, l + 1)]
    raw_bot = [Vec(bots[k] - bots[k - 1],
                   tau_bot[bots[k]] - tau_bot[bots[k - 1]])
               for k in range(1, m + 1)]
    sigma_x = {i: rs.sigma[i + 1] - 1 for i in range(l + m)}
    raw = raw_top + raw_bot
    mismatch = [i for i in range(l + m) if raw[i] != raw[sigma_x[i]]]
    if len(mismatch) != 2:
        raise VerticalSaddleConnection(
            "expected exactly one mismatched strip pair, found %d"
            % (len(mismatch) // 2))
    # glue the euclidean triangle {zeta_i0, zeta_sigma(i0), i eps} onto the
    # polygon: the longer mismatched side splits into the shorter one plus a
    # vertical side of length eps; candidates are verified by rebuilding
    i0, j0 = mismatch
    vert = Vec(0, eps)
    for split, keep in ((i0, j0), (j0, i0)):
        diff = raw[split] - raw[keep]
        if diff.x != 0 or abs(diff.y) != eps:
            continue
        for order in (0, 1):
            cand = _assemble_prime(raw_top, raw_bot, sigma_x, l, split, keep,
                                   eps, order)
            if cand is None:
                continue
            if validate_suspension(cand) is not None:
                continue
            if not verify:
                return cand
            try:
                rebuilt = zr_construct(cand)
            except SurfaceError:
                continue
            from .canon import canonical_form
            if canonical_form(rebuilt) == canonical_form(S):
                return cand
    raise VerticalSaddleConnection("no prime candidate verified")


def _assemble_prime(raw_top, raw_bot, sigma_x, l, split, keep, eps, order):
    """New datum: prepend the vertical side to the top line and replace side
    ``split`` by two sides ([kept, vertical] or [vertical, kept])."""
    vert = Vec(0, eps)
    raw_all = raw_top + raw_bot
    repl = (raw_all[keep], vert)
    if order:
        repl = (vert, repl[0])
    # build new top/bottom vector lists with tracking of old indices
    new_top = [("v0", vert)]
    for i, v in enumerate(raw_top):
        if i == split:
            new_top.append(("spl0", repl[0]))
            new_top.append(("spl1", repl[1]))
        else:
            new_top.append((i, v))
    new_bot = []
    for j, v in enumerate(raw_bot):
        i = l + j
        if i == split:
            new_bot.append(("spl0", repl[0]))
            new_bot.append(("spl1", repl[1]))
        else:
            new_bot.append((i, v))
    names = [t for t, _ in new_top] + [t for t, _ in new_bot]
    vecs = [v for _, v in new_top] + [v for _, v in new_bot]
    pos = {t: k for k, t in enumerate(names)}
    n = len(names)
    sigma = [None] * n
    vert_name = "spl0" if repl[0] == vert else "spl1"
    kept_name = "spl1" if vert_name == "spl0" else "spl0"
    for i in range(len(raw_top) + len(raw_bot)):
        if i in (split,):
            continue
        si = sigma_x[i]
        if si == split:
            sigma[pos[i]] = pos[kept_name]
            sigma[pos[kept_name]] = pos[i]
        elif si != split:
            sigma[pos[i]] = pos[si]
    sigma[pos["v0"]] = pos[vert_name]
    sigma[pos[vert_name]] = pos["v0"]
    if any(s is None for s in sigma):
        return None
    try:
        return SuspensionData(sigma, len(new_top), vecs, variant="prime")
    except SurfaceError:
        return None
