"""Random suspension data and stratum sampling.

Surfaces in a genus-zero stratum are produced by drawing rational suspension
data in the open polytope of a known-good (sigma, l) seed for the target
signature.  Seeds live in ``_seed_table``; ``search_seed`` finds new ones by
randomized search (the table entry for a signature determines a connected set
of surfaces, so one witness per signature is enough).
"""

from __future__ import annotations

import random
from fractions import Fraction

from .geom import Vec
from .surface import SurfaceError
from .suspension import (SuspensionData, UnrealizableSignature, is_suitable,
                         validate_suspension, zr_construct)
from ._seed_table import SEED_TABLE


def normalize_signature(signature):
    sig = tuple(sorted(int(k) for k in signature))
    if any(k < -1 for k in sig):
        raise UnrealizableSignature("orders must be >= -1")
    if sum(sig) != -4:
        raise UnrealizableSignature(
            "signature sums to %d, not -4" % sum(sig))
    return sig


def _pair_types(sigma, l):
    pairs = sorted({tuple(sorted((i, sigma[i]))) for i in range(len(sigma))})
    tt = [p for p in pairs if p[0] < l and p[1] < l]
    bb = [p for p in pairs if p[0] >= l and p[1] >= l]
    mix = [p for p in pairs if (p[0] < l) != (p[1] < l)]
    return pairs, tt, bb, mix


def random_zeta(sigma, l, rng, denom=8, amplitude=3, tries=400):
    """A random rational point of the suspension polytope, or None."""
    n = len(sigma)
    pairs, tt, bb, mix = _pair_types(sigma, l)
    if bool(tt) != bool(bb):
        return None   # condition (5) forces an empty family
    for _ in range(tries):
        vals = {}
        for p in pairs:
            re = Fraction(rng.randint(1, amplitude * denom), denom)
            im = Fraction(rng.randint(-amplitude * denom, amplitude * denom),
                          denom)
            vals[p] = Vec(re, im)
        if tt:
            # rebalance condition (5): sum over tt pairs == sum over bb pairs
            target = sum((vals[p] for p in bb), Vec(0, 0))
            rest = sum((vals[p] for p in tt[1:]), Vec(0, 0))
            fix = target - rest
            if fix.x <= 0:
                continue
            vals[tt[0]] = fix
        zeta = [None] * n
        for p in pairs:
            zeta[p[0]] = vals[p]
            zeta[p[1]] = vals[p]
        try:
            d = SuspensionData(sigma, l, zeta)
        except SurfaceError:
            return None
        if validate_suspension(d) is None:
            return d
    return None


def _random_involution(n, rng):
    idx = list(range(n))
    rng.shuffle(idx)
    sigma = [0] * n
    for k in range(0, n, 2):
        a, b = idx[k], idx[k + 1]
        sigma[a], sigma[b] = b, a
    return sigma


def search_seed(signature, seed=0, tries=20000, progress=None):
    """Randomized search for a (sigma, l) whose stratum matches signature."""
    sig = normalize_signature(signature)
    r = len(sig)
    n = 2 * (r - 1)
    rng = random.Random(seed)
    for t in range(tries):
        sigma = _random_involution(n, rng)
        l = rng.randint(2, n - 2)
        d = random_zeta(sigma, l, rng, tries=4)
        if d is None:
            continue
        if not is_suitable(d):
            continue
        try:
            s = zr_construct(d)
            got = s.stratum_signature()
        except SurfaceError:
            continue
        if got == sig:
            return tuple(sigma), l
        if progress and t % 500 == 0:
            progress(t, got)
    return None


def sample_stratum(signature, seed=0, suitable_only=True):
    """A random surface in the genus-zero stratum with the given signature.

    Orders equal to 0 denote marked points.  Deterministic per seed.
    Raises UnrealizableSignature for signatures without a stored or
    searchable (sigma, l) seed.
    """
    sig = normalize_signature(signature)
    if sig not in SEED_TABLE:
        found = search_seed(sig, seed=17)
        if found is None:
            raise UnrealizableSignature(
                "no suspension seed known for %s" % (sig,))
        SEED_TABLE[sig] = [found]
    rng = random.Random((hash(sig) & 0xffffffff) ^ seed)
    entries = SEED_TABLE[sig]
    last = None
    for attempt in range(64):
        sigma, l = entries[rng.randrange(len(entries))]
        d = random_zeta(list(sigma), l, rng)
        if d is None:
            continue
        if suitable_only and not is_suitable(d):
            continue
        try:
            s = zr_construct(d)
        except SurfaceError as e:
            last = e
            continue
        if s.stratum_signature() != sig:
            last = SurfaceError("seed produced %s" %
                                (s.stratum_signature(),))
            continue
        return s
    raise SurfaceError("sampling failed for %s: %s" % (sig, last))
