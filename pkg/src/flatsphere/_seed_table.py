"""Known (sigma, l) seeds per genus-zero stratum signature.

Generated by randomized search (``flatsphere.sampling.search_seed``); each
seed determines a connected family of suspensions realizing the signature,
so one witness per signature suffices.
"""

SEED_TABLE = {
    (-1, -1, -1, -1): [((1, 0, 3, 2, 5, 4), 3)],
    (-1, -1, -1, -1, 0): [((1, 0, 3, 2, 5, 4, 7, 6), 3)],
    (-1, -1, -1, -1, -1, 1): [((5, 2, 1, 4, 3, 0, 7, 6, 9, 8), 6)],
    (-1, -1, -1, -1, -1, 0, 1): [((1, 0, 5, 4, 3, 2, 7, 6, 9, 8, 11, 10), 8)],
    (-1, -1, -1, -1, -1, -1, 2): [((6, 2, 1, 9, 5, 4, 0, 8, 7, 3, 11, 10), 4)],
}
