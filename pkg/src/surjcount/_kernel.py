"""Compiled inner loop of the compaction sampler.

A sample is built block by block. A table block draws one index uniformly
from [0, K) and copies the images stored in that row of its decode table.
A rejection block samples one component of G against a biclique: it picks
an orientation with a fair bit, draws every vertex from the larger side and
restarts the component if a vertex meant for the smaller side overshoots.
Bounded draws use 32-bit words with Lemire's multiply-and-reject method, so
every draw is exactly uniform.
"""

import numpy as np
from numba import njit

TABLE = 0
REJECT = 1


@njit(cache=True)
def sample_hits(raws, start, want, n, btype, bk, bthr, bv0, verts, btab0, tab, vflag,
                small, large, ea, eb, lut, q, full):
    """Draw up to ``want`` samples from word ``start`` of the uint32 array ``raws``.

    Returns (hits, samples done, next word). When the words run out the
    partial sample is dropped and the next word is where it started.
    """
    mask = np.uint64(0xFFFFFFFF)
    limit = raws.size
    img = np.zeros(max(n, 1), dtype=np.int64)
    pos = start
    hits = 0
    done = 0
    ls = small.size
    while done < want:
        begin = pos
        for b in range(btype.size):
            v0 = bv0[b]
            v1 = bv0[b + 1]
            k = bk[b]
            thr = bthr[b]
            if btype[b] == 0:
                while True:
                    if pos >= limit:
                        return hits, done, begin
                    x = np.uint64(raws[pos])
                    pos += 1
                    mm = x * k
                    if (mm & mask) >= thr:
                        break
                row = btab0[b] + np.int64(mm >> np.uint64(32)) * (v1 - v0)
                for i in range(v1 - v0):
                    img[verts[v0 + i]] = tab[row + i]
            else:
                accepted = False
                while not accepted:
                    if pos >= limit:
                        return hits, done, begin
                    x = np.uint64(raws[pos])
                    pos += 1
                    orient = x >> np.uint64(31)
                    accepted = True
                    for i in range(v1 - v0):
                        while True:
                            if pos >= limit:
                                return hits, done, begin
                            x = np.uint64(raws[pos])
                            pos += 1
                            mm = x * k
                            if (mm & mask) >= thr:
                                break
                        d = np.int64(mm >> np.uint64(32))
                        if (vflag[v0 + i] == 1) == (orient == 1):
                            if d >= ls:
                                accepted = False
                                break
                            img[verts[v0 + i]] = small[d]
                        else:
                            img[verts[v0 + i]] = large[d]
        acc = np.uint64(0)
        for e in range(ea.size):
            acc |= lut[img[ea[e]] * q + img[eb[e]]]
        if acc == full:
            hits += 1
        done += 1
    return hits, done, pos
