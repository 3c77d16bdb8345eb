"""Bulk encoding of configurations and sort-merge joins.

A configuration on 2^d vertices over n points is packed into a single
uint64 in base n, vertex 0 least significant.  Cube sets are sorted arrays
of such codes; membership is binary search, grouping is divmod arithmetic.
"""

from __future__ import annotations

import numpy as np

from .guards import GuardExceeded, check_guard


def value_dtype(npoints):
    return np.int16 if npoints < (1 << 15) else np.int32


def check_width(npoints, nverts):
    """Codes must fit a uint64; desk-scale spaces stay far below this."""
    if npoints > 1 and nverts * npoints.bit_length() > 62 and npoints**nverts > (1 << 62):
        raise GuardExceeded(
            f"encoding width for {npoints} points on {nverts} vertices", npoints**nverts, 1 << 62
        )


def powers_of(npoints, nverts):
    check_width(npoints, nverts)
    out = np.empty(nverts, dtype=np.uint64)
    p = 1
    for i in range(nverts):
        out[i] = p
        p *= npoints
    return out


def encode_rows(mat, npoints):
    """(N, V) value matrix -> (N,) uint64 codes."""
    mat = np.asarray(mat)
    n_rows, nverts = mat.shape
    pw = powers_of(npoints, nverts)
    enc = np.zeros(n_rows, dtype=np.uint64)
    for j in range(nverts):
        enc += mat[:, j].astype(np.uint64) * pw[j]
    return enc


def decode_rows(enc, npoints, nverts):
    """(N,) uint64 codes -> (N, V) value matrix."""
    enc = np.asarray(enc, dtype=np.uint64)
    pw = powers_of(npoints, nverts)
    out = np.empty((enc.shape[0], nverts), dtype=value_dtype(npoints))
    for j in range(nverts):
        out[:, j] = ((enc // pw[j]) % np.uint64(npoints)).astype(out.dtype)
    return out


def split_top(enc, npoints, nverts):
    """Split codes into (below-top code, top-vertex value)."""
    p = np.uint64(npoints ** (nverts - 1))
    enc = np.asarray(enc, dtype=np.uint64)
    return enc % p, (enc // p).astype(np.int64)


def split_halves(enc, npoints, nverts):
    """Split codes of [c0, c1] concatenations into (code c0, code c1)."""
    p = np.uint64(npoints ** (nverts // 2))
    enc = np.asarray(enc, dtype=np.uint64)
    return enc % p, enc // p


def gather_columns(enc, npoints, nverts, cols):
    """Re-encode each configuration restricted to the given vertex columns."""
    mat = decode_rows(enc, npoints, nverts)
    return encode_rows(mat[:, cols], npoints)


def apply_vertex_map(enc, npoints, nverts, vmap):
    """Codes of c o phi where vmap[v] is the image vertex of v under phi."""
    mat = decode_rows(enc, npoints, nverts)
    return encode_rows(mat[:, list(vmap)], npoints)


def isin_sorted(needles, haystack_sorted):
    """Boolean membership of needles in a sorted unique uint64 array."""
    if haystack_sorted.size == 0:
        return np.zeros(needles.shape, dtype=bool)
    pos = np.searchsorted(haystack_sorted, needles)
    pos = np.minimum(pos, haystack_sorted.size - 1)
    return haystack_sorted[pos] == needles


def index_sorted(needles, haystack_sorted):
    """Indices of needles in a sorted unique array; -1 when absent."""
    pos = np.searchsorted(haystack_sorted, needles)
    pos = np.minimum(pos, max(haystack_sorted.size - 1, 0))
    ok = haystack_sorted.size > 0
    hit = haystack_sorted[pos] == needles if ok else np.zeros(needles.shape, bool)
    return np.where(hit, pos, -1).astype(np.int64)


def merge_join(key_a, key_b, what="merge_join"):
    """All index pairs (i, j) with key_a[i] == key_b[j], block-cartesian.

    Returns (idx_a, idx_b) as int64 arrays; guarded by the global size cap.
    """
    sa = np.argsort(key_a, kind="stable")
    sb = np.argsort(key_b, kind="stable")
    ka, kb = key_a[sa], key_b[sb]
    ua, ca = np.unique(ka, return_counts=True)
    ub, cb = np.unique(kb, return_counts=True)
    offs_a = np.concatenate([[0], np.cumsum(ca)[:-1]])
    offs_b = np.concatenate([[0], np.cumsum(cb)[:-1]])
    shared, ia, ib = np.intersect1d(ua, ub, return_indices=True)
    if shared.size == 0:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty
    cnt_a, cnt_b = ca[ia], cb[ib]
    block = cnt_a * cnt_b
    total = int(block.sum())
    check_guard(what, total)
    starts = np.concatenate([[0], np.cumsum(block)[:-1]])
    kvec = np.repeat(np.arange(shared.size), block)
    q = np.arange(total) - starts[kvec]
    a_off = q // cnt_b[kvec]
    b_off = q % cnt_b[kvec]
    idx_a = sa[offs_a[ia][kvec] + a_off]
    idx_b = sb[offs_b[ib][kvec] + b_off]
    return idx_a.astype(np.int64), idx_b.astype(np.int64)
