"""Pure NumPy implementations of the hot geometric kernels.

These are the fallback used when the compiled extension is unavailable,
and the exhaustive nearest-neighbor scan here is also the test oracle for
the accelerated spatial-hash path. Semantics are identical to the
compiled backend: squared distances, lowest-index tie-breaking, and
closest points recombined as b0*a + b1*b + b2*c from barycentrics.
"""

from __future__ import annotations

import numpy as np

NAME = "numpy"

# Queries are processed in blocks to keep the pairwise distance matrix small.
_CHUNK = 256


def nn_query(queries: np.ndarray, targets: np.ndarray):
    """Exact nearest neighbor by exhaustive scan.

    Returns (indices, squared_distances); ties go to the lowest target
    index (np.argmin picks the first occurrence).
    """
    q = np.ascontiguousarray(queries, dtype=np.float64)
    t = np.ascontiguousarray(targets, dtype=np.float64)
    nq = q.shape[0]
    idx = np.empty(nq, dtype=np.int64)
    d2 = np.empty(nq, dtype=np.float64)
    for lo in range(0, nq, _CHUNK):
        hi = min(lo + _CHUNK, nq)
        diff = q[lo:hi, None, :] - t[None, :, :]
        dist = (diff * diff).sum(axis=2)
        best = np.argmin(dist, axis=1)
        idx[lo:hi] = best
        d2[lo:hi] = dist[np.arange(hi - lo), best]
    return idx, d2


def _closest_point_blocks(p: np.ndarray, a: np.ndarray, b: np.ndarray, c: np.ndarray):
    """Vectorized closest-point-on-triangle for broadcastable point/corner blocks.

    Region classification follows the standard edge/vertex walk; barycentrics
    are assembled per region and the closest point is always recomputed as
    b0*a + b1*b + b2*c so results match the scalar contract bit for bit.
    """
    ab = b - a
    ac = c - a
    ap = p - a
    d1 = (ab * ap).sum(-1)
    d2 = (ac * ap).sum(-1)
    bp = p - b
    d3 = (ab * bp).sum(-1)
    d4 = (ac * bp).sum(-1)
    cp = p - c
    d5 = (ab * cp).sum(-1)
    d6 = (ac * cp).sum(-1)

    vc = d1 * d4 - d3 * d2
    vb = d5 * d2 - d1 * d6
    va = d3 * d6 - d5 * d4

    shape = d1.shape
    b0 = np.empty(shape)
    b1 = np.empty(shape)
    b2 = np.empty(shape)
    decided = np.zeros(shape, dtype=bool)

    def settle(mask, w0, w1, w2):
        take = mask & ~decided
        b0[take] = w0 if np.isscalar(w0) else w0[take]
        b1[take] = w1 if np.isscalar(w1) else w1[take]
        b2[take] = w2 if np.isscalar(w2) else w2[take]
        decided[take] = True

    # Region tests in the same order as the scalar kernel: vertex A,
    # vertex B, edge AB, vertex C, edge AC, edge BC, interior.
    settle((d1 <= 0.0) & (d2 <= 0.0), 1.0, 0.0, 0.0)
    settle((d3 >= 0.0) & (d4 <= d3), 0.0, 1.0, 0.0)
    # Edge AB.
    with np.errstate(divide="ignore", invalid="ignore"):
        v_ab = d1 / (d1 - d3)
    settle((vc <= 0.0) & (d1 >= 0.0) & (d3 <= 0.0), 1.0 - v_ab, v_ab, 0.0)
    settle((d6 >= 0.0) & (d5 <= d6), 0.0, 0.0, 1.0)
    # Edge AC.
    with np.errstate(divide="ignore", invalid="ignore"):
        w_ac = d2 / (d2 - d6)
    settle((vb <= 0.0) & (d2 >= 0.0) & (d6 <= 0.0), 1.0 - w_ac, 0.0, w_ac)
    # Edge BC.
    with np.errstate(divide="ignore", invalid="ignore"):
        w_bc = (d4 - d3) / ((d4 - d3) + (d5 - d6))
    settle(
        (va <= 0.0) & ((d4 - d3) >= 0.0) & ((d5 - d6) >= 0.0),
        0.0,
        1.0 - w_bc,
        w_bc,
    )
    # Interior.
    with np.errstate(divide="ignore", invalid="ignore"):
        denom = 1.0 / (va + vb + vc)
    v_in = vb * denom
    w_in = vc * denom
    settle(np.ones(shape, dtype=bool), 1.0 - v_in - w_in, v_in, w_in)

    closest = (
        b0[..., None] * a + b1[..., None] * b + b2[..., None] * c
    )
    diff = p - closest
    dist2 = (diff * diff).sum(-1)
    bary = np.stack([b0, b1, b2], axis=-1)
    return closest, bary, dist2


def closest_point_triangles(points: np.ndarray, tris: np.ndarray):
    """Closest point on each triangle for each (point, triangle) pair, paired
    one row at a time: points (N,3) against tris (N,3,3)."""
    p = np.asarray(points, dtype=np.float64)
    t = np.asarray(tris, dtype=np.float64)
    return _closest_point_blocks(p, t[:, 0, :], t[:, 1, :], t[:, 2, :])


def point_tri_best(points: np.ndarray, tris: np.ndarray):
    """Fused bidirectional reduction over all (point, triangle) pairs.

    Computes, for every point, the nearest triangle (index, barycentric of
    the projection, squared distance) and, for every triangle, the nearest
    point. Equivalent to an exhaustive scan; chunked over points.
    """
    p = np.asarray(points, dtype=np.float64)
    t = np.asarray(tris, dtype=np.float64)
    npts = p.shape[0]
    ntri = t.shape[0]

    pt_face = np.empty(npts, dtype=np.int64)
    pt_bary = np.empty((npts, 3), dtype=np.float64)
    pt_d2 = np.empty(npts, dtype=np.float64)
    tr_point = np.zeros(ntri, dtype=np.int64)
    tr_bary = np.zeros((ntri, 3), dtype=np.float64)
    tr_d2 = np.full(ntri, np.inf)

    a = t[:, 0, :][None, :, :]
    b = t[:, 1, :][None, :, :]
    c = t[:, 2, :][None, :, :]
    for lo in range(0, npts, _CHUNK):
        hi = min(lo + _CHUNK, npts)
        block = p[lo:hi][:, None, :]
        _, bary, d2 = _closest_point_blocks(block, a, b, c)
        face = np.argmin(d2, axis=1)
        rows = np.arange(hi - lo)
        pt_face[lo:hi] = face
        pt_bary[lo:hi] = bary[rows, face]
        pt_d2[lo:hi] = d2[rows, face]

        col_best = np.argmin(d2, axis=0)
        col_d2 = d2[col_best, np.arange(ntri)]
        better = col_d2 < tr_d2
        tr_d2[better] = col_d2[better]
        tr_point[better] = col_best[better] + lo
        tr_bary[better] = bary[col_best[better], np.flatnonzero(better)]
    return pt_face, pt_bary, pt_d2, tr_point, tr_bary, tr_d2
