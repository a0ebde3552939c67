# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled geometric kernels: batched point-triangle closest points and
spatial-hash nearest neighbor. Semantics mirror numpy_backend exactly
(lowest-index ties, closest point recombined from barycentrics)."""

import numpy as np

cimport numpy as cnp
from libc.math cimport floor, sqrt, cbrt

cnp.import_array()

NAME = "compiled"


cdef inline double _cpt(
    double px, double py, double pz,
    double ax, double ay, double az,
    double bx, double by, double bz,
    double cx, double cy, double cz,
    double* b0, double* b1, double* b2,
) nogil:
    """Closest point on triangle abc to p. Writes barycentrics, returns
    squared distance to b0*a + b1*b + b2*c."""
    cdef double abx = bx - ax, aby = by - ay, abz = bz - az
    cdef double acx = cx - ax, acy = cy - ay, acz = cz - az
    cdef double apx = px - ax, apy = py - ay, apz = pz - az
    cdef double d1 = abx * apx + aby * apy + abz * apz
    cdef double d2 = acx * apx + acy * apy + acz * apz
    cdef double bpx = px - bx, bpy = py - by, bpz = pz - bz
    cdef double d3 = abx * bpx + aby * bpy + abz * bpz
    cdef double d4 = acx * bpx + acy * bpy + acz * bpz
    cdef double cpx = px - cx, cpy = py - cy, cpz = pz - cz
    cdef double d5 = abx * cpx + aby * cpy + abz * cpz
    cdef double d6 = acx * cpx + acy * cpy + acz * cpz
    cdef double vc, vb, va, v, w, denom
    cdef double qx, qy, qz, dx, dy, dz

    if d1 <= 0.0 and d2 <= 0.0:
        b0[0] = 1.0; b1[0] = 0.0; b2[0] = 0.0
    elif d3 >= 0.0 and d4 <= d3:
        b0[0] = 0.0; b1[0] = 1.0; b2[0] = 0.0
    else:
        vc = d1 * d4 - d3 * d2
        if vc <= 0.0 and d1 >= 0.0 and d3 <= 0.0:
            v = d1 / (d1 - d3)
            b0[0] = 1.0 - v; b1[0] = v; b2[0] = 0.0
        elif d6 >= 0.0 and d5 <= d6:
            b0[0] = 0.0; b1[0] = 0.0; b2[0] = 1.0
        else:
            vb = d5 * d2 - d1 * d6
            if vb <= 0.0 and d2 >= 0.0 and d6 <= 0.0:
                w = d2 / (d2 - d6)
                b0[0] = 1.0 - w; b1[0] = 0.0; b2[0] = w
            else:
                va = d3 * d6 - d5 * d4
                if va <= 0.0 and (d4 - d3) >= 0.0 and (d5 - d6) >= 0.0:
                    w = (d4 - d3) / ((d4 - d3) + (d5 - d6))
                    b0[0] = 0.0; b1[0] = 1.0 - w; b2[0] = w
                else:
                    denom = 1.0 / (va + vb + vc)
                    v = vb * denom
                    w = vc * denom
                    b0[0] = 1.0 - v - w; b1[0] = v; b2[0] = w

    qx = b0[0] * ax + b1[0] * bx + b2[0] * cx
    qy = b0[0] * ay + b1[0] * by + b2[0] * cy
    qz = b0[0] * az + b1[0] * bz + b2[0] * cz
    dx = px - qx
    dy = py - qy
    dz = pz - qz
    return dx * dx + dy * dy + dz * dz


def closest_point_triangles(points, tris):
    """Row-paired closest points: points (N,3) against tris (N,3,3)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] p = np.ascontiguousarray(points, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=3] t = np.ascontiguousarray(tris, dtype=np.float64)
    cdef Py_ssize_t n = p.shape[0], i
    cdef cnp.ndarray[cnp.float64_t, ndim=2] closest = np.empty((n, 3))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] bary = np.empty((n, 3))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] d2 = np.empty(n)
    cdef double b0 = 0.0, b1 = 0.0, b2 = 0.0
    for i in range(n):
        d2[i] = _cpt(
            p[i, 0], p[i, 1], p[i, 2],
            t[i, 0, 0], t[i, 0, 1], t[i, 0, 2],
            t[i, 1, 0], t[i, 1, 1], t[i, 1, 2],
            t[i, 2, 0], t[i, 2, 1], t[i, 2, 2],
            &b0, &b1, &b2,
        )
        bary[i, 0] = b0
        bary[i, 1] = b1
        bary[i, 2] = b2
        closest[i, 0] = b0 * t[i, 0, 0] + b1 * t[i, 1, 0] + b2 * t[i, 2, 0]
        closest[i, 1] = b0 * t[i, 0, 1] + b1 * t[i, 1, 1] + b2 * t[i, 2, 1]
        closest[i, 2] = b0 * t[i, 0, 2] + b1 * t[i, 1, 2] + b2 * t[i, 2, 2]
    return closest, bary, d2


def point_tri_best(points, tris):
    """Fused bidirectional argmin over all (point, triangle) pairs.

    Returns per-point best (face, bary, d2) and per-triangle best
    (point, bary, d2); ties resolved to the lowest index on both axes.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=2] p = np.ascontiguousarray(points, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=3] t = np.ascontiguousarray(tris, dtype=np.float64)
    cdef Py_ssize_t npts = p.shape[0], ntri = t.shape[0], i, j
    cdef cnp.ndarray[cnp.int64_t, ndim=1] pt_face = np.empty(npts, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] pt_bary = np.empty((npts, 3))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] pt_d2 = np.empty(npts)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] tr_point = np.zeros(ntri, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] tr_bary = np.zeros((ntri, 3))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] tr_d2 = np.full(ntri, np.inf)
    cdef double b0 = 0.0, b1 = 0.0, b2 = 0.0
    cdef double best, d2
    cdef Py_ssize_t bestj

    for i in range(npts):
        best = np.inf
        bestj = -1
        for j in range(ntri):
            d2 = _cpt(
                p[i, 0], p[i, 1], p[i, 2],
                t[j, 0, 0], t[j, 0, 1], t[j, 0, 2],
                t[j, 1, 0], t[j, 1, 1], t[j, 1, 2],
                t[j, 2, 0], t[j, 2, 1], t[j, 2, 2],
                &b0, &b1, &b2,
            )
            if d2 < best:
                best = d2
                bestj = j
                pt_bary[i, 0] = b0
                pt_bary[i, 1] = b1
                pt_bary[i, 2] = b2
            if d2 < tr_d2[j]:
                tr_d2[j] = d2
                tr_point[j] = i
                tr_bary[j, 0] = b0
                tr_bary[j, 1] = b1
                tr_bary[j, 2] = b2
        pt_face[i] = bestj
        pt_d2[i] = best
    return pt_face, pt_bary, pt_d2, tr_point, tr_bary, tr_d2


def nn_query(queries, targets):
    """Exact nearest neighbor through a uniform spatial hash grid.

    Cell size is the mean target spacing estimated from the bounding box;
    the ring search expands until no unvisited cell can beat the best
    squared distance found. Ties go to the lowest target index.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=2] q = np.ascontiguousarray(queries, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] t = np.ascontiguousarray(targets, dtype=np.float64)
    cdef Py_ssize_t nq = q.shape[0], nt = t.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out_idx = np.empty(nq, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out_d2 = np.empty(nq, dtype=np.float64)

    # --- grid construction -------------------------------------------------
    cdef double minx = t[0, 0], miny = t[0, 1], minz = t[0, 2]
    cdef double maxx = minx, maxy = miny, maxz = minz
    cdef Py_ssize_t i, j
    for i in range(1, nt):
        if t[i, 0] < minx: minx = t[i, 0]
        if t[i, 0] > maxx: maxx = t[i, 0]
        if t[i, 1] < miny: miny = t[i, 1]
        if t[i, 1] > maxy: maxy = t[i, 1]
        if t[i, 2] < minz: minz = t[i, 2]
        if t[i, 2] > maxz: maxz = t[i, 2]
    cdef double ex = maxx - minx, ey = maxy - miny, ez = maxz - minz
    cdef double vol = ex * ey * ez
    cdef double diag = sqrt(ex * ex + ey * ey + ez * ez)
    cdef double cell
    if vol > 0.0:
        cell = cbrt(vol / nt)
    elif diag > 0.0:
        cell = diag / cbrt(<double> nt)
    else:
        cell = 1.0
    if cell <= 0.0:
        cell = 1.0

    cdef Py_ssize_t gx = <Py_ssize_t> (ex / cell) + 1
    cdef Py_ssize_t gy = <Py_ssize_t> (ey / cell) + 1
    cdef Py_ssize_t gz = <Py_ssize_t> (ez / cell) + 1
    # Cap the grid so pathological spacings cannot blow up memory.
    cdef Py_ssize_t cap = 128
    if gx > cap: gx = cap
    if gy > cap: gy = cap
    if gz > cap: gz = cap
    cdef double cx = ex / gx if ex > 0.0 else cell
    cdef double cy = ey / gy if ey > 0.0 else cell
    cdef double cz = ez / gz if ez > 0.0 else cell
    # A single isotropic cell size keeps the ring-termination bound valid.
    if cy > cx: cx = cy
    if cz > cx: cx = cz
    cell = cx
    gx = <Py_ssize_t> (ex / cell) + 1
    gy = <Py_ssize_t> (ey / cell) + 1
    gz = <Py_ssize_t> (ez / cell) + 1

    cdef Py_ssize_t ncells = gx * gy * gz
    cdef cnp.ndarray[cnp.int64_t, ndim=1] counts = np.zeros(ncells + 1, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] cell_of = np.empty(nt, dtype=np.int64)
    cdef Py_ssize_t ix, iy, iz, cid
    for i in range(nt):
        ix = <Py_ssize_t> ((t[i, 0] - minx) / cell)
        iy = <Py_ssize_t> ((t[i, 1] - miny) / cell)
        iz = <Py_ssize_t> ((t[i, 2] - minz) / cell)
        if ix >= gx: ix = gx - 1
        if iy >= gy: iy = gy - 1
        if iz >= gz: iz = gz - 1
        cid = (ix * gy + iy) * gz + iz
        cell_of[i] = cid
        counts[cid + 1] += 1
    for i in range(ncells):
        counts[i + 1] += counts[i]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] order = np.empty(nt, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] fill = counts[:ncells].copy()
    # Stable counting sort keeps within-cell entries in ascending index order.
    for i in range(nt):
        cid = cell_of[i]
        order[fill[cid]] = i
        fill[cid] += 1

    # --- queries ------------------------------------------------------------
    cdef double px, py, pz, dx, dy, dz, d2, best
    cdef Py_ssize_t besti, qx, qy, qz, r, ax, ay, az, k, tix
    cdef Py_ssize_t x0, x1, y0, y1, z0, z1
    cdef Py_ssize_t max_ring = gx
    if gy > max_ring: max_ring = gy
    if gz > max_ring: max_ring = gz

    for i in range(nq):
        px = q[i, 0]; py = q[i, 1]; pz = q[i, 2]
        qx = <Py_ssize_t> floor((px - minx) / cell)
        qy = <Py_ssize_t> floor((py - miny) / cell)
        qz = <Py_ssize_t> floor((pz - minz) / cell)
        if qx < 0: qx = 0
        if qx >= gx: qx = gx - 1
        if qy < 0: qy = 0
        if qy >= gy: qy = gy - 1
        if qz < 0: qz = 0
        if qz >= gz: qz = gz - 1
        best = np.inf
        besti = -1
        for r in range(max_ring + 1):
            if besti >= 0 and best <= (r * cell) * (r * cell):
                break
            x0 = qx - r if qx - r > 0 else 0
            x1 = qx + r if qx + r < gx - 1 else gx - 1
            y0 = qy - r if qy - r > 0 else 0
            y1 = qy + r if qy + r < gy - 1 else gy - 1
            z0 = qz - r if qz - r > 0 else 0
            z1 = qz + r if qz + r < gz - 1 else gz - 1
            for ax in range(x0, x1 + 1):
                for ay in range(y0, y1 + 1):
                    for az in range(z0, z1 + 1):
                        # Only the shell of the ring is new at radius r.
                        if r > 0 and (
                            ax != qx - r and ax != qx + r
                            and ay != qy - r and ay != qy + r
                            and az != qz - r and az != qz + r
                        ):
                            continue
                        cid = (ax * gy + ay) * gz + az
                        for k in range(counts[cid], counts[cid + 1]):
                            tix = order[k]
                            dx = px - t[tix, 0]
                            dy = py - t[tix, 1]
                            dz = pz - t[tix, 2]
                            d2 = dx * dx + dy * dy + dz * dz
                            if d2 < best or (d2 == best and tix < besti):
                                best = d2
                                besti = tix
        out_idx[i] = besti
        out_d2[i] = best
    return out_idx, out_d2
