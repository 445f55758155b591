"""Bowyer-Watson Delaunay triangulation with an exact in-circle fallback.

Points are inserted in lexicographic order into a large enclosing
super-triangle. A triangle is destroyed only when the new point lies strictly
inside its circumcircle, so cocircular configurations resolve according to
that insertion order.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .errors import DegenerateInput, DuplicatePoints

__all__ = ["delaunay_triangles", "delaunay", "incircle", "orient"]

_SUPER_SCALE = 1.0e4
# relative filter for the floating-point in-circle determinant; anything
# closer to zero than this is re-evaluated exactly
_INCIRCLE_EPS = 1.0e-10


def orient(a, b, c) -> float:
    """Twice the signed area of ``abc``; positive when counter-clockwise."""
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def incircle(a, b, c, d) -> int:
    """Exact in-circle predicate for a counter-clockwise triangle ``abc``.

    Returns +1 if ``d`` is strictly inside the circumcircle, -1 if strictly
    outside and 0 if the four points are cocircular.
    """
    ax, ay, bx, by, cx, cy, dx, dy = (Fraction(float(v)) for v in (*a, *b, *c, *d))
    adx, ady = ax - dx, ay - dy
    bdx, bdy = bx - dx, by - dy
    cdx, cdy = cx - dx, cy - dy
    det = (
        (adx * adx + ady * ady) * (bdx * cdy - cdx * bdy)
        - (bdx * bdx + bdy * bdy) * (adx * cdy - cdx * ady)
        + (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady)
    )
    return (det > 0) - (det < 0)


def _inside_many(pts: np.ndarray, tri: np.ndarray, d: np.ndarray) -> np.ndarray:
    a, b, c = pts[tri[:, 0]] - d, pts[tri[:, 1]] - d, pts[tri[:, 2]] - d
    alift = (a * a).sum(1)
    blift = (b * b).sum(1)
    clift = (c * c).sum(1)
    bc = b[:, 0] * c[:, 1] - c[:, 0] * b[:, 1]
    ac = a[:, 0] * c[:, 1] - c[:, 0] * a[:, 1]
    ab = a[:, 0] * b[:, 1] - b[:, 0] * a[:, 1]
    det = alift * bc - blift * ac + clift * ab
    perm = (
        alift * (np.abs(b[:, 0] * c[:, 1]) + np.abs(c[:, 0] * b[:, 1]))
        + blift * (np.abs(a[:, 0] * c[:, 1]) + np.abs(c[:, 0] * a[:, 1]))
        + clift * (np.abs(a[:, 0] * b[:, 1]) + np.abs(b[:, 0] * a[:, 1]))
    )
    inside = det > _INCIRCLE_EPS * perm
    unsure = np.flatnonzero(np.abs(det) <= _INCIRCLE_EPS * perm)
    for k in unsure:
        t = tri[k]
        inside[k] = incircle(pts[t[0]], pts[t[1]], pts[t[2]], d) > 0
    return inside


def _validate(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise DegenerateInput(f"expected an (n, 2) array of points, got shape {pts.shape}")
    if pts.shape[0] < 3:
        raise DegenerateInput("at least 3 points are required")
    if not np.all(np.isfinite(pts)):
        raise DegenerateInput("points must be finite")
    if np.unique(pts, axis=0).shape[0] != pts.shape[0]:
        raise DuplicatePoints("input contains repeated points")
    p0 = pts[0]
    far = pts[np.argmax(((pts - p0) ** 2).sum(1))]
    if not any(orient(p0, far, q) != 0 for q in pts):
        raise DegenerateInput("all points are collinear")
    return pts


def delaunay_triangles(points) -> np.ndarray:
    """Delaunay triangles as a ``(T, 3)`` array of point indices, each counter-clockwise.

    Triangles are returned sorted by their (rotated so smallest-first) vertex
    triples.
    """
    pts = _validate(points)
    tri = _canonical_rotation(_bowyer_watson(pts, keep_super=False))
    return tri[np.lexsort(tri.T[::-1])]


def _canonical_rotation(tri: np.ndarray) -> np.ndarray:
    if tri.size == 0:
        return tri.reshape(0, 3)
    k = np.argmin(tri, axis=1)
    idx = (k[:, None] + np.arange(3)[None, :]) % 3
    return np.take_along_axis(tri, idx, axis=1)


def delaunay(points) -> np.ndarray:
    """Edges of the Delaunay triangulation as a sorted ``(E, 2)`` array with ``i < j``.

    Besides the edges of the returned triangles this includes every
    point-to-point edge of the enclosing triangulation, which restores the
    convex-hull edges shared with the super-triangle.
    """
    pts = _validate(points)
    n = pts.shape[0]
    # keep triangles touching the super-triangle so hull edges survive
    tris = _bowyer_watson(pts, keep_super=True)
    e = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
    e = e[(e < n).all(axis=1)]
    e = np.unique(np.sort(e, axis=1), axis=0)
    return e


def _bowyer_watson(pts: np.ndarray, keep_super: bool) -> np.ndarray:
    n = pts.shape[0]
    lo, hi = pts.min(0), pts.max(0)
    centre = 0.5 * (lo + hi)
    span = max(float((hi - lo).max()), 1e-300)
    big = _SUPER_SCALE * span
    super_pts = centre + big * np.array([[-3.0, -3.0], [3.0, -3.0], [0.0, 3.0]])
    allpts = np.vstack([pts, super_pts])

    tri_arr = np.array([(n, n + 1, n + 2)], dtype=np.int64)
    alive_arr = np.ones(1, dtype=bool)

    for p in np.lexsort((pts[:, 1], pts[:, 0])):
        d = allpts[p]
        live = np.flatnonzero(alive_arr)
        bad = live[_inside_many(allpts, tri_arr[live], d)]
        edges = set()
        for t in bad:
            a, b, c = tri_arr[t]
            edges.update(((a, b), (b, c), (c, a)))
        boundary = sorted(e for e in edges if (e[1], e[0]) not in edges)
        alive_arr[bad] = False
        new = np.array([(a, b, p) for a, b in boundary], dtype=np.int64)
        tri_arr = np.vstack([tri_arr, new])
        alive_arr = np.concatenate([alive_arr, np.ones(len(new), dtype=bool)])
        if alive_arr.size > 4 * (np.count_nonzero(alive_arr) + 16):
            tri_arr = tri_arr[alive_arr]
            alive_arr = np.ones(tri_arr.shape[0], dtype=bool)

    out = tri_arr[alive_arr]
    if not keep_super:
        out = out[(out < n).all(axis=1)]
    return out
