"""Planar Delaunay triangulation, alpha complexes and exact alpha-shape IoU.

Shapes are kept as bags of non-overlapping triangles.  Intersection areas
are computed exactly by clipping every candidate triangle pair against
each other (convex/convex clipping), so IoU needs no rasterisation.
"""
from dataclasses import dataclass

import numpy as np
from scipy.spatial import Delaunay, QhullError

from . import _accel
from ._accel import njit
from .errors import DegenerateInput

TOL = 1e-9
_CLIP_BUF = 24


@dataclass(frozen=True)
class Triangulation:
    """Delaunay triangulation: de-duplicated points and CCW index triples."""

    points: np.ndarray
    triangles: np.ndarray

    @property
    def scale(self):
        return _extent(self.points)

    def coords(self):
        return self.points[self.triangles]

    def areas(self):
        return triangle_areas(self.coords())

    def circumradii(self):
        return circumradii(self.coords())

    def edges(self):
        """Unique undirected edges as sorted index pairs."""
        t = self.triangles
        e = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        e.sort(axis=1)
        return np.unique(e, axis=0)


@dataclass(frozen=True)
class AlphaShape:
    """Triangles of an alpha complex, as a ``(m, 3, 2)`` coordinate array.

    ``indices`` points back into the generating triangulation's triangle
    list when the shape came from :func:`alpha_complex`.
    """

    triangles: np.ndarray
    alpha: float
    indices: np.ndarray = None

    def __len__(self):
        return len(self.triangles)

    @property
    def is_empty(self):
        return len(self.triangles) == 0

    def contains(self, points):
        """Boolean mask of points lying in (or on) any triangle."""
        return points_in_triangles(np.asarray(points, dtype=float), self.triangles)


def _extent(points):
    if len(points) == 0:
        return 1.0
    span = float(np.max(np.ptp(points, axis=0)))
    return span if span > 0 else 1.0


def triangle_areas(tri, signed=False):
    a, b, c = tri[:, 0], tri[:, 1], tri[:, 2]
    s = 0.5 * ((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1])
               - (c[:, 0] - a[:, 0]) * (b[:, 1] - a[:, 1]))
    return s if signed else np.abs(s)


def circumradii(tri):
    a, b, c = tri[:, 0], tri[:, 1], tri[:, 2]
    la = np.linalg.norm(b - c, axis=1)
    lb = np.linalg.norm(c - a, axis=1)
    lc = np.linalg.norm(a - b, axis=1)
    area = triangle_areas(tri)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = la * lb * lc / (4.0 * area)
    return np.where(area > 0, r, np.inf)


def _dedupe(points):
    lo = points.min(axis=0)
    scale = _extent(points)
    keys = np.round((points - lo) / (scale * TOL)).astype(np.int64)
    _, first = np.unique(keys, axis=0, return_index=True)
    return points[np.sort(first)]


def _collinear(points):
    centered = (points - points.mean(axis=0)) / _extent(points)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    off_line = np.abs(centered @ vt[-1])
    return off_line.max() <= TOL


def delaunay_triangulate(points):
    """Delaunay triangulation of a planar point set.

    Points closer than 1e-9 (relative to the bounding box) are merged.
    Raises :class:`DegenerateInput` for fewer than three distinct points or
    a collinear set.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise DegenerateInput(f"expected (n, 2) points, got shape {pts.shape}")
    if len(pts) < 3:
        raise DegenerateInput(f"need at least 3 points, got {len(pts)}")
    pts = _dedupe(pts)
    if len(pts) < 3:
        raise DegenerateInput("fewer than 3 distinct points")
    if _collinear(pts):
        raise DegenerateInput("points are collinear")
    try:
        simplices = Delaunay(pts).simplices.astype(np.int64)
    except QhullError as exc:
        raise DegenerateInput(str(exc)) from exc

    signed = triangle_areas(pts[simplices], signed=True)
    keep = np.abs(signed) > 1e-12 * _extent(pts) ** 2
    simplices = simplices[keep]
    flip = signed[keep] < 0
    simplices[flip] = simplices[flip][:, [0, 2, 1]]
    return Triangulation(pts, simplices)


def alpha_complex(tri, alpha):
    """Keep the triangles whose circumradius is at most ``alpha``."""
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    r = tri.circumradii()
    keep = np.flatnonzero(r <= alpha + TOL * tri.scale)
    return AlphaShape(tri.points[tri.triangles[keep]], float(alpha), keep)


def select_alpha(points, tri=None):
    """Twice the mean Delaunay edge length of ``points``."""
    if tri is None:
        tri = delaunay_triangulate(points)
    e = tri.edges()
    lengths = np.linalg.norm(tri.points[e[:, 0]] - tri.points[e[:, 1]], axis=1)
    return 2.0 * float(lengths.mean())


def alpha_shape(points, alpha=None):
    """Alpha shape of ``points``; ``alpha`` defaults to :func:`select_alpha`."""
    tri = delaunay_triangulate(points)
    if alpha is None:
        alpha = select_alpha(points, tri)
    return alpha_complex(tri, alpha)


def shape_area(shape):
    if shape.is_empty:
        return 0.0
    return float(triangle_areas(shape.triangles).sum())


def points_in_triangles(points, tris):
    """Mask of points inside at least one triangle (CCW or CW)."""
    inside = np.zeros(len(points), dtype=bool)
    if len(tris) == 0:
        return inside
    x, y = points[:, 0:1], points[:, 1:2]
    chunk = max(1, 2_000_000 // max(1, len(tris)))
    for s in range(0, len(points), chunk):
        px, py = x[s:s + chunk], y[s:s + chunk]
        sides = []
        for k in range(3):
            a = tris[:, k]
            b = tris[:, (k + 1) % 3]
            sides.append((b[:, 0] - a[:, 0]) * (py - a[:, 1])
                         - (b[:, 1] - a[:, 1]) * (px - a[:, 0]))
        s0, s1, s2 = sides
        ccw = (s0 >= 0) & (s1 >= 0) & (s2 >= 0)
        cw = (s0 <= 0) & (s1 <= 0) & (s2 <= 0)
        inside[s:s + chunk] = np.any(ccw | cw, axis=1)
    return inside


def _ccw(tris):
    tris = np.array(tris, dtype=float, copy=True)
    flip = triangle_areas(tris, signed=True) < 0
    tris[flip] = tris[flip][:, [0, 2, 1]]
    return tris


# -- intersection kernels ---------------------------------------------------

@njit(cache=True)
def _clip_pair_area_nb(a, b, poly, out):
    n = 3
    for i in range(3):
        poly[i, 0] = a[i, 0]
        poly[i, 1] = a[i, 1]
    for e in range(3):
        px, py = b[e, 0], b[e, 1]
        ex = b[(e + 1) % 3, 0] - px
        ey = b[(e + 1) % 3, 1] - py
        m = 0
        for i in range(n):
            j = (i + 1) % n
            cx, cy = poly[i, 0], poly[i, 1]
            nx, ny = poly[j, 0], poly[j, 1]
            dc = ex * (cy - py) - ey * (cx - px)
            dn = ex * (ny - py) - ey * (nx - px)
            cin = dc >= 0.0
            nin = dn >= 0.0
            if cin != nin and m < out.shape[0]:
                t = dc / (dc - dn)
                out[m, 0] = cx + t * (nx - cx)
                out[m, 1] = cy + t * (ny - cy)
                m += 1
            if nin and m < out.shape[0]:
                out[m, 0] = nx
                out[m, 1] = ny
                m += 1
        n = m
        if n < 3:
            return 0.0
        for i in range(n):
            poly[i, 0] = out[i, 0]
            poly[i, 1] = out[i, 1]
    s = 0.0
    for i in range(n):
        j = (i + 1) % n
        s += poly[i, 0] * poly[j, 1] - poly[j, 0] * poly[i, 1]
    return 0.5 * abs(s)


@njit(cache=True)
def _intersection_area_nb(A, B):
    poly = np.empty((_CLIP_BUF, 2))
    out = np.empty((_CLIP_BUF, 2))
    total = 0.0
    for i in range(A.shape[0]):
        ax0 = min(A[i, 0, 0], A[i, 1, 0], A[i, 2, 0])
        ax1 = max(A[i, 0, 0], A[i, 1, 0], A[i, 2, 0])
        ay0 = min(A[i, 0, 1], A[i, 1, 1], A[i, 2, 1])
        ay1 = max(A[i, 0, 1], A[i, 1, 1], A[i, 2, 1])
        for j in range(B.shape[0]):
            if max(B[j, 0, 0], B[j, 1, 0], B[j, 2, 0]) <= ax0:
                continue
            if min(B[j, 0, 0], B[j, 1, 0], B[j, 2, 0]) >= ax1:
                continue
            if max(B[j, 0, 1], B[j, 1, 1], B[j, 2, 1]) <= ay0:
                continue
            if min(B[j, 0, 1], B[j, 1, 1], B[j, 2, 1]) >= ay1:
                continue
            total += _clip_pair_area_nb(A[i], B[j], poly, out)
    return total


def _clip_pairs_area_np(A, B):
    """Areas of A[k] ∩ B[k] for paired CCW triangles, vectorised over k."""
    P = len(A)
    rows = np.arange(P)
    poly = np.zeros((P, _CLIP_BUF, 2))
    poly[:, :3] = A
    n = np.full(P, 3)
    for e in range(3):
        p = B[:, e]
        edge = B[:, (e + 1) % 3] - p
        rel = poly - p[:, None, :]
        d = edge[:, None, 0] * rel[..., 1] - edge[:, None, 1] * rel[..., 0]
        out = np.zeros_like(poly)
        m = np.zeros(P, dtype=np.int64)
        for i in range(int(n.max(initial=0))):
            valid = i < n
            j = np.where(valid, (i + 1) % np.maximum(n, 1), 0)
            cur, nxt = poly[:, i], poly[rows, j]
            dc, dn = d[:, i], d[rows, j]
            cin, nin = dc >= 0, dn >= 0
            cross = valid & (cin != nin) & (m < _CLIP_BUF)
            with np.errstate(divide="ignore", invalid="ignore"):
                t = np.where(cross, dc / (dc - dn), 0.0)
            hit = cur + t[:, None] * (nxt - cur)
            out[rows[cross], m[cross]] = hit[cross]
            m += cross
            take = valid & nin & (m < _CLIP_BUF)
            out[rows[take], m[take]] = nxt[take]
            m += take
        poly, n = out, np.where(m < 3, 0, m)
    idx = np.arange(_CLIP_BUF)
    nxt_idx = (idx[None, :] + 1) % np.maximum(n, 1)[:, None]
    mask = idx[None, :] < n[:, None]
    xn = np.take_along_axis(poly[..., 0], nxt_idx, axis=1)
    yn = np.take_along_axis(poly[..., 1], nxt_idx, axis=1)
    terms = np.where(mask, poly[..., 0] * yn - xn * poly[..., 1], 0.0)
    return 0.5 * np.abs(terms.sum(axis=1))


def _intersection_area_np(A, B):
    lo_a, hi_a = A.min(axis=1), A.max(axis=1)
    lo_b, hi_b = B.min(axis=1), B.max(axis=1)
    overlap = ((hi_b[None, :, 0] > lo_a[:, None, 0]) & (lo_b[None, :, 0] < hi_a[:, None, 0])
               & (hi_b[None, :, 1] > lo_a[:, None, 1]) & (lo_b[None, :, 1] < hi_a[:, None, 1]))
    ia, ib = np.nonzero(overlap)
    if len(ia) == 0:
        return 0.0
    return float(_clip_pairs_area_np(A[ia], B[ib]).sum())


def intersection_area(a, b, use_numba=None):
    """Exact area of the overlap between two alpha shapes."""
    if a.is_empty or b.is_empty:
        return 0.0
    A, B = _ccw(a.triangles), _ccw(b.triangles)
    if use_numba is None:
        use_numba = _accel.USE_NUMBA
    if use_numba:
        return float(_intersection_area_nb(A, B))
    return _intersection_area_np(A, B)


def iou(a, b, use_numba=None):
    """Intersection over union of two alpha shapes; 0 when both are empty."""
    inter = intersection_area(a, b, use_numba)
    union = shape_area(a) + shape_area(b) - inter
    if union <= 0.0:
        return 0.0
    return float(min(1.0, max(0.0, inter / union)))
