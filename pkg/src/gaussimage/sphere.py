"""Spherical geometry on S^2: arcs, convex polygons, caps and stratified regions.

Directions are plain ``numpy`` arrays of shape ``(3,)`` with unit norm.
Regions are unions of three strata (points, geodesic arcs, convex polygons),
which is exactly the shape of a normal cone or a radial face projection of a
polytope. All sign predicates use ``EPS_GEOM`` unless a caller overrides it.
"""
from __future__ import annotations

import math
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linprog

from .errors import AntipodalInput, DegeneratePolygon, EmptyRegion, NotInHemisphere

EPS_NORM = 1e-12
EPS_GEOM = 1e-9
# tolerance used when clipping for area booleans (not membership)
EPS_CLIP = 1e-13
_ROUND = 10


def cross(a, b) -> np.ndarray:
    """Cross product along the last axis; much cheaper than np.cross for small inputs."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim == 1 and b.ndim == 1:
        a0, a1, a2 = a.tolist()
        b0, b1, b2 = b.tolist()
        return np.array([a1 * b2 - a2 * b1, a2 * b0 - a0 * b2, a0 * b1 - a1 * b0])
    a0, a1, a2 = a[..., 0], a[..., 1], a[..., 2]
    b0, b1, b2 = b[..., 0], b[..., 1], b[..., 2]
    return np.stack([a1 * b2 - a2 * b1, a2 * b0 - a0 * b2, a0 * b1 - a1 * b0], axis=-1)


def unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n < 1e-300:
        raise ValueError("cannot normalize the zero vector")
    return v / n


def unit_vec(x: float, y: float, z: float) -> np.ndarray:
    return unit((x, y, z))


def _unit_rows(P: np.ndarray) -> np.ndarray:
    P = np.atleast_2d(np.asarray(P, dtype=float))
    return P / np.linalg.norm(P, axis=1)[:, None]


def _angle(P: np.ndarray, a: np.ndarray) -> np.ndarray:
    """Arc distance from each row of P to a (atan2 form, accurate near 0 and pi)."""
    c = cross(P, a)
    return np.arctan2(np.linalg.norm(c, axis=-1), P @ a)


def _row_angles(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    return np.arctan2(np.linalg.norm(cross(P, Q), axis=1), np.sum(P * Q, axis=1))


def arc_distance(u, v) -> float:
    """Great-circle distance between two unit vectors, in radians."""
    u0, u1, u2 = np.asarray(u, dtype=float).tolist()
    v0, v1, v2 = np.asarray(v, dtype=float).tolist()
    c = math.sqrt((u1 * v2 - u2 * v1) ** 2 + (u2 * v0 - u0 * v2) ** 2 + (u0 * v1 - u1 * v0) ** 2)
    return math.atan2(c, u0 * v0 + u1 * v1 + u2 * v2)


def geodesic_mean(u, v, t: float) -> np.ndarray:
    """Radial projection of ``(1-t) u + t v``; traces the minor arc from u to v."""
    w = (1.0 - t) * np.asarray(u, dtype=float) + t * np.asarray(v, dtype=float)
    n = np.linalg.norm(w)
    if n < 1e-9:
        raise AntipodalInput("(1-t)u + tv vanishes; inputs are antipodal")
    return w / n


def _slerp_samples(a: np.ndarray, b: np.ndarray, spacing: float) -> np.ndarray:
    length = arc_distance(a, b)
    n = max(1, int(math.ceil(length / spacing)))
    if length < 1e-15:
        return a[None, :].copy()
    t = b - np.dot(a, b) * a
    t = t / np.linalg.norm(t)
    th = np.linspace(0.0, length, n + 1)
    return np.cos(th)[:, None] * a + np.sin(th)[:, None] * t


class GeodesicArc:
    """Minor great-circle arc between two non-antipodal unit vectors."""

    __slots__ = ("a", "b", "__dict__")

    def __init__(self, a, b):
        self.a = unit(a)
        self.b = unit(b)
        if np.dot(self.a, self.b) <= -1.0 + EPS_NORM:
            raise AntipodalInput("arc endpoints are antipodal")
        if arc_distance(self.a, self.b) < EPS_NORM:
            raise DegeneratePolygon("arc endpoints coincide")

    def __repr__(self):
        return f"GeodesicArc({self.a.round(6).tolist()}, {self.b.round(6).tolist()})"

    @cached_property
    def normal(self) -> np.ndarray:
        return unit(cross(self.a, self.b))

    @cached_property
    def _span(self):
        # P lies over the arc iff (n x a) . P >= 0 and (b x n) . P >= 0
        return cross(self.normal, self.a), cross(self.b, self.normal)

    @cached_property
    def length(self) -> float:
        return arc_distance(self.a, self.b)

    def distance(self, P) -> np.ndarray:
        P = np.atleast_2d(P)
        n = self.normal
        s = P @ n
        lo, hi = self._span
        on_span = (P @ lo >= 0) & (P @ hi >= 0)
        on_span &= np.abs(s) < 1.0 - 1e-15
        d_gc = np.arcsin(np.clip(np.abs(s), 0.0, 1.0))
        d_end = np.minimum(_angle(P, self.a), _angle(P, self.b))
        return np.where(on_span, d_gc, d_end)

    def contains(self, P, eps: float = EPS_GEOM) -> np.ndarray:
        return self.distance(P) <= eps

    def sample(self, spacing: float) -> np.ndarray:
        return _slerp_samples(self.a, self.b, spacing)

    def key(self):
        ka = tuple(np.round(self.a, _ROUND) + 0.0)
        kb = tuple(np.round(self.b, _ROUND) + 0.0)
        return ("arc",) + tuple(sorted((ka, kb)))

    def reversed(self) -> "GeodesicArc":
        return GeodesicArc(self.b, self.a)


class Cap:
    """Open spherical cap ``{v : center . v > cos(radius)}``."""

    def __init__(self, center, radius: float):
        if not 0.0 < radius < math.pi:
            raise ValueError("cap radius must lie in (0, pi)")
        self.center = unit(center)
        self.radius = float(radius)

    def __repr__(self):
        return f"Cap({self.center.round(6).tolist()}, {self.radius:.6g})"

    def contains(self, P, closed: bool = True, eps: float = EPS_GEOM) -> np.ndarray:
        d = _angle(np.atleast_2d(P), self.center)
        if closed:
            return d <= self.radius + eps
        return d < self.radius

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Uniform (area-weighted) samples from the closed cap."""
        z = rng.uniform(math.cos(self.radius), 1.0, n)
        phi = rng.uniform(0.0, 2 * math.pi, n)
        r = np.sqrt(np.clip(1 - z * z, 0, None))
        local = np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
        return local @ _frame(self.center)

    def to_polygon(self, spacing: float) -> "SphericalPolygon":
        """Inscribed polygon whose Hausdorff gap to the cap is below ``spacing``."""
        # sagitta r(1 - cos(pi/k)) <= spacing
        k = 8
        while self.radius * (1 - math.cos(math.pi / k)) > spacing:
            k *= 2
        phi = np.linspace(0, 2 * math.pi, k, endpoint=False)
        s, c = math.sin(self.radius), math.cos(self.radius)
        local = np.column_stack([s * np.cos(phi), s * np.sin(phi), np.full(k, c)])
        return SphericalPolygon(local @ _frame(self.center))


def _frame(w: np.ndarray) -> np.ndarray:
    """Rows (e1, e2, w): a right-handed orthonormal frame with third axis w."""
    w = unit(w)
    helper = np.array([1.0, 0, 0]) if abs(w[0]) < 0.9 else np.array([0, 1.0, 0])
    e1 = unit(cross(helper, w))
    e2 = cross(w, e1)
    return np.vstack([e1, e2, w])


def _hemisphere_witness(V: np.ndarray) -> tuple[np.ndarray, float]:
    """Direction w maximizing min_i w . v_i (within the unit box)."""
    w = unit(V.sum(axis=0)) if np.linalg.norm(V.sum(axis=0)) > 1e-12 else None
    if w is not None and np.min(V @ w) > 1e-6:
        return w, float(np.min(V @ w))
    # maximize s subject to  v_i . w >= s,  -1 <= w <= 1
    k = len(V)
    c = np.array([0, 0, 0, -1.0])
    A = np.hstack([-V, np.ones((k, 1))])
    res = linprog(c, A_ub=A, b_ub=np.zeros(k), bounds=[(-1, 1)] * 3 + [(None, 1)])
    w = res.x[:3]
    if np.linalg.norm(w) < 1e-12:
        return np.array([0, 0, 1.0]), -1.0
    w = unit(w)
    return w, float(np.min(V @ w))


class SphericalPolygon:
    """Convex spherical polygon contained in an open hemisphere.

    Vertices are stored counterclockwise as seen from outside the sphere; a
    clockwise input ring is reversed. ``edge_normals[i]`` is the unit normal of
    the great circle through vertices i, i+1, pointing into the polygon.
    """

    def __init__(self, vertices, check: bool = True):
        V = _unit_rows(vertices)
        if len(V) < 3:
            raise DegeneratePolygon("a polygon needs at least three vertices")
        if check:
            nxt = np.roll(V, -1, axis=0)
            if np.min(_row_angles(V, nxt)) < EPS_NORM:
                raise DegeneratePolygon("polygon has a zero-length edge")
            w, margin = _hemisphere_witness(V)
            if margin <= EPS_GEOM:
                raise NotInHemisphere("polygon is not contained in an open hemisphere")
            turns = np.einsum("ij,ij->i", cross(np.roll(V, 1, axis=0), V), nxt)
            if np.sum(turns) < 0:
                V = V[::-1].copy()
                nxt = np.roll(V, -1, axis=0)
                turns = np.einsum("ij,ij->i", cross(np.roll(V, 1, axis=0), V), nxt)
            if np.any(turns < -EPS_GEOM):
                raise DegeneratePolygon("polygon is not spherically convex")
            if np.all(np.abs(turns) <= EPS_GEOM):
                raise DegeneratePolygon("polygon vertices lie on one great circle")
        self.vertices = V
        self.vertices.setflags(write=False)

    def __repr__(self):
        return f"SphericalPolygon({len(self.vertices)} vertices)"

    def __len__(self):
        return len(self.vertices)

    @cached_property
    def edge_normals(self) -> np.ndarray:
        V = self.vertices
        N = cross(V, np.roll(V, -1, axis=0))
        return N / np.linalg.norm(N, axis=1)[:, None]

    @cached_property
    def center(self) -> np.ndarray:
        """A pole with every vertex strictly in its open hemisphere.

        The vertex mean usually qualifies; long thin polygons reaching far
        around the sphere fall back to the max-min direction.
        """
        return _hemisphere_witness(self.vertices)[0]

    @cached_property
    def bounding_radius(self) -> float:
        return float(np.max(_angle(self.vertices, self.center)))

    @cached_property
    def area(self) -> float:
        return polygon_area(self)

    def edges(self) -> list[GeodesicArc]:
        V = self.vertices
        return [GeodesicArc(V[i], V[(i + 1) % len(V)]) for i in range(len(V))]

    def contains(self, P, eps: float = EPS_GEOM) -> np.ndarray:
        P = np.atleast_2d(P)
        inside = np.all(P @ self.edge_normals.T >= -eps, axis=1)
        return inside & (P @ self.center > 0)

    def distance(self, P) -> np.ndarray:
        P = np.atleast_2d(P)
        d = np.zeros(len(P))
        out = ~self.contains(P, eps=0.0)
        if out.any():
            d[out] = _polyline_distance(P[out], self.vertices, self.edge_normals)
        return d

    def diameter(self) -> float:
        V = self.vertices
        return float(np.max(np.arctan2(
            np.linalg.norm(cross(V[:, None, :], V[None, :, :]), axis=2), V @ V.T)))

    def sample_boundary(self, spacing: float) -> np.ndarray:
        V = self.vertices
        return np.vstack([_slerp_samples(V[i], V[(i + 1) % len(V)], spacing) for i in range(len(V))])

    def sample(self, spacing: float) -> np.ndarray:
        """Points such that every point of the polygon is within ``spacing`` of one."""
        h = spacing / 2.0
        F = _frame(self.center)
        V = self.vertices
        loc = V @ F.T
        xy = loc[:, :2] / loc[:, 2:3]
        lo, hi = xy.min(axis=0), xy.max(axis=0)
        ys = np.arange(lo[1], hi[1] + h, h)
        pts = [self.sample_boundary(h)]
        G = _convex_grid(xy, ys, lo[0], h)
        if len(G):
            P = G[:, :1] * F[0] + G[:, 1:2] * F[1] + F[2]
            pts.append(_unit_rows(P))
        return np.vstack(pts)

    def key(self):
        R = np.round(self.vertices, _ROUND) + 0.0
        rows = [tuple(r) for r in R]
        i = min(range(len(rows)), key=lambda j: rows[j])
        return ("poly",) + tuple(rows[i:] + rows[:i])


def _convex_grid(xy: np.ndarray, ys: np.ndarray, x0: float, h: float) -> np.ndarray:
    """Grid points (spacing h, anchored at x0) inside a CCW convex 2D polygon."""
    e = np.roll(xy, -1, axis=0) - xy
    # edge i keeps points with  e_x (y - v_y) - e_y (x - v_x) >= 0
    lo = np.full(len(ys), -np.inf)
    hi = np.full(len(ys), np.inf)
    for (vx, vy), (ex, ey) in zip(xy, e):
        rhs = ex * (ys - vy) + ey * vx      # ey * x <= rhs
        if ey > 1e-15:
            hi = np.minimum(hi, rhs / ey)
        elif ey < -1e-15:
            lo = np.maximum(lo, rhs / ey)
        else:
            bad = ex * (ys - vy) < 0
            hi[bad] = -np.inf
    rows = []
    for y, a, b in zip(ys, lo, hi):
        if b < a:
            continue
        i0 = math.ceil((a - x0) / h)
        i1 = math.floor((b - x0) / h)
        if i1 >= i0:
            xs = x0 + h * np.arange(i0, i1 + 1)
            rows.append(np.column_stack([xs, np.full(len(xs), y)]))
    return np.vstack(rows) if rows else np.zeros((0, 2))


def _polyline_distance(P: np.ndarray, V: np.ndarray, N: np.ndarray) -> np.ndarray:
    """Distance from rows of P to the closed ring of arcs V[i] -> V[i+1] with normals N."""
    return _edges_distance(P, V, np.roll(V, -1, axis=0), N)


def _edges_distance(P: np.ndarray, A: np.ndarray, B: np.ndarray, N: np.ndarray) -> np.ndarray:
    """Distance from rows of P to the union of minor arcs A[k] -> B[k] with unit normals N[k]."""
    lo = cross(N, A)
    hi = cross(B, N)
    out = np.empty(len(P))
    step = max(1, 2_000_000 // (3 * len(A)))
    for i in range(0, len(P), step):
        Q = P[i:i + step]
        on_span = (Q @ lo.T >= 0) & (Q @ hi.T >= 0)
        d_gc = np.arcsin(np.clip(np.abs(Q @ N.T), 0.0, 1.0))
        d_end = np.minimum(_dot_angle(Q, A), _dot_angle(Q, B))
        out[i:i + step] = np.min(np.where(on_span, d_gc, d_end), axis=1)
    return out


def _pairwise_angle(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    return _dot_angle(P, Q)


def _dot_angle(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Angles between all rows of P and Q (unit vectors).

    arccos of the dot product, with small angles recomputed from chords where
    arccos loses precision.
    """
    D = np.arccos(np.clip(P @ Q.T, -1.0, 1.0))
    i, j = np.nonzero(D < 1e-3)
    if len(i):
        D[i, j] = 2.0 * np.arcsin(np.clip(np.linalg.norm(P[i] - Q[j], axis=1) / 2.0, 0.0, 1.0))
    return D


def _arc_distance_raw(P, a, b, n):
    s = P @ n
    Q = P - s[:, None] * n
    on_span = (cross(a, Q) @ n >= 0) & (cross(Q, b) @ n >= 0)
    on_span &= np.linalg.norm(Q, axis=1) > 1e-15
    d_gc = np.arcsin(np.clip(np.abs(s), 0.0, 1.0))
    d_end = np.minimum(_angle(P, a), _angle(P, b))
    return np.where(on_span, d_gc, d_end)


def polygon_area(p: SphericalPolygon) -> float:
    """Girard area: sum of interior angles minus (k - 2) pi."""
    V = p.vertices
    k = len(V)
    prev = np.roll(V, 1, axis=0)
    nxt = np.roll(V, -1, axis=0)
    t_prev = prev - np.sum(prev * V, axis=1)[:, None] * V
    t_next = nxt - np.sum(nxt * V, axis=1)[:, None] * V
    if np.min(np.linalg.norm(t_prev, axis=1)) < EPS_NORM:
        raise DegeneratePolygon("edge shorter than EPS_NORM")
    ang = np.arctan2(np.einsum("ij,ij->i", cross(t_next, t_prev), V),
                     np.einsum("ij,ij->i", t_next, t_prev))
    ang = np.mod(ang, 2 * math.pi)
    return float(np.sum(ang) - (k - 2) * math.pi)


# ---------------------------------------------------------------------------
# construction helpers that degrade gracefully


def _dedupe_ring(pts: list[np.ndarray], tol: float = 1e-12) -> list[np.ndarray]:
    out: list[np.ndarray] = []
    for p in pts:
        if not out or math.dist(out[-1], p) > tol:
            out.append(p)
    while len(out) > 1 and math.dist(out[0], out[-1]) <= tol:
        out.pop()
    return out


def make_stratum(pts: Sequence[np.ndarray], tol: float = 1e-12):
    """Build a point, arc, or polygon from a convex ring, dropping degeneracies."""
    ring = _dedupe_ring([unit(p) for p in pts], tol)
    if not ring:
        return None
    if len(ring) == 1:
        return ring[0]
    if len(ring) >= 3:
        V = np.array(ring)
        nxt = np.roll(V, -1, axis=0)
        turns = np.einsum("ij,ij->i", cross(np.roll(V, 1, axis=0), V), nxt)
        keep = np.abs(turns) > tol
        if np.count_nonzero(keep) >= 3:
            return SphericalPolygon(V[keep], check=False)
        ring = list(V)
    # collinear: the two mutually farthest points span the arc
    best, pair = -1.0, (0, 1)
    for i in range(len(ring)):
        for j in range(i + 1, len(ring)):
            d = arc_distance(ring[i], ring[j])
            if d > best:
                best, pair = d, (i, j)
    if best <= tol:
        return ring[0]
    return GeodesicArc(ring[pair[0]], ring[pair[1]])


def clip_ring(ring: Sequence[np.ndarray], m: np.ndarray, eps: float) -> list[np.ndarray]:
    """Sutherland-Hodgman step keeping ``{v : m . v >= -eps}`` of a convex ring."""
    out: list[np.ndarray] = []
    k = len(ring)
    if k == 0:
        return out
    d = [float(np.dot(m, p)) for p in ring]
    if k == 1:
        return list(ring) if d[0] >= -eps else []
    for i in range(k):
        j = (i + 1) % k
        if k == 2 and j == 0:
            break
        cur, nx = ring[i], ring[j]
        dc, dn = d[i], d[j]
        if dc >= -eps:
            out.append(cur)
        if (dc > 0 and dn < -eps) or (dc < -eps and dn > 0):
            out.append(unit((dc * nx - dn * cur) / (dc - dn)))
    if k == 2 and d[1] >= -eps:
        out.append(ring[1])
    return out


def clip_polygon(p: SphericalPolygon, normals: Iterable[np.ndarray], eps: float = EPS_CLIP):
    ring = list(p.vertices)
    for m in normals:
        ring = clip_ring(ring, m, eps)
        if not ring:
            return None
    return make_stratum(ring)


def _caps_disjoint(p: SphericalPolygon, q: SphericalPolygon, margin: float = 1e-9) -> bool:
    return arc_distance(p.center, q.center) > p.bounding_radius + q.bounding_radius + margin


def intersect_polygons(p: SphericalPolygon, q: SphericalPolygon, eps: float = EPS_CLIP):
    if _caps_disjoint(p, q):
        return None
    return clip_polygon(p, q.edge_normals, eps)


def _separated(p: SphericalPolygon, q: SphericalPolygon, eps: float = EPS_CLIP) -> bool:
    """True if an edge circle of p or q has the other polygon on its outer side (disjoint interiors)."""
    if np.any(np.all(q.vertices @ p.edge_normals.T <= eps, axis=0)):
        return True
    return bool(np.any(np.all(p.vertices @ q.edge_normals.T <= eps, axis=0)))


def subtract_polygon(p: SphericalPolygon, q: SphericalPolygon, min_area: float = 1e-15) -> list[SphericalPolygon]:
    """Convex pieces of the closure of ``p \\ q`` with positive area."""
    if _caps_disjoint(p, q) or _separated(p, q):
        return [p]
    pieces = []
    ring = list(p.vertices)
    for m in q.edge_normals:
        outside = make_stratum(clip_ring(ring, -m, EPS_CLIP))
        if isinstance(outside, SphericalPolygon) and outside.area > min_area:
            pieces.append(outside)
        ring = clip_ring(ring, m, EPS_CLIP)
        rest = make_stratum(ring) if ring else None
        if not isinstance(rest, SphericalPolygon):
            break
    else:
        return pieces
    return pieces


def disjoint_pieces(polys: Sequence[SphericalPolygon], min_area: float = 1e-15) -> list[SphericalPolygon]:
    """Split a list of convex polygons into interior-disjoint convex pieces."""
    seen = set()
    accepted: list[SphericalPolygon] = []
    for p in polys:
        k = p.key()
        if k in seen:
            continue
        seen.add(k)
        frags = [p]
        for q in accepted:
            nxt = []
            for f in frags:
                nxt.extend(subtract_polygon(f, q, min_area))
            frags = nxt
            if not frags:
                break
        accepted.extend(frags)
    return accepted


def clip_arc(arc: GeodesicArc, normals: Iterable[np.ndarray], eps: float = EPS_GEOM):
    """Part of an arc inside the half-spaces ``m . v >= -eps``: arc, point or None."""
    lo, hi = 0.0, 1.0
    a, b = arc.a, arc.b
    for m in normals:
        fa, fb = float(np.dot(m, a)), float(np.dot(m, b))
        if abs(fb - fa) < 1e-300:
            if fa < -eps:
                return None
            continue
        s = (-eps - fa) / (fb - fa)
        if fb > fa:
            lo = max(lo, s)
        else:
            hi = min(hi, s)
        if lo > hi:
            return None
    lo, hi = max(lo, 0.0), min(hi, 1.0)
    if lo > hi:
        return None
    pa = unit((1 - lo) * a + lo * b)
    pb = unit((1 - hi) * a + hi * b)
    if arc_distance(pa, pb) < EPS_NORM:
        return pa
    return GeodesicArc(pa, pb)


def _arc_arc_intersection(s: GeodesicArc, t: GeodesicArc, eps: float = EPS_GEOM):
    # an arc strictly on one side of the other's great circle cannot meet it
    for x, y in ((s, t), (t, s)):
        ha, hb = float(x.a @ y.normal), float(x.b @ y.normal)
        if min(ha, hb) > eps or max(ha, hb) < -eps:
            return None
    c = cross(s.normal, t.normal)
    if np.linalg.norm(c) < 1e-10:
        # same great circle: overlap via endpoint membership
        pts = [p for p in (s.a, s.b) if t.contains(p, eps)[0]]
        pts += [p for p in (t.a, t.b) if s.contains(p, eps)[0]]
        if not pts:
            return None
        return make_stratum(pts) if len(pts) > 1 else pts[0]
    p = unit(c)
    for cand in (p, -p):
        if s.contains(cand, eps)[0] and t.contains(cand, eps)[0]:
            return cand
    for p in (s.a, s.b):
        if t.contains(p, eps)[0]:
            return p
    for p in (t.a, t.b):
        if s.contains(p, eps)[0]:
            return p
    return None


def strata_intersect(x, y, eps: float = EPS_GEOM) -> bool:
    """Closed intersection test between two strata (point, arc, polygon)."""
    return intersect_strata(x, y, eps) is not None


def intersect_strata(x, y, eps: float = EPS_GEOM):
    if isinstance(x, np.ndarray):
        return x if _stratum_contains(y, x, eps) else None
    if isinstance(y, np.ndarray):
        return y if _stratum_contains(x, y, eps) else None
    if isinstance(x, GeodesicArc) and isinstance(y, GeodesicArc):
        return _arc_arc_intersection(x, y, eps)
    if isinstance(x, SphericalPolygon) and isinstance(y, GeodesicArc):
        x, y = y, x
    if isinstance(x, GeodesicArc):
        if arc_distance(x.a, y.center) > y.bounding_radius + x.length + eps:
            return None
        return clip_arc(x, y.edge_normals, eps)
    if _caps_disjoint(x, y, eps):
        return None
    return clip_polygon(x, y.edge_normals, eps)


def _stratum_contains(s, P, eps: float = EPS_GEOM) -> bool:
    P = np.atleast_2d(P)
    if isinstance(s, np.ndarray):
        return bool(np.all(_angle(P, s) <= eps))
    return bool(np.all(s.distance(P) <= eps)) if isinstance(s, GeodesicArc) else bool(np.all(s.contains(P, eps)))


def stratum_distance(s, P) -> np.ndarray:
    P = np.atleast_2d(P)
    if isinstance(s, np.ndarray):
        return _angle(P, s)
    return s.distance(P)


def stratum_key(s):
    if isinstance(s, np.ndarray):
        return ("pt",) + tuple(np.round(s, _ROUND) + 0.0)
    return s.key()


# ---------------------------------------------------------------------------


class SphericalRegion:
    """Closed subset of S^2 stored as points, arcs and convex polygons."""

    def __init__(self, points=(), arcs=(), polygons=()):
        self.points = tuple(unit(p) for p in points)
        self.arcs = tuple(arcs)
        self.polygons = tuple(polygons)

    @classmethod
    def of(cls, *strata) -> "SphericalRegion":
        pts, arcs, polys = [], [], []
        for s in strata:
            if s is None:
                continue
            if isinstance(s, SphericalRegion):
                pts += s.points
                arcs += s.arcs
                polys += s.polygons
            elif isinstance(s, GeodesicArc):
                arcs.append(s)
            elif isinstance(s, SphericalPolygon):
                polys.append(s)
            else:
                pts.append(np.asarray(s, dtype=float))
        return cls(pts, arcs, polys)

    @classmethod
    def sphere(cls) -> "SphericalRegion":
        polys = []
        for sx in (1, -1):
            for sy in (1, -1):
                for sz in (1, -1):
                    polys.append(SphericalPolygon([[sx, 0, 0], [0, sy, 0], [0, 0, sz]]))
        return cls(polygons=polys)

    @classmethod
    def hemisphere(cls, pole) -> "SphericalRegion":
        """Closed hemisphere ``{v : v . pole >= 0}`` as four triangles."""
        F = _frame(pole)
        e1, e2, w = F
        ring = [e1, e2, -e1, -e2]
        return cls(polygons=[SphericalPolygon([w, ring[i], ring[(i + 1) % 4]]) for i in range(4)])

    def __repr__(self):
        return (f"SphericalRegion(points={len(self.points)}, arcs={len(self.arcs)}, "
                f"polygons={len(self.polygons)})")

    def strata(self) -> list:
        return list(self.points) + list(self.arcs) + list(self.polygons)

    def is_empty(self) -> bool:
        return not (self.points or self.arcs or self.polygons)

    def union(self, *others: "SphericalRegion") -> "SphericalRegion":
        return SphericalRegion.of(self, *others).deduplicated()

    def deduplicated(self) -> "SphericalRegion":
        def uniq(items):
            seen, out = set(), []
            for s in items:
                k = stratum_key(s)
                if k not in seen:
                    seen.add(k)
                    out.append(s)
            return out
        return SphericalRegion(uniq(self.points), uniq(self.arcs), uniq(self.polygons))

    def canonical(self, eps: float = EPS_GEOM) -> "SphericalRegion":
        """Drop strata covered by higher-dimensional strata, and duplicates."""
        r = self.deduplicated()
        polys = r.polygons
        arcs = [a for a in r.arcs
                if not any(p.contains(np.vstack([a.a, a.b]), eps).all() for p in polys)]
        pts = [x for x in r.points
               if not any(_stratum_contains(s, x, eps) for s in list(arcs) + list(polys))]
        return SphericalRegion(pts, arcs, polys)

    def contains(self, P, eps: float = EPS_GEOM) -> np.ndarray:
        P = np.atleast_2d(P)
        out = np.zeros(len(P), dtype=bool)
        for s in self.strata():
            out |= stratum_distance(s, P) <= eps if not isinstance(s, SphericalPolygon) else s.contains(P, eps)
        return out

    @cached_property
    def essential_strata(self) -> list:
        """Strata not contained in a polygon of the region (same closed set)."""
        polys = []
        for p in sorted(self.polygons, key=lambda q: -q.area):
            if not any(np.all(q.contains(p.vertices, 1e-12)) for q in polys):
                polys.append(p)
        out = list(polys)
        for a in self.arcs:
            if not any(np.all(q.contains(np.array([a.a, a.b]), 1e-12)) for q in polys):
                out.append(a)
        for x in self.points:
            if not any(q.contains(x, 1e-12)[0] for q in polys):
                out.append(x)
        return out

    def distance(self, P) -> np.ndarray:
        P = np.atleast_2d(P)
        if self.is_empty():
            raise EmptyRegion("distance to an empty region")
        A, B, N, pts, groups, centers = self._distance_kernel
        d = np.full(len(P), np.inf)
        if len(A):
            d = _edges_distance(P, A, B, N)
        if len(pts):
            d = np.minimum(d, np.min(_pairwise_angle(P, pts), axis=1))
        d[self._in_polygons(P)] = 0.0
        return d

    def _in_polygons(self, P) -> np.ndarray:
        P = np.atleast_2d(P)
        groups, centers = self._distance_kernel[4:]
        if groups is None:
            return np.zeros(len(P), dtype=bool)
        G, starts = groups
        ok = np.logical_and.reduceat(P @ G.T >= 0.0, starts, axis=1)
        ok &= P @ centers.T > 0
        return ok.any(axis=1)

    @cached_property
    def _distance_kernel(self):
        A, B, N, pts = [], [], [], []
        G, starts, centers = [], [], []
        for s in self.essential_strata:
            if isinstance(s, SphericalPolygon):
                V = s.vertices
                A.append(V)
                B.append(np.roll(V, -1, axis=0))
                N.append(s.edge_normals)
                starts.append(sum(len(g) for g in G))
                G.append(s.edge_normals)
                centers.append(s.center)
            elif isinstance(s, GeodesicArc):
                A.append(s.a[None])
                B.append(s.b[None])
                N.append(s.normal[None])
            else:
                pts.append(s)
        cat = lambda xs: np.vstack(xs) if xs else np.zeros((0, 3))
        groups = (np.vstack(G), np.array(starts)) if G else None
        return cat(A), cat(B), cat(N), cat(pts), groups, cat(centers)

    @cached_property
    def pieces(self) -> list[SphericalPolygon]:
        return disjoint_pieces(self.polygons)

    @property
    def area(self) -> float:
        return float(sum(p.area for p in self.pieces))

    def vertices(self) -> np.ndarray:
        rows = list(self.points)
        for a in self.arcs:
            rows += [a.a, a.b]
        for p in self.polygons:
            rows += list(p.vertices)
        return np.array(rows).reshape(-1, 3)

    def boundary_arcs(self) -> list[GeodesicArc]:
        """Edges of the polygon union that are not shared with another piece."""
        return list(self._boundary_arcs)

    @cached_property
    def _boundary_arcs(self) -> tuple[GeodesicArc, ...]:
        pieces = self.pieces
        edges = [(i, e) for i, p in enumerate(pieces) for e in p.edges()]
        if not edges:
            return ()
        N = np.array([e.normal for _, e in edges])
        owner = np.array([i for i, _ in edges])
        # only reversed collinear edges of other pieces can cover part of an edge
        opposite = (N @ N.T < -1 + 1e-9) & (owner[:, None] != owner[None, :])
        out = []
        for k, (i, e) in enumerate(edges):
            covered = []
            for j in np.nonzero(opposite[k])[0]:
                f = edges[j][1]
                sa = _arc_param(e, f.a)
                sb = _arc_param(e, f.b)
                if sa is None or sb is None:
                    continue
                lo, hi = min(sa, sb), max(sa, sb)
                lo, hi = max(lo, 0.0), min(hi, e.length)
                if hi - lo > 1e-12:
                    covered.append((lo, hi))
            for lo, hi in _complement_intervals(covered, e.length):
                if hi - lo > 1e-12:
                    out.append(_arc_from_params(e, lo, hi))
        return tuple(out)

    def boundary_samples(self, spacing: float, eps: float = EPS_GEOM) -> np.ndarray:
        """Samples of the topological boundary of the region."""
        pts = [np.atleast_2d(p) for p in self.points]
        bnd = self.boundary_arcs()
        pts += [a.sample(spacing) for a in bnd]
        inner_arcs = []
        for a in self.arcs:
            S = a.sample(spacing)
            in_poly = np.zeros(len(S), dtype=bool)
            for p in self.pieces:
                in_poly |= p.contains(S, eps)
            on_bnd = np.zeros(len(S), dtype=bool)
            for b in bnd:
                on_bnd |= b.distance(S) <= eps
            inner_arcs.append(S[~in_poly | on_bnd])
        pts += inner_arcs
        pts = [p for p in pts if len(p)]
        if not pts:
            return np.zeros((0, 3))
        P = np.vstack(pts)
        if self.pieces and self.points:
            # isolated points strictly inside the polygon union are interior
            mask = np.ones(len(P), dtype=bool)
            for i, x in enumerate(self.points):
                if self.covered_angle(x, eps) >= 2 * math.pi - 1e-9:
                    mask[i] = False
            P = P[mask]
        return P

    def covered_angle(self, x, eps: float = EPS_GEOM) -> float:
        """Total angle of the polygon pieces around x (2 pi when x is interior)."""
        x = unit(x)
        total = 0.0
        for p in self.pieces:
            if not p.contains(x, eps)[0]:
                continue
            V = p.vertices
            dv = _angle(V, x)
            k = int(np.argmin(dv))
            if dv[k] <= eps:
                total += _corner_angle(V[k - 1], V[k], V[(k + 1) % len(V)])
            elif np.min(np.abs(p.edge_normals @ x)) <= eps:
                total += math.pi
            else:
                return 2 * math.pi
        return total

    def sample(self, spacing: float) -> np.ndarray:
        pts = [np.atleast_2d(p) for p in self.points]
        pts += [a.sample(spacing) for a in self.arcs]
        pts += [p.sample(spacing) for p in self.pieces]
        return np.vstack(pts) if pts else np.zeros((0, 3))

    def to_json(self) -> dict:
        return {
            "points": [np.round(p, 15).tolist() for p in self.points],
            "arcs": [[a.a.tolist(), a.b.tolist()] for a in self.arcs],
            "polygons": [p.vertices.tolist() for p in self.polygons],
        }

    @classmethod
    def from_json(cls, data: dict) -> "SphericalRegion":
        return cls(
            [np.array(p) for p in data.get("points", [])],
            [GeodesicArc(a, b) for a, b in data.get("arcs", [])],
            [SphericalPolygon(v) for v in data.get("polygons", [])],
        )


def _corner_angle(a: np.ndarray, v: np.ndarray, b: np.ndarray) -> float:
    """Interior angle at v of the spherical corner a-v-b."""
    ta = a - np.dot(a, v) * v
    tb = b - np.dot(b, v) * v
    return float(math.atan2(np.dot(cross(tb, ta), v), np.dot(ta, tb))) % (2 * math.pi)


def _arc_param(e: GeodesicArc, p: np.ndarray):
    """Signed angular position of p along e from e.a (None if off the circle)."""
    if abs(np.dot(p, e.normal)) > 1e-9:
        return None
    t = cross(e.normal, e.a)
    return float(math.atan2(np.dot(p, t), np.dot(p, e.a)))


def _arc_from_params(e: GeodesicArc, lo: float, hi: float) -> GeodesicArc:
    t = cross(e.normal, e.a)
    pa = math.cos(lo) * e.a + math.sin(lo) * t
    pb = math.cos(hi) * e.a + math.sin(hi) * t
    return GeodesicArc(pa, pb)


def _complement_intervals(covered, length):
    covered = sorted(covered)
    out, pos = [], 0.0
    for lo, hi in covered:
        if lo > pos:
            out.append((pos, lo))
        pos = max(pos, hi)
    if pos < length:
        out.append((pos, length))
    return out


def region_equal(A: SphericalRegion, B: SphericalRegion, eps: float = EPS_GEOM) -> bool:
    """Stratum-by-stratum equality of canonical forms, matching within eps."""
    a, b = A.canonical(eps), B.canonical(eps)
    if (len(a.points), len(a.arcs), len(a.polygons)) != (len(b.points), len(b.arcs), len(b.polygons)):
        return False
    return (_match(a.points, b.points, _pt_close, eps) and _match(a.arcs, b.arcs, _arc_close, eps)
            and _match(a.polygons, b.polygons, _poly_close, eps))


def _pt_close(x, y, eps):
    return arc_distance(x, y) <= eps


def _arc_close(s, t, eps):
    return ((arc_distance(s.a, t.a) <= eps and arc_distance(s.b, t.b) <= eps)
            or (arc_distance(s.a, t.b) <= eps and arc_distance(s.b, t.a) <= eps))


def _poly_close(p, q, eps):
    if len(p) != len(q):
        return False
    V, W = p.vertices, q.vertices
    for shift in range(len(W)):
        if np.all(_row_angles(V, np.roll(W, shift, axis=0)) <= eps):
            return True
    return False


def _match(xs, ys, close, eps) -> bool:
    used = [False] * len(ys)
    for x in xs:
        for j, y in enumerate(ys):
            if not used[j] and close(x, y, eps):
                used[j] = True
                break
        else:
            return False
    return True


def region_intersection(A: SphericalRegion, B: SphericalRegion, eps: float = EPS_GEOM) -> SphericalRegion:
    """Stratified intersection of two regions (closed, within eps)."""
    out = [intersect_strata(x, y, eps) for x in A.strata() for y in B.strata()]
    return SphericalRegion.of(*out).deduplicated()


def hausdorff_distance(A: SphericalRegion, B: SphericalRegion, res: float) -> float:
    """Hausdorff distance by sampling at spacing ``res``; additive error <= res."""
    if A.is_empty() or B.is_empty():
        raise EmptyRegion("Hausdorff distance needs nonempty regions")
    return max(_directed_hausdorff(A, B, res), _directed_hausdorff(B, A, res))


def _directed_hausdorff(A: SphericalRegion, B: SphericalRegion, res: float) -> float:
    # strata of A inside A's own polygons are covered by the polygon search
    ess = A.essential_strata
    samples = [np.atleast_2d(p) for p in ess if isinstance(p, np.ndarray)]
    samples += [a.sample(2 * res) for a in ess if isinstance(a, GeodesicArc)]
    tris = []
    for p in (q for q in ess if isinstance(q, SphericalPolygon)):
        V = p.vertices
        samples.append(V)
        tris += [(V[0], V[i], V[i + 1]) for i in range(1, len(V) - 1)]
    lower = 0.0
    if samples:
        lower = float(np.max(B.distance(np.vstack(samples))))
    if tris:
        lower = max(lower, _sup_distance(np.array(tris), B, res, lower))
    return lower


def _sup_distance(T: np.ndarray, B: SphericalRegion, res: float, lower: float) -> float:
    """Branch and bound for sup of d(., B) over spherical triangles T (n, 3, 3).

    d(., B) is 1-Lipschitz, so a triangle with centre c and covering radius r
    cannot exceed d(c) + r; a triangle whose centre is inside B's polygons and
    farther than r from their boundary lies in B. Remaining triangles are
    bisected until they cannot beat the running maximum by more than res.
    """
    bnd = B.boundary_arcs() if B.polygons else []
    if bnd:
        bA = np.array([e.a for e in bnd])
        bB = np.array([e.b for e in bnd])
        bN = np.array([e.normal for e in bnd])
    while len(T):
        C = _unit_rows(T.sum(axis=1))
        r = np.max(np.arctan2(np.linalg.norm(cross(T, C[:, None, :]), axis=2),
                              np.einsum("ijk,ik->ij", T, C)), axis=1)
        if B.polygons:
            # centre inside the polygon union and the boundary farther than r:
            # the whole triangle is inside B
            inside = B._in_polygons(C)
            if bnd and inside.any():
                inside[inside] = _edges_distance(C[inside], bA, bB, bN) > r[inside]
            T, C, r = T[~inside], C[~inside], r[~inside]
            if not len(T):
                break
        d = B.distance(C)
        lower = max(lower, float(d.max()))
        # anything within res of the current best cannot change the answer by more than res
        keep = d + r > lower + res
        T = T[keep]
        if not len(T):
            break
        # bisect the longest edge: keeps slivers from staying thin
        L = np.stack([np.linalg.norm(T[:, 1] - T[:, 2], axis=1),
                      np.linalg.norm(T[:, 2] - T[:, 0], axis=1),
                      np.linalg.norm(T[:, 0] - T[:, 1], axis=1)], axis=1)
        k = np.argmax(L, axis=1)
        idx = np.arange(len(T))
        a = T[idx, k]
        b = T[idx, (k + 1) % 3]
        c = T[idx, (k + 2) % 3]
        m = _unit_rows(b + c)
        T = np.concatenate([np.stack([a, b, m], axis=1), np.stack([a, m, c], axis=1)])
    return lower


def directed_excess(A: SphericalRegion, B: SphericalRegion, res: float) -> float:
    """sup over A of the distance to B (sampled): the smallest eps with A in B_eps."""
    if A.is_empty():
        return 0.0
    return _directed_hausdorff(A, B, res)


def polar_set(p) -> SphericalRegion:
    """``{v : u . v <= 0 for all u in p}`` for a point, arc or convex polygon."""
    if isinstance(p, SphericalRegion):
        strata = p.strata()
        if len(strata) != 1:
            raise ValueError("polar_set expects a single convex stratum")
        p = strata[0]
    if isinstance(p, SphericalPolygon):
        V = p.vertices
        N = -p.edge_normals
        # polar vertex for edge i is orthogonal to v_i and v_{i+1}
        ring = [N[i] for i in range(len(V))]
        return SphericalRegion.of(make_stratum(ring))
    if isinstance(p, GeodesicArc):
        c = p.normal
        x1 = unit(cross(c, p.a))
        if np.dot(x1, p.b) > 0:
            x1 = -x1
        x2 = unit(cross(c, p.b))
        if np.dot(x2, p.a) > 0:
            x2 = -x2
        return SphericalRegion(polygons=[SphericalPolygon([c, x1, x2]),
                                         SphericalPolygon([-c, x2, x1])])
    u = unit(p)
    return SphericalRegion.hemisphere(-u)


def random_directions(n: int, rng: np.random.Generator) -> np.ndarray:
    return _unit_rows(rng.normal(size=(n, 3)))


def random_points_in(polys: Sequence[SphericalPolygon], n: int, rng: np.random.Generator) -> np.ndarray:
    """Area-uniform random points in a union of interior-disjoint convex polygons."""
    polys = [p for p in polys if p.area > 0]
    if not polys or n <= 0:
        return np.zeros((0, 3))
    w = np.array([p.area for p in polys])
    counts = rng.multinomial(n, w / w.sum())
    out = []
    for p, k in zip(polys, counts):
        cap = Cap(p.center, min(p.bounding_radius * (1 + 1e-9) + 1e-12, math.pi / 2))
        got = np.zeros((0, 3))
        while len(got) < k:
            S = cap.sample(max(16, 2 * (k - len(got))), rng)
            got = np.vstack([got, S[p.contains(S, eps=0.0)]])
        out.append(got[:k])
    return np.vstack(out)


def spherical_hull(P, center=None):
    """Spherical convex hull of points in an open hemisphere: a point, arc or polygon."""
    from scipy.spatial import ConvexHull, QhullError

    P = _unit_rows(np.asarray(P, dtype=float))
    if center is None:
        center, _ = _hemisphere_witness(P)
    F = _frame(unit(center))
    loc = P @ F.T
    if np.any(loc[:, 2] <= 1e-12):
        raise NotInHemisphere("points are not in the open hemisphere of the centre")
    xy = loc[:, :2] / loc[:, 2:3]
    spread = np.ptp(xy, axis=0).max() if len(xy) > 1 else 0.0
    if spread < 1e-12:
        return P[0]
    try:
        hull = ConvexHull(xy)
        ring = P[hull.vertices]
        return make_stratum(ring)
    except QhullError:
        # collinear in the gnomonic chart: the hull is an arc between extreme points
        d = xy - xy[0]
        axis = d[np.argmax(np.linalg.norm(d, axis=1))]
        s = d @ axis
        return make_stratum([P[np.argmin(s)], P[np.argmax(s)]])
