"""Convex polytopes containing the origin in their interior.

A :class:`Polytope` stores its vertices, unit outer facet normals with
offsets (facet plane ``x . n = h``), the vertex ring of every facet and the
facet ring around every vertex. Both rings are counter-clockwise seen from
outside, which is what the Gauss image code needs to build spherical
polygons without re-sorting.

Rational bodies keep exact ``Fraction`` vertices and exact facet vectors
``w = n / h`` (plane ``w . x = 1``), so polarity is exact: the vertices of the
polar body are the ``w`` and its facet vectors are the old vertices.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.spatial.transform import Rotation

from .errors import InvalidBody
from .hull import facet_sets_exact, facet_sets_float
from .sphere import EPS_GEOM, cross, unit

__all__ = [
    "Polytope", "RadiiPair", "support", "radial", "polar", "radii", "facet_region",
    "convex_combination", "combination_path", "dilate", "cube", "cross_polytope", "frustum",
    "random_polytope", "geodesic_ball",
]


def _solve3(rows, rhs):
    """Cramer's rule; exact for Fraction input."""
    (a, b, c), (d, e, f), (g, h, i) = rows
    det = a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
    if det == 0:
        raise InvalidBody("degenerate facet plane")
    r0, r1, r2 = rhs
    x = r0 * (e * i - f * h) - b * (r1 * i - f * r2) + c * (r1 * h - e * r2)
    y = a * (r1 * i - f * r2) - r0 * (d * i - f * g) + c * (d * r2 - r1 * g)
    z = a * (e * r2 - r1 * h) - b * (d * r2 - r1 * g) + r0 * (d * h - e * g)
    return (x / det, y / det, z / det)


def _ccw_ring(indices, pts: np.ndarray, axis: np.ndarray) -> tuple[int, ...]:
    """Sort ``indices`` counter-clockwise about ``axis`` (seen from its tip)."""
    idx = np.asarray(list(indices))
    X = pts[idx] - pts[idx].mean(axis=0)
    e1 = X[0] - (X[0] @ axis) * axis
    e1 = e1 / np.linalg.norm(e1)
    e2 = cross(axis, e1)
    order = np.argsort(np.arctan2(X @ e2, X @ e1), kind="stable")
    return tuple(int(i) for i in idx[order])


class Polytope:
    """Convex polytope with the origin strictly inside.

    Build one from points with ``Polytope(points)``; the hull, facets and
    incidences are derived. Pass ``exact=True`` (or ``Fraction`` coordinates)
    for a rational body whose combinatorics and polar are exact.

    Attributes
    ----------
    vertices : ndarray, shape (n, 3)
    normals : ndarray, shape (m, 3)
        Unit outer facet normals.
    offsets : ndarray, shape (m,)
        Facet offsets ``h`` with facet plane ``x . n = h``; all positive.
    facet_vertices : tuple of tuple of int
        Vertex ring of each facet, counter-clockwise seen from outside.
    vertex_facets : tuple of tuple of int
        Facets around each vertex, counter-clockwise seen from outside.
    """

    def __init__(self, points, exact: bool | None = None, tol: float = 1e-9):
        pts = list(points)
        if exact is None:
            exact = any(isinstance(x, Fraction) for p in pts for x in p)
        if exact:
            Q = sorted({tuple(Fraction(x) for x in p) for p in pts})
            if len(Q) < 4:
                raise InvalidBody("need at least four distinct points")
            sets = facet_sets_exact(Q)
            self._build_exact(Q, sets)
        else:
            P = np.asarray(pts, dtype=float).reshape(-1, 3)
            if not np.all(np.isfinite(P)):
                raise InvalidBody("non-finite coordinates")
            scale = max(1.0, float(np.abs(P).max()))
            _, keep = np.unique(np.round(P / scale, 11), axis=0, return_index=True)
            P = P[np.sort(keep)]
            if len(P) < 4:
                raise InvalidBody("need at least four distinct points")
            sets = facet_sets_float(P, tol)
            self._build_float(P, sets)
        self._validate()

    # construction

    def _build_float(self, P: np.ndarray, sets) -> None:
        count = np.zeros(len(P), dtype=int)
        for s in sets:
            count[list(s)] += 1
        true = np.nonzero(count >= 3)[0]
        remap = {int(old): new for new, old in enumerate(true)}
        V = P[true]
        normals, offsets, rings = [], [], []
        for s in sets:
            idx = [remap[i] for i in s if i in remap]
            X = V[idx] - V[idx].mean(axis=0)
            n = np.linalg.svd(X)[2][-1]
            h = float(np.mean(V[idx] @ n))
            if h < 0:
                n, h = -n, -h
            if not np.all(P @ n <= h + 1e-7 * max(1.0, abs(h))):
                n, h = -n, -h
            normals.append(n)
            offsets.append(h)
            rings.append(_ccw_ring(idx, V, n))
        self._set(V, np.array(normals), np.array(offsets), rings, None)

    def _build_exact(self, Q, sets) -> None:
        count = [0] * len(Q)
        for s in sets:
            for i in s:
                count[i] += 1
        true = [i for i in range(len(Q)) if count[i] >= 3]
        remap = {old: new for new, old in enumerate(true)}
        VQ = [Q[i] for i in true]
        V = np.array([[float(x) for x in p] for p in VQ])
        W, rings = [], []
        for s in sets:
            idx = sorted(remap[i] for i in s if i in remap)
            a, b, c = self._independent_triple(VQ, idx)
            try:
                w = _solve3([VQ[a], VQ[b], VQ[c]], (1, 1, 1))
            except InvalidBody:
                raise InvalidBody("origin lies on a facet plane") from None
            W.append(w)
            rings.append(idx)
        Wf = np.array([[float(x) for x in w] for w in W])
        norm = np.linalg.norm(Wf, axis=1)
        normals = Wf / norm[:, None]
        rings = [_ccw_ring(r, V, normals[k]) for k, r in enumerate(rings)]
        self._set(V, normals, 1.0 / norm, rings, (VQ, W))

    @staticmethod
    def _independent_triple(VQ, idx):
        a = idx[0]
        for b in idx[1:]:
            for c in idx[2:]:
                if c == b:
                    continue
                u = [VQ[b][k] - VQ[a][k] for k in range(3)]
                v = [VQ[c][k] - VQ[a][k] for k in range(3)]
                if (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]) != (0, 0, 0):
                    return a, b, c
        raise InvalidBody("degenerate facet")

    def _set(self, V, normals, offsets, rings, exact) -> None:
        self.vertices = V
        self.normals = normals
        self.offsets = offsets
        self.facet_vertices = tuple(tuple(int(i) for i in r) for r in rings)
        around = [[] for _ in range(len(V))]
        for f, r in enumerate(self.facet_vertices):
            for i in r:
                around[i].append(f)
        vf = []
        for i, fs in enumerate(around):
            axis = unit(normals[fs].sum(axis=0))
            vf.append(_ccw_ring(fs, normals, axis))
        self.vertex_facets = tuple(vf)
        self._exact = exact
        for arr in (self.vertices, self.normals, self.offsets):
            arr.setflags(write=False)

    @classmethod
    def _from_parts(cls, V, normals, offsets, facet_vertices, vertex_facets, exact=None) -> "Polytope":
        obj = cls.__new__(cls)
        obj.vertices = np.asarray(V, dtype=float)
        obj.normals = np.asarray(normals, dtype=float)
        obj.offsets = np.asarray(offsets, dtype=float)
        obj.facet_vertices = tuple(tuple(r) for r in facet_vertices)
        obj.vertex_facets = tuple(tuple(r) for r in vertex_facets)
        obj._exact = exact
        for arr in (obj.vertices, obj.normals, obj.offsets):
            arr.setflags(write=False)
        obj._validate()
        return obj

    def _validate(self) -> None:
        if len(self.normals) < 4:
            raise InvalidBody("body is not full-dimensional")
        if np.any(self.offsets <= EPS_GEOM):
            raise InvalidBody("origin is not strictly inside the body")
        scale = max(1.0, float(np.abs(self.vertices).max()))
        D = self.vertices @ self.normals.T - self.offsets
        if np.any(D > EPS_GEOM * scale):
            raise InvalidBody("a vertex lies outside a facet plane")
        tol = EPS_GEOM * scale
        on_facet = np.zeros(D.shape, dtype=bool)
        for f, ring in enumerate(self.facet_vertices):
            on_facet[list(ring), f] = True
        if np.any(np.abs(D[on_facet]) > tol):
            raise InvalidBody("a facet vertex is off its plane")
        around = np.zeros(D.shape, dtype=bool)
        for i, fs in enumerate(self.vertex_facets):
            if len(fs) < 3:
                raise InvalidBody("vertex incidence is inconsistent")
            around[i, list(fs)] = True
        if np.any(around != on_facet) or np.any(D[~around] > -tol):
            raise InvalidBody("vertex incidence is inconsistent")

    # properties

    @property
    def is_exact(self) -> bool:
        return self._exact is not None

    @property
    def exact_vertices(self) -> list[tuple[Fraction, ...]]:
        if self._exact is None:
            raise ValueError("body is not rational")
        return list(self._exact[0])

    @property
    def exact_facet_vectors(self) -> list[tuple[Fraction, ...]]:
        """Rational ``w`` per facet with facet plane ``w . x = 1``."""
        if self._exact is None:
            raise ValueError("body is not rational")
        return list(self._exact[1])

    @cached_property
    def edges(self) -> tuple[tuple[int, int, int, int], ...]:
        """``(i, j, f, g)``: edge from vertex i to j with facet f on its left, g on its right.

        "Left" is seen from outside, so i -> j runs counter-clockwise around f.
        """
        owner = {}
        for f, r in enumerate(self.facet_vertices):
            for k in range(len(r)):
                owner[(r[k], r[(k + 1) % len(r)])] = f
        out = []
        for (i, j), f in owner.items():
            if i < j:
                out.append((i, j, f, owner[(j, i)]))
        return tuple(sorted(out))

    def __repr__(self):
        kind = "rational" if self.is_exact else "float"
        return f"Polytope({len(self.vertices)} vertices, {len(self.normals)} facets, {kind})"

    def support(self, x) -> np.ndarray | float:
        return support(self, x)

    def radial(self, u) -> np.ndarray | float:
        return radial(self, u)

    def polar(self) -> "Polytope":
        return polar(self)


@dataclass(frozen=True)
class RadiiPair:
    r: float
    R: float

    def __post_init__(self):
        if not 0 < self.r <= self.R * (1 + 1e-12):
            raise InvalidBody("radii must satisfy 0 < r <= R")


def support(K: Polytope, x) -> np.ndarray | float:
    """``h_K(x) = max_v x . v``; vectorized over rows of ``x``."""
    X = np.asarray(x, dtype=float)
    out = np.max(np.atleast_2d(X) @ K.vertices.T, axis=1)
    return float(out[0]) if X.ndim == 1 else out


def radial(K: Polytope, u) -> np.ndarray | float:
    """``rho_K(u) = max{a : a u in K}`` = min over facets with ``u . n > 0`` of ``h / (u . n)``."""
    U = np.asarray(u, dtype=float)
    D = np.atleast_2d(U) @ K.normals.T
    with np.errstate(divide="ignore"):
        R = np.where(D > 0, K.offsets / np.where(D > 0, D, 1.0), np.inf)
    out = np.min(R, axis=1)
    return float(out[0]) if U.ndim == 1 else out


def polar(K: Polytope) -> Polytope:
    """Polar body, assembled from the dual incidence (no new hull)."""
    V = K.normals / K.offsets[:, None]
    norms = np.linalg.norm(K.vertices, axis=1)
    exact = None
    if K.is_exact:
        exact = (list(K._exact[1]), list(K._exact[0]))
    return Polytope._from_parts(V, K.vertices / norms[:, None], 1.0 / norms,
                                K.vertex_facets, K.facet_vertices, exact)


def radii(K: Polytope) -> RadiiPair:
    """Origin-centred inradius (smallest facet offset) and circumradius."""
    return RadiiPair(float(K.offsets.min()), float(np.linalg.norm(K.vertices, axis=1).max()))


def facet_region(K: Polytope, v, tol: float = EPS_GEOM) -> np.ndarray:
    """Vertices of the face of K with outer normal v: a facet ring, an edge, or one vertex."""
    v = unit(v)
    d = K.vertices @ v
    hit = np.nonzero(d >= d.max() - tol * max(1.0, abs(d.max())))[0]
    if len(hit) >= 3:
        f = int(np.argmax(K.normals @ v))
        return K.vertices[list(K.facet_vertices[f])]
    return K.vertices[hit]


def convex_combination(A: Polytope, B: Polytope, t) -> Polytope:
    """Minkowski combination ``(1 - t) A + t B``."""
    if A.is_exact and B.is_exact and not isinstance(t, float):
        t = Fraction(t)
        pts = [tuple((1 - t) * a[k] + t * b[k] for k in range(3))
               for a in A.exact_vertices for b in B.exact_vertices]
        return Polytope(pts, exact=True)
    t = float(t)
    pts = ((1.0 - t) * A.vertices[:, None, :] + t * B.vertices[None, :, :]).reshape(-1, 3)
    return Polytope(pts)


def combination_path(A: Polytope, B: Polytope):
    """Return ``t -> (1 - t) A + t B`` for floats t in (0, 1), sharing one hull.

    For 0 < t < 1 the normal fan of the combination is the common refinement
    of the fans of A and B, so facets, rings and the (vertex of A, vertex of B)
    pair behind each vertex do not depend on t. The hull is computed once at
    t = 1/2 and each call only moves vertices and offsets.
    """
    M = convex_combination(A, B, 0.5)
    # an interior direction of each vertex's normal cone picks its summands
    U = np.array([M.normals[list(fs)].sum(axis=0) for fs in M.vertex_facets])
    ia = np.argmax(U @ A.vertices.T, axis=1)
    ib = np.argmax(U @ B.vertices.T, axis=1)
    VA, VB = A.vertices[ia], B.vertices[ib]
    hA = support(A, M.normals)
    hB = support(B, M.normals)

    def at(t: float) -> Polytope:
        t = float(t)
        if not 0.0 < t < 1.0:
            return convex_combination(A, B, t)
        return Polytope._from_parts((1 - t) * VA + t * VB, M.normals, (1 - t) * hA + t * hB,
                                    M.facet_vertices, M.vertex_facets)

    return at


def dilate(K: Polytope, c) -> Polytope:
    """``c K`` for ``c > 0``."""
    if K.is_exact and not isinstance(c, float):
        c = Fraction(c)
        return Polytope([tuple(c * x for x in p) for p in K.exact_vertices], exact=True)
    return Polytope(float(c) * K.vertices)


# generators


def cube(s=1, exact: bool = False) -> Polytope:
    """``[-s, s]^3``."""
    pts = [(a * s, b * s, c * s) for a in (-1, 1) for b in (-1, 1) for c in (-1, 1)]
    return Polytope(_maybe_exact(pts, exact), exact=exact)


def cross_polytope(c=1, exact: bool = False) -> Polytope:
    """``conv{+-c e_i}``."""
    pts = []
    for i in range(3):
        for sgn in (-1, 1):
            p = [0, 0, 0]
            p[i] = sgn * c
            pts.append(tuple(p))
    return Polytope(_maybe_exact(pts, exact), exact=exact)


def frustum(exact: bool = False) -> Polytope:
    """``conv{(+-1, +-1, 1), (+-2, +-2, -2)}``: shares the top square with the cube."""
    pts = [(a, b, 1) for a in (-1, 1) for b in (-1, 1)]
    pts += [(2 * a, 2 * b, -2) for a in (-1, 1) for b in (-1, 1)]
    return Polytope(_maybe_exact(pts, exact), exact=exact)


def _maybe_exact(pts, exact):
    if exact:
        return [tuple(Fraction(x) for x in p) for p in pts]
    return pts


def random_polytope(m: int, rng: np.random.Generator, max_tries: int = 100) -> Polytope:
    """Hull of ``m`` points on a random ellipsoid shell, centred at the vertex centroid.

    Retries with fresh samples when the centred body does not contain the
    origin with a comfortable margin.
    """
    if m < 4:
        raise ValueError("need m >= 4")
    for _ in range(max_tries):
        axes = rng.uniform(0.5, 2.0, size=3)
        rot = Rotation.random(random_state=rng).as_matrix()
        g = rng.normal(size=(m, 3))
        g /= np.linalg.norm(g, axis=1)[:, None]
        shell = rng.uniform(0.85, 1.0, size=m)[:, None]
        P = (g * shell * axes) @ rot.T
        try:
            K = Polytope(P)
            K = Polytope(K.vertices - K.vertices.mean(axis=0))
        except InvalidBody:
            continue
        if K.offsets.min() > 1e-3 * np.linalg.norm(K.vertices, axis=1).max():
            return K
    raise InvalidBody("could not sample a polytope containing the origin")


def geodesic_ball(level: int = 2) -> Polytope:
    """Subdivided icosahedron with vertices on the unit sphere."""
    p = (1 + 5 ** 0.5) / 2
    V = [(-1, p, 0), (1, p, 0), (-1, -p, 0), (1, -p, 0), (0, -1, p), (0, 1, p),
         (0, -1, -p), (0, 1, -p), (p, 0, -1), (p, 0, 1), (-p, 0, -1), (-p, 0, 1)]
    pts = np.array(V, dtype=float)
    pts /= np.linalg.norm(pts, axis=1)[:, None]
    K = Polytope(pts)
    tris = [r for r in K.facet_vertices]
    P = K.vertices
    for _ in range(level):
        new = []
        cache: dict = {}
        pts_list = list(P)

        def mid(i, j):
            key = (min(i, j), max(i, j))
            if key not in cache:
                pts_list.append(unit(pts_list[i] + pts_list[j]))
                cache[key] = len(pts_list) - 1
            return cache[key]

        for a, b, c in tris:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            new += [(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)]
        tris, P = new, np.array(pts_list)
    return Polytope(P)

