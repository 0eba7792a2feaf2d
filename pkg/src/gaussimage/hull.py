"""Convex hulls in R^3 reduced to true facets (coplanar triangles merged).

Two routes are provided. ``facet_sets_float`` wraps ``scipy.spatial.ConvexHull``
for floating point input. ``incremental_hull`` is a plain incremental hull
whose only predicate is the sign of a 3x3 determinant, so it runs exactly on
``fractions.Fraction`` coordinates and is used for rational bodies.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .errors import InvalidBody


def _orient(p, q, r, s):
    """Signed volume (times 6) of tetrahedron pqrs; positive if s is above pqr."""
    a = [q[i] - p[i] for i in range(3)]
    b = [r[i] - p[i] for i in range(3)]
    c = [s[i] - p[i] for i in range(3)]
    return (a[0] * (b[1] * c[2] - b[2] * c[1])
            - a[1] * (b[0] * c[2] - b[2] * c[0])
            + a[2] * (b[0] * c[1] - b[1] * c[0]))


def _initial_simplex(P, eps):
    n = len(P)
    i0 = 0
    i1 = next((i for i in range(n) if any(abs(P[i][k] - P[i0][k]) > eps for k in range(3))), None)
    if i1 is None:
        raise InvalidBody("all points coincide")
    i2 = None
    for i in range(n):
        a = [P[i1][k] - P[i0][k] for k in range(3)]
        b = [P[i][k] - P[i0][k] for k in range(3)]
        cr = (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])
        if any(abs(c) > eps for c in cr):
            i2 = i
            break
    if i2 is None:
        raise InvalidBody("points are collinear")
    i3 = next((i for i in range(n) if abs(_orient(P[i0], P[i1], P[i2], P[i])) > eps), None)
    if i3 is None:
        raise InvalidBody("points are coplanar")
    return i0, i1, i2, i3


def incremental_hull(points: Sequence[Sequence], eps=0) -> list[tuple[int, int, int]]:
    """Outward oriented hull triangles of ``points``.

    A point is treated as outside a face when the orientation determinant
    exceeds ``eps``; with ``Fraction`` input and ``eps=0`` every decision is
    exact.
    """
    P = [tuple(p) for p in points]
    i0, i1, i2, i3 = _initial_simplex(P, eps)
    if _orient(P[i0], P[i1], P[i2], P[i3]) > 0:
        i1, i2 = i2, i1
    faces = {(i0, i1, i2), (i0, i3, i1), (i1, i3, i2), (i2, i3, i0)}
    for k in range(len(P)):
        if k in (i0, i1, i2, i3):
            continue
        visible = [f for f in faces if _orient(P[f[0]], P[f[1]], P[f[2]], P[k]) > eps]
        if not visible:
            continue
        edges = set()
        for a, b, c in visible:
            edges.update(((a, b), (b, c), (c, a)))
        horizon = [(a, b) for a, b in edges if (b, a) not in edges]
        faces.difference_update(visible)
        faces.update((a, b, k) for a, b in horizon)
    return sorted(faces)


def facet_sets_exact(points: Sequence[Sequence[Fraction]]) -> list[frozenset[int]]:
    """Maximal coplanar vertex sets of the hull, computed exactly."""
    tris = incremental_hull(points)
    P = [tuple(p) for p in points]
    out = set()
    for a, b, c in tris:
        on = frozenset(i for i in range(len(P)) if _orient(P[a], P[b], P[c], P[i]) == 0)
        out.add(on)
    return sorted(out, key=sorted)


def facet_sets_float(points: np.ndarray, tol: float = 1e-9, own: bool = False) -> list[frozenset[int]]:
    """Maximal coplanar point sets of the hull, with a relative plane tolerance."""
    P = np.asarray(points, dtype=float)
    scale = max(1.0, float(np.abs(P).max()))
    if own:
        tris = incremental_hull(P.tolist(), eps=tol * scale ** 3)
        eqs = []
        for a, b, c in tris:
            n = np.cross(P[b] - P[a], P[c] - P[a])
            n = n / np.linalg.norm(n)
            eqs.append(np.append(n, -n @ P[a]))
        eqs = np.array(eqs)
    else:
        try:
            eqs = ConvexHull(P).equations
        except QhullError as exc:
            raise InvalidBody(f"hull failed: {exc}") from exc
    dist = P @ eqs[:, :3].T + eqs[:, 3]
    out = set()
    for j in range(len(eqs)):
        on = frozenset(np.nonzero(np.abs(dist[:, j]) <= tol * scale)[0].tolist())
        if len(on) >= 3:
            out.add(on)
    return sorted(out, key=sorted)
