"""Radial Gauss image of a polytope and its reverse, as stratified regions.

For a polytope K the boundary splits into open facets, open edges and
vertices. Their radial projections onto the sphere (spherical polygons,
arcs and points) form the *projection complex*, and their normal cones are
a facet normal, the arc between two adjacent facet normals, and the
polygon of facet normals around a vertex. The image of a query set is the
union of the normal cones of every cell whose projection meets the query
(closed sets, so touching counts).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .body import Polytope, polar, radial
from .errors import NotOnBoundary
from .report import CheckReport, witness
from .sphere import (
    EPS_GEOM, Cap, GeodesicArc, SphericalPolygon, SphericalRegion, _angle, _row_angles, _unit_rows,
    arc_distance, hausdorff_distance, stratum_distance, strata_intersect, unit,
)

__all__ = [
    "GaussImageValue", "ProjectionComplex", "projection_complex", "normal_cone",
    "gauss_image", "reverse_gauss_image", "boundary_inclusion_check", "continuity_probe",
    "query_items", "polygon_boundary",
]


@dataclass(frozen=True)
class GaussImageValue:
    """An image region plus, per stratum, the face of K it came from.

    ``provenance[k]`` describes ``region.strata()[k]`` and is one of
    ``("facet-normal", f)``, ``("edge-normal", i, j)``, ``("vertex-normal", i)``
    for forward images, or ``("facet", f)``, ``("edge", i, j)``, ``("vertex", i)``
    for reverse images (which are radial projections of faces).
    """

    region: SphericalRegion
    provenance: tuple

    def is_empty(self) -> bool:
        return self.region.is_empty()


class ProjectionComplex:
    """Radial projections and normal cones of all faces of a polytope."""

    def __init__(self, K: Polytope):
        self.body = K
        V = K.vertices
        self.vertex_dirs = _unit_rows(V)
        self.facet_normals = np.array(K.normals)
        self.edges = K.edges
        self.facet_polys = [SphericalPolygon(self.vertex_dirs[list(r)], check=False)
                            for r in K.facet_vertices]
        self.edge_arcs = [GeodesicArc(self.vertex_dirs[i], self.vertex_dirs[j]) for i, j, _, _ in self.edges]
        self.normal_arcs = [GeodesicArc(K.normals[f], K.normals[g]) for _, _, f, g in self.edges]
        self.vertex_cones = [SphericalPolygon(K.normals[list(fs)], check=False) for fs in K.vertex_facets]
        # bounding caps (centre, radius) for quick rejection
        self._facet_bounds = _bounds(self.facet_polys)
        self._edge_bounds = _bounds(self.edge_arcs)
        self._narc_bounds = _bounds(self.normal_arcs)
        self._cone_bounds = _bounds(self.vertex_cones)


def _bounds(items) -> tuple[np.ndarray, np.ndarray]:
    if not items:
        return np.zeros((0, 3)), np.zeros(0)
    if isinstance(items[0], GeodesicArc):
        A = np.array([s.a for s in items])
        B = np.array([s.b for s in items])
        C = _unit_rows(A + B)
        return C, np.maximum(_row_angles(A, C), _row_angles(B, C))
    C, R = [], []
    for s in items:
        c, r = _bounding_cap(s)
        C.append(c)
        R.append(r)
    return np.array(C), np.array(R)


def _bounding_cap(s) -> tuple[np.ndarray, float]:
    if isinstance(s, np.ndarray):
        return s, 0.0
    if isinstance(s, GeodesicArc):
        return unit(s.a + s.b), s.length / 2.0
    if isinstance(s, Cap):
        return s.center, s.radius
    return s.center, s.bounding_radius


def projection_complex(K: Polytope) -> ProjectionComplex:
    """Cached projection complex of K (built once per body)."""
    pc = K.__dict__.get("_projection_complex")
    if pc is None:
        pc = ProjectionComplex(K)
        K.__dict__["_projection_complex"] = pc
    return pc


# query handling


def query_items(omega) -> list:
    """Flatten a query set into points, arcs, polygons and caps."""
    if isinstance(omega, SphericalRegion):
        return omega.strata()
    if isinstance(omega, (Cap, GeodesicArc, SphericalPolygon)):
        return [omega]
    if isinstance(omega, np.ndarray) and omega.shape == (3,):
        return [unit(omega)]
    if isinstance(omega, (list, tuple)):
        if len(omega) == 3 and all(isinstance(x, (int, float, np.floating, np.integer)) for x in omega):
            return [unit(omega)]
        out = []
        for x in omega:
            out.extend(query_items(x))
        return out
    raise TypeError(f"unsupported query set: {type(omega).__name__}")


def _meets(stratum, q, eps: float) -> bool:
    if isinstance(q, Cap):
        return float(stratum_distance(stratum, q.center)[0]) <= q.radius + eps
    return strata_intersect(stratum, q, eps)


def _candidates(bounds, q, eps: float) -> np.ndarray:
    C, R = bounds
    if not len(C):
        return np.zeros(0, dtype=int)
    c, r = _bounding_cap(q)
    return np.nonzero(_angle(C, c) <= R + r + 1e-7 + eps)[0]


def polygon_boundary(p: SphericalPolygon) -> list[GeodesicArc]:
    """The boundary of a spherical polygon as a list of arcs (a valid query set)."""
    return p.edges()


# operations


def normal_cone(K: Polytope, x, eps: float = EPS_GEOM) -> SphericalRegion:
    """Normal cone of K at a boundary point x, as a point, arc or polygon."""
    x = np.asarray(x, dtype=float)
    scale = max(1.0, float(np.linalg.norm(x)))
    D = K.normals @ x - K.offsets
    if abs(D.max()) > eps * scale:
        raise NotOnBoundary(f"point is {D.max():.3g} from the boundary")
    active = np.nonzero(np.abs(D) <= eps * scale)[0]
    if len(active) == 1:
        return SphericalRegion(points=[K.normals[active[0]]])
    if len(active) == 2:
        return SphericalRegion(arcs=[GeodesicArc(K.normals[active[0]], K.normals[active[1]])])
    hit = np.nonzero(np.linalg.norm(K.vertices - x, axis=1) <= eps * scale)[0]
    if len(hit):
        ring = K.vertex_facets[hit[0]]
    else:
        ring = active
    return SphericalRegion(polygons=[SphericalPolygon(K.normals[list(ring)])])


def gauss_image(K: Polytope, omega, eps: float = EPS_GEOM) -> GaussImageValue:
    """``alpha_K(omega)``: normal cones of every face whose radial projection meets omega."""
    pc = projection_complex(K)
    items = query_items(omega)
    facets, edges, verts = set(), set(), set()
    for q in items:
        for f in _candidates(pc._facet_bounds, q, eps):
            if f not in facets and _meets(pc.facet_polys[f], q, eps):
                facets.add(int(f))
        for e in _candidates(pc._edge_bounds, q, eps):
            if e not in edges and _meets(pc.edge_arcs[e], q, eps):
                edges.add(int(e))
        for v in _candidates((pc.vertex_dirs, np.zeros(len(pc.vertex_dirs))), q, eps):
            if v not in verts and _meets(pc.vertex_dirs[v], q, eps):
                verts.add(int(v))
    points = [pc.facet_normals[f] for f in sorted(facets)]
    arcs = [pc.normal_arcs[e] for e in sorted(edges)]
    polys = [pc.vertex_cones[v] for v in sorted(verts)]
    prov = tuple([("facet-normal", f) for f in sorted(facets)]
                 + [("edge-normal",) + pc.edges[e][:2] for e in sorted(edges)]
                 + [("vertex-normal", v) for v in sorted(verts)])
    return GaussImageValue(SphericalRegion(points, arcs, polys), prov)


def reverse_gauss_image(K: Polytope, omega, eps: float = EPS_GEOM) -> GaussImageValue:
    """``alpha*_K(omega)``: directions of boundary points with a normal in omega.

    Computed from faces of K directly: a facet projection when its normal is
    in omega, an edge projection when its normal arc meets omega, a vertex
    direction when its normal cone meets omega.
    """
    pc = projection_complex(K)
    items = query_items(omega)
    facets, edges, verts = set(), set(), set()
    for q in items:
        for f in _candidates((pc.facet_normals, np.zeros(len(pc.facet_normals))), q, eps):
            if f not in facets and _meets(pc.facet_normals[f], q, eps):
                facets.add(int(f))
        for e in _candidates(pc._narc_bounds, q, eps):
            if e not in edges and _meets(pc.normal_arcs[e], q, eps):
                edges.add(int(e))
        for v in _candidates(pc._cone_bounds, q, eps):
            if v not in verts and _meets(pc.vertex_cones[v], q, eps):
                verts.add(int(v))
    points = [pc.vertex_dirs[v] for v in sorted(verts)]
    arcs = [pc.edge_arcs[e] for e in sorted(edges)]
    polys = [pc.facet_polys[f] for f in sorted(facets)]
    prov = tuple([("vertex", v) for v in sorted(verts)]
                 + [("edge",) + pc.edges[e][:2] for e in sorted(edges)]
                 + [("facet", f) for f in sorted(facets)])
    return GaussImageValue(SphericalRegion(points, arcs, polys), prov)


def boundary_inclusion_check(K: Polytope, omega: SphericalPolygon, samples: int = 1000,
                             eps: float = EPS_GEOM) -> CheckReport:
    """Sample the topological boundary of alpha_K(omega) and test it lies in alpha_K(boundary of omega)."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    A = gauss_image(K, omega, eps).region
    B = gauss_image(K, polygon_boundary(omega), eps).region
    length = sum(a.length for a in A.boundary_arcs()) + sum(a.length for a in A.arcs)
    spacing = max(length / samples, 1e-6) if length > 0 else 1.0
    S = A.boundary_samples(spacing)
    viol = float(np.max(B.distance(S))) if len(S) and not B.is_empty() else (math.inf if len(S) else 0.0)
    ok = viol <= eps
    wit = [] if ok else [witness("boundary-of-image", max_violation=viol, n_samples=len(S))]
    return CheckReport("boundary-inclusion", ok, wit,
                       {"max_violation": viol, "tolerance": eps, "n_samples": len(S)})


def continuity_probe(K: Polytope, u, deltas: Sequence[float], res: float = 1e-3) -> list[tuple[float, float]]:
    """Hausdorff distance between alpha_K(cap(u, delta)) and alpha_K(u) for each delta."""
    u = unit(u)
    base = gauss_image(K, u).region
    out = []
    for d in deltas:
        if d <= 0:
            raise ValueError("deltas must be positive")
        img = gauss_image(K, Cap(u, d)).region
        out.append((float(d), hausdorff_distance(img, base, res)))
    return out
