"""Finite Borel measures on the sphere and their pullbacks through Gauss images.

Three kinds are implemented: finitely many atoms, the uniform (Lebesgue)
measure, and Lebesgue measure restricted to a union of caps with constant
density. Masses of regions are computed exactly for atoms (closed
membership), by Girard's formula for the uniform measure, and by
integrating latitude-slice lengths for cap-restricted measures.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.spatial.transform import Rotation

from .body import Polytope
from .errors import PartitionFailure
from .gauss_image import gauss_image
from .seeding import stream
from .sphere import (
    EPS_GEOM, Cap, SphericalPolygon, SphericalRegion, _angle, _polyline_distance, _unit_rows, cross,
    random_directions, subtract_polygon, unit,
)

__all__ = [
    "SphericalMeasure", "Atoms", "UniformLebesgue", "CapLebesgue", "region_measure",
    "gauss_image_measure", "symdiff_distance", "region_difference", "TestFamily",
    "grid_partition", "monte_carlo_mass", "slice_area",
]

TWO_PI = 2.0 * math.pi


class SphericalMeasure:
    """Base class; subclasses implement ``mass`` on stratified regions."""

    kind = "abstract"

    def mass(self, R: SphericalRegion) -> float:
        raise NotImplementedError

    def polygon_mass(self, p: SphericalPolygon) -> float:
        raise NotImplementedError

    @property
    def total(self) -> float:
        return self.mass(SphericalRegion.sphere())

    def atom_dirs(self) -> np.ndarray:
        return np.zeros((0, 3))


class Atoms(SphericalMeasure):
    """``sum_i w_i delta_{u_i}`` with positive weights and distinct directions."""

    kind = "atoms"

    def __init__(self, atoms: Iterable[tuple[Sequence[float], float]]):
        atoms = list(atoms)
        U = _unit_rows(np.array([a for a, _ in atoms], dtype=float).reshape(-1, 3))
        W = np.array([w for _, w in atoms], dtype=float)
        if np.any(W <= 0):
            raise ValueError("atom weights must be positive")
        for i in range(len(U)):
            if np.any(_angle(U[i + 1:], U[i]) <= EPS_GEOM):
                raise ValueError("atom directions must be distinct")
        self.dirs = U
        self.weights = W

    def __repr__(self):
        return f"Atoms({len(self.weights)} atoms, total {self.weights.sum():g})"

    def mass(self, R: SphericalRegion) -> float:
        if R.is_empty() or not len(self.dirs):
            return 0.0
        return float(self.weights[R.contains(self.dirs)].sum())

    def polygon_mass(self, p: SphericalPolygon) -> float:
        return float(self.weights[p.contains(self.dirs)].sum())

    def atom_dirs(self) -> np.ndarray:
        return self.dirs


class UniformLebesgue(SphericalMeasure):
    """Surface area measure, total mass 4 pi."""

    kind = "uniform"

    def __repr__(self):
        return "UniformLebesgue()"

    def mass(self, R: SphericalRegion) -> float:
        return R.area

    def polygon_mass(self, p: SphericalPolygon) -> float:
        return p.area


class CapLebesgue(SphericalMeasure):
    """``density`` times area measure restricted to a union of closed caps."""

    kind = "cap_lebesgue"

    def __init__(self, caps: Sequence[Cap], density: float = 1.0):
        if density < 0:
            raise ValueError("density must be non-negative")
        self.caps = tuple(caps)
        self.density = float(density)

    def __repr__(self):
        return f"CapLebesgue({list(self.caps)}, density={self.density:g})"

    def mass(self, R: SphericalRegion) -> float:
        return float(sum(self.polygon_mass(p) for p in R.pieces))

    def polygon_mass(self, p: SphericalPolygon) -> float:
        if self.density == 0:
            return 0.0
        near = [c for c in self.caps
                if _angle(p.center, c.center) <= p.bounding_radius + c.radius + 1e-12]
        if not near:
            return 0.0
        V = p.vertices
        for c in near:
            if c.radius <= math.pi / 2 and np.all(V @ c.center >= math.cos(c.radius)):
                return self.density * p.area
        return self.density * slice_area(p, near)

    @property
    def total(self) -> float:
        return self.density * _cap_union_area(self.caps)


def _cap_union_area(caps: Sequence[Cap]) -> float:
    zs = [-1.0, 1.0]
    for c in caps:
        th = math.acos(max(-1.0, min(1.0, c.center[2])))
        zs += [math.cos(min(math.pi, th + c.radius)), math.cos(max(0.0, th - c.radius))]
    zs += _crossing_heights([(c.center, math.cos(c.radius)) for c in caps])
    return _integrate(lambda z: _measure(_cap_intervals(caps, z)), zs, -1.0, 1.0)


# latitude-slice integration: area = integral over z of the angular length
# of the slice {phi : (sqrt(1-z^2) cos phi, sqrt(1-z^2) sin phi, z) in S}


def _halfspace_interval(n: np.ndarray, k: float, z: float):
    """Angles phi on the latitude circle at height z with n . x >= k."""
    r = math.sqrt(max(0.0, 1.0 - z * z))
    A = r * math.hypot(n[0], n[1])
    B = k - n[2] * z
    if A <= 1e-15:
        return [(0.0, TWO_PI)] if B <= 0 else []
    c = B / A
    if c <= -1.0:
        return [(0.0, TWO_PI)]
    if c >= 1.0:
        return []
    phi0 = math.atan2(n[1], n[0])
    w = math.acos(c)
    lo, hi = (phi0 - w) % TWO_PI, (phi0 + w) % TWO_PI
    if lo <= hi:
        return [(lo, hi)]
    return [(0.0, hi), (lo, TWO_PI)]


def _intersect(I, J):
    out = []
    for a, b in I:
        for c, d in J:
            lo, hi = max(a, c), min(b, d)
            if hi > lo:
                out.append((lo, hi))
    return out


def _union(intervals):
    out = []
    for a, b in sorted(intervals):
        if out and a <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], b))
        else:
            out.append((a, b))
    return out


def _measure(intervals) -> float:
    return float(sum(b - a for a, b in intervals))


def _cap_intervals(caps, z):
    out = []
    for c in caps:
        out += _halfspace_interval(c.center, math.cos(c.radius), z)
    return _union(out)


def _polygon_intervals(p: SphericalPolygon, z):
    I = [(0.0, TWO_PI)]
    for n in p.edge_normals:
        I = _intersect(I, _halfspace_interval(n, 0.0, z))
        if not I:
            break
    return I


def _plane_pair_heights(a, ka, b, kb) -> list[float]:
    """z coordinates of the points with a . x = ka, b . x = kb, |x| = 1."""
    d = cross(a, b)
    dd = d @ d
    if dd < 1e-24:
        return []
    G = np.array([[a @ a, a @ b], [a @ b, b @ b]])
    alpha, beta = np.linalg.solve(G, [ka, kb])
    p0 = alpha * a + beta * b
    rem = 1.0 - p0 @ p0
    if rem < 0:
        return []
    s = math.sqrt(rem / dd)
    return [float(p0[2] + s * d[2]), float(p0[2] - s * d[2])]


def _crossing_heights(planes) -> list[float]:
    zs = []
    for i in range(len(planes)):
        for j in range(i + 1, len(planes)):
            zs += _plane_pair_heights(planes[i][0], planes[i][1], planes[j][0], planes[j][1])
    return zs


def _integrate(f, breaks, lo, hi) -> float:
    zs = sorted({min(hi, max(lo, z)) for z in breaks} | {lo, hi})
    total = 0.0
    for a, b in zip(zs[:-1], zs[1:]):
        if b - a > 1e-15:
            # z = mid - half cos(s) smooths the square-root behaviour at tangency heights
            mid, half = (a + b) / 2, (b - a) / 2
            val, _ = quad(lambda s: f(mid - half * math.cos(s)) * half * math.sin(s), 0.0, math.pi,
                          epsabs=1e-14, epsrel=1e-12, limit=200)
            total += val
    return total


def slice_area(p: SphericalPolygon, caps: Sequence[Cap] | None = None) -> float:
    """Area of ``p`` (intersected with the union of ``caps`` if given) by slice integration.

    Independent of Girard's formula, so it doubles as an oracle for it.
    """
    V = p.vertices
    lo, hi = float(V[:, 2].min()), float(V[:, 2].max())
    if p.contains(np.array([0.0, 0.0, 1.0]), 0.0)[0]:
        hi = 1.0
    if p.contains(np.array([0.0, 0.0, -1.0]), 0.0)[0]:
        lo = -1.0
    # the polygon may reach past its vertices in z through an edge interior
    for i in range(len(V)):
        n = p.edge_normals[i]
        t = np.array([-n[0] * n[2], -n[1] * n[2], n[0] ** 2 + n[1] ** 2])
        for s in (1.0, -1.0):
            if np.linalg.norm(t) > 1e-15:
                x = s * t / np.linalg.norm(t)
                if p.edges()[i].distance(x)[0] <= 1e-12:
                    lo, hi = min(lo, x[2]), max(hi, x[2])
    breaks = list(V[:, 2])
    planes = [(n, 0.0) for n in p.edge_normals]
    for n in p.edge_normals:
        m = math.hypot(n[0], n[1])
        breaks += [m, -m]
    if caps:
        for c in caps:
            th = math.acos(max(-1.0, min(1.0, c.center[2])))
            breaks += [math.cos(min(math.pi, th + c.radius)), math.cos(max(0.0, th - c.radius))]
        planes += [(c.center, math.cos(c.radius)) for c in caps]
        f = lambda z: _measure(_intersect(_polygon_intervals(p, z), _cap_intervals(caps, z)))
    else:
        f = lambda z: _measure(_polygon_intervals(p, z))
    breaks += _crossing_heights(planes)
    return _integrate(f, breaks, lo, hi)


# operations


def region_measure(lam: SphericalMeasure, R: SphericalRegion) -> float:
    """Mass of a closed region; lower-dimensional strata only carry atoms."""
    return lam.mass(R)


def gauss_image_measure(lam: SphericalMeasure, K: Polytope, omega) -> float:
    """``lambda(K, omega) = lambda(alpha_K(omega))``."""
    return lam.mass(gauss_image(K, omega).region)


def region_difference(A: SphericalRegion, B: SphericalRegion) -> list[SphericalPolygon]:
    """Interior-disjoint convex pieces covering the closure of ``A \\ B`` (polygon strata only)."""
    out = []
    for p in A.pieces:
        frags = [p]
        for q in B.pieces:
            nxt = []
            for f in frags:
                nxt.extend(subtract_polygon(f, q))
            frags = nxt
            if not frags:
                break
        out.extend(frags)
    return out


def symdiff_distance(lam: SphericalMeasure, A: SphericalRegion, B: SphericalRegion) -> float:
    """``lambda(A symmetric-difference B)``.

    Polygon parts go through explicit differences (no cancellation), atoms
    through closed membership in each region.
    """
    if isinstance(lam, Atoms):
        if not len(lam.dirs):
            return 0.0
        inA = A.contains(lam.dirs) if not A.is_empty() else np.zeros(len(lam.dirs), bool)
        inB = B.contains(lam.dirs) if not B.is_empty() else np.zeros(len(lam.dirs), bool)
        return float(lam.weights[inA ^ inB].sum())
    pieces = region_difference(A, B) + region_difference(B, A)
    return float(sum(lam.polygon_mass(p) for p in pieces))


def monte_carlo_mass(lam: SphericalMeasure, R: SphericalRegion, n: int,
                     rng: np.random.Generator, chunk: int = 200_000) -> tuple[float, float]:
    """Hit-rate estimate of ``lambda(R)`` for a Lebesgue-type measure, with its standard error."""
    if isinstance(lam, Atoms):
        raise TypeError("Monte Carlo estimates apply to Lebesgue-type measures")
    hits = 0
    for start in range(0, n, chunk):
        m = min(chunk, n - start)
        P = random_directions(m, rng)
        inside = R.contains(P, eps=0.0) if not R.is_empty() else np.zeros(m, bool)
        if isinstance(lam, CapLebesgue):
            in_caps = np.zeros(m, bool)
            for c in lam.caps:
                in_caps |= c.contains(P, eps=0.0)
            inside &= in_caps
        hits += int(inside.sum())
    scale = 4 * math.pi * (lam.density if isinstance(lam, CapLebesgue) else 1.0)
    p = hits / n
    return scale * p, scale * math.sqrt(p * (1 - p) / n)


# test families


@dataclass
class TestFamily:
    """Convex cells tiling the sphere, each of diameter below ``max_diameter``."""

    __test__ = False  # keep pytest from collecting this class

    cells: list[SphericalPolygon]
    max_diameter: float
    seed: int
    rotation: np.ndarray
    attempts: int = 1
    grid: tuple[int, int] = (0, 0)

    @cached_property
    def adjacency(self) -> list[tuple[int, int]]:
        """Pairs of cells sharing an edge."""
        owner: dict = {}
        pairs = set()
        for i, c in enumerate(self.cells):
            V = c.vertices
            for k in range(len(V)):
                key = _edge_key(V[k], V[(k + 1) % len(V)])
                if key in owner and owner[key] != i:
                    pairs.add((min(owner[key], i), max(owner[key], i)))
                owner[key] = i
        return sorted(pairs)

    def neighbors(self) -> list[list[int]]:
        nb = [[] for _ in self.cells]
        for i, j in self.adjacency:
            nb[i].append(j)
            nb[j].append(i)
        return nb

    def unions(self, max_size: int = 3) -> list[tuple[int, ...]]:
        """Connected sets of 2..max_size edge-adjacent cells."""
        out = set()
        if max_size >= 2:
            out.update(self.adjacency)
        if max_size >= 3:
            nb = self.neighbors()
            for c, ns in enumerate(nb):
                for a in range(len(ns)):
                    for b in range(a + 1, len(ns)):
                        out.add(tuple(sorted((ns[a], c, ns[b]))))
        if max_size > 3:
            raise ValueError("unions beyond three cells are not enumerated")
        return sorted(out)

    def diameters(self) -> np.ndarray:
        return np.array([c.diameter() for c in self.cells])

    def boundary_distance(self, P) -> np.ndarray:
        """Distance from each point to the union of all cell boundaries."""
        P = np.atleast_2d(P)
        d = np.full(len(P), np.inf)
        for c in self.cells:
            d = np.minimum(d, _polyline_distance(P, c.vertices, c.edge_normals))
        return d


def _edge_key(a, b):
    ka = tuple(np.round(a, 9) + 0.0)
    kb = tuple(np.round(b, 9) + 0.0)
    return (ka, kb) if ka < kb else (kb, ka)


def _lonlat_cells(n_lat: int, n_lon: int) -> list[np.ndarray]:
    th = np.linspace(0.0, math.pi, n_lat + 1)
    ph = np.linspace(0.0, TWO_PI, n_lon + 1)[:-1]

    def pt(i, j):
        return np.array([math.sin(th[i]) * math.cos(ph[j % n_lon]),
                         math.sin(th[i]) * math.sin(ph[j % n_lon]), math.cos(th[i])])

    cells = []
    north, south = np.array([0.0, 0.0, 1.0]), np.array([0.0, 0.0, -1.0])
    for j in range(n_lon):
        cells.append(np.array([north, pt(1, j), pt(1, j + 1)]))
        cells.append(np.array([south, pt(n_lat - 1, j + 1), pt(n_lat - 1, j)]))
    for i in range(1, n_lat - 1):
        for j in range(n_lon):
            cells.append(np.array([pt(i, j), pt(i + 1, j), pt(i + 1, j + 1), pt(i, j + 1)]))
    return cells


def _max_vertex_distance(V: np.ndarray) -> float:
    G = np.clip(V @ V.T, -1.0, 1.0)
    return float(np.arccos(G.min()))


def grid_partition(max_diameter: float, seed: int = 0, measures: Sequence[SphericalMeasure] = (),
                   avoid_points=None, margin: float = 1e-7, max_attempts: int = 100) -> TestFamily:
    """Seeded, randomly rotated longitude-latitude tiling with cells of small diameter.

    Cells are rotated again (new derived seed) until every atom of the given
    measures and every point in ``avoid_points`` is farther than ``margin``
    from all cell boundaries.
    """
    if not 0.0 < max_diameter < math.pi / 2:
        raise ValueError("max_diameter must lie in (0, pi/2)")
    n_lat = max(3, math.ceil(math.pi / max_diameter))
    while True:
        n_lon = max(4, 2 * n_lat)
        base = _lonlat_cells(n_lat, n_lon)
        if max(_max_vertex_distance(V) for V in base) < max_diameter:
            base = [SphericalPolygon(V).vertices for V in base]
            break
        n_lat += 1
    pts = [m.atom_dirs() for m in measures]
    if avoid_points is not None:
        pts.append(np.atleast_2d(np.asarray(avoid_points, dtype=float)).reshape(-1, 3))
    P = np.vstack(pts) if pts else np.zeros((0, 3))
    P = _unit_rows(P) if len(P) else P
    for attempt in range(max_attempts):
        rng = stream(seed, "partition", attempt)
        Rm = Rotation.random(random_state=rng).as_matrix()
        cells = [SphericalPolygon(V @ Rm.T, check=False) for V in base]
        fam = TestFamily(cells, max_diameter, seed, Rm, attempt + 1, (n_lat, n_lon))
        if not len(P) or fam.boundary_distance(P).min() > margin:
            return fam
    raise PartitionFailure(f"no admissible rotation in {max_attempts} attempts")
