"""Harmonic-mean interpolation between bodies and how its Gauss image moves.

``harmonic_mean(K, L, t)`` is the polar of ``(1 - t) K* + t L*``. Its Gauss
image runs from that of K (t = 0) to that of L (t = 1), sweeping along
geodesics; this module evaluates that path, bounds its speed (in the
Hausdorff metric) by a constant depending only on in- and circumradii, and
checks that the sweep over t covers the symmetric difference of the
endpoint images away from the image of the query boundary.
"""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

import numpy as np

from .body import Polytope, combination_path, convex_combination, polar, radii
from .errors import HemisphereViolation
from .gauss_image import GaussImageValue, gauss_image, polygon_boundary
from .measure import region_difference
from .report import CheckReport, witness
from .seeding import stream
from .sphere import (
    EPS_GEOM, SphericalPolygon, SphericalRegion, arc_distance, cross, hausdorff_distance,
    random_points_in, spherical_hull, unit,
)

__all__ = [
    "harmonic_mean", "HarmonicPath", "variation_image", "union_identity_check",
    "geodesic_lipschitz_bound", "geodesic_lipschitz_check", "lipschitz_constant",
    "lipschitz_scan", "sweep_inclusion_check", "scan_csv",
]


def _map(fn, items, workers):
    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


def harmonic_mean(K: Polytope, L: Polytope, t) -> Polytope:
    """``((1 - t) K* + t L*)*``."""
    return polar(convex_combination(polar(K), polar(L), t))


class HarmonicPath:
    """Harmonic means of K and L on a fixed t-grid, computed on demand and cached."""

    def __init__(self, K: Polytope, L: Polytope, t_grid: Sequence[float]):
        t = np.asarray(t_grid, dtype=float)
        if np.any(np.diff(t) <= 0) or t.min() < 0 or t.max() > 1:
            raise ValueError("t_grid must be increasing within [0, 1]")
        self.K, self.L = K, L
        self.t_grid = t
        self._Ks, self._Ls = polar(K), polar(L)
        self._combo = combination_path(self._Ks, self._Ls)
        self._bodies: dict[int, Polytope] = {}

    def __len__(self):
        return len(self.t_grid)

    def body(self, i: int) -> Polytope:
        if i not in self._bodies:
            self._bodies[i] = polar(self._combo(self.t_grid[i]))
        return self._bodies[i]

    @property
    def bodies(self) -> list[Polytope]:
        return [self.body(i) for i in range(len(self))]

    def images(self, omega, workers: int | None = None) -> list[SphericalRegion]:
        return _map(lambda i: gauss_image(self.body(i), omega).region, range(len(self)), workers)


def variation_image(K: Polytope, L: Polytope, t, omega) -> GaussImageValue:
    """Gauss image of the harmonic mean at parameter t."""
    return gauss_image(harmonic_mean(K, L, t), omega)


def clustered_grid(n: int) -> np.ndarray:
    """n points in (0, 1), denser near both ends (Chebyshev nodes)."""
    k = np.arange(1, n + 1)
    return 0.5 * (1.0 - np.cos(np.pi * k / (n + 1)))


def union_identity_check(K: Polytope, L: Polytope, u, t_samples: int = 200,
                         res: float = 1e-3) -> CheckReport:
    """Union over t of the images at u versus the geodesic means of the endpoint images.

    Both endpoint images are spherically convex, so the union of all
    geodesics joining them is their spherical convex hull. The left side is
    sampled at ``t_samples`` clustered parameters; the check passes when the
    two sets are within ``res`` in Hausdorff distance.
    """
    u = unit(u)
    A = gauss_image(K, u).region
    B = gauss_image(L, u).region
    hull = spherical_hull(np.vstack([A.vertices(), B.vertices()]), center=u)
    right = SphericalRegion.of(hull)
    path = HarmonicPath(K, L, clustered_grid(t_samples))
    left = SphericalRegion().union(*path.images(u)).deduplicated()
    d = hausdorff_distance(left, right, res)
    ok = d <= res
    wit = [] if ok else [witness("union-over-t", hausdorff=d)]
    return CheckReport("variation-union-identity", ok, wit,
                       {"hausdorff": d, "resolution": res, "t_samples": t_samples})


def geodesic_lipschitz_bound(u1, u2, alpha: float, tol: float = 1e-12) -> float:
    """Lipschitz constant of ``t -> P((1 - t) u1 + t u2)`` in arc length.

    Requires both directions in a closed cap of radius ``pi/2 - alpha``; the
    best centre is their midpoint, so the test is ``cos(theta/2) >= sin(alpha)``.
    """
    u1 = np.asarray(u1, dtype=float)
    u2 = np.asarray(u2, dtype=float)
    n1, n2 = float(np.linalg.norm(u1)), float(np.linalg.norm(u2))
    if n1 == 0 or n2 == 0:
        raise ValueError("inputs must be non-zero")
    if not 0 < alpha <= math.pi / 2:
        raise HemisphereViolation("alpha must lie in (0, pi/2]")
    theta = arc_distance(u1 / n1, u2 / n2)
    if math.cos(theta / 2) < math.sin(alpha) - tol:
        raise HemisphereViolation("directions do not fit in a cap of radius pi/2 - alpha")
    return 2.0 / math.sin(alpha) * max(n1 / n2, n2 / n1)


def geodesic_lipschitz_check(u1, u2, alpha: float, n: int = 1000) -> tuple[float, float]:
    """Largest observed ``d(g(t1), g(t2)) / |t1 - t2|`` on an n-point grid, and the bound.

    g traces one geodesic monotonically, so distances between any two grid
    points are sums of consecutive ones and the consecutive ratios bound all
    pairwise ratios.
    """
    bound = geodesic_lipschitz_bound(u1, u2, alpha)
    t = np.linspace(0.0, 1.0, n)
    G = (1 - t)[:, None] * np.asarray(u1, float) + t[:, None] * np.asarray(u2, float)
    G /= np.linalg.norm(G, axis=1)[:, None]
    d = np.arctan2(np.linalg.norm(cross(G[:-1], G[1:]), axis=1), np.sum(G[:-1] * G[1:], axis=1))
    return float(np.max(d / np.diff(t))), bound


def lipschitz_constant(K: Polytope, L: Polytope) -> float:
    """``2 max(R_K/r_K, R_L/r_L) max(R_K/r_L, R_L/r_K)``."""
    a, b = radii(K), radii(L)
    return 2.0 * max(a.R / a.r, b.R / b.r) * max(a.R / b.r, b.R / a.r)


def lipschitz_scan(K: Polytope, L: Polytope, omega, t_count: int = 200, res: float = 1e-3,
                   workers: int | None = None) -> CheckReport:
    """Hausdorff speed of the Gauss image along the harmonic path versus the radii bound."""
    if t_count < 2:
        raise ValueError("t_count must be >= 2")
    t = np.linspace(0.0, 1.0, t_count)
    imgs = HarmonicPath(K, L, t).images(omega, workers)
    bound = lipschitz_constant(K, L)
    dh = _map(lambda i: hausdorff_distance(imgs[i], imgs[i + 1], res), range(t_count - 1), workers)
    dt = float(t[1] - t[0])
    rows, wit = [], []
    worst = 0.0
    for i, d in enumerate(dh):
        ratio = d / dt
        worst = max(worst, ratio)
        rows.append({"t": float(t[i + 1]), "d_H": d, "ratio": ratio, "bound": bound})
        if ratio > bound + res / dt:
            wit.append(witness(f"t={t[i]:.6g}..{t[i + 1]:.6g}", d_H=d, ratio=ratio))
    ok = not wit
    return CheckReport("harmonic-lipschitz", ok, wit,
                       {"max_ratio": worst, "bound": bound, "slack": bound - worst,
                        "resolution": res, "t_count": t_count}, rows)


def scan_csv(report: CheckReport) -> str:
    """CSV text with columns t, d_H, ratio, bound."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "d_H", "ratio", "bound"])
    for r in report.table:
        w.writerow([repr(r["t"]), repr(r["d_H"]), repr(r["ratio"]), repr(r["bound"])])
    return buf.getvalue()


def _left_set_samples(K, L, gamma, samples, rng, eps):
    """Random points of (A sym-diff B) minus the images of the boundary of gamma."""
    A = gauss_image(K, gamma).region
    B = gauss_image(L, gamma).region
    edges = polygon_boundary(gamma)
    excl = gauss_image(K, edges).region.union(gauss_image(L, edges).region)
    pieces = region_difference(A, B) + region_difference(B, A)
    keep = np.zeros((0, 3))
    for _ in range(50):
        if len(keep) >= samples or not pieces:
            break
        S = random_points_in(pieces, 4 * samples, rng)
        if not excl.is_empty():
            S = S[excl.distance(S) > eps]
        keep = np.vstack([keep, S])
    return keep[:samples], pieces


def sweep_inclusion_check(K: Polytope, L: Polytope, gamma: SphericalPolygon, t_count: int = 2000,
                          samples: int = 500, miss_threshold: float | None = None, seed: int = 0,
                          eps: float = EPS_GEOM, workers: int | None = None) -> CheckReport:
    """Every sampled point of the left set must lie near some image of the boundary of gamma.

    The left set is (alpha_K(gamma) sym-diff alpha_L(gamma)) minus
    (alpha_K(d gamma) union alpha_L(d gamma)); the sweep uses the interior
    grid t_k = k / (t_count + 1). The default miss threshold is the Lipschitz
    constant times the grid step plus 1e-3.
    """
    bound = lipschitz_constant(K, L)
    if miss_threshold is None:
        miss_threshold = bound / t_count + 1e-3
    rng = stream(seed, "sampling")
    P, pieces = _left_set_samples(K, L, gamma, samples, rng, eps)
    margins = {"miss_threshold": miss_threshold, "lipschitz_bound": bound,
               "t_count": t_count, "n_samples": len(P),
               "left_area": float(sum(p.area for p in pieces))}
    if not len(P):
        margins["worst_miss"] = 0.0
        rep = CheckReport("sweep-inclusion", True, [], margins)
        rep.margins["vacuous"] = True
        return rep
    t = np.arange(1, t_count + 1) / (t_count + 1)
    path = HarmonicPath(K, L, t)
    edges = polygon_boundary(gamma)

    def dist(i):
        R = gauss_image(path.body(i), edges).region
        return R.distance(P) if not R.is_empty() else np.full(len(P), np.inf)

    best = np.full(len(P), np.inf)
    for d in _map(dist, range(len(t)), workers):
        best = np.minimum(best, d)
    worst = float(best.max())
    ok = worst < miss_threshold
    wit = [] if ok else [witness(f"sample-{int(np.argmax(best))}", miss=worst,
                                 point=P[int(np.argmax(best))])]
    margins.update({"worst_miss": worst, "vacuous": False})
    return CheckReport("sweep-inclusion", ok, wit, margins)
