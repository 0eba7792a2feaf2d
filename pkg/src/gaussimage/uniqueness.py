"""Checkers that two bodies share their Gauss image measure, and what follows.

The central check compares ``alpha_K`` and ``alpha_L`` cell by cell on a
test family: ``s(w) = lam(alpha_K(w) sym-diff alpha_L(w))`` and
``m(w) = |lam(K, w) - lam(L, w)|``. When every ``s`` vanishes the bodies
have the same measure against every set of the family; the remaining checks
take that as their hypothesis and verify its consequences on the support of
lam: the simultaneous map is nonempty there, ``h_K / h_L`` is constant on
each support component (the bodies are dilates there), and the ratio of
radial functions of the polars has vanishing increments.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .body import Polytope, polar, radial, support
from .errors import HypothesisNotEstablished
from .gauss_image import gauss_image
from .measure import Atoms, CapLebesgue, SphericalMeasure, TestFamily, UniformLebesgue, symdiff_distance
from .report import CheckReport, witness
from .seeding import stream
from .sphere import (
    Cap, SphericalPolygon, SphericalRegion, _angle, _frame, directed_excess, random_directions,
    region_intersection, unit,
)
from .variation import _map

__all__ = [
    "EPS_MEAS", "SupportComponents", "support_components", "ae_equal_check", "simultaneous_map",
    "simultaneous_map_check", "ratio_partition", "dilation_component_check",
    "ratio_increment_check", "RATIO_LABELS",
]

EPS_MEAS = 1e-9
AE_CHECK = "ae-equality"

RATIO_LABELS = ("omega_prime", "omega", "omega_zero", "mixed")


# support components


@dataclass
class SupportComponents:
    """Path-connected pieces of the support of a measure, read off its description.

    Each entry of ``components`` is ``(component_id, generator)`` where the
    generator is a unit vector (one atom), a tuple of caps (a connected union)
    or ``None`` (the whole sphere).
    """

    components: list
    measure: SphericalMeasure

    def __len__(self):
        return len(self.components)

    @property
    def ids(self) -> list[str]:
        return [cid for cid, _ in self.components]

    def anchor(self, k: int) -> np.ndarray:
        """A point of component k (atom, first cap centre, or the north pole)."""
        g = self.components[k][1]
        if g is None:
            return np.array([0.0, 0.0, 1.0])
        if isinstance(g, np.ndarray):
            return g
        return g[0].center

    def contains(self, k: int, P) -> np.ndarray:
        P = np.atleast_2d(P)
        g = self.components[k][1]
        if g is None:
            return np.ones(len(P), dtype=bool)
        if isinstance(g, np.ndarray):
            return _angle(P, g) <= 1e-12
        out = np.zeros(len(P), dtype=bool)
        for c in g:
            out |= c.contains(P, eps=0.0)
        return out

    def sample(self, k: int, n: int, rng: np.random.Generator) -> np.ndarray:
        """n points of component k; an atom component returns its one point once."""
        g = self.components[k][1]
        if g is None:
            return random_directions(n, rng)
        if isinstance(g, np.ndarray):
            return g[None, :].copy()
        w = np.array([1.0 - math.cos(c.radius) for c in g])
        counts = rng.multinomial(n, w / w.sum())
        return np.vstack([c.sample(int(m), rng) for c, m in zip(g, counts)])


def support_components(lam: SphericalMeasure) -> SupportComponents:
    """Components of spt lam: one per atom, overlapping caps merged, the sphere for area measure."""
    if isinstance(lam, Atoms):
        comps = [(f"atom-{i}", u) for i, u in enumerate(lam.dirs)]
    elif isinstance(lam, UniformLebesgue):
        comps = [("sphere", None)]
    elif isinstance(lam, CapLebesgue):
        caps = list(lam.caps) if lam.density > 0 else []
        parent = list(range(len(caps)))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for i in range(len(caps)):
            for j in range(i + 1, len(caps)):
                gap = float(_angle(caps[i].center, caps[j].center))
                if gap <= caps[i].radius + caps[j].radius:
                    parent[find(i)] = find(j)
        groups: dict[int, list[int]] = {}
        for i in range(len(caps)):
            groups.setdefault(find(i), []).append(i)
        comps = [(f"caps-{'-'.join(map(str, g))}", tuple(caps[i] for i in g))
                 for g in sorted(groups.values())]
    else:
        raise TypeError(f"no support description for {type(lam).__name__}")
    return SupportComponents(comps, lam)


# a.e. equality


@dataclass
class _CellImages:
    A: SphericalRegion
    B: SphericalRegion
    s: float
    m: float


def _set_id(cells: Sequence[int]) -> str:
    return ("cell-" if len(cells) == 1 else "union-") + "-".join(str(c) for c in cells)


def ae_equal_check(K: Polytope, L: Polytope, lam: SphericalMeasure, family: TestFamily,
                   max_union: int = 3, eps: float = EPS_MEAS,
                   workers: int | None = None) -> CheckReport:
    """Test ``lam(alpha_K(w) sym-diff alpha_L(w)) <= eps`` on cells and small unions.

    Images of a union are unions of images, so the symmetric difference on a
    union lies inside the union of the cells' symmetric differences and its
    mass is at most their sum. Unions are evaluated explicitly only when that
    bound exceeds ``eps``. The table lists ``m`` and ``s`` for every set
    (``exact`` marks values computed rather than bounded). A failing report
    names the worst set and, next to it, the family set with the largest
    ``m`` so that a gap in images is matched by a gap in measure.
    """
    def one(c):
        A = gauss_image(K, c).region
        B = gauss_image(L, c).region
        return _CellImages(A, B, symdiff_distance(lam, A, B), abs(lam.mass(A) - lam.mass(B)))

    cells = _map(one, family.cells, workers)
    rows = [{"set": _set_id((i,)), "m": c.m, "s": c.s, "exact": True} for i, c in enumerate(cells)]
    for group in family.unions(max_union) if max_union >= 2 else []:
        bound = sum(cells[i].s for i in group)
        if bound <= eps:
            # m <= s <= bound
            rows.append({"set": _set_id(group), "m": bound, "s": bound, "exact": False})
            continue
        A = SphericalRegion().union(*[cells[i].A for i in group])
        B = SphericalRegion().union(*[cells[i].B for i in group])
        rows.append({"set": _set_id(group), "m": abs(lam.mass(A) - lam.mass(B)),
                     "s": symdiff_distance(lam, A, B), "exact": True})
    s_max = max(r["s"] for r in rows)
    m_max = max(r["m"] for r in rows)
    ok = s_max <= eps
    wit = []
    if not ok:
        worst = max(rows, key=lambda r: r["s"])
        by_m = max(rows, key=lambda r: r["m"])
        wit.append(witness(worst["set"], s=worst["s"], m=worst["m"],
                           largest_m_set=by_m["set"], largest_m=by_m["m"]))
        for r in rows:
            if r["s"] > eps and r is not worst and len(wit) < 10:
                wit.append(witness(r["set"], s=r["s"], m=r["m"]))
    margins = {"max_s": s_max, "max_m": m_max, "tolerance": eps,
               "n_cells": len(family.cells), "n_sets": len(rows)}
    return CheckReport(AE_CHECK, ok, wit, margins, rows)


def _require(established: CheckReport | None) -> None:
    if established is None or established.check != AE_CHECK or not established.passed:
        raise HypothesisNotEstablished("needs a passing ae-equality report for this pair and measure")


# simultaneous map


def simultaneous_map(K: Polytope, L: Polytope, u) -> SphericalRegion:
    """``alpha_{K*}(u)`` intersected with ``alpha_{L*}(u)``."""
    u = unit(u)
    A = gauss_image(_polar(K), u).region
    B = gauss_image(_polar(L), u).region
    return region_intersection(A, B)


def _polar(K: Polytope) -> Polytope:
    P = K.__dict__.get("_polar_body")
    if P is None:
        P = polar(K)
        K.__dict__["_polar_body"] = P
    return P


def _cap_samples(comps: SupportComponents, k: int, u, delta: float, n: int, rng) -> np.ndarray:
    """Points of component k inside the closed cap of radius delta about u."""
    g = comps.components[k][1]
    if isinstance(g, np.ndarray):
        return u[None, :].copy()
    P = Cap(u, delta).sample(4 * n, rng)
    P = P[comps.contains(k, P)]
    return np.vstack([u[None, :], P[: n - 1]])


def simultaneous_map_check(K: Polytope, L: Polytope, comps: SupportComponents,
                           established: CheckReport | None, samples: int = 1000,
                           deltas: Sequence[float] = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5),
                           probe_samples: int = 50, res: float = 1e-4,
                           seed: int = 0) -> CheckReport:
    """Nonemptiness of the simultaneous map on the support, and its upper continuity.

    For each component, ``samples`` directions must have a nonempty map. The
    continuity probe takes the anchor u of the component and, for each delta,
    the largest distance from the map at support points within delta of u to
    the map at u; these values must not increase as delta shrinks and must
    end at zero (within ``res``).
    """
    _require(established)
    rng = stream(seed, "sampling", 12)
    rows, wit = [], []
    for k, cid in enumerate(comps.ids):
        U = comps.sample(k, samples, rng)
        empty = [i for i, u in enumerate(U) if simultaneous_map(K, L, u).is_empty()]
        u0 = comps.anchor(k)
        base = simultaneous_map(K, L, u0)
        probe = []
        for d in deltas:
            worst = 0.0
            for v in _cap_samples(comps, k, u0, d, probe_samples, rng):
                S = simultaneous_map(K, L, v)
                if S.is_empty():
                    worst = math.inf
                    break
                worst = max(worst, directed_excess(S, base, res) if not base.is_empty() else math.inf)
            probe.append(worst)
        monotone = all(b <= a + res for a, b in zip(probe, probe[1:]))
        settles = probe[-1] <= res
        rows.append({"component": cid, "n_samples": len(U), "n_empty": len(empty),
                     "deltas": list(deltas), "probe": probe})
        if empty:
            wit.append(witness(cid, n_empty=len(empty), direction=U[empty[0]]))
        if not (monotone and settles):
            wit.append(witness(cid, probe=probe, deltas=list(deltas)))
    ok = not wit
    margins = {"n_components": len(comps), "max_empty": max((r["n_empty"] for r in rows), default=0),
               "final_probe": max((r["probe"][-1] for r in rows), default=0.0), "resolution": res}
    return CheckReport("simultaneous-map", ok, wit, margins, rows)


# ratio partition


def _cell_samples(cell: SphericalPolygon, s: int) -> np.ndarray:
    """Vertices plus an s x s bilinear grid over the cell (triangles as degenerate quads)."""
    V = cell.vertices
    if len(V) == 3:
        Q = np.vstack([V, V[2:]])
    elif len(V) == 4:
        Q = V
    else:
        c = cell.center
        return np.vstack([V] + [_cell_samples(SphericalPolygon([c, V[i], V[(i + 1) % len(V)]], check=False), s)
                                for i in range(len(V))])
    a = (np.arange(s) + 0.5) / s
    x, y = np.meshgrid(a, a)
    x, y = x.ravel()[:, None], y.ravel()[:, None]
    G = (1 - x) * (1 - y) * Q[0] + x * (1 - y) * Q[1] + x * y * Q[2] + (1 - x) * y * Q[3]
    return np.vstack([V, G / np.linalg.norm(G, axis=1)[:, None]])


def ratio_partition(K: Polytope, L: Polytope, family: TestFamily, s: int = 4,
                    eps: float = 1e-9) -> list[str]:
    """Label each cell by the sign of ``rho_K - rho_L`` on its samples.

    Labels: ``omega_prime`` (rho_K > rho_L throughout), ``omega``
    (rho_K < rho_L), ``omega_zero`` (equal) and ``mixed``. Differences are
    compared relative to ``max(rho_K, rho_L)`` so common dilation keeps labels.
    """
    out = []
    for cell in family.cells:
        U = _cell_samples(cell, s)
        a, b = radial(K, U), radial(L, U)
        d = (a - b) / np.maximum(a, b)
        if np.all(d > eps):
            out.append("omega_prime")
        elif np.all(d < -eps):
            out.append("omega")
        elif np.all(np.abs(d) <= eps):
            out.append("omega_zero")
        else:
            out.append("mixed")
    return out


def ratio_partition_report(K: Polytope, L: Polytope, family: TestFamily, s: int = 4) -> CheckReport:
    """Labels as a report (always passing) with counts in the margins."""
    labels = ratio_partition(K, L, family, s)
    counts = {lab: labels.count(lab) for lab in RATIO_LABELS}
    rows = [{"set": _set_id((i,)), "label": lab} for i, lab in enumerate(labels)]
    return CheckReport("ratio-partition", True, [], counts, rows)


# dilation per component


def _relative_spread(r: np.ndarray) -> float:
    top = float(np.max(np.abs(r)))
    return float((r.max() - r.min()) / top) if top > 0 else 0.0


def dilation_component_check(K: Polytope, L: Polytope, comps: SupportComponents,
                             established: CheckReport | None, samples: int = 1000,
                             tol: float = 1e-9, seed: int = 0) -> CheckReport:
    """``h_K / h_L`` must be constant on each support component (relative spread <= tol)."""
    _require(established)
    rng = stream(seed, "sampling", 13)
    rows, wit = [], []
    for k, cid in enumerate(comps.ids):
        V = comps.sample(k, samples, rng)
        r = support(K, V) / support(L, V)
        spread = _relative_spread(r)
        rows.append({"component": cid, "ratio": float(np.median(r)), "min": float(r.min()),
                     "max": float(r.max()), "spread": spread, "n": len(V)})
        if spread > tol:
            i, j = int(np.argmin(r)), int(np.argmax(r))
            wit.append(witness(cid, spread=spread, v_min=V[i], v_max=V[j]))
    margins = {"max_spread": max(r["spread"] for r in rows) if rows else 0.0, "tolerance": tol,
               "ratios": {r["component"]: r["ratio"] for r in rows}}
    return CheckReport("component-dilation", not wit, wit, margins, rows)


# ratio increments


def _step(u: np.ndarray, delta: float, rng) -> np.ndarray:
    """A point at arc distance delta from u in a random direction."""
    F = _frame(u)
    phi = rng.uniform(0.0, 2 * math.pi)
    t = math.cos(phi) * F[0] + math.sin(phi) * F[1]
    return math.cos(delta) * u + math.sin(delta) * t


def ratio_increment_check(K: Polytope, L: Polytope, comps: SupportComponents,
                          established: CheckReport | None, eps: float = 1e-6,
                          pair_samples: int = 200,
                          separations: Sequence[float] = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5),
                          seed: int = 0) -> CheckReport:
    """Increments of ``rho_{K*} / rho_{L*} = h_L / h_K`` between nearby support points.

    For each separation, pairs (u, u') in one component at that arc distance
    give ``|r(u') - r(u)| / |u' - u|``; the table holds the median, 90% quantile
    and maximum. The check passes when, for every component with pairs, the
    maximum at the smallest separation is at most ``eps``. Single atoms have
    no pairs and are reported with ``n = 0``.
    """
    _require(established)
    rng = stream(seed, "sampling", 14)
    seps = sorted(separations, reverse=True)
    rows, wit = [], []
    for k, cid in enumerate(comps.ids):
        if isinstance(comps.components[k][1], np.ndarray):
            rows.append({"component": cid, "separation": 0.0, "n": 0,
                         "q50": 0.0, "q90": 0.0, "max": 0.0})
            continue
        last = None
        for sep in seps:
            U, W = [], []
            for u in comps.sample(k, 4 * pair_samples, rng):
                if len(U) == pair_samples:
                    break
                v = _step(u, sep, rng)
                if comps.contains(k, v)[0]:
                    U.append(u)
                    W.append(v)
            U, W = np.array(U), np.array(W)
            if not len(U):
                continue
            rU = support(L, U) / support(K, U)
            rW = support(L, W) / support(K, W)
            q = np.abs(rW - rU) / np.linalg.norm(W - U, axis=1)
            last = {"component": cid, "separation": sep, "n": len(U),
                    "q50": float(np.quantile(q, 0.5)), "q90": float(np.quantile(q, 0.9)),
                    "max": float(q.max())}
            rows.append(last)
        if last is None or last["max"] > eps:
            wit.append(witness(cid, smallest_separation_max=None if last is None else last["max"]))
    worst = max((r["max"] for r in rows if r["separation"] == min(seps)), default=0.0)
    return CheckReport("ratio-increment", not wit, wit,
                       {"max_increment_at_smallest": worst, "tolerance": eps}, rows)
