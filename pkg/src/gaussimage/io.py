"""JSON formats for bodies, measures and query sets.

Body: ``{"vertices": [[x, y, z], ...]}``; rational coordinates may be
written as strings such as ``"1/3"``. Measure: ``{"kind": "atoms", "atoms":
[{"dir": [x, y, z], "w": w}, ...]}``, ``{"kind": "uniform"}`` or
``{"kind": "cap_lebesgue", "caps": [{"center": [x, y, z], "radius": r}, ...],
"density": d}``. Query set: any of ``"points"``, ``"arcs"`` (pairs of
endpoints), ``"polygons"`` (vertex lists) and ``"caps"``.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from .body import Polytope
from .errors import GeometryError, InputError
from .measure import Atoms, CapLebesgue, SphericalMeasure, UniformLebesgue
from .sphere import Cap, GeodesicArc, SphericalPolygon, SphericalRegion

__all__ = [
    "read_json", "body_from_json", "body_to_json", "load_body", "measure_from_json",
    "measure_to_json", "load_measure", "query_from_json", "load_query", "region_to_json",
    "dump_json",
]


def read_json(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"{path}: {exc}") from None
    if not isinstance(data, dict):
        raise InputError(f"{path}: expected a JSON object")
    return data


def dump_json(data, path=None) -> str:
    """Canonical text (sorted keys, two-space indent, trailing newline); written when path is given."""
    text = json.dumps(data, sort_keys=True, indent=2) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def _coord(x, exact: bool):
    if isinstance(x, bool) or not isinstance(x, (int, float, str)):
        raise InputError(f"bad coordinate {x!r}")
    try:
        return Fraction(x) if exact else float(Fraction(x) if isinstance(x, str) else x)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"bad coordinate {x!r}") from None


def _vec(v, exact: bool = False):
    if not isinstance(v, (list, tuple)) or len(v) != 3:
        raise InputError(f"expected a 3-vector, got {v!r}")
    return tuple(_coord(x, exact) for x in v)


def body_from_json(data: dict, mode: str = "float") -> Polytope:
    if mode not in ("float", "rational"):
        raise InputError(f"unknown mode {mode!r}")
    verts = data.get("vertices")
    if verts is None and isinstance(data.get("result"), dict):
        # a report whose result is a body
        verts = data["result"].get("vertices")
    if not isinstance(verts, list):
        raise InputError('body needs a "vertices" list')
    exact = mode == "rational"
    if exact and any(isinstance(x, float) and not float(x).is_integer() for v in verts for x in v):
        raise InputError("rational mode needs integer or 'p/q' string coordinates")
    pts = [_vec(v, exact) for v in verts]
    try:
        return Polytope(pts, exact=exact)
    except GeometryError as exc:
        raise InputError(f"invalid body: {exc}") from None


def body_to_json(K: Polytope) -> dict:
    if K.is_exact:
        verts = [[str(x) for x in p] for p in K.exact_vertices]
    else:
        verts = [[float(x) for x in p] for p in np.round(K.vertices, 15) + 0.0]
    return {"vertices": sorted(verts)}


def load_body(path, mode: str = "float") -> Polytope:
    return body_from_json(read_json(path), mode)


def measure_from_json(data: dict) -> SphericalMeasure:
    kind = data.get("kind")
    try:
        if kind == "uniform":
            return UniformLebesgue()
        if kind == "atoms":
            return Atoms([(_vec(a["dir"]), float(a["w"])) for a in data["atoms"]])
        if kind == "cap_lebesgue":
            caps = [Cap(_vec(c["center"]), float(c["radius"])) for c in data["caps"]]
            return CapLebesgue(caps, float(data.get("density", 1.0)))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad {kind} measure: {exc}") from None
    raise InputError(f"unknown measure kind {kind!r}")


def measure_to_json(lam: SphericalMeasure) -> dict:
    if isinstance(lam, UniformLebesgue):
        return {"kind": "uniform"}
    if isinstance(lam, Atoms):
        return {"kind": "atoms", "atoms": [{"dir": u.tolist(), "w": float(w)}
                                           for u, w in zip(lam.dirs, lam.weights)]}
    if isinstance(lam, CapLebesgue):
        return {"kind": "cap_lebesgue", "density": lam.density,
                "caps": [{"center": c.center.tolist(), "radius": c.radius} for c in lam.caps]}
    raise TypeError(f"cannot serialize {type(lam).__name__}")


def load_measure(path) -> SphericalMeasure:
    return measure_from_json(read_json(path))


def query_from_json(data: dict) -> list:
    """A query set as a flat list of strata and caps."""
    try:
        out = [np.array(_vec(p)) / np.linalg.norm(_vec(p)) for p in data.get("points", [])]
        out += [GeodesicArc(_vec(a), _vec(b)) for a, b in data.get("arcs", [])]
        out += [SphericalPolygon([_vec(v) for v in poly]) for poly in data.get("polygons", [])]
        out += [Cap(_vec(c["center"]), float(c["radius"])) for c in data.get("caps", [])]
    except (GeometryError, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad query set: {exc}") from None
    if not out:
        raise InputError("empty query set")
    return out


def load_query(path) -> list:
    return query_from_json(read_json(path))


def region_to_json(R: SphericalRegion) -> dict:
    return R.to_json()
