"""``gil``: run Gauss image computations and checks on JSON inputs.

Every command except ``generate`` writes a JSON report (``check``,
``verdict``, ``witnesses``, ``margins``, ``config`` and, for computations,
``result``) to ``--out`` or stdout; ``generate`` writes a body file. A
report whose result is a body can be passed back as ``--k``. Exit status:
0 pass, 1 fail, 2 bad input.

CSV outputs (``--csv``): ``lipschitz-scan`` writes rows ``t,d_H,ratio,bound``;
``ratio-partition`` writes ``set,label``; ``uniqueness-check`` writes
``set,m,s,exact``.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys
from fractions import Fraction

from . import io as gio
from .body import Polytope, cross_polytope, cube, frustum, polar, random_polytope
from .errors import GeometryError, HypothesisNotEstablished, InputError, PartitionFailure
from .gauss_image import gauss_image, reverse_gauss_image
from .measure import Atoms, grid_partition
from .report import CheckReport, witness
from .seeding import stream
from .sphere import SphericalPolygon
from .uniqueness import (
    ae_equal_check, dilation_component_check, ratio_increment_check, ratio_partition_report,
    support_components,
)
from .variation import harmonic_mean, lipschitz_scan, scan_csv, sweep_inclusion_check

# knobs that do not change results and are left out of the recorded config
_NOT_CONFIG = {"func", "out", "csv", "workers"}


def _need(args, *names):
    for n in names:
        if getattr(args, n, None) is None:
            raise InputError(f"--{n.replace('_', '-')} is required for {args.command}")


def _body(path, args):
    return gio.load_body(path, args.mode)


def _gamma(args) -> SphericalPolygon:
    q = gio.load_query(args.omega)
    if len(q) != 1 or not isinstance(q[0], SphericalPolygon):
        raise InputError("--omega must hold exactly one polygon for this command")
    return q[0]


def _family(args, lam):
    return grid_partition(args.family_diameter, seed=args.seed, measures=[lam])


def _ae_eps(args, lam) -> float:
    # rational bodies with atoms: memberships are exact, so demand exact zero
    return 0.0 if args.mode == "rational" and isinstance(lam, Atoms) else 1e-9


def cmd_polar(args) -> CheckReport:
    _need(args, "k")
    K = _body(args.k, args)
    P = polar(K)
    return CheckReport("polar", True, [], {"n_vertices": len(P.vertices), "n_facets": len(P.normals)},
                       result=gio.body_to_json(P))


def cmd_gauss_image(args) -> CheckReport:
    _need(args, "k", "omega")
    K = _body(args.k, args)
    q = gio.load_query(args.omega)
    img = (reverse_gauss_image if args.reverse else gauss_image)(K, q)
    R = img.region
    return CheckReport("reverse-gauss-image" if args.reverse else "gauss-image", True, [],
                       {"n_points": len(R.points), "n_arcs": len(R.arcs),
                        "n_polygons": len(R.polygons), "area": R.area},
                       result={"region": gio.region_to_json(R),
                               "provenance": [list(p) for p in img.provenance]})


def cmd_measure(args) -> CheckReport:
    _need(args, "k", "lam", "omega")
    K = _body(args.k, args)
    lam = gio.load_measure(args.lam)
    q = gio.load_query(args.omega)
    mass = lam.mass(gauss_image(K, q).region)
    return CheckReport("gauss-image-measure", True, [], {"mass": mass}, result={"mass": mass})


def cmd_harmonic(args) -> CheckReport:
    _need(args, "k", "l")
    K, L = _body(args.k, args), _body(args.l, args)
    t = Fraction(args.t) if args.mode == "rational" else float(args.t)
    if not 0 <= t <= 1:
        raise InputError("--t must lie in [0, 1]")
    H = harmonic_mean(K, L, t)
    return CheckReport("harmonic-mean", True, [], {"n_vertices": len(H.vertices)},
                       result=gio.body_to_json(H))


def cmd_lipschitz_scan(args) -> CheckReport:
    _need(args, "k", "l", "omega")
    K, L = _body(args.k, args), _body(args.l, args)
    q = gio.load_query(args.omega)
    args.t_count = args.t_count or 200
    rep = lipschitz_scan(K, L, q, args.t_count, args.resolution, args.workers)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(scan_csv(rep))
    return rep


def cmd_sweep_check(args) -> CheckReport:
    _need(args, "k", "l", "omega")
    K, L = _body(args.k, args), _body(args.l, args)
    args.t_count = args.t_count or 2000
    return sweep_inclusion_check(K, L, _gamma(args), args.t_count, args.samples, seed=args.seed,
                                 workers=args.workers)


def _ae(args):
    _need(args, "k", "l", "lam")
    K, L = _body(args.k, args), _body(args.l, args)
    lam = gio.load_measure(args.lam)
    rep = ae_equal_check(K, L, lam, _family(args, lam), eps=_ae_eps(args, lam), workers=args.workers)
    return K, L, lam, rep


def cmd_uniqueness_check(args) -> CheckReport:
    _, _, _, rep = _ae(args)
    if args.csv:
        _write_rows(args.csv, ["set", "m", "s", "exact"], rep.table)
    return rep


def cmd_dilation_check(args) -> CheckReport:
    K, L, lam, ae = _ae(args)
    comps = support_components(lam)
    try:
        rep = dilation_component_check(K, L, comps, ae, args.samples, seed=args.seed)
        inc = ratio_increment_check(K, L, comps, ae, seed=args.seed)
    except HypothesisNotEstablished as exc:
        return CheckReport("component-dilation", False,
                           [witness("hypothesis", reason=str(exc), max_s=ae.margins["max_s"])],
                           {"ae_max_s": ae.margins["max_s"]})
    rep.margins["max_increment_at_smallest"] = inc.margins["max_increment_at_smallest"]
    if not inc.passed:
        rep.passed = False
        rep.witnesses.extend(inc.witnesses)
    return rep


def cmd_ratio_partition(args) -> CheckReport:
    _need(args, "k", "l")
    K, L = _body(args.k, args), _body(args.l, args)
    fam = grid_partition(args.family_diameter, seed=args.seed)
    rep = ratio_partition_report(K, L, fam)
    if args.csv:
        _write_rows(args.csv, ["set", "label"], rep.table)
    return rep


def cmd_generate(args) -> dict:
    exact = args.mode == "rational"
    if args.kind == "cube":
        K = cube(args.c, exact=exact)
    elif args.kind == "cross":
        K = cross_polytope(args.c, exact=exact)
    elif args.kind == "frustum":
        K = frustum(exact=exact)
    else:
        K = random_polytope(args.m, stream(args.seed, "instances"))
        if exact:
            K = Polytope([tuple(Fraction(x).limit_denominator(10 ** 6) for x in p) for p in K.vertices],
                         exact=True)
    return gio.body_to_json(K)


def _write_rows(path, cols, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([repr(r[c]) if isinstance(r[c], float) else r[c] for c in cols])
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gil", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=fn)
        sp.add_argument("--k", help="body JSON")
        sp.add_argument("--l", help="second body JSON")
        sp.add_argument("--lambda", dest="lam", help="measure JSON")
        sp.add_argument("--omega", help="query set JSON")
        sp.add_argument("--family-diameter", type=float, default=0.5)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--resolution", type=float, default=1e-3)
        sp.add_argument("--t-count", type=int, default=None)
        sp.add_argument("--mode", choices=["float", "rational"], default="float")
        sp.add_argument("--out", help="report path (default: stdout)")
        sp.add_argument("--csv", help="plot-ready CSV path")
        sp.add_argument("--workers", type=int, default=1)
        return sp

    add("polar", cmd_polar, "polar body")
    add("gauss-image", cmd_gauss_image, "Gauss image of a query set").add_argument(
        "--reverse", action="store_true", help="reverse image instead")
    add("measure", cmd_measure, "Gauss image measure lambda(K, omega)")
    add("harmonic", cmd_harmonic, "harmonic mean of two bodies").add_argument("--t", default="0.5")
    add("lipschitz-scan", cmd_lipschitz_scan, "Hausdorff speed along the harmonic path")
    add("sweep-check", cmd_sweep_check, "sweep covers the image symmetric difference").add_argument(
        "--samples", type=int, default=500)
    add("uniqueness-check", cmd_uniqueness_check, "a.e. equality of Gauss image maps")
    add("dilation-check", cmd_dilation_check, "per-component dilation").add_argument(
        "--samples", type=int, default=1000)
    add("ratio-partition", cmd_ratio_partition, "label cells by the sign of rho_K - rho_L")
    g = add("generate", cmd_generate, "emit a canonical body")
    g.add_argument("--kind", choices=["cube", "cross", "frustum", "random"], required=True)
    g.add_argument("--m", type=int, default=30, help="points for random bodies")
    g.add_argument("--c", default="1", help="scale for cube and cross")
    return p


def _config(args) -> dict:
    return {k: str(v) if isinstance(v, Fraction) else v
            for k, v in sorted(vars(args).items()) if k not in _NOT_CONFIG}


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if hasattr(args, "c"):
        try:
            args.c = Fraction(args.c) if args.mode == "rational" else float(args.c)
        except (ValueError, ZeroDivisionError):
            print(f"gil: bad --c {args.c!r}", file=sys.stderr)
            return 2
    try:
        rep = args.func(args)
    except (InputError, GeometryError, FileNotFoundError) as exc:
        print(f"gil: {exc}", file=sys.stderr)
        return 2
    except PartitionFailure as exc:
        print(f"gil: partition failed: {exc}", file=sys.stderr)
        return 1
    if isinstance(rep, dict):
        text = gio.dump_json(rep)
    else:
        rep.config = _config(args)
        text = rep.to_json()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if isinstance(rep, dict) or rep.passed else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
