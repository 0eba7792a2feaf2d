"""Acceptance suite: one test per criterion part, each timed against a 30 s budget.

A summary line per criterion is printed at the end of the pytest run.
"""
import json
import math
from fractions import Fraction

import numpy as np
import pytest

from conftest import criterion
from gaussimage.body import Polytope, cross_polytope, cube, frustum, polar, radial, radii, random_polytope, support
from gaussimage.cli import run
from gaussimage.gauss_image import gauss_image, reverse_gauss_image
from gaussimage.io import body_to_json, dump_json
from gaussimage.measure import Atoms, CapLebesgue, UniformLebesgue, grid_partition, monte_carlo_mass
from gaussimage.seeding import stream
from gaussimage.sphere import Cap, SphericalPolygon, SphericalRegion, random_directions, region_equal
from gaussimage.uniqueness import (
    ae_equal_check, dilation_component_check, simultaneous_map_check, support_components,
)
from gaussimage.variation import (
    geodesic_lipschitz_check, lipschitz_constant, lipschitz_scan, sweep_inclusion_check,
    union_identity_check, variation_image,
)

SEED = 0
E3 = np.eye(3)[2]
U111 = np.ones(3) / math.sqrt(3)
TOP_SQUARE = [[1, 1, 1], [-1, 1, 1], [-1, -1, 1], [1, -1, 1]]
INNER_SQUARE = [[.5, .5, 1], [-.5, .5, 1], [-.5, -.5, 1], [.5, -.5, 1]]
ATOMS = Atoms([(E3, 1.0), (-E3, 1.0)])
CAPS = CapLebesgue([Cap(E3, 0.1), Cap(-E3, 0.1)])


def instances(part: int) -> np.random.Generator:
    return stream(SEED, "instances", 100 + part)


def random_query(rng):
    kind = rng.integers(3)
    c = random_directions(1, rng)[0]
    if kind == 0:
        return c
    if kind == 1:
        return Cap(c, float(rng.uniform(0.01, 0.5)))
    P = c + 0.3 * random_directions(3, rng)
    return SphericalPolygon(P / np.linalg.norm(P, axis=1)[:, None])


def max_vertex_gap(A, B):
    D = np.linalg.norm(A[:, None, :] - B[None, :, :], axis=2)
    return max(D.min(axis=1).max(), D.min(axis=0).max())


def strata_counts(R):
    return len(R.points), len(R.arcs), len(R.polygons)


def test_c01_polar_involution_float():
    with criterion(1, "duality suite") as notes:
        rng = instances(1)
        U = random_directions(1000, rng)
        worst_gap = worst_dual = 0.0
        for _ in range(100):
            K = random_polytope(int(rng.integers(8, 41)), rng)
            KK = polar(polar(K))
            assert len(KK.vertices) == len(K.vertices)
            worst_gap = max(worst_gap, max_vertex_gap(KK.vertices, K.vertices))
            worst_dual = max(worst_dual, float(np.abs(support(polar(K), U) * radial(K, U) - 1).max()))
        notes.append(f"float gap {worst_gap:.1e}, |h*rho-1| {worst_dual:.1e}")
        assert worst_gap <= 1e-7 and worst_dual <= 1e-9


def test_c01_polar_involution_rational():
    with criterion(1, "duality suite") as notes:
        rng = instances(1)
        random_directions(1000, rng)
        for _ in range(100):
            K = random_polytope(int(rng.integers(8, 41)), rng)
            Q = Polytope([tuple(Fraction(x).limit_denominator(10 ** 6) for x in p) for p in K.vertices],
                         exact=True)
            assert sorted(polar(polar(Q)).exact_vertices) == sorted(Q.exact_vertices)
        notes.append("rational exact on 100")


def test_c02_reverse_image_is_image_of_polar():
    with criterion(2, "gauss-image duality") as notes:
        rng = instances(2)
        mismatches = 0
        for _ in range(50):
            K = random_polytope(int(rng.integers(6, 41)), rng)
            w = random_query(rng)
            A = reverse_gauss_image(K, w).region
            B = gauss_image(polar(K), w).region
            mismatches += not (strata_counts(A) == strata_counts(B) and region_equal(A, B))
        notes.append(f"{mismatches} mismatches in 50")
        assert mismatches == 0


def test_c03_cone_inclusion():
    with criterion(3, "cone inclusion") as notes:
        rng = instances(3)
        worst = math.inf
        for _ in range(20):
            K = random_polytope(int(rng.integers(8, 41)), rng)
            rr = radii(K)
            for u in random_directions(1000, rng):
                V = gauss_image(K, u).region.vertices()
                worst = min(worst, float((V @ u).min() - rr.r / rr.R))
        notes.append(f"min(u.n - r/R) {worst:.3e}")
        assert worst >= -1e-9


def test_c04_endpoints():
    with criterion(4, "variation endpoints and union identity") as notes:
        rng = instances(4)
        for _ in range(20):
            K, L = random_polytope(int(rng.integers(8, 30)), rng), random_polytope(int(rng.integers(8, 30)), rng)
            w = random_query(rng)
            assert region_equal(variation_image(K, L, 0.0, w).region, gauss_image(K, w).region)
            assert region_equal(variation_image(K, L, 1.0, w).region, gauss_image(L, w).region)
        notes.append("20 endpoint pairs equal")


def test_c04_union_identity():
    with criterion(4, "variation endpoints and union identity") as notes:
        rep = union_identity_check(cube(), cross_polytope(2), U111, t_samples=200, res=1e-3)
        notes.append(f"union d_H {rep.margins['hausdorff']:.1e}")
        assert rep.passed


def test_c05_geodesic_lipschitz_grid():
    with criterion(5, "geodesic Lipschitz grid") as notes:
        rng = instances(5)
        violations, tightest = 0, 0.0
        for _ in range(1000):
            u1 = random_directions(1, rng)[0] * rng.uniform(0.2, 5.0)
            u2 = random_directions(1, rng)[0] * rng.uniform(0.2, 5.0)
            cos_t = float(u1 @ u2 / np.linalg.norm(u1) / np.linalg.norm(u2))
            theta = math.acos(min(1.0, max(-1.0, cos_t)))
            alpha = rng.uniform(0.01, 1.0) * math.asin(math.cos(theta / 2))
            ratio, bound = geodesic_lipschitz_check(u1, u2, alpha)
            violations += ratio > bound
            tightest = max(tightest, ratio / bound)
        notes.append(f"{violations} violations, max ratio/bound {tightest:.3f}")
        assert violations == 0


def test_c06_cube_vs_cross_scan(tmp_path):
    with criterion(6, "Lipschitz scan") as notes:
        k, l, w, out = (tmp_path / n for n in ("k.json", "l.json", "w.json", "rep.json"))
        dump_json(body_to_json(cube()), k)
        dump_json(body_to_json(cross_polytope(2)), l)
        dump_json({"polygons": [TOP_SQUARE]}, w)
        code = run(["lipschitz-scan", "--k", str(k), "--l", str(l), "--omega", str(w),
                    "--t-count", "200", "--resolution", "1e-3", "--out", str(out)])
        m = json.loads(out.read_text())["margins"]
        notes.append(f"cube/2X max {m['max_ratio']:.3f} <= {m['bound']:.3f}")
        assert code == 0 and m["bound"] == pytest.approx(4 * math.sqrt(3))


def test_c06_random_pairs():
    with criterion(6, "Lipschitz scan") as notes:
        rng = instances(6)
        worst = 0.0
        for _ in range(20):
            K, L = random_polytope(15, rng), random_polytope(15, rng)
            rep = lipschitz_scan(K, L, Cap(random_directions(1, rng)[0], 0.3), t_count=20)
            assert rep.passed and rep.margins["bound"] == lipschitz_constant(K, L)
            worst = max(worst, rep.margins["max_ratio"] / rep.margins["bound"])
        notes.append(f"20 random pairs, max ratio/bound {worst:.3f}")


@pytest.mark.parametrize("name,ring", [("top", TOP_SQUARE), ("inner", INNER_SQUARE)])
def test_c07_sweep_inclusion(name, ring):
    with criterion(7, "sweep inclusion") as notes:
        rep = sweep_inclusion_check(cube(), cross_polytope(2), SphericalPolygon(ring),
                                    t_count=2000, samples=500, seed=SEED)
        m = rep.margins
        assert m["miss_threshold"] == pytest.approx(4 * math.sqrt(3) / 2000 + 1e-3)
        if m["vacuous"]:
            notes.append(f"{name} square: empty left set")
        else:
            notes.append(f"{name} square: {m['n_samples']} points, miss {m['worst_miss']:.1e}")
            assert m["n_samples"] == 500
        assert rep.passed


def test_c08_positive_instance():
    with criterion(8, "a.e. equality, positive instance") as notes:
        fam = grid_partition(0.5, seed=SEED, measures=[ATOMS])
        rep = ae_equal_check(cube(), frustum(), ATOMS, fam, eps=0.0)
        assert rep.passed and all(r["m"] == 0.0 and r["s"] == 0.0 for r in rep.table)
        fam = grid_partition(0.5, seed=SEED, measures=[CAPS])
        rep = ae_equal_check(cube(), frustum(), CAPS, fam)
        assert rep.passed and all(r["m"] <= 1e-9 and r["s"] <= 1e-9 for r in rep.table)
        notes.append(f"atoms exact zero, caps max s {rep.margins['max_s']:.1e}")


def test_c09_negative_instance():
    with criterion(9, "a.e. equality, negative instance") as notes:
        lam = UniformLebesgue()
        rep = ae_equal_check(cube(), cross_polytope(), lam, grid_partition(0.5, seed=SEED, measures=[lam]))
        assert not rep.passed
        strong = [r for r in rep.table if r["m"] >= 0.1 and r["s"] >= 0.1 and r["set"].startswith("cell")]
        w = rep.witnesses[0]
        notes.append(f"witness {w['set']} s={w['values']['s']:.3f} m={w['values']['m']:.3f}")
        assert strong and w["values"]["s"] >= 0.1 and w["values"]["m"] >= 0.1


@pytest.mark.parametrize("lam", [ATOMS, CAPS], ids=["atoms", "caps"])
def test_c10_simultaneous_map(lam):
    with criterion(10, "simultaneous map") as notes:
        K, L = cube(), frustum()
        ae = ae_equal_check(K, L, lam, grid_partition(0.5, seed=SEED, measures=[lam]))
        rep = simultaneous_map_check(K, L, support_components(lam), ae, samples=1000, seed=SEED)
        assert rep.margins["max_empty"] == 0
        for row in rep.table:
            assert all(b <= a + rep.margins["resolution"] for a, b in zip(row["probe"], row["probe"][1:]))
            assert row["probe"][-1] <= rep.margins["resolution"]
        notes.append(f"{type(lam).__name__}: nonempty, final probe {rep.margins['final_probe']:.1e}")
        assert rep.passed


def test_c11_component_dilation():
    with criterion(11, "per-component dilation") as notes:
        K, L = cube(), frustum()
        for lam in (ATOMS, CAPS):
            ae = ae_equal_check(K, L, lam, grid_partition(0.5, seed=SEED, measures=[lam]))
            rep = dilation_component_check(K, L, support_components(lam), ae, seed=SEED)
            ratios = list(rep.margins["ratios"].values())
            assert rep.passed and rep.margins["max_spread"] <= 1e-9
            assert ratios == [pytest.approx(1.0, abs=1e-12), pytest.approx(0.5, abs=1e-12)]
        lam = UniformLebesgue()
        ae = ae_equal_check(K, cube(2), lam, grid_partition(0.5, seed=SEED, measures=[lam]))
        rep = dilation_component_check(K, cube(2), support_components(lam), ae, seed=SEED)
        assert rep.passed and rep.margins["max_spread"] == 0.0
        assert rep.margins["ratios"] == {"sphere": 0.5}
        notes.append("frustum ratios 1 and 1/2, dilate pair 1/2")


def random_region(rng):
    polys = []
    for _ in range(int(rng.integers(1, 3))):
        c = random_directions(1, rng)[0]
        P = c + 0.5 * random_directions(3, rng)
        polys.append(SphericalPolygon(P / np.linalg.norm(P, axis=1)[:, None]))
    return SphericalRegion(polygons=polys)


MEASURES = {"uniform": UniformLebesgue(), "atoms": Atoms([(u, 1.0) for u in np.vstack([np.eye(3), -np.eye(3)])]),
            "caps": CapLebesgue([Cap(E3, 0.5), Cap(U111, 0.4)], 1.5)}


@pytest.mark.parametrize("kind", list(MEASURES))
def test_c12_measure_axioms(kind):
    with criterion(12, "measure axioms") as notes:
        lam = MEASURES[kind]
        rng = instances(12)
        worst = -math.inf
        for _ in range(1000):
            A, B = random_region(rng), random_region(rng)
            a, b, ab = lam.mass(A), lam.mass(B), lam.mass(A.union(B))
            worst = max(worst, a - ab, b - ab, ab - a - b)
        notes.append(f"{kind} worst violation {worst:.1e}")
        assert worst <= 1e-9


@pytest.mark.parametrize("kind", ["uniform", "caps"])
def test_c12_monte_carlo(kind):
    with criterion(12, "measure axioms") as notes:
        lam = MEASURES[kind]
        # a triangle near e3 straddling the edge of the first cap
        P = E3 + 0.6 * random_directions(3, instances(120))
        R = SphericalRegion(polygons=[SphericalPolygon(P / np.linalg.norm(P, axis=1)[:, None])])
        exact = lam.mass(R)
        est, se = monte_carlo_mass(lam, R, 1_000_000, stream(SEED, "monte-carlo"))
        notes.append(f"{kind} MC {abs(est - exact) / se:.2f} SE")
        assert abs(est - exact) <= 4 * se
