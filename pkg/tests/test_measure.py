import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gaussimage.body import cube, random_polytope
from gaussimage.errors import PartitionFailure
from gaussimage.measure import (
    Atoms, CapLebesgue, UniformLebesgue, gauss_image_measure, grid_partition, monte_carlo_mass,
    region_measure, slice_area, symdiff_distance,
)
from gaussimage.gauss_image import gauss_image
from gaussimage.sphere import Cap, SphericalPolygon, SphericalRegion, random_directions

E1, E2, E3 = np.eye(3)
U111 = np.ones(3) / math.sqrt(3)
OCT = SphericalRegion(polygons=[SphericalPolygon([E1, E2, E3])])
POLES = Atoms([(E3, 1.0), (-E3, 1.0)])


def random_triangle(rng, size=0.5):
    c = random_directions(1, rng)[0]
    P = c + size * random_directions(3, rng)
    return SphericalPolygon(P / np.linalg.norm(P, axis=1)[:, None])


def random_region(rng):
    return SphericalRegion(polygons=[random_triangle(rng) for _ in range(int(rng.integers(1, 3)))])


def test_region_measure_examples():
    U = UniformLebesgue()
    assert region_measure(U, SphericalRegion.sphere()) == pytest.approx(4 * math.pi, abs=1e-12)
    assert region_measure(U, OCT) == pytest.approx(math.pi / 2, abs=1e-14)
    assert region_measure(POLES, OCT) == 1.0
    assert region_measure(U, SphericalRegion()) == 0.0


def test_gauss_image_measure_examples():
    U, C = UniformLebesgue(), cube()
    assert gauss_image_measure(U, C, U111) == pytest.approx(math.pi / 2, abs=1e-12)
    assert gauss_image_measure(U, C, SphericalRegion.sphere()) == pytest.approx(4 * math.pi, abs=1e-9)
    six = Atoms([(s * e, 1.0) for e in np.eye(3) for s in (1, -1)])
    # image of the cap is {e3}; only the e3 atom is a member
    assert gauss_image(C, Cap(E3, math.pi / 8)).region.contains(six.dirs).tolist() == [
        False, False, False, False, True, False]
    assert gauss_image_measure(six, C, Cap(E3, math.pi / 8)) == 1.0


def test_symdiff_examples():
    U = UniformLebesgue()
    other = SphericalRegion(polygons=[SphericalPolygon([-E1, E3, E2][::-1])])
    assert symdiff_distance(U, OCT, OCT) == 0.0
    assert symdiff_distance(U, OCT, other) == pytest.approx(math.pi, abs=1e-12)
    assert symdiff_distance(Atoms([(E3, 1.0)]), SphericalRegion([E3]), SphericalRegion([U111])) == 1.0


def test_cap_lebesgue_counts_overlap_once():
    caps = [Cap(E3, 0.3), Cap(np.array([0.1, 0, 1]), 0.3)]
    lam = CapLebesgue(caps, density=2.0)
    # total mass of the union against a direct slice integration of a covering polygon
    big = SphericalRegion(polygons=[Cap(E3, 0.8).to_polygon(1e-3)])
    assert lam.mass(big) == pytest.approx(lam.total, abs=1e-9)
    single = CapLebesgue([Cap(E3, 0.3)])
    assert single.total == pytest.approx(2 * math.pi * (1 - math.cos(0.3)), abs=1e-12)


def test_slice_area_matches_girard():
    rng = np.random.default_rng(1)
    for _ in range(50):
        p = random_triangle(rng, 0.8)
        assert slice_area(p) == pytest.approx(p.area, abs=1e-10)


def test_monte_carlo_agrees_with_girard():
    rng = np.random.default_rng(2)
    R = random_region(rng)
    est, se = monte_carlo_mass(UniformLebesgue(), R, 200_000, np.random.default_rng(3))
    assert abs(est - R.area) <= 4 * se


@pytest.mark.parametrize("lam", [UniformLebesgue(), POLES,
                                 CapLebesgue([Cap(E3, 0.5), Cap(U111, 0.4)], 1.5)],
                         ids=["uniform", "atoms", "caps"])
def test_monotone_and_subadditive(lam):
    rng = np.random.default_rng(4)
    for _ in range(100):
        A, B = random_region(rng), random_region(rng)
        AB = A.union(B)
        a, b, ab = lam.mass(A), lam.mass(B), lam.mass(AB)
        assert a <= ab + 1e-9 and b <= ab + 1e-9
        assert ab <= a + b + 1e-9
    assert lam.mass(SphericalRegion()) == 0.0


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_symdiff_is_symmetric_and_dominates_mass_gap(seed):
    rng = np.random.default_rng(seed)
    A, B = random_region(rng), random_region(rng)
    for lam in (UniformLebesgue(), CapLebesgue([Cap(random_directions(1, rng)[0], 0.7)])):
        d = symdiff_distance(lam, A, B)
        assert d == pytest.approx(symdiff_distance(lam, B, A), abs=1e-9)
        assert abs(lam.mass(A) - lam.mass(B)) <= d + 1e-9


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_pullback_subadditive(seed):
    rng = np.random.default_rng(seed)
    K = random_polytope(20, rng)
    U = UniformLebesgue()
    w1, w2 = random_triangle(rng), random_triangle(rng)
    both = gauss_image_measure(U, K, [w1, w2])
    assert both <= gauss_image_measure(U, K, w1) + gauss_image_measure(U, K, w2) + 1e-9
    A, B = gauss_image(K, w1).region, gauss_image(K, w2).region
    overlap = U.mass(A) + U.mass(B) - U.mass(A.union(B))
    if overlap <= 1e-12:
        assert both == pytest.approx(gauss_image_measure(U, K, w1) + gauss_image_measure(U, K, w2), abs=1e-9)


def test_grid_partition_postconditions():
    fam = grid_partition(0.5, seed=1)
    assert fam.diameters().max() < 0.5
    assert sum(c.area for c in fam.cells) == pytest.approx(4 * math.pi, abs=1e-6)
    # interiors are disjoint: random points fall in exactly one cell (away from boundaries)
    P = random_directions(2000, np.random.default_rng(0))
    P = P[fam.boundary_distance(P) > 1e-9]
    hits = np.sum([c.contains(P, eps=0.0) for c in fam.cells], axis=0)
    assert np.all(hits == 1)


def test_grid_partition_keeps_atoms_off_boundaries():
    fam = grid_partition(0.5, seed=3, measures=[POLES])
    assert fam.boundary_distance(POLES.dirs).min() > 1e-9
    again = grid_partition(0.5, seed=3, measures=[POLES])
    assert np.array_equal(fam.rotation, again.rotation)


def test_grid_partition_failure():
    with pytest.raises(PartitionFailure):
        grid_partition(0.5, seed=0, avoid_points=random_directions(50, np.random.default_rng(0)),
                       margin=0.3, max_attempts=5)


def test_family_unions_are_connected():
    fam = grid_partition(0.7, seed=0)
    adj = set(fam.adjacency)
    for u in fam.unions(3):
        pairs = [(a, b) for a in u for b in u if a < b and (a, b) in adj]
        assert len(pairs) >= len(u) - 1
