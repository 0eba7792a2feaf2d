import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gaussimage.body import cross_polytope, cube, dilate, frustum, polar, radial, random_polytope
from gaussimage.errors import HypothesisNotEstablished
from gaussimage.gauss_image import gauss_image
from gaussimage.measure import Atoms, CapLebesgue, UniformLebesgue, grid_partition
from gaussimage.sphere import Cap, region_equal
from gaussimage.uniqueness import (
    ae_equal_check, dilation_component_check, ratio_increment_check, ratio_partition,
    simultaneous_map, simultaneous_map_check, support_components,
)

E1, E2, E3 = np.eye(3)
ATOMS = Atoms([(E3, 1.0), (-E3, 1.0)])
CAPS = CapLebesgue([Cap(E3, 0.1), Cap(-E3, 0.1)])
UNIFORM = UniformLebesgue()


def family(lam):
    return grid_partition(0.5, seed=0, measures=[lam])


def established(K, L, lam):
    return ae_equal_check(K, L, lam, family(lam))


def test_support_components():
    assert support_components(ATOMS).ids == ["atom-0", "atom-1"]
    assert support_components(UNIFORM).ids == ["sphere"]
    merged = CapLebesgue([Cap(E3, 0.2), Cap(E3 + 0.2 * E1, 0.1), Cap(-E3, 0.1)])
    assert support_components(merged).ids == ["caps-0-1", "caps-2"]


def test_ae_dilate_pair_is_exactly_equal():
    rep = established(cube(), cube(2), UNIFORM)
    assert rep.passed and rep.margins["max_s"] == 0.0 and rep.margins["max_m"] == 0.0


@pytest.mark.parametrize("lam", [ATOMS, CAPS], ids=["atoms", "caps"])
def test_ae_cube_frustum(lam):
    rep = established(cube(), frustum(), lam)
    assert rep.passed, rep.summary()
    assert all(r["s"] <= 1e-9 and r["m"] <= 1e-9 for r in rep.table)


def test_ae_cube_cross_fails_with_paired_witness():
    rep = established(cube(), cross_polytope(), UNIFORM)
    assert not rep.passed
    w = rep.witnesses[0]
    assert w["values"]["s"] > 0.1 and w["values"]["m"] > 0.1
    assert w["values"]["largest_m"] > 0.1
    # the cell holding the cube's vertex direction is among the failing sets
    fam = family(UNIFORM)
    k = next(i for i, c in enumerate(fam.cells) if c.contains(np.ones(3) / math.sqrt(3))[0])
    row = next(r for r in rep.table if r["set"] == f"cell-{k}")
    assert row["s"] > 0 and row["m"] > 0


@pytest.mark.parametrize("K,L,lam", [(cube(), cube(2), UNIFORM), (cube(), frustum(), ATOMS),
                                     (cube(), cross_polytope(), UNIFORM)], ids=["2C", "F", "X"])
def test_ae_equivalence_on_instances(K, L, lam):
    rep = established(K, L, lam)
    if max(r["m"] for r in rep.table) <= 1e-9:
        assert max(r["s"] for r in rep.table) <= 1e-9
    for w in rep.witnesses:
        if w["values"]["s"] > 0.1:
            assert rep.margins["max_m"] > 0
    # m never exceeds s
    assert all(r["m"] <= r["s"] + 1e-12 for r in rep.table)


def test_simultaneous_map_examples():
    C = cube()
    assert region_equal(simultaneous_map(C, C, E1), gauss_image(polar(C), E1).region)
    assert region_equal(simultaneous_map(C, cube(2), E3), gauss_image(polar(C), E3).region)
    assert not simultaneous_map(C, frustum(), E3).is_empty()


@pytest.mark.parametrize("lam", [ATOMS, CAPS], ids=["atoms", "caps"])
def test_simultaneous_map_check_cube_frustum(lam):
    K, L = cube(), frustum()
    rep = simultaneous_map_check(K, L, support_components(lam), established(K, L, lam), samples=100,
                                 probe_samples=10)
    assert rep.passed, rep.summary()


def test_ratio_partition_examples():
    fam = grid_partition(0.5, seed=0)
    assert set(ratio_partition(cube(), cube(), fam)) == {"omega_zero"}
    assert set(ratio_partition(cube(), cube(2), fam)) == {"omega"}
    labels = ratio_partition(cube(), frustum(), fam)
    for cell, lab in zip(fam.cells, labels):
        if lab == "omega_zero":
            # shared top square: rho agrees
            U = cell.vertices
            assert np.allclose(radial(cube(), U), radial(frustum(), U))
    top = next(i for i, c in enumerate(fam.cells) if c.contains(E3)[0])
    bottom = next(i for i, c in enumerate(fam.cells) if c.contains(-E3)[0])
    assert labels[bottom] == "omega" and labels[top] in ("omega_zero", "mixed")
    assert labels.count("omega_zero") > 0


def test_ratio_partition_invariant_under_common_dilation():
    fam = grid_partition(0.5, seed=0)
    K, L = cube(), frustum()
    base = ratio_partition(K, L, fam)
    for c in (0.3, 7.0):
        assert ratio_partition(dilate(K, c), dilate(L, c), fam) == base


def test_dilation_examples():
    rep = dilation_component_check(cube(), cube(2), support_components(UNIFORM),
                                   established(cube(), cube(2), UNIFORM), samples=200)
    assert rep.passed and rep.margins["ratios"]["sphere"] == pytest.approx(0.5)
    for lam in (ATOMS, CAPS):
        comps = support_components(lam)
        rep = dilation_component_check(cube(), frustum(), comps, established(cube(), frustum(), lam))
        assert rep.passed, rep.summary()
        ratios = list(rep.margins["ratios"].values())
        assert ratios == [pytest.approx(1.0, abs=1e-12), pytest.approx(0.5, abs=1e-12)]


def test_ratio_increment_examples():
    comps = support_components(CAPS)
    rep = ratio_increment_check(cube(), frustum(), comps, established(cube(), frustum(), CAPS))
    assert rep.passed and rep.margins["max_increment_at_smallest"] <= 1e-6
    rep = ratio_increment_check(cube(), cube(2), support_components(UNIFORM),
                                established(cube(), cube(2), UNIFORM), pair_samples=50)
    assert rep.passed and rep.margins["max_increment_at_smallest"] == pytest.approx(0.0, abs=1e-12)


def test_guards_refuse_without_hypothesis():
    K, L = cube(), cross_polytope()
    comps = support_components(UNIFORM)
    failed = established(K, L, UNIFORM)
    for fn in (dilation_component_check, ratio_increment_check, simultaneous_map_check):
        with pytest.raises(HypothesisNotEstablished):
            fn(K, L, comps, failed)
        with pytest.raises(HypothesisNotEstablished):
            fn(K, L, comps, None)


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(0.2, 5.0), st.sampled_from(["uniform", "atoms", "caps"]))
def test_scaling_soundness(seed, c, kind):
    rng = np.random.default_rng(seed)
    K = random_polytope(12, rng)
    L = dilate(K, c)
    if kind == "uniform":
        lam = UNIFORM
    elif kind == "atoms":
        lam = Atoms([(u, 1.0) for u in rng.normal(size=(3, 3))])
    else:
        lam = CapLebesgue([Cap(u, 0.2) for u in rng.normal(size=(2, 3))])
    comps = support_components(lam)
    ae = ae_equal_check(K, L, lam, family(lam), max_union=1)
    assert ae.passed
    rep = dilation_component_check(K, L, comps, ae, samples=200)
    assert rep.passed
    for row in rep.table:
        assert row["ratio"] == pytest.approx(1 / c, rel=1e-12)
        assert row["spread"] <= 1e-12
