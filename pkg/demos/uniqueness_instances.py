"""Equal Gauss image measures without equal bodies: cube vs frustum.

The cube and the frustum conv{(+-1, +-1, 1), (+-2, +-2, -2)} share the top
face, and their bottom faces project to the same square. A measure living
near the poles cannot tell them apart, and the bodies agree up to a
different dilation on each pole. Run with ``python3 demos/uniqueness_instances.py``.
"""
import numpy as np

from gaussimage import cross_polytope, cube, frustum
from gaussimage.measure import Atoms, CapLebesgue, UniformLebesgue, grid_partition
from gaussimage.sphere import Cap
from gaussimage.uniqueness import (
    ae_equal_check, dilation_component_check, ratio_partition, support_components,
)

E3 = np.array([0.0, 0.0, 1.0])
C, F = cube(), frustum()

for lam in (Atoms([(E3, 1.0), (-E3, 1.0)]), CapLebesgue([Cap(E3, 0.1), Cap(-E3, 0.1)])):
    fam = grid_partition(0.5, seed=0, measures=[lam])
    ae = ae_equal_check(C, F, lam, fam)
    rep = dilation_component_check(C, F, support_components(lam), ae)
    print(type(lam).__name__, ae.summary(), rep.margins["ratios"])

lam = UniformLebesgue()
ae = ae_equal_check(C, cross_polytope(), lam, grid_partition(0.5, seed=0, measures=[lam]))
print("cube vs cross-polytope:", ae.summary())

labels = ratio_partition(C, F, grid_partition(0.5, seed=0))
print({lab: labels.count(lab) for lab in sorted(set(labels))})
