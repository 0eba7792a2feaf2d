"""Radial Gauss images of convex polytopes, their measures, and uniqueness checks."""
from .body import (
    Polytope, convex_combination, cross_polytope, cube, dilate, frustum, polar, radial, radii,
    random_polytope, support,
)
from .errors import (
    GeometryError, HypothesisNotEstablished, InputError, InvalidBody, PartitionFailure,
)
from .gauss_image import gauss_image, normal_cone, reverse_gauss_image
from .measure import Atoms, CapLebesgue, UniformLebesgue, grid_partition, symdiff_distance
from .report import CheckReport
from .sphere import Cap, GeodesicArc, SphericalPolygon, SphericalRegion
from .variation import harmonic_mean, lipschitz_scan, sweep_inclusion_check

__version__ = "0.1.0"
