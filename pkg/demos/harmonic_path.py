"""How the Gauss image moves along the harmonic path from the cube to 2 x cross-polytope.

Run with ``python3 demos/harmonic_path.py``. Prints the image of one
direction at a few parameters, then a short Lipschitz scan.
"""
import numpy as np

from gaussimage import cross_polytope, cube, harmonic_mean
from gaussimage.gauss_image import gauss_image
from gaussimage.sphere import SphericalPolygon
from gaussimage.variation import lipschitz_constant, lipschitz_scan, union_identity_check

C, X2 = cube(), cross_polytope(2)
u = np.ones(3) / np.sqrt(3)

for t in (0.0, 0.25, 0.5, 0.75, 1.0):
    H = harmonic_mean(C, X2, t)
    R = gauss_image(H, u).region
    print(f"t={t:4.2f}: {len(H.vertices):2d} vertices, image area {R.area:.4f}")

print("union over t matches the geodesic hull of the endpoint images:",
      union_identity_check(C, X2, u, t_samples=50).passed)

top = SphericalPolygon([[1, 1, 1], [-1, 1, 1], [-1, -1, 1], [1, -1, 1]])
rep = lipschitz_scan(C, X2, top, t_count=20)
print(f"largest Hausdorff speed {rep.margins['max_ratio']:.3f}, bound {lipschitz_constant(C, X2):.3f}")
