"""Polar bodies, radial projections and Gauss images on the cube.

Run with ``python3 demos/duality_tour.py``.
"""
import math

import numpy as np

from gaussimage import cube, gauss_image, polar, radial, reverse_gauss_image, support
from gaussimage.measure import UniformLebesgue
from gaussimage.sphere import SphericalPolygon, random_directions

C = cube()
X = polar(C)
print("polar of the cube has vertices")
print(np.round(X.vertices, 12) + 0.0)

# support of the polar times radial of the body is identically 1
U = random_directions(5, np.random.default_rng(0))
print("h_{C*}(u) * rho_C(u):", support(X, U) * radial(C, U))

# a direction inside the top face sees one normal; a corner direction sees a whole cone
u_face = np.array([0.2, 0.1, 1.0])
u_corner = np.ones(3) / math.sqrt(3)
print("image of a face direction:", gauss_image(C, u_face).region.points)
corner = gauss_image(C, u_corner).region
print("image of the corner direction has area", corner.area, "(an octant is", math.pi / 2, ")")

# the top face projects to a square carrying the whole upper hemisphere in measure
top = SphericalPolygon([[1, 1, 1], [-1, 1, 1], [-1, -1, 1], [1, -1, 1]])
print("lambda(C, top square) for area measure:", UniformLebesgue().mass(gauss_image(C, top).region))

# the reverse image is the image under the polar body
R1 = reverse_gauss_image(C, u_face).region
R2 = gauss_image(X, u_face).region
print("reverse image equals image of the polar:", R1.area == R2.area and len(R1.polygons) == len(R2.polygons))
