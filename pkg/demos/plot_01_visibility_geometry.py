"""
Visibility geometry of a 340 km shell
=====================================

How far away is a satellite seen at the service elevation, how far must the
array steer, and how wide is the circle of ground it can serve.
"""

import numpy as np

from nrsat import geometry

h = 340.0
for elevation in (90, 60, 40, 20, 0):
    d = geometry.slant_range(h, elevation)
    scan = geometry.nadir_scan_angle(h, elevation)
    print(f"elevation {elevation:2d} deg  range {d:7.1f} km  off-nadir {scan:5.2f} deg")

# the array never needs to point beyond the Earth's limb
print("limb half-angle", round(geometry.earth_view_half_angle(h), 2), "deg")

###############################################################################
# A user at the edge of the 40 degree coverage circle, seen from the
# sub-satellite point.

psi = geometry.coverage_central_angle(h, 40.0)
sat = geometry.walker_delta(geometry.ConstellationConfig(1, 1, inclination=0.0, altitude=h))[0]
edge = geometry.destination_point(geometry.subsatellite_point(sat), psi, azimuth=30.0)
print(f"coverage radius {psi:.2f} deg ({np.radians(psi) * 6371:.0f} km), "
      f"edge elevation {geometry.elevation_to(edge, sat):.2f} deg")
