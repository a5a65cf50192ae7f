"""
Does 2592 satellites give 40 degrees everywhere?
================================================

A 36 x 72 polar Walker shell at 340 km. The phasing factor is free, so we
scan it, then look at how much the grid resolution hides.
"""

import numpy as np

from nrsat import geometry

shell = geometry.ConstellationConfig(2592, 36, inclination=90.0, altitude=340.0, min_elevation=40.0)
times = geometry.default_time_samples(shell, n=6)

scan = geometry.phasing_scan(shell, grid_step=4.0, time_samples=times, phasings=range(0, 36, 5))
for f, rep in sorted(scan.by_phasing.items()):
    print(f"f={f:2d}  worst best elevation {rep.worst_best_elevation:5.2f} deg")
print("best f:", scan.best_phasing, "covered:", scan.best.covered)

###############################################################################
# The worst point moves with the grid. A finer grid can only find lower
# values, since it contains the coarse nodes.

for step in (4.0, 2.0, 1.0):
    rep = geometry.coverage_check(shell, step, times[:2])
    print(f"grid {step:3.1f} deg -> {rep.worst_best_elevation:5.2f} deg at "
          f"({rep.worst_point.latitude:.1f}, {rep.worst_point.longitude:.1f})")

###############################################################################
# Losing satellites never helps.

rng = np.random.default_rng(7)
keep = rng.random(shell.total_satellites) > 0.1
print("10% removed:", round(geometry.coverage_check(shell, 4.0, times, keep=keep).worst_best_elevation, 2))
