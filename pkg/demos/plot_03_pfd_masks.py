"""
PFD masks and the EIRP they allow
=================================

The shared-band limits tighten towards the horizon. Converting them to a
carrier EIRP at the slant range of each elevation shows which elevation
binds the design.
"""

from nrsat import geometry, regulatory

masks = regulatory.builtin_masks()
angles = [0, 5, 10, 15, 20, 25, 40, 90]
print("angle  " + "  ".join(f"{m.band_label:>18}" for m in masks))
for a in angles:
    print(f"{a:5d}  " + "  ".join(f"{m(a):18.2f}" for m in masks))

###############################################################################
# EIRP allowed for a 400 MHz carrier from 340 km, in the 39 GHz NGSO band.

qv = regulatory.find_mask(masks, regulatory.QV_NGSO)
for e in (10, 25, 40, 60, 90):
    d = geometry.slant_range(340.0, e)
    eirp = regulatory.max_eirp_from_pfd(regulatory.pfd_limit(qv, e), d, 400.0)
    print(f"elevation {e:2d}: {d:6.1f} km, max EIRP {eirp:6.2f} dBW")
