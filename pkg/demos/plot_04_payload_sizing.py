"""
Sizing the transmit and receive arrays
======================================

A 20 cm transmit aperture at 40 GHz and a 40 cm receive aperture at 28 GHz,
both hexagonal with a triangular lattice.
"""

from nrsat import antenna, channel, geometry
from nrsat.linkbudget import reference_payload

p = reference_payload()
scan = geometry.nadir_scan_angle(340.0, 40.0)
edge = geometry.earth_view_half_angle(340.0)

for name, arr in (("tx", p.tx_array), ("rx", p.rx_array)):
    bw = antenna.beamwidth_3db(arr)
    print(f"{name}: gain {antenna.aperture_gain(arr):5.2f} dBi, beamwidth {bw:4.2f} deg, "
          f"{antenna.scanned_beamwidth(bw, edge):4.2f} deg scanned to the limb")

# element spacing that keeps grating lobes out at the largest scan
s = antenna.max_grating_free_spacing(scan)
print(f"grating-free spacing {s:.3f} wavelengths = {antenna.spacing_to_length(s, 40.0):.3f} cm at 40 GHz")
print("elements in a 20 cm hexagon at that spacing:",
      antenna.hex_array_element_count(0.20, s * antenna.wavelength(40.0)))

###############################################################################
# Transmit power budget and receive figure of merit.

print(f"total EIRP {p.tx_eirp:.2f} dBW, per beam {p.eirp_per_beam:.2f} dBW")
print(f"system temperature {channel.system_noise_temperature(p.rx_noise):.1f} K, G/T {p.computed_g_over_t:.2f} dB/K")
