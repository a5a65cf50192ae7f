"""
Downlink and uplink to a vehicular terminal
===========================================

The forward link is capped by the PFD mask, so its C/N does not depend on
the carrier bandwidth. The return link is capped by the terminal EIRP, so
every doubling of bandwidth costs 3 dB.
"""

from dataclasses import replace

from nrsat import regulatory
from nrsat.channel import AttenuationModel
from nrsat.linkbudget import LinkInputs, evaluate, reference_payload, sweep, vehicular_ue

mask = regulatory.find_mask(regulatory.builtin_masks(), regulatory.QV_NGSO)
dl = LinkInputs(reference_payload(), vehicular_ue(), 40.0, 400.0, AttenuationModel.flat(5.0), mask=mask)
ledger = evaluate("dl", dl)
for line in ledger.lines:
    if line.sign:
        print(f"{'+' if line.sign > 0 else '-'} {line.label:<32} {line.value:9.2f} {line.unit}")
print(f"C/N {ledger.cnr:.2f} dB -> {ledger.data_rate:.0f} Mbps")

for row in sweep("dl", dl, "bandwidth", [50, 100, 200, 400]):
    print(f"{row.value:5.0f} MHz  C/N {row.cnr:6.2f} dB  {row.rate:6.1f} Mbps")

###############################################################################
# Uplink with the satellite G/T fixed at 13.5 dB/K and no implementation
# loss (outside the usual handset range, hence the warning).

ue = replace(vehicular_ue(), implementation_loss=0.0)
ul = LinkInputs(reference_payload(13.5), ue, 40.0, 1.0, AttenuationModel.flat(5.0))
for row in sweep("ul", ul, "bandwidth", [1, 10, 100]):
    print(f"{row.value:5.0f} MHz  C/N {row.cnr:6.2f} dB  feasible {row.feasible}")

# raising the terminal to the 43 dBm FCC cap buys 14 dB
for row in sweep("ul", ul, "eirp", [29, 36, 43]):
    print(f"{row.value:3.0f} dBm  C/N {row.cnr:6.2f} dB  {row.rate:.2f} Mbps")
