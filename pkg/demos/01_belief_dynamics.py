"""How the access point's belief about a silent node evolves.

A node that has been idle for l slots is described by the joint
distribution of its hidden EH state and battery fill.  This script prints
that distribution for a few idle counts, then shows the normalised
expected-battery sequence z_l for the no-simultaneous-harvest model and its
saturation as the battery cap starts to bind.
"""

import numpy as np

from ehrmab import BeliefTable, Case1BeliefCurve, EhChainParams, Variant
from ehrmab.core import case1_p0_sequence

chain = EhChainParams(p01=0.1, p11=0.9, e0=0.2)
B = 3

print("chain: p01=0.1, p11=0.9  (bursty: long harvesting runs)")
print(f"stationary harvest probability: {chain.stationary_harvest_prob():.3f}")
print()

table = BeliefTable(chain, B, Variant.GENERAL)
print(f"joint P(EH state, battery) after l idle slots, last seen harvesting (B={B}):")
for l in (0, 1, 3, 10):
    d = table.dist(l, 1)
    print(f"  l={l:2d}  E[battery]={d.mean_battery():5.3f}  "
          f"P(harvesting)={d.eh_one_prob():.3f}")
    for e in (0, 1):
        cells = "  ".join(f"{p:6.4f}" for p in d.prob[e])
        print(f"        e={e}: {cells}")
print()

curve = Case1BeliefCurve(chain, B)
z = curve.z_array(25)
print("normalised expected battery z_l (no-simultaneous-harvest model):")
print("  " + "  ".join(f"{v:.3f}" for v in z[:13]))
print("increments shrink as the battery fills (contraction):")
print("  " + "  ".join(f"{v:.4f}" for v in np.diff(z)[:12]))
print()

p0 = case1_p0_sequence(chain, 25)
limit = chain.p10 / (chain.p01 + chain.p10)
print(f"P(EH=0) after the post-transmission restart climbs to "
      f"{limit:.3f}: {p0[0]:.3f} -> {p0[5]:.3f} -> {p0[25]:.3f}")
