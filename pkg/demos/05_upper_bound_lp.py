"""Inside the relaxation bound: the single-arm LP and its solution.

Relaxing "exactly K nodes per slot" to "K/N per arm on average" decouples
the network into one belief-state MDP per node.  The stationary occupation
measure of that MDP solves a small equality-form LP; N times its value
bounds every scheduling policy.  This script builds the LP for a small
instance, solves it, and shows the threshold structure of the optimal
scheduling probabilities.
"""

import numpy as np

from ehrmab import (
    EhChainParams,
    SystemConfig,
    build_occupation_lp,
    build_single_arm_mdp,
    scheduling_probabilities,
    solve_lp,
    upper_bound_with_stability,
)

config = SystemConfig(n_nodes=8, n_channels=2, battery_cap=3, p_operative=0.5,
                      chain=EhChainParams(p01=0.1, p11=0.9), horizon=1000)

mdp = build_single_arm_mdp(config, L_max=20)
lp = build_occupation_lp(mdp, config.n_channels, config.n_nodes)
print(f"belief states: {len(mdp.states)}  LP size: "
      f"{lp.A.shape[0]} rows x {lp.A.shape[1]} columns")

value, x = solve_lp(lp)
print(f"single-arm value {value:.6f}; network bound "
      f"{config.n_nodes * value:.6f} bits/slot")
print(f"activation mass sum x(s,1) = {x[1::2].sum():.6f} "
      f"(target K/N = {config.n_channels / config.n_nodes})")

pi = scheduling_probabilities(lp, x)
print("\nscheduling probability by state (NaN: state never visited):")
for (l, h), prob in zip(mdp.states, pi):
    if not np.isnan(prob) and l <= 8:
        print(f"  l={l:2d} h={h}  pi={prob:5.3f}")
print("the arm is left alone while its battery refills, then scheduled")

ub, lmax, delta = upper_bound_with_stability(config)
print(f"\nat the default truncation L_max={lmax}: bound {ub:.6f}, "
      f"change on doubling L_max {delta:.1e}")
