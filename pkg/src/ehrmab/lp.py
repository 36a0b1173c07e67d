"""Throughput upper bound via the relaxed single-arm average-reward LP.

Relaxing the hard schedule-K-nodes-per-slot constraint to K/N on average
decouples the network into identical single-arm decision problems over the
belief space (idle count l, last observed EH state h), truncated at l <= L_max.
The stationary occupation measure x(s, a) of the single arm solves a small
linear program; N times its optimal value upper-bounds the per-slot
throughput of any feasible scheduling policy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import BeliefTable, Case1BeliefCurve, SystemConfig, Variant
from .simplex import LpSolution, solve_equality_lp


@dataclass
class SingleArmMdp:
    """Truncated single-arm belief MDP.

    states are (l, h) pairs in lexicographic order; kernels[a][i, j] is the
    transition probability from state i to state j under action a; reward[i]
    is the expected bits if the node is scheduled in state i (0 if idle).
    """

    states: list[tuple[int, int]]
    kernels: tuple[np.ndarray, np.ndarray]
    reward: np.ndarray

    def index(self, l: int, h: int) -> int:
        return self.states.index((l, h))


@dataclass
class OccupationLp:
    """max c'x s.t. A x = b, x >= 0 over occupation measures x(s, a).

    Column order: states lexicographic by (l, h), action 0 before action 1
    within each state.  Rows: one balance equation per state, then the
    average-activation constraint sum_s x(s,1) = K/N, then total mass 1.
    """

    mdp: SingleArmMdp
    c: np.ndarray
    A: np.ndarray
    b: np.ndarray


def build_single_arm_mdp(config: SystemConfig, L_max: int) -> SingleArmMdp:
    """Build the truncated belief MDP for one (relaxed) arm.

    Idle keeps h and saturates l at L_max; scheduling succeeds with
    probability p, resetting the belief to (0, observed EH state).
    """
    if L_max < 1:
        raise ValueError("L_max must be >= 1")
    chain = config.chain
    B = config.battery_cap
    p = config.p_operative

    if config.variant is Variant.NO_SIMULTANEOUS_HARVEST:
        h_values = (0,)  # transmission resets the chain; h carries nothing
    else:
        h_values = (0, 1)
    states = [(l, h) for l in range(L_max + 1) for h in h_values]
    idx = {s: i for i, s in enumerate(states)}
    n = len(states)

    table = BeliefTable(chain, B, config.variant)
    if config.variant is Variant.NO_SIMULTANEOUS_HARVEST:
        curve = Case1BeliefCurve(chain, B)

    P0 = np.zeros((n, n))
    P1 = np.zeros((n, n))
    reward = np.zeros(n)
    for (l, h), i in idx.items():
        up = idx[(min(l + 1, L_max), h)]
        P0[i, up] = 1.0
        if config.variant is Variant.NO_SIMULTANEOUS_HARVEST:
            eb = B * curve.z(l)
            P1[i, up] += 1.0 - p
            P1[i, idx[(0, 0)]] += p
        else:
            eb = table.expected_battery(l, h)
            p1 = table.eh_one_prob(l, h)
            P1[i, up] += 1.0 - p
            P1[i, idx[(0, 1)]] += p * p1
            P1[i, idx[(0, 0)]] += p * (1.0 - p1)
        reward[i] = p * eb

    for P in (P0, P1):
        rows = P.sum(axis=1)
        if np.abs(rows - 1.0).max() > 1e-10:
            raise AssertionError("transition kernel row sums drifted from 1")
    return SingleArmMdp(states=states, kernels=(P0, P1), reward=reward)


def build_occupation_lp(mdp: SingleArmMdp, K: int, N: int) -> OccupationLp:
    n = len(mdp.states)
    nv = 2 * n  # x(s,0), x(s,1) interleaved per state
    c = np.zeros(nv)
    c[1::2] = mdp.reward

    A = np.zeros((n + 2, nv))
    b = np.zeros(n + 2)
    P0, P1 = mdp.kernels
    for s in range(n):
        A[s, 2 * s] += 1.0
        A[s, 2 * s + 1] += 1.0
        A[s, 0::2] -= P0[:, s]
        A[s, 1::2] -= P1[:, s]
    A[n, 1::2] = 1.0
    b[n] = K / N
    A[n + 1, :] = 1.0
    b[n + 1] = 1.0
    return OccupationLp(mdp=mdp, c=c, A=A, b=b)


def solve_lp(lp: OccupationLp) -> tuple[float, np.ndarray]:
    """Solve the occupation LP; returns (value, x) and checks feasibility
    residuals (<= 1e-8) before reporting."""
    sol: LpSolution = solve_equality_lp(lp.c, lp.A, lp.b)
    check_solution(lp, sol.x)
    return sol.value, sol.x


def check_solution(lp: OccupationLp, x: np.ndarray, tol: float = 1e-8) -> float:
    if x.min() < -tol:
        raise AssertionError(f"negative occupation mass {x.min()!r}")
    resid = float(np.abs(lp.A @ x - lp.b).max())
    if resid > tol:
        raise AssertionError(f"constraint residual {resid!r} > {tol}")
    return resid


def scheduling_probabilities(lp: OccupationLp, x: np.ndarray) -> np.ndarray:
    """Recover pi(s) = x(s,1)/(x(s,0)+x(s,1)); NaN where the state has no
    stationary mass."""
    x0 = x[0::2]
    x1 = x[1::2]
    tot = x0 + x1
    out = np.full(len(tot), np.nan)
    mask = tot > 1e-12
    out[mask] = x1[mask] / tot[mask]
    return out


def default_l_max(config: SystemConfig) -> int:
    return max(
        10 * math.ceil(config.n_nodes / max(config.n_channels, 1)),
        4 * config.battery_cap,
        40,
    )


def upper_bound(config: SystemConfig, L_max: int | None = None) -> float:
    """Whole-network bits-per-slot upper bound: N times the single-arm value."""
    if config.n_channels == 0:
        return 0.0
    if L_max is None:
        L_max = default_l_max(config)
    mdp = build_single_arm_mdp(config, L_max)
    lp = build_occupation_lp(mdp, config.n_channels, config.n_nodes)
    value, _ = solve_lp(lp)
    return config.n_nodes * value


def upper_bound_with_stability(
    config: SystemConfig, L_max: int | None = None
) -> tuple[float, int, float]:
    """Upper bound plus the relative change when L_max is doubled."""
    if L_max is None:
        L_max = default_l_max(config)
    ub = upper_bound(config, L_max)
    ub2 = upper_bound(config, 2 * L_max)
    denom = max(abs(ub), 1e-300)
    return ub, L_max, abs(ub2 - ub) / denom


def lp_to_text(lp: OccupationLp) -> str:
    """Plain-text export: objective, then one constraint row per line as
    'coef*x[i] ... = rhs'.  Columns follow the documented order (states
    lexicographic by (l, h), action 0 before action 1)."""
    lines = ["# occupation-measure LP, maximise"]
    lines.append(
        "objective: "
        + " + ".join(
            f"{cj:.12g}*x[{j}]" for j, cj in enumerate(lp.c) if cj != 0.0
        )
    )
    lines.append("# columns: " + ", ".join(
        f"x[{2 * i + a}]=(l={l},h={h},a={a})"
        for i, (l, h) in enumerate(lp.mdp.states)
        for a in (0, 1)
    ))
    for r in range(lp.A.shape[0]):
        terms = " + ".join(
            f"{lp.A[r, j]:.12g}*x[{j}]"
            for j in range(lp.A.shape[1])
            if lp.A[r, j] != 0.0
        )
        lines.append(f"row[{r}]: {terms} = {lp.b[r]:.12g}")
    lines.append("bounds: x >= 0")
    return "\n".join(lines) + "\n"
