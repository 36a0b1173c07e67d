"""Core model tests: chain parameters, joint distributions, belief maps.

Derived quantities (belief-to-distribution tables, the case-1 z sequence)
are checked against brute-force Monte Carlo rollouts of the true chain.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ehrmab.core import (
    BeliefTable,
    Case1BeliefCurve,
    EhChainParams,
    GeneralBelief,
    JointEBDist,
    SystemConfig,
    Variant,
    belief_to_dist,
    case1_belief_z,
    case1_p0_sequence,
    evolve_eb_dist,
    expected_reward,
    q_prob,
    tau_case2,
)
from ehrmab.core import Case1Belief, Case2Belief

CHAIN = EhChainParams(p01=0.1, p11=0.9, e0=0.5)

probs = st.floats(0.0, 1.0, allow_nan=False)


def test_chain_param_validation():
    with pytest.raises(ValueError):
        EhChainParams(p01=-0.1, p11=0.5)
    with pytest.raises(ValueError):
        EhChainParams(p01=0.1, p11=1.5)
    c = EhChainParams(p01=0.25, p11=0.75, e0=0.3)
    assert c.p00 == 0.75 and c.p10 == 0.25 and c.e1 == 0.7


def test_chain_predicates():
    assert CHAIN.positively_correlated()
    inverted = EhChainParams(p01=0.9, p11=0.1)  # allowed, but flagged
    assert not inverted.positively_correlated()
    # stationary of CHAIN: p01/(p01+p10) = 0.1/0.2 = 0.5
    assert CHAIN.stationary_harvest_prob() == pytest.approx(0.5, abs=1e-15)
    assert CHAIN.reset_admissible()  # e0 = 0.5 == p10/(p01+p10)
    assert not EhChainParams(p01=0.1, p11=0.9, e0=0.6).reset_admissible()


def test_step_prob_and_tau():
    assert CHAIN.step_prob(0) == 0.1
    assert CHAIN.step_prob(1) == 0.9
    with pytest.raises(ValueError):
        CHAIN.step_prob(2)
    # affine map: s=0 -> p01, s=1 -> p11, fixed point at stationary
    assert tau_case2(0.0, CHAIN) == 0.1
    assert tau_case2(1.0, CHAIN) == 0.9
    s_star = CHAIN.stationary_harvest_prob()
    assert tau_case2(s_star, CHAIN) == pytest.approx(s_star, abs=1e-15)


def test_q_prob():
    assert q_prob(0, 3, 0.5) == pytest.approx(0.125)
    assert q_prob(2, 2, 0.3) == pytest.approx(0.09)
    assert q_prob(0, 2, 0.0) == 1.0
    with pytest.raises(ValueError):
        q_prob(3, 2, 0.5)
    # the a-subset probabilities over all subsets sum to 1
    from math import comb

    total = sum(comb(4, a) * q_prob(a, 4, 0.37) for a in range(5))
    assert total == pytest.approx(1.0, abs=1e-12)


def test_system_config_validation():
    with pytest.raises(ValueError):
        SystemConfig(n_nodes=2, n_channels=3, battery_cap=1,
                     p_operative=0.5, chain=CHAIN)
    with pytest.raises(ValueError):
        SystemConfig(n_nodes=2, n_channels=1, battery_cap=2,
                     p_operative=0.5, chain=CHAIN,
                     variant=Variant.BATTERYLESS)


def test_joint_dist_guards():
    with pytest.raises(ValueError):
        JointEBDist(np.full((2, 3), 0.2))  # mass != 1
    d = JointEBDist.point_mass(1, 2, 3)
    assert d.mean_battery() == 2.0
    assert d.eh_one_prob() == 1.0
    assert d.not_full_prob_by_eh() == (0.0, 1.0)


def test_evolve_point_mass_one_step():
    # from (e=1, b=0): next state 1 w.p. p11 -> battery 1; else battery 0
    d = evolve_eb_dist(JointEBDist.point_mass(1, 0, 2), CHAIN, 2)
    assert d.prob[1, 1] == pytest.approx(0.9)
    assert d.prob[0, 0] == pytest.approx(0.1)
    # overflow clipping at capacity
    full = evolve_eb_dist(JointEBDist.point_mass(1, 2, 2), CHAIN, 2)
    assert full.prob[1, 2] == pytest.approx(0.9)
    assert full.prob[0, 2] == pytest.approx(0.1)


@given(
    p01=probs, p11=probs,
    e=st.integers(0, 1), b=st.integers(0, 4),
    steps=st.integers(1, 6),
)
@settings(max_examples=60, deadline=None)
def test_evolve_preserves_mass(p01, p11, e, b, steps):
    chain = EhChainParams(p01=p01, p11=p11)
    d = JointEBDist.point_mass(e, b, 4)
    for _ in range(steps):
        d = evolve_eb_dist(d, chain, 4)
    assert abs(d.prob.sum() - 1.0) <= 1e-12
    assert d.prob.min() >= -1e-15


def _mc_joint(chain, B, l, h, n_samples, seed):
    """Brute-force rollout of the true chain from a just-active slot."""
    rng = np.random.default_rng(seed)
    # battery right after the active slot = harvest during it = next EH state
    e = (rng.random(n_samples) < chain.step_prob(h)).astype(int)
    b = e.copy()
    for _ in range(l):
        step = np.where(e == 1, chain.p11, chain.p01)
        e = (rng.random(n_samples) < step).astype(int)
        b = np.minimum(b + e, B)
    counts = np.zeros((2, B + 1))
    for ei in (0, 1):
        counts[ei] = np.bincount(b[e == ei], minlength=B + 1)
    return counts / n_samples


def test_belief_to_dist_against_monte_carlo():
    chain = EhChainParams(p01=0.1, p11=0.9)
    B, l, h, n = 2, 3, 1, 400_000
    exact = belief_to_dist(GeneralBelief(l=l, h=h), chain, B).prob
    mc = _mc_joint(chain, B, l, h, n, seed=1234)
    se = np.sqrt(np.maximum(exact * (1 - exact), 1e-12) / n)
    assert np.all(np.abs(exact - mc) < 5 * se + 1e-4)


def test_case1_z_against_monte_carlo():
    chain = EhChainParams(p01=0.2, p11=0.8, e0=0.4)
    B, l, n = 5, 20, 1_000_000
    rng = np.random.default_rng(99)
    e = (rng.random(n) < chain.e1).astype(int)  # chain restarted, battery 0
    b = np.zeros(n, dtype=int)
    for _ in range(l):
        step = np.where(e == 1, chain.p11, chain.p01)
        e = (rng.random(n) < step).astype(int)
        b = np.minimum(b + e, B)
    mc = b.mean() / B
    exact = case1_belief_z(l, chain, B)
    se = b.std() / B / np.sqrt(n)
    assert abs(exact - mc) < 4 * se


def test_case1_curve_recursion_matches_distribution():
    # the internal cross-check raises if the closed recursion ever drifts
    # from E[b]/B by more than 1e-12; extending far exercises it
    curve = Case1BeliefCurve(CHAIN, 5)
    z = curve.z_array(300)
    assert z[0] == 0.0
    assert np.all(np.diff(z) >= -1e-15)
    assert z[-1] <= 1.0 + 1e-12


def test_case1_p0_sequence_limits():
    chain = EhChainParams(p01=0.2, p11=0.8, e0=0.1)
    p0 = case1_p0_sequence(chain, 100)
    assert p0[0] == 0.1
    assert np.all(np.diff(p0) >= -1e-15)  # monotone under admissible reset
    assert p0[-1] == pytest.approx(chain.p10 / (chain.p01 + chain.p10),
                                   abs=1e-9)


@given(p01=st.floats(0.01, 0.5), gap=st.floats(0.0, 0.49),
       e0_frac=st.floats(0.0, 1.0), B=st.integers(1, 4))
@settings(max_examples=40, deadline=None)
def test_case1_z_monotone_in_l(p01, gap, e0_frac, B):
    p11 = p01 + gap
    p10 = 1.0 - p11
    chain = EhChainParams(p01=p01, p11=p11,
                          e0=e0_frac * p10 / (p01 + p10))
    z = Case1BeliefCurve(chain, B).z_array(30)
    assert np.all(np.diff(z) >= -1e-14)


def test_belief_table_general_base_case():
    table = BeliefTable(CHAIN, 3, Variant.GENERAL)
    # l=0 after observing h=1: battery = next EH state
    assert table.expected_battery(0, 1) == pytest.approx(0.9)
    assert table.eh_one_prob(0, 1) == pytest.approx(0.9)
    assert table.expected_battery(0, 0) == pytest.approx(0.1)


def test_belief_table_batteryless_battery_equals_eh():
    table = BeliefTable(CHAIN, 1, Variant.BATTERYLESS)
    for l in range(5):
        for h in (0, 1):
            d = table.dist(l, h)
            assert d.prob[0, 1] == 0.0 and d.prob[1, 0] == 0.0
            assert table.expected_battery(l, h) == pytest.approx(
                table.eh_one_prob(l, h), abs=1e-15
            )


def test_expected_reward_variants():
    assert expected_reward([], 0.5, 3) == 0.0
    c1 = [Case1Belief(l=2, z=0.4), Case1Belief(l=5, z=0.8)]
    assert expected_reward(c1, 0.5, 3) == pytest.approx(0.5 * 3 * 1.2)
    c2 = [Case2Belief(s=0.25), Case2Belief(s=0.5)]
    assert expected_reward(c2, 0.4, 1) == pytest.approx(0.3)
    g = [GeneralBelief(l=0, h=1)]
    assert expected_reward(g, 1.0, 3, chain=CHAIN) == pytest.approx(0.9)
    with pytest.raises(ValueError):
        expected_reward([c1[0], c2[0]], 0.5, 3)
    with pytest.raises(ValueError):
        expected_reward(g, 0.5, 3)  # general beliefs need a chain/table
