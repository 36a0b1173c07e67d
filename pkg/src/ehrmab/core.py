"""Core model: EH chain parameters, belief states, and reward/probability formulas.

Every node's energy arrival is a two-state Markov chain (state 1 harvests one
energy unit, state 0 harvests none).  The access point never observes the true
chain or battery states; it tracks per-node beliefs.  This module holds the
shared machinery: chain parameters, the joint (EH state, battery) distribution
implied by a belief, the one-idle-slot belief maps, and the expected-reward
formulas used by every policy and verification routine.
"""

from __future__ import annotations

import enum
import math
import threading
from dataclasses import dataclass, field
from typing import Union

import numpy as np

PROB_ATOL = 1e-12


class Variant(enum.Enum):
    """Which special case of the node model is in force."""

    GENERAL = "general"
    # Nodes cannot harvest while transmitting; after an active slot the EH
    # chain restarts in state 0 with probability e0, and the battery is empty.
    NO_SIMULTANEOUS_HARVEST = "no-simultaneous-harvest"
    # No battery: energy available in a slot is exactly the previous slot's
    # harvest, and unused energy is lost.
    BATTERYLESS = "batteryless"


@dataclass(frozen=True)
class EhChainParams:
    """Two-state EH Markov chain plus the post-transmission reset law.

    p01 is the 0->1 transition probability, p11 the 1->1 probability.  e0 is
    the probability that the chain restarts in the non-harvesting state after
    a node transmits (used only by the no-simultaneous-harvest variant).

    Positive time correlation (p11 >= p01) and the reset admissibility bound
    e0 <= p10/(p01+p10) are exposed as predicates rather than enforced in the
    constructor: simulation accepts arbitrary chains, while the optimality
    checkers reject inadmissible ones (and the verify CLI deliberately feeds
    inverted chains as a negative control).
    """

    p01: float
    p11: float
    e0: float = 0.5

    def __post_init__(self) -> None:
        for name in ("p01", "p11", "e0"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v!r} is not a probability")

    @property
    def p00(self) -> float:
        return 1.0 - self.p01

    @property
    def p10(self) -> float:
        return 1.0 - self.p11

    @property
    def e1(self) -> float:
        return 1.0 - self.e0

    def positively_correlated(self) -> bool:
        return self.p11 >= self.p01

    def reset_admissible(self) -> bool:
        """e0 does not exceed the stationary non-harvesting probability."""
        denom = self.p01 + self.p10
        if denom == 0.0:
            # p01 = 0, p11 = 1: both states absorbing, any e0 admitted.
            return True
        return self.e0 <= self.p10 / denom + PROB_ATOL

    def step_prob(self, e: int) -> float:
        """P(next EH state = 1 | current state e)."""
        if e not in (0, 1):
            raise ValueError(f"EH state must be 0 or 1, got {e!r}")
        return self.p11 if e == 1 else self.p01

    def stationary_harvest_prob(self) -> float:
        """Stationary probability of the harvesting state."""
        denom = self.p01 + self.p10
        if denom == 0.0:
            return 1.0  # degenerate absorbing pair; state 1 persists
        return self.p01 / denom


def markov_step_prob(e: int, chain: EhChainParams) -> float:
    """P(next EH state = 1 | current = e)."""
    return chain.step_prob(e)


def tau_case2(s: float, chain: EhChainParams) -> float:
    """One-idle-slot belief map for the batteryless case: affine in s."""
    return (chain.p11 - chain.p01) * s + chain.p01


def q_prob(a: int, K: int, p: float) -> float:
    """Probability that one particular subset of a scheduled nodes is
    operative while the other K-a are not: (1-p)^(K-a) * p^a."""
    if not 0 <= a <= K:
        raise ValueError(f"active count {a} outside [0, {K}]")
    return (1.0 - p) ** (K - a) * p**a


@dataclass(frozen=True)
class SystemConfig:
    """Network-level parameters."""

    n_nodes: int
    n_channels: int
    battery_cap: int
    p_operative: float
    chain: EhChainParams
    beta: float = 1.0
    horizon: int = 1000
    variant: Variant = Variant.GENERAL

    def __post_init__(self) -> None:
        if self.n_nodes < 1:
            raise ValueError("n_nodes must be positive")
        if not 0 <= self.n_channels <= self.n_nodes:
            raise ValueError("need 0 <= n_channels <= n_nodes")
        if self.battery_cap < 0:
            raise ValueError("battery_cap must be non-negative")
        if not 0.0 <= self.p_operative <= 1.0:
            raise ValueError("p_operative must be a probability")
        if not 0.0 < self.beta <= 1.0:
            raise ValueError("beta must be in (0, 1]")
        if self.horizon < 1:
            raise ValueError("horizon must be positive")
        if self.variant is Variant.BATTERYLESS and self.battery_cap != 1:
            raise ValueError("batteryless variant requires battery_cap == 1")


@dataclass(frozen=True)
class TrueNodeState:
    """Hidden per-node state: EH chain state and battery fill."""

    eh_state: int
    battery: int


@dataclass(frozen=True)
class GeneralBelief:
    """(idle slots since last active, EH state observed then)."""

    l: int
    h: int


@dataclass(frozen=True)
class Case1Belief:
    """Normalised expected battery z, cached with the idle count that
    generated it (z is a function of l alone in this variant)."""

    l: int
    z: float


@dataclass(frozen=True)
class Case2Belief:
    """Probability that the node is currently in the harvesting state."""

    s: float


BeliefState = Union[GeneralBelief, Case1Belief, Case2Belief]


class JointEBDist:
    """Probability table over (EH state, battery level) given a belief."""

    __slots__ = ("prob",)

    def __init__(self, prob: np.ndarray):
        prob = np.asarray(prob, dtype=float)
        if prob.shape[0] != 2 or prob.ndim != 2:
            raise ValueError("expected shape (2, B+1)")
        if prob.min() < -PROB_ATOL:
            raise ValueError("negative probability mass")
        if abs(prob.sum() - 1.0) > PROB_ATOL:
            raise ValueError(f"mass {prob.sum()!r} != 1")
        self.prob = prob

    @classmethod
    def point_mass(cls, e: int, b: int, B: int) -> "JointEBDist":
        prob = np.zeros((2, B + 1))
        prob[e, b] = 1.0
        return cls(prob)

    @property
    def battery_cap(self) -> int:
        return self.prob.shape[1] - 1

    def mean_battery(self) -> float:
        return float(self.prob.sum(axis=0) @ np.arange(self.prob.shape[1]))

    def eh_one_prob(self) -> float:
        return float(self.prob[1].sum())

    def not_full_prob_by_eh(self) -> tuple[float, float]:
        """(P(e=0, battery < B), P(e=1, battery < B))."""
        return float(self.prob[0, :-1].sum()), float(self.prob[1, :-1].sum())


def evolve_eb_dist(
    d: JointEBDist,
    chain: EhChainParams,
    B: int,
    *,
    batteryless: bool = False,
) -> JointEBDist:
    """Push the joint (EH, battery) distribution through one idle slot.

    The next EH state e' is drawn by the chain from e; the battery becomes
    min(b + e', B), or just e' for batteryless nodes (unused energy is lost).
    """
    prob = d.prob
    nxt = np.zeros_like(prob)
    step = np.array([[chain.p00, chain.p01], [chain.p10, chain.p11]])
    for e in (0, 1):
        for e_next in (0, 1):
            mass = prob[e] * step[e, e_next]
            if batteryless:
                nxt[e_next, e_next] += mass.sum()
            else:
                if e_next == 0:
                    nxt[0] += mass
                else:
                    shifted = np.zeros_like(mass)
                    shifted[1:] = mass[:-1]
                    shifted[B] += mass[B]  # overflow clipped at capacity
                    nxt[1] += shifted
    return JointEBDist(nxt)


class BeliefTable:
    """Lazily tabulated belief-to-distribution map for one (chain, B, variant).

    Distributions for (l, h) are built by evolving the l = 0 base case one
    idle slot at a time and cached; reads are lock-free, inserts serialized.
    """

    def __init__(self, chain: EhChainParams, B: int, variant: Variant = Variant.GENERAL):
        self.chain = chain
        self.B = B
        self.variant = variant
        self._lock = threading.Lock()
        # per h: list of JointEBDist indexed by l
        self._dists: dict[int, list[JointEBDist]] = {}

    def _base(self, h: int) -> JointEBDist:
        B = self.B
        prob = np.zeros((2, B + 1))
        if self.variant is Variant.NO_SIMULTANEOUS_HARVEST:
            # Post-transmission: battery drained, EH chain restarted.
            prob[0, 0] = self.chain.e0
            prob[1, 0] = self.chain.e1
        else:
            # Battery right after an active slot equals the energy harvested
            # during that slot, which is the next EH state seeded from h.
            p1 = self.chain.step_prob(h)
            prob[0, 0] = 1.0 - p1
            prob[1, min(1, B)] = p1
        return JointEBDist(prob)

    def dist(self, l: int, h: int) -> JointEBDist:
        if l < 0:
            raise ValueError("idle count must be non-negative")
        if self.variant is Variant.NO_SIMULTANEOUS_HARVEST:
            h = 0  # EH resets on transmission; last observation is irrelevant
        seq = self._dists.get(h)
        if seq is None or len(seq) <= l:
            with self._lock:
                seq = self._dists.setdefault(h, [self._base(h)])
                while len(seq) <= l:
                    seq.append(
                        evolve_eb_dist(
                            seq[-1],
                            self.chain,
                            self.B,
                            batteryless=self.variant is Variant.BATTERYLESS,
                        )
                    )
        return seq[l]

    def expected_battery(self, l: int, h: int) -> float:
        return self.dist(l, h).mean_battery()

    def eh_one_prob(self, l: int, h: int) -> float:
        return self.dist(l, h).eh_one_prob()


def belief_to_dist(
    belief: GeneralBelief, chain: EhChainParams, B: int
) -> JointEBDist:
    """Joint (EH state, battery) distribution implied by a general belief."""
    return BeliefTable(chain, B, Variant.GENERAL).dist(belief.l, belief.h)


class Case1BeliefCurve:
    """The normalised expected-battery sequence z_l for the
    no-simultaneous-harvest case.

    z_l is computed by the closed recursion on the expected battery,

        z_{l+1} = z_l + (1/B) * (p01 * P(e=0, b<B) + p11 * P(e=1, b<B)),

    with the not-full probabilities tracked exactly through the joint
    (EH, battery) distribution, and cross-checked on every extension against
    E[b]/B read directly off the same pushed-forward distribution.  Starting
    point: battery 0 and the EH chain restarted (state 1 w.p. e1).
    """

    def __init__(self, chain: EhChainParams, B: int):
        if B < 1:
            raise ValueError("battery capacity must be >= 1 for case 1")
        self.chain = chain
        self.B = B
        self._lock = threading.Lock()
        self._table = BeliefTable(chain, B, Variant.NO_SIMULTANEOUS_HARVEST)
        self._z: list[float] = [0.0]

    def z(self, l: int) -> float:
        if l < 0:
            raise ValueError("idle count must be non-negative")
        if len(self._z) <= l:
            with self._lock:
                while len(self._z) <= l:
                    m = len(self._z) - 1
                    d = self._table.dist(m, 0)
                    nf0, nf1 = d.not_full_prob_by_eh()
                    z_next = self._z[-1] + (
                        self.chain.p01 * nf0 + self.chain.p11 * nf1
                    ) / self.B
                    direct = self._table.dist(m + 1, 0).mean_battery() / self.B
                    if abs(z_next - direct) > 1e-12:
                        raise AssertionError(
                            f"belief recursion drifted from the distribution "
                            f"route at l={m + 1}: {z_next!r} vs {direct!r}"
                        )
                    self._z.append(z_next)
        return self._z[l]

    def z_array(self, l_max: int) -> np.ndarray:
        self.z(l_max)
        return np.array(self._z[: l_max + 1])


def case1_belief_z(l: int, chain: EhChainParams, B: int) -> float:
    """Normalised expected battery after l idle slots following an active one."""
    return Case1BeliefCurve(chain, B).z(l)


def case1_p0_sequence(chain: EhChainParams, l_max: int) -> np.ndarray:
    """P(EH state = 0) after l idle slots post-transmission, l = 0..l_max.

    p0(0) = e0 and p0(l) = p10 + p0(l-1) * (p11 - p01); under the reset
    admissibility condition this climbs monotonically to p10/(p01+p10).
    """
    out = np.empty(l_max + 1)
    out[0] = chain.e0
    for l in range(1, l_max + 1):
        out[l] = chain.p10 + out[l - 1] * (chain.p11 - chain.p01)
    return out


def expected_reward(
    beliefs: list[BeliefState],
    p: float,
    B: int,
    chain: EhChainParams | None = None,
    table: BeliefTable | None = None,
) -> float:
    """Expected bits from scheduling the given set of beliefs for one slot.

    General: p * sum E[battery]; case 1: p * B * sum z; case 2: p * sum s.
    """
    if not beliefs:
        return 0.0
    kinds = {type(b) for b in beliefs}
    if len(kinds) > 1:
        raise ValueError(f"mixed belief variants: {kinds}")
    first = beliefs[0]
    if isinstance(first, Case1Belief):
        return p * B * sum(b.z for b in beliefs)
    if isinstance(first, Case2Belief):
        return p * sum(b.s for b in beliefs)
    if table is None:
        if chain is None:
            raise ValueError("general beliefs need a chain or a BeliefTable")
        table = BeliefTable(chain, B, Variant.GENERAL)
    return p * sum(table.expected_battery(b.l, b.h) for b in beliefs)
