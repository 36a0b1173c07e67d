"""Scheduling policies and the AP-side belief trackers.

The access point never sees true node states; each tracker maintains the
per-node sufficient statistic for its model variant and exposes the per-node
expected bits used by the myopic policy.  Policies own any internal state
(round-robin cursor, RNG stream) for exactly one episode.
"""

from __future__ import annotations

import numpy as np

from .core import (
    BeliefTable,
    Case1BeliefCurve,
    EhChainParams,
    SystemConfig,
    Variant,
)

POLICY_KINDS = ("myopic", "round-robin", "random")


# ---------------------------------------------------------------------------
# belief trackers


class BeliefTracker:
    """Per-node beliefs for one episode; subclasses fix the variant."""

    variant: Variant

    def __init__(self, config: SystemConfig):
        self.config = config
        self.n = config.n_nodes
        self.idle = np.zeros(self.n, dtype=np.int64)

    def values(self) -> np.ndarray:
        """Expected bits from each node if it were scheduled this slot."""
        raise NotImplementedError

    def update(self, active: np.ndarray, observed_eh: np.ndarray) -> None:
        """Advance beliefs after a slot.

        active: boolean mask of nodes that transmitted; observed_eh: their
        revealed EH states (entries for inactive nodes are ignored).
        """
        raise NotImplementedError


class GeneralTracker(BeliefTracker):
    variant = Variant.GENERAL

    def __init__(self, config: SystemConfig, table: BeliefTable | None = None):
        super().__init__(config)
        self.h = np.zeros(self.n, dtype=np.int64)  # pseudo-belief before any
        self.table = table or BeliefTable(          # observation exists
            config.chain, config.battery_cap, Variant.GENERAL
        )
        self._eb = {0: np.empty(0), 1: np.empty(0)}

    def _expected_battery(self) -> np.ndarray:
        lmax = int(self.idle.max())
        for h in (0, 1):
            if len(self._eb[h]) <= lmax:
                self._eb[h] = np.array(
                    [self.table.expected_battery(l, h) for l in range(lmax + 1)]
                )
        return np.where(self.h == 1, self._eb[1][self.idle], self._eb[0][self.idle])

    def values(self) -> np.ndarray:
        return self.config.p_operative * self._expected_battery()

    def update(self, active: np.ndarray, observed_eh: np.ndarray) -> None:
        self.idle += 1
        self.idle[active] = 0
        self.h[active] = observed_eh[active]


class Case1Tracker(BeliefTracker):
    variant = Variant.NO_SIMULTANEOUS_HARVEST

    def __init__(self, config: SystemConfig, curve: Case1BeliefCurve | None = None):
        super().__init__(config)
        self.curve = curve or Case1BeliefCurve(config.chain, config.battery_cap)

    def z(self) -> np.ndarray:
        return self.curve.z_array(int(self.idle.max()))[self.idle]

    def values(self) -> np.ndarray:
        return self.config.p_operative * self.config.battery_cap * self.z()

    def update(self, active: np.ndarray, observed_eh: np.ndarray) -> None:
        self.idle += 1
        self.idle[active] = 0


class Case2Tracker(BeliefTracker):
    variant = Variant.BATTERYLESS

    def __init__(self, config: SystemConfig):
        super().__init__(config)
        # before any observation, start every node at the stationary belief
        self.s = np.full(self.n, config.chain.stationary_harvest_prob())

    def values(self) -> np.ndarray:
        return self.config.p_operative * self.s

    def update(self, active: np.ndarray, observed_eh: np.ndarray) -> None:
        chain = self.config.chain
        self.s = (chain.p11 - chain.p01) * self.s + chain.p01
        self.s[active] = np.where(
            observed_eh[active] == 1, chain.p11, chain.p01
        )
        self.idle += 1
        self.idle[active] = 0


def make_tracker(config: SystemConfig) -> BeliefTracker:
    if config.variant is Variant.GENERAL:
        return GeneralTracker(config)
    if config.variant is Variant.NO_SIMULTANEOUS_HARVEST:
        return Case1Tracker(config)
    return Case2Tracker(config)


# ---------------------------------------------------------------------------
# selection rules


def myopic_select(values: np.ndarray, idle: np.ndarray, K: int) -> np.ndarray:
    """K nodes with the highest expected bits; ties go to the longest-idle
    node, then the lowest index."""
    order = np.lexsort((np.arange(len(values)), -idle, -values))
    return np.sort(order[:K])


def round_robin_select(order: np.ndarray, cursor: int, K: int) -> tuple[np.ndarray, int]:
    n = len(order)
    picks = order[(cursor + np.arange(K)) % n]
    return np.sort(picks), (cursor + K) % n


def random_select(rng: np.random.Generator, n: int, K: int) -> np.ndarray:
    return np.sort(rng.choice(n, size=K, replace=False))


# ---------------------------------------------------------------------------
# policy objects (one per episode)


class Policy:
    kind: str

    def reset(self, config: SystemConfig, rng: np.random.Generator) -> None:
        self.config = config

    def select(self, tracker: BeliefTracker) -> np.ndarray:
        raise NotImplementedError


class MyopicPolicy(Policy):
    kind = "myopic"

    def select(self, tracker: BeliefTracker) -> np.ndarray:
        return myopic_select(
            tracker.values(), tracker.idle, self.config.n_channels
        )


class RoundRobinPolicy(Policy):
    kind = "round-robin"

    def reset(self, config: SystemConfig, rng: np.random.Generator) -> None:
        super().reset(config, rng)
        self.order = rng.permutation(config.n_nodes)
        self.cursor = 0

    def select(self, tracker: BeliefTracker) -> np.ndarray:
        picks, self.cursor = round_robin_select(
            self.order, self.cursor, self.config.n_channels
        )
        return picks


class RandomPolicy(Policy):
    kind = "random"

    def reset(self, config: SystemConfig, rng: np.random.Generator) -> None:
        super().reset(config, rng)
        self.rng = rng

    def select(self, tracker: BeliefTracker) -> np.ndarray:
        return random_select(self.rng, self.config.n_nodes, self.config.n_channels)


def make_policy(kind: str) -> Policy:
    try:
        cls = {
            "myopic": MyopicPolicy,
            "round-robin": RoundRobinPolicy,
            "random": RandomPolicy,
        }[kind]
    except KeyError:
        raise ValueError(f"unknown policy kind {kind!r}") from None
    return cls()
