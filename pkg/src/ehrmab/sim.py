"""Seeded Monte Carlo simulation of the scheduling loop.

True node states stay hidden from the policy; only active nodes reveal their
EH state.  Episodes are deterministic functions of (config, policy kind,
seed): repetition r of an experiment uses the stream derived from
``numpy.random.SeedSequence((base_seed, r))``, which also makes aggregation
independent of execution order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import SystemConfig, Variant
from .policies import BeliefTracker, Policy, make_policy, make_tracker


@dataclass
class TsOutcome:
    """What one time slot produced, per node."""

    scheduled: np.ndarray  # bool mask, exactly K true
    operative: np.ndarray  # bool mask
    active: np.ndarray     # scheduled & operative
    bits_sent: np.ndarray  # battery drained by active nodes, else 0
    observed_eh: np.ndarray  # EH states; meaningful only where active


@dataclass
class EpisodeResult:
    total_discounted_bits: float
    per_ts_bits: np.ndarray
    overflow_events: int
    scheduled_per_ts: float = 0.0


@dataclass
class ExperimentSummary:
    mean_per_ts: float
    std: float
    ci95: float
    overflow_rate: float  # overflow events per node per slot
    repetitions: int
    per_rep_means: np.ndarray = field(repr=False, default=None)


def episode_rng_streams(seed) -> tuple[np.random.Generator, np.random.Generator]:
    """(environment stream, policy stream) for one episode."""
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    env_ss, pol_ss = ss.spawn(2)
    return np.random.default_rng(env_ss), np.random.default_rng(pol_ss)


def run_episode(
    config: SystemConfig,
    policy: Policy | str,
    seed,
    *,
    init_eh: str = "stationary",
    trace: list | None = None,
) -> EpisodeResult:
    """Simulate one episode of T slots.

    init_eh selects the initial true EH states: "stationary" draws from the
    chain's stationary law; "reset" starts every node as if it had just
    transmitted (case-1: chain restarted by e0/e1; other variants: state
    advanced one step from the tracked h), which matches the tracker's
    initial belief exactly and is used by value-consistency checks.

    If ``trace`` is a list, per-slot TsOutcome records are appended to it.
    """
    if isinstance(policy, str):
        policy = make_policy(policy)
    chain = config.chain
    N, K, B, p = (
        config.n_nodes,
        config.n_channels,
        config.battery_cap,
        config.p_operative,
    )
    env_rng, pol_rng = episode_rng_streams(seed)

    tracker = make_tracker(config)
    policy.reset(config, pol_rng)

    if init_eh == "stationary":
        eh = (env_rng.random(N) < chain.stationary_harvest_prob()).astype(np.int64)
    elif init_eh == "reset":
        if config.variant is Variant.NO_SIMULTANEOUS_HARVEST:
            eh = (env_rng.random(N) < chain.e1).astype(np.int64)
        else:
            start = np.where(
                getattr(tracker, "h", np.zeros(N, dtype=np.int64)) == 1,
                chain.p11,
                chain.p01,
            )
            eh = (env_rng.random(N) < start).astype(np.int64)
    else:
        raise ValueError(f"unknown init_eh {init_eh!r}")
    if config.variant is Variant.BATTERYLESS:
        battery = eh.copy()
    else:
        battery = np.zeros(N, dtype=np.int64)

    T = config.horizon
    per_ts = np.zeros(T)
    overflow = 0
    scheduled_total = 0
    discount = 1.0
    total = 0.0

    for n in range(T):
        sel = policy.select(tracker)
        scheduled = np.zeros(N, dtype=bool)
        scheduled[sel] = True
        scheduled_total += int(scheduled.sum())
        operative = env_rng.random(N) < p
        active = scheduled & operative

        bits = np.where(active, battery, 0)
        per_ts[n] = bits.sum()
        total += discount * per_ts[n]
        discount *= config.beta

        observed_eh = eh.copy()

        # next EH states: active case-1 nodes restart the chain, everyone
        # else follows the Markov step
        step = np.where(eh == 1, chain.p11, chain.p01)
        if config.variant is Variant.NO_SIMULTANEOUS_HARVEST:
            step = np.where(active, chain.e1, step)
        eh_next = (env_rng.random(N) < step).astype(np.int64)

        # battery update; harvest in slot n equals the next EH state
        if config.variant is Variant.BATTERYLESS:
            battery_next = eh_next.copy()
        else:
            idle_fill = battery + eh_next
            overflow += int(((idle_fill > B) & ~active).sum())
            idle_fill = np.minimum(idle_fill, B)
            if config.variant is Variant.NO_SIMULTANEOUS_HARVEST:
                battery_next = np.where(active, 0, idle_fill)
            else:
                battery_next = np.where(active, eh_next, idle_fill)

        tracker.update(active, observed_eh)
        if trace is not None:
            trace.append(
                TsOutcome(
                    scheduled=scheduled,
                    operative=operative,
                    active=active,
                    bits_sent=bits,
                    observed_eh=observed_eh,
                )
            )
        eh = eh_next
        battery = battery_next

    return EpisodeResult(
        total_discounted_bits=float(total),
        per_ts_bits=per_ts,
        overflow_events=overflow,
        scheduled_per_ts=scheduled_total / T,
    )


def repetition_seed(base_seed: int, r: int) -> np.random.SeedSequence:
    return np.random.SeedSequence((base_seed, r))


def run_experiment(
    config: SystemConfig,
    policy_kind: str,
    repetitions: int,
    base_seed: int,
    *,
    init_eh: str = "stationary",
) -> ExperimentSummary:
    """Average per-slot throughput over independent seeded repetitions."""
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    means = np.empty(repetitions)
    overflows = np.empty(repetitions)
    for r in range(repetitions):
        res = run_episode(
            config, policy_kind, repetition_seed(base_seed, r), init_eh=init_eh
        )
        means[r] = res.per_ts_bits.mean()
        overflows[r] = res.overflow_events
    std = float(means.std(ddof=1)) if repetitions > 1 else 0.0
    ci95 = 1.96 * std / math.sqrt(repetitions) if repetitions > 1 else 0.0
    return ExperimentSummary(
        mean_per_ts=float(means.mean()),
        std=std,
        ci95=ci95,
        overflow_rate=float(overflows.mean())
        / (config.horizon * config.n_nodes),
        repetitions=repetitions,
        per_rep_means=means,
    )
