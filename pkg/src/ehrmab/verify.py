"""Built-in verification grids: myopic-optimality theorems, inequality
lemmas, and the belief-map monotone-contraction property.

Each check runs on fixed-seed sampled instances at desk scale and returns a
LemmaReport; the CLI renders these as a table and CSV.  Chains that violate
the standing assumptions (p11 >= p01, admissible reset) are rejected here
even though the simulator accepts them.
"""

from __future__ import annotations

import itertools

import numpy as np

from .core import Case1BeliefCurve, EhChainParams, SystemConfig, Variant, case1_p0_sequence
from .pseudo_value import (
    HorizonSpec,
    LemmaReport,
    check_lemma2,
    check_lemma3,
    check_lemma4,
    lemma3_condition,
    optimal_value_case1,
    optimal_value_case2,
    w_case1,
    w_case2,
    _sample_case1_chain,
    _sample_case2_chain,
    _sobol,
)


def check_property1(
    n_chains: int = 100, l_max: int = 200, B: int = 5, seed: int = 11,
    chains: list[EhChainParams] | None = None,
) -> LemmaReport:
    """Monotonicity and contraction of the case-1 belief sequence z_l on
    l <= l_max, plus monotone convergence of the non-harvesting probability
    and agreement of the recursion with the distribution route (the latter
    is asserted inside Case1BeliefCurve at 1e-12)."""
    if chains is None:
        u = _sobol(3, n_chains, seed)
        chains = [_sample_case1_chain(row) for row in u]
    worst = -np.inf
    for chain in chains:
        z = Case1BeliefCurve(chain, B).z_array(l_max + 1)
        lo = z[:-1]  # z_0 .. z_lmax
        hi = z[1:]   # z_1 .. z_lmax+1
        d = np.subtract.outer(lo, lo)
        d_next = np.subtract.outer(hi, hi)
        mask = np.tril(np.ones_like(d, dtype=bool))  # rows l >= cols m
        worst = max(worst, float((-d)[mask].max()))          # z_l >= z_m
        worst = max(worst, float((d_next - d)[mask].max()))  # contraction
        p0 = case1_p0_sequence(chain, l_max)
        worst = max(worst, float(np.diff(p0).min() * -1.0))  # p0 climbs
        limit = chain.p10 / (chain.p01 + chain.p10)
        worst = max(worst, float((p0 - limit).max()))
    return LemmaReport("property1", len(chains), worst)


def _theorem_instances(seed: int, min_instances: int):
    """Deterministic desk-scale instance grid: (N, B, T, chain draw)."""
    grid = list(itertools.product((2, 3), (1, 2, 3), (2, 3, 4)))
    reps = -(-min_instances // len(grid))  # ceil
    u = _sobol(3, len(grid) * reps, seed)
    k = 0
    for _ in range(reps):
        for N, B, T in grid:
            yield N, B, T, u[k]
            k += 1


def check_theorem2(min_instances: int = 54, seed: int = 7) -> LemmaReport:
    """Case-1 myopic optimality: on admissible chains the exhaustive optimum
    equals the pseudo value of the ordered belief vector."""
    worst = -np.inf
    count = 0
    rng = np.random.default_rng(seed)
    for N, B, T, u in _theorem_instances(seed, min_instances):
        chain = _sample_case1_chain(u)
        assert chain.positively_correlated() and chain.reset_admissible()
        cfg = SystemConfig(
            n_nodes=N,
            n_channels=1,
            battery_cap=B,
            p_operative=float(rng.uniform(0.2, 0.9)),
            chain=chain,
            beta=float(rng.uniform(0.5, 1.0)),
            horizon=T,
            variant=Variant.NO_SIMULTANEOUS_HARVEST,
        )
        spec = HorizonSpec(n=1, T=T, beta=cfg.beta)
        l_vec = rng.integers(0, 8, size=N)
        curve = Case1BeliefCurve(chain, B)
        opt = optimal_value_case1(l_vec, spec, cfg, curve)
        mp = w_case1(sorted(l_vec, reverse=True), spec, cfg, curve)
        worst = max(worst, abs(opt - mp))
        count += 1
    return LemmaReport("theorem2", count, float(worst))


def check_theorem3(min_instances: int = 54, seed: int = 8) -> LemmaReport:
    """Batteryless myopic optimality under positive correlation."""
    worst = -np.inf
    count = 0
    rng = np.random.default_rng(seed)
    for N, _, T, u in _theorem_instances(seed, min_instances):
        chain = _sample_case2_chain(u[:2])
        assert chain.positively_correlated()
        cfg = SystemConfig(
            n_nodes=N,
            n_channels=1,
            battery_cap=1,
            p_operative=float(rng.uniform(0.2, 0.9)),
            chain=chain,
            beta=float(rng.uniform(0.5, 1.0)),
            horizon=T,
            variant=Variant.BATTERYLESS,
        )
        spec = HorizonSpec(n=1, T=T, beta=cfg.beta)
        s_vec = rng.uniform(0.0, 1.0, size=N)
        opt = optimal_value_case2(s_vec, spec, cfg)
        mp = w_case2(sorted(s_vec, reverse=True), spec, cfg)
        worst = max(worst, abs(opt - mp))
        count += 1
    return LemmaReport("theorem3", count, float(worst))


def check_lemma3_condition_identity(
    p_grid=None, t_grid=range(1, 51)
) -> LemmaReport:
    """With equal bounds and beta = 1 the swap condition reduces to
    1 - (1-p)^(T+1) <= 1, which must hold on a dense (p, T) grid."""
    if p_grid is None:
        p_grid = np.linspace(0.01, 1.0, 100)
    worst = -np.inf
    count = 0
    for p in p_grid:
        for T in t_grid:
            d = p * 5.0  # any common bound cancels
            ok = lemma3_condition(1.0, float(p), int(T), d, d)
            closed = 1.0 - (1.0 - float(p)) ** (T + 1)
            worst = max(worst, 0.0 if ok else 1.0, closed - 1.0)
            count += 1
    return LemmaReport("lemma3-condition", count, float(worst))


def _lemma_config(n_nodes: int = 3, B: int = 2) -> SystemConfig:
    return SystemConfig(
        n_nodes=n_nodes,
        n_channels=1,
        battery_cap=B,
        p_operative=0.5,
        chain=EhChainParams(p01=0.2, p11=0.8, e0=0.2),
        beta=1.0,
        horizon=4,
        variant=Variant.NO_SIMULTANEOUS_HARVEST,
    )


def run_checks(scope: str, samples: int = 1000) -> list[LemmaReport]:
    """Run the named verification scope; scopes: case1, case2, lemmas,
    property1, all."""
    cfg = _lemma_config()
    spec = HorizonSpec(n=1, T=4, beta=1.0)
    reports: list[LemmaReport] = []
    if scope in ("case1", "all"):
        reports.append(check_theorem2())
    if scope in ("case2", "all"):
        reports.append(check_theorem3())
    if scope in ("lemmas", "all"):
        reports.append(check_lemma2(cfg, spec, samples))
        reports.append(check_lemma3(cfg, spec, samples))
        reports.append(check_lemma4(cfg, spec, samples))
        reports.append(check_lemma3_condition_identity())
    if scope in ("property1", "all"):
        reports.append(check_property1())
    if not reports:
        raise ValueError(f"unknown verify scope {scope!r}")
    return reports
