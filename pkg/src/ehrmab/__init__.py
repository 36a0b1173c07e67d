"""Scheduling policies for multi-access networks of energy-harvesting nodes.

The network is a restless multi-armed bandit: an access point schedules K of
N nodes each time slot, each node harvests energy from a two-state Markov
chain into a finite battery, and a scheduled node transmits its whole battery
if it is operative.  The package provides belief-state tracking, seeded
Monte Carlo simulation of myopic / round-robin / random policies, exact
small-instance optimality checks of the myopic policy, and an LP-relaxation
upper bound on the throughput of any policy.
"""

from .core import (
    BeliefTable,
    Case1Belief,
    Case1BeliefCurve,
    Case2Belief,
    EhChainParams,
    GeneralBelief,
    JointEBDist,
    SystemConfig,
    TrueNodeState,
    Variant,
    case1_belief_z,
    case1_p0_sequence,
    expected_reward,
    q_prob,
    tau_case2,
)
from .lp import (
    OccupationLp,
    SingleArmMdp,
    build_occupation_lp,
    build_single_arm_mdp,
    default_l_max,
    lp_to_text,
    scheduling_probabilities,
    solve_lp,
    upper_bound,
    upper_bound_with_stability,
)
from .policies import (
    POLICY_KINDS,
    BeliefTracker,
    MyopicPolicy,
    Policy,
    RandomPolicy,
    RoundRobinPolicy,
    make_policy,
    make_tracker,
    myopic_select,
)
from .pseudo_value import (
    HorizonSpec,
    LemmaReport,
    lemma3_condition,
    optimal_value,
    optimal_value_case1,
    optimal_value_case2,
    u_fn,
    w_case1,
    w_case2,
)
from .sim import (
    EpisodeResult,
    ExperimentSummary,
    TsOutcome,
    repetition_seed,
    run_episode,
    run_experiment,
)
from .verify import (
    check_property1,
    check_theorem2,
    check_theorem3,
    run_checks,
)

__version__ = "0.1.0"

__all__ = [
    "BeliefTable",
    "BeliefTracker",
    "Case1Belief",
    "Case1BeliefCurve",
    "Case2Belief",
    "EhChainParams",
    "EpisodeResult",
    "ExperimentSummary",
    "GeneralBelief",
    "HorizonSpec",
    "JointEBDist",
    "LemmaReport",
    "MyopicPolicy",
    "OccupationLp",
    "POLICY_KINDS",
    "Policy",
    "RandomPolicy",
    "RoundRobinPolicy",
    "SingleArmMdp",
    "SystemConfig",
    "TrueNodeState",
    "TsOutcome",
    "Variant",
    "build_occupation_lp",
    "build_single_arm_mdp",
    "case1_belief_z",
    "case1_p0_sequence",
    "check_property1",
    "check_theorem2",
    "check_theorem3",
    "default_l_max",
    "expected_reward",
    "lemma3_condition",
    "lp_to_text",
    "make_policy",
    "make_tracker",
    "myopic_select",
    "optimal_value",
    "optimal_value_case1",
    "optimal_value_case2",
    "q_prob",
    "repetition_seed",
    "run_checks",
    "run_episode",
    "run_experiment",
    "scheduling_probabilities",
    "solve_lp",
    "tau_case2",
    "u_fn",
    "upper_bound",
    "upper_bound_with_stability",
    "w_case1",
    "w_case2",
]
