"""Beta-Bernoulli alignment-bandit simulation library."""

from .agents import (
    Agent,
    AgentKind,
    AgentSpec,
    epsilon_greedy_act,
    explore_then_exploit_act,
    ids_act,
    info_greedy_act,
    make_agent,
    mixed_ts_act,
    reward_greedy_act,
    thompson_act,
)
from .core import (
    Action,
    ActionKind,
    BeliefState,
    BetaPosterior,
    apply,
    env_arm,
    expected_reward,
    expected_rewards,
    human_query,
    update,
)
from .environment import (
    ProblemInstance,
    RegretTrace,
    TraceRecord,
    episode_streams,
    mix_seed,
    optimal_reward,
    sample_instance,
    step,
    step_regret,
    true_expected_reward,
)
from .harness import (
    AggregateCurve,
    ExperimentConfig,
    aggregate_traces,
    checkpoint_steps,
    default_config,
    episode_seed,
    load_config,
    loglog_slope,
    parse_config,
    read_aggregate_csv,
    run_episode,
    run_experiment,
    run_verification,
)
from .ids_solver import (
    ActionDistribution,
    distribution_ratio,
    grid_oracle,
    minimize_info_ratio,
    minimize_pair,
    point_mass,
)
from .infotheory import (
    beta_bernoulli_mi,
    beta_bernoulli_mi_quadrature,
    digamma,
    estimate_optimal_reward,
    expected_shortfalls,
    info_gain,
    info_gains,
)

__version__ = "0.1.0"
