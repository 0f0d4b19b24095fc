"""cupfix: exact solvers for coalition play in knockout tournaments.

Computes the best winning probability a favorite can reach when a
coalition may throw games adaptively, round by round; produces the
round-one best response; generates hard instances with independently
known answers; and serves a live advisor over HTTP.
"""

__version__ = "0.1.0"

from .cover import (
    ConflictGraph,
    conflict_graph,
    is_random_game_cover,
    minimum_random_game_cover,
)
from .engine import (
    Game,
    MonteCarloEstimate,
    RoundState,
    advance_round,
    current_pairings,
    monte_carlo_win_estimate,
    reach_distribution,
)
from .model import (
    DenseMatrix,
    Inner,
    Instance,
    InstanceSyntaxError,
    Leaf,
    MissingRoleAnnotations,
    Player,
    ProbabilityMatrix,
    RuleMatrix,
    SizeLimitExceeded,
    TournamentTree,
    ValidationError,
    Violation,
    balanced_tree,
    format_rational,
    is_balanced,
    parse_instance,
    parse_rational,
    serialize_instance,
    tree_height,
    tree_leaves,
    validate_instance,
)
from .oracle import (
    NonAdaptiveStrategy,
    feasible_pairs,
    oracle_adaptive,
    oracle_best_profiles,
    oracle_nonadaptive,
)
from .skeleton import (
    Action,
    Configuration,
    SiblingConfiguration,
    Skeleton,
    StrategyProfile,
    build_skeleton,
    effective_probability,
    sibling_configurations,
    strategy_profiles,
    transition_probability,
    valid_configurations,
)
from .solver import (
    BestResponse,
    Mode,
    OptResult,
    best_response,
    best_response_for,
    decide,
    optimal_value_for,
    solve,
    solve_low_memory,
)

__all__ = [name for name in dir() if not name.startswith("_")]
