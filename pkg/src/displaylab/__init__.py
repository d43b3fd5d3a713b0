"""displaylab: interactive pool-based active learning for binary change
detection, with a bandit-driven convex display selector."""

from .bandit import BanditConfig, QTable, adversarial_reward, choose_action, new_qtable, update
from .classifier import ClassifierConfig, LinearModel, raw_score, score_matrix, train
from .clustering import ClusterModel, fit_kmeans, matrices
from .errors import (
    FormatError,
    OracleUnavailableError,
    PoolExhaustedError,
    SessionStateError,
    ValidationError,
)
from .membership import (
    Instance,
    LambdaConfig,
    MembershipVector,
    SolverConfig,
    fixpoint_step,
    objective,
    select_display,
    solve,
)
from .pool import (
    DataPool,
    Sample,
    SyntheticSpec,
    generate_synthetic,
    load_pool,
    simulated_oracle,
    split_pool,
    write_pool,
)
from .session import (
    IterationRecord,
    SessionConfig,
    SessionState,
    auc_of_run,
    eer,
    eer_threshold_sweep,
    load_session,
    run_with_simulated_oracle,
    save_session,
    start_session,
    submit_labels,
)
from .strategies import (
    ACTION_SPACE,
    STRATEGY_NAMES,
    SelectionContext,
    StrategyKind,
    criterion,
    lambda_name,
    maxmin_select,
    parse_strategy,
    propose_display,
)

__version__ = "0.1.0"
