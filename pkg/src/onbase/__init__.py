"""Online basestation allocation under the time-sharing utility."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConfigError,
    ContractViolation,
    InvalidAllocationError,
    OnbaseError,
    TooLargeError,
    UnsupportedShapeError,
)
from .model import (  # noqa: E402
    Allocation,
    Decision,
    DecisionTrace,
    Move,
    OnlineAlgorithm,
    WeightMatrix,
    permute_rows,
    random_order,
    run_online,
    ts_utility,
)
from .offline import (  # noqa: E402
    Matching,
    brute_force_optimal,
    greedy_matching,
    max_weight_matching,
    optimal_identical_offline,
)
from .online import REGISTRY, make_algorithm, online_greedy_reassign, sample_and_price  # noqa: E402
