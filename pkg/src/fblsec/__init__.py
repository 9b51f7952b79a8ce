"""Finite-blocklength two-packet superposition link design.

A library and experiment CLI for a short-packet link that superposes a
ciphered message and its key at different powers, scores legitimate and
eavesdropping receivers by decoding and deception probabilities, and
jointly designs the key length and power split under a total budget.
"""

__version__ = "0.1.0"

from .fbl_core import (  # noqa: F401
    SNR,
    BlockCode,
    capacity,
    dispersion,
    fbl_error,
    from_db,
    omega,
    q_function,
    to_db,
)
from .link_model import (  # noqa: F401
    ConstraintFlags,
    LinkReport,
    Mode,
    Receiver,
    Scenario,
    Strategy,
    Thresholds,
    UtilityReport,
    check_constraints,
    constraint_flag,
    expected_utility,
    feasibility_mask,
    link_report,
    metrics,
    sinr_key_direct,
    sinr_message,
    snr_key_after_sic,
    system_utility,
    u_fp,
    utility_report,
)
from .optimizer import (  # noqa: F401
    BcdConfig,
    BothNeighborsInfeasible,
    EmptyFeasibleSet,
    Infeasible,
    IterationPoint,
    OptimizationTrace,
    baseline_optimize,
    bcd_optimize,
    feasible_keylen_interval,
    feasible_power_interval,
    find_initial_feasible,
    maximize_keylen,
    maximize_power,
    round_keylen,
)
from .oracle import (  # noqa: F401
    InsufficientPoints,
    PowerSweep,
    SurfaceGrid,
    TheoremReport,
    full_surface,
    sweep_power_pair,
    verify_concavity,
    verify_lemma1,
    verify_theorem1,
)
