"""Amplitude amplification on a dense statevector simulator.

Known-probability and fixed-point (Chebyshev-scheduled) amplification, plus
an oracle-partitioned distributed variant that runs the same fixed-point
schedule on independent sub-searches and verifies sampled outcomes
classically. See the ``cli`` module for the experiment runner.
"""

__version__ = "0.1.0"

from .amplification import (
    ITERATION_CAP,
    AmplificationSetup,
    RunResult,
    fixed_point_run,
    generalized_q,
    initial_success_probability,
    iterations_fixed_point,
    iterations_known,
    qaa_known,
    run_with_schedule,
    s_0,
    s_d,
    s_f,
)
from .distributed import (
    REPORT_VERSION,
    DistributedSetup,
    ExperimentReport,
    NodeReport,
    ProbabilityAccount,
    combined_success,
    dqaa_run,
    node_iterations,
    probability_account,
    report_to_dict,
    report_to_json,
    verify_theorem3,
)
from .oracle import (
    BooleanOracle,
    OracleSplit,
    count_targets,
    evaluate,
    from_predicate,
    from_targets,
    load_oracle,
    save_oracle,
    split,
    target_strings,
)
from .schedule import PhaseSchedule, chebyshev_t, gamma_from, phase_angles, schedule_dump
from .statevector import (
    QUBIT_CAP,
    Histogram,
    ResourceLimitError,
    Statevector,
    UnitaryOperator,
    apply,
    apply_conditional_phase,
    bitstring,
    hadamard,
    identity,
    kron,
    measure_all,
    probability_of,
    zero_state,
)

__all__ = [
    "AmplificationSetup",
    "BooleanOracle",
    "DistributedSetup",
    "ExperimentReport",
    "Histogram",
    "ITERATION_CAP",
    "NodeReport",
    "OracleSplit",
    "PhaseSchedule",
    "ProbabilityAccount",
    "QUBIT_CAP",
    "REPORT_VERSION",
    "ResourceLimitError",
    "RunResult",
    "Statevector",
    "UnitaryOperator",
    "apply",
    "apply_conditional_phase",
    "bitstring",
    "chebyshev_t",
    "combined_success",
    "count_targets",
    "dqaa_run",
    "evaluate",
    "fixed_point_run",
    "from_predicate",
    "from_targets",
    "gamma_from",
    "generalized_q",
    "hadamard",
    "identity",
    "initial_success_probability",
    "iterations_fixed_point",
    "iterations_known",
    "kron",
    "load_oracle",
    "measure_all",
    "node_iterations",
    "phase_angles",
    "probability_account",
    "probability_of",
    "qaa_known",
    "report_to_dict",
    "report_to_json",
    "run_with_schedule",
    "s_0",
    "s_d",
    "s_f",
    "save_oracle",
    "schedule_dump",
    "split",
    "target_strings",
    "verify_theorem3",
    "zero_state",
]
