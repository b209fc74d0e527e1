"""Selective-phase operators and the amplitude amplification drivers.

The iterative operator is Q(phi, varphi) = -A s_0(phi) A^dagger s_f(varphi):
s_f multiplies marked basis states by e^{i*varphi}, s_0 multiplies the
all-zeros state by e^{-i*phi}, and the leading -1 is kept in the dense form
so matrix identities hold literally (it never affects probabilities). Runs
apply the diagonal factors directly to the state, O(2^n) per factor, with
dense materialization reserved for equality checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .oracle import BooleanOracle
from .schedule import PhaseSchedule, phase_angles
from .statevector import (
    Histogram,
    ResourceLimitError,
    Statevector,
    UnitaryOperator,
    measure_all,
    probability_of,
)

ITERATION_CAP = 100_000
A_CONSISTENCY_ATOL = 1e-9


@dataclass(frozen=True, eq=False)
class AmplificationSetup:
    """A measurement-free preparation unitary paired with the oracle it searches."""

    A: UnitaryOperator
    f: BooleanOracle

    def __post_init__(self):
        if self.A.dim != 1 << self.f.n_bits:
            raise ValueError(
                f"operator dim {self.A.dim} does not match the {self.f.n_bits}-bit oracle"
            )

    @property
    def n_qubits(self) -> int:
        return self.f.n_bits


@dataclass(frozen=True, eq=False)
class RunResult:
    """Outcome of one amplification run.

    ``exact_success`` is the marked-state probability of ``final_state``;
    ``histogram`` and ``sampled_hit`` are filled only when shots were drawn,
    with ``sampled_hit`` true when at least one sampled outcome is marked.
    """

    final_state: Statevector
    iterations: int
    exact_success: float
    histogram: Histogram | None = None
    sampled_hit: bool | None = None


def _phase(angle: float) -> complex:
    return complex(math.cos(angle), math.sin(angle))


def s_f(f: BooleanOracle, varphi: float) -> UnitaryOperator:
    """Oracle phase: e^{i*varphi} on every x with f(x) = 1, identity elsewhere."""
    diag = np.ones(1 << f.n_bits, dtype=np.complex128)
    diag[f.mask] = _phase(varphi)
    return UnitaryOperator(diag.size, np.diag(diag))


def s_0(n: int, phi: float) -> UnitaryOperator:
    """Zero-state phase: e^{-i*phi} on the all-zeros string, identity elsewhere."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    diag = np.ones(1 << n, dtype=np.complex128)
    diag[0] = _phase(-phi)
    return UnitaryOperator(diag.size, np.diag(diag))


def s_d(a_op: UnitaryOperator, phi: float) -> UnitaryOperator:
    """Generalized diffusion -A s_0(phi) A^dagger."""
    zero_diag = np.ones(a_op.dim, dtype=np.complex128)
    zero_diag[0] = _phase(-phi)
    entries = -((a_op.entries * zero_diag[None, :]) @ a_op.entries.conj().T)
    return UnitaryOperator(a_op.dim, entries)


def generalized_q(setup: AmplificationSetup, phi: float, varphi: float) -> UnitaryOperator:
    """Dense iterative operator -A s_0(phi) A^dagger s_f(varphi)."""
    oracle_diag = np.ones(setup.A.dim, dtype=np.complex128)
    oracle_diag[setup.f.mask] = _phase(varphi)
    zero_diag = np.ones(setup.A.dim, dtype=np.complex128)
    zero_diag[0] = _phase(-phi)
    adag = setup.A.entries.conj().T
    entries = -((setup.A.entries * zero_diag[None, :]) @ adag) * oracle_diag[None, :]
    return UnitaryOperator(setup.A.dim, entries)


def initial_success_probability(setup: AmplificationSetup) -> float:
    """Probability that measuring A|0...0> yields a marked string."""
    column = setup.A.entries[:, 0]
    return float(np.sum((column.real**2 + column.imag**2)[setup.f.mask]))


def _run_iterations(setup: AmplificationSetup, angle_pairs) -> np.ndarray:
    a_mat = setup.A.entries
    a_dag = a_mat.conj().T
    marked = setup.f.mask
    state = a_mat[:, 0].copy()
    for phi, varphi in angle_pairs:
        state[marked] *= _phase(varphi)
        state = a_dag @ state
        state[0] *= _phase(-phi)
        state = a_mat @ state
        np.negative(state, out=state)
    return state


def _finish(setup: AmplificationSetup, state_array: np.ndarray, iterations: int,
            shots: int, seed: int) -> RunResult:
    final_state = Statevector(setup.n_qubits, state_array)
    exact = probability_of(final_state, setup.f.mask)
    histogram = None
    hit = None
    if shots > 0:
        histogram = measure_all(final_state, shots, seed)
        hit = any(setup.f.table[int(bits, 2)] for bits in histogram.counts)
    return RunResult(final_state, iterations, exact, histogram, hit)


def iterations_known(a: float) -> int:
    """Iteration count floor(pi / (4 arcsin(sqrt(a)))) for a known initial probability.

    a = 1 is accepted as the boundary case and yields 0 iterations.
    """
    if not 0.0 < a <= 1.0:
        raise ValueError(f"a must lie in (0, 1], got {a!r}")
    return int(math.floor(math.pi / (4.0 * math.asin(math.sqrt(a)))))


def qaa_known(setup: AmplificationSetup, a: float, shots: int = 0, seed: int = 0,
              *, allow_mismatch: bool = False) -> RunResult:
    """Apply Q(pi, pi) for iterations_known(a) iterations starting from A|0...0>.

    The final marked-state probability is at least max(1 - a, a). The
    supplied ``a`` is cross-checked against the exact initial probability of
    the setup; pass ``allow_mismatch=True`` to study a deliberately wrong a.
    """
    m = iterations_known(a)
    if not allow_mismatch:
        actual = initial_success_probability(setup)
        if abs(a - actual) > A_CONSISTENCY_ATOL:
            raise ValueError(
                f"supplied a = {a!r} differs from the exact initial probability "
                f"{actual!r}; pass allow_mismatch=True to run anyway"
            )
    state = _run_iterations(setup, [(math.pi, math.pi)] * m)
    return _finish(setup, state, m, shots, seed)


def iterations_fixed_point(delta: float, epsilon: float) -> int:
    """Iteration count ceil(ln(2/epsilon) / (2 delta)).

    delta = 1 is accepted as the boundary of the open interval. Counts above
    ITERATION_CAP (the delta -> 0 divergence) are rejected.
    """
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"delta must lie in (0, 1], got {delta!r}")
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    l = int(math.ceil(math.log(2.0 / epsilon) / (2.0 * delta)))
    if l > ITERATION_CAP:
        raise ResourceLimitError(f"l = {l} exceeds the iteration cap {ITERATION_CAP}")
    return l


def run_with_schedule(setup: AmplificationSetup, schedule: PhaseSchedule,
                      shots: int = 0, seed: int = 0) -> RunResult:
    """Apply the schedule's Q(phi_r, varphi_r) factors in ascending r order."""
    state = _run_iterations(setup, schedule.pairs)
    return _finish(setup, state, schedule.l, shots, seed)


def fixed_point_run(setup: AmplificationSetup, delta: float, epsilon: float,
                    shots: int = 0, seed: int = 0) -> RunResult:
    """Fixed-point amplification with l = ceil(ln(2/epsilon) / (2 delta)).

    Whenever the true initial success probability is at least delta**2, the
    exact success probability of the result is at least 1 - epsilon**2, and
    remains so for any larger l run with a schedule regenerated for that l.
    """
    schedule = phase_angles(iterations_fixed_point(delta, epsilon), epsilon)
    return run_with_schedule(setup, schedule, shots, seed)
