"""Dense complex statevector simulation primitives.

Basis-state indexing is big-endian: index ``i`` stands for the bitstring of
``i`` padded to ``n_qubits`` characters, leftmost character first. A j-bit
prefix ``k`` therefore owns the contiguous index slice
``[k * 2**(n-j), (k+1) * 2**(n-j))``, which keeps all prefix bookkeeping to
plain slice arithmetic.
"""

from __future__ import annotations

import hashlib
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

QUBIT_CAP = 14
NORM_ATOL = 1e-9
UNITARY_ATOL = 1e-9

Mask = Callable[[str], bool] | np.ndarray | Sequence[bool]


class ResourceLimitError(RuntimeError):
    """A requested object exceeds the dense-simulation caps."""


def bitstring(index: int, n_qubits: int) -> str:
    """Big-endian bitstring of ``index`` on ``n_qubits`` bits."""
    return format(index, f"0{n_qubits}b")


def _frozen_array(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Statevector:
    """Normalized pure state over ``n_qubits`` qubits."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n_qubits <= QUBIT_CAP:
            raise ValueError(f"n_qubits must be in [1, {QUBIT_CAP}], got {self.n_qubits}")
        amps = _frozen_array(self.amplitudes, np.complex128)
        if amps.shape != (1 << self.n_qubits,):
            raise ValueError(f"expected {1 << self.n_qubits} amplitudes, got shape {amps.shape}")
        norm_sq = float(np.sum(amps.real**2 + amps.imag**2))
        if abs(norm_sq - 1.0) > NORM_ATOL:
            raise ValueError(f"state is not normalized: |psi|^2 = {norm_sq!r}")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def probabilities(self) -> np.ndarray:
        return self.amplitudes.real**2 + self.amplitudes.imag**2

    def __repr__(self) -> str:
        return f"Statevector(n_qubits={self.n_qubits})"


@dataclass(frozen=True, eq=False)
class UnitaryOperator:
    """Dense unitary matrix on a power-of-two dimension.

    The constructor checks structure only. Unitarity is validated by
    ``from_matrix`` for externally supplied matrices and holds by
    construction for every operator this library builds (tensor products of
    unitaries, diagonal phase operators, and their products); a Gram-matrix
    check on every construction would be prohibitive near the size cap.
    """

    dim: int
    entries: np.ndarray

    def __post_init__(self):
        if self.dim < 1 or self.dim & (self.dim - 1):
            raise ValueError(f"dim must be a positive power of two, got {self.dim}")
        if self.dim > (1 << QUBIT_CAP):
            raise ResourceLimitError(f"dim {self.dim} exceeds the 2**{QUBIT_CAP} cap")
        entries = _frozen_array(self.entries, np.complex128)
        if entries.shape != (self.dim, self.dim):
            raise ValueError(f"expected a {self.dim}x{self.dim} matrix, got shape {entries.shape}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_matrix(cls, matrix, *, validate: bool = True) -> UnitaryOperator:
        entries = np.asarray(matrix, dtype=np.complex128)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValueError(f"matrix must be square, got shape {entries.shape}")
        op = cls(entries.shape[0], entries)
        if validate and not op.is_unitary():
            raise ValueError("matrix is not unitary within tolerance")
        return op

    def is_unitary(self, atol: float = UNITARY_ATOL) -> bool:
        gram = self.entries.conj().T @ self.entries
        return bool(np.max(np.abs(gram - np.eye(self.dim))) <= atol)

    def dagger(self) -> UnitaryOperator:
        return UnitaryOperator(self.dim, self.entries.conj().T)

    def digest(self) -> str:
        """SHA-256 of the entry bytes, for report echoes."""
        return hashlib.sha256(np.ascontiguousarray(self.entries).tobytes()).hexdigest()

    @property
    def n_qubits(self) -> int:
        return self.dim.bit_length() - 1

    def __repr__(self) -> str:
        return f"UnitaryOperator(dim={self.dim})"


@dataclass(frozen=True)
class Histogram:
    """Measurement counts keyed by bitstring; only sampled outcomes appear."""

    n_qubits: int
    counts: dict[str, int]
    shots: int

    def __post_init__(self):
        if self.shots < 1:
            raise ValueError(f"shots must be positive, got {self.shots}")
        total = 0
        for bits, count in self.counts.items():
            if len(bits) != self.n_qubits or set(bits) - {"0", "1"}:
                raise ValueError(f"bad outcome key {bits!r} for {self.n_qubits} qubits")
            if count < 0:
                raise ValueError(f"negative count for {bits!r}")
            total += count
        if total != self.shots:
            raise ValueError(f"counts sum to {total}, expected {self.shots} shots")


def zero_state(n: int) -> Statevector:
    """The all-zeros computational basis state on ``n`` qubits."""
    if not 1 <= n <= QUBIT_CAP:
        raise ValueError(f"n must be in [1, {QUBIT_CAP}], got {n}")
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[0] = 1.0
    return Statevector(n, amps)


def identity(n: int) -> UnitaryOperator:
    """Identity on ``n`` qubits."""
    if not 1 <= n <= QUBIT_CAP:
        raise ResourceLimitError(f"n must be in [1, {QUBIT_CAP}], got {n}")
    return UnitaryOperator(1 << n, np.eye(1 << n, dtype=np.complex128))


def hadamard(n: int) -> UnitaryOperator:
    """Uniform-superposition preparation H tensored ``n`` times."""
    if not 1 <= n <= QUBIT_CAP:
        raise ResourceLimitError(f"n must be in [1, {QUBIT_CAP}], got {n}")
    single = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=np.complex128) / math.sqrt(2.0)
    out = np.array([[1.0]], dtype=np.complex128)
    for _ in range(n):
        out = np.kron(out, single)
    return UnitaryOperator(1 << n, out)


def apply(state: Statevector, u: UnitaryOperator) -> Statevector:
    """Matrix-vector application of ``u`` to ``state``."""
    if u.dim != state.dim:
        raise ValueError(f"operator dim {u.dim} does not match state dim {state.dim}")
    return Statevector(state.n_qubits, u.entries @ state.amplitudes)


def kron(u1: UnitaryOperator, u2: UnitaryOperator) -> UnitaryOperator:
    """Tensor product with ``u1`` acting on the index prefix."""
    dim = u1.dim * u2.dim
    if dim > (1 << QUBIT_CAP):
        raise ResourceLimitError(f"tensor product dim {dim} exceeds the 2**{QUBIT_CAP} cap")
    return UnitaryOperator(dim, np.kron(u1.entries, u2.entries))


def mask_array(mask: Mask, n_qubits: int) -> np.ndarray:
    """Normalize a bitstring predicate or boolean array to a length-2**n mask."""
    dim = 1 << n_qubits
    if callable(mask):
        return np.fromiter(
            (bool(mask(bitstring(i, n_qubits))) for i in range(dim)), dtype=bool, count=dim
        )
    arr = np.asarray(mask, dtype=bool)
    if arr.shape != (dim,):
        raise ValueError(f"mask must have length {dim}, got shape {arr.shape}")
    return arr


def apply_conditional_phase(state: Statevector, mask: Mask, phase: float) -> Statevector:
    """Multiply the amplitude of every mask-selected basis state by exp(i*phase)."""
    selected = mask_array(mask, state.n_qubits)
    amps = state.amplitudes.copy()
    amps[selected] *= complex(math.cos(phase), math.sin(phase))
    return Statevector(state.n_qubits, amps)


def measure_all(state: Statevector, shots: int, seed: int) -> Histogram:
    """Sample ``shots`` outcomes from the exact |amplitude|^2 distribution.

    Sampling contract (kept stable for cross-run reproducibility): a numpy
    ``default_rng(seed)`` generator (PCG64) draws one uniform double per shot
    via ``Generator.random``; each uniform is mapped to an outcome by binary
    search over the inclusive cumulative sums of the probabilities,
    normalized by their total. Identical seeds yield identical histograms.
    """
    if shots < 1:
        raise ValueError(f"shots must be positive, got {shots}")
    probs = state.probabilities
    cumulative = np.cumsum(probs / probs.sum())
    draws = np.random.default_rng(seed).random(shots)
    outcomes = np.minimum(np.searchsorted(cumulative, draws, side="right"), state.dim - 1)
    values, counts = np.unique(outcomes, return_counts=True)
    table = {bitstring(int(v), state.n_qubits): int(c) for v, c in zip(values, counts)}
    return Histogram(state.n_qubits, table, shots)


def probability_of(state: Statevector, mask: Mask) -> float:
    """Total probability of the mask-selected basis states."""
    selected = mask_array(mask, state.n_qubits)
    return float(np.sum(state.probabilities[selected]))
