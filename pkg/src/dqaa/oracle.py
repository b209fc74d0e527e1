"""Boolean functions as explicit truth tables, with prefix decomposition.

A function on ``n`` bits is a table of 2**n bits indexed big-endian, matching
the statevector index convention, so splitting on a j-bit prefix is a slice:
sub-function ``k`` owns ``table[k * 2**(n-j) : (k+1) * 2**(n-j)]``.
"""

from __future__ import annotations

import hashlib
import json
from collections.abc import Callable, Iterable
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .statevector import QUBIT_CAP, bitstring


@dataclass(frozen=True, eq=False)
class BooleanOracle:
    """Total Boolean function f: {0,1}^n_bits -> {0,1} as a truth table."""

    n_bits: int
    table: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n_bits <= QUBIT_CAP:
            raise ValueError(f"n_bits must be in [1, {QUBIT_CAP}], got {self.n_bits}")
        table = np.array(self.table, dtype=np.uint8, copy=True)
        if table.shape != (1 << self.n_bits,):
            raise ValueError(f"expected {1 << self.n_bits} table entries, got shape {table.shape}")
        if np.any(table > 1):
            raise ValueError("table entries must be 0 or 1")
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    @property
    def mask(self) -> np.ndarray:
        """Boolean mask over basis-state indices where f(x) = 1."""
        return self.table.view(np.bool_)

    def __repr__(self) -> str:
        return f"BooleanOracle(n_bits={self.n_bits}, targets={count_targets(self)})"


@dataclass(frozen=True, eq=False)
class OracleSplit:
    """The 2**j sub-functions of a parent oracle under a j-bit prefix."""

    j: int
    subs: tuple[BooleanOracle, ...]


def _index_of(bits: str, n_bits: int) -> int:
    if not isinstance(bits, str) or len(bits) != n_bits or set(bits) - {"0", "1"}:
        raise ValueError(f"expected a {n_bits}-character bitstring, got {bits!r}")
    return int(bits, 2)


def from_targets(n_bits: int, targets: Iterable[str]) -> BooleanOracle:
    """Oracle marking exactly the given bitstrings."""
    if not 1 <= n_bits <= QUBIT_CAP:
        raise ValueError(f"n_bits must be in [1, {QUBIT_CAP}], got {n_bits}")
    table = np.zeros(1 << n_bits, dtype=np.uint8)
    for target in targets:
        table[_index_of(target, n_bits)] = 1
    return BooleanOracle(n_bits, table)


def from_predicate(n_bits: int, predicate: Callable[[str], bool]) -> BooleanOracle:
    """Tabulate a bitstring predicate into an explicit oracle."""
    if not 1 <= n_bits <= QUBIT_CAP:
        raise ValueError(f"n_bits must be in [1, {QUBIT_CAP}], got {n_bits}")
    bits = [1 if predicate(bitstring(i, n_bits)) else 0 for i in range(1 << n_bits)]
    return BooleanOracle(n_bits, np.array(bits, dtype=np.uint8))


def evaluate(f: BooleanOracle, x: str) -> int:
    """f(x) by table lookup."""
    return int(f.table[_index_of(x, f.n_bits)])


def count_targets(f: BooleanOracle) -> int:
    return int(f.table.sum())


def target_strings(f: BooleanOracle) -> list[str]:
    """Marked bitstrings in ascending order."""
    return [bitstring(int(i), f.n_bits) for i in np.flatnonzero(f.table)]


def table_digest(f: BooleanOracle) -> str:
    """SHA-256 of the truth-table bytes, for report echoes."""
    return hashlib.sha256(f.table.tobytes()).hexdigest()


def split(f: BooleanOracle, j: int) -> OracleSplit:
    """Decompose f on a j-bit prefix into 2**j sub-functions on n-j bits.

    Sub-function k satisfies subs[k](x) = f(prefix_k + x); concatenating the
    sub-tables in k order reproduces the parent table bit for bit.
    """
    if not 1 <= j < f.n_bits:
        raise ValueError(f"j must satisfy 1 <= j < {f.n_bits}, got {j}")
    width = 1 << (f.n_bits - j)
    subs = tuple(
        BooleanOracle(f.n_bits - j, f.table[k * width : (k + 1) * width])
        for k in range(1 << j)
    )
    return OracleSplit(j, subs)


def save_oracle(f: BooleanOracle, path, form: str = "targets") -> None:
    """Write the oracle file: JSON with n_bits plus either a target list or an
    MSB-first hex-packed truth table (index 0 is the high bit of byte 0)."""
    doc: dict = {"n_bits": f.n_bits}
    if form == "targets":
        doc["targets"] = target_strings(f)
    elif form == "table":
        doc["table_hex"] = np.packbits(f.table).tobytes().hex()
    else:
        raise ValueError(f"unknown oracle file form {form!r}; use 'targets' or 'table'")
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def load_oracle(path) -> BooleanOracle:
    """Parse an oracle file written by ``save_oracle`` (or by hand)."""
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ValueError(f"{path}: oracle file must be a JSON object")
    n_bits = doc.get("n_bits")
    if not isinstance(n_bits, int) or not 1 <= n_bits <= QUBIT_CAP:
        raise ValueError(f"{path}: n_bits must be an integer in [1, {QUBIT_CAP}]")
    has_targets = "targets" in doc
    has_table = "table_hex" in doc
    if has_targets == has_table:
        raise ValueError(f"{path}: exactly one of 'targets' or 'table_hex' is required")
    if has_targets:
        targets = doc["targets"]
        if not isinstance(targets, list) or not all(isinstance(t, str) for t in targets):
            raise ValueError(f"{path}: 'targets' must be an array of bitstrings")
        return from_targets(n_bits, targets)
    try:
        raw = bytes.fromhex(doc["table_hex"])
    except (TypeError, ValueError):
        raise ValueError(f"{path}: 'table_hex' must be a hex string") from None
    expected = ((1 << n_bits) + 7) // 8
    if len(raw) != expected:
        raise ValueError(f"{path}: table_hex must encode {expected} bytes, got {len(raw)}")
    bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8))
    table, padding = bits[: 1 << n_bits], bits[1 << n_bits :]
    if np.any(padding):
        raise ValueError(f"{path}: padding bits beyond 2**n_bits must be zero")
    return BooleanOracle(n_bits, table)
