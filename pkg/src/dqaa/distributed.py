"""Oracle-partitioned amplification across independent simulated nodes.

Splitting a product preparation A1 (x) A2 on a j-bit prefix yields 2**j
sub-searches on n-j qubits. Every node runs the same fixed-point schedule
(built once from the global initial probability), samples, and has its
outcomes verified classically against the full oracle before aggregation.
Nodes are pure, independent computations; running them in-process is
faithful because no quantum communication is involved.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .amplification import AmplificationSetup, iterations_fixed_point, run_with_schedule
from .oracle import BooleanOracle, count_targets, evaluate, split, table_digest, target_strings
from .schedule import phase_angles
from .statevector import Histogram, UnitaryOperator, bitstring

REPORT_VERSION = 1
_MASS_FLOOR = 1e-15
_WITNESS_SLACK = 1e-9


@dataclass(frozen=True, eq=False)
class DistributedSetup:
    """Product preparation A1 (x) A2, oracle, and run parameters."""

    A1: UnitaryOperator
    A2: UnitaryOperator
    f: BooleanOracle
    epsilon: float
    shots: int
    seed: int

    def __post_init__(self):
        if self.A1.dim * self.A2.dim != 1 << self.f.n_bits:
            raise ValueError(
                f"A1 (dim {self.A1.dim}) and A2 (dim {self.A2.dim}) do not factor "
                f"a {self.f.n_bits}-qubit preparation"
            )
        if self.A1.dim < 2 or self.A2.dim < 2:
            raise ValueError("the prefix width j must satisfy 1 <= j < n")
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon!r}")
        if self.shots < 1:
            raise ValueError(f"shots must be positive, got {self.shots}")

    @property
    def n(self) -> int:
        return self.f.n_bits

    @property
    def j(self) -> int:
        return self.A1.dim.bit_length() - 1

    @property
    def n_nodes(self) -> int:
        return self.A1.dim


@dataclass(frozen=True)
class ProbabilityAccount:
    """Exact probability bookkeeping behind the witness-node guarantee.

    ``target_mass[k]`` / ``nontarget_mass[k]`` are the joint probabilities of
    drawing prefix k together with a marked / unmarked suffix from the
    prepared product state, and ``node_probability[k]`` is the conditional
    success probability of node k (defined 0 for nodes carrying no mass).
    The masses sum to 1, ``a`` equals the summed target mass, and at least
    one node satisfies node_probability[k] >= a.
    """

    a: float
    target_mass: tuple[float, ...]
    nontarget_mass: tuple[float, ...]
    node_probability: tuple[float, ...]


@dataclass(frozen=True, eq=False)
class NodeReport:
    """One node's exact success probability, samples, and verified hits."""

    node: int
    prefix: str
    exact_success: float
    histogram: Histogram
    outcome_probabilities: dict[str, float]
    verified_hits: tuple[str, ...]


@dataclass(frozen=True, eq=False)
class ExperimentReport:
    """Aggregate of a full partitioned run."""

    setup: DistributedSetup
    iterations: int
    account: ProbabilityAccount
    nodes: tuple[NodeReport, ...]
    combined_success_exact: float
    winner: tuple[int, str] | None


def probability_account(setup: DistributedSetup) -> ProbabilityAccount:
    """Partition the prepared state's probability mass by prefix and markedness."""
    amps = np.kron(setup.A1.entries[:, 0], setup.A2.entries[:, 0])
    probs = amps.real**2 + amps.imag**2
    width = 1 << (setup.n - setup.j)
    marked = setup.f.mask
    target_mass: list[float] = []
    nontarget_mass: list[float] = []
    node_probability: list[float] = []
    for k in range(setup.n_nodes):
        block = probs[k * width : (k + 1) * width]
        block_marked = marked[k * width : (k + 1) * width]
        t_mass = math.fsum(block[block_marked])
        n_mass = math.fsum(block[~block_marked])
        total = t_mass + n_mass
        target_mass.append(t_mass)
        nontarget_mass.append(n_mass)
        node_probability.append(t_mass / total if total > _MASS_FLOOR else 0.0)
    return ProbabilityAccount(
        a=math.fsum(target_mass),
        target_mass=tuple(target_mass),
        nontarget_mass=tuple(nontarget_mass),
        node_probability=tuple(node_probability),
    )


def node_iterations(a: float, epsilon: float) -> int:
    """Shared per-node iteration count ceil(ln(2/epsilon) / (2 sqrt(a)))."""
    if not 0.0 < a < 1.0:
        raise ValueError(f"a must lie in (0, 1), got {a!r}")
    return iterations_fixed_point(math.sqrt(a), epsilon)


def combined_success(p_list) -> float:
    """Aggregate success 1 - prod(1 - p_k), in log space while all p_k < 0.5."""
    probs: list[float] = []
    for p in p_list:
        p = float(p)
        if not -1e-12 <= p <= 1.0 + 1e-12:
            raise ValueError(f"probabilities must lie in [0, 1], got {p!r}")
        probs.append(min(max(p, 0.0), 1.0))
    if probs and max(probs) < 0.5:
        return -math.expm1(math.fsum(math.log1p(-p) for p in probs))
    remaining = 1.0
    for p in probs:
        remaining *= 1.0 - p
    return 1.0 - remaining


def verify_theorem3(setup: DistributedSetup) -> tuple[bool, int]:
    """Check that some node's conditional probability reaches the global one.

    Returns (ok, witness) where witness is the arg-max node (lowest index on
    ties) and ok is max_k node_probability[k] >= a - 1e-9. A False return is
    a genuine failure of the guarantee, never an expected outcome.
    """
    account = probability_account(setup)
    if account.a <= 0.0:
        raise ValueError("oracle marks no strings; the witness bound needs a > 0")
    witness = max(range(setup.n_nodes), key=account.node_probability.__getitem__)
    ok = account.node_probability[witness] >= account.a - _WITNESS_SLACK
    return ok, witness


def dqaa_run(setup: DistributedSetup, *, delta_override: float | None = None) -> ExperimentReport:
    """Run the full partitioned experiment and aggregate the node reports.

    Every node applies one shared schedule of length
    l = ceil(ln(2/epsilon) / (2 delta)) with delta = sqrt(a) computed exactly
    from the setup; the aggregate exact success is then at least
    1 - epsilon**2. ``delta_override`` replaces sqrt(a) for studying a
    mis-specified initial probability (no guarantee applies unless
    delta**2 is at most the witness node's conditional probability).

    Node k samples with seed ``setup.seed + k``. Nodes whose sub-function has
    no targets still run and sample; classical verification of every sampled
    string against the full oracle filters their outputs. The winner is the
    verified hit from the lowest node index, lexicographically smallest
    within that node.
    """
    account = probability_account(setup)
    if delta_override is None:
        if account.a <= 0.0:
            raise ValueError("oracle marks no strings; nothing to amplify")
        delta = min(math.sqrt(account.a), 1.0)
    else:
        delta = delta_override
    iterations = iterations_fixed_point(delta, setup.epsilon)
    schedule = phase_angles(iterations, setup.epsilon)
    nodes: list[NodeReport] = []
    for k, f_k in enumerate(split(setup.f, setup.j).subs):
        result = run_with_schedule(
            AmplificationSetup(setup.A2, f_k), schedule, setup.shots, setup.seed + k
        )
        prefix = bitstring(k, setup.j)
        probs = result.final_state.probabilities
        outcome_probabilities = {
            suffix: float(probs[int(suffix, 2)]) for suffix in result.histogram.counts
        }
        verified = tuple(
            sorted(
                prefix + suffix
                for suffix in result.histogram.counts
                if evaluate(setup.f, prefix + suffix)
            )
        )
        nodes.append(
            NodeReport(k, prefix, result.exact_success, result.histogram,
                       outcome_probabilities, verified)
        )
    combined = combined_success([node.exact_success for node in nodes])
    winner = None
    for node in nodes:
        if node.verified_hits:
            winner = (node.node, node.verified_hits[0])
            break
    return ExperimentReport(setup, iterations, account, tuple(nodes), combined, winner)


def report_to_dict(report: ExperimentReport) -> dict:
    """Plain-dict form of a report (schema version REPORT_VERSION)."""
    setup = report.setup
    targets = target_strings(setup.f)
    parts = split(setup.f, setup.j)
    node_dicts = []
    for node in report.nodes:
        hit_suffixes = [hit[setup.j :] for hit in node.verified_hits]
        hit_count = sum(node.histogram.counts[suffix] for suffix in hit_suffixes)
        node_dicts.append(
            {
                "node": node.node,
                "prefix": node.prefix,
                "targets_in_node": count_targets(parts.subs[node.node]),
                "exact_success": node.exact_success,
                "shots": node.histogram.shots,
                "histogram": dict(sorted(node.histogram.counts.items())),
                "outcome_probabilities": dict(sorted(node.outcome_probabilities.items())),
                "verified_hits": list(node.verified_hits),
                "hit_count": hit_count,
                "hit_frequency": hit_count / node.histogram.shots,
            }
        )
    return {
        "report_version": REPORT_VERSION,
        "kind": "distributed",
        "n": setup.n,
        "j": setup.j,
        "epsilon": setup.epsilon,
        "shots": setup.shots,
        "seed": setup.seed,
        "oracle": {
            "n_bits": setup.f.n_bits,
            "n_targets": len(targets),
            "targets": targets if len(targets) <= 1024 else None,
            "table_sha256": table_digest(setup.f),
        },
        "preparation": {
            "a1_dim": setup.A1.dim,
            "a1_sha256": setup.A1.digest(),
            "a2_dim": setup.A2.dim,
            "a2_sha256": setup.A2.digest(),
        },
        "iterations": report.iterations,
        "success_bound": 1.0 - setup.epsilon**2,
        "probability_account": {
            "a": report.account.a,
            "target_mass": list(report.account.target_mass),
            "nontarget_mass": list(report.account.nontarget_mass),
            "node_probability": list(report.account.node_probability),
        },
        "nodes": node_dicts,
        "combined_success_exact": report.combined_success_exact,
        "winner": (
            {"node": report.winner[0], "bitstring": report.winner[1]}
            if report.winner is not None
            else None
        ),
    }


def report_to_json(report: ExperimentReport) -> str:
    """Deterministic text serialization: sorted keys, no timestamps."""
    return json.dumps(report_to_dict(report), indent=2, sort_keys=True) + "\n"
