"""Experiment runner: configs, presets, artifact emission, exit codes."""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .amplification import (
    AmplificationSetup,
    RunResult,
    fixed_point_run,
    initial_success_probability,
    qaa_known,
)
from .distributed import REPORT_VERSION, DistributedSetup, dqaa_run, report_to_dict
from .oracle import (
    BooleanOracle,
    evaluate,
    from_predicate,
    from_targets,
    load_oracle,
    table_digest,
    target_strings,
)
from .plotting import save_histogram_figure
from .schedule import phase_angles, schedule_dump
from .statevector import QUBIT_CAP, ResourceLimitError, UnitaryOperator, hadamard, identity

EXIT_FOUND = 0
EXIT_NO_TARGET = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3

ALL_FORMATS = ("json", "csv", "txt", "png")
MODES = ("qaa", "fixed-point", "distributed")

ORACLE_PREDICATES = {
    "zeros": lambda bits: set(bits) == {"0"},
    "ones": lambda bits: set(bits) == {"1"},
    "odd-parity": lambda bits: bits.count("1") % 2 == 1,
}

PRESETS: dict[str, tuple[str, dict]] = {
    "paper-fig4": (
        "distributed Grover reference run: n=6, j=2, epsilon=0.3, "
        "targets {110110, 111111, 011001}, 1000 shots",
        dict(mode="distributed", n=6, j=2, targets=["110110", "111111", "011001"],
             algorithm="uniform-hadamard", epsilon=0.3, shots=1000, seed=7),
    ),
    "qaa-quarter": (
        "known-probability run at a=1/4: n=2, one marked string, single iteration",
        dict(mode="qaa", n=2, targets=["11"], algorithm="uniform-hadamard",
             shots=1000, seed=7),
    ),
    "fixed-point-demo": (
        "single-machine fixed-point run on the reference oracle: n=6, epsilon=0.3",
        dict(mode="fixed-point", n=6, targets=["110110", "111111", "011001"],
             algorithm="uniform-hadamard", epsilon=0.3, shots=1000, seed=7),
    ),
}


@dataclass
class RunConfig:
    """One experiment: mode, problem instance, parameters, output options.

    Exactly one oracle source must be set (targets, oracle_file, or
    oracle_name). The report echoes every field except out/formats, so
    identical experiments emitted into different directories byte-match.
    """

    mode: str = "distributed"
    n: int = 0
    j: int | None = None
    targets: list[str] | None = None
    oracle_file: str | None = None
    oracle_name: str | None = None
    algorithm: str = "uniform-hadamard"
    a_file: str | None = None
    a1_file: str | None = None
    a2_file: str | None = None
    epsilon: float = 0.3
    delta: float | None = None
    a: float | None = None
    allow_mismatched_a: bool = False
    shots: int = 1000
    seed: int = 1
    out: str = "out"
    formats: list[str] = field(default_factory=lambda: list(ALL_FORMATS))

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.n < 1:
            raise ValueError("n (qubit count) is required and must be positive")
        if self.n > QUBIT_CAP:
            raise ResourceLimitError(f"n = {self.n} exceeds the {QUBIT_CAP}-qubit cap")
        sources = sum(
            value is not None for value in (self.targets, self.oracle_file, self.oracle_name)
        )
        if sources != 1:
            raise ValueError(
                "exactly one oracle source is required: --targets, --oracle-file, or --oracle-name"
            )
        if self.mode == "distributed":
            if self.j is None:
                raise ValueError("distributed mode requires j (the prefix width)")
            if not 1 <= self.j < self.n:
                raise ValueError(f"j must satisfy 1 <= j < n, got j={self.j}, n={self.n}")
        if self.shots < 0 or (self.mode == "distributed" and self.shots < 1):
            raise ValueError(f"shots must be positive, got {self.shots}")
        bad = [fmt for fmt in self.formats if fmt not in ALL_FORMATS]
        if bad or not self.formats:
            raise ValueError(f"formats must be a non-empty subset of {ALL_FORMATS}, got {self.formats}")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def echo_dict(self) -> dict:
        """Config echo embedded in reports; output options excluded."""
        data = self.to_dict()
        data.pop("out")
        data.pop("formats")
        return data

    @classmethod
    def from_dict(cls, data: dict) -> RunConfig:
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        return cls(**data)


@dataclass
class EmittedArtifacts:
    """Everything a run wrote, plus the in-memory report."""

    out_dir: Path
    report: dict
    report_path: Path | None
    summary_path: Path | None
    table_paths: list[Path]
    figure_paths: list[Path]
    found_target: bool


def load_matrix(path) -> UnitaryOperator:
    """Unitary matrix file: JSON {"dim": d, "entries": [[[re, im], ...] x d] x d}."""
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not valid JSON: {exc}") from None
    try:
        dim = doc["dim"]
        entries = np.array(
            [[complex(cell[0], cell[1]) for cell in row] for row in doc["entries"]],
            dtype=np.complex128,
        )
    except (KeyError, TypeError, IndexError, ValueError):
        raise ValueError(f"{path}: malformed matrix file") from None
    if not isinstance(dim, int) or entries.shape != (dim, dim):
        raise ValueError(f"{path}: entries do not form a {dim}x{dim} matrix")
    return UnitaryOperator.from_matrix(entries)


def save_matrix(op: UnitaryOperator, path) -> None:
    rows = [[[cell.real, cell.imag] for cell in row] for row in op.entries]
    Path(path).write_text(json.dumps({"dim": op.dim, "entries": rows}) + "\n")


def build_oracle(config: RunConfig) -> BooleanOracle:
    if config.targets is not None:
        return from_targets(config.n, config.targets)
    if config.oracle_file is not None:
        oracle = load_oracle(config.oracle_file)
        if oracle.n_bits != config.n:
            raise ValueError(f"oracle file is on {oracle.n_bits} bits but n = {config.n}")
        return oracle
    predicate = ORACLE_PREDICATES.get(config.oracle_name)
    if predicate is None:
        raise ValueError(
            f"unknown oracle name {config.oracle_name!r}; known: {sorted(ORACLE_PREDICATES)}"
        )
    return from_predicate(config.n, predicate)


def build_preparation(config: RunConfig) -> UnitaryOperator:
    if config.a_file is not None:
        op = load_matrix(config.a_file)
        if op.dim != 1 << config.n:
            raise ValueError(f"matrix file dim {op.dim} does not match n = {config.n}")
        return op
    if config.algorithm == "uniform-hadamard":
        return hadamard(config.n)
    if config.algorithm == "identity":
        return identity(config.n)
    raise ValueError(
        f"unknown algorithm {config.algorithm!r}; built-ins: uniform-hadamard, identity"
    )


def build_preparation_pair(config: RunConfig) -> tuple[UnitaryOperator, UnitaryOperator]:
    if (config.a1_file is None) != (config.a2_file is None):
        raise ValueError("distributed matrix files require both --a1-file and --a2-file")
    if config.a1_file is not None:
        a1, a2 = load_matrix(config.a1_file), load_matrix(config.a2_file)
        if a1.dim != 1 << config.j or a2.dim != 1 << (config.n - config.j):
            raise ValueError(
                f"factor dims ({a1.dim}, {a2.dim}) do not match j={config.j}, n={config.n}"
            )
        return a1, a2
    if config.algorithm == "uniform-hadamard":
        return hadamard(config.j), hadamard(config.n - config.j)
    if config.algorithm == "identity":
        return identity(config.j), identity(config.n - config.j)
    raise ValueError(
        f"unknown algorithm {config.algorithm!r}; built-ins: uniform-hadamard, identity"
    )


def _single_run_report(kind: str, config: RunConfig, setup: AmplificationSetup,
                       result: RunResult, extra: dict) -> dict:
    counts = dict(result.histogram.counts) if result.histogram else {}
    probs = result.final_state.probabilities
    verified = sorted(bits for bits in counts if evaluate(setup.f, bits))
    hit_count = sum(counts[bits] for bits in verified)
    report = {
        "report_version": REPORT_VERSION,
        "kind": kind,
        "config": config.echo_dict(),
        "n": setup.f.n_bits,
        "shots": config.shots,
        "seed": config.seed,
        "oracle": {
            "n_bits": setup.f.n_bits,
            "n_targets": len(target_strings(setup.f)),
            "targets": target_strings(setup.f),
            "table_sha256": table_digest(setup.f),
        },
        "preparation": {"dim": setup.A.dim, "sha256": setup.A.digest()},
        "iterations": result.iterations,
        "exact_success": result.exact_success,
        "histogram": dict(sorted(counts.items())),
        "outcome_probabilities": {
            bits: float(probs[int(bits, 2)]) for bits in sorted(counts)
        },
        "verified_hits": verified,
        "hit_count": hit_count,
        "hit_frequency": hit_count / config.shots if config.shots else 0.0,
        "winner": verified[0] if verified else None,
    }
    report.update(extra)
    return report


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def _write_histogram_csv(path: Path, counts: dict[str, int],
                         probabilities: dict[str, float]) -> None:
    lines = ["bitstring,count,exact_probability"]
    for bits in sorted(counts):
        lines.append(f"{bits},{counts[bits]},{_fmt(probabilities.get(bits, 0.0))}")
    path.write_text("\n".join(lines) + "\n")


def _write_nodes_csv(path: Path, report: dict) -> None:
    lines = ["node,prefix,targets_in_node,node_probability,exact_success,shots,hit_count,hit_frequency"]
    node_probability = report["probability_account"]["node_probability"]
    for node in report["nodes"]:
        lines.append(
            f"{node['node']},{node['prefix']},{node['targets_in_node']},"
            f"{_fmt(node_probability[node['node']])},{_fmt(node['exact_success'])},"
            f"{node['shots']},{node['hit_count']},{_fmt(node['hit_frequency'])}"
        )
    path.write_text("\n".join(lines) + "\n")


def _distributed_summary(report: dict) -> str:
    winner = report["winner"]
    lines = [
        "distributed amplitude amplification",
        f"n={report['n']} j={report['j']} epsilon={_fmt(report['epsilon'])} "
        f"shots={report['shots']} seed={report['seed']}",
        f"oracle: {report['oracle']['n_targets']} target(s): "
        + " ".join(report["oracle"]["targets"] or []),
        f"initial success probability a = {_fmt(report['probability_account']['a'])}",
        f"iterations per node l = {report['iterations']}",
        f"success bound 1 - epsilon^2 = {_fmt(report['success_bound'])}",
        f"combined exact success = {_fmt(report['combined_success_exact'])}",
        "winner: "
        + (f"node {winner['node']} -> {winner['bitstring']}" if winner else "none"),
        "",
        "node  prefix  targets  a_k             P_k             hits/shots  frequency",
    ]
    node_probability = report["probability_account"]["node_probability"]
    for node in report["nodes"]:
        lines.append(
            f"{node['node']:<5d} {node['prefix']:<7s} {node['targets_in_node']:<8d} "
            f"{_fmt(node_probability[node['node']]):<15s} {_fmt(node['exact_success']):<15s} "
            f"{node['hit_count']}/{node['shots']:<9d} {_fmt(node['hit_frequency'])}"
        )
    return "\n".join(lines) + "\n"


def _single_summary(report: dict) -> str:
    lines = [
        f"{report['kind']} amplitude amplification",
        f"n={report['n']} shots={report['shots']} seed={report['seed']}",
        f"oracle: {report['oracle']['n_targets']} target(s): "
        + " ".join(report["oracle"]["targets"] or []),
    ]
    if report["kind"] == "qaa":
        lines.append(f"known initial probability a = {_fmt(report['a'])}")
        lines.append(f"guaranteed success bound max(1-a, a) = {_fmt(report['success_bound'])}")
    else:
        lines.append(f"initial probability a = {_fmt(report['a'])}")
        lines.append(
            f"delta = {_fmt(report['delta'])} epsilon = {_fmt(report['epsilon'])}"
        )
        lines.append(f"success bound 1 - epsilon^2 = {_fmt(report['success_bound'])}")
    lines += [
        f"iterations = {report['iterations']}",
        f"exact success = {_fmt(report['exact_success'])}",
        f"sampled hits = {report['hit_count']}/{report['shots']} "
        f"(frequency {_fmt(report['hit_frequency'])})",
        "winner: " + (report["winner"] or "none"),
    ]
    return "\n".join(lines) + "\n"


def run(config: RunConfig) -> EmittedArtifacts:
    """Execute the configured experiment and write every requested artifact."""
    config.validate()
    oracle = build_oracle(config)

    if config.mode == "distributed":
        a1, a2 = build_preparation_pair(config)
        setup = DistributedSetup(a1, a2, oracle, config.epsilon, config.shots, config.seed)
        experiment = dqaa_run(setup, delta_override=config.delta)
        report = report_to_dict(experiment)
        report["config"] = config.echo_dict()
        found = experiment.winner is not None
    else:
        preparation = build_preparation(config)
        setup = AmplificationSetup(preparation, oracle)
        if config.mode == "qaa":
            a = config.a if config.a is not None else initial_success_probability(setup)
            result = qaa_known(setup, a, config.shots, config.seed,
                               allow_mismatch=config.allow_mismatched_a)
            extra = {"a": a, "success_bound": max(1.0 - a, a)}
            report = _single_run_report("qaa", config, setup, result, extra)
        else:
            a0 = initial_success_probability(setup)
            if config.delta is not None:
                delta = config.delta
            elif a0 > 0.0:
                delta = min(math.sqrt(a0), 1.0)
            else:
                raise ValueError(
                    "initial success probability is 0; supply --delta to force a run"
                )
            result = fixed_point_run(setup, delta, config.epsilon, config.shots, config.seed)
            extra = {
                "a": a0,
                "delta": delta,
                "epsilon": config.epsilon,
                "success_bound": 1.0 - config.epsilon**2,
            }
            report = _single_run_report("fixed-point", config, setup, result, extra)
        found = bool(report["verified_hits"])

    out_dir = Path(config.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "config.json").write_text(
        json.dumps(config.to_dict(), indent=2, sort_keys=True) + "\n"
    )

    report_path = None
    if "json" in config.formats:
        report_path = out_dir / "report.json"
        report_path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")

    table_paths: list[Path] = []
    figure_paths: list[Path] = []
    if config.mode == "distributed":
        if "csv" in config.formats:
            nodes_path = out_dir / "nodes.csv"
            _write_nodes_csv(nodes_path, report)
            table_paths.append(nodes_path)
            for node in report["nodes"]:
                path = out_dir / f"node_{node['node']}_histogram.csv"
                _write_histogram_csv(path, node["histogram"], node["outcome_probabilities"])
                table_paths.append(path)
        if "png" in config.formats:
            for node in report["nodes"]:
                path = out_dir / f"node_{node['node']}_histogram.png"
                title = (
                    f"node {node['node']} (prefix {node['prefix']}), "
                    f"P = {node['exact_success']:.6g}"
                )
                save_histogram_figure(path, node["histogram"], node["shots"],
                                      node["outcome_probabilities"], title)
                figure_paths.append(path)
        summary_text = _distributed_summary(report)
    else:
        if "csv" in config.formats and report["histogram"]:
            path = out_dir / "histogram.csv"
            _write_histogram_csv(path, report["histogram"], report["outcome_probabilities"])
            table_paths.append(path)
        if "png" in config.formats and report["histogram"]:
            path = out_dir / "histogram.png"
            title = f"{report['kind']} run, P = {report['exact_success']:.6g}"
            save_histogram_figure(path, report["histogram"], report["shots"],
                                  report["outcome_probabilities"], title)
            figure_paths.append(path)
        summary_text = _single_summary(report)

    summary_path = None
    if "txt" in config.formats:
        summary_path = out_dir / "summary.txt"
        summary_path.write_text(summary_text)

    return EmittedArtifacts(out_dir, report, report_path, summary_path,
                            table_paths, figure_paths, found)


def emit_schedule(l: int, epsilon: float, out: str | None) -> Path | None:
    """Write (or print) the schedule dump for the given length and epsilon."""
    text = schedule_dump(phase_angles(l, epsilon))
    if out is None:
        sys.stdout.write(text)
        return None
    path = Path(out)
    if path.is_dir():
        path = path / f"schedule_l{l}.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dqaa",
        description="Amplitude amplification experiment runner (dense statevector simulation).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a configured experiment and emit reports")
    run_p.add_argument("--preset", choices=sorted(PRESETS), help="start from a built-in config")
    run_p.add_argument("--config", help="JSON config file; flags override its fields")
    run_p.add_argument("--mode", choices=MODES)
    run_p.add_argument("--n", type=int, help="qubit count")
    run_p.add_argument("--j", type=int, help="prefix width (distributed mode)")
    run_p.add_argument("--epsilon", type=float)
    run_p.add_argument("--delta", type=float)
    run_p.add_argument("--a", type=float, help="known initial probability (qaa mode)")
    run_p.add_argument("--targets", help="comma-separated marked bitstrings")
    run_p.add_argument("--oracle-file", help="oracle JSON file (targets or hex table)")
    run_p.add_argument("--oracle-name", choices=sorted(ORACLE_PREDICATES))
    run_p.add_argument("--algorithm", help="built-in preparation: uniform-hadamard or identity")
    run_p.add_argument("--a-file", help="preparation matrix file (single-machine modes)")
    run_p.add_argument("--a1-file", help="prefix-factor matrix file (distributed mode)")
    run_p.add_argument("--a2-file", help="suffix-factor matrix file (distributed mode)")
    run_p.add_argument("--shots", type=int)
    run_p.add_argument("--seed", type=int)
    run_p.add_argument("--out", help="output directory")
    run_p.add_argument("--format", help=f"comma-separated subset of {','.join(ALL_FORMATS)}")
    run_p.add_argument("--allow-mismatched-a", action="store_true",
                       help="run qaa mode even when --a disagrees with the exact value")

    sched_p = sub.add_parser("schedule", help="emit a fixed-point phase schedule dump")
    sched_p.add_argument("--l", type=int, required=True)
    sched_p.add_argument("--epsilon", type=float, required=True)
    sched_p.add_argument("--out", help="output file or directory (stdout when omitted)")

    sub.add_parser("preset", help="list built-in experiment presets")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    data: dict = {}
    if args.preset:
        data.update(PRESETS[args.preset][1])
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except json.JSONDecodeError as exc:
            raise ValueError(f"{args.config}: not valid JSON: {exc}") from None
        if not isinstance(loaded, dict):
            raise ValueError(f"{args.config}: config file must be a JSON object")
        data.update(loaded)
    overrides = {
        "mode": args.mode,
        "n": args.n,
        "j": args.j,
        "epsilon": args.epsilon,
        "delta": args.delta,
        "a": args.a,
        "targets": args.targets.split(",") if args.targets else None,
        "oracle_file": args.oracle_file,
        "oracle_name": args.oracle_name,
        "algorithm": args.algorithm,
        "a_file": args.a_file,
        "a1_file": args.a1_file,
        "a2_file": args.a2_file,
        "shots": args.shots,
        "seed": args.seed,
        "out": args.out,
        "formats": args.format.split(",") if args.format else None,
    }
    if args.targets or args.oracle_file or args.oracle_name:
        # an explicit oracle flag replaces whatever source the preset/config set
        for key in ("targets", "oracle_file", "oracle_name"):
            data.pop(key, None)
    data.update({k: v for k, v in overrides.items() if v is not None})
    if args.allow_mismatched_a:
        data["allow_mismatched_a"] = True
    return RunConfig.from_dict(data)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            artifacts = run(config_from_args(args))
            return EXIT_FOUND if artifacts.found_target else EXIT_NO_TARGET
        if args.command == "schedule":
            emit_schedule(args.l, args.epsilon, args.out)
            return EXIT_FOUND
        for name in sorted(PRESETS):
            print(f"{name}: {PRESETS[name][0]}")
        return EXIT_FOUND
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
