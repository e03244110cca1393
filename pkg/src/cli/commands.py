"""
Command-line front end.

Subcommands:
    run     amplified INTERACTIVEPROOF run from a config file
    audit   self-test audit of a strategy on a graph
    oracle  best deterministic classical strategy against TEST
    sweep   acceptance estimates over a (q, eps, theta) grid

Machine-readable records go to stdout (one JSON object per line); the
human summary goes to stderr. Exit codes: 0 accept/pass, 1 reject/fail,
2 usage or configuration error, 3 strategy inapplicable to the audit.

Usage:
    uv run graphstate-verifier run --config configs/k3_honest.json --emit-trials out/trials.jsonl
    uv run graphstate-verifier audit --graph configs/k3.json --strategy configs/perturbed.json
"""

from pathlib import Path
from typing import Optional, Sequence, Union
import argparse
import logging
import sys
import time

from pydantic import BaseModel, ValidationError

from src.core.config import DEFAULT_WORKERS, LOG_DIR, LOG_KEEP_RECENT
from src.core.errors import (
    CapacityExceeded,
    ConfigError,
    InapplicableStrategy,
    PatternError,
    TriangleCoverError,
)
from src.core.utils import setup_logging
from src.graph.io import graph_from_spec, load_graph
from src.graph.lattice import Graph
from src.mbqc.io import load_pattern, pattern_from_spec
from src.mbqc.pattern import MeasurementPattern, reachable_symbols, validate_pattern
from src.models.records import (
    AuditReport,
    Decision,
    OracleReport,
    RunSummary,
    SweepRecord,
    WitnessEntry,
)
from src.models.specs import GraphSpec, ProtocolConfig, SweepConfig
from src.observability.collector import RecordCollector, dump_record
from src.observability.statistics import clopper_pearson
from src.observability.summary import build_run_summary
from src.protocol.settings import build_settings, exact_test_acceptance, uncovered_queries
from src.protocol.verifier import (
    BranchAcceptance,
    amplify_gap,
    calibrate,
    compute_threshold,
    estimate_calculate_acceptance,
    hoeffding_trials,
    optimize_q,
    run_trials,
)
from src.provers.io import load_strategy, strategy_from_spec
from src.provers.oracle import optimal_classical_acceptance
from src.provers.strategies import ProverStrategy, honest_strategy, noisy_strategy, perturbed_strategy
from src.selftest.audit import run_audit

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_REJECT = 1
EXIT_USAGE = 2
EXIT_INAPPLICABLE = 3


def _stderr(message: str = "") -> None:
    print(message, file=sys.stderr)


def _emit(record: BaseModel) -> None:
    sys.stdout.write(dump_record(record) + "\n")
    sys.stdout.flush()


# =============================================================================
# Config loading
# =============================================================================

def _read_config(path: Union[str, Path], model: type[BaseModel]) -> BaseModel:
    path = Path(path)
    try:
        return model.model_validate_json(path.read_text())
    except FileNotFoundError as e:
        raise ConfigError(f"Config file not found: {path}") from e
    except OSError as e:
        raise ConfigError(f"Cannot read config file {path}: {e}") from e
    except ValidationError as e:
        raise ConfigError(f"Invalid config {path}: {e}") from e


def _resolve(ref: str, base: Path) -> Path:
    path = Path(ref)
    return path if path.is_absolute() else base / path


def _graph_ref(ref: Union[GraphSpec, str], base: Path) -> Graph:
    if isinstance(ref, str):
        return load_graph(_resolve(ref, base))
    try:
        return graph_from_spec(ref)
    except ValueError as e:
        raise ConfigError(f"Invalid inline graph: {e}") from e


def _strategy_ref(ref, base: Path, g: Graph) -> ProverStrategy:
    if isinstance(ref, str):
        return load_strategy(_resolve(ref, base), g)
    return strategy_from_spec(ref, g)


def _pattern_ref(ref, base: Path, g: Graph) -> MeasurementPattern:
    pattern = load_pattern(_resolve(ref, base), g) if isinstance(ref, str) else pattern_from_spec(ref, g)
    diagnostics = validate_pattern(pattern, g)
    if diagnostics:
        raise PatternError(f"Pattern {pattern.name!r} is invalid: " + "; ".join(diagnostics))
    return pattern


def _warn_if_distinguishable(settings, pattern: MeasurementPattern, g: Graph) -> None:
    missing = uncovered_queries(settings, reachable_symbols(pattern, g))
    if missing:
        logger.warning(
            f"Pattern {pattern.name!r} sends queries no TEST setting sends: "
            f"{[(v, str(s)) for v, s in missing]}; provers could tell the branches apart"
        )


# =============================================================================
# Subcommands
# =============================================================================

def cmd_run(args: argparse.Namespace) -> int:
    """AMPLIFYGAP from a config file; exit 0 on ACCEPT and 1 on REJECT."""
    config_path = Path(args.config)
    cfg: ProtocolConfig = _read_config(config_path, ProtocolConfig)  # type: ignore[assignment]
    overrides = {
        "master_seed": args.seed,
        "trials": args.trials,
        "q": args.q,
        "threshold_rule": args.threshold,
        "workers": args.workers,
    }
    try:
        cfg = ProtocolConfig.model_validate({
            **cfg.model_dump(),
            **{k: v for k, v in overrides.items() if v is not None},
        })
    except ValidationError as e:
        raise ConfigError(f"Invalid command-line override: {e}") from e

    base = config_path.parent
    g = _graph_ref(cfg.graph, base)
    strategy = _strategy_ref(cfg.strategy, base, g)
    pattern = _pattern_ref(cfg.pattern, base, g)
    settings = build_settings(g, cfg.fourth_family_sign)
    _warn_if_distinguishable(settings, pattern, g)

    started = time.perf_counter()
    calibration = calibrate(g, settings, pattern, cfg.q, cfg.c_ip, cfg.s_ip, cfg.master_seed)
    if cfg.trials is not None:
        trials = cfg.trials
    elif calibration.gap > 0:
        trials = hoeffding_trials(calibration.gap, cfg.confidence)
    else:
        raise ConfigError(
            f"No completeness/soundness gap (c_ip = {calibration.c_ip:.4f}, s_ip = {calibration.s_ip:.4f}); "
            "set 'trials' explicitly"
        )

    if cfg.threshold is not None:
        threshold, rule = cfg.threshold, "explicit"
        if threshold > trials:
            raise ConfigError(f"threshold {threshold} exceeds trials {trials}")
    else:
        threshold, rule = compute_threshold(trials, calibration.c_ip, calibration.s_ip, cfg.threshold_rule), cfg.threshold_rule
    logger.info(f"Running {trials} trials against {strategy.label}, threshold {threshold:.3f} ({rule})")

    result = amplify_gap(g, settings, pattern, strategy, cfg.q, trials, threshold, cfg.master_seed, cfg.workers)
    elapsed = time.perf_counter() - started

    if args.emit_trials:
        collector = RecordCollector()
        collector.extend(result.records)
        collector.save(args.emit_trials)

    summary = build_run_summary(
        result,
        calibration,
        threshold_rule=rule,
        master_seed=cfg.master_seed,
        config={**cfg.model_dump(mode="json"), "trials": trials},
        wall_time_s=elapsed,
    )
    _emit(summary)
    _print_run_summary(summary, strategy)
    return EXIT_OK if summary.decision is Decision.ACCEPT else EXIT_REJECT


def _print_run_summary(summary: RunSummary, strategy: ProverStrategy) -> None:
    _stderr(f"\n{'=' * 60}")
    _stderr(f"{summary.decision.value}  ({strategy.label})")
    _stderr(f"{'=' * 60}")
    _stderr(f"accepted   {summary.accepted}/{summary.trials}   threshold {summary.threshold:.2f} ({summary.threshold_rule})")
    _stderr(f"acceptance {summary.acceptance:.4f}  95% CI [{summary.ci_low:.4f}, {summary.ci_high:.4f}]")
    _stderr(f"c_ip {summary.c_ip:.4f}   s_ip {summary.s_ip:.4f}")
    for branch, count in summary.branch_counts.items():
        _stderr(f"  {branch.value:<10} {summary.branch_accepted[branch]:>7}/{count:<7}")
    for row in summary.families:
        if row.trials:
            _stderr(f"  {row.family:<10} {row.rate:.4f}  [{row.ci_low:.4f}, {row.ci_high:.4f}]  n={row.trials}")
    _stderr(f"seed {summary.master_seed}   {summary.wall_time_s:.2f}s")


def cmd_audit(args: argparse.Namespace) -> int:
    """Self-test audit; exit 0 iff every residual is within tolerance, 3 if inapplicable."""
    g = load_graph(args.graph)
    strategy = load_strategy(args.strategy, g)
    settings = build_settings(g, args.fourth_family_sign)
    report = run_audit(strategy, g, settings, tolerance=args.tolerance, shots=args.shots, seed=args.seed or 0)
    _emit(report)
    _print_audit(report)
    if not report.applicable:
        _stderr(f"inapplicable: {report.inapplicable_reason}")
        return EXIT_INAPPLICABLE
    return EXIT_OK if report.passed else EXIT_REJECT


def _print_audit(report: AuditReport) -> None:
    _stderr(f"\nAudit of {report.strategy} on {report.graph} ({report.mode}, tol {report.tolerance:g})")
    _stderr(f"{'-' * 60}")
    _stderr(f"max expectation deviation  {report.max_deviation:.3e}")
    for row in report.settings:
        if not row.within_tolerance:
            _stderr(f"  {row.setting:<22} honest {row.honest_expectation:+.5f}  measured {row.measured:+.5f}")
    _stderr(f"{'vertex':>6} {'anticomm':>12} {'D+':>12} {'D-':>12}")
    for d in report.d_residuals:
        _stderr(f"{d.vertex:>6} {report.anticommutation[d.vertex]:>12.3e} {d.plus:>12.3e} {d.minus:>12.3e}")
    for d in report.derivations:
        value = f"{d.residual:.3e}" if d.conclusive else f"inconclusive: {d.reason}"
        _stderr(f"  derivation {d.triangle} pivot {d.pivot}: {value}")
    if report.extraction_fidelity is not None:
        _stderr(f"extraction fidelity {report.extraction_fidelity:.12f}")
        worst = min((r.fidelity for r in report.logical_action), default=1.0)
        _stderr(f"worst logical-action fidelity {worst:.12f}")
    _stderr("PASS" if report.passed else "FAIL")


def cmd_oracle(args: argparse.Namespace) -> int:
    """Exhaustive classical optimum against the TEST family."""
    g = load_graph(args.graph)
    settings = build_settings(g, args.fourth_family_sign)
    result = optimal_classical_acceptance(g, settings)
    honest = exact_test_acceptance(honest_strategy(g), settings)
    report = OracleReport(
        graph=repr(g),
        settings=len(settings),
        accepted_settings=result.accepted_settings,
        classical_optimum=result.probability,
        honest_test_acceptance=honest,
        gap=honest - result.probability,
        witness=[WitnessEntry(vertex=v, symbol=s, value=val) for (v, s), val in result.witness.items()],
    )
    _emit(report)
    _stderr(f"\n{g}: {len(settings)} settings")
    _stderr(f"classical optimum  {result.accepted_settings}/{len(settings)} = {result.probability:.6f}")
    _stderr(f"honest TEST        {honest:.6f}")
    _stderr(f"gap                {report.gap:.6f}")
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    """One SweepRecord per (q, strategy) cell, in grid order."""
    config_path = Path(args.config)
    cfg: SweepConfig = _read_config(config_path, SweepConfig)  # type: ignore[assignment]
    master_seed = cfg.master_seed if args.seed is None else args.seed
    trials = cfg.trials if args.trials is None else args.trials
    workers = cfg.workers if args.workers is None else args.workers
    if trials < 1 or workers < 1:
        raise ConfigError(f"trials and workers must be positive, got {trials} and {workers}")

    base = config_path.parent
    g = _graph_ref(cfg.graph, base)
    pattern = _pattern_ref(cfg.pattern, base, g)
    settings = build_settings(g, cfg.fourth_family_sign)

    cells: list[tuple[ProverStrategy, Optional[float], Optional[float]]] = [(honest_strategy(g), None, None)]
    cells += [(noisy_strategy(g, eps), eps, None) for eps in cfg.eps_grid]
    cells += [(perturbed_strategy(g, theta), None, theta) for theta in cfg.theta_grid]
    cells += [(strategy_from_spec(spec, g), None, None) for spec in cfg.adversaries]

    exact_test = {id(s): exact_test_acceptance(s, settings) for s, _, _ in cells}
    for q in cfg.q_grid:
        honest_rate = None
        for strategy, eps, theta in cells:
            records = run_trials(g, settings, pattern, strategy, q, trials, master_seed, workers)
            accepted = sum(r.accept for r in records)
            rate = accepted / trials
            if honest_rate is None:
                honest_rate = rate
            low, high = clopper_pearson(accepted, trials)
            _emit(SweepRecord(
                q=q, strategy=strategy.label, kind=strategy.kind, eps=eps, theta=theta,
                trials=trials, accepted=accepted, acceptance=rate, ci_low=low, ci_high=high,
                exact_test_acceptance=exact_test[id(strategy)],
                honest_acceptance=honest_rate, gap=honest_rate - rate,
            ))

    if len(cells) > 1:
        def branches(strategy: ProverStrategy) -> BranchAcceptance:
            calc = estimate_calculate_acceptance(g, pattern, strategy, trials, master_seed)
            return BranchAcceptance(calculate=calc, test=exact_test[id(strategy)])

        honest_cell = cells[0][0]
        choice = optimize_q(
            branches(honest_cell),
            {s.label: branches(s) for s, _, _ in cells[1:]},
            cfg.q_grid,
        )
        _stderr(f"best q on the grid: {choice.q:g} (worst-case gap {choice.gap:.4f})")
    return EXIT_OK


# =============================================================================
# Parser
# =============================================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphstate-verifier",
        description="Simulate and verify the many-prover graph-state interactive proof",
    )
    parser.add_argument("--log-dir", type=str, default=LOG_DIR, help="Directory for log files")
    subparsers = parser.add_subparsers(dest="command", required=True)

    run = subparsers.add_parser("run", help="Amplified INTERACTIVEPROOF run")
    run.add_argument("--config", type=str, required=True, help="Path to a run config (JSON)")
    run.add_argument("--seed", type=int, help="Override master_seed")
    run.add_argument("--trials", type=int, help="Override the number of trials N")
    run.add_argument("--q", type=float, help="Override the CALCULATE probability q")
    run.add_argument(
        "--threshold",
        type=str,
        choices=["midpoint", "paper-literal"],
        help="Threshold rule: midpoint N(c+s)/2 or the literal N(c-s)/2",
    )
    run.add_argument("--emit-trials", type=str, help="Write every TrialRecord to this JSONL file")
    run.add_argument("--workers", type=int, help=f"Worker threads (default {DEFAULT_WORKERS})")
    run.set_defaults(handler=cmd_run)

    audit = subparsers.add_parser("audit", help="Self-test audit of a strategy")
    audit.add_argument("--graph", type=str, required=True, help="Path to a graph spec (JSON)")
    audit.add_argument("--strategy", type=str, required=True, help="Path to a strategy spec (JSON)")
    audit.add_argument("--tolerance", type=float, default=1e-8, help="Residual tolerance (default: 1e-8)")
    audit.add_argument("--shots", type=int, help="Estimate expectations from this many sampled sessions")
    audit.add_argument("--seed", type=int, help="Seed for --shots sampling")
    audit.add_argument("--fourth-family-sign", choices=["default", "paper-literal"], default="default")
    audit.set_defaults(handler=cmd_audit)

    oracle = subparsers.add_parser("oracle", help="Exhaustive classical optimum")
    oracle.add_argument("--graph", type=str, required=True, help="Path to a graph spec (JSON)")
    oracle.add_argument("--fourth-family-sign", choices=["default", "paper-literal"], default="default")
    oracle.set_defaults(handler=cmd_oracle)

    sweep = subparsers.add_parser("sweep", help="Acceptance over a parameter grid")
    sweep.add_argument("--config", type=str, required=True, help="Path to a sweep config (JSON)")
    sweep.add_argument("--seed", type=int, help="Override master_seed")
    sweep.add_argument("--trials", type=int, help="Override trials per cell")
    sweep.add_argument("--workers", type=int, help="Worker threads")
    sweep.set_defaults(handler=cmd_sweep)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    setup_logging(Path(args.log_dir), keep_recent=LOG_KEEP_RECENT)
    try:
        return args.handler(args)
    except InapplicableStrategy as e:
        _stderr(f"error: {e}")
        return EXIT_INAPPLICABLE
    except (ConfigError, CapacityExceeded, PatternError, TriangleCoverError, FileNotFoundError) as e:
        logger.error(f"{args.command} failed: {e}")
        _stderr(f"error: {e}")
        return EXIT_USAGE
    except (ValueError, OSError) as e:
        # exit 1 is reserved for REJECT
        logger.exception(f"{args.command} failed on invalid input")
        _stderr(f"error: {e}")
        return EXIT_USAGE
