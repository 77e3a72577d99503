"""Command-line front end: run scenarios, emit artifacts, calibrate thresholds.

Exit codes: 0 success, 1 bad scenario or configuration, 2 internal error.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from . import report, scenario_files, scenarios
from .exceptions import ScenarioError
from .simulate import SimulationResult, run_scenario
from .warning import DEFAULT_BASELINE_THRESHOLD, DEFAULT_NOVEL_THRESHOLD

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INTERNAL = 2

# Calibration picks thresholds this many times the loudest error-free
# signal seen per channel; see `calibrate_thresholds`.
CALIBRATION_SAFETY = 3.0


@dataclass(frozen=True)
class RunConfig:
    """Everything the run command needs."""

    scenario: str                   # builtin name or scenario file path
    out_dir: Optional[str] = None   # default: out/<scenario-name>
    emit_plots: bool = False
    emit_riskmaps: bool = False
    novel_threshold: Optional[float] = None
    baseline_threshold: Optional[float] = None
    seed: Optional[int] = None      # reserved; simulations are deterministic


def resolve_scenario(source: str) -> scenarios.ScenarioSpec:
    """A builtin name, else a path to a scenario file."""
    try:
        return scenarios.builtin_scenario(source)
    except KeyError:
        pass
    if os.path.exists(source):
        return scenario_files.load_scenario(source)
    known = ", ".join(s.name for s in scenarios.builtin_scenarios())
    raise ScenarioError(
        f"{source!r} is neither a builtin scenario nor a readable file; "
        f"builtins: {known}")


def _checked(spec: scenarios.ScenarioSpec) -> scenarios.ScenarioSpec:
    problems = scenarios.validate(spec)
    if problems:
        raise ScenarioError(
            f"scenario {spec.name!r} is invalid:\n  " + "\n  ".join(problems))
    return spec


def _run_with_artifacts(spec: scenarios.ScenarioSpec, out_dir: str,
                        config: RunConfig) -> SimulationResult:
    os.makedirs(out_dir, exist_ok=True)
    warning_config = scenarios.warning_config(
        spec, novel_threshold=config.novel_threshold,
        baseline_threshold=config.baseline_threshold)
    result = run_scenario(spec, config=warning_config,
                          collect_riskmaps=config.emit_riskmaps)
    report.write_trace_csv(result, os.path.join(out_dir, "trace.csv"))
    report.write_summary(result, os.path.join(out_dir, "summary.txt"))
    if config.emit_riskmaps:
        report.write_riskmaps(result, out_dir)
    if config.emit_plots:
        report.plot_warning_signal(result, os.path.join(out_dir, "warning_signal.svg"))
        report.plot_velocity_accel(result, os.path.join(out_dir, "velocity_accel.svg"))
    return result


def run(config: RunConfig) -> int:
    spec = _checked(resolve_scenario(config.scenario))
    out_dir = config.out_dir or os.path.join("out", spec.name)
    result = _run_with_artifacts(spec, out_dir, config)
    for line in report.summary_lines(result):
        print(line)
    print(f"artifacts in {out_dir}")
    return EXIT_OK


def compare_all(out_dir: str = "out/compare") -> List[List[str]]:
    """Run every builtin scenario; write per-scenario artifacts and the
    comparison CSV; return the comparison rows."""
    os.makedirs(out_dir, exist_ok=True)
    rows = []
    for spec in scenarios.builtin_scenarios():
        try:
            result = _run_with_artifacts(
                _checked(spec), os.path.join(out_dir, spec.name),
                RunConfig(scenario=spec.name))
        except Exception as exc:
            raise RuntimeError(f"scenario {spec.name!r} failed: {exc}") from exc
        rows.append(report.comparison_row(
            spec.name, result.warning_times(), result.collision_time))
    report.write_comparison_csv(rows, os.path.join(out_dir, "comparison.csv"))
    return rows


@dataclass(frozen=True)
class CalibrationOutcome:
    """Per-scenario signal ceilings and the thresholds derived from them."""

    per_scenario: Tuple[Tuple[str, float, float], ...]  # (name, novel_max, baseline_max)
    novel_ceiling: float
    baseline_ceiling: float
    safety: float

    @property
    def novel_threshold(self) -> float:
        return self.safety * self.novel_ceiling

    @property
    def baseline_threshold(self) -> float:
        return self.safety * self.baseline_ceiling


def calibrate_thresholds(safety: float = CALIBRATION_SAFETY) -> CalibrationOutcome:
    """Derive warning thresholds from the error-free corpus.

    Each corpus scenario is driven without driver errors, so any signal it
    produces is noise a deployed threshold must sit above. The threshold
    per channel is `safety` times the loudest such signal.
    """
    per_scenario = []
    for spec in scenarios.calibration_scenarios():
        result = run_scenario(spec)
        novel_max = max(s.w_novel for s in result.trace.samples)
        baseline_max = max(s.w_baseline for s in result.trace.samples)
        per_scenario.append((spec.name, float(novel_max), float(baseline_max)))
    novel_ceiling = max(m for _, m, _ in per_scenario)
    baseline_ceiling = max(m for _, _, m in per_scenario)
    return CalibrationOutcome(
        per_scenario=tuple(per_scenario),
        novel_ceiling=float(novel_ceiling),
        baseline_ceiling=float(baseline_ceiling),
        safety=float(safety),
    )


def calibration_report(outcome: CalibrationOutcome) -> str:
    lines = ["threshold calibration over the error-free corpus", ""]
    name_w = max(len(n) for n, _, _ in outcome.per_scenario)
    lines.append(f"{'scenario'.ljust(name_w)}  novel_max      baseline_max")
    for name, novel_max, baseline_max in outcome.per_scenario:
        lines.append(f"{name.ljust(name_w)}  {novel_max:.6e}  {baseline_max:.6e}")
    lines.append("")
    lines.append(f"channel ceilings: novel {outcome.novel_ceiling:.6e}, "
                 f"baseline {outcome.baseline_ceiling:.6e}")
    lines.append(f"chosen thresholds ({outcome.safety:g}x ceiling): "
                 f"novel {outcome.novel_threshold:.9e}, "
                 f"baseline {outcome.baseline_threshold:.9e}")
    lines.append("")
    lines.append(f"against the package defaults ({DEFAULT_NOVEL_THRESHOLD:g} / "
                 f"{DEFAULT_BASELINE_THRESHOLD:g}):")
    offenders = [n for n, m, _ in outcome.per_scenario
                 if m >= DEFAULT_NOVEL_THRESHOLD]
    if offenders:
        lines.append(
            f"  default novel threshold {DEFAULT_NOVEL_THRESHOLD:g} would "
            f"false-positive on: {', '.join(offenders)}")
    else:
        lines.append(
            f"  default novel threshold {DEFAULT_NOVEL_THRESHOLD:g} is clean "
            "on this corpus")
    base_margin = DEFAULT_BASELINE_THRESHOLD / outcome.baseline_ceiling
    offenders = [n for n, _, m in outcome.per_scenario
                 if m >= DEFAULT_BASELINE_THRESHOLD]
    if offenders:
        lines.append(
            f"  default baseline threshold {DEFAULT_BASELINE_THRESHOLD:g} "
            f"would false-positive on: {', '.join(offenders)}")
    else:
        lines.append(
            f"  default baseline threshold {DEFAULT_BASELINE_THRESHOLD:g} is "
            f"clean but only {base_margin:.2f}x above the corpus ceiling")
    lines.append("")
    clean = all(m < outcome.novel_threshold and b < outcome.baseline_threshold
                for _, m, b in outcome.per_scenario)
    lines.append("false positives at chosen thresholds: "
                 + ("none" if clean else "PRESENT"))
    return "\n".join(lines)


def _cmd_run(args: argparse.Namespace) -> int:
    return run(RunConfig(
        scenario=args.scenario,
        out_dir=args.out,
        emit_plots=args.plots,
        emit_riskmaps=args.riskmaps,
        novel_threshold=args.w_thr,
        baseline_threshold=args.w_thr_baseline,
    ))


def _cmd_compare_all(args: argparse.Namespace) -> int:
    rows = compare_all(out_dir=args.out)
    print(report.comparison_table(rows))
    print(f"artifacts in {args.out}")
    return EXIT_OK


def _cmd_calibrate(args: argparse.Namespace) -> int:
    outcome = calibrate_thresholds(safety=args.safety)
    print(calibration_report(outcome))
    return EXIT_OK


def _cmd_validate(args: argparse.Namespace) -> int:
    spec = resolve_scenario(args.file)
    problems = scenarios.validate(spec)
    if problems:
        print(f"scenario {spec.name!r}: {len(problems)} violation(s)")
        for p in problems:
            print(f"  {p}")
        return EXIT_CONFIG
    print(f"scenario {spec.name!r}: ok")
    return EXIT_OK


def _cmd_export_scenario(args: argparse.Namespace) -> int:
    spec = scenarios.builtin_scenario(args.name)
    sys.stdout.write(scenario_files.dump_scenario(spec))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="riskwarn",
        description="Driver warning simulator: run scenarios, compare the "
                    "perception-aware warning signal against the baseline.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one scenario and write its artifacts")
    p.add_argument("scenario", help="builtin scenario name or scenario file")
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--plots", action="store_true", help="also write SVG charts")
    p.add_argument("--riskmaps", action="store_true",
                   help="also dump risk-map grids (1 s interval)")
    p.add_argument("--w-thr", type=float, default=None,
                   help="override the novel warning threshold")
    p.add_argument("--w-thr-baseline", type=float, default=None,
                   help="override the baseline warning threshold")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("compare-all",
                       help="run every builtin scenario and tabulate warning times")
    p.add_argument("--out", default="out/compare", help="output directory")
    p.set_defaults(func=_cmd_compare_all)

    p = sub.add_parser("calibrate",
                       help="derive thresholds from the error-free corpus")
    p.add_argument("--safety", type=float, default=CALIBRATION_SAFETY,
                   help="multiple of the corpus ceiling to sit at")
    p.set_defaults(func=_cmd_calibrate)

    p = sub.add_parser("validate", help="check a scenario file for violations")
    p.add_argument("file", help="scenario file (or builtin name)")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("export-scenario",
                       help="print a builtin scenario as an editable file")
    p.add_argument("name", help="builtin scenario name")
    p.set_defaults(func=_cmd_export_scenario)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - last-resort diagnostic
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
