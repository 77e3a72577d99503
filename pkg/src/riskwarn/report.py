"""Artifact emission: CSV traces, risk-map dumps, summaries, and SVG charts.

CSV files are the source of truth and are written deterministically: fixed
column order, repr-based float formatting, "\n" line endings. The SVG
charts are a convenience view of the same data.
"""

from __future__ import annotations

import csv
import os
from typing import List, Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .risk import RiskMap
from .simulate import SimulationResult
from .warning import WarningTimes


def _num(value) -> str:
    return repr(float(value))


def _flag(value) -> str:
    return "1" if value else "0"


def trace_columns(result: SimulationResult) -> List[str]:
    cols = ["t", "ego_v", "ego_a", "ego_x", "ego_y"]
    for a in result.spec.others:
        cols += [f"{a.agent_id}_v", f"{a.agent_id}_v_per", f"{a.agent_id}_aware"]
    cols += ["R_per", "R_obj", "W_baseline", "novel_active", "baseline_active"]
    return cols


def write_trace_csv(result: SimulationResult, file_path) -> None:
    """One row per simulation step; see trace_columns for the schema."""
    order = [a.agent_id for a in result.spec.others]
    with open(file_path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(trace_columns(result))
        for rec in result.records:
            ego = rec.world.ego
            row = [_num(rec.t), _num(ego.speed), _num(rec.ego_accel),
                   _num(ego.position[0]), _num(ego.position[1])]
            objective = {a.agent_id: a for a in rec.world.others}
            perceived = {p.state.agent_id: p for p in rec.perceived.others}
            for agent_id in order:
                obj = objective[agent_id]
                per = perceived[agent_id]
                row += [_num(obj.speed), _num(per.state.speed), _flag(per.aware)]
            s = rec.sample
            row += [_num(s.r_per), _num(s.w_novel), _num(s.w_baseline),
                    _flag(s.novel_active), _flag(s.baseline_active)]
            writer.writerow(row)


def _fmt_time(value: Optional[float]) -> str:
    return "none" if value is None else f"{value:.6g}"


def summary_lines(result: SimulationResult) -> List[str]:
    times = result.warning_times()
    cfg = result.trace.config
    lines = [
        f"scenario: {result.spec.name}",
        f"duration_s: {result.spec.duration:.6g}",
        f"novel_threshold: {float(cfg.novel_threshold):.9e}",
        f"baseline_threshold: {float(cfg.baseline_threshold):.9e}",
        f"first_novel_warning_s: {_fmt_time(times.novel_time)}",
        f"first_baseline_warning_s: {_fmt_time(times.baseline_time)}",
        f"warning_lead_s: {_fmt_time(times.lead)}",
        f"collision_time_s: {_fmt_time(result.collision_time)}",
        f"collision_with: {result.collision_with or 'none'}",
    ]
    return lines


def write_summary(result: SimulationResult, file_path) -> None:
    with open(file_path, "w") as fh:
        fh.write("\n".join(summary_lines(result)) + "\n")


def write_riskmap_csv(rmap: RiskMap, file_path) -> None:
    """Grid dump: first column is look-ahead time, one column per velocity."""
    with open(file_path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["tau"] + [_num(v) for v in rmap.velocities])
        for ti, tau in enumerate(rmap.times):
            writer.writerow([_num(tau)] + [_num(v) for v in rmap.grid[ti]])


def write_riskmaps(result: SimulationResult, out_dir) -> List[str]:
    written = []
    for pair in result.riskmaps:
        stamp = f"{pair.t:.6g}"
        for label, rmap in (("perceived", pair.perceived),
                            ("objective", pair.objective)):
            name = f"riskmap_{stamp}_{label}.csv"
            write_riskmap_csv(rmap, os.path.join(out_dir, name))
            written.append(name)
    return written


def plot_warning_signal(result: SimulationResult, file_path) -> None:
    """Both warning signals over time on a log axis, thresholds dashed."""
    samples = result.trace.samples
    cfg = result.trace.config
    t = [s.t for s in samples]
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    ax.plot(t, [max(s.w_novel, 1e-12) for s in samples],
            label="warning signal", color="tab:red")
    ax.plot(t, [max(s.w_baseline, 1e-12) for s in samples],
            label="baseline signal", color="tab:blue")
    ax.axhline(cfg.novel_threshold, color="tab:red", linestyle="--",
               linewidth=0.8, label="threshold")
    ax.axhline(cfg.baseline_threshold, color="tab:blue", linestyle="--",
               linewidth=0.8, label="baseline threshold")
    if result.collision_time is not None:
        ax.axvline(result.collision_time, color="black", linestyle=":",
                   linewidth=0.8, label="collision")
    ax.set_yscale("log")
    ax.set_xlabel("time [s]")
    ax.set_ylabel("signal")
    ax.set_title(result.spec.name)
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(file_path, metadata={"Date": None})
    plt.close(fig)


def plot_velocity_accel(result: SimulationResult, file_path) -> None:
    """Ego speed and commanded acceleration over time on twin axes."""
    t = [rec.t for rec in result.records]
    v = [rec.world.ego.speed for rec in result.records]
    a = [rec.ego_accel for rec in result.records]
    fig, ax_v = plt.subplots(figsize=(7.0, 4.0))
    ax_v.plot(t, v, color="tab:blue", label="ego speed")
    ax_v.set_xlabel("time [s]")
    ax_v.set_ylabel("speed [m/s]", color="tab:blue")
    ax_v.tick_params(axis="y", labelcolor="tab:blue")
    ax_a = ax_v.twinx()
    ax_a.plot(t, a, color="tab:orange", alpha=0.8, label="ego accel")
    ax_a.set_ylabel("accel [m/s^2]", color="tab:orange")
    ax_a.tick_params(axis="y", labelcolor="tab:orange")
    if result.collision_time is not None:
        ax_v.axvline(result.collision_time, color="black", linestyle=":",
                     linewidth=0.8)
    ax_v.set_title(result.spec.name)
    ax_v.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(file_path, metadata={"Date": None})
    plt.close(fig)


COMPARISON_COLUMNS = ["scenario", "t_novel", "t_baseline", "lead", "collision"]


def comparison_row(name: str, times: WarningTimes,
                   collision_time: Optional[float]) -> List[str]:
    def cell(value: Optional[float]) -> str:
        return "" if value is None else repr(float(value))
    return [name, cell(times.novel_time), cell(times.baseline_time),
            cell(times.lead), cell(collision_time)]


def write_comparison_csv(rows: Sequence[Sequence[str]], file_path) -> None:
    with open(file_path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(COMPARISON_COLUMNS)
        writer.writerows(rows)


def comparison_table(rows: Sequence[Sequence[str]]) -> str:
    """Fixed-width text rendering of the comparison rows."""
    def shown(cell: str, col: str) -> str:
        if cell == "":
            return "-"
        if col == "scenario":
            return cell
        return f"{float(cell):.6g}"

    rendered = [COMPARISON_COLUMNS] + [
        [shown(cell, col) for cell, col in zip(row, COMPARISON_COLUMNS)]
        for row in rows
    ]
    widths = [max(len(r[i]) for r in rendered) for i in range(len(COMPARISON_COLUMNS))]
    lines = []
    for r in rendered:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip())
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)
