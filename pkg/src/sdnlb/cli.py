"""Command-line front end.

    sdnlb plan SCENARIO [-o DIR] [--seed N] [-v]
    sdnlb compare SCENARIO [-o DIR] [--seed N] [--strategy NAME ...] [-v]

plan runs one detect -> plan -> execute pass and reports it; compare runs
every configured strategy over the identical trace and seed and writes one
step CSV per strategy plus a summary. All output files are written
atomically and contain no timestamps, so identical inputs produce
byte-identical artifacts.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import logging
import os
import random
import sys
from pathlib import Path

import click

from .detection import detect
from .errors import SdnlbError
from .executor import execute_plan
from .load_model import load_vector
from .planner import plan as build_plan
from .scenario import ScenarioConfig, load_scenario
from .sim import generate_trace, lbr, run
from .strategies import StrategyKind

logger = logging.getLogger(__name__)


def _atomic_write(path: Path, text: str):
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _load_config(scenario_path, seed) -> ScenarioConfig:
    cfg = load_scenario(scenario_path)
    if seed is not None:
        cfg = dataclasses.replace(
            cfg,
            seed=seed,
            planner_params=dataclasses.replace(cfg.planner_params, seed=seed),
        )
    return cfg


def _ensure_out_dir(cfg: ScenarioConfig, out_dir) -> Path:
    path = Path(out_dir or cfg.output_dir or "out")
    path.mkdir(parents=True, exist_ok=True)
    return path


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Enable debug logging.")
def main(verbose: bool):
    """Deterministic SDN controller load-balancing simulator."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )


@main.command("plan")
@click.argument("scenario", type=click.Path())
@click.option("-o", "--out-dir", type=click.Path(), default=None,
              help="Output directory (default: scenario output_dir or ./out).")
@click.option("--seed", type=int, default=None, help="Override the scenario seed.")
def cmd_plan(scenario, out_dir, seed):
    """Detect imbalance, plan migrations, execute them once, and report."""
    try:
        cfg = _load_config(scenario, seed)
        out = _ensure_out_dir(cfg, out_dir)
        _run_plan(cfg, out)
    except SdnlbError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


def _run_plan(cfg: ScenarioConfig, out: Path):
    state = cfg.state
    det = detect(state, cfg.load_params, load_mode=cfg.load_mode,
                 zero_load=cfg.zero_load, lambda_scale=cfg.lambda_scale)
    names = det.controllers

    click.echo(f"topology: {cfg.topology.n_nodes} nodes, {cfg.topology.n_links} links")
    click.echo(f"load mode: {cfg.load_mode}")
    click.echo("loads (KB/s): "
               + " ".join(f"{n}={_fmt(v)}" for n, v in zip(names, det.loads)))
    click.echo("load-difference matrix:")
    width = max(8, max(len(n) for n in names) + 2)
    click.echo(" " * width + "".join(f"{n:>{width}}" for n in names))
    for i, n in enumerate(names):
        row = "".join(f"{det.matrix[i, j]:>{width}.3f}" for j in range(len(names)))
        click.echo(f"{n:>{width}}" + row)
    click.echo(f"threshold: {_fmt(det.threshold)}")

    det_rows = []
    for m in range(len(names)):
        for n in range(m + 1, len(names)):
            delta = abs(float(det.matrix[m, n]) - float(det.matrix[n, m]))
            det_rows.append([
                names[m], names[n], _fmt(det.matrix[m, n]), _fmt(det.matrix[n, m]),
                _fmt(delta), _fmt(det.threshold),
                int(delta > det.threshold),
            ])
    _atomic_write(out / "detection.csv", _csv_text(
        ["controller_m", "controller_n", "ratio_mn", "ratio_nm",
         "trigger_factor", "threshold", "triggered"], det_rows))
    click.echo(f"wrote {out / 'detection.csv'}")

    if det.balanced:
        click.echo("no migration needed")
        _atomic_write(out / "plan.csv", _csv_text(
            ["emigration", "switch", "immigration", "cost_kbps", "efficiency"], []))
        click.echo(f"wrote {out / 'plan.csv'}")
        return

    for rec in det.triggers:
        click.echo(f"trigger: {rec.overloaded} over {rec.underloaded} "
                   f"(factor {_fmt(rec.factor)})")

    rng = random.Random(cfg.planner_params.seed)
    migration_plan = build_plan(state, cfg.load_params, cfg.planner_params, det,
                                load_mode=cfg.load_mode, rng=rng)
    for warning in migration_plan.warnings:
        click.echo(f"warning: {warning}")
    for trip in migration_plan.triplets:
        click.echo(f"plan: migrate {trip.switch} from {trip.emigration} to "
                   f"{trip.immigration} (cost {_fmt(trip.cost)} KB/s, "
                   f"efficiency {_fmt(trip.efficiency)})")
    _atomic_write(out / "plan.csv", _csv_text(
        ["emigration", "switch", "immigration", "cost_kbps", "efficiency"],
        [[t.emigration, t.switch, t.immigration, _fmt(t.cost), _fmt(t.efficiency)]
         for t in migration_plan.triplets]))
    click.echo(f"wrote {out / 'plan.csv'}")

    new_state, executed, skipped = execute_plan(
        state, migration_plan, cfg.load_params, cfg.load_mode
    )
    for sk in skipped:
        click.echo(f"skipped: {sk.triplet.switch} -> {sk.triplet.immigration} "
                   f"({sk.reason})")
    after = load_vector(new_state, cfg.load_params, cfg.load_mode)
    click.echo(f"executed {len(executed)} of {len(migration_plan.triplets)} migrations")
    click.echo("loads after (KB/s): "
               + " ".join(f"{n}={_fmt(v)}" for n, v in zip(names, after)))
    click.echo(f"LBR before: {lbr(det.loads):.3f}  after: {lbr(after):.3f}")


@main.command("compare")
@click.argument("scenario", type=click.Path())
@click.option("-o", "--out-dir", type=click.Path(), default=None,
              help="Output directory (default: scenario output_dir or ./out).")
@click.option("--seed", type=int, default=None, help="Override the scenario seed.")
@click.option("--strategy", "strategy_names", multiple=True,
              help="Override the scenario's strategy list (repeatable).")
def cmd_compare(scenario, out_dir, seed, strategy_names):
    """Run every strategy on the identical trace and write comparison CSVs."""
    try:
        cfg = _load_config(scenario, seed)
        if strategy_names:
            cfg = dataclasses.replace(
                cfg, strategies=tuple(StrategyKind(n) for n in strategy_names)
            )
        if len(cfg.strategies) < 2:
            raise SdnlbError("compare needs at least 2 strategies")
        out = _ensure_out_dir(cfg, out_dir)
        _run_compare(cfg, out)
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    except SdnlbError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


def _run_compare(cfg: ScenarioConfig, out: Path):
    trace = generate_trace(
        cfg.trace.kind, cfg.trace.steps, cfg.seed,
        base_rates=cfg.base_rates or None,
        n_switches=cfg.state.n_switches,
        mean=cfg.trace.mean, band=cfg.trace.band, step_size=cfg.trace.step_size,
        spike_factor=cfg.trace.spike_factor, spike_every=cfg.trace.spike_every,
        spike_duration=cfg.trace.spike_duration,
    )
    ctrl = cfg.state.controller_nodes
    header = (["step"] + [f"load_{c}" for c in ctrl]
              + ["lbr", "migration_cost_step", "cumulative_cost",
                 "migrations_count", "rounds", "response_proxy",
                 "throughput_proxy", "error"])

    summary_rows = []
    for kind in cfg.strategies:
        records = run(cfg.state, kind, trace, cfg.load_params, cfg.planner_params,
                      load_mode=cfg.load_mode, zero_load=cfg.zero_load,
                      lambda_scale=cfg.lambda_scale, seed=cfg.seed)
        rows = []
        for r in records:
            rows.append([r.step] + [_fmt(v) for v in r.loads]
                        + [_fmt(r.lbr), _fmt(r.migration_cost_step),
                           _fmt(r.cumulative_cost), r.migrations_count, r.rounds,
                           _fmt(r.response_proxy), _fmt(r.throughput_proxy),
                           r.error])
        path = out / f"{kind.value}_steps.csv"
        _atomic_write(path, _csv_text(header, rows))
        click.echo(f"wrote {path}")

        mean_lbr = sum(r.lbr for r in records) / len(records)
        summary_rows.append([
            kind.value, len(records), _fmt(mean_lbr), _fmt(records[-1].lbr),
            _fmt(records[-1].cumulative_cost),
            sum(r.migrations_count for r in records),
            sum(r.rounds for r in records),
        ])
        click.echo(f"{kind.value}: mean LBR {mean_lbr:.3f}, "
                   f"total cost {records[-1].cumulative_cost:.1f} KB/s, "
                   f"migrations {sum(r.migrations_count for r in records)}")

    _atomic_write(out / "summary.csv", _csv_text(
        ["strategy", "steps", "mean_lbr", "final_lbr", "total_cost",
         "total_migrations", "total_rounds"], summary_rows))
    click.echo(f"wrote {out / 'summary.csv'}")


if __name__ == "__main__":
    main()
