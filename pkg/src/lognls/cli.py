"""Command-line entry point.

Subcommands: limit, solve, sweep-eps, sweep-a, verify.  Every run resolves
an output directory (--output flag, then config output_dir, then the
LOGNLS_OUTPUT environment variable, then ./runs/<command>), writes a
manifest before computing, and finalizes it when done.  Exit codes:
0 success, 1 numeric failure (divergence or failed inequality), 2 usage or
configuration error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .config import ConfigError, RunConfig, load_config
from .energy import energy_report
from .experiments import run_concentration, verify_level_structure
from .grid import sample_potential, write_field_csv
from .reporting import (finalize_manifest, start_manifest, write_gnuplot_script,
                        write_plots, write_records_csv)
from .solver import solve_limit

__all__ = ["main"]


def _make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lognls",
        description="Mass-constrained solutions of the logarithmic Schrodinger equation",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("limit", "solve the constant-potential problem per (mu, a)"),
        ("solve", "multi-well solve per (eps, a) cell"),
        ("sweep-eps", "concentration sweep over decreasing eps"),
        ("sweep-a", "sweep over the mass list"),
        ("verify", "measure levels and check the inequality structure"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to a key = value config file")
        p.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                       help="worker threads for independent cells")
        p.add_argument("--output", default=None, help="output directory (overrides config)")
        p.add_argument("--quiet", action="store_true", help="suppress per-job log lines")
    return parser


def _resolve_output(args, config: RunConfig) -> Path:
    if args.output:
        return Path(args.output)
    if config.output_dir is not None:
        return config.output_dir
    env = os.environ.get("LOGNLS_OUTPUT")
    if env:
        return Path(env)
    return Path("runs") / args.command


def _logger(quiet: bool):
    if quiet:
        return lambda msg: None
    return lambda msg: print(msg, flush=True)


def _cmd_limit(args, config: RunConfig, outdir: Path, log) -> int:
    config.require("mu_values", "a_values")
    manifest = start_manifest(outdir, "limit", config)
    outputs = []
    all_converged = True
    for mu in config.mu_values:
        for a in config.a_values:
            sol = solve_limit(config.grid, mu, a, config.solver, split=config.split)
            all_converged &= sol.converged
            tag = f"mu{mu:g}_a{a:g}"
            field_csv = outdir / f"solution_{tag}.csv"
            write_field_csv(sol.u, field_csv)
            sol.write_manifest(outdir / f"solution_{tag}.json", field_csv.name)
            vfield = sample_potential(config.grid, lambda p: 0.0 * p[..., 0] + mu, 1.0)
            energy_report(config.grid, vfield, sol.u, config.split).write_json(
                outdir / f"energy_{tag}.json")
            outputs += [field_csv, outdir / f"solution_{tag}.json", outdir / f"energy_{tag}.json"]
            log(f"[limit] mu={mu:g} a={a:g} E={sol.energy:.8g} lambda={sol.lam:.8g} "
                f"iters={sol.iterations} converged={sol.converged}")
    finalize_manifest(manifest, outputs)
    return 0 if all_converged else 1


def _cmd_cells(args, config: RunConfig, outdir: Path, log, command: str) -> int:
    config.require("potential", "eps_values", "a_values")
    manifest = start_manifest(outdir, command, config)
    outcome = run_concentration(config, jobs=args.jobs, log=log)
    records_csv = outdir / "records.csv"
    write_records_csv(outcome.records, records_csv, config.grid.dim)
    outputs = [records_csv, write_gnuplot_script(outdir)]
    field_paths = []
    for (eps, a), sols in sorted(outcome.solutions.items()):
        for sol in sols:
            p = outdir / f"field_eps{eps:g}_a{a:g}_{sol.seed_id}.csv"
            write_field_csv(sol.u, p)
            field_paths.append(p)
    outputs += field_paths
    outputs += write_plots(outdir, records=outcome.records)
    finalize_manifest(manifest, outputs)
    diverged = any(not r.converged for r in outcome.records)
    empty = any(not sols for sols in outcome.solutions.values())
    return 1 if (diverged or empty) else 0


def _cmd_verify(args, config: RunConfig, outdir: Path, log) -> int:
    config.require("mu_values", "a_values")
    manifest = start_manifest(outdir, "verify", config)
    report = verify_level_structure(config, log=log)
    records_csv = outdir / "records.csv"
    write_records_csv(report.records, records_csv, config.grid.dim)
    rows = [
        {"name": c.name, "lhs": c.lhs, "rhs": c.rhs, "margin": c.margin, "passed": c.passed}
        for c in report.checks
    ]
    report_json = outdir / "verify_report.json"
    report_json.write_text(json.dumps(
        {"a_zero": report.a_zero, "checks": rows}, indent=2) + "\n")
    outputs = [records_csv, report_json, write_gnuplot_script(outdir)]
    outputs += write_plots(outdir, levels=report.levels)
    finalize_manifest(manifest, outputs)
    for c in report.checks:
        log(f"[verify] {'PASS' if c.passed else 'FAIL'} {c.name} "
            f"(lhs={c.lhs:.6g} rhs={c.rhs:.6g} margin={c.margin:.6g})")
    if report.a_zero is not None:
        log(f"[verify] a_zero = {report.a_zero:.6g}")
    return 0 if report.all_passed else 1


def main(argv=None) -> int:
    parser = _make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        config = load_config(args.config)
        outdir = _resolve_output(args, config)
        outdir.mkdir(parents=True, exist_ok=True)
        log = _logger(args.quiet)
        if args.command == "limit":
            return _cmd_limit(args, config, outdir, log)
        if args.command == "solve":
            return _cmd_cells(args, config, outdir, log, "solve")
        if args.command == "sweep-eps":
            return _cmd_cells(args, config, outdir, log, "sweep-eps")
        if args.command == "sweep-a":
            return _cmd_cells(args, config, outdir, log, "sweep-a")
        if args.command == "verify":
            return _cmd_verify(args, config, outdir, log)
        raise AssertionError(f"unhandled command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
