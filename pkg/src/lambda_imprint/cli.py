"""Command-line entry point.

Exit status: 0 success, 1 bad config, 2 failed run or check, 3 output error.
"""
from __future__ import annotations

import argparse
import math
import sys
import time
from dataclasses import replace

import numpy as np

from .checks import run_checks
from .config import load_config
from .errors import LambdaImprintError, OutputError, ParseError, ValidationError
from .figures import FIGURES, reproduce
from .results import write_results
from .scenarios import ScenarioConfig, ScenarioResult, Table, run_scenario, run_sweep

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME, EXIT_IO = 0, 1, 2, 3


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lambda-imprint",
                                description="Store, displace and retrieve optical imprints in a lambda medium.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--workers", type=int, default=None, help="parallel sweep rows")
    common.add_argument("--out", default=None, help="output directory")
    common.add_argument("--retain-fields", action="store_true", help="keep and write full field records")
    common.add_argument("--dt", type=float, default=None, help="time step (tau_a)")
    common.add_argument("--dz", type=float, default=None, help="space step (1/kappa_a)")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="run one scenario").add_argument("config")
    sub.add_parser("sweep", parents=[common], help="run a parameter sweep").add_argument("config")
    rp = sub.add_parser("reproduce", parents=[common], help="regenerate a built-in reference figure or table")
    rp.add_argument("figure", choices=sorted(FIGURES))
    sub.add_parser("check", help="invariant and convergence suite")
    return p


def _override(config: ScenarioConfig, args) -> ScenarioConfig:
    kw = {}
    if args.dt is not None:
        kw["dt"] = args.dt
    if args.dz is not None:
        kw["dz"] = args.dz
    if args.workers is not None:
        kw["workers"] = args.workers
    if args.out is not None:
        kw["output_dir"] = args.out
    if args.retain_fields and config.retain == "boundary":
        kw["retain"] = "fields"
    return replace(config, **kw) if kw else config


def scenario_tables(res: ScenarioResult) -> list[Table]:
    name = res.config.name
    imp = []
    for t, c, loc in zip(res.snapshot_times, res.imprints, res.locations):
        if c is None:
            imp.append((t, loc, math.nan, math.nan, 0))
        else:
            imp.append((t, c.center, c.width_fwhm, c.peak_coherence, c.phase_sign))
    tables = [Table(f"{name}_imprints", ("t_tau_a", "kappa_x1", "width_fwhm", "peak_abs_rho12", "phase_sign"), imp)]
    summary = [("theta13_out_over_pi", res.output_areas[0] / math.pi),
               ("theta23_out_over_pi", res.output_areas[1] / math.pi)]
    for k, (d, f) in enumerate(zip(res.displacements, res.phase_flips)):
        summary.append((f"delta_{k + 1}", d))
        summary.append((f"phase_flip_{k + 1}", "" if f is None else f))
    if res.retrieval is not None:
        summary += [("eta", res.retrieval.eta), ("r", res.retrieval.r),
                    ("output_inverted", res.retrieval.inverted)]
    summary += [("trace_drift", res.trace_drift), ("purity_drift", res.purity_drift),
                ("cauchy_schwarz_excess", res.cs_excess)]
    tables.append(Table(f"{name}_summary", ("quantity", "value"), summary))
    rec = res.record
    rows = list(zip(rec.t, rec.omega13_in.real, rec.omega23_in.real, rec.omega13_out.real,
                    rec.omega13_out.imag, rec.omega23_out.real, rec.omega23_out.imag))
    tables.append(Table(f"{name}_boundary", ("t_tau_a", "omega13_in", "omega23_in", "re_omega13_out",
                                             "im_omega13_out", "re_omega23_out", "im_omega23_out"),
                        [tuple(float(v) for v in r) for r in rows]))
    if res.areas is not None:
        a = res.areas
        tables.append(Table(f"{name}_areas", ("kappa_x", "theta13_over_pi", "theta23_over_pi", "thetatot_over_pi"),
                            [(float(z), x / math.pi, y / math.pi, w / math.pi)
                             for z, x, y, w in zip(a.z, a.theta13, a.theta23, a.theta_tot)]))
    return tables


def _cmd_run(args) -> int:
    config = _override(load_config(args.config), args)
    t0 = time.perf_counter()
    res = run_scenario(config)
    write_results(config.output_dir, scenario_tables(res), config=config,
                  runtime_s=time.perf_counter() - t0,
                  record=res.record if config.retain != "boundary" else None)
    for c, t in zip(res.imprints, res.snapshot_times):
        where = "none" if c is None else f"{c.center:.4f}"
        print(f"t = {t:g}: imprint at {where}")
    if res.retrieval is not None:
        print(f"retrieved: eta = {res.retrieval.eta:.4f}, r = {res.retrieval.r:.5f}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    config = _override(load_config(args.config), args)
    if config.sweep is None:
        raise ValidationError("config has no [sweep] table")
    t0 = time.perf_counter()
    table = run_sweep(config)
    write_results(config.output_dir, [table], config=config, runtime_s=time.perf_counter() - t0)
    for k, err in table.errors.items():
        print(f"row {k} failed: {err}", file=sys.stderr)
    print(f"{len(table.rows) - len(table.errors)}/{len(table.rows)} rows written to {config.output_dir}")
    return EXIT_RUNTIME if table.errors else EXIT_OK


def _cmd_reproduce(args) -> int:
    out = args.out or f"results/{args.figure}"
    t0 = time.perf_counter()
    tables = reproduce(args.figure, workers=args.workers or 1,
                       dt=args.dt or 0.02, dz=args.dz or 0.02)
    write_results(out, tables, runtime_s=time.perf_counter() - t0,
                  extra={"figure": args.figure, "dt": args.dt or 0.02, "dz": args.dz or 0.02})
    for t in tables:
        print(f"{t.name}: {len(t.rows)} rows")
    return EXIT_RUNTIME if any(t.errors for t in tables) else EXIT_OK


def _cmd_check(args) -> int:
    results = run_checks()
    for r in results:
        print(r.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_RUNTIME


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    cmd = {"run": _cmd_run, "sweep": _cmd_sweep, "reproduce": _cmd_reproduce, "check": _cmd_check}
    try:
        with np.errstate(all="ignore"):
            return cmd[args.command](args)
    except (ParseError, ValidationError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OutputError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_IO
    except (LambdaImprintError, ValueError, FloatingPointError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
