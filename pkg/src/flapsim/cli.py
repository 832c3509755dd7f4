"""Command line entry point: ``flapsim run|compare|case3|validate|metrics``."""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .errors import ScenarioError, SimulationFailure
from .harness.output import comparison_table, emit_outputs, metrics_lines
from .harness.runner import (metric_channels, read_estimates, run_case3, run_scenario,
                             write_estimates)
from .harness.scenario import BUILTIN, load_scenario
from .harness.trace import read_csv

EXIT_OK, EXIT_ERROR, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2, 3

log = logging.getLogger("flapsim")


def _summary(sc) -> dict:
    return {"scenario": sc.name, "controller": sc.controller, "offset_case": sc.offset_case,
            "duration_s": sc.duration, "control_rate_hz": sc.control_rate,
            "plant_step_s": sc.plant_step}


def _run_and_emit(sc, out: Path, plot: bool, estimates=None):
    """Run one scenario into ``out``; on numerical failure the partial trace is still written."""
    try:
        res = run_scenario(sc, estimates)
    except SimulationFailure as exc:
        if exc.result is not None:
            emit_outputs(exc.result.trace, exc.result.metrics, out, title=sc.name, plot=plot,
                         extra={**_summary(sc), "failure": str(exc)})
        raise
    emit_outputs(res.trace, res.metrics, out, title=f"{sc.name} ({sc.controller})", plot=plot,
                 extra=_summary(sc))
    return res


def cmd_run(args) -> int:
    sc = load_scenario(args.scenario)
    if args.controller:
        sc = replace(sc, controller=args.controller)
    estimates = None
    if args.estimates_in:
        try:
            estimates = read_estimates(args.estimates_in)
        except (OSError, ValueError) as exc:
            raise ScenarioError(f"estimates file: {exc}") from exc
    out = Path(args.out)
    res = _run_and_emit(sc, out, not args.no_plot, estimates)
    if args.estimates_out:
        write_estimates(res.final_estimates, args.estimates_out)
    print("\n".join(metrics_lines(res.metrics)))
    print(f"wrote {out}")
    return EXIT_OK


def cmd_compare(args) -> int:
    sc = load_scenario(args.scenario)
    out = Path(args.out)
    results = {}
    for mode in ("adaptive", "lqi"):
        results[mode] = _run_and_emit(replace(sc, controller=mode), out / mode, not args.no_plot)
    table = comparison_table(results)
    (out / "comparison.txt").write_text(table, encoding="utf-8")
    print(table, end="")
    return EXIT_OK


def cmd_case3(args) -> int:
    sc = load_scenario(args.scenario)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    est_path = out / "case2_estimates.txt"
    try:
        first, hot = run_case3(sc, est_path)
    except SimulationFailure as exc:
        if exc.result is not None:
            emit_outputs(exc.result.trace, exc.result.metrics, out / "failed", plot=False,
                         extra={"failure": str(exc)})
        raise
    for label, res in (("case2", first), ("case3", hot)):
        emit_outputs(res.trace, res.metrics, out / label, title=label, plot=not args.no_plot,
                     extra=_summary(res.scenario))
    table = comparison_table({"case2": first, "case3": hot})
    (out / "comparison.txt").write_text(table, encoding="utf-8")
    print(table, end="")
    return EXIT_OK


def cmd_validate(args) -> int:
    sc = load_scenario(args.scenario)
    print(f"{sc.name}: ok ({sc.controller}, offsets {sc.offset_case}, "
          f"{sc.n_ticks} ticks x {sc.substeps} plant steps)")
    return EXIT_OK


def cmd_metrics(args) -> int:
    try:
        trace = read_csv(args.trace)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    channels = ("v_x", "v_y", "z" if args.vertical == "position" else "v_z", "psi")
    print("\n".join(metrics_lines(trace.metrics(channels))))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="flapsim", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = ap.add_subparsers(dest="command", required=True)
    scen_help = f"scenario file or built-in name ({', '.join(BUILTIN)})"

    p = sub.add_parser("run", help="simulate one scenario")
    p.add_argument("--scenario", required=True, help=scen_help)
    p.add_argument("--controller", choices=("adaptive", "lqi"))
    p.add_argument("--out", default="flapsim_out", help="output directory")
    p.add_argument("--estimates-in", help="initial adaptive estimates file")
    p.add_argument("--estimates-out", help="write final adaptive estimates here")
    p.add_argument("--no-plot", action="store_true", help="skip the plot script")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare", help="run a scenario under both controllers")
    p.add_argument("--scenario", required=True, help=scen_help)
    p.add_argument("--out", required=True)
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("case3", help="case2 run, then a hot-started rerun")
    p.add_argument("--scenario", default="case2", help="the case2 scenario to start from")
    p.add_argument("--out", required=True)
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=cmd_case3)

    p = sub.add_parser("validate", help="check a scenario file")
    p.add_argument("--scenario", required=True, help=scen_help)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("metrics", help="step metrics of an existing trace CSV")
    p.add_argument("--trace", required=True)
    p.add_argument("--vertical", choices=("velocity", "position"), default="velocity")
    p.set_defaults(func=cmd_metrics)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"invalid scenario: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SimulationFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
