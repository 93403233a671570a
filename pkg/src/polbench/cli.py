"""Command-line front end.

Subcommands: run (one configuration, both choices), sweep (one axis),
audit (no-signalling fuzz or the ansatz delta table), scenarios list.
Angles are radians by default and accept an explicit "rad" or "deg"
suffix.  Exit codes: 0 success, 1 usage error, 2 scenario validation
error, 3 physics-engine invariant failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import sys

import numpy as np

from . import audit, montecarlo, report as report_mod, scenarios
from .channels import AttenuationModel, EXPONENTIAL, INVERSE_SQUARE, STEP
from .errors import ChannelError, ContractViolation, ScenarioError
from .report import Report
from .scenarios import ANSATZ, ATTENUATED, CPTP, NLModel

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_SCENARIO = 2
EXIT_PHYSICS = 3

_DEFAULT_GRID_POINTS = 13


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems instead of exiting with code 2."""

    def error(self, message):
        raise _UsageError(message)


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    handler = {
        "run": cmd_run,
        "sweep": cmd_sweep,
        "audit": cmd_audit,
        "scenarios": cmd_scenarios,
    }[args.command]
    try:
        return handler(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    except (ChannelError, ContractViolation) as exc:
        print(f"physics invariant failure: {exc}", file=sys.stderr)
        return EXIT_PHYSICS


def _build_parser() -> _Parser:
    parser = _Parser(prog="polbench", description=__doc__)
    sub = parser.add_subparsers(dest="command")
    parser.set_defaults(command=None)

    model_opts = _Parser(add_help=False)
    group = model_opts.add_argument_group("device model")
    group.add_argument("--model", choices=[ANSATZ, CPTP, ATTENUATED], default=None,
                       help="device model for the choice-in configuration")
    group.add_argument("--n", default=None, metavar="N",
                       help="device population (number or 'inf')")
    group.add_argument("--p-align", type=float, default=None, metavar="P",
                       help="cptp: probability the device resolves the polarization")
    group.add_argument("--p-noise", type=float, default=None, metavar="P",
                       help="cptp: probability of an unpolarized emission")
    group.add_argument("--attenuation", choices=[EXPONENTIAL, INVERSE_SQUARE, STEP],
                       default=None, help="attenuated: coupling falloff law")
    group.add_argument("--scale", type=float, default=None, metavar="L",
                       help="attenuated: falloff length scale")
    group.add_argument("--cutoff", type=float, default=None, metavar="D",
                       help="attenuated: step-law cutoff distance")
    group.add_argument("--distance", type=float, default=None, metavar="D",
                       help="attenuated: source-to-device distance")

    output_opts = _Parser(add_help=False)
    group = output_opts.add_argument_group("output")
    group.add_argument("--format", choices=["csv", "json"], default="csv")
    group.add_argument("--out", default=None, metavar="PATH",
                       help="output file (default: standard output)")
    group.add_argument("--plot", action="store_true",
                       help="also render the table to a PNG next to the output")

    p_run = sub.add_parser("run", parents=[model_opts, output_opts],
                           help="evaluate one scenario, device out and in")
    p_run.add_argument("scenario", help="builtin name (fig1, fig2, fig3) or scenario file path")
    p_run.add_argument("--theta", default=None, metavar="ANGLE[,ANGLE...]",
                       help="polarizer angle(s); default is a 13-point grid over [0, pi]")
    p_run.add_argument("--theta-right", default=None, metavar="ANGLE",
                       help="fig1 only: fix the choice-side polarizer instead of tracking --theta")
    p_run.add_argument("--theta-grid", type=int, default=None, metavar="K",
                       help="number of grid points when --theta is not given")
    p_run.add_argument("--trials", type=int, default=None, metavar="N",
                       help="also sample clicks per grid point")
    p_run.add_argument("--seed", type=int, default=0, metavar="S")
    p_run.add_argument("--efficiency", type=float, default=1.0, metavar="E",
                       help="detector efficiency in (0, 1]")

    p_sweep = sub.add_parser("sweep", parents=[model_opts, output_opts],
                             help="sweep one model axis of a scenario")
    p_sweep.add_argument("scenario", help="builtin name or scenario file path")
    p_sweep.add_argument("--axis", required=True, choices=["n", "theta", "distance", "p_noise"])
    p_sweep.add_argument("--range", required=True, metavar="START:STOP[:COUNT]|V1,V2,...",
                         help="axis values (theta endpoints accept deg/rad suffixes)")
    p_sweep.add_argument("--theta", default=None, metavar="ANGLE",
                         help="fixed polarizer angle for non-theta sweeps (default 0)")
    p_sweep.add_argument("--theta-right", default=None, metavar="ANGLE",
                         help="fig1 only: fix the choice-side polarizer")

    p_audit = sub.add_parser("audit", parents=[output_opts],
                             help="no-signalling fuzz across random channels, or the ansatz table")
    p_audit.add_argument("--fuzz", type=int, default=1000, metavar="COUNT",
                         help="number of random CPTP channels (default 1000)")
    p_audit.add_argument("--seed", type=int, default=0, metavar="S")
    p_audit.add_argument("--ansatz", action="store_true",
                         help="tabulate the non-physical ansatz deltas instead of fuzzing")
    p_audit.add_argument("--n-values", default="0,1,2,5,10,100,inf", metavar="LIST",
                         help="ansatz table populations")
    p_audit.add_argument("--theta-grid", type=int, default=_DEFAULT_GRID_POINTS, metavar="K")

    p_scen = sub.add_parser("scenarios", help="list builtin scenarios")
    p_scen.add_argument("action", nargs="?", choices=["list"], default="list")
    return parser


# ---------------------------------------------------------------------------
# run
# ---------------------------------------------------------------------------


def cmd_run(args) -> int:
    if not 0.0 < args.efficiency <= 1.0:
        raise _UsageError("--efficiency must be in (0, 1]")
    if args.seed < 0:
        raise _UsageError("--seed must be >= 0")
    model = _model_from_args(args)
    configs = _run_configs(args, model)

    det_order: list[str] = []
    rows_raw = []
    for theta, s in configs:
        stats_out = scenarios.run_scenario(s, False, model)
        stats_in = scenarios.run_scenario(s, True, model)
        delta = _safe_delta(s, model)
        mc = None
        if args.trials is not None:
            if args.trials < 1:
                raise _UsageError("--trials must be >= 1")
            row_idx = len(rows_raw)
            mc = {
                False: montecarlo.sample_counts(
                    s, False, args.trials, args.seed, args.efficiency, model,
                    stream_index=2 * row_idx),
                True: montecarlo.sample_counts(
                    s, True, args.trials, args.seed, args.efficiency, model,
                    stream_index=2 * row_idx + 1),
            }
        for det in list(stats_out.rates) + list(stats_in.rates):
            if det not in det_order:
                det_order.append(det)
        rows_raw.append((theta, stats_out, stats_in, delta, mc))

    has_theta = any(theta is not None for theta, *_ in rows_raw)
    columns = (["theta"] if has_theta else [])
    for det in det_order:
        columns += [f"out[{det}]", f"in[{det}]"]
    columns.append("signalling_delta")
    if args.trials is not None:
        for det in det_order:
            columns += [
                f"mc_out[{det}]", f"ci95_out[{det}]",
                f"mc_in[{det}]", f"ci95_in[{det}]",
            ]

    rows = []
    for theta, stats_out, stats_in, delta, mc in rows_raw:
        row = ([theta] if has_theta else [])
        for det in det_order:
            row += [stats_out.rates.get(det), stats_in.rates.get(det)]
        row.append(delta)
        if mc is not None:
            recs = {c: {r.detector: r for r in mc[c]} for c in (False, True)}
            for det in det_order:
                for choice in (False, True):
                    rec = recs[choice].get(det)
                    row += [None, None] if rec is None else [rec.rate_estimate, rec.ci95_halfwidth]
        rows.append(row)

    deltas = [row_raw[3] for row_raw in rows_raw if row_raw[3] is not None]
    rep = Report(
        command="run",
        columns=columns,
        rows=rows,
        scenario=configs[0][1].name,
        model=scenarios.model_summary(_concrete_model(model)),
        model_note=_model_note(model),
        summary={"signalling_delta_max": max(deltas) if deltas else None},
        trials=args.trials,
        seed=args.seed if args.trials is not None else None,
    )
    _emit(rep, args)
    return EXIT_OK


def _run_configs(args, model):
    """(theta, Scenario) pairs for the run command."""
    name = args.scenario
    if name in scenarios.BUILTINS:
        if name in scenarios.THETA_BUILDERS:
            thetas = _theta_values(args)
            if name == "fig1":
                t_right = None if args.theta_right is None else _parse_angle(args.theta_right)
                return [(t, scenarios.build_fig1(t, t_right, _concrete_model(model)))
                        for t in thetas]
            return [(t, scenarios.build_fig3(t, _concrete_model(model))) for t in thetas]
        for flag, label in ((args.theta, "--theta"), (args.theta_right, "--theta-right"),
                            (args.theta_grid, "--theta-grid")):
            if flag is not None:
                raise _UsageError(f"{label} does not apply to scenario {name!r}")
        return [(None, scenarios.build_fig2(_concrete_model(model)))]
    if args.theta is not None or args.theta_right is not None or args.theta_grid is not None:
        raise _UsageError("theta flags apply only to builtin scenarios with polarizers")
    return [(None, scenarios.load_scenario_file(name))]


def _theta_values(args):
    if args.theta is not None and args.theta_grid is not None:
        raise _UsageError("give either --theta or --theta-grid, not both")
    if args.theta is not None:
        return [_parse_angle(part) for part in str(args.theta).split(",") if part.strip()]
    points = args.theta_grid if args.theta_grid is not None else _DEFAULT_GRID_POINTS
    if points < 1:
        raise _UsageError("--theta-grid must be >= 1")
    return [float(t) for t in np.linspace(0.0, math.pi, points)]


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------


def cmd_sweep(args) -> int:
    base_model = _model_from_args(args)
    values = _parse_range(args.range, args.axis)
    theta = 0.0 if args.theta is None else _parse_angle(args.theta)
    t_right = None if args.theta_right is None else _parse_angle(args.theta_right)

    if args.axis == "theta" and args.scenario not in scenarios.THETA_BUILDERS:
        raise _UsageError("theta sweeps need a builtin scenario with a polarizer (fig1, fig3)")
    if args.axis == "distance":
        base_model = _require_kind(base_model, ATTENUATED, "distance sweeps")
    if args.axis == "p_noise":
        base_model = _require_kind(base_model, CPTP, "p_noise sweeps")
    if args.axis == "n" and _concrete_model(base_model).kind == CPTP:
        raise _UsageError("population sweeps need an ansatz or attenuated model")

    det_order: list[str] = []
    rows_raw = []
    for value in values:
        model = _model_on_axis(base_model, args.axis, value)
        s = _sweep_scenario(args.scenario, args.axis, value, theta, t_right, model)
        stats_out = scenarios.run_scenario(s, False, model)
        stats_in = scenarios.run_scenario(s, True, model)
        delta = _safe_delta(s, model)
        for det in list(stats_out.rates) + list(stats_in.rates):
            if det not in det_order:
                det_order.append(det)
        rows_raw.append((value, model, stats_out, stats_in, delta))

    with_neff = args.axis == "distance"
    columns = [args.axis] + (["n_eff"] if with_neff else [])
    for det in det_order:
        columns += [f"out[{det}]", f"in[{det}]"]
    columns.append("signalling_delta")

    rows = []
    for value, model, stats_out, stats_in, delta in rows_raw:
        row = [value]
        if with_neff:
            row.append(_concrete_model(model).effective_population())
        for det in det_order:
            row += [stats_out.rates.get(det), stats_in.rates.get(det)]
        row.append(delta)
        rows.append(row)

    deltas = [r[-1] for r in rows if r[-1] is not None]
    rep = Report(
        command="sweep",
        columns=columns,
        rows=rows,
        scenario=args.scenario if args.scenario in scenarios.BUILTINS else None,
        model=scenarios.model_summary(_concrete_model(base_model)),
        model_note=_model_note(base_model),
        summary={
            "axis": args.axis,
            "points": len(rows),
            "signalling_delta_max": max(deltas) if deltas else None,
        },
    )
    _emit(rep, args)
    return EXIT_OK


def _sweep_scenario(name, axis, value, theta, t_right, model):
    if name not in scenarios.BUILTINS:
        if axis == "theta":
            raise _UsageError("theta sweeps need a builtin scenario")
        return scenarios.load_scenario_file(name)
    t = value if axis == "theta" else theta
    if name == "fig1":
        return scenarios.build_fig1(t, t_right, _concrete_model(model))
    if name == "fig3":
        if t_right is not None:
            raise _UsageError("--theta-right applies only to fig1")
        return scenarios.build_fig3(t, _concrete_model(model))
    if axis == "theta":
        raise _UsageError("fig2 has no polarizer to sweep")
    if t_right is not None:
        raise _UsageError("--theta-right applies only to fig1")
    return scenarios.build_fig2(_concrete_model(model))


def _model_on_axis(base, axis, value):
    model = _concrete_model(base)
    if axis == "n":
        return dataclasses.replace(model, population=float(value))
    if axis == "distance":
        return dataclasses.replace(model, distance=float(value))
    if axis == "p_noise":
        return dataclasses.replace(model, p_noise=float(value))
    return model


def _require_kind(model, kind, what):
    concrete = _concrete_model(model)
    if model is None:
        defaults = {
            ATTENUATED: NLModel(ATTENUATED, population=1.0,
                                attenuation=AttenuationModel(EXPONENTIAL)),
            CPTP: NLModel(CPTP),
        }
        return defaults[kind]
    if concrete.kind != kind:
        raise _UsageError(f"{what} require --model {kind}")
    return concrete


def _parse_range(spec: str, axis: str):
    parse_one = _parse_angle if axis == "theta" else _parse_float
    if "," in spec:
        values = [parse_one(part) for part in spec.split(",") if part.strip()]
    else:
        parts = spec.split(":")
        if len(parts) not in (2, 3):
            raise _UsageError(f"--range must be START:STOP[:COUNT] or a comma list, got {spec!r}")
        start, stop = parse_one(parts[0]), parse_one(parts[1])
        if len(parts) == 3:
            try:
                count = int(parts[2])
            except ValueError:
                raise _UsageError(f"range COUNT must be an integer, got {parts[2]!r}") from None
        elif axis == "n":
            count = int(round(abs(stop - start))) + 1
        else:
            count = 50
        if count < 1:
            raise _UsageError("range COUNT must be >= 1")
        values = [float(v) for v in np.linspace(start, stop, count)]
    if not values:
        raise _UsageError("range produced no values")
    if axis == "n":
        seen = []
        for v in values:
            i = int(round(v))
            if i < 0:
                raise _UsageError("populations must be >= 0")
            if i not in seen:
                seen.append(i)
        values = seen
    if axis == "distance" and any(v < 0 for v in values):
        raise _UsageError("distances must be >= 0")
    if axis == "p_noise" and any(not 0.0 <= v <= 1.0 for v in values):
        raise _UsageError("p_noise values must be in [0, 1]")
    return values


# ---------------------------------------------------------------------------
# audit
# ---------------------------------------------------------------------------


def cmd_audit(args) -> int:
    if args.ansatz:
        return _audit_ansatz(args)
    if args.fuzz < 1:
        raise _UsageError("--fuzz must be >= 1")
    if args.seed < 0:
        raise _UsageError("--seed must be >= 0")
    summary, pairs = audit.fuzz_no_signalling(args.fuzz, args.seed)
    rows = [
        [label, rep.max_marginal_deviation, rep.verdict]
        for label, rep in pairs
    ]
    rep = Report(
        command="audit",
        columns=["channel", "max_marginal_deviation", "verdict"],
        rows=rows,
        summary={
            "mode": "fuzz",
            "channels_tested": summary.channels_tested,
            "max_marginal_deviation": summary.max_marginal_deviation,
            "signalling_count": summary.signalling_count,
            "threshold": audit.SIGNALLING_THRESHOLD,
            "verdict": summary.verdict,
            "worst_channel": summary.worst_label,
        },
        seed=args.seed,
    )
    _emit(rep, args)
    if summary.signalling_count > 0:
        print(
            f"physics invariant failure: {summary.signalling_count} of "
            f"{summary.channels_tested} channels exceeded the no-signalling threshold",
            file=sys.stderr,
        )
        return EXIT_PHYSICS
    return EXIT_OK


def _audit_ansatz(args) -> int:
    populations = []
    for part in str(args.n_values).split(","):
        part = part.strip()
        if not part:
            continue
        populations.append(math.inf if part == "inf" else _parse_float(part))
    if not populations:
        raise _UsageError("--n-values produced no populations")
    if args.theta_grid < 1:
        raise _UsageError("--theta-grid must be >= 1")
    grid = [float(t) for t in np.linspace(0.0, math.pi, args.theta_grid)]
    rows = []
    max_delta = 0.0
    for n in populations:
        for theta in grid:
            delta = audit.ansatz_signalling_delta(n, theta)
            flagged = abs(delta) > audit.SIGNALLING_THRESHOLD
            max_delta = max(max_delta, abs(delta))
            rows.append([n, theta, delta, flagged])
    rep = Report(
        command="audit",
        columns=["n", "theta", "delta", "flagged"],
        rows=rows,
        model_note=report_mod.ANSATZ_NOTE,
        summary={
            "mode": "ansatz",
            "max_abs_delta": max_delta,
            "threshold": audit.SIGNALLING_THRESHOLD,
            "verdict": audit.SIGNALLING if max_delta > audit.SIGNALLING_THRESHOLD
            else audit.NO_SIGNALLING,
        },
    )
    _emit(rep, args)
    return EXIT_OK


# ---------------------------------------------------------------------------
# scenarios
# ---------------------------------------------------------------------------


def cmd_scenarios(args) -> int:
    for name, description in scenarios.list_builtins().items():
        print(f"{name:6s} {description}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------


def _model_from_args(args) -> NLModel | None:
    flags = (args.model, args.n, args.p_align, args.p_noise,
             args.attenuation, args.scale, args.cutoff, args.distance)
    if all(f is None for f in flags):
        return None
    kind = args.model if args.model is not None else ANSATZ
    population = _parse_population(args.n) if args.n is not None else 0.0
    try:
        if kind == ANSATZ:
            for flag, label in ((args.p_align, "--p-align"), (args.p_noise, "--p-noise"),
                                (args.attenuation, "--attenuation"), (args.distance, "--distance")):
                if flag is not None:
                    raise _UsageError(f"{label} does not apply to the ansatz model")
            return NLModel(ANSATZ, population=population)
        if kind == CPTP:
            return NLModel(
                CPTP,
                population=population,
                p_align=1.0 if args.p_align is None else args.p_align,
                p_noise=0.0 if args.p_noise is None else args.p_noise,
            )
        attenuation = AttenuationModel(
            kind=args.attenuation if args.attenuation is not None else EXPONENTIAL,
            scale=1.0 if args.scale is None else args.scale,
            cutoff=1.0 if args.cutoff is None else args.cutoff,
        )
        return NLModel(
            ATTENUATED,
            population=population,
            attenuation=attenuation,
            distance=0.0 if args.distance is None else args.distance,
        )
    except ContractViolation as exc:
        raise _UsageError(str(exc)) from None


def _concrete_model(model: NLModel | None) -> NLModel:
    return model if model is not None else NLModel(ANSATZ, population=0.0)


def _model_note(model: NLModel | None) -> str | None:
    if _concrete_model(model).kind in (ANSATZ, ATTENUATED):
        return report_mod.ANSATZ_NOTE
    return None


def _safe_delta(s, model) -> float | None:
    try:
        return scenarios.signalling_delta(s, model)
    except ScenarioError:
        return None  # no detector away from the choice; nothing to compare


def _parse_angle(text) -> float:
    t = str(text).strip().lower()
    try:
        if t.endswith("deg"):
            return math.radians(float(t[:-3]))
        if t.endswith("rad"):
            return float(t[:-3])
        return float(t)
    except ValueError:
        raise _UsageError(
            f"cannot parse angle {text!r}; use radians, an 'rad' suffix, or a 'deg' suffix"
        ) from None


def _parse_float(text) -> float:
    try:
        return float(str(text).strip())
    except ValueError:
        raise _UsageError(f"cannot parse number {text!r}") from None


def _parse_population(text) -> float:
    t = str(text).strip().lower()
    if t == "inf":
        return math.inf
    value = _parse_float(t)
    if value < 0:
        raise _UsageError(f"population must be >= 0, got {text!r}")
    return value


def _emit(rep: Report, args) -> None:
    report_mod.write_report(rep, args.format, args.out)
    if args.plot:
        png = _figure_path(rep, args.out)
        report_mod.render_figure(rep, png)
        print(f"figure written to {png}", file=sys.stderr)


def _figure_path(rep: Report, out_path: str | None) -> str:
    if out_path is not None:
        stem = out_path.rsplit(".", 1)[0] if "." in out_path.rsplit("/", 1)[-1] else out_path
        return stem + ".png"
    suffix = f"_{rep.scenario}" if rep.scenario else ""
    return f"polbench_{rep.command}{suffix}.png"


if __name__ == "__main__":
    sys.exit(main())
