"""Command-line front end: ``geophase {gp,sweep,trajectory,series,preset}``."""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from .density import format_real, trajectory, write_trajectory_csv
from .gp import (
    ConvergenceError,
    DegenerateEvolution,
    gp_closed_form,
    gp_vs_time,
    is_maximally_mixed,
)
from .params import (
    TimeGrid,
    ValidationError,
    _eval_number,
    load_config,
    model_from_mapping,
)
from .sweeps import PRESETS, SINGLE_PRESETS, Axis, SweepSpec, run_preset, sweep_csv

EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3

MODEL_KEYS = ("lambda0", "concurrence", "theta0", "p", "q", "gamma0", "cutoff", "chi", "omega1", "omega2", "regime")


def _number(text: str) -> float:
    try:
        return _eval_number(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("model")
    for key in MODEL_KEYS:
        if key == "regime":
            g.add_argument("--regime", default=None, help="isolated | chi-only | ohmic | ohmic-spin2-uncoupled (default: inferred)")
        else:
            g.add_argument(f"--{key}", type=_number, default=None)
    g.add_argument("--config", type=Path, help="key = value file; flags override it")
    p.add_argument("--tau-cycles", type=int, default=None, help="number of quasi-cycles 2 pi / omega1 (default 1)")
    p.add_argument("--steps", type=int, default=None, help="time samples per quasi-cycle (default 512)")
    p.add_argument("--out", type=Path, default=None)
    p.add_argument("--units", choices=("rad", "pi"), default="pi")


def _mapping(args) -> dict:
    values = load_config(args.config) if getattr(args, "config", None) else {}
    for key in MODEL_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    cycles, steps = values.pop("tau_cycles", 1), values.pop("steps", 512)
    args.tau_cycles = args.tau_cycles if args.tau_cycles is not None else cycles
    args.steps = args.steps if args.steps is not None else steps
    return values


def _axis(text: str) -> Axis:
    try:
        name, start, stop, count = text.split(":")
        return Axis(name, _eval_number(start), _eval_number(stop), int(count))
    except ValueError:
        raise argparse.ArgumentTypeError(f"axis must be name:start:stop:count, got {text!r}") from None


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_bytes(text.encode())


def cmd_gp(args) -> int:
    mapping = dict(SINGLE_PRESETS[args.preset]) if args.preset else {}
    mapping.update(_mapping(args))
    model = model_from_mapping(mapping)
    tau = args.tau_cycles * model.default_tau
    res = gp_closed_form(model, tau=tau, steps=args.steps, with_oracle=not args.no_oracle and not is_maximally_mixed(model))
    scale = math.pi if args.units == "pi" else 1.0
    unit = "pi" if args.units == "pi" else "rad"
    print(f"phase = {res.phase:.12g} rad = {res.phase / math.pi:.12g} pi")
    if res.degenerate:
        print("degenerate: maximally mixed spin; degenerate-case assignment")
    else:
        print(f"branch_plus = {res.branch_terms[0]:.12g}")
        print(f"branch_minus = {res.branch_terms[1]:.12g}")
        print(f"sum = {res.total:.12g}")
        print(f"steps = {res.steps}  step_delta = {res.step_delta:.3g} rad")
    if res.oracle_phase is not None:
        print(f"oracle = {res.oracle_phase / scale:.12g} {unit}  |closed - oracle| + step_delta = {res.oracle_error_estimate:.3g} rad")
    if args.out:
        row = [res.phase, res.phase / math.pi, res.total.real, res.total.imag, res.oracle_phase if res.oracle_phase is not None else ""]
        header = ["phase", "phase_over_pi", "sum_re", "sum_im", "oracle_phase"]
        lines = ",".join(header) + "\n" + ",".join(format_real(v) if v != "" else "" for v in row) + "\n"
        _emit(lines, args.out)
    return 0


def cmd_sweep(args) -> int:
    fixed = _mapping(args)
    plan = SweepSpec(axis1=args.axis1, axis2=args.axis2, fixed=fixed, quantity=args.quantity, steps=args.steps)
    _emit(sweep_csv(plan), args.out)
    return 0


def cmd_trajectory(args) -> int:
    model = model_from_mapping(_mapping(args))
    grid = TimeGrid(tau=model.default_tau, cycles=args.tau_cycles, steps=args.steps)
    tr = trajectory(model, grid)
    if args.out is None:
        write_trajectory_csv(tr, sys.stdout)
    else:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        write_trajectory_csv(tr, args.out)
    return 0


def cmd_series(args) -> int:
    model = model_from_mapping(_mapping(args))
    s = gp_vs_time(model, args.tau_cycles, args.steps, args.points_per_cycle)
    lines = ["t,phase,phase_over_pi"]
    lines += [f"{format_real(t)},{format_real(ph)},{format_real(ph / math.pi)}" for t, ph in zip(s.times, s.unwrapped)]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_preset(args) -> int:
    outdir = args.out or Path(".")
    for path in run_preset(args.name, outdir, steps=args.steps):
        print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="geophase", description="Geometric phase of a spin-1/2 in a composite environment.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gp", help="single geometric-phase evaluation")
    _add_model_flags(p)
    p.add_argument("--preset", choices=sorted(SINGLE_PRESETS), default=None)
    p.add_argument("--no-oracle", action="store_true", help="skip the discretized cross-check")
    p.set_defaults(func=cmd_gp)

    p = sub.add_parser("sweep", help="2-D parameter sweep to CSV")
    _add_model_flags(p)
    p.add_argument("--axis1", type=_axis, required=True, help="name:start:stop:count")
    p.add_argument("--axis2", type=_axis, required=True, help="name:start:stop:count")
    p.add_argument("--quantity", choices=("gp_entangled", "gp_product"), default="gp_entangled")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("trajectory", help="Bloch trajectory CSV (t,x,y,z,purity)")
    _add_model_flags(p)
    p.set_defaults(func=cmd_trajectory)

    p = sub.add_parser("series", help="geometric phase at successive quasi-cycles")
    _add_model_flags(p)
    p.add_argument("--points-per-cycle", type=int, default=1)
    p.set_defaults(func=cmd_series)

    p = sub.add_parser("preset", help="reproduce a named figure preset")
    p.add_argument("name", choices=sorted(PRESETS, key=lambda s: int(s[3:])))
    p.add_argument("--out", type=Path, default=None, help="output directory")
    p.add_argument("--steps", type=int, default=None, help="time samples per quasi-cycle (default 512)")
    p.set_defaults(func=cmd_preset)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ConvergenceError, DegenerateEvolution) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
