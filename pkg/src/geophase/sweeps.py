"""Parameter sweeps, time series and named figure presets with CSV output."""

from __future__ import annotations

import csv
import io
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .density import format_real, trajectory
from .gp import ConvergenceError, gp_closed_form, gp_vs_time
from .params import TimeGrid, ValidationError, model_from_mapping

AXIS_DOMAINS = {
    "lambda0": (0.0, 1.0),
    "concurrence": (0.0, 1.0),
    "theta0": (0.0, math.pi),
    "gamma0": (0.0, math.inf),
    "chi": (-math.inf, math.inf),
    "p": (0.0, 1.0),
    "q": (0.0, 1.0),
    "cutoff": (0.0, math.inf),
}
CONCURRENCE_BRANCH = "lambda0 = (1 - sqrt(1 - C^2)) / 2  (lambda0 <= 1/2 branch)"


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    count: int

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class SweepSpec:
    axis1: Axis
    axis2: Axis
    fixed: dict = field(default_factory=dict)
    quantity: str = "gp_entangled"
    steps: int = 512

    def __post_init__(self):
        if self.axis1.name == self.axis2.name:
            raise ValidationError("sweep axes must name distinct parameters")
        if self.quantity not in ("gp_entangled", "gp_product"):
            raise ValidationError("2-D sweeps produce gp_entangled or gp_product surfaces")
        for ax in (self.axis1, self.axis2):
            if ax.name not in AXIS_DOMAINS:
                raise ValidationError(f"unknown sweep axis {ax.name!r}")
            if ax.count < 2:
                raise ValidationError("axis counts must be >= 2")
            lo, hi = AXIS_DOMAINS[ax.name]
            if not (lo <= min(ax.start, ax.stop) and max(ax.start, ax.stop) <= hi):
                raise ValidationError(f"axis {ax.name} range outside [{lo}, {hi}]")


def worker_count() -> int:
    env = os.environ.get("GEOPHASE_THREADS")
    cap = os.cpu_count() or 1
    if env:
        try:
            return max(1, min(int(env), cap))
        except ValueError:
            pass
    return cap


def _cell(job):
    """Evaluate one sweep cell; returns phase or an error string."""
    mapping, steps, refine = job
    try:
        model = model_from_mapping(mapping)
        return gp_closed_form(model, steps=steps, refine=refine).phase
    except (ValidationError, ConvergenceError, ValueError, RuntimeError) as exc:
        return f"{type(exc).__name__}: {exc}"


def _map(jobs: list, workers: int | None = None) -> list:
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(jobs) < 2:
        return [_cell(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_cell, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


def _with_state_keys(mapping: dict, quantity: str) -> dict:
    m = dict(mapping)
    if quantity == "gp_product":
        m.pop("lambda0", None)
        m.pop("concurrence", None)
        m.setdefault("q", 0.5)
    return m


def sweep_cells(plan: SweepSpec, refine: bool = True, workers: int | None = None):
    """Row-major ``[(v1, v2, phase_or_error), ...]``."""
    jobs, coords = [], []
    for v1 in plan.axis1.values():
        for v2 in plan.axis2.values():
            m = dict(plan.fixed)
            m[plan.axis1.name] = float(v1)
            m[plan.axis2.name] = float(v2)
            jobs.append((_with_state_keys(m, plan.quantity), plan.steps, refine))
            coords.append((float(v1), float(v2)))
    out = _map(jobs, workers)
    return [(a, b, r) for (a, b), r in zip(coords, out)]


def sweep_csv(plan: SweepSpec, refine: bool = True, workers: int | None = None, stderr=None) -> str:
    """CSV text: header ``<axis1>,<axis2>,phase_over_pi``; failed cells left empty."""
    stderr = stderr or sys.stderr
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([plan.axis1.name, plan.axis2.name, "phase_over_pi"])
    for v1, v2, r in sweep_cells(plan, refine, workers):
        if isinstance(r, str) or math.isnan(r):
            print(f"cell {plan.axis1.name}={v1!r} {plan.axis2.name}={v2!r}: {r if isinstance(r, str) else 'undefined phase'}", file=stderr)
            cell = ""
        else:
            cell = format_real(r / math.pi)
        w.writerow([format_real(v1), format_real(v2), cell])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# curves: trajectories, time series, 1-D phase curves


@dataclass(frozen=True)
class Curve:
    label: str
    mapping: dict


@dataclass(frozen=True)
class CurveSet:
    quantity: str  # trajectory | gp_vs_time | gp_vs_param
    curves: tuple[Curve, ...]
    cycles: int = 1
    points_per_cycle: int = 1
    param: Axis | None = None
    steps: int = 512


def curves_csv(cs: CurveSet, refine: bool = True, stderr=None) -> str:
    stderr = stderr or sys.stderr
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if cs.quantity == "trajectory":
        w.writerow(["curve", "t", "x", "y", "z", "purity"])
        for c in cs.curves:
            model = model_from_mapping(c.mapping)
            grid = TimeGrid(tau=model.default_tau, cycles=cs.cycles, steps=cs.steps)
            tr = trajectory(model, grid)
            for t, (x, y, z), pur in zip(tr.times, tr.points, tr.purity):
                w.writerow([c.label] + [format_real(v) for v in (t, x, y, z, pur)])
    elif cs.quantity == "gp_vs_time":
        w.writerow(["curve", "t", "phase", "phase_over_pi"])
        for c in cs.curves:
            model = model_from_mapping(c.mapping)
            s = gp_vs_time(model, cs.cycles, cs.steps, cs.points_per_cycle, refine=refine)
            for t, ph in zip(s.times, s.unwrapped):
                w.writerow([c.label, format_real(t), format_real(ph), format_real(ph / math.pi)])
    elif cs.quantity == "gp_vs_param":
        ax = cs.param
        w.writerow(["curve", ax.name, "phase", "phase_over_pi"])
        for c in cs.curves:
            jobs = [({**c.mapping, ax.name: float(v)}, cs.steps, refine) for v in ax.values()]
            for v, r in zip(ax.values(), _map(jobs)):
                if isinstance(r, str) or math.isnan(r):
                    print(f"curve {c.label} {ax.name}={v!r}: {r}", file=stderr)
                    w.writerow([c.label, format_real(v), "", ""])
                else:
                    w.writerow([c.label, format_real(v), format_real(r), format_real(r / math.pi)])
    else:
        raise ValidationError(f"unknown curve quantity {cs.quantity!r}")
    return buf.getvalue()


# ---------------------------------------------------------------------------
# presets

PI = math.pi
OHMIC = {"gamma0": 0.02, "cutoff": 20.0, "chi": 0.1, "regime": "ohmic"}


def _surface(a1, a2, fixed, quantity="gp_entangled"):
    return SweepSpec(axis1=a1, axis2=a2, fixed=fixed, quantity=quantity)


PRESETS: dict[str, object] = {
    "fig1": _surface(
        Axis("concurrence", 1.0, 0.06, 2),
        Axis("theta0", 0.0, PI, 64),
        {"gamma0": 0.0, "chi": 0.0, "regime": "isolated"},
    ),
    "fig2": CurveSet(
        "trajectory",
        tuple(
            Curve(f"C={c}", {"concurrence": c, "theta0": PI / 2, "gamma0": 0.0, "chi": 0.0, "regime": "isolated"})
            for c in (1.0, 0.95, 0.8, 0.43)
        ),
    ),
    "fig3": _surface(
        Axis("concurrence", 0.0, 1.0, 64),
        Axis("theta0", 0.0, PI, 64),
        {"gamma0": 0.0, "chi": 0.1, "regime": "chi-only"},
    ),
    "fig4": _surface(Axis("concurrence", 0.0, 1.0, 64), Axis("theta0", 0.0, PI, 64), dict(OHMIC)),
    "fig5": CurveSet(
        "gp_vs_time",
        tuple(Curve(f"lambda0={lam}", {"lambda0": lam, "theta0": PI / 5, **OHMIC}) for lam in (0.2, 0.1, 0.01)),
        cycles=5,
        points_per_cycle=8,
    ),
    "fig6": CurveSet(
        "trajectory",
        tuple(Curve(f"C={c}", {"concurrence": c, "theta0": PI / 5, **OHMIC}) for c in (0.91, 0.71, 0.43)),
        cycles=5,
    ),
    "fig7": _surface(
        Axis("gamma0", 0.0, 0.05, 64),
        Axis("concurrence", 0.0, 1.0, 64),
        {"cutoff": 20.0, "chi": 0.0, "theta0": PI / 3, "regime": "ohmic"},
    ),
    "fig8": _surface(
        Axis("q", 0.0, 1.0, 64),
        Axis("theta0", 0.0, PI, 64),
        {"gamma0": 0.0, "chi": 0.0, "cutoff": 20.0, "regime": "isolated"},
        quantity="gp_product",
    ),
    "fig9": CurveSet(
        "gp_vs_time",
        (
            Curve("q=0.05;theta0=pi/5", {"q": 0.05, "theta0": PI / 5, **OHMIC}),
            Curve("q=0.4;theta0=pi/5", {"q": 0.4, "theta0": PI / 5, **OHMIC}),
            Curve("q=0.05;theta0=pi/3", {"q": 0.05, "theta0": PI / 3, **OHMIC}),
        ),
        cycles=5,
        points_per_cycle=8,
    ),
    "fig10": CurveSet(
        "trajectory",
        (
            Curve("q=0.05;theta0=pi/5", {"q": 0.05, "theta0": PI / 5, **OHMIC}),
            Curve("q=0.4;theta0=pi/5", {"q": 0.4, "theta0": PI / 5, **OHMIC}),
            Curve("q=0.05;theta0=pi/3", {"q": 0.05, "theta0": PI / 3, **OHMIC}),
        ),
        cycles=5,
    ),
    "fig11": CurveSet(
        "gp_vs_param",
        tuple(
            Curve(f"q={q};theta0=pi/3;chi={chi}", {"q": q, "theta0": PI / 3, "chi": chi, "cutoff": 20.0, "regime": "ohmic"})
            for q in (0.4, 0.01)
            for chi in (0.0, 0.1)
        ),
        param=Axis("gamma0", 0.0, 0.05, 64),
    ),
}

SINGLE_PRESETS = {
    "mes-isolated": {"lambda0": 0.5, "theta0": PI / 3, "gamma0": 0.0, "chi": 0.0, "regime": "isolated"},
    "werner-theta0": {"lambda0": 0.3, "theta0": 0.0, "gamma0": 0.0, "chi": 0.0, "regime": "isolated"},
    "werner-theta-pi": {"lambda0": 0.3, "theta0": PI, "gamma0": 0.0, "chi": 0.0, "regime": "isolated"},
    "fig4-point": {"lambda0": 0.2, "theta0": PI / 5, **OHMIC},
}


def preset_csv(name: str, refine: bool = True, steps: int | None = None, stderr=None) -> str:
    if name not in PRESETS:
        raise ValidationError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    plan = PRESETS[name]
    if steps is not None:
        plan = replace(plan, steps=steps)
    if isinstance(plan, SweepSpec):
        return sweep_csv(plan, refine=refine, stderr=stderr)
    return curves_csv(plan, refine=refine, stderr=stderr)


def preset_sidecar(name: str) -> str:
    plan = PRESETS[name]
    lines = [f"preset = {name}"]
    if isinstance(plan, SweepSpec):
        lines += [
            f"quantity = {plan.quantity}",
            f"axis1 = {plan.axis1.name} {plan.axis1.start!r}..{plan.axis1.stop!r} x{plan.axis1.count}",
            f"axis2 = {plan.axis2.name} {plan.axis2.start!r}..{plan.axis2.stop!r} x{plan.axis2.count}",
            f"steps = {plan.steps}",
        ]
        lines += [f"{k} = {v!r}" for k, v in sorted(plan.fixed.items())]
        uses_c = "concurrence" in (plan.axis1.name, plan.axis2.name) or "concurrence" in plan.fixed
    else:
        lines += [f"quantity = {plan.quantity}", f"cycles = {plan.cycles}", f"steps = {plan.steps}"]
        if plan.quantity == "gp_vs_time":
            lines.append(f"points_per_cycle = {plan.points_per_cycle}")
        if plan.param is not None:
            lines.append(f"param = {plan.param.name} {plan.param.start!r}..{plan.param.stop!r} x{plan.param.count}")
        for c in plan.curves:
            lines.append(f"curve {c.label} = " + ", ".join(f"{k}={v!r}" for k, v in sorted(c.mapping.items())))
        uses_c = any("concurrence" in c.mapping for c in plan.curves)
    if uses_c:
        lines.append(f"concurrence_branch = {CONCURRENCE_BRANCH}")
    lines.append("omega1 = 1.0  # all frequencies and times in units of omega1")
    return "\n".join(lines) + "\n"


def run_preset(name: str, outdir: str | Path, refine: bool = True, steps: int | None = None, stderr=None) -> list[Path]:
    """Write ``<name>.csv`` and ``<name>.params.txt`` into ``outdir``."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    text = preset_csv(name, refine=refine, steps=steps, stderr=stderr)
    csv_path = outdir / f"{name}.csv"
    side_path = outdir / f"{name}.params.txt"
    csv_path.write_bytes(text.encode())
    side_path.write_bytes(preset_sidecar(name).encode())
    return [csv_path, side_path]

