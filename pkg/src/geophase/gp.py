"""Kinematic geometric phase of spin 1.

Two independent routes:

* :func:`gp_closed_form` sums the two eigenbranch terms
  ``sqrt(eps_k(0) eps_k(tau)) <v_k(0)|v_k(tau)> exp(i int (Omega_1 - dvartheta/dt) cos^2 theta_k dt)``
  using the analytic spectral data and Simpson quadrature.
* :func:`gp_discretized` evaluates the defining functional directly from
  sampled density matrices with numerically diagonalised, overlap-tracked
  eigenvectors and a Bargmann (Pancharatnam) product for the connection.
  It is gauge invariant by construction and serves as the oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
from scipy.integrate import simpson

from .decoherence import DegenerateTrace, entangled_frequency, polar_trace
from .density import reduced_density_spin1
from .params import EntangledInit, TimeGrid, ValidatedModel
from .spectral import DEGENERATE_GAP, spectral_trajectory

TWO_PI = 2 * math.pi
MES_TOLERANCE = 1e-12


class DegenerateEvolution(RuntimeError):
    """The reduced state is maximally mixed over the whole interval."""


class ConvergenceError(RuntimeError):
    """Step halving did not reach the requested tolerance."""


class BranchTrackingError(RuntimeError):
    """Eigenbranches cannot be followed through an unresolved degeneracy."""


def wrap_phase(x):
    """Reduce to ``[0, 2 pi)``."""
    y = np.mod(x, TWO_PI)
    y = np.where(y >= TWO_PI, 0.0, y)
    return float(y) if np.ndim(y) == 0 else y


def phase_distance(a, b):
    """Distance on the circle between two phases."""
    return np.abs(np.angle(np.exp(1j * (np.asarray(a) - np.asarray(b)))))


@dataclass(frozen=True)
class GpResult:
    phase: float
    branch_terms: tuple[complex, complex]
    total: complex
    degenerate: bool = False
    steps: int = 0
    step_delta: float = 0.0
    oracle_phase: float | None = None
    oracle_error_estimate: float | None = None

    @property
    def defined(self) -> bool:
        return not math.isnan(self.phase)

    @property
    def phase_over_pi(self) -> float:
        return self.phase / math.pi


def gp_unitary_reference(theta0: float) -> float:
    """Pure spin-1/2 precession: ``pi (1 - cos theta0)`` mod 2 pi."""
    return wrap_phase(math.pi * (1 - math.cos(theta0)))


def gp_product_isolated(p: float) -> float:
    """Isolated product state: ``2 pi (1 - p)`` mod 2 pi."""
    return wrap_phase(TWO_PI * (1 - p))


def is_maximally_mixed(model: ValidatedModel) -> bool:
    """True when spin 1 stays at the Bloch-ball centre for all t.

    For ``lambda0 = 1/2`` the coherence is ``-i D(t) sin(w t)``, which vanishes
    identically when ``w = 0`` (isolated, or a bath shift cancelling ``2 chi``).
    """
    init = model.init
    if not isinstance(init, EntangledInit) or abs(init.lambda0 - 0.5) > MES_TOLERANCE:
        return False
    return entangled_frequency(model) == 0.0 or math.sin(init.theta0) < MES_TOLERANCE


def gp_degenerate_mes(model: ValidatedModel, tau: float | None = None) -> GpResult:
    """Degenerate-case assignment ``pi/2`` for a maximally mixed spin 1.

    This is the value assigned to the fully degenerate case, not a limit of
    the two-branch formula.
    """
    if not is_maximally_mixed(model):
        raise ValueError("gp_degenerate_mes needs a state that is maximally mixed at all times")
    return GpResult(phase=math.pi / 2, branch_terms=(0j, 0j), total=0j, degenerate=True)


def _intervals_for(model: ValidatedModel, tau: float, steps_per_cycle: int) -> int:
    n = max(16, math.ceil(steps_per_cycle * tau / model.default_tau - 1e-9))
    return n + (n % 2)


def _closed_once(model: ValidatedModel, tau: float, intervals: int):
    grid = TimeGrid(tau=tau, cycles=1, steps=intervals)
    trace = polar_trace(model, grid)
    sp = spectral_trajectory(model, grid, trace)
    t = trace.times
    drive = model.params.omega1 - trace.theta_dot_values
    terms = []
    for eps, vec, cos_t in (
        (sp.eps_plus, sp.eigvec_plus, sp.cos_theta_plus),
        (sp.eps_minus, sp.eigvec_minus, sp.cos_theta_minus),
    ):
        weight = math.sqrt(max(eps[0] * eps[-1], 0.0))
        overlap = np.vdot(vec[0], vec[-1])
        phi = simpson(drive * cos_t**2, x=t)
        terms.append(complex(weight * overlap * np.exp(1j * phi)))
    total = terms[0] + terms[1]
    phase = wrap_phase(np.angle(total)) if abs(total) > 1e-14 else math.nan
    return phase, (terms[0], terms[1]), total


def _refined(model, tau, steps, tol, max_steps, refine):
    n = _intervals_for(model, tau, steps)
    phase, terms, total = _closed_once(model, tau, n)
    delta = 0.0
    per_cycle = steps
    while refine:
        n2 = _intervals_for(model, tau, per_cycle * 2)
        phase2, terms2, total2 = _closed_once(model, tau, n2)
        delta = float(phase_distance(phase, phase2)) if not math.isnan(phase) else 0.0
        phase, terms, total, n, per_cycle = phase2, terms2, total2, n2, per_cycle * 2
        if delta < tol or math.isnan(phase):
            break
        if per_cycle >= max_steps:
            raise ConvergenceError(f"step halving stalled at {delta:.3g} rad (steps={per_cycle})")
    return phase, terms, total, n, delta


def gp_closed_form(
    model: ValidatedModel,
    tau: float | None = None,
    steps: int = 512,
    tol: float = 1e-8,
    max_steps: int = 2**15,
    refine: bool = True,
    with_oracle: bool = False,
) -> GpResult:
    """Geometric phase at time ``tau`` (default one quasi-cycle) from the branch sum.

    ``steps`` counts intervals per quasi-cycle.  With ``refine`` the grid is
    doubled until two successive phases differ by less than ``tol``;
    otherwise :class:`ConvergenceError`.
    """
    tau = model.default_tau if tau is None else float(tau)
    if tau <= 0:
        raise ValueError("tau must be positive")
    if is_maximally_mixed(model):
        return gp_degenerate_mes(model, tau)

    try:
        phase, terms, total, n, delta = _refined(model, tau, steps, tol, max_steps, refine)
    except DegenerateTrace as exc:
        raise DegenerateEvolution(str(exc)) from exc
    result = GpResult(phase=phase, branch_terms=terms, total=total, steps=n, step_delta=delta)
    if with_oracle:
        oracle = gp_discretized(lambda t: reduced_density_spin1(t, model), tau, n)
        err = float(phase_distance(phase, oracle)) + delta
        result = replace(result, oracle_phase=oracle, oracle_error_estimate=err)
    return result


# ---------------------------------------------------------------------------
# discretized definitional route


def tracked_eigensystem(rhos: np.ndarray):
    """Diagonalise a sampled path and follow branches by overlap.

    Returns ``(evals, evecs)`` shaped (n, 2) and (n, 2, 2) with eigenvectors
    in the columns, as :func:`numpy.linalg.eigh`.  Degenerate samples take the
    eigenbasis of the one-sided derivative of ``rho`` (second-order stencil),
    which is the limit of the eigenbasis as the degeneracy is approached.
    """
    rhos = np.asarray(rhos, dtype=complex)
    n = len(rhos)
    evals, evecs = np.linalg.eigh(rhos)
    gap = evals[:, 1] - evals[:, 0]
    degenerate = gap < DEGENERATE_GAP
    if degenerate.all() or n < 3:
        raise BranchTrackingError("no non-degenerate sample to anchor the branches; refine or change parameters")
    for j in np.flatnonzero(degenerate):
        if j == 0:
            drho = -3 * rhos[0] + 4 * rhos[1] - rhos[2]
        elif j == n - 1:
            drho = 3 * rhos[-1] - 4 * rhos[-2] + rhos[-3]
        else:
            drho = rhos[j + 1] - rhos[j - 1]
        w, v = np.linalg.eigh(drho)
        if w[1] - w[0] < DEGENERATE_GAP * 1e-3:
            raise BranchTrackingError(f"unresolved degeneracy at sample {j}; refine the grid")
        evecs[j] = v

    ov = np.abs(np.einsum("jkb,jkc->jbc", evecs[:-1].conj(), evecs[1:]))
    swap = (ov[:, 0, 1] + ov[:, 1, 0]) > (ov[:, 0, 0] + ov[:, 1, 1])
    parity = np.concatenate([[False], (np.cumsum(swap) % 2).astype(bool)])
    evals[parity] = evals[parity][:, ::-1]
    evecs[parity] = evecs[parity][:, :, ::-1]
    return evals, evecs


def discretized_sum(evals: np.ndarray, evecs: np.ndarray) -> complex:
    """Weighted branch sum with Bargmann-product connection factors."""
    total = 0j
    for k in range(evals.shape[1]):
        v = evecs[:, :, k]
        links = np.einsum("jk,jk->j", v[:-1].conj(), v[1:])
        mags = np.abs(links)
        if np.any(mags < 1e-8):
            raise BranchTrackingError(f"branch {k} loses overlap between samples; refine the grid")
        transport = np.prod(np.conj(links) / mags)
        weight = math.sqrt(max(evals[0, k] * evals[-1, k], 0.0))
        total += weight * np.vdot(v[0], v[-1]) * transport
    return complex(total)


def gp_from_eigensystem(evals: np.ndarray, evecs: np.ndarray) -> float:
    total = discretized_sum(evals, evecs)
    return wrap_phase(np.angle(total)) if abs(total) > 1e-14 else math.nan


def gp_discretized(sampler: Callable[[np.ndarray], np.ndarray], tau: float, steps: int) -> float:
    """Definitional geometric phase from ``steps`` intervals on ``[0, tau]``."""
    if steps < 64:
        raise ValueError("gp_discretized needs steps >= 64")
    t = np.linspace(0.0, tau, steps + 1)
    evals, evecs = tracked_eigensystem(sampler(t))
    return gp_from_eigensystem(evals, evecs)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GpSeries:
    times: np.ndarray
    phases: np.ndarray
    unwrapped: np.ndarray


def gp_vs_time(model: ValidatedModel, cycles: int, steps_per_cycle: int = 512, points_per_cycle: int = 1, refine: bool = True) -> GpSeries:
    """Phase at ``tau_m = m * 2 pi / Omega_1`` (and optional sub-cycle points)."""
    if cycles < 1:
        raise ValueError("cycles must be >= 1")
    taus = model.default_tau * np.arange(1, cycles * points_per_cycle + 1) / points_per_cycle
    phases = np.array([gp_closed_form(model, tau, steps_per_cycle, refine=refine).phase for tau in taus])
    return GpSeries(times=taus, phases=phases, unwrapped=np.unwrap(phases))
