"""Eigen-decomposition of the spin-1 density along a trajectory.

Gauge: the |1> component of every eigenvector is real and non-negative and
the |0> component carries the coherence phase ``exp(-i Omega_1 t + i vartheta)``.
Branches are labelled by eigenvalue order at the first non-degenerate sample
and then followed by maximal overlap, so a genuine level crossing keeps the
eigenvector continuous rather than the ordering.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .decoherence import DecoherenceTrace, DegenerateTrace
from .density import density_from_gamma, spin1_blocks
from .params import EntangledInit, TimeGrid, ValidatedModel

DEGENERATE_GAP = 1e-9


def _mixing_cos2(d, c_abs):
    """|<0|v_+>|^2 and |<0|v_->|^2 for rho = [[a, c], [c*, 1-a]], ``d = 2a - 1``.

    Written without the cancellation in ``S - |d|`` so that ``c -> 0`` gives
    the correct pure-basis limits.
    """
    d = np.asarray(d, dtype=float)
    c2 = 4.0 * np.asarray(c_abs, dtype=float) ** 2
    s = np.sqrt(d * d + c2)
    big = (s + np.abs(d)) ** 2
    with np.errstate(invalid="ignore", divide="ignore"):
        # both shares computed directly; 1 - x would erase the smaller one
        small_share = c2 / (c2 + big)
        big_share = big / (c2 + big)
    cos2_plus = np.where(d >= 0, big_share, small_share)
    cos2_minus = np.where(d >= 0, small_share, big_share)
    flat = s == 0
    return np.where(flat, 0.5, cos2_plus), np.where(flat, 0.5, cos2_minus)


@dataclass(frozen=True)
class SpectralSample:
    eps_plus: float
    eps_minus: float
    vec_plus: np.ndarray
    vec_minus: np.ndarray
    degenerate: bool


def eigensystem(rho: np.ndarray, phase: float, previous: SpectralSample | None = None) -> SpectralSample:
    """Eigenpairs of one 2x2 density in the fixed gauge.

    ``phase`` is ``-Omega_1 t + vartheta(t)``; it is only used when the
    coherence vanishes and its own argument is undefined.  With ``previous``
    the branch labels follow maximal overlap instead of eigenvalue order.
    """
    rho = np.asarray(rho)
    a = float(rho[0, 0].real)
    c = complex(rho[0, 1])
    eps, vecs, gap = _eigen_arrays(np.array([a]), np.array([c]), np.array([phase]))
    sample = SpectralSample(
        eps_plus=float(eps[0, 0]),
        eps_minus=float(eps[0, 1]),
        vec_plus=vecs[0, 0],
        vec_minus=vecs[0, 1],
        degenerate=bool(gap[0] < DEGENERATE_GAP),
    )
    if previous is not None:
        same = abs(np.vdot(previous.vec_plus, sample.vec_plus)) + abs(np.vdot(previous.vec_minus, sample.vec_minus))
        cross = abs(np.vdot(previous.vec_plus, sample.vec_minus)) + abs(np.vdot(previous.vec_minus, sample.vec_plus))
        if cross > same:
            sample = SpectralSample(sample.eps_minus, sample.eps_plus, sample.vec_minus, sample.vec_plus, sample.degenerate)
    return sample


def _eigen_arrays(a, c, phase):
    a = np.asarray(a, dtype=float)
    c = np.asarray(c, dtype=complex)
    d = 2 * a - 1
    c_abs = np.abs(c)
    s = np.sqrt(d * d + 4 * c_abs**2)
    eps = np.stack([0.5 + 0.5 * s, 0.5 - 0.5 * s], axis=-1)
    cos2p, cos2m = _mixing_cos2(d, c_abs)
    ph = np.where(c_abs > 0, np.angle(c), phase)
    e = np.exp(1j * ph)
    up, um = np.sqrt(cos2p), np.sqrt(cos2m)
    vecs = np.empty(a.shape + (2, 2), dtype=complex)
    vecs[..., 0, 0] = e * up
    vecs[..., 0, 1] = um
    vecs[..., 1, 0] = -e * um
    vecs[..., 1, 1] = up
    return eps, vecs, s


def mixing_angles(eps: float, model: ValidatedModel, r: float) -> float:
    """``cos theta`` for the eigenvalue ``eps`` of the entangled family.

    ``r sin(theta0) / sqrt(r^2 sin^2 theta0 + [(2 eps - 1) + (1 - 2 lambda0) cos theta0]^2)``
    """
    init = model.init
    if not isinstance(init, EntangledInit):
        raise TypeError("mixing_angles is defined for the entangled family")
    num = r * np.sin(init.theta0)
    bracket = (2 * eps - 1) + (1 - 2 * init.lambda0) * np.cos(init.theta0)
    den = np.sqrt(num * num + bracket * bracket)
    if den == 0:
        raise ValueError("mixing angle undefined at a fully degenerate point")
    return float(abs(num) / den)


@dataclass(frozen=True)
class SpectralTrajectory:
    grid: TimeGrid
    times: np.ndarray
    eps_plus: np.ndarray
    eps_minus: np.ndarray
    cos_theta_plus: np.ndarray
    cos_theta_minus: np.ndarray
    eigvec_plus: np.ndarray  # (n, 2)
    eigvec_minus: np.ndarray
    degenerate_at: tuple[int, ...]
    crossings: tuple[int, ...]


def spectral_trajectory(model: ValidatedModel, grid: TimeGrid, trace: DecoherenceTrace) -> SpectralTrajectory:
    t = trace.times
    if len(t) != grid.intervals + 1:
        raise ValueError("grid does not match the decoherence trace")
    a, kappa = spin1_blocks(model)
    rho = density_from_gamma(t, trace.gamma_values, model)
    c = rho[:, 0, 1]
    phase = -model.params.omega1 * t + trace.theta_values
    eps, vecs, gap = _eigen_arrays(np.full_like(t, a), c, phase)

    degenerate = gap < DEGENERATE_GAP
    deg_idx = np.flatnonzero(degenerate)
    if degenerate.all():
        raise DegenerateTrace("every sample is degenerate; no eigenbranches to follow")
    if deg_idx.size:
        # one-sided limit: mixing at a degenerate sample comes from its nearest
        # regular neighbour, the phase from the (already continued) vartheta
        good = np.flatnonzero(~degenerate)
        for j in deg_idx:
            left, right = good[good < j], good[good > j]
            k = left[-1] if (j > 0 and left.size) else right[0]
            up, um = abs(vecs[k, 0, 0]), abs(vecs[k, 0, 1])
            e = np.exp(1j * phase[j])
            vecs[j, 0] = [e * up, um]
            vecs[j, 1] = [-e * um, up]

    swap = _tracking_swaps(vecs)
    parity = np.concatenate([[0], np.cumsum(swap) % 2]).astype(bool)
    crossings = tuple(int(j) + 1 for j in np.flatnonzero(swap))
    eps[parity] = eps[parity][:, ::-1]
    vecs[parity] = vecs[parity][:, ::-1]

    return SpectralTrajectory(
        grid=grid,
        times=t,
        eps_plus=eps[:, 0],
        eps_minus=eps[:, 1],
        cos_theta_plus=np.abs(vecs[:, 0, 0]),
        cos_theta_minus=np.abs(vecs[:, 1, 0]),
        eigvec_plus=vecs[:, 0],
        eigvec_minus=vecs[:, 1],
        degenerate_at=tuple(int(j) for j in deg_idx),
        crossings=crossings,
    )


def _tracking_swaps(vecs: np.ndarray) -> np.ndarray:
    """Per-step flag: does branch order flip between sample j and j+1?

    ``vecs`` is (n, 2 branches, 2 components), in sorted order per sample.
    """
    a, b = vecs[:-1].conj(), vecs[1:]

    def ov(i, k):
        return np.abs(a[:, i, 0] * b[:, k, 0] + a[:, i, 1] * b[:, k, 1])

    return (ov(0, 1) + ov(1, 0)) > (ov(0, 0) + ov(1, 1))
