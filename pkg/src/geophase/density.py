"""Two-spin and one-spin reduced density matrices, partial trace, Bloch coordinates.

Basis order is |00>, |01>, |10>, |11> for the pair and |0>, |1> for spin 1.
Functions accept scalar or array ``t``; arrays give a leading time axis.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import decoherence
from .params import EntangledInit, ProductInit, SystemParams, TimeGrid, ValidatedModel

# (row, col) of each F factor in the 4x4 matrix, zero-based
F_SLOTS = {"12": (0, 1), "13": (0, 2), "14": (0, 3), "23": (1, 2), "24": (1, 3), "34": (2, 3)}


def _ones(t):
    return np.ones_like(np.asarray(t, dtype=float), dtype=complex)


@dataclass(frozen=True)
class FFactorSet:
    """Six decoherence/dissipation factors as functions of time."""

    f12: Callable = _ones
    f13: Callable = _ones
    f14: Callable = _ones
    f23: Callable = _ones
    f24: Callable = _ones
    f34: Callable = _ones

    def evaluate(self, t) -> dict[str, np.ndarray]:
        return {k: np.asarray(getattr(self, "f" + k)(t), dtype=complex) * _ones(t) for k in F_SLOTS}

    @classmethod
    def all_ones(cls) -> "FFactorSet":
        return cls()

    @classmethod
    def spin2_uncoupled(cls, gamma0: float, cutoff: float) -> "FFactorSet":
        """Only spin 1 sees the bath: coherences that flip spin 1 decay."""
        d = lambda t: decoherence.envelope(t, gamma0, cutoff) + 0j  # noqa: E731
        return cls(f13=d, f14=d, f23=d, f24=d)

    @classmethod
    def ohmic_inferred(cls, gamma0: float, cutoff: float) -> "FFactorSet":
        """Both spins equally coupled; consistent with the ohmic closed form.

        Dephasing grows with the squared difference of total sigma_z charge
        (|00>: 2, |01>,|10>: 0, |11>: -2) and the bath shifts the spin-spin
        coupling by ``-gamma0 Lambda / 2``. Both factors are Schur multipliers
        by positive matrices, so positivity is preserved.
        """
        shift = gamma0 * cutoff

        def d(t):
            return decoherence.envelope(t, gamma0, cutoff)

        return cls(
            f12=lambda t: d(t) * np.exp(1j * shift * np.asarray(t)),
            f13=lambda t: d(t) * np.exp(1j * shift * np.asarray(t)),
            f14=lambda t: d(t) ** 4 + 0j,
            f24=lambda t: d(t) * np.exp(-1j * shift * np.asarray(t)),
            f34=lambda t: d(t) * np.exp(-1j * shift * np.asarray(t)),
        )


def bipartite_density(t, coefficients, params: SystemParams, F: FFactorSet | None = None) -> np.ndarray:
    """Reduced two-spin density matrix after tracing out the bath."""
    coeffs = np.asarray(coefficients, dtype=complex)
    norm = float(np.sum(np.abs(coeffs) ** 2))
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(f"state coefficients not normalized (sum |c|^2 = {norm})")
    F = F or FFactorSet.all_ones()
    t_arr = np.asarray(t, dtype=float)
    w1, w2, chi = params.omega1, params.omega2, params.chi
    freq = {
        "12": 2 * chi + w2,
        "13": 2 * chi + w1,
        "14": w1 + w2,
        "23": w1 - w2,
        "24": w1 - 2 * chi,
        "34": w2 - 2 * chi,
    }
    fv = F.evaluate(t_arr)
    rho = np.zeros(t_arr.shape + (4, 4), dtype=complex)
    outer = np.outer(coeffs, coeffs.conj())
    for i in range(4):
        rho[..., i, i] = outer[i, i].real
    for key, (i, j) in F_SLOTS.items():
        val = outer[i, j] * np.exp(-1j * freq[key] * t_arr) * fv[key]
        rho[..., i, j] = val
        rho[..., j, i] = np.conj(val)
    return rho


def trace_out_spin2(rho4: np.ndarray) -> np.ndarray:
    rho4 = np.asarray(rho4)
    r = rho4.reshape(rho4.shape[:-2] + (2, 2, 2, 2))
    return np.einsum("...ikjk->...ij", r)


def spin1_blocks(model: ValidatedModel) -> tuple[float, float]:
    """Population of |0> and the real prefactor of the coherence."""
    init = model.init
    if isinstance(init, EntangledInit):
        a = (init.lambda0 - 0.5) * np.cos(init.theta0) + 0.5
        kappa = 0.5 * np.sin(init.theta0)
    elif isinstance(init, ProductInit):
        a = 1.0 - init.p
        kappa = np.sqrt(init.p * (1.0 - init.p))
    else:
        raise TypeError(f"unsupported initial state {init!r}")
    return float(a), float(kappa)


def density_from_gamma(t, gamma_values, model: ValidatedModel) -> np.ndarray:
    a, kappa = spin1_blocks(model)
    t_arr = np.asarray(t, dtype=float)
    c = kappa * np.exp(-1j * model.params.omega1 * t_arr) * np.asarray(gamma_values, dtype=complex)
    rho = np.empty(t_arr.shape + (2, 2), dtype=complex)
    rho[..., 0, 0] = a
    rho[..., 1, 1] = 1.0 - a
    rho[..., 0, 1] = c
    rho[..., 1, 0] = np.conj(c)
    return rho


def reduced_density_spin1(t, model: ValidatedModel) -> np.ndarray:
    return density_from_gamma(t, decoherence.gamma(t, model), model)


def bloch_coords(rho: np.ndarray) -> np.ndarray:
    """``(x, y, z)`` with ``x = rho01 + rho10``, ``y = i(rho01 - rho10)``, ``z = rho00 - rho11``."""
    rho = np.asarray(rho)
    x = (rho[..., 0, 1] + rho[..., 1, 0]).real
    y = (1j * (rho[..., 0, 1] - rho[..., 1, 0])).real
    z = (rho[..., 0, 0] - rho[..., 1, 1]).real
    return np.stack([x, y, z], axis=-1)


def purity(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho)
    return np.einsum("...ij,...ji->...", rho, rho).real


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    points: np.ndarray  # (n, 3)
    purity: np.ndarray

    @property
    def radius(self) -> np.ndarray:
        return np.linalg.norm(self.points, axis=-1)


def trajectory(model: ValidatedModel, grid: TimeGrid) -> Trajectory:
    t = grid.times()
    rho = reduced_density_spin1(t, model)
    return Trajectory(times=t, points=bloch_coords(rho), purity=purity(rho))


def format_real(x: float) -> str:
    return f"{float(x):.17g}"


def write_trajectory_csv(traj: Trajectory, path_or_file) -> None:
    """Columns ``t,x,y,z,purity``; LF line endings, 17 significant digits."""
    own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
    fh = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "x", "y", "z", "purity"])
        for t, (x, y, z), pur in zip(traj.times, traj.points, traj.purity):
            w.writerow([format_real(v) for v in (t, x, y, z, pur)])
    finally:
        if own:
            fh.close()
