"""Closed-form decoherence factors and their polar decomposition.

Every factor has the shape ``envelope(t) * (x(t) + i y(t))`` with a real,
monotone envelope ``(1 + Lambda^2 t^2)^(-2 gamma0)``; only the bracket carries
phase, so the argument derivative never depends on the envelope.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import EntangledInit, ProductInit, Regime, TimeGrid, ValidatedModel

DEGENERACY_THRESHOLD = 1e-12


class DegenerateTrace(RuntimeError):
    """Gamma vanishes on a stretch of samples (isolated MES, no coherence at all)."""


def envelope(t, gamma0: float, cutoff: float):
    """``exp(-2 gamma0 ln(1 + Lambda^2 t^2))`` written as a power."""
    t = np.asarray(t, dtype=float)
    return np.power(1.0 + (cutoff * t) ** 2, -2.0 * gamma0)


def gamma_entangled_ohmic(t, model: ValidatedModel):
    lam = _lambda0(model)
    p = model.params
    w = model.omega_r
    return envelope(t, p.gamma0, p.cutoff) * ((2 * lam - 1) * np.cos(w * np.asarray(t)) - 1j * np.sin(w * np.asarray(t)))


def gamma_chi_only(t, model: ValidatedModel):
    lam = _lambda0(model)
    w = 2 * model.params.chi
    t = np.asarray(t, dtype=float)
    return (2 * lam - 1) * np.cos(w * t) - 1j * np.sin(w * t)


def gamma_spin2_uncoupled(t, model: ValidatedModel):
    p = model.params
    return envelope(t, p.gamma0, p.cutoff) * gamma_chi_only(t, model)


def gamma_product(t, model: ValidatedModel):
    """Product-state factor; spin 2 enters only through ``q``.

    For the spin-2-uncoupled regime the rotation rate is ``2 chi`` (no
    bath-induced shift), mirroring the entangled family.
    """
    if not isinstance(model.init, ProductInit):
        raise TypeError("gamma_product needs a ProductInit model")
    p = model.params
    w = product_frequency(model)
    b = 2 * model.init.q - 1
    t = np.asarray(t, dtype=float)
    return envelope(t, p.gamma0, p.cutoff) * (np.cos(w * t) + 1j * b * np.sin(w * t))


def product_frequency(model: ValidatedModel) -> float:
    if model.regime is Regime.OHMIC_SPIN2_UNCOUPLED:
        return 2 * model.params.chi
    return model.omega_r


def entangled_frequency(model: ValidatedModel) -> float:
    if model.regime is Regime.OHMIC_BOTH_COUPLED:
        return model.omega_r
    if model.regime is Regime.ISOLATED:
        return 0.0
    return 2 * model.params.chi


def gamma(t, model: ValidatedModel):
    """Dispatch on regime and initial-state family."""
    if isinstance(model.init, ProductInit):
        return gamma_product(t, model)
    if model.regime is Regime.OHMIC_BOTH_COUPLED:
        return gamma_entangled_ohmic(t, model)
    if model.regime is Regime.OHMIC_SPIN2_UNCOUPLED:
        return gamma_spin2_uncoupled(t, model)
    # isolated is chi-only with chi = 0
    return gamma_chi_only(t, model)


def _lambda0(model: ValidatedModel) -> float:
    if not isinstance(model.init, EntangledInit):
        raise TypeError("entangled decoherence factor needs an EntangledInit model")
    return model.init.lambda0


def theta_dot_analytic(t, model: ValidatedModel):
    """Time derivative of arg Gamma(t), from the bracket alone.

    Entangled, ``A cos wt - i sin wt``:  ``-A w / (A^2 cos^2 wt + sin^2 wt)``.
    Product, ``cos wt + i B sin wt``:    ``B w / (cos^2 wt + B^2 sin^2 wt)``.
    Raises ``ValueError`` at a true zero of Gamma (``A = 0`` and ``sin wt = 0``).
    """
    value = _theta_dot(np.asarray(t, dtype=float), model, strict=True)
    return value if np.ndim(t) else float(value)


def _theta_dot(t: np.ndarray, model: ValidatedModel, strict: bool):
    if isinstance(model.init, ProductInit):
        w = product_frequency(model)
        b = 2 * model.init.q - 1
        return b * w / (np.cos(w * t) ** 2 + b * b * np.sin(w * t) ** 2)
    w = entangled_frequency(model)
    a = 2 * model.init.lambda0 - 1
    den = a * a * np.cos(w * t) ** 2 + np.sin(w * t) ** 2
    zero = den <= DEGENERACY_THRESHOLD**2
    if np.any(zero):
        if strict and w != 0:
            raise ValueError("arg Gamma is not differentiable at a zero of Gamma")
        den = np.where(zero, 1.0, den)
    return np.where(zero, 0.0, -a * w / den)


@dataclass(frozen=True)
class DecoherenceTrace:
    grid: TimeGrid
    times: np.ndarray
    gamma_values: np.ndarray
    r_values: np.ndarray
    theta_values: np.ndarray
    theta_dot_values: np.ndarray
    zero_indices: tuple[int, ...] = ()


def polar_trace(model: ValidatedModel, grid: TimeGrid, evaluator=None) -> DecoherenceTrace:
    """Sample Gamma on ``grid`` and split it into modulus and unwrapped argument.

    Isolated zeros of Gamma (MES at ``t = 0`` with an environment) take the
    argument of their one-sided neighbour, the start point from the right and
    interior points from the left.  Two or more consecutive zero samples mean
    the coherence is identically absent and raise :class:`DegenerateTrace`.
    """
    t = grid.times()
    g = np.asarray((evaluator or gamma)(t, model), dtype=complex) * np.ones_like(t)
    r = np.abs(g)
    zero = r < DEGENERACY_THRESHOLD
    if np.any(zero[:-1] & zero[1:]) or zero.all():
        raise DegenerateTrace("Gamma vanishes on consecutive samples")

    theta = np.angle(g)
    good = ~zero
    theta[good] = np.unwrap(theta[good])
    idx = np.flatnonzero(zero)
    for j in idx:
        if j == 0:
            # linear extrapolation from the right keeps second-order accuracy
            theta[0] = 2 * theta[1] - theta[2] if len(t) > 2 and not zero[2] else theta[1]
        else:
            theta[j] = theta[j - 1]

    if evaluator is None:
        theta_dot = _theta_dot(t, model, strict=False)
    else:
        theta_dot = np.gradient(theta, t, edge_order=2)
    return DecoherenceTrace(
        grid=grid,
        times=t,
        gamma_values=g,
        r_values=r,
        theta_values=theta,
        theta_dot_values=theta_dot,
        zero_indices=tuple(int(j) for j in idx),
    )


def finite_difference_theta_dot(trace: DecoherenceTrace) -> np.ndarray:
    """Central differences of the unwrapped argument (cross-check path)."""
    return np.gradient(trace.theta_values, trace.times, edge_order=2)
