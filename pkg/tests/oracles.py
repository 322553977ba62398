"""Independent reference computations used by the tests.

Nothing here imports the package's numerical code. The decoherence factors are
evaluated with mpmath at 50 digits straight from their defining expressions.
The partial trace is written as an explicit index loop. The geometric phase
oracle diagonalises each sample with mpmath and accumulates a Bargmann
product.
"""

from __future__ import annotations

import mpmath as mp

mp.mp.dps = 50


def envelope(t, gamma0, cutoff):
    t = mp.mpf(t)
    return mp.exp(-2 * mp.mpf(gamma0) * mp.log(1 + (mp.mpf(cutoff) * t) ** 2))


def gamma_ohmic(t, lambda0, gamma0, cutoff, chi):
    t = mp.mpf(t)
    w = 2 * mp.mpf(chi) - mp.mpf(gamma0) * mp.mpf(cutoff)
    return envelope(t, gamma0, cutoff) * ((2 * mp.mpf(lambda0) - 1) * mp.cos(w * t) - 1j * mp.sin(w * t))


def gamma_chi(t, lambda0, chi):
    t = mp.mpf(t)
    w = 2 * mp.mpf(chi)
    return (2 * mp.mpf(lambda0) - 1) * mp.cos(w * t) - 1j * mp.sin(w * t)


def gamma_product(t, q, gamma0, cutoff, omega):
    t = mp.mpf(t)
    w = mp.mpf(omega)
    return envelope(t, gamma0, cutoff) * (mp.cos(w * t) + 1j * (2 * mp.mpf(q) - 1) * mp.sin(w * t))


def arg_unwrapped(f, t, n=4000):
    """Continuous argument of f on [0, t] by fine sequential unwrapping."""
    prev = mp.arg(f(mp.mpf(0)))
    acc = prev
    for k in range(1, n + 1):
        cur = mp.arg(f(mp.mpf(t) * k / n))
        d = cur - prev
        d -= 2 * mp.pi * mp.nint(d / (2 * mp.pi))
        acc += d
        prev = cur
    return acc


def partial_trace_loop(rho4):
    """Trace over the second qubit with explicit indices (|ab> -> 2a + b)."""
    out = [[0j, 0j], [0j, 0j]]
    for a in range(2):
        for c in range(2):
            out[a][c] = sum(complex(rho4[2 * a + b][2 * c + b]) for b in range(2))
    return out


def reduced_spin1(t, a, kappa, omega1, gamma_value):
    """Spin-1 density from its defining blocks."""
    c = kappa * mp.exp(-1j * mp.mpf(omega1) * mp.mpf(t)) * gamma_value
    return mp.matrix([[a, c], [mp.conj(c), 1 - a]])


def gp_bargmann(rho_of_t, tau, steps):
    """Two-branch weighted Bargmann-product phase with mpmath eigensolves.

    Branches are matched between consecutive samples by overlap. The result
    is reduced to [0, 2 pi).
    """
    ts = [mp.mpf(tau) * k / steps for k in range(steps + 1)]
    vals, vecs = [], []
    for t in ts:
        e, v = mp.eighe(rho_of_t(t))
        pair = [(e[i], v[:, i]) for i in range(2)]
        if vecs:
            prev = vecs[-1]
            same = abs(_dot(prev[0], pair[0][1])) + abs(_dot(prev[1], pair[1][1]))
            cross = abs(_dot(prev[0], pair[1][1])) + abs(_dot(prev[1], pair[0][1]))
            if cross > same:
                pair.reverse()
        vals.append([pair[0][0], pair[1][0]])
        vecs.append([pair[0][1], pair[1][1]])
    total = mp.mpc(0)
    for k in range(2):
        transport = mp.mpc(1)
        for j in range(steps):
            link = _dot(vecs[j][k], vecs[j + 1][k])
            transport *= mp.conj(link) / abs(link)
        weight = mp.sqrt(max(vals[0][k] * vals[-1][k], 0))
        total += weight * _dot(vecs[0][k], vecs[-1][k]) * transport
    ph = mp.arg(total)
    return float(ph % (2 * mp.pi))


def _dot(u, v):
    return sum(mp.conj(u[i]) * v[i] for i in range(len(u)))
