"""Numba-accelerated twins of the hot kernels.

Importing this module requires numba; :mod:`incoupler.accel` decides at
import time (via the ``INCOUPLER_NUMBA`` env flag) whether these or the
pure-numpy versions in :mod:`incoupler.kernels_numpy` are used. The
arithmetic matches the numpy path step for step so results agree to
rounding.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

__all__ = ["pair_rotate", "qs_scan"]


@njit(cache=True)
def pair_rotate(atoms, lights, omega, w, dt):  # pragma: no cover - numba
    """In-place local coupling step; see the numpy twin for the contract."""
    n = omega.shape[0]
    for j in range(n):
        om = omega[j]
        mu = 0.5 * w[j]
        rho = math.sqrt(mu * mu + om.real * om.real + om.imag * om.imag)
        theta = rho * dt
        cos_t = math.cos(theta)
        if theta < 1.0e-8:
            s = dt * (1.0 - theta * theta / 6.0)
        else:
            s = math.sin(theta) / rho
        phase = complex(math.cos(mu * dt), -math.sin(mu * dt))
        m11 = phase * complex(cos_t, mu * s)
        m12 = phase * (1j * om * s)
        m21 = phase * (1j * np.conj(om) * s)
        m22 = phase * complex(cos_t, -mu * s)
        for row in range(2):
            u = atoms[row, j]
            e = lights[row, j]
            atoms[row, j] = m11 * u + m12 * e
            lights[row, j] = m21 * u + m22 * e


@njit(cache=True)
def qs_scan(source, weff, dx, c, boundary):  # pragma: no cover - numba
    """Sequential slaved-probe transport scan; see the numpy twin."""
    n = source.shape[0]
    out = np.empty(n, dtype=np.complex128)
    out[0] = boundary
    half_q = 0.5j * dx / c
    for j in range(n - 1):
        arg = -0.5 * (weff[j] + weff[j + 1]) * dx / c
        p = complex(math.cos(arg), math.sin(arg))
        out[j + 1] = out[j] * p + half_q * (source[j] * p + source[j + 1])
    return out
