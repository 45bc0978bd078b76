"""Pure-numpy reference implementations of the two hot kernels.

These are the fallback path used when numba is unavailable or disabled via
``INCOUPLER_NUMBA=0``; the numba twins in :mod:`incoupler.kernels_numba`
implement identical arithmetic and are tested for agreement at rounding
level.
"""

from __future__ import annotations

import numpy as np

__all__ = ["pair_rotate", "qs_scan"]


def pair_rotate(
    atoms: np.ndarray,
    lights: np.ndarray,
    omega: np.ndarray,
    w: np.ndarray,
    dt: float,
) -> None:
    """Apply the local atom-light coupling step in place.

    At each grid point the pair ``(u, e)`` evolves under the Hermitian
    two-level generator ``H = [[0, -omega], [-conj(omega), w]]`` for time
    ``dt``; the update is the closed-form unitary ``exp(-i H dt)`` (exact
    for piecewise-constant coefficients), applied simultaneously to both
    mode-function rows of ``atoms``/``lights`` (shape ``(2, n)``).
    """
    mu = 0.5 * w
    rho = np.sqrt(mu * mu + np.abs(omega) ** 2)
    theta = rho * dt
    cos_t = np.cos(theta)
    # sin(theta)/rho == dt * sinc(theta/pi); np.sinc handles theta -> 0
    s = dt * np.sinc(theta / np.pi)
    phase = np.exp(-1j * mu * dt)
    m11 = phase * (cos_t + 1j * mu * s)
    m12 = phase * (1j * omega * s)
    m21 = phase * (1j * np.conj(omega) * s)
    m22 = phase * (cos_t - 1j * mu * s)
    u = atoms.copy()
    e = lights.copy()
    atoms[...] = m11[np.newaxis, :] * u + m12[np.newaxis, :] * e
    lights[...] = m21[np.newaxis, :] * u + m22[np.newaxis, :] * e


def qs_scan(
    source: np.ndarray,
    weff: np.ndarray,
    dx: float,
    c: float,
    boundary: complex,
) -> np.ndarray:
    """Integrate the slaved-probe transport equation left to right.

    Solves ``-i c dE/dx + weff(x) E = source(x)`` with ``E(x_left) =
    boundary`` using an integrating-factor trapezoid scheme: across each
    cell the homogeneous phase ``exp(-i <weff> dx / c)`` is exact and the
    source contributes ``(i dx / 2c) (S_j p_j + S_{j+1})``.

    Returns the probe field as a new array.
    """
    n = source.shape[0]
    p = np.exp(-0.5j * (weff[:-1] + weff[1:]) * dx / c)
    cum = np.cumprod(p)
    inc = (0.5j * dx / c) * (source[:-1] * p + source[1:])
    out = np.empty(n, dtype=np.complex128)
    out[0] = boundary
    out[1:] = cum * (boundary + np.cumsum(inc / cum))
    return out
