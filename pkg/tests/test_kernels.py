"""Hot kernels: backend equivalence, unitarity, and scheme accuracy.

The two kernels (`pair_rotate`, `qs_scan`) exist in a vectorized numpy form
and an optional compiled twin; both must agree to rounding on random data.
The transport scan is additionally checked against an adaptive-ODE reference
so the equation being solved — not just the two implementations — is pinned.
"""

import os
import subprocess
import sys

import numpy as np
import pytest

from incoupler import accel
from incoupler.kernels_numpy import pair_rotate as np_pair_rotate
from incoupler.kernels_numpy import qs_scan as np_qs_scan

from _oracles import slaved_probe_reference

try:
    from incoupler.kernels_numba import pair_rotate as nb_pair_rotate
    from incoupler.kernels_numba import qs_scan as nb_qs_scan

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

needs_numba = pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")


def random_pair(rng, n):
    atoms = rng.normal(size=(2, n)) + 1j * rng.normal(size=(2, n))
    lights = rng.normal(size=(2, n)) + 1j * rng.normal(size=(2, n))
    omega = (rng.normal(size=n) + 1j * rng.normal(size=n)) * 50.0
    w = rng.normal(size=n) * 30.0
    return atoms, lights, omega, w


class TestPairRotate:
    def test_pointwise_norm_conserved(self, rng):
        atoms, lights, omega, w = random_pair(rng, 512)
        before = np.abs(atoms) ** 2 + np.abs(lights) ** 2
        np_pair_rotate(atoms, lights, omega, w, 1.3e-3)
        after = np.abs(atoms) ** 2 + np.abs(lights) ** 2
        assert np.allclose(after, before, rtol=1e-13, atol=1e-13)

    def test_zero_coupling_is_pure_phase(self, rng):
        atoms, lights, _, w = random_pair(rng, 64)
        atoms0, lights0 = atoms.copy(), lights.copy()
        dt = 2.0e-4
        np_pair_rotate(atoms, lights, np.zeros(64, dtype=complex), w, dt)
        assert np.allclose(atoms, atoms0, rtol=1e-14)
        assert np.allclose(lights, np.exp(-1j * w * dt) * lights0, rtol=1e-12)

    def test_resonant_rotation_matches_cosine(self, rng):
        # w = 0, real omega: u -> cos(omega dt) u + i sin(omega dt) e
        n = 32
        atoms = rng.normal(size=(2, n)) + 1j * rng.normal(size=(2, n))
        lights = rng.normal(size=(2, n)) + 1j * rng.normal(size=(2, n))
        atoms0, lights0 = atoms.copy(), lights.copy()
        omega = np.full(n, 700.0, dtype=complex)
        dt = 1.1e-3
        np_pair_rotate(atoms, lights, omega, np.zeros(n), dt)
        th = 700.0 * dt
        assert np.allclose(
            atoms, np.cos(th) * atoms0 + 1j * np.sin(th) * lights0, rtol=1e-12
        )
        assert np.allclose(
            lights, 1j * np.sin(th) * atoms0 + np.cos(th) * lights0, rtol=1e-12
        )

    def test_tiny_angle_stable(self, rng):
        atoms, lights, omega, w = random_pair(rng, 64)
        a2, l2 = atoms.copy(), lights.copy()
        np_pair_rotate(atoms, lights, omega * 1e-12, w * 1e-12, 1e-9)
        # essentially the identity, and certainly finite
        assert np.allclose(atoms, a2, rtol=1e-9)
        assert np.all(np.isfinite(lights)) and np.allclose(lights, l2, rtol=1e-9)

    @needs_numba
    def test_backends_agree(self, rng):
        atoms, lights, omega, w = random_pair(rng, 1024)
        a_np, l_np = atoms.copy(), lights.copy()
        a_nb, l_nb = atoms.copy(), lights.copy()
        np_pair_rotate(a_np, l_np, omega, w, 7.7e-4)
        nb_pair_rotate(a_nb, l_nb, omega, w, 7.7e-4)
        assert np.allclose(a_np, a_nb, rtol=1e-12, atol=1e-14)
        assert np.allclose(l_np, l_nb, rtol=1e-12, atol=1e-14)


class TestQsScan:
    def test_no_source_transports_boundary(self, rng):
        n = 256
        w = rng.normal(size=n) * 40.0
        boundary = 0.8 - 0.3j
        out = np_qs_scan(np.zeros(n, dtype=complex), w, 1e-6, 0.07, boundary)
        assert out[0] == boundary
        # the shift only rotates the phase; the modulus is transported intact
        assert np.allclose(np.abs(out), abs(boundary), rtol=1e-12)

    def test_matches_adaptive_ode_reference(self):
        # the scan is a trapezoid rule along x: second order in dx
        errors = {}
        for n in (512, 1024):
            x = np.linspace(-1.5e-3, 1.5e-3, n)
            dx = x[1] - x[0]
            sigma = 2.0e-4
            source = (3.0 + 1.0j) * np.exp(-(x**2) / (2 * sigma**2)) * 1e3
            weff = 200.0 * np.exp(-(x**2) / (2 * (3 * sigma) ** 2))
            c = 0.0735
            out = np_qs_scan(source.astype(complex), weff, dx, c, 0.1 + 0.0j)
            ref = slaved_probe_reference(x, source, weff, c, 0.1 + 0.0j)
            scale = np.max(np.abs(ref))
            errors[n] = np.max(np.abs(out - ref)) / scale
        assert errors[512] < 5e-5
        assert errors[512] / errors[1024] > 3.5  # halving dx gains ~4x

    @needs_numba
    def test_backends_agree(self, rng):
        n = 2048
        source = rng.normal(size=n) + 1j * rng.normal(size=n)
        w = rng.normal(size=n) * 25.0
        out_np = np_qs_scan(source, w, 7.3e-7, 0.0735, 0.2 - 0.1j)
        out_nb = nb_qs_scan(source, w, 7.3e-7, 0.0735, 0.2 - 0.1j)
        assert np.allclose(out_np, out_nb, rtol=1e-10, atol=1e-12)


class TestAccelDispatch:
    def test_active_backend_is_known(self):
        assert accel.backend_name() in accel.available_backends()

    def test_get_backend_by_name(self):
        numpy_backend = accel.get_backend("numpy")
        assert numpy_backend.pair_rotate is np_pair_rotate
        with pytest.raises(ValueError):
            accel.get_backend("fortran")

    def test_env_flag_disables_compiled_backend(self):
        code = (
            "import incoupler.accel as a; print(a.backend_name())"
        )
        env = dict(os.environ, INCOUPLER_NUMBA="0")
        out = subprocess.run(
            [sys.executable, "-c", code],
            capture_output=True,
            text=True,
            env=env,
            check=True,
        )
        assert out.stdout.strip() == "numpy"

    @needs_numba
    def test_env_flag_forces_compiled_backend(self):
        code = (
            "import incoupler.accel as a; print(a.backend_name())"
        )
        env = dict(os.environ, INCOUPLER_NUMBA="1")
        out = subprocess.run(
            [sys.executable, "-c", code],
            capture_output=True,
            text=True,
            env=env,
            check=True,
        )
        assert out.stdout.strip() == "numba"
