"""Fourier-spectral Crank-Nicolson reference solver for the Navier equation
written on the mass flux ``j``, periodic in both directions.

State per wave vector is ``J = (jx, jy, d/dt jx, d/dt jy)``.
"""

import numpy as np

from .core import MaterialParams
from .sources import eval_force, eval_force_dt, gaussian


def wave_numbers(n):
    """Angular wave numbers ``2 pi m / n`` for ``m`` in (-n/2, n/2]."""
    m = np.fft.fftfreq(n, d=1.0 / n)
    if n % 2 == 0:
        m[n // 2] = n // 2
    return 2.0 * np.pi * m / n


def _coefficients(kx, ky, params, kx_odd=None, ky_odd=None):
    a2 = (params.lam + 2.0 * params.mu) / params.rho0
    b2 = params.mu / params.rho0
    d2 = (params.lam + params.mu) / params.rho0
    A = a2 * kx**2 + b2 * ky**2
    B = d2 * (kx if kx_odd is None else kx_odd) * (ky if ky_odd is None else ky_odd)
    Cc = a2 * ky**2 + b2 * kx**2
    return A, B, Cc


def assemble_cn_matrices(k, params, dt=1.0):
    """Implicit (4x4) and explicit (4x6) Crank-Nicolson matrices for one ``k``."""
    A, B, Cc = _coefficients(k[0], k[1], params)
    h = 0.5 * dt
    M = np.array([
        [1.0, 0.0, -h, 0.0],
        [0.0, 1.0, 0.0, -h],
        [A * h, B * h, 1.0, 0.0],
        [B * h, Cc * h, 0.0, 1.0],
    ])
    N = np.array([
        [1.0, 0.0, h, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, h, 0.0, 0.0],
        [-A * h, -B * h, 1.0, 0.0, h, 0.0],
        [-B * h, -Cc * h, 0.0, 1.0, 0.0, h],
    ])
    if abs(np.linalg.det(M)) < 1e-14:
        raise ArithmeticError(f"singular Crank-Nicolson matrix at k = {tuple(k)}")
    return M, N


def odd_wave_numbers(n):
    """:func:`wave_numbers` with the Nyquist entry zeroed.

    The mixed term ``kx ky`` is a product of first derivatives; keeping the
    unpaired Nyquist mode would break conjugate symmetry of real fields.
    """
    k = wave_numbers(n)
    if n % 2 == 0:
        k[n // 2] = 0.0
    return k


def propagators(kx, ky, params, dt=1.0, kx_odd=None, ky_odd=None):
    """``M^-1 N`` for every wave vector on a grid, shape ``(..., 4, 6)``."""
    A, B, Cc = _coefficients(kx, ky, params, kx_odd, ky_odd)
    h = 0.5 * dt
    shape = np.broadcast(kx, ky).shape
    M = np.zeros(shape + (4, 4))
    N = np.zeros(shape + (4, 6))
    for r in range(4):
        M[..., r, r] = 1.0
    M[..., 0, 2] = M[..., 1, 3] = -h
    M[..., 2, 0], M[..., 2, 1] = A * h, B * h
    M[..., 3, 0], M[..., 3, 1] = B * h, Cc * h
    N[..., :2, :2] = np.eye(2)
    N[..., 2:, 2:4] = np.eye(2)
    N[..., 0, 2] = N[..., 1, 3] = h
    N[..., 2, 0], N[..., 2, 1] = -A * h, -B * h
    N[..., 3, 0], N[..., 3, 1] = -B * h, -Cc * h
    N[..., 2, 4] = N[..., 3, 5] = h
    return np.linalg.solve(M, N)


def cn_step(J, G, propagator):
    """One Crank-Nicolson update ``J <- M^-1 N (J, Gx, Gy)``.

    ``J`` has a leading axis of length 4 and ``G`` of length 2; trailing
    axes enumerate wave vectors.
    """
    X = np.concatenate([J, G])
    return np.einsum("...rc,c...->r...", propagator, X)


class SpectralOracle:
    """Reference solution on the same periodic grid and time step as the LBM."""

    def __init__(self, nx, ny, params=None, source=None, dt=1.0):
        self.params = params or MaterialParams()
        self.source = source
        self.nx, self.ny, self.dt = nx, ny, dt
        kx = wave_numbers(nx)[:, None]
        ky = wave_numbers(ny)[None, :]
        self.prop = propagators(kx, ky, self.params, dt,
                                odd_wave_numbers(nx)[:, None], odd_wave_numbers(ny)[None, :])
        self._spatial = None if source is None else gaussian(source, (nx, ny))
        self.time_step = 0
        self.J = np.zeros((4, nx, ny), dtype=complex)
        if source is not None:
            # at rest with zero stress, d/dt j = F / rho0
            self.J[2:] = np.fft.fft2(self._force(0.0), axes=(1, 2)) / self.params.rho0

    def _force(self, t):
        return eval_force(t, self.source, (self.nx, self.ny), self._spatial)

    def _force_dt_hat(self, t):
        g = eval_force_dt(t, self.source, (self.nx, self.ny), self._spatial)
        return np.fft.fft2(g, axes=(1, 2))

    def step(self):
        n = self.time_step
        if self.source is None:
            G = np.zeros((2, self.nx, self.ny), dtype=complex)
        else:
            G = (self._force_dt_hat(n * self.dt)
                 + self._force_dt_hat((n + 1) * self.dt)) / self.params.rho0
        self.J = cn_step(self.J, G, self.prop)
        self.time_step += 1

    def run(self, n_steps):
        for _ in range(n_steps):
            self.step()
        return self.fields()

    def fields(self):
        """Physical ``(jx, jy)`` at the current step, checked to be real."""
        j = np.fft.ifft2(self.J[:2], axes=(1, 2))
        scale = max(np.abs(j.real).max(), 1e-300)
        if np.abs(j.imag).max() > 1e-12 * max(scale, 1.0):
            raise ArithmeticError("spectral field lost conjugate symmetry")
        return j.real.copy()
