"""Gaussian-in-space, Ricker-in-time body force."""

from dataclasses import dataclass

import numpy as np


def ricker(t, period, t0):
    """Peak-normalised Ricker wavelet with dominant frequency ``1/period``."""
    a = (np.pi * (np.asarray(t, dtype=float) - t0) / period) ** 2
    return (1.0 - 2.0 * a) * np.exp(-a)


def ricker_dt(t, period, t0):
    """Closed-form time derivative of :func:`ricker`."""
    s = np.asarray(t, dtype=float) - t0
    k = (np.pi / period) ** 2
    a = k * s**2
    return 2.0 * k * s * (2.0 * a - 3.0) * np.exp(-a)


@dataclass(frozen=True)
class SourceSpec:
    center: tuple = (64.0, 64.0)
    sigma: float = 4.0
    direction: tuple = (1.0, 0.0)
    amplitude: float = 1e-3
    period: float = 20.0
    t0: float = 20.0

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError(f"source sigma must be positive, got {self.sigma}")
        if self.period <= 0:
            raise ValueError(f"Ricker period must be positive, got {self.period}")
        norm = float(np.hypot(*self.direction))
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"source direction must be a unit vector, |d| = {norm}")

    def scaled(self, factor):
        """Same source with lengths and times multiplied by ``factor``."""
        return SourceSpec(
            center=tuple(factor * x for x in self.center),
            sigma=self.sigma * factor,
            direction=self.direction,
            amplitude=self.amplitude,
            period=self.period * factor,
            t0=self.t0 * factor,
        )


def gaussian(spec, shape):
    nx, ny = shape
    x = np.arange(nx, dtype=float)[:, None] - spec.center[0]
    y = np.arange(ny, dtype=float)[None, :] - spec.center[1]
    return spec.amplitude * np.exp(-(x**2 + y**2) / (2.0 * spec.sigma**2))


def eval_force(t, spec, shape, spatial=None):
    """Force field of shape ``(2, nx, ny)`` at time ``t``.

    ``spatial`` may carry a precomputed :func:`gaussian` to skip the
    exponential on every step.
    """
    g = gaussian(spec, shape) if spatial is None else spatial
    s = g * ricker(t, spec.period, spec.t0)
    return np.stack([spec.direction[0] * s, spec.direction[1] * s])


def eval_force_dt(t, spec, shape, spatial=None):
    g = gaussian(spec, shape) if spatial is None else spatial
    s = g * ricker_dt(t, spec.period, spec.t0)
    return np.stack([spec.direction[0] * s, spec.direction[1] * s])
