"""Field state and the collide-stream update for the elastic D2Q9 scheme.

Arrays are indexed ``[..., x, y]``: distributions have shape ``(9, nx, ny)``,
vectors ``(2, nx, ny)`` and the symmetric second moment is stored as the
three components ``(Pxx, Pxy, Pyy)``.
"""

from dataclasses import dataclass, field

import numpy as np

from .lattice import D2Q9

NU_LIMIT = 5.0 / 11.0

C = D2Q9.c.astype(float)
W = D2Q9.w
B2 = D2Q9.b2

# rows: 1, cx, cy, cx cx, cx cy, cy cy
MOMENTS = np.stack([
    np.ones(9), C[:, 0], C[:, 1], C[:, 0] ** 2, C[:, 0] * C[:, 1], C[:, 1] ** 2,
])
# f_eq_i = EQ[i] . (rho, jx, jy, Pn_xx, Pn_xy, Pn_yy)
EQ = (W[:, None] * np.stack([
    np.ones(9),
    C[:, 0] / B2,
    C[:, 1] / B2,
    (C[:, 0] ** 2 - B2) / (2 * B2**2),
    2 * C[:, 0] * C[:, 1] / (2 * B2**2),
    (C[:, 1] ** 2 - B2) / (2 * B2**2),
], axis=1))


class NumericalDivergence(RuntimeError):
    def __init__(self, step, node):
        self.step, self.node = step, node
        super().__init__(f"non-finite distribution at node {node} on step {step}")


@dataclass(frozen=True)
class MaterialParams:
    nu: float = 0.25
    tau: float = 0.55
    rho0: float = 1.0

    def __post_init__(self):
        if self.tau <= 0.5:
            raise ValueError(f"tau must exceed dt/2 = 0.5, got {self.tau}")
        if not -1.0 < self.nu < NU_LIMIT:
            raise ValueError(
                f"Poisson ratio {self.nu} outside (-1, 5/11): beyond nu_lim = 5/11 "
                "the P-wave outruns the centred-difference signal speed of 2")
        if self.rho0 <= 0:
            raise ValueError(f"rho0 must be positive, got {self.rho0}")

    @property
    def mu(self):
        return self.rho0 * B2

    @property
    def lam(self):
        return 2.0 * self.nu * self.mu / (1.0 - 2.0 * self.nu)

    @property
    def vS(self):
        return np.sqrt(self.mu / self.rho0)

    @property
    def vP(self):
        return np.sqrt((self.lam + 2.0 * self.mu) / self.rho0)

    @property
    def Lambda_coef(self):
        return (self.mu - self.lam) / (self.rho0 * B2)

    def speed_ratio(self):
        return np.sqrt((2.0 - 2.0 * self.nu) / (1.0 - 2.0 * self.nu))


@dataclass
class FieldState:
    f: np.ndarray
    rho: np.ndarray = None
    j: np.ndarray = None
    P: np.ndarray = None
    S: np.ndarray = None
    time_step: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def nx(self):
        return self.f.shape[1]

    @property
    def ny(self):
        return self.f.shape[2]

    @property
    def jx(self):
        return self.j[0]

    @property
    def jy(self):
        return self.j[1]

    def Pn(self):
        """``P - rho b^2 delta`` as ``(xx, xy, yy)`` components."""
        return np.stack([self.P[0] - B2 * self.rho, self.P[1], self.P[2] - B2 * self.rho])


def moments(f):
    """Raw moments ``(sum f, sum f c, sum f cc)`` of a ``(9, ...)`` array."""
    m = np.tensordot(MOMENTS, f, axes=1)
    return m[0], m[1:3], m[3:6]


def equilibrium(rho, j, Pn):
    """Equilibrium distributions; ``Pn`` holds the (xx, xy, yy) components."""
    rho = np.asarray(rho, dtype=float)
    j = np.asarray(j, dtype=float)
    Pn = np.asarray(Pn, dtype=float)
    return np.tensordot(EQ, np.concatenate([rho[None], j, Pn]), axes=1)


def discrete_source(S):
    """Project a vector source ``(2, ...)`` onto the nine directions."""
    S = np.asarray(S, dtype=float)
    return np.tensordot(W[:, None] * C / B2, S, axes=1)


def density_gradient(rho, periodic=(True, True)):
    """Centred difference of ``rho`` along x and y.

    Periodic axes wrap; on non-periodic axes the two edge nodes fall back to
    one-sided first-order differences.
    """
    grad = np.empty((2,) + rho.shape)
    for axis in (0, 1):
        g = grad[axis]
        if periodic[axis]:
            g[...] = 0.5 * (np.roll(rho, -1, axis) - np.roll(rho, 1, axis))
            continue
        r = np.moveaxis(rho, axis, 0)
        gv = np.moveaxis(g, axis, 0)
        gv[1:-1] = 0.5 * (r[2:] - r[:-2])
        gv[0] = r[1] - r[0]
        gv[-1] = r[-1] - r[-2]
    return grad


def recover_macros(f, S, damping=None):
    """Macroscopic fields from distributions and the current source.

    ``j = sum f c + S/2``.  When a damping field ``A`` is given, the
    penalty ``-A j`` is part of the source and depends on ``j`` itself; the
    linear relation is solved exactly, and the total source (including the
    penalty) is returned alongside.
    """
    rho, m1, P = moments(f)
    if damping is None:
        return rho, m1 + 0.5 * S, P, S
    j = (m1 + 0.5 * S) / (1.0 + 0.5 * damping)
    return rho, j, P, S - damping * j


def collide(f, feq, Si, tau):
    return f - (f - feq) / tau + (1.0 - 0.5 / tau) * Si


def stream(fpost, out=None):
    """Periodic gather ``f_i(x) <- f*_i(x - c_i)``.

    Links that enter through a non-periodic edge carry wrapped values here
    and are overwritten by the boundary rules afterwards.
    """
    if out is None:
        out = np.empty_like(fpost)
    out[0] = fpost[0]
    for i in range(1, 9):
        cx, cy = D2Q9.c[i]
        out[i] = np.roll(fpost[i], (cx, cy), axis=(0, 1))
    return out


def rest_state(nx, ny, rho0=1.0):
    """Quiescent stress-free solid: ``f = f_eq(rho0, 0, Pn=0)``."""
    f = np.broadcast_to((W * rho0)[:, None, None], (9, nx, ny)).copy()
    return FieldState(f=f)


def check_finite(state):
    if np.isfinite(state.rho).all() and np.isfinite(state.f).all():
        return
    bad = np.argwhere(~np.isfinite(state.f).all(axis=0))
    if bad.size == 0:
        bad = np.argwhere(~np.isfinite(state.rho))
    raise NumericalDivergence(state.time_step, tuple(int(v) for v in bad[0]))
