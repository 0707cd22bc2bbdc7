"""Von Neumann analysis of the linear elastic D2Q9 update.

A plane-wave disturbance ``f_j(x) = F_j exp(i k.x)`` is mapped by one
collide-stream step onto ``M(k) F``.  The spectral radius of the 9x9 matrix
``M`` decides whether the mode grows.
"""

import csv
from dataclasses import dataclass, field

import numpy as np

from .core import B2, C, W, MaterialParams

TOL = 1e-8

# (c_l c_l - b^2 I) : (c_j c_j - b^2 I)
_TRACELESS = np.einsum("la,lb->lab", C, C) - B2 * np.eye(2)
_QUAD = np.einsum("lab,jab->lj", _TRACELESS, _TRACELESS)
_CC = C @ C.T


def vn_matrix(k, params):
    """Amplification matrix for wave vector ``k`` (radians per node).

    Built term by term from the update used by the solver: BGK relaxation
    towards an equilibrium whose flux carries half of the centred-difference
    density force, plus the ``(1 - 1/2tau)`` weighted force projection.
    """
    kx, ky = k
    tau = params.tau
    lam = params.Lambda_coef
    sin_k = np.array([np.sin(kx), np.sin(ky)])
    force = 1j * lam * (C @ sin_k)  # c_l . (i Lambda sin k)
    eq = (W[:, None] / tau) * (1.0 + _CC / B2 + 0.5 * force[:, None] + _QUAD / (2.0 * B2**2))
    src = (1.0 - 0.5 / tau) * (W * force)[:, None]
    m = (1.0 - 1.0 / tau) * np.eye(9) + eq + src
    shift = np.exp(-1j * (C @ np.array([kx, ky])))
    return shift[:, None] * m


def spectral_radius(M):
    """Largest eigenvalue modulus, with a residual check on the eigenpairs."""
    M = np.asarray(M)
    if not np.isfinite(M).all():
        raise ValueError("matrix has non-finite entries")
    vals, vecs = np.linalg.eig(M)
    scale = max(np.linalg.norm(M, 2), 1.0)
    res = np.linalg.norm(M @ vecs - vecs * vals, axis=0)
    if np.any(res > 1e-8 * scale * np.linalg.norm(vecs, axis=0)):
        raise np.linalg.LinAlgError("eigen-decomposition failed its residual check")
    return float(np.abs(vals).max())


def default_k_grid(n=64):
    """Uniform ``n x n`` grid on (0, pi]^2 plus the two axes (and k=0)."""
    ks = np.pi * np.arange(0, n + 1) / n
    kx, ky = np.meshgrid(ks, ks, indexing="ij")
    return np.column_stack([kx.ravel(), ky.ravel()])


@dataclass
class StabilityReport:
    nu: float
    tau: float
    k_grid: np.ndarray
    max_modulus: np.ndarray
    tol: float = TOL
    unstable: np.ndarray = field(init=False)

    def __post_init__(self):
        self.unstable = self.k_grid[self.max_modulus > 1.0 + self.tol]

    @property
    def n_unstable(self):
        return len(self.unstable)

    def min_unstable_norm(self):
        if not self.n_unstable:
            return None
        return float(np.hypot(self.unstable[:, 0], self.unstable[:, 1]).min())

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["kx", "ky", "max_modulus"])
            for (kx, ky), m in zip(self.k_grid, self.max_modulus):
                w.writerow([repr(float(kx)), repr(float(ky)), repr(float(m))])


def stability_map(nu, tau=0.55, k_grid=None, tol=TOL):
    k_grid = default_k_grid() if k_grid is None else np.asarray(k_grid, dtype=float)
    if np.any(k_grid < 0) or np.any(k_grid > np.pi + 1e-12):
        raise ValueError("k_grid must lie in [0, pi]^2 (one quadrant)")
    params = MaterialParams(nu=nu, tau=tau)
    rad = np.array([spectral_radius(vn_matrix(k, params)) for k in k_grid])
    return StabilityReport(nu, tau, k_grid, rad, tol)


def eigen_loci(nu, tau=0.55, direction=(1.0, 0.0), n_samples=64):
    """Eigenvalues along ``|k| direction`` for ``|k|`` in [0, pi].

    Returns ``(k_norms, eigenvalues)`` with shapes ``(n,)`` and ``(n, 9)``.
    """
    d = np.asarray(direction, dtype=float)
    if abs(np.hypot(*d) - 1.0) > 1e-9:
        raise ValueError("direction must be a unit vector")
    params = MaterialParams(nu=nu, tau=tau)
    norms = np.linspace(0.0, np.pi, n_samples)
    vals = np.array([np.linalg.eigvals(vn_matrix(s * d, params)) for s in norms])
    return norms, vals
