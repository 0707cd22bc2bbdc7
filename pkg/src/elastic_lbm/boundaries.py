"""Edge conditions: periodic wrap, rigid wall, free surface, absorbing layer.

Walls sit half a link outside the last node row.  Rigid walls use
bounce-back, free surfaces anti-bounce-back with an extrapolated "air"
state, and absorbing layers add a ``-A j`` penalty to the momentum source
(their outermost links bounce back).
"""

from dataclasses import dataclass, field

import numpy as np

from .core import B2, C, W
from .lattice import D2Q9

PERIODIC, RIGID, FREE, ABSORBING = "periodic", "rigid", "free", "absorbing"
KINDS = (PERIODIC, RIGID, FREE, ABSORBING)

# edge -> (axis, node index, inward sign)
EDGES = {
    "bottom": (1, 0, 1),
    "top": (1, -1, -1),
    "left": (0, 0, 1),
    "right": (0, -1, -1),
}


@dataclass(frozen=True)
class EdgeSpec:
    kind: str = PERIODIC
    thickness: int = 30
    a_max: float = 0.1
    profile: float = 2.0
    # free surface: air state = (1 + e) X_boundary - e X_inner
    extrapolation: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown edge kind {self.kind!r}; expected one of {KINDS}")


@dataclass(frozen=True)
class BoundarySpec:
    left: EdgeSpec = field(default_factory=EdgeSpec)
    right: EdgeSpec = field(default_factory=EdgeSpec)
    bottom: EdgeSpec = field(default_factory=EdgeSpec)
    top: EdgeSpec = field(default_factory=EdgeSpec)

    @classmethod
    def from_kinds(cls, left=PERIODIC, right=PERIODIC, bottom=PERIODIC, top=PERIODIC, **layer):
        return cls(*(EdgeSpec(k, **layer) for k in (left, right, bottom, top)))

    def edge(self, name):
        return getattr(self, name)

    @property
    def periodic(self):
        return (self.left.kind == PERIODIC, self.bottom.kind == PERIODIC)

    def violations(self, nx, ny):
        """Human-readable list of problems for an ``nx`` by ``ny`` grid."""
        out = []
        for a, b in (("left", "right"), ("bottom", "top")):
            if (self.edge(a).kind == PERIODIC) != (self.edge(b).kind == PERIODIC):
                out.append(f"edges {a}/{b} must both be periodic or both non-periodic")
        for name in EDGES:
            e = self.edge(name)
            if e.kind == ABSORBING:
                if not 1 <= e.thickness <= min(nx, ny) / 2:
                    out.append(f"{name} absorbing thickness {e.thickness} outside "
                               f"[1, {min(nx, ny) // 2}]")
                if e.a_max < 0:
                    out.append(f"{name} absorbing a_max must be >= 0")
            if e.kind == FREE and min(nx, ny) < 3:
                out.append("free surface needs at least 3 nodes across the grid")
            if e.kind == FREE and not 0.0 <= e.extrapolation <= 1.0:
                out.append(f"{name} free-surface extrapolation must lie in [0, 1]")
        return out

    def validate(self, nx, ny):
        problems = self.violations(nx, ny)
        if problems:
            raise ValueError("; ".join(problems))


def damping_profile(distance, thickness, a_max, profile=2.0):
    """Damping factor at ``distance`` nodes from the outermost layer node.

    ``a_max`` on the outer node, decaying as a power ramp to zero at
    ``distance == thickness`` (the interface with the undamped interior).
    """
    d = np.asarray(distance, dtype=float)
    if np.any(d < 0) or np.any(d > thickness):
        raise ValueError(f"distance must lie in [0, {thickness}]")
    return a_max * ((thickness - d) / thickness) ** profile


def damping_field(spec, nx, ny):
    """Per-node damping ``A``; overlapping layers take the larger value."""
    A = np.zeros((nx, ny))
    for name, (axis, idx, _) in EDGES.items():
        e = spec.edge(name)
        if e.kind != ABSORBING:
            continue
        n = (nx, ny)[axis]
        dist = np.arange(n, dtype=float) if idx == 0 else np.arange(n, dtype=float)[::-1]
        prof = np.where(dist < e.thickness,
                        damping_profile(np.minimum(dist, e.thickness), e.thickness,
                                        e.a_max, e.profile), 0.0)
        prof = prof[:, None] if axis == 0 else prof[None, :]
        A = np.maximum(A, prof)
    return A


def apply_absorbing(S, j, A):
    return S - A * j


def _slab(axis, idx):
    return (slice(None), idx) if axis == 1 else (idx, slice(None))


def _incoming(axis, sign):
    return [i for i in range(9) if C[i, axis] * sign > 0]


def bounce_back(fnew, fpost, axis, idx, sign):
    """``f_i(x_b, t+1) = f*_opp(i)(x_b, t)`` for links entering through the wall."""
    sl = _slab(axis, idx)
    for i in _incoming(axis, sign):
        fnew[i][sl] = fpost[D2Q9.opposite[i]][sl]


def air_state(rho, P, axis, idx, sign, rho0=1.0, extrapolation=0.0):
    """Density and non-equilibrium stress of the "air" beyond a free surface.

    Returns ``(rho_air, Pn_air)`` with ``Pn_air`` as (xx, xy, yy) on the edge.
    The normal row of ``P_air`` carries no load relative to the quiescent
    reference ``rho0 b^2``.  Density and the tangential stress component are
    extrapolated from the two nearest node rows with weight ``extrapolation``:
    0.5 reaches the half-link wall linearly, 0 copies the boundary row.  Any
    positive weight feeds a slowly growing surface density ripple, so the
    default is the stable copy.
    """
    b = _slab(axis, idx)
    inner = _slab(axis, idx + sign)
    e = extrapolation

    def extrap(x):
        return (1.0 + e) * x[b] - e * x[inner] if e else x[b].copy()

    rho_air = extrap(rho)
    zero = np.zeros_like(rho_air)
    ref = np.full_like(rho_air, rho0 * B2)
    if axis == 1:
        P_air = (extrap(P[0]), zero, ref)
    else:
        P_air = (ref, zero, extrap(P[2]))
    Pn_air = np.stack([P_air[0] - B2 * rho_air, P_air[1], P_air[2] - B2 * rho_air])
    return rho_air, Pn_air


def free_surface(fnew, fpost, rho, P, axis, idx, sign, rho0=1.0, extrapolation=0.0):
    """Anti-bounce-back against the extrapolated air state."""
    sl = _slab(axis, idx)
    rho_air, Pn = air_state(rho, P, axis, idx, sign, rho0, extrapolation)
    for i in _incoming(axis, sign):
        cx, cy = C[i]
        quad = (Pn[0] * (cx * cx - B2) + 2.0 * Pn[1] * cx * cy
                + Pn[2] * (cy * cy - B2)) / (2.0 * B2**2)
        fnew[i][sl] = -fpost[D2Q9.opposite[i]][sl] + 2.0 * W[i] * (rho_air + quad)


def apply_boundaries(fnew, fpost, rho, P, spec, rho0=1.0):
    """Overwrite wall-crossing links after periodic streaming.

    Top/bottom first, then left/right, so a link crossing two walls at a
    corner follows the lateral edge.
    """
    for name in ("bottom", "top", "left", "right"):
        edge = spec.edge(name)
        kind = edge.kind
        if kind == PERIODIC:
            continue
        axis, idx, sign = EDGES[name]
        if kind == FREE:
            free_surface(fnew, fpost, rho, P, axis, idx, sign, rho0, edge.extrapolation)
        else:
            bounce_back(fnew, fpost, axis, idx, sign)
    return fnew
