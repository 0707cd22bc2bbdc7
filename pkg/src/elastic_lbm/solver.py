"""Time stepping driver tying lattice, sources and boundaries together."""

import numpy as np

from . import core
from .boundaries import BoundarySpec, apply_boundaries, damping_field
from .core import B2, FieldState, MaterialParams
from .sources import eval_force, gaussian


class ElasticLBM:
    """Elastic-wave D2Q9 solver on an ``nx`` by ``ny`` grid.

    The state always holds macroscopic fields consistent with ``state.f`` at
    ``state.time_step``; each :meth:`step` advances both by one time unit.
    """

    def __init__(self, nx, ny, params=None, source=None, boundary=None, state=None):
        self.params = params or MaterialParams()
        self.source = source
        self.boundary = boundary or BoundarySpec()
        self.boundary.validate(nx, ny)
        self.nx, self.ny = nx, ny
        self._spatial = None if source is None else gaussian(source, (nx, ny))
        self._configure_boundary()
        self.state = state or core.rest_state(nx, ny, self.params.rho0)
        self._fbuf = np.empty_like(self.state.f)
        self._refresh_macros()

    def _configure_boundary(self):
        A = damping_field(self.boundary, self.nx, self.ny)
        self.damping = A if A.any() else None

    def set_boundary(self, boundary):
        """Swap the edge conditions mid-run (e.g. absorbing to periodic)."""
        boundary.validate(self.nx, self.ny)
        self.boundary = boundary
        self._configure_boundary()
        self._refresh_macros()

    def force(self, t):
        if self.source is None:
            return None
        return eval_force(t, self.source, (self.nx, self.ny), self._spatial)

    def source_field(self, rho, t):
        """Elastic gradient force plus external force (no damping term)."""
        grad = core.density_gradient(rho, self.boundary.periodic)
        S = (self.params.Lambda_coef * B2) * grad
        F = self.force(t)
        if F is not None:
            S += F
        return S

    def _refresh_macros(self):
        st = self.state
        rho = st.f.sum(axis=0)
        S = self.source_field(rho, st.time_step)
        st.rho, st.j, st.P, st.S = core.recover_macros(st.f, S, self.damping)
        core.check_finite(st)

    def step(self):
        st = self.state
        tau = self.params.tau
        feq = core.equilibrium(st.rho, st.j, st.Pn())
        fpost = core.collide(st.f, feq, core.discrete_source(st.S), tau)
        fnew = core.stream(fpost, out=self._fbuf)
        if not all(self.boundary.periodic):
            apply_boundaries(fnew, fpost, st.rho, st.P, self.boundary, self.params.rho0)
        self._fbuf = st.f
        st.f = fnew
        st.time_step += 1
        self._refresh_macros()
        return st

    def run(self, n_steps, callback=None):
        for _ in range(n_steps):
            self.step()
            if callback is not None:
                callback(self.state)
        return self.state
