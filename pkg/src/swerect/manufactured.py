"""Manufactured trigonometric solutions with analytic forcing.

The convergence harness needs a smooth exact solution U*(x, y, t) whose
residual F = dU*/dt + E1 U*_x + E2 U*_y + B U* is known in closed form; the
solver is then driven with F and boundary data sampled from U*, and the
discretization error is U - U*.  Each component is a separable cosine packet
with distinct wavenumbers and phases so no component or derivative vanishes
identically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import coefficient_matrices
from .fields import Grid, StateField
from .regime import PhysicalConstants

_KX = (1.3, 1.7, 0.9)
_KY = (1.1, 0.7, 1.6)
_PH = (0.3, 1.1, 2.0)
_OM = (1.2, 0.8, 1.5)
_AM = (1.0, 0.8, 1.2)


@dataclass(frozen=True)
class ManufacturedSolution:
    kx: tuple = _KX
    ky: tuple = _KY
    ph: tuple = _PH
    om: tuple = _OM
    am: tuple = _AM

    def _parts(self, c, x, y, t):
        cx = np.cos(self.kx[c] * x + self.ph[c])
        cy = np.cos(self.ky[c] * y + 0.5 * self.ph[c])
        ct = np.cos(self.om[c] * t + 0.2 * c)
        return cx, cy, ct

    def state(self, x, y, t: float) -> np.ndarray:
        """(3, ...) stack of (u, v, phi) at broadcast positions x, y."""
        x = np.asarray(x, float)
        y = np.asarray(y, float)
        out = np.empty((3,) + np.broadcast(x, y).shape)
        for c in range(3):
            cx, cy, ct = self._parts(c, x, y, t)
            out[c] = self.am[c] * cx * cy * ct
        return out

    def dt(self, x, y, t: float) -> np.ndarray:
        x = np.asarray(x, float)
        y = np.asarray(y, float)
        out = np.empty((3,) + np.broadcast(x, y).shape)
        for c in range(3):
            cx, cy, _ = self._parts(c, x, y, t)
            out[c] = -self.am[c] * self.om[c] * cx * cy * np.sin(self.om[c] * t + 0.2 * c)
        return out

    def dx(self, x, y, t: float) -> np.ndarray:
        x = np.asarray(x, float)
        y = np.asarray(y, float)
        out = np.empty((3,) + np.broadcast(x, y).shape)
        for c in range(3):
            _, cy, ct = self._parts(c, x, y, t)
            out[c] = -self.am[c] * self.kx[c] * np.sin(self.kx[c] * x + self.ph[c]) * cy * ct
        return out

    def dy(self, x, y, t: float) -> np.ndarray:
        x = np.asarray(x, float)
        y = np.asarray(y, float)
        out = np.empty((3,) + np.broadcast(x, y).shape)
        for c in range(3):
            cx, _, ct = self._parts(c, x, y, t)
            out[c] = -self.am[c] * self.ky[c] * cx * np.sin(self.ky[c] * y + 0.5 * self.ph[c]) * ct
        return out

    def forcing(self, x, y, t: float, p: PhysicalConstants) -> np.ndarray:
        """Analytic dU/dt + E1 U_x + E2 U_y + B U at the given positions."""
        m = coefficient_matrices(p)
        U = self.state(x, y, t)
        F = self.dt(x, y, t)
        F += np.einsum("ab,b...->a...", m.E1, self.dx(x, y, t))
        F += np.einsum("ab,b...->a...", m.E2, self.dy(x, y, t))
        F[0] -= p.f * U[1]
        F[1] += p.f * U[0]
        return F

    def state_field(self, grid: Grid, t: float) -> StateField:
        X, Y = grid.meshgrid()
        return StateField.from_stack(self.state(X, Y, t))

    def forcing_on_grid(self, p: PhysicalConstants, grid: Grid):
        """Closure t -> (3, nx, ny) forcing stack for the time stepper."""
        X, Y = grid.meshgrid()

        def F(t: float) -> np.ndarray:
            return self.forcing(X, Y, t, p)

        return F


DEFAULT_SOLUTION = ManufacturedSolution()
