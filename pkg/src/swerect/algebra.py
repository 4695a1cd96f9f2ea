"""Coefficient matrices, characteristic transforms, diagonalization checks.

The first-order operator is A = E1 d/dx + E2 d/dy with

    E1 = [[u0, 0, g], [0, u0, 0], [phi0, 0, u0]]
    E2 = [[v0, 0, 0], [0, v0, g], [0, phi0, v0]]

and symmetrizer S0 = diag(1, 1, g/phi0):  S0*E1 and S0*E2 are symmetric.

When Delta = u0^2 + v0^2 - g*phi0 > 0, a single real change of variables
Xi = Pinv @ U simultaneously congruence-diagonalizes S0*E1 and S0*E2 and
similarity-diagonalizes E2^{-1} E1.  When Delta < 0 the first two modes stay
coupled through indefinite symmetric 2x2 blocks (an elliptic pair) while the
third mode remains a pure transport.

Everything here is closed-form; numeric matrix products appear only inside
verify_diagonalization, which exists to check the closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Union

import numpy as np

from .errors import SingularSystem
from .regime import PhysicalConstants, Regime, classify, delta, kappa0, kappa1


@dataclass(frozen=True)
class CoefficientMatrices:
    E1: np.ndarray
    E2: np.ndarray
    S0: np.ndarray


def coefficient_matrices(p: PhysicalConstants) -> CoefficientMatrices:
    E1 = np.array([[p.u0, 0.0, p.g], [0.0, p.u0, 0.0], [p.phi0, 0.0, p.u0]])
    E2 = np.array([[p.v0, 0.0, 0.0], [0.0, p.v0, p.g], [0.0, p.phi0, p.v0]])
    S0 = np.diag([1.0, 1.0, p.g / p.phi0])
    return CoefficientMatrices(E1, E2, S0)


def _inv3(m: np.ndarray) -> np.ndarray:
    """3x3 inverse by adjugate; the transforms are small and well conditioned
    away from regime boundaries, so the closed form beats a factorization."""
    adj = np.empty((3, 3))
    adj[0, 0] = m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1]
    adj[0, 1] = m[0, 2] * m[2, 1] - m[0, 1] * m[2, 2]
    adj[0, 2] = m[0, 1] * m[1, 2] - m[0, 2] * m[1, 1]
    adj[1, 0] = m[1, 2] * m[2, 0] - m[1, 0] * m[2, 2]
    adj[1, 1] = m[0, 0] * m[2, 2] - m[0, 2] * m[2, 0]
    adj[1, 2] = m[0, 2] * m[1, 0] - m[0, 0] * m[1, 2]
    adj[2, 0] = m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0]
    adj[2, 1] = m[0, 1] * m[2, 0] - m[0, 0] * m[2, 1]
    adj[2, 2] = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    det = m[0, 0] * adj[0, 0] + m[0, 1] * adj[1, 0] + m[0, 2] * adj[2, 0]
    if det == 0.0 or not math.isfinite(det):
        raise SingularSystem("transform matrix is singular")
    return adj / det


@dataclass(frozen=True)
class CharTransform:
    """Hyperbolic-case diagonalizing transform Xi = Pinv @ U.

    a, b are the diagonals of P^T S0 E1 P and P^T S0 E2 P; lam the eigenvalues
    of E2^{-1} E1.  Sign structure: a[0], a[2], b[1], b[2] > 0 always,
    sign(a[1]) = sign(u0^2 - g*phi0), sign(b[0]) = sign(v0^2 - g*phi0).
    """

    Pinv: np.ndarray
    P: np.ndarray
    a: np.ndarray
    b: np.ndarray
    lam: np.ndarray
    kappa0: float


def hyperbolic_transform(p: PhysicalConstants) -> CharTransform:
    k0 = kappa0(p)  # raises NotHyperbolic when Delta <= 0
    u0, v0, g = p.u0, p.v0, p.g
    s = u0**2 + v0**2
    Pinv = np.array(
        [
            [v0, -u0, k0],
            [v0, -u0, -k0],
            [u0, v0, g],
        ]
    )
    P = _inv3(Pinv)
    a = np.array([u0 * k0 + g * v0, u0 * k0 - g * v0, 2.0 * k0 * u0]) / (2.0 * s * k0)
    b = np.array([v0 * k0 - g * u0, v0 * k0 + g * u0, 2.0 * k0 * v0]) / (2.0 * s * k0)
    # lam needs v0^2 != g*phi0, which genericity already guarantees
    den = v0**2 - g * p.phi0
    lam = np.array(
        [
            (u0 * v0 + p.phi0 * k0) / den,
            (u0 * v0 - p.phi0 * k0) / den,
            u0 / v0,
        ]
    )
    return CharTransform(Pinv, P, a, b, lam, k0)


@dataclass(frozen=True)
class EllipticTransform:
    """Delta < 0 transform: modes 0-1 form an indefinite symmetric pair,
    mode 2 is transported with velocity zeta_speed."""

    Pinv: np.ndarray
    P: np.ndarray
    blockX: np.ndarray
    blockY: np.ndarray
    zeta_speed: np.ndarray
    kappa1: float


def elliptic_transform(p: PhysicalConstants) -> EllipticTransform:
    k1 = kappa1(p)  # raises NotElliptic when Delta >= 0
    u0, v0, g = p.u0, p.v0, p.g
    s = u0**2 + v0**2
    Pinv = np.array(
        [
            [v0, -u0, 0.0],
            [0.0, 0.0, k1],
            [u0, v0, g],
        ]
    )
    P = _inv3(Pinv)
    blockX = np.array([[u0, g * v0 / k1], [g * v0 / k1, -u0]]) / s
    blockY = np.array([[v0, -g * u0 / k1], [-g * u0 / k1, -v0]]) / s
    return EllipticTransform(Pinv, P, blockX, blockY, np.array([u0 / s, v0 / s]), k1)


Transform = Union[CharTransform, EllipticTransform]


def to_characteristic(U: np.ndarray, t: Transform) -> np.ndarray:
    """Xi = Pinv @ U; works on 3-vectors and (3, ...) field stacks alike."""
    return np.einsum("ij,j...->i...", t.Pinv, np.asarray(U))


def from_characteristic(Xi: np.ndarray, t: Transform) -> np.ndarray:
    return np.einsum("ij,j...->i...", t.P, np.asarray(Xi))


@dataclass
class DiagnosticReport:
    regime: Regime
    tol: float
    residuals: Dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r <= self.tol for r in self.residuals.values())

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())


def _rel_residual(product: np.ndarray, target: np.ndarray) -> float:
    return float(np.max(np.abs(product - target)) / np.max(np.abs(product)))


def verify_diagonalization(p: PhysicalConstants, tol: float = 1e-10) -> DiagnosticReport:
    """Check the closed-form transforms against explicit matrix products.

    Hyperbolic case: P^T S0E1 P vs diag(a), P^T S0E2 P vs diag(b), and
    P^{-1} (E2^{-1}E1) P vs diag(lam) -- the latter is legitimate even though
    the eigenvector normalization is not unique, because any right diagonal
    rescaling of P is absorbed by the similarity conjugation.

    Elliptic case: the same congruences against the 2x2-block targets.
    All residuals are max-norm, relative to the product's own magnitude.
    """
    m = coefficient_matrices(p)
    reg = classify(p)
    rep = DiagnosticReport(regime=reg, tol=tol)
    s = p.u0**2 + p.v0**2
    if reg is Regime.MIXED_SUBCRITICAL:
        t = elliptic_transform(p)
        tx = np.zeros((3, 3))
        tx[:2, :2] = t.blockX
        tx[2, 2] = p.u0 / s
        ty = np.zeros((3, 3))
        ty[:2, :2] = t.blockY
        ty[2, 2] = p.v0 / s
        rep.residuals["congruence_x"] = _rel_residual(t.P.T @ (m.S0 @ m.E1) @ t.P, tx)
        rep.residuals["congruence_y"] = _rel_residual(t.P.T @ (m.S0 @ m.E2) @ t.P, ty)
    else:
        t = hyperbolic_transform(p)
        rep.residuals["congruence_x"] = _rel_residual(t.P.T @ (m.S0 @ m.E1) @ t.P, np.diag(t.a))
        rep.residuals["congruence_y"] = _rel_residual(t.P.T @ (m.S0 @ m.E2) @ t.P, np.diag(t.b))
        flow = np.linalg.solve(m.E2, m.E1)
        rep.residuals["similarity"] = _rel_residual(t.Pinv @ flow @ t.P, np.diag(t.lam))
    return rep
