"""Shared fixtures: reference states, seeded parameter draws, and smooth
fields satisfying the boundary catalogs analytically (used by the duality
and enforcement tests)."""

import numpy as np

import swerect as sw
from swerect.boundary import Side
from swerect.rng import SplitMix64

W, E, S, N = Side.WEST, Side.EAST, Side.SOUTH, Side.NORTH

# one generic representative per regime: (u0, v0, phi0, g)
REGIME_CASES = {
    "super": (4.0, 4.0, 1.0, 9.81),
    "mix1": (2.0, 4.0, 1.0, 9.81),
    "mix2": (4.0, 2.0, 1.0, 9.81),
    "fhs": (2.5, 2.5, 1.0, 9.81),
    "msub": (1.0, 1.0, 1.0, 9.81),
}

REGIME_NAMES = {
    "super": "Supercritical",
    "mix1": "MixedHyperbolicI",
    "mix2": "MixedHyperbolicII",
    "fhs": "FullyHyperbolicSubcritical",
    "msub": "MixedSubcritical",
}


def params(kind):
    return sw.validate_params(*REGIME_CASES[kind])


def draw_params(kind, rng: SplitMix64):
    """One random valid state of the requested regime.

    Speeds are placed relative to c = sqrt(g*phi0) with margins far above
    the genericity tolerance, so every draw classifies deterministically.
    """
    phi0 = 0.5 + 1.5 * rng.next_double()
    g = 5.0 + 10.0 * rng.next_double()
    c = np.sqrt(g * phi0)
    r = rng.next_double
    if kind == "super":
        u, v = c * (1.05 + 1.45 * r()), c * (1.05 + 1.45 * r())
    elif kind == "mix1":
        u, v = c * (0.2 + 0.7 * r()), c * (1.05 + 1.45 * r())
    elif kind == "mix2":
        u, v = c * (1.05 + 1.45 * r()), c * (0.2 + 0.7 * r())
    elif kind == "fhs":
        u, v = c * (0.75 + 0.24 * r()), c * (0.75 + 0.24 * r())
    elif kind == "msub":
        u, v = c * (0.2 + 0.45 * r()), c * (0.2 + 0.45 * r())
    else:
        raise ValueError(kind)
    return sw.validate_params(u, v, phi0, g)


# which sides each characteristic component must vanish on, so that the
# resulting state satisfies the catalog rows identically
OP_CHAR_SIDES = {
    "super": {0: (W, S), 1: (W, S), 2: (W, S)},
    "mix1": {0: (W, S), 1: (E, S), 2: (W, S)},
    "mix2": {0: (W, N), 1: (W, S), 2: (W, S)},
    "fhs": {0: (W, N), 1: (E, S), 2: (W, S)},
    "msub": {0: (W, S), 1: (E, N), 2: (W, S)},
}
ADJ_CHAR_SIDES = {
    "super": {0: (E, N), 1: (E, N), 2: (E, N)},
    "mix1": {0: (E, N), 1: (W, N), 2: (E, N)},
    "mix2": {0: (E, S), 1: (E, N), 2: (E, N)},
    "fhs": {0: (E, S), 1: (W, N), 2: (E, N)},
}


def vanish(side, X, Y, grid):
    if side is W:
        return np.sin(0.5 * np.pi * X / grid.l1)
    if side is E:
        return np.cos(0.5 * np.pi * X / grid.l1)
    if side is S:
        return np.sin(0.5 * np.pi * Y / grid.l2)
    return np.cos(0.5 * np.pi * Y / grid.l2)


_BASES = (
    lambda X, Y: np.sin(1.9 * X + 0.3) * np.cos(1.1 * Y + 0.7) + 1.5,
    lambda X, Y: np.cos(0.8 * X - 0.2) * np.sin(1.4 * Y + 0.1) + 1.2,
    lambda X, Y: np.sin(1.2 * X + 1.0) * np.sin(0.9 * Y + 0.4) + 1.1,
)


def _char_field(sides_map, transform, grid):
    X, Y = grid.meshgrid()
    Xi = np.empty((3, grid.nx, grid.ny))
    for i in range(3):
        f = _BASES[i](X, Y)
        for s in sides_map[i]:
            f = f * vanish(s, X, Y, grid)
        Xi[i] = f
    return sw.from_characteristic(Xi, transform)


def msub_compatible_pair(p, grid):
    """Forward/adjoint in-catalog states for the mixed subcritical regime.

    Forward: the shear and potential combinations vanish on W+S, phi on E+N.
    Adjoint: near each side the (xi, eta) pair is forced parallel to the
    one-dimensional subspace the adjoint rows leave free there; the four
    envelope functions each survive on exactly one side.
    """
    t = sw.elliptic_transform(p)
    X, Y = grid.meshgrid()
    u0, v0, g, k1 = p.u0, p.v0, p.g, t.kappa1
    ws = vanish(W, X, Y, grid) * vanish(S, X, Y, grid)
    en = vanish(E, X, Y, grid) * vanish(N, X, Y, grid)
    Xi = np.stack([_BASES[0](X, Y) * ws, _BASES[1](X, Y) * en, _BASES[2](X, Y) * ws])
    U = sw.from_characteristic(Xi, t)

    gW = np.cos(0.5 * np.pi * X / grid.l1) * np.sin(np.pi * Y / grid.l2)
    gE = np.sin(0.5 * np.pi * X / grid.l1) * np.sin(np.pi * Y / grid.l2)
    gS = np.sin(np.pi * X / grid.l1) * np.cos(0.5 * np.pi * Y / grid.l2)
    gN = np.sin(np.pi * X / grid.l1) * np.sin(0.5 * np.pi * Y / grid.l2)
    xi1 = gW * u0 * k1 + gE * g * v0 / k1 + gS * v0 * k1 + gN * g * u0 / k1
    xi2 = gW * g * v0 - gE * u0 - gS * g * u0 + gN * v0
    xi3 = _BASES[2](X, Y) * en
    V = sw.from_characteristic(np.stack([xi1, xi2, xi3]), t)
    return U, V


def compatible_pair(kind, p, grid):
    """(U, V) stacks satisfying the forward resp. adjoint catalog exactly."""
    if kind == "msub":
        return msub_compatible_pair(p, grid)
    t = sw.hyperbolic_transform(p)
    return (_char_field(OP_CHAR_SIDES[kind], t, grid),
            _char_field(ADJ_CHAR_SIDES[kind], t, grid))


def transform_for(kind, p):
    return sw.elliptic_transform(p) if kind == "msub" else sw.hyperbolic_transform(p)


def boundary_row_residual(U, spec, grid):
    """Worst |rows . U| over the four sides (0 for catalog-satisfying U)."""
    sel = {W: (0, slice(None)), E: (-1, slice(None)),
           S: (slice(None), 0), N: (slice(None), -1)}
    worst = 0.0
    for side, rows in spec.rows.items():
        if rows.shape[0] == 0:
            continue
        vals = np.einsum("kc,cn->kn", rows, U[(slice(None),) + sel[side]])
        worst = max(worst, float(np.max(np.abs(vals))))
    return worst


def duality_residual(p, grid, U, V):
    """|<A_h U, V> - <U, A*_h V>| / (|U| |V|), all in the energy product."""
    from swerect.fields import StateField, inner_product
    from swerect.operator import DiscreteOperator

    op = DiscreteOperator(p, grid)
    sU, sV = StateField.from_stack(U), StateField.from_stack(V)
    lhs = inner_product(StateField.from_stack(op.apply_stack(U)), sV, grid, p.g, p.phi0)
    rhs = inner_product(sU, StateField.from_stack(op.apply_adjoint_stack(V)), grid, p.g, p.phi0)
    nU = np.sqrt(inner_product(sU, sU, grid, p.g, p.phi0))
    nV = np.sqrt(inner_product(sV, sV, grid, p.g, p.phi0))
    return abs(lhs - rhs) / (nU * nV)


def state_error(a, b, grid, p):
    from swerect.fields import StateField

    d = StateField(a.u - b.u, a.v - b.v, a.phi - b.phi)
    return float(np.sqrt(sw.energy_value(d, grid, p)))


def boundary_flat_theta(grid, scale=400.0):
    """theta1 = theta2 = psi with psi, grad psi = 0 on East+North and
    psi = 0 on West+South; used where the cross-derivative identities need
    data that is flat at the outflow boundary."""
    from swerect.elliptic import ThetaField

    X, Y = grid.meshgrid()
    l1, l2 = grid.l1, grid.l2
    s = scale / (l1**5 * l2**5)
    psi = s * X**2 * (l1 - X) ** 3 * Y**2 * (l2 - Y) ** 3
    return ThetaField(psi.copy(), psi.copy())
