"""Legendre-Gauss-Lobatto element operators on the reference interval [-1, 1].

The nodal differentiation matrix together with the diagonal quadrature
weights forms a bounded first-derivative SBP operator of order p.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .types import Grid, MassMatrix, SbpConstructionError, SbpOperator1


def _legendre_and_derivatives(p: int, x: np.ndarray):
    """Values of P_p, P_p' and P_p'' via the three-term recurrence."""
    pk_minus = np.ones_like(x)
    pk = x.copy()
    if p == 0:
        pk = pk_minus
    for k in range(2, p + 1):
        pk_minus, pk = pk, ((2 * k - 1) * x * pk - (k - 1) * pk_minus) / k
    # derivative identities on (-1, 1); endpoints handled by callers
    d1 = np.zeros_like(x)
    d2 = np.zeros_like(x)
    interior = np.abs(x) < 1.0
    xi = x[interior]
    d1[interior] = p * (xi * pk[interior] - pk_minus[interior]) / (xi**2 - 1.0)
    d2[interior] = (2.0 * xi * d1[interior] - p * (p + 1) * pk[interior]) / (1.0 - xi**2)
    return pk, d1, d2


def legendre_gauss_lobatto(p: int, tol: float = 1e-15):
    """Nodes and weights of the (p+1)-point Lobatto quadrature rule.

    Interior nodes are the roots of P_p', found by Newton iteration seeded
    with Chebyshev-Lobatto estimates.
    """
    if not 1 <= p <= 10:
        raise SbpConstructionError(f"polynomial degree {p} outside supported range 1..10")
    n = p + 1
    x = -np.cos(np.pi * np.arange(n) / p)
    # Newton on P_p' for the interior nodes
    for _ in range(100):
        _, d1, d2 = _legendre_and_derivatives(p, x)
        dx = np.zeros_like(x)
        interior = np.abs(x) < 1.0
        dx[interior] = d1[interior] / d2[interior]
        x_new = x - dx
        if np.max(np.abs(x_new - x)) < tol:
            x = x_new
            break
        x = x_new
    x[0], x[-1] = -1.0, 1.0
    # symmetrize to kill asymmetric roundoff from the Newton iteration
    x = 0.5 * (x - x[::-1])
    pk, _, _ = _legendre_and_derivatives(p, x)
    w = 2.0 / (p * (p + 1) * pk**2)
    return x, w


def lobatto_diff_matrix(p: int, nodes: np.ndarray) -> np.ndarray:
    """Nodal polynomial differentiation matrix at the LGL nodes."""
    pk, _, _ = _legendre_and_derivatives(p, nodes)
    n = p + 1
    d = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j:
                d[i, j] = pk[i] / (pk[j] * (nodes[i] - nodes[j]))
    d[0, 0] = -p * (p + 1) / 4.0
    d[-1, -1] = p * (p + 1) / 4.0
    return d


@dataclass(frozen=True)
class LobattoElement:
    """First-derivative SBP operator data on one element.

    Holds the nodes, diagonal mass matrix and differentiation matrix mapped
    to the interval [a, b]; an optional biased pair provides upwind coupling.
    """

    degree: int
    a: float
    b: float
    nodes: np.ndarray
    mass_diag: np.ndarray
    d1: np.ndarray
    plus: np.ndarray | None = None
    minus: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.nodes.size

    @property
    def has_upwind(self) -> bool:
        return self.plus is not None


def lobatto_element(p: int) -> SbpOperator1:
    """Reference-element SBP operator of degree p on [-1, 1]."""
    nodes, weights = legendre_gauss_lobatto(p)
    d1 = lobatto_diff_matrix(p, nodes)
    grid = Grid(nodes=nodes, x_min=-1.0, x_max=1.0, periodic=False)
    return SbpOperator1(
        mat=d1,
        mass=MassMatrix(diagonal=weights),
        grid=grid,
        periodic=False,
        accuracy_order=p,
    )


def lobatto_upwind_matrices(p: int, strength: float = 1.0):
    """Element-level biased pair D+- = D1 -+ (c/2) phi (M phi)^T.

    phi holds the nodal values of the highest resolved Legendre mode, so the
    rank-one dissipation annihilates polynomials of degree p-1 and the pair
    keeps order p-1.  For p = 1 the trivial pair D+ = D- = D1 is returned.
    """
    nodes, weights = legendre_gauss_lobatto(p)
    d1 = lobatto_diff_matrix(p, nodes)
    if p == 1 or strength == 0.0:
        return d1.copy(), d1.copy()
    phi, _, _ = _legendre_and_derivatives(p, nodes)
    mphi = weights * phi
    diss = 0.5 * strength * np.outer(phi, mphi)
    return d1 - diss, d1 + diss


def mapped_element(p: int, a: float, b: float, upwind: bool = False,
                   upwind_strength: float = 1.0) -> LobattoElement:
    """Affinely map the reference element operators to [a, b]."""
    if b <= a:
        raise SbpConstructionError("element must have positive length")
    nodes, weights = legendre_gauss_lobatto(p)
    d1 = lobatto_diff_matrix(p, nodes)
    jac = (b - a) / 2.0
    x = a + (nodes + 1.0) * jac
    x[0], x[-1] = a, b
    plus = minus = None
    if upwind:
        pm, mm = lobatto_upwind_matrices(p, upwind_strength)
        plus, minus = pm / jac, mm / jac
    return LobattoElement(
        degree=p,
        a=a,
        b=b,
        nodes=x,
        mass_diag=weights * jac,
        d1=d1 / jac,
        plus=plus,
        minus=minus,
    )


def uniform_mesh(domain, num_elements: int, p: int, upwind: bool = False,
                 upwind_strength: float = 1.0) -> list[LobattoElement]:
    """num_elements equal elements of degree p covering the domain."""
    x_min, x_max = float(domain[0]), float(domain[1])
    if num_elements < 1:
        raise SbpConstructionError("need at least one element")
    edges = np.linspace(x_min, x_max, num_elements + 1)
    return [
        mapped_element(p, edges[e], edges[e + 1], upwind=upwind,
                       upwind_strength=upwind_strength)
        for e in range(num_elements)
    ]
