"""Periodic finite difference and Fourier collocation operators.

All operators on a uniform periodic grid share the mass matrix M = dx I.
Stencil coefficients are generated by solving the polynomial accuracy
conditions, so one code path covers all supported orders.
"""

from __future__ import annotations

import numpy as np

from .types import Grid, MassMatrix, SbpConstructionError, SbpOperator1, SbpOperator2, UpwindPair


def _periodic_grid(n: int, domain) -> Grid:
    x_min, x_max = float(domain[0]), float(domain[1])
    if x_max <= x_min:
        raise SbpConstructionError("domain must have positive length")
    dx = (x_max - x_min) / n
    nodes = x_min + dx * np.arange(n)
    return Grid(nodes=nodes, x_min=x_min, x_max=x_max, periodic=True)


def circulant(n: int, offsets, coeffs) -> np.ndarray:
    """Dense circulant matrix with row stencil u_i -> sum_k c_k u_{i+k}."""
    mat = np.zeros((n, n))
    idx = np.arange(n)
    for off, c in zip(offsets, coeffs):
        mat[idx, (idx + off) % n] += c
    return mat


def stencil_coefficients(offsets, derivative: int) -> np.ndarray:
    """Solve the accuracy conditions for a finite difference stencil.

    Returns coefficients c with sum_k c_k f(x + k dx) = f^(derivative)(x) dx^d
    exact for polynomials up to degree len(offsets) - 1.
    """
    offsets = np.asarray(offsets, dtype=float)
    m = offsets.size
    vand = np.vander(offsets, m, increasing=True).T  # vand[j, i] = offsets[i]**j
    rhs = np.zeros(m)
    from math import factorial

    if derivative < m:
        rhs[derivative] = factorial(derivative)
    return np.linalg.solve(vand, rhs)


def fd_periodic_d1(n: int, domain, order: int) -> SbpOperator1:
    """Central finite difference first-derivative operator of even order 2-8."""
    if order % 2 != 0 or not 2 <= order <= 8:
        raise SbpConstructionError(f"unsupported central difference order {order}")
    half = order // 2
    if n <= order:
        raise SbpConstructionError(f"n={n} too small for order-{order} stencil")
    grid = _periodic_grid(n, domain)
    dx = grid.length / n
    offsets = np.arange(-half, half + 1)
    coeffs = stencil_coefficients(offsets, 1) / dx
    mat = circulant(n, offsets, coeffs)
    mass = MassMatrix(diagonal=np.full(n, dx))
    return SbpOperator1(mat=mat, mass=mass, grid=grid, periodic=True, accuracy_order=order)


def fd_periodic_d2(n: int, domain, order: int, stencil_kind: str = "narrow") -> SbpOperator2:
    """Periodic second-derivative operator: narrow central stencil or wide D1^2."""
    if stencil_kind == "wide":
        return fd_periodic_d1(n, domain, order).square()
    if stencil_kind != "narrow":
        raise SbpConstructionError(f"unknown stencil kind {stencil_kind!r}")
    if order % 2 != 0 or not 2 <= order <= 8:
        raise SbpConstructionError(f"unsupported central difference order {order}")
    half = order // 2
    if n <= order:
        raise SbpConstructionError(f"n={n} too small for order-{order} stencil")
    grid = _periodic_grid(n, domain)
    dx = grid.length / n
    offsets = np.arange(-half, half + 1)
    coeffs = stencil_coefficients(offsets, 2) / dx**2
    mat = circulant(n, offsets, coeffs)
    mass = MassMatrix(diagonal=np.full(n, dx))
    return SbpOperator2(
        mat=mat,
        mass=mass,
        grid=grid,
        periodic=True,
        stencil_kind="narrow",
        accuracy_order=order,
    )


def upwind_offsets(order: int) -> np.ndarray:
    """Offsets of the minimal-width upper-biased stencil of the given order."""
    if order % 2 == 1:
        a = (order - 1) // 2
        return np.arange(-a, a + 2)
    a = order // 2
    return np.arange(-(a - 1), a + 2)


def fd_periodic_upwind(n: int, domain, order: int) -> UpwindPair:
    """Biased-stencil upwind pair; D- is the mirror -D+^T of the upper-biased D+.

    The symmetric part of the minimal-width biased stencil has Fourier symbol
    proportional to (cos t - 1)^k, so M (D+ - D-) is negative semidefinite.
    """
    if not 1 <= order <= 9:
        raise SbpConstructionError(f"unsupported upwind order {order}")
    offsets = upwind_offsets(order)
    if n <= offsets.size:
        raise SbpConstructionError(f"n={n} too small for order-{order} upwind stencil")
    grid = _periodic_grid(n, domain)
    dx = grid.length / n
    coeffs = stencil_coefficients(offsets, 1) / dx
    plus = circulant(n, offsets, coeffs)
    minus = circulant(n, -offsets, -coeffs)
    mass = MassMatrix(diagonal=np.full(n, dx))
    return UpwindPair(
        plus=plus, minus=minus, mass=mass, grid=grid, periodic=True, accuracy_order=order
    )


def fourier_d1(n: int, domain) -> SbpOperator1:
    """Fourier collocation differentiation matrix on a uniform periodic grid.

    For even n the Nyquist mode is mapped to zero, which makes the matrix
    skew-symmetric and hence a periodic SBP operator with M = dx I.
    """
    if n < 2:
        raise SbpConstructionError("need at least two nodes")
    grid = _periodic_grid(n, domain)
    dx = grid.length / n
    scale = 2.0 * np.pi / grid.length
    j = np.arange(n)
    diff = j[:, None] - j[None, :]
    mat = np.zeros((n, n))
    off = diff != 0
    if n % 2 == 0:
        mat[off] = 0.5 * (-1.0) ** diff[off] / np.tan(np.pi * diff[off] / n)
    else:
        mat[off] = 0.5 * (-1.0) ** diff[off] / np.sin(np.pi * diff[off] / n)
    mat *= scale
    mass = MassMatrix(diagonal=np.full(n, dx))
    # accuracy bookkeeping: modes strictly below the Nyquist frequency are
    # exact, and that is also what survives squaring the operator
    return SbpOperator1(
        mat=mat, mass=mass, grid=grid, periodic=True, accuracy_order=max(n // 2 - 1, 1)
    )
