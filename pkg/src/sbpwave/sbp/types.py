"""Core data types for summation-by-parts (SBP) operators.

An SBP operator couples a derivative matrix with a quadrature (mass) matrix
so that a discrete analogue of integration by parts holds exactly.  All
operators here store dense matrices; at the grid sizes this package targets
(N up to a few thousand) dense algebra is simpler and fast enough.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class SbpConstructionError(ValueError):
    """Raised when an operator cannot be built from the given inputs."""


@dataclass(frozen=True)
class Grid:
    """Nodes of a 1D discretization.

    Periodic grids omit the right endpoint (nodes[-1] = x_max - dx).
    Repeated coordinates are allowed only at element interfaces of
    discontinuously coupled grids.
    """

    nodes: np.ndarray
    x_min: float
    x_max: float
    periodic: bool

    def __post_init__(self):
        nodes = np.ascontiguousarray(np.asarray(self.nodes, dtype=float))
        object.__setattr__(self, "nodes", nodes)
        if nodes.ndim != 1 or nodes.size < 2:
            raise SbpConstructionError("grid needs at least two nodes")
        if np.any(np.diff(nodes) < 0):
            raise SbpConstructionError("grid nodes must be non-decreasing")
        if not self.periodic:
            if not (np.isclose(nodes[0], self.x_min) and np.isclose(nodes[-1], self.x_max)):
                raise SbpConstructionError("bounded grid must span [x_min, x_max]")

    @property
    def n(self) -> int:
        return self.nodes.size

    @property
    def length(self) -> float:
        return self.x_max - self.x_min


class MassMatrix:
    """Symmetric positive definite quadrature matrix.

    Stores either the diagonal (the common case for every operator family
    built here) or a dense symmetric matrix.
    """

    def __init__(self, diagonal=None, dense=None):
        if (diagonal is None) == (dense is None):
            raise SbpConstructionError("provide exactly one of diagonal or dense")
        if diagonal is not None:
            d = np.asarray(diagonal, dtype=float)
            if np.any(d <= 0):
                raise SbpConstructionError("mass matrix diagonal must be positive")
            self._diag = d
            self._dense = None
        else:
            a = np.asarray(dense, dtype=float)
            if not np.allclose(a, a.T):
                raise SbpConstructionError("dense mass matrix must be symmetric")
            self._diag = None
            self._dense = a

    @property
    def is_diagonal(self) -> bool:
        return self._diag is not None

    @property
    def diagonal(self) -> np.ndarray:
        if self._diag is None:
            raise ValueError("mass matrix is not stored as a diagonal")
        return self._diag

    @property
    def matrix(self) -> np.ndarray:
        if self._diag is not None:
            return np.diag(self._diag)
        return self._dense

    @property
    def n(self) -> int:
        return self._diag.size if self._diag is not None else self._dense.shape[0]

    def mul(self, v: np.ndarray) -> np.ndarray:
        """M @ v, broadcasting over leading axes of v."""
        if self._diag is not None:
            return self._diag * v
        return v @ self._dense.T if v.ndim > 1 else self._dense @ v

    def solve(self, v: np.ndarray) -> np.ndarray:
        if self._diag is not None:
            return v / self._diag
        return np.linalg.solve(self._dense, v)

    def inner(self, u: np.ndarray, v: np.ndarray) -> float:
        return float(np.sum(u * self.mul(v)))

    def norm(self, u: np.ndarray) -> float:
        return float(np.sqrt(max(self.inner(u, u), 0.0)))

    def integrate(self, u: np.ndarray) -> float:
        """Quadrature of the grid function u, i.e. 1^T M u."""
        return float(np.sum(self.mul(u)))


def _boundary_vectors(n: int):
    e_l = np.zeros(n)
    e_l[0] = 1.0
    e_r = np.zeros(n)
    e_r[-1] = 1.0
    return e_l, e_r


@dataclass(frozen=True)
class SbpOperator1:
    """First-derivative SBP operator.

    Periodic: M D + D^T M = 0.  Bounded: M D + D^T M = e_R e_R^T - e_L e_L^T.
    """

    mat: np.ndarray
    mass: MassMatrix
    grid: Grid
    periodic: bool
    accuracy_order: int

    @property
    def n(self) -> int:
        return self.mat.shape[0]

    @property
    def e_l(self) -> np.ndarray:
        return _boundary_vectors(self.n)[0]

    @property
    def e_r(self) -> np.ndarray:
        return _boundary_vectors(self.n)[1]

    def apply(self, u: np.ndarray) -> np.ndarray:
        return self.mat @ u

    def square(self) -> "SbpOperator2":
        """Wide-stencil second-derivative operator D2 = D1^2."""
        d2 = self.mat @ self.mat
        if self.periodic:
            d_l = d_r = None
        else:
            d_l = self.mat[0].copy()
            d_r = self.mat[-1].copy()
        return SbpOperator2(
            mat=d2,
            mass=self.mass,
            grid=self.grid,
            periodic=self.periodic,
            stencil_kind="wide",
            accuracy_order=self.accuracy_order,
            d_l=d_l,
            d_r=d_r,
        )


@dataclass(frozen=True)
class UpwindPair:
    """Upwind SBP operators D+ (upper biased) and D- (lower biased).

    M D+ + D-^T M equals 0 (periodic) or e_R e_R^T - e_L e_L^T (bounded),
    and the symmetric part of M (D+ - D-) is negative semidefinite.
    """

    plus: np.ndarray
    minus: np.ndarray
    mass: MassMatrix
    grid: Grid
    periodic: bool
    accuracy_order: int

    @property
    def n(self) -> int:
        return self.plus.shape[0]

    def central(self) -> SbpOperator1:
        """The average (D+ + D-)/2, a central SBP operator."""
        return SbpOperator1(
            mat=0.5 * (self.plus + self.minus),
            mass=self.mass,
            grid=self.grid,
            periodic=self.periodic,
            accuracy_order=self.accuracy_order,
        )

    def compose(self, order: str = "plus_minus") -> "SbpOperator2":
        """Narrow second-derivative operator D+ D- or D- D+."""
        if order == "plus_minus":
            d2 = self.plus @ self.minus
            boundary_rows = self.minus
        elif order == "minus_plus":
            d2 = self.minus @ self.plus
            boundary_rows = self.plus
        else:
            raise ValueError("order must be 'plus_minus' or 'minus_plus'")
        if self.periodic:
            d_l = d_r = None
        else:
            d_l = boundary_rows[0].copy()
            d_r = boundary_rows[-1].copy()
        return SbpOperator2(
            mat=d2,
            mass=self.mass,
            grid=self.grid,
            periodic=self.periodic,
            stencil_kind="narrow",
            accuracy_order=self.accuracy_order,
            d_l=d_l,
            d_r=d_r,
        )


@dataclass(frozen=True)
class SbpOperator2:
    """Second-derivative SBP operator.

    Periodic: M D2 = -A2 with A2 symmetric positive semidefinite.
    Bounded: M D2 = -A2 + e_R d_R^T - e_L d_L^T where d_L, d_R approximate
    the first derivative at the endpoints.
    """

    mat: np.ndarray
    mass: MassMatrix
    grid: Grid
    periodic: bool
    stencil_kind: str
    accuracy_order: int
    d_l: np.ndarray | None = None
    d_r: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.mat.shape[0]

    def apply(self, u: np.ndarray) -> np.ndarray:
        return self.mat @ u

    def dissipation_matrix(self) -> np.ndarray:
        """A2 recovered from the defining identity."""
        md2 = self.mass.matrix @ self.mat
        if self.periodic:
            return -md2
        e_l, e_r = _boundary_vectors(self.n)
        return -md2 + np.outer(e_r, self.d_r) - np.outer(e_l, self.d_l)

    def square(self) -> "SbpOperator4":
        """Fourth-derivative operator D4 = D2^2 (periodic only)."""
        if not self.periodic:
            raise SbpConstructionError("D4 = D2^2 is only provided for periodic operators")
        return SbpOperator4(
            mat=self.mat @ self.mat,
            mass=self.mass,
            grid=self.grid,
            periodic=True,
            accuracy_order=self.accuracy_order,
        )


@dataclass(frozen=True)
class SbpOperator4:
    """Fourth-derivative SBP operator; periodic case M D4 = A4 with A4 sym PSD."""

    mat: np.ndarray
    mass: MassMatrix
    grid: Grid
    periodic: bool
    accuracy_order: int

    @property
    def n(self) -> int:
        return self.mat.shape[0]

    def apply(self, u: np.ndarray) -> np.ndarray:
        return self.mat @ u


def dump_matrix_csv(mat: np.ndarray, path) -> None:
    """Write a matrix row-major as CSV with 17 significant digits."""
    mat = np.atleast_2d(np.asarray(mat, dtype=float))
    with open(path, "w") as fh:
        for row in mat:
            fh.write(",".join(f"{x:.17g}" for x in row) + "\n")
