"""Cached inverses of elliptic operators a I + b D2 + c D4.

Every right-hand-side evaluation of the wave equations applies one of these
inverses, so the assembled matrix is factorized once and reused.  The
factorization works on the mass-weighted form W = M (a I + b D2 + c D4),
which is symmetric by the SBP identities; a Cholesky factorization of W
doubles as the positive definiteness check.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .sbp.types import MassMatrix, SbpOperator1, SbpOperator2, SbpOperator4


class IndefiniteOperatorError(ValueError):
    """Assembled elliptic operator is not positive definite."""


class EllipticSolver:
    """Factorized inverse of A = a I + b D2 + c D4 (M-symmetric positive definite)."""

    def __init__(self, d2: SbpOperator2, coefficients, d4: SbpOperator4 | None = None):
        coefficients = tuple(float(x) for x in coefficients)
        if len(coefficients) == 2:
            coefficients = (*coefficients, 0.0)
        a, b, c = coefficients
        if c != 0.0 and d4 is None:
            raise ValueError("coefficients include a fourth-derivative term but no D4 given")
        n = d2.n
        mat = a * np.eye(n) + b * d2.mat
        if c != 0.0:
            mat += c * d4.mat
        self.coefficients = (a, b, c)
        self.mass = d2.mass
        self.matrix = mat
        weighted = self.mass.matrix @ mat
        weighted = 0.5 * (weighted + weighted.T)
        try:
            self._chol = scipy.linalg.cho_factor(weighted, lower=True)
        except scipy.linalg.LinAlgError as exc:
            smallest = float(scipy.linalg.eigvalsh(weighted)[0])
            raise IndefiniteOperatorError(
                f"operator a I + b D2 + c D4 with (a, b, c)={self.coefficients} is not "
                f"positive definite; smallest eigenvalue of the weighted form is {smallest:.3e}"
            ) from exc

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def apply_inverse(self, w: np.ndarray) -> np.ndarray:
        w = np.asarray(w, dtype=float)
        if w.shape[-1] != self.n:
            raise ValueError(f"length mismatch: solver size {self.n}, input {w.shape[-1]}")
        rhs = self.mass.mul(w)
        return scipy.linalg.cho_solve(self._chol, rhs.T).T if w.ndim > 1 else scipy.linalg.cho_solve(self._chol, rhs)

    def apply_forward(self, v: np.ndarray) -> np.ndarray:
        return v @ self.matrix.T if np.ndim(v) > 1 else self.matrix @ v


def make_solver(d2: SbpOperator2, coefficients, d4: SbpOperator4 | None = None) -> EllipticSolver:
    return EllipticSolver(d2, coefficients, d4=d4)


class ReflectingSolvers:
    """Elliptic inverses of I - D1^2 with reflecting-wall boundary treatment.

    The Dirichlet variant solves the interior system and pins the endpoint
    values to exactly zero; the Neumann variant solves
    (I + M^{-1} D1^T M P D1) v = w with P = diag(0, 1, ..., 1, 0).
    """

    def __init__(self, d1: SbpOperator1):
        if d1.periodic:
            raise ValueError("reflecting solvers need a bounded first-derivative operator")
        n = d1.n
        self.n = n
        self.mass = d1.mass
        d1sq = d1.mat @ d1.mat
        full = np.eye(n) - d1sq
        self._interior_lu = scipy.linalg.lu_factor(full[1:-1, 1:-1])
        proj = np.ones(n)
        proj[0] = proj[-1] = 0.0
        m = d1.mass.matrix
        stiffness = d1.mat.T @ (proj[:, None] * (m @ d1.mat))
        self.neumann_matrix = np.eye(n) + np.linalg.solve(m, stiffness)
        weighted = m @ self.neumann_matrix
        weighted = 0.5 * (weighted + weighted.T)
        try:
            self._neumann_chol = scipy.linalg.cho_factor(weighted, lower=True)
        except scipy.linalg.LinAlgError as exc:
            smallest = float(scipy.linalg.eigvalsh(weighted)[0])
            raise IndefiniteOperatorError(
                f"Neumann-modified operator is not positive definite; smallest "
                f"eigenvalue of the weighted form is {smallest:.3e}"
            ) from exc

    def solve_dirichlet(self, w: np.ndarray) -> np.ndarray:
        """Solve (I - D2_D) v = w strongly; v is exactly zero at the endpoints."""
        w = np.asarray(w, dtype=float)
        v = np.zeros_like(w)
        v[1:-1] = scipy.linalg.lu_solve(self._interior_lu, w[1:-1])
        return v

    def solve_neumann(self, w: np.ndarray) -> np.ndarray:
        w = np.asarray(w, dtype=float)
        rhs = self.mass.mul(w)
        return scipy.linalg.cho_solve(self._neumann_chol, rhs)


def make_reflecting_solvers(d1: SbpOperator1) -> ReflectingSolvers:
    return ReflectingSolvers(d1)
