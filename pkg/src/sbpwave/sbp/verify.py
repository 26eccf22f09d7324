"""Verification of the defining SBP identities.

verify_sbp inspects an operator, measures the residual of each identity it
must satisfy, checks semidefiniteness margins with a symmetric eigensolver,
and probes the polynomial accuracy.  Failures are reported, not raised.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .types import MassMatrix, SbpOperator1, SbpOperator2, SbpOperator4, UpwindPair

DEFAULT_RTOL = 1e-11


@dataclass
class CheckResult:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance


@dataclass
class VerificationReport:
    operator: str
    checks: list[CheckResult] = field(default_factory=list)
    accuracy_order_found: int = -1
    claimed_order: int = -1

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks) and (
            self.accuracy_order_found >= self.claimed_order
        )

    def add(self, name, residual, tolerance):
        self.checks.append(CheckResult(name, float(residual), float(tolerance)))

    def as_dict(self) -> dict:
        return {
            "operator": self.operator,
            "passed": self.passed,
            "accuracy_order_found": self.accuracy_order_found,
            "claimed_order": self.claimed_order,
            "checks": [
                {
                    "name": c.name,
                    "residual": c.residual,
                    "tolerance": c.tolerance,
                    "passed": c.passed,
                }
                for c in self.checks
            ],
        }


def _maxabs(a) -> float:
    return float(np.max(np.abs(a))) if np.size(a) else 0.0


def _sym_eigvals(a: np.ndarray) -> np.ndarray:
    return scipy.linalg.eigvalsh(0.5 * (a + a.T))

def _boundary_term(n: int) -> np.ndarray:
    b = np.zeros((n, n))
    b[0, 0] = -1.0
    b[-1, -1] = 1.0
    return b


def _wrap_free_rows(mat: np.ndarray, grid) -> np.ndarray:
    """Rows whose stencil does not straddle the periodic wrap.

    Uses the nonzero pattern: a row is usable for polynomial tests if all of
    its significant entries sit inside a contiguous index window not touching
    both ends of the grid.
    """
    n = mat.shape[0]
    scale = _maxabs(mat)
    mask = np.zeros(n, dtype=bool)
    for i in range(n):
        cols = np.nonzero(np.abs(mat[i]) > 1e-13 * scale)[0]
        if cols.size == 0 or np.max(np.abs(cols - i)) < n / 2:
            mask[i] = True
    return mask


def _polynomial_order(mat: np.ndarray, grid, derivative: int, max_order: int = 12) -> int:
    """Largest k with D x^k = k!/(k-d)! x^(k-d) on wrap-free rows."""
    nodes = grid.nodes
    center = 0.5 * (grid.x_min + grid.x_max)
    half = 0.5 * grid.length
    xi = (nodes - center) / half
    d_xi = mat * half**derivative
    rows = _wrap_free_rows(mat, grid) if grid.periodic else np.ones(len(nodes), dtype=bool)
    if not np.any(rows):
        return -1
    scale = _maxabs(d_xi)
    order = -1
    from math import factorial

    for k in range(max_order + 1):
        target = np.zeros_like(xi)
        if k >= derivative:
            target = (factorial(k) / factorial(k - derivative)) * xi ** (k - derivative)
        res = d_xi @ xi**k - target
        if _maxabs(res[rows]) > 1e-10 * max(scale, 1.0):
            break
        order = k
    return order


def _trigonometric_order(mat: np.ndarray, grid, derivative: int) -> int:
    """Number of exactly differentiated Fourier modes (dense periodic case)."""
    nodes = grid.nodes
    scale = _maxabs(mat) * max(1.0, grid.length)
    omega = 2.0 * np.pi / grid.length
    order = 0
    n = nodes.size
    for k in range(1, n // 2 + 1):
        phase = omega * k * (nodes - grid.x_min)
        s, c = np.sin(phase), np.cos(phase)
        fac = (omega * k) ** derivative
        if derivative % 4 == 0:
            ts, tc = fac * s, fac * c
        elif derivative % 4 == 1:
            ts, tc = fac * c, -fac * s
        elif derivative % 4 == 2:
            ts, tc = -fac * s, -fac * c
        else:
            ts, tc = -fac * c, fac * s
        res = _maxabs(mat @ c - tc)
        if not (n % 2 == 0 and 2 * k == n):
            # the sine mode at the Nyquist frequency samples to zero on an
            # even grid, so it is only testable below that frequency
            res = max(res, _maxabs(mat @ s - ts))
        if res > 1e-9 * max(scale, fac):
            break
        order = k
    return order


def _measure_order(mat, grid, derivative):
    """Best applicable accuracy notion: polynomial exactness on wrap-free
    rows for banded operators, exactly differentiated modes for dense
    spectral ones."""
    order = _polynomial_order(mat, grid, derivative)
    if grid.periodic:
        order = max(order, _trigonometric_order(mat, grid, derivative))
    return order


def verify_sbp(op, rtol: float = DEFAULT_RTOL) -> VerificationReport:
    """Check the defining identities of any supported SBP operator type."""
    if isinstance(op, SbpOperator1):
        return _verify_d1(op, rtol)
    if isinstance(op, UpwindPair):
        return _verify_upwind(op, rtol)
    if isinstance(op, SbpOperator2):
        return _verify_d2(op, rtol)
    if isinstance(op, SbpOperator4):
        return _verify_d4(op, rtol)
    raise TypeError(f"unsupported operator type {type(op)!r}")


def _mass_checks(report, mass: MassMatrix, grid, rtol):
    m = mass.matrix
    report.add("mass_symmetry", _maxabs(m - m.T), rtol * max(_maxabs(m), 1.0))
    quad = float(np.sum(m))
    report.add("mass_quadrature_length", abs(quad - grid.length), rtol * max(grid.length, 1.0))


def _verify_d1(op: SbpOperator1, rtol) -> VerificationReport:
    report = VerificationReport(operator="first_derivative", claimed_order=op.accuracy_order)
    m = op.mass.matrix
    md = m @ op.mat
    scale = max(_maxabs(md), 1.0)
    if op.periodic:
        report.add("periodic_identity", _maxabs(md + md.T), rtol * scale)
        report.add("ones_in_left_kernel", _maxabs(np.sum(md, axis=0)), rtol * scale)
    else:
        report.add("bounded_identity", _maxabs(md + md.T - _boundary_term(op.n)), rtol * scale)
    _mass_checks(report, op.mass, op.grid, rtol)
    report.accuracy_order_found = _measure_order(op.mat, op.grid, 1)
    return report


def _verify_upwind(op: UpwindPair, rtol) -> VerificationReport:
    report = VerificationReport(operator="upwind_pair", claimed_order=op.accuracy_order)
    m = op.mass.matrix
    mdp = m @ op.plus
    scale = max(_maxabs(mdp), 1.0)
    if op.periodic:
        report.add("periodic_identity", _maxabs(mdp + (m @ op.minus).T), rtol * scale)
        report.add("ones_in_left_kernel_plus", _maxabs(np.sum(mdp, axis=0)), rtol * scale)
        report.add(
            "ones_in_left_kernel_minus", _maxabs(np.sum(m @ op.minus, axis=0)), rtol * scale
        )
    else:
        report.add(
            "bounded_identity",
            _maxabs(mdp + (m @ op.minus).T - _boundary_term(op.n)),
            rtol * scale,
        )
    evals = _sym_eigvals(m @ (op.plus - op.minus))
    report.add("dissipation_sign", max(float(evals.max()), 0.0), rtol * scale)
    central = op.central()
    mdc = m @ central.mat
    if op.periodic:
        report.add("central_average_identity", _maxabs(mdc + mdc.T), rtol * scale)
    else:
        report.add(
            "central_average_identity",
            _maxabs(mdc + mdc.T - _boundary_term(op.n)),
            rtol * scale,
        )
    _mass_checks(report, op.mass, op.grid, rtol)
    order_plus = _measure_order(op.plus, op.grid, 1)
    order_minus = _measure_order(op.minus, op.grid, 1)
    report.accuracy_order_found = min(order_plus, order_minus)
    return report


def _verify_d2(op: SbpOperator2, rtol) -> VerificationReport:
    report = VerificationReport(operator="second_derivative", claimed_order=op.accuracy_order)
    m = op.mass.matrix
    md2 = m @ op.mat
    scale = max(_maxabs(md2), 1.0)
    if op.periodic:
        report.add("symmetry", _maxabs(md2 - md2.T), rtol * scale)
        evals = _sym_eigvals(md2)
        report.add("negative_semidefinite", max(float(evals.max()), 0.0), rtol * scale)
        report.add("ones_in_left_kernel", _maxabs(np.sum(md2, axis=0)), rtol * scale)
    else:
        a2 = op.dissipation_matrix()
        report.add("dissipation_symmetry", _maxabs(a2 - a2.T), rtol * scale)
        evals = _sym_eigvals(a2)
        report.add("dissipation_positive_semidefinite", max(-float(evals.min()), 0.0), rtol * scale)
    _mass_checks(report, op.mass, op.grid, rtol)
    report.accuracy_order_found = _measure_order(op.mat, op.grid, 2)
    return report


def _verify_d4(op: SbpOperator4, rtol) -> VerificationReport:
    report = VerificationReport(operator="fourth_derivative", claimed_order=op.accuracy_order)
    m = op.mass.matrix
    md4 = m @ op.mat
    scale = max(_maxabs(md4), 1.0)
    report.add("symmetry", _maxabs(md4 - md4.T), rtol * scale)
    evals = _sym_eigvals(md4)
    report.add("positive_semidefinite", max(-float(evals.min()), 0.0), rtol * scale)
    if op.periodic:
        report.add("ones_in_left_kernel", _maxabs(np.sum(md4, axis=0)), rtol * scale)
    _mass_checks(report, op.mass, op.grid, rtol)
    report.accuracy_order_found = _measure_order(op.mat, op.grid, 4)
    return report


def compatibility_gap(d1: SbpOperator1, d2: SbpOperator2) -> float:
    """Smallest eigenvalue of D1^T M D1 - A2 (negative when incompatible).

    Compatible second-derivative operators dissipate at least as much as the
    squared first-derivative operator.
    """
    m = d1.mass.matrix
    stiff = d1.mat.T @ m @ d1.mat
    a2 = d2.dissipation_matrix()
    return float(_sym_eigvals(a2 - stiff).min())
