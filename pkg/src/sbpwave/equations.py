"""Conservative split-form semidiscretizations of six dispersive wave models.

Each right-hand side assembles the written-out split form of its equation
using an operator bundle; pointwise products of grid functions are nodal, so
the scalar equations require a diagonal mass matrix.  The invariant
functionals returned next to each right-hand side are the quantities the
semidiscretization conserves (plus diagnostics that it does not).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .elliptic import EllipticSolver, ReflectingSolvers, make_reflecting_solvers, make_solver
from .sbp.types import MassMatrix, SbpOperator1, SbpOperator2, SbpOperator4


class ConfigurationError(ValueError):
    """Operator bundle violates a hypothesis of the requested scheme."""


@dataclass
class OperatorBundle:
    """Derivative operators sharing one grid and one mass matrix.

    d2a feeds the elliptic solves, d2b the nonlinear terms; they may differ.
    Commutation flags record which conservation hypotheses the bundle
    satisfies; builders set them from the operator family.
    """

    d1: SbpOperator1
    d2a: SbpOperator2
    d2b: SbpOperator2 | None = None
    d4a: SbpOperator4 | None = None
    d4b: SbpOperator4 | None = None
    upwind: object = None
    d1_commutes_d2a: bool = False
    d1_commutes_d2b: bool = False
    label: str = ""
    _solvers: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.d2b is None:
            self.d2b = self.d2a
            self.d1_commutes_d2b = self.d1_commutes_d2a
        reference = self.d1.mass.matrix
        for op in (self.d2a, self.d2b, self.d4a, self.d4b):
            if op is not None and not np.allclose(op.mass.matrix, reference):
                raise ConfigurationError("all operators in a bundle must share one mass matrix")

    @property
    def grid(self):
        return self.d1.grid

    @property
    def mass(self) -> MassMatrix:
        return self.d1.mass

    @property
    def n(self) -> int:
        return self.d1.n

    def require_diagonal_mass(self, equation: str):
        if not self.mass.is_diagonal:
            raise ConfigurationError(
                f"{equation}: nodal products need a diagonal mass matrix"
            )

    def solver(self, a: float, b: float, c: float = 0.0, which: str = "a") -> EllipticSolver:
        key = (float(a), float(b), float(c), which)
        if key not in self._solvers:
            d2 = self.d2a if which == "a" else self.d2b
            d4 = self.d4a if which == "a" else self.d4b
            self._solvers[key] = make_solver(d2, (a, b, c), d4=d4)
        return self._solvers[key]


# ---------------------------------------------------------------------------
# scalar equations


def bbm_rhs(bundle: OperatorBundle, u: np.ndarray) -> np.ndarray:
    """Split-form rate for the regularized long wave equation."""
    bundle.require_diagonal_mass("bbm")
    d1 = bundle.d1.mat
    flux = (d1 @ (u * u) + u * (d1 @ u)) / 3.0 + d1 @ u
    return -bundle.solver(1.0, -1.0).apply_inverse(flux)


def bbm_rhs_dissipative(bundle: OperatorBundle, u: np.ndarray) -> np.ndarray:
    """Variant with the linear term routed through the upwind composition.

    Mass stays conserved while the energy rate becomes nonpositive.
    """
    bundle.require_diagonal_mass("bbm")
    if bundle.upwind is None:
        raise ConfigurationError("bbm dissipative variant needs an upwind pair")
    pair = bundle.upwind
    d1 = bundle.d1.mat
    key = ("dissipative", id(pair))
    if key not in bundle._solvers:
        bundle._solvers[key] = make_solver(pair.compose("minus_plus"), (1.0, -1.0))
    up_solver = bundle._solvers[key]
    nonlinear = -bundle.solver(1.0, -1.0).apply_inverse((d1 @ (u * u) + u * (d1 @ u)) / 3.0)
    linear = -up_solver.apply_inverse(pair.minus @ u)
    return nonlinear + linear


def bbm_invariants(bundle: OperatorBundle, u: np.ndarray):
    m = bundle.mass
    j1 = m.integrate(u)
    j2 = 0.5 * m.inner(u, u - bundle.d2a.mat @ u)
    j3 = m.integrate((u + 1.0) ** 3)
    return j1, j2, j3


def fw_rhs(bundle: OperatorBundle, u: np.ndarray) -> np.ndarray:
    bundle.require_diagonal_mass("fornberg_whitham")
    d1 = bundle.d1.mat
    burgers = (d1 @ (u * u) + u * (d1 @ u)) / 3.0
    return -(burgers + bundle.solver(1.0, -1.0).apply_inverse(d1 @ u))


def fw_invariants(bundle: OperatorBundle, u: np.ndarray):
    m = bundle.mass
    j1 = m.integrate(u)
    j2 = m.integrate(u - bundle.d2a.mat @ u)
    j3 = m.inner(u, u)
    return j1, j2, j3


def ch_rhs(bundle: OperatorBundle, u: np.ndarray, alpha: float = 0.5) -> np.ndarray:
    bundle.require_diagonal_mass("camassa_holm")
    d1 = bundle.d1.mat
    d2b = bundle.d2b.mat
    du = d1 @ u
    d2u = d2b @ u
    flux = (
        d1 @ (u * u)
        + u * du
        - alpha * (d1 @ (u * d2u))
        - (1.0 - alpha) * (d2b @ (u * du))
        - (2.0 * alpha - 1.0) * du * d2u
    )
    return -bundle.solver(1.0, -1.0).apply_inverse(flux)


def ch_invariants(bundle: OperatorBundle, u: np.ndarray):
    m = bundle.mass
    du = bundle.d1.mat @ u
    j1 = m.integrate(u)
    j2 = 0.5 * m.inner(u, u - bundle.d2a.mat @ u)
    j3 = m.integrate(u**3 + u * du * du)
    return j1, j2, j3


def dp_rhs(bundle: OperatorBundle, u: np.ndarray) -> np.ndarray:
    bundle.require_diagonal_mass("degasperis_procesi")
    d1 = bundle.d1.mat
    d2 = bundle.d2a.mat
    flux = d1 @ (u * u) + u * (d1 @ u)
    return -bundle.solver(1.0, -1.0).apply_inverse(4.0 * flux - d2 @ flux) / 3.0


def dp_invariants(bundle: OperatorBundle, u: np.ndarray):
    m = bundle.mass
    d2 = bundle.d2a.mat
    v = bundle.solver(4.0, -1.0).apply_inverse(u)
    j1 = m.integrate(u - d2 @ u)
    j2 = 0.5 * m.inner(v, u - d2 @ u)
    j3 = m.integrate(u**3)
    return j1, j2, j3


def hh_rhs(bundle: OperatorBundle, u: np.ndarray) -> np.ndarray:
    bundle.require_diagonal_mass("holm_hone")
    if bundle.d4a is None or bundle.d4b is None:
        raise ConfigurationError("holm_hone needs fourth-derivative operators")
    d1 = bundle.d1.mat
    bu = 4.0 * u - 5.0 * (bundle.d2b.mat @ u) + bundle.d4b.mat @ u
    flux = d1 @ (u * bu) + (d1 @ u) * bu
    return -bundle.solver(4.0, -5.0, 1.0).apply_inverse(flux)


def hh_invariants(bundle: OperatorBundle, u: np.ndarray):
    m = bundle.mass
    bu = 4.0 * u - 5.0 * (bundle.d2a.mat @ u) + bundle.d4a.mat @ u
    j1 = m.integrate(u)
    j2 = m.integrate(bu)
    j3 = 0.5 * m.inner(u, bu)
    return j1, j2, j3


# ---------------------------------------------------------------------------
# two-component system


def bbm_bbm_rhs(bundle: OperatorBundle, eta: np.ndarray, u: np.ndarray):
    """Periodic two-way long wave system in conservative form."""
    d1 = bundle.d1.mat
    solver = bundle.solver(1.0, -1.0)
    deta = -solver.apply_inverse(d1 @ (u + eta * u))
    du = -solver.apply_inverse(d1 @ (eta + 0.5 * u * u))
    return deta, du


def bbm_bbm_invariants(bundle: OperatorBundle, eta: np.ndarray, u: np.ndarray):
    m = bundle.mass
    j1 = m.integrate(eta)
    j2 = m.integrate(u)
    j3 = m.inner(eta, eta) + m.inner(u * u, 1.0 + eta)
    return j1, j2, j3


def bbm_bbm_reflecting_rhs(
    solvers: ReflectingSolvers, d1: SbpOperator1, eta: np.ndarray, u: np.ndarray
):
    """Reflecting-wall variant; the rate of u is exactly zero at the walls."""
    if u[0] != 0.0 or u[-1] != 0.0:
        raise ConfigurationError("u must satisfy homogeneous Dirichlet endpoints")
    mat = d1.mat
    deta = -solvers.solve_neumann(mat @ (u + eta * u))
    du = -solvers.solve_dirichlet(mat @ (eta + 0.5 * u * u))
    return deta, du


# ---------------------------------------------------------------------------
# semidiscretization wrappers for the time integrator


@dataclass(frozen=True)
class Invariant:
    name: str
    kind: str  # linear | quadratic | cubic
    conserved: bool
    func: Callable[[np.ndarray], float]

    def __call__(self, y: np.ndarray) -> float:
        return self.func(y)


class Semidiscretization:
    """Equation tag + operators + optional manufactured source term.

    The state is a flat array for scalar equations and a (2, n) array for
    the two-component system.
    """

    def __init__(self, tag, bundle, rhs, invariants, relaxation_target, source=None,
                 state_shape=None):
        self.tag = tag
        self.bundle = bundle
        self._rhs = rhs
        self.invariants = tuple(invariants)
        self.relaxation_target = relaxation_target
        self.source = source
        self.state_shape = state_shape or (bundle.n,)

    def rhs(self, t: float, y: np.ndarray) -> np.ndarray:
        out = self._rhs(y)
        if self.source is not None:
            out = out + self.source(t)
        return out

    def invariant(self, name: str) -> Invariant:
        for inv in self.invariants:
            if inv.name == name:
                return inv
        raise KeyError(name)

    def invariant_values(self, y: np.ndarray) -> dict[str, float]:
        return {inv.name: inv(y) for inv in self.invariants}

    @property
    def conserved_names(self):
        return [inv.name for inv in self.invariants if inv.conserved]


def _scalar_source(bundle, solver, g):
    x = bundle.grid.nodes

    def src(t):
        return solver.apply_inverse(g(t, x))

    return src


def bbm(bundle: OperatorBundle, source=None) -> Semidiscretization:
    bundle.require_diagonal_mass("bbm")
    invariants = (
        Invariant("J1", "linear", True, lambda u: bbm_invariants(bundle, u)[0]),
        Invariant("J2", "quadratic", True, lambda u: bbm_invariants(bundle, u)[1]),
        Invariant("J3", "cubic", False, lambda u: bbm_invariants(bundle, u)[2]),
    )
    src = _scalar_source(bundle, bundle.solver(1.0, -1.0), source) if source else None
    return Semidiscretization(
        "bbm", bundle, lambda u: bbm_rhs(bundle, u), invariants, "J2", source=src
    )


def bbm_dissipative(bundle: OperatorBundle) -> Semidiscretization:
    invariants = (
        Invariant("J1", "linear", True, lambda u: bbm_invariants(bundle, u)[0]),
        Invariant("J2", "quadratic", False, lambda u: bbm_invariants(bundle, u)[1]),
        Invariant("J3", "cubic", False, lambda u: bbm_invariants(bundle, u)[2]),
    )
    return Semidiscretization(
        "bbm_dissipative", bundle, lambda u: bbm_rhs_dissipative(bundle, u), invariants, None
    )


def fw(bundle: OperatorBundle, source=None) -> Semidiscretization:
    bundle.require_diagonal_mass("fornberg_whitham")
    quad_conserved = bundle.d1_commutes_d2a
    invariants = (
        Invariant("J1", "linear", True, lambda u: fw_invariants(bundle, u)[0]),
        Invariant("J2", "linear", True, lambda u: fw_invariants(bundle, u)[1]),
        Invariant("J3", "quadratic", quad_conserved, lambda u: fw_invariants(bundle, u)[2]),
    )
    src = None
    if source is not None:
        solver = bundle.solver(1.0, -1.0)
        x = bundle.grid.nodes

        def src(t):
            return solver.apply_inverse(source(t, x))

    return Semidiscretization(
        "fw", bundle, lambda u: fw_rhs(bundle, u), invariants,
        "J3" if quad_conserved else None, source=src,
    )


def camassa_holm(bundle: OperatorBundle, alpha: float = 0.5, source=None) -> Semidiscretization:
    bundle.require_diagonal_mass("camassa_holm")
    lin_conserved = bundle.d1_commutes_d2b or alpha == 0.5
    invariants = (
        Invariant("J1", "linear", lin_conserved, lambda u: ch_invariants(bundle, u)[0]),
        Invariant("J2", "quadratic", True, lambda u: ch_invariants(bundle, u)[1]),
        Invariant("J3", "cubic", False, lambda u: ch_invariants(bundle, u)[2]),
    )
    src = _scalar_source(bundle, bundle.solver(1.0, -1.0), source) if source else None
    return Semidiscretization(
        "ch", bundle, lambda u: ch_rhs(bundle, u, alpha), invariants, "J2", source=src
    )


def degasperis_procesi(bundle: OperatorBundle, source=None) -> Semidiscretization:
    bundle.require_diagonal_mass("degasperis_procesi")
    invariants = (
        Invariant("J1", "linear", True, lambda u: dp_invariants(bundle, u)[0]),
        Invariant("J2", "quadratic", True, lambda u: dp_invariants(bundle, u)[1]),
        Invariant("J3", "cubic", False, lambda u: dp_invariants(bundle, u)[2]),
    )
    src = _scalar_source(bundle, bundle.solver(1.0, -1.0), source) if source else None
    return Semidiscretization(
        "dp", bundle, lambda u: dp_rhs(bundle, u), invariants, "J2", source=src
    )


def holm_hone(bundle: OperatorBundle, source=None) -> Semidiscretization:
    bundle.require_diagonal_mass("holm_hone")
    lin_conserved = bundle.d1_commutes_d2b
    invariants = (
        Invariant("J1", "linear", lin_conserved, lambda u: hh_invariants(bundle, u)[0]),
        Invariant("J2", "linear", lin_conserved, lambda u: hh_invariants(bundle, u)[1]),
        Invariant("J3", "quadratic", True, lambda u: hh_invariants(bundle, u)[2]),
    )
    src = _scalar_source(bundle, bundle.solver(4.0, -5.0, 1.0), source) if source else None
    return Semidiscretization(
        "hh", bundle, lambda u: hh_rhs(bundle, u), invariants, "J3", source=src
    )


def bbm_bbm(bundle: OperatorBundle, source=None) -> Semidiscretization:
    energy_conserved = bundle.d1_commutes_d2a
    invariants = (
        Invariant("J1", "linear", True, lambda y: bbm_bbm_invariants(bundle, y[0], y[1])[0]),
        Invariant("J2", "linear", True, lambda y: bbm_bbm_invariants(bundle, y[0], y[1])[1]),
        Invariant("J3", "cubic", energy_conserved,
                  lambda y: bbm_bbm_invariants(bundle, y[0], y[1])[2]),
    )

    def rhs(y):
        deta, du = bbm_bbm_rhs(bundle, y[0], y[1])
        return np.stack([deta, du])

    src = None
    if source is not None:
        solver = bundle.solver(1.0, -1.0)
        x = bundle.grid.nodes

        def src(t):
            g_eta, g_u = source(t, x)
            return np.stack([solver.apply_inverse(g_eta), solver.apply_inverse(g_u)])

    return Semidiscretization(
        "bbm_bbm", bundle, rhs, invariants,
        "J3" if energy_conserved else None, source=src, state_shape=(2, bundle.n),
    )


class ReflectingBundle:
    """Bounded first-derivative operator plus its wall-condition solvers."""

    def __init__(self, d1: SbpOperator1, label: str = ""):
        if d1.periodic:
            raise ConfigurationError("reflecting system needs a bounded operator")
        self.d1 = d1
        self.solvers = make_reflecting_solvers(d1)
        self.label = label

    @property
    def grid(self):
        return self.d1.grid

    @property
    def mass(self):
        return self.d1.mass

    @property
    def n(self):
        return self.d1.n


def bbm_bbm_reflecting(bundle: ReflectingBundle, source=None) -> Semidiscretization:
    mass = bundle.mass
    invariants = (
        Invariant("J1", "linear", True, lambda y: mass.integrate(y[0])),
        Invariant("J3", "cubic", True,
                  lambda y: mass.inner(y[0], y[0]) + mass.inner(y[1] * y[1], 1.0 + y[0])),
    )

    def rhs(y):
        deta, du = bbm_bbm_reflecting_rhs(bundle.solvers, bundle.d1, y[0], y[1])
        return np.stack([deta, du])

    src = None
    if source is not None:
        x = bundle.grid.nodes
        solvers = bundle.solvers

        def src(t):
            g_eta, g_u = source(t, x)
            return np.stack([solvers.solve_neumann(g_eta), solvers.solve_dirichlet(g_u)])

    return Semidiscretization(
        "bbm_bbm_reflecting", bundle, rhs, invariants, "J3", source=src,
        state_shape=(2, bundle.n),
    )
