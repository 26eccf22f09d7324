"""Explicit Runge-Kutta integration with optional invariant-conserving relaxation.

A relaxation step rescales the update direction d = sum_i b_i f_i by the root
gamma of J(u + gamma dt d) = J(u) closest to one and advances time by
gamma dt, so the selected invariant is constant to root-finder accuracy while
linear invariants stay conserved whenever the semidiscretization conserves
them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.optimize


class StepFailure(RuntimeError):
    """A step could not be completed (no relaxation root, bad error estimate)."""


@dataclass(frozen=True)
class ButcherTableau:
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    order: int
    name: str = ""
    b_embedded: np.ndarray | None = None
    embedded_order: int = 0

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        c = np.asarray(self.c, dtype=float)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        if self.b_embedded is not None:
            object.__setattr__(self, "b_embedded", np.asarray(self.b_embedded, dtype=float))
        if abs(b.sum() - 1.0) > 1e-13:
            raise ValueError("tableau weights must sum to one")
        if np.max(np.abs(a.sum(axis=1) - c)) > 1e-13:
            raise ValueError("tableau abscissae must match row sums")

    @property
    def stages(self) -> int:
        return self.b.size

    @property
    def is_explicit(self) -> bool:
        return bool(np.all(np.abs(np.triu(self.a)) == 0.0))


def classical_rk4() -> ButcherTableau:
    a = np.zeros((4, 4))
    a[1, 0] = 0.5
    a[2, 1] = 0.5
    a[3, 2] = 1.0
    return ButcherTableau(
        a=a,
        b=[1 / 6, 1 / 3, 1 / 3, 1 / 6],
        c=[0.0, 0.5, 0.5, 1.0],
        order=4,
        name="rk4",
    )


def dormand_prince_45() -> ButcherTableau:
    """Fifth-order pair with a fourth-order error estimator."""
    a = np.zeros((7, 7))
    a[1, 0] = 1 / 5
    a[2, :2] = [3 / 40, 9 / 40]
    a[3, :3] = [44 / 45, -56 / 15, 32 / 9]
    a[4, :4] = [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]
    a[5, :5] = [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]
    a[6, :6] = [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]
    b = [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0]
    b_hat = [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
    c = [0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0]
    return ButcherTableau(
        a=a, b=b, c=c, order=5, b_embedded=b_hat, embedded_order=4, name="rk45"
    )


def sixth_order_rk() -> ButcherTableau:
    """Seven-stage sixth-order method with closed-form sqrt(21) coefficients."""
    q = math.sqrt(21.0)
    a = np.zeros((7, 7))
    a[1, 0] = 1.0
    a[2, :2] = [3 / 8, 1 / 8]
    a[3, :3] = [8 / 27, 2 / 27, 8 / 27]
    a[4, :4] = [
        3 * (3 * q - 7) / 392,
        -8 * (7 - q) / 392,
        48 * (7 - q) / 392,
        -3 * (21 - q) / 392,
    ]
    a[5, :5] = [
        -5 * (231 + 51 * q) / 1960,
        -40 * (7 + q) / 1960,
        -320 * q / 1960,
        3 * (21 + 121 * q) / 1960,
        392 * (6 + q) / 1960,
    ]
    a[6, :6] = [
        15 * (22 + 7 * q) / 180,
        120 / 180,
        40 * (7 * q - 5) / 180,
        -63 * (3 * q - 2) / 180,
        -14 * (49 + 9 * q) / 180,
        70 * (7 - q) / 180,
    ]
    b = [1 / 20, 0.0, 16 / 45, 0.0, 49 / 180, 49 / 180, 1 / 20]
    c = [0.0, 1.0, 1 / 2, 2 / 3, (7 - q) / 14, (7 + q) / 14, 1.0]
    return ButcherTableau(a=a, b=b, c=c, order=6, name="rk6")


TABLEAUS: dict[str, Callable[[], ButcherTableau]] = {
    "rk4": classical_rk4,
    "rk45": dormand_prince_45,
    "rk6": sixth_order_rk,
}


def get_tableau(name: str) -> ButcherTableau:
    try:
        return TABLEAUS[name]()
    except KeyError:
        raise ValueError(f"unknown tableau {name!r}") from None


# ---------------------------------------------------------------------------
# order conditions via rooted trees


def rooted_trees(order: int):
    """All rooted trees with the given node count, as canonical nested tuples."""
    if order == 1:
        return [()]
    trees = []

    def fill(remaining, available, current):
        if remaining == 0:
            trees.append(tuple(current))
            return
        for idx, (size, tree) in enumerate(available):
            if size <= remaining:
                fill(remaining - size, available[idx:], current + [tree])

    smaller = []
    for k in range(1, order):
        smaller.extend((k, t) for t in rooted_trees(k))
    smaller.sort(key=lambda st: (st[0], st[1]))
    fill(order - 1, smaller, [])
    return sorted(set(trees))


def _tree_density(tree) -> int:
    size = _tree_order(tree)
    out = size
    for child in tree:
        out *= _tree_density(child)
    return out


def _tree_order(tree) -> int:
    return 1 + sum(_tree_order(child) for child in tree)


def _elementary_weight(tableau: ButcherTableau, tree) -> float:
    def stage_vector(t):
        g = np.ones(tableau.stages)
        for child in t:
            g = g * (tableau.a @ stage_vector(child))
        return g

    return float(tableau.b @ stage_vector(tree))


def order_condition_residual(tableau: ButcherTableau, order: int) -> float:
    """Largest violation of the order conditions up to the given order."""
    worst = 0.0
    for p in range(1, order + 1):
        for tree in rooted_trees(p):
            residual = abs(_elementary_weight(tableau, tree) - 1.0 / _tree_density(tree))
            worst = max(worst, residual)
    return worst


# ---------------------------------------------------------------------------
# stepping


def rk_step(tableau: ButcherTableau, rhs, y, t: float, dt: float):
    """One explicit step; returns the standard update and the direction d."""
    if not tableau.is_explicit:
        raise ValueError("only explicit tableaus are supported")
    a, b, c = tableau.a, tableau.b, tableau.c
    k = []
    for i in range(tableau.stages):
        yi = y
        for j in range(i):
            if a[i, j] != 0.0:
                yi = yi + dt * a[i, j] * k[j]
        k.append(rhs(t + c[i] * dt, yi))
    direction = sum(bi * ki for bi, ki in zip(b, k) if bi != 0.0)
    if tableau.b_embedded is None:
        return y + dt * direction, direction, None
    err_direction = sum(
        (bi - bhi) * ki for bi, bhi, ki in zip(b, tableau.b_embedded, k)
    )
    return y + dt * direction, direction, dt * err_direction


@dataclass
class RelaxationConfig:
    invariant: Callable[[np.ndarray], float]
    bracket_width: float = 0.5
    tolerance: float = 1e-14
    max_iterations: int = 100
    max_bracket_doublings: int = 5

    def __post_init__(self):
        if self.tolerance <= 0.0:
            raise ValueError("root tolerance must be positive")
        if not 0.0 < self.bracket_width:
            raise ValueError("bracket must have positive width around one")


@dataclass
class StepResult:
    state: np.ndarray
    gamma: float
    dt_effective: float
    invariants: dict


def solve_gamma(invariant, y, direction, dt: float, config: RelaxationConfig | None = None) -> float:
    """Root of J(y + gamma dt d) = J(y) closest to one."""
    config = config or RelaxationConfig(invariant=invariant)
    norm = np.max(np.abs(direction)) if np.size(direction) else 0.0
    if not np.isfinite(norm):
        raise StepFailure("update direction is not finite")
    if norm == 0.0:
        return 1.0
    j0 = invariant(y)

    def g(gamma):
        return invariant(y + (gamma * dt) * direction) - j0

    width = config.bracket_width
    for _ in range(config.max_bracket_doublings + 1):
        # keep the bracket away from the trivial root gamma = 0
        lo, hi = max(1.0 - width, 1e-8), 1.0 + width
        g_lo, g_hi = g(lo), g(hi)
        if g_lo == 0.0 and g_hi == 0.0:
            return 1.0  # invariant is flat along the update direction
        if np.sign(g_lo) != np.sign(g_hi):
            return float(
                scipy.optimize.brentq(
                    g, lo, hi, xtol=config.tolerance, rtol=4 * np.finfo(float).eps,
                    maxiter=config.max_iterations,
                )
            )
        width *= 2.0
    raise StepFailure(
        f"no sign change for the relaxation root in [1 - {width}, 1 + {width}]; "
        "reduce the time step"
    )


def gamma_closed_form_quadratic(apply_form, y, direction, dt: float) -> float:
    """Nonzero root for J(u) = 0.5 u^T A u, used as a cross-check in tests."""
    num = float(np.sum(y * apply_form(direction)))
    den = float(np.sum(direction * apply_form(direction)))
    return -2.0 * num / (dt * den)


def relaxation_step(tableau, rhs, y, t, dt, config: RelaxationConfig,
                    invariants=None) -> StepResult:
    _, direction, _ = rk_step(tableau, rhs, y, t, dt)
    gamma = solve_gamma(config.invariant, y, direction, dt, config)
    new_state = y + (gamma * dt) * direction
    values = {name: func(new_state) for name, func in (invariants or {}).items()}
    return StepResult(state=new_state, gamma=gamma, dt_effective=gamma * dt, invariants=values)


@dataclass
class IntegrationResult:
    times: np.ndarray
    state: np.ndarray
    invariant_log: dict[str, np.ndarray]
    gammas: np.ndarray
    states: list = field(default_factory=list)
    steps_taken: int = 0
    steps_rejected: int = 0
    final_step_clamped: bool = False


def integrate(
    tableau: ButcherTableau,
    rhs,
    y0,
    t_span,
    dt: float | None = None,
    *,
    adaptive: bool = False,
    rtol: float = 1e-12,
    atol: float = 1e-12,
    relaxation: RelaxationConfig | None = None,
    invariants: dict[str, Callable] | None = None,
    store_states: bool = False,
    max_steps: int = 10_000_000,
) -> IntegrationResult:
    """Drive the integration over t_span, recording invariants and gamma.

    Fixed steps by default; with adaptive=True the embedded error estimate
    controls the step.  The final step is clamped to hit t_end exactly; if
    relaxation cannot bracket a root on that tiny clamped step it runs
    un-relaxed and the result is flagged.
    """
    t, t_end = float(t_span[0]), float(t_span[1])
    if adaptive and tableau.b_embedded is None:
        raise ValueError("adaptive stepping needs an embedded tableau")
    if dt is None:
        if not adaptive:
            raise ValueError("fixed stepping needs dt")
        dt = (t_end - t) / 100.0
    y = np.array(y0, dtype=float)
    invariants = invariants or {}

    times = [t]
    gammas = []
    log = {name: [func(y)] for name, func in invariants.items()}
    states = [y.copy()] if store_states else []
    steps = rejected = 0
    clamped = False
    order = tableau.embedded_order if adaptive else tableau.order

    while t < t_end - 1e-14 * max(abs(t_end), 1.0):
        if steps + rejected >= max_steps:
            raise StepFailure(f"exceeded {max_steps} steps at t = {t}")
        dt_step = min(dt, t_end - t)
        is_clamped = dt_step < dt
        y_std, direction, err = rk_step(tableau, rhs, y, t, dt_step)
        if adaptive:
            scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_std))
            err_norm = float(np.sqrt(np.mean((err / scale) ** 2)))
            if not np.isfinite(err_norm):
                dt *= 0.2
                rejected += 1
                continue
            if err_norm > 1.0:
                dt *= max(0.2, 0.9 * err_norm ** (-1.0 / order))
                rejected += 1
                continue
        gamma = 1.0
        if relaxation is not None:
            try:
                gamma = solve_gamma(relaxation.invariant, y, direction, dt_step, relaxation)
            except StepFailure:
                if is_clamped:
                    gamma = 1.0  # final fractional step runs without relaxation
                    clamped = True
                else:
                    raise
            y = y + (gamma * dt_step) * direction
            t = t + gamma * dt_step
        else:
            y = y_std
            t = t + dt_step
        steps += 1
        times.append(t)
        gammas.append(gamma)
        for name, func in invariants.items():
            log[name].append(func(y))
        if store_states:
            states.append(y.copy())
        if adaptive:
            dt = dt * min(5.0, max(0.2, 0.9 * err_norm ** (-1.0 / order) if err_norm > 0 else 5.0))

    return IntegrationResult(
        times=np.asarray(times),
        state=y,
        invariant_log={k: np.asarray(v) for k, v in log.items()},
        gammas=np.asarray(gammas),
        states=states,
        steps_taken=steps,
        steps_rejected=rejected,
        final_step_clamped=clamped,
    )
