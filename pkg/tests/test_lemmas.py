"""Property suite for the structural lemmas all periodic operators satisfy.

Each lemma is exercised on 100 seeded random vectors per operator family:
the quadrature vector annihilates M D, the inverse elliptic operator
preserves quadrature, the mollified derivative is M-skew for commuting
pairs, and the upwind compositions have one-sided sign.
"""

import numpy as np
import pytest

from sbpwave.elliptic import make_solver
from sbpwave.sbp import (
    couple_cg,
    couple_cg_d2,
    couple_cg_upwind,
    couple_dg,
    couple_dg_upwind,
    fd_periodic_d1,
    fd_periodic_d2,
    fd_periodic_upwind,
    fourier_d1,
    uniform_mesh,
    compatibility_gap,
)

DOMAIN = (-1.0, 3.0)
NUM_RANDOM = 100


def random_vectors(n, seed=0):
    rng = np.random.default_rng(seed)
    return rng.uniform(-1.0, 1.0, (NUM_RANDOM, n))


def periodic_d1_operators():
    ops = {"fourier": fourier_d1(24, DOMAIN)}
    for order in (2, 4, 6, 8):
        ops[f"fd{order}"] = fd_periodic_d1(32, DOMAIN, order)
    ops["dg_p2"] = couple_dg(uniform_mesh(DOMAIN, 5, 2), periodic=True)
    ops["cg_p3"] = couple_cg(uniform_mesh(DOMAIN, 5, 3), periodic=True)
    return ops


def periodic_d2_operators():
    ops = {}
    for order in (2, 4, 6):
        ops[f"fd{order}_narrow"] = fd_periodic_d2(32, DOMAIN, order, "narrow")
    ops["fd4_wide"] = fd_periodic_d2(32, DOMAIN, 4, "wide")
    ops["fourier_wide"] = fourier_d1(24, DOMAIN).square()
    ops["cg_p3_narrow"] = couple_cg_d2(uniform_mesh(DOMAIN, 5, 3), periodic=True)
    pair = fd_periodic_upwind(32, DOMAIN, 3)
    ops["upwind3_composed"] = pair.compose("plus_minus")
    return ops


@pytest.mark.parametrize("name,op", periodic_d1_operators().items())
def test_quadrature_annihilates_m_d1(name, op):
    md = op.mass.matrix @ op.mat
    scale = np.max(np.abs(md))
    assert np.max(np.abs(md.sum(axis=0))) <= 1e-12 * scale


@pytest.mark.parametrize(
    "name,pair",
    {
        "fd_up2": fd_periodic_upwind(32, DOMAIN, 2),
        "fd_up5": fd_periodic_upwind(32, DOMAIN, 5),
        "dg_up_p2": couple_dg_upwind(uniform_mesh(DOMAIN, 5, 2), periodic=True),
        "cg_up_p3": couple_cg_upwind(uniform_mesh(DOMAIN, 5, 3, upwind=True), periodic=True),
    }.items(),
)
def test_quadrature_annihilates_m_d1_upwind(name, pair):
    m = pair.mass.matrix
    for mat in (pair.plus, pair.minus):
        md = m @ mat
        assert np.max(np.abs(md.sum(axis=0))) <= 1e-12 * np.max(np.abs(md))


@pytest.mark.parametrize("name,d2", periodic_d2_operators().items())
def test_quadrature_annihilates_m_d2(name, d2):
    md = d2.mass.matrix @ d2.mat
    assert np.max(np.abs(md.sum(axis=0))) <= 1e-12 * np.max(np.abs(md))


def test_quadrature_annihilates_m_d4():
    d4 = fourier_d1(24, DOMAIN).square().square()
    md = d4.mass.matrix @ d4.mat
    assert np.max(np.abs(md.sum(axis=0))) <= 1e-12 * np.max(np.abs(md))


@pytest.mark.parametrize("name,d2", periodic_d2_operators().items())
def test_inverse_elliptic_preserves_quadrature(name, d2):
    solver = make_solver(d2, (1.0, -1.0, 0.0))
    m = d2.mass
    for i, w in enumerate(random_vectors(d2.n, seed=41)):
        lhs = m.integrate(solver.apply_inverse(w))
        rhs = m.integrate(w)
        assert abs(lhs - rhs) <= 1e-10 * max(abs(rhs), 1.0), (name, i)


@pytest.mark.parametrize(
    "make",
    [
        lambda: (fourier_d1(24, DOMAIN), fourier_d1(24, DOMAIN).square()),
        lambda: (
            fd_periodic_d1(32, DOMAIN, 4),
            fd_periodic_d2(32, DOMAIN, 4, "narrow"),
        ),
        lambda: (
            fd_periodic_d1(32, DOMAIN, 6),
            fd_periodic_d1(32, DOMAIN, 6).square(),
        ),
    ],
)
def test_mollified_derivative_skew_for_commuting_pairs(make):
    d1, d2 = make()
    solver = make_solver(d2, (1.0, -1.0, 0.0))
    m = d1.mass
    scale = np.max(np.abs(d1.mat)) * np.max(np.abs(m.matrix))
    rng = np.random.default_rng(17)
    for _ in range(NUM_RANDOM):
        u = rng.uniform(-1.0, 1.0, d1.n)
        v = rng.uniform(-1.0, 1.0, d1.n)
        lhs = m.inner(u, solver.apply_inverse(d1.mat @ v))
        rhs = m.inner(v, solver.apply_inverse(d1.mat @ u))
        assert abs(lhs + rhs) <= 1e-10 * max(scale, 1.0)


def test_mollified_derivative_skew_matrixwise():
    d1 = fourier_d1(24, DOMAIN)
    d2 = d1.square()
    m = d1.mass.matrix
    a = m @ np.linalg.solve(np.eye(d1.n) - d2.mat, d1.mat)
    assert np.max(np.abs(a + a.T)) <= 1e-11 * np.max(np.abs(a))


@pytest.mark.parametrize("order", [1, 2, 3, 4])
def test_upwind_composition_sign(order):
    pair = fd_periodic_upwind(32, DOMAIN, order)
    n = pair.n
    m = pair.mass.matrix
    eye = np.eye(n)
    plus_of_minus = m @ np.linalg.solve(eye - pair.minus @ pair.plus, pair.minus)
    scale = np.max(np.abs(plus_of_minus))
    evals = np.linalg.eigvalsh(0.5 * (plus_of_minus + plus_of_minus.T))
    assert evals.min() >= -1e-11 * scale
    minus_of_plus = m @ np.linalg.solve(eye - pair.plus @ pair.minus, pair.plus)
    evals = np.linalg.eigvalsh(0.5 * (minus_of_plus + minus_of_plus.T))
    assert evals.max() <= 1e-11 * np.max(np.abs(minus_of_plus))


def test_upwind_composition_sign_quadratic_form():
    pair = fd_periodic_upwind(32, DOMAIN, 3)
    m = pair.mass
    d2 = pair.compose("minus_plus")
    solver = make_solver(d2, (1.0, -1.0, 0.0))
    scale = np.max(np.abs(pair.minus)) * m.matrix.max()
    for u in random_vectors(pair.n, seed=23):
        val = m.inner(u, solver.apply_inverse(pair.minus @ u))
        assert val >= -1e-10 * max(scale, 1.0)


def test_wide_stencil_is_least_dissipative():
    d1 = fd_periodic_d1(24, DOMAIN, 4)
    wide = d1.square()
    narrow = fd_periodic_d2(24, DOMAIN, 4, "narrow")
    # equality for the squared operator, surplus dissipation for the narrow one
    assert abs(compatibility_gap(d1, wide)) <= 1e-11
    assert compatibility_gap(d1, narrow) >= -1e-11
