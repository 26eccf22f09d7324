"""Right-hand sides against independent dense-matrix oracles, plus the
semidiscrete conservation rates each scheme owes its invariants."""

import numpy as np
import pytest

from sbpwave import equations as eq
from sbpwave.bundles import (
    cg_bundle,
    dg_bundle,
    fd_bundle,
    fourier_bundle,
    reflecting_cg_bundle,
)
from sbpwave.sbp import MassMatrix, fourier_d1

N_SMALL = 16
DOMAIN = (-1.0, 3.0)


def random_state(n, seed):
    return np.random.default_rng(seed).uniform(-1.0, 1.0, n)


# --- naive oracles: literal transcriptions with dense solves, no shared code


def naive_bbm(d1, d2, u):
    n = len(u)
    lhs = np.eye(n) - d2
    flux = d1 @ u**2 / 3.0 + u * (d1 @ u) / 3.0 + d1 @ u
    return -np.linalg.solve(lhs, flux)


def naive_fw(d1, d2, u):
    n = len(u)
    lhs = np.eye(n) - d2
    return -(d1 @ u**2 / 3.0 + u * (d1 @ u) / 3.0 + np.linalg.solve(lhs, d1 @ u))


def naive_ch(d1, d2a, d2b, u, alpha):
    n = len(u)
    lhs = np.eye(n) - d2a
    flux = (
        d1 @ u**2
        + u * (d1 @ u)
        - alpha * (d1 @ (u * (d2b @ u)))
        - (1.0 - alpha) * (d2b @ (u * (d1 @ u)))
        - (2.0 * alpha - 1.0) * (d1 @ u) * (d2b @ u)
    )
    return -np.linalg.solve(lhs, flux)


def naive_dp(d1, d2, u):
    n = len(u)
    lhs = np.eye(n) - d2
    flux = d1 @ u**2 + u * (d1 @ u)
    return -np.linalg.solve(lhs, (4.0 * np.eye(n) - d2) @ flux) / 3.0


def naive_hh(d1, d2a, d2b, d4a, d4b, u):
    n = len(u)
    op_a = 4.0 * np.eye(n) - 5.0 * d2a + d4a
    op_b = 4.0 * np.eye(n) - 5.0 * d2b + d4b
    flux = d1 @ (u * (op_b @ u)) + (d1 @ u) * (op_b @ u)
    return -np.linalg.solve(op_a, flux)


def naive_bbm_bbm(d1, d2, eta, u):
    n = len(u)
    lhs = np.eye(n) - d2
    deta = -np.linalg.solve(lhs, d1 @ (u + eta * u))
    du = -np.linalg.solve(lhs, d1 @ (eta + 0.5 * u**2))
    return deta, du


class TestOracleEquivalence:
    def test_bbm(self):
        b = fourier_bundle(N_SMALL, DOMAIN)
        u = random_state(N_SMALL, 1)
        expected = naive_bbm(b.d1.mat, b.d2a.mat, u)
        got = eq.bbm_rhs(b, u)
        np.testing.assert_allclose(got, expected, rtol=1e-12, atol=1e-13)

    def test_fw(self):
        b = fd_bundle(N_SMALL, DOMAIN, 4, "narrow")
        u = random_state(N_SMALL, 2)
        np.testing.assert_allclose(
            eq.fw_rhs(b, u), naive_fw(b.d1.mat, b.d2a.mat, u), rtol=1e-12, atol=1e-13
        )

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 0.25])
    def test_ch(self, alpha):
        b = fourier_bundle(N_SMALL, DOMAIN)
        u = random_state(N_SMALL, 3)
        np.testing.assert_allclose(
            eq.ch_rhs(b, u, alpha),
            naive_ch(b.d1.mat, b.d2a.mat, b.d2b.mat, u, alpha),
            rtol=1e-12,
            atol=1e-13,
        )

    def test_dp(self):
        b = fd_bundle(N_SMALL, DOMAIN, 2, "narrow")
        u = random_state(N_SMALL, 4)
        np.testing.assert_allclose(
            eq.dp_rhs(b, u), naive_dp(b.d1.mat, b.d2a.mat, u), rtol=1e-12, atol=1e-13
        )

    def test_hh(self):
        b = fourier_bundle(N_SMALL, DOMAIN, with_d4=True)
        u = random_state(N_SMALL, 5)
        expected = naive_hh(b.d1.mat, b.d2a.mat, b.d2b.mat, b.d4a.mat, b.d4b.mat, u)
        np.testing.assert_allclose(eq.hh_rhs(b, u), expected, rtol=1e-12, atol=1e-13)

    def test_bbm_bbm(self):
        b = fourier_bundle(N_SMALL, DOMAIN)
        eta = random_state(N_SMALL, 6)
        u = random_state(N_SMALL, 7)
        expected = naive_bbm_bbm(b.d1.mat, b.d2a.mat, eta, u)
        got = eq.bbm_bbm_rhs(b, eta, u)
        np.testing.assert_allclose(got[0], expected[0], rtol=1e-12, atol=1e-13)
        np.testing.assert_allclose(got[1], expected[1], rtol=1e-12, atol=1e-13)


class TestTrivialStates:
    def test_constants_are_steady_for_scalar_equations(self):
        b4 = fourier_bundle(N_SMALL, DOMAIN, with_d4=True)
        c = 0.7 * np.ones(N_SMALL)
        np.testing.assert_allclose(eq.bbm_rhs(b4, c), 0.0, atol=1e-13)
        np.testing.assert_allclose(eq.fw_rhs(b4, c), 0.0, atol=1e-13)
        np.testing.assert_allclose(eq.ch_rhs(b4, c), 0.0, atol=1e-13)
        np.testing.assert_allclose(eq.dp_rhs(b4, c), 0.0, atol=1e-13)
        np.testing.assert_allclose(eq.hh_rhs(b4, c), 0.0, atol=1e-12)

    def test_zero_state_is_steady_for_system(self):
        b = fourier_bundle(N_SMALL, DOMAIN)
        deta, du = eq.bbm_bbm_rhs(b, np.zeros(N_SMALL), np.zeros(N_SMALL))
        np.testing.assert_array_equal(deta, 0.0)
        np.testing.assert_array_equal(du, 0.0)

    def test_reflecting_constant_eta_zero_u_is_steady(self):
        rb = reflecting_cg_bundle(6, 2, (0.0, 1.0))
        eta = 0.4 * np.ones(rb.n)
        u = np.zeros(rb.n)
        deta, du = eq.bbm_bbm_reflecting_rhs(rb.solvers, rb.d1, eta, u)
        np.testing.assert_allclose(deta, 0.0, atol=1e-12)
        np.testing.assert_allclose(du, 0.0, atol=1e-12)

    def test_bbm_invariants_at_zero_and_one(self):
        b = fourier_bundle(N_SMALL, (0.0, 1.0))
        j1, j2, j3 = eq.bbm_invariants(b, np.zeros(N_SMALL))
        assert j1 == 0.0 and j2 == 0.0
        assert abs(j3 - 1.0) < 1e-13  # domain length
        j1, _, _ = eq.bbm_invariants(b, np.ones(N_SMALL))
        assert abs(j1 - 1.0) < 1e-13

    def test_bbm_j2_of_sine_is_pi(self):
        b = fourier_bundle(64, (0.0, 2.0 * np.pi))
        u = np.sin(b.grid.nodes)
        _, j2, _ = eq.bbm_invariants(b, u)
        assert abs(j2 - np.pi) < 1e-12


def directional_rate(semi, y, seed=None):
    """<grad J, rhs> for every invariant, via invariant-specific exact forms."""
    rates = {}
    dy = semi.rhs(0.0, y)
    epsilon = 1e-7
    for inv in semi.invariants:
        if inv.kind == "linear":
            rates[inv.name] = inv(y + dy) - inv(y)  # linear functional: exact
        else:
            rates[inv.name] = (inv(y + epsilon * dy) - inv(y - epsilon * dy)) / (2 * epsilon)
    return rates


def exact_quadratic_rate(mass_weighted_form, y, dy):
    return float(y @ mass_weighted_form @ dy)


BUNDLE_MAKERS = {
    "fourier": lambda **kw: fourier_bundle(24, DOMAIN, **kw),
    "fd4_narrow": lambda **kw: fd_bundle(24, DOMAIN, 4, "narrow", **kw),
    "fd6_wide": lambda **kw: fd_bundle(24, DOMAIN, 6, "wide", **kw),
    "cg_p3_wide": lambda **kw: cg_bundle(6, 3, DOMAIN, "wide", **kw) if not kw.get("with_d4")
    else cg_bundle(6, 3, DOMAIN, "wide", with_d4=True),
    "dg_p2_narrow": lambda **kw: dg_bundle(6, 2, DOMAIN, "narrow", **kw),
}


class TestConservationRates:
    """Directional derivative of each conserved invariant along the rhs."""

    @pytest.mark.parametrize("maker", ["fourier", "fd4_narrow", "cg_p3_wide", "dg_p2_narrow"])
    def test_bbm_rates(self, maker):
        b = BUNDLE_MAKERS[maker]()
        m = b.mass.matrix
        form = m @ (np.eye(b.n) - b.d2a.mat)
        rng = np.random.default_rng(42)
        for _ in range(100):
            u = rng.uniform(-1.0, 1.0, b.n)
            du = eq.bbm_rhs(b, u)
            scale = max(abs(u @ form @ u), 1.0)
            assert abs(np.sum(m @ du)) <= 1e-10 * scale
            assert abs(u @ form @ du) <= 1e-10 * scale

    @pytest.mark.parametrize("maker", ["fourier", "fd4_narrow", "fd6_wide"])
    def test_fw_rates_commuting(self, maker):
        b = BUNDLE_MAKERS[maker]()
        m = b.mass.matrix
        lhs = np.eye(b.n) - b.d2a.mat
        rng = np.random.default_rng(43)
        for _ in range(100):
            u = rng.uniform(-1.0, 1.0, b.n)
            du = eq.fw_rhs(b, u)
            scale = max(float(u @ m @ u), 1.0)
            assert abs(np.sum(m @ du)) <= 1e-10 * scale
            assert abs(np.sum(m @ lhs @ du)) <= 1e-10 * scale
            assert abs(u @ m @ du) <= 1e-10 * scale

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 0.2])
    @pytest.mark.parametrize("maker", ["fourier", "dg_p2_narrow"])
    def test_ch_quadratic_rate_any_alpha(self, maker, alpha):
        b = BUNDLE_MAKERS[maker]()
        m = b.mass.matrix
        form = m @ (np.eye(b.n) - b.d2a.mat)
        rng = np.random.default_rng(44)
        for _ in range(100):
            u = rng.uniform(-1.0, 1.0, b.n)
            du = eq.ch_rhs(b, u, alpha)
            assert abs(u @ form @ du) <= 1e-10 * max(abs(u @ form @ u), 1.0)

    def test_ch_linear_rate_alpha_half_noncommuting(self):
        b = BUNDLE_MAKERS["dg_p2_narrow"]()
        assert not b.d1_commutes_d2b
        m = b.mass.matrix
        rng = np.random.default_rng(45)
        for _ in range(100):
            u = rng.uniform(-1.0, 1.0, b.n)
            du = eq.ch_rhs(b, u, 0.5)
            assert abs(np.sum(m @ du)) <= 1e-10

    @pytest.mark.parametrize("maker", ["fourier", "fd4_narrow", "cg_p3_wide", "dg_p2_narrow"])
    def test_dp_rates(self, maker):
        b = BUNDLE_MAKERS[maker]()
        m = b.mass.matrix
        lhs = np.eye(b.n) - b.d2a.mat
        inv4 = np.linalg.inv(4.0 * np.eye(b.n) - b.d2a.mat)
        rng = np.random.default_rng(46)
        for _ in range(100):
            u = rng.uniform(-1.0, 1.0, b.n)
            du = eq.dp_rhs(b, u)
            scale = max(float(u @ m @ u), 1.0)
            assert abs(np.sum(m @ lhs @ du)) <= 1e-10 * scale
            # quadratic invariant: J2 = 0.5 v^T M (I - D2) u with v = (4I - D2)^{-1} u
            rate = (inv4 @ du) @ m @ lhs @ u * 0.5 + (inv4 @ u) @ m @ lhs @ du * 0.5
            assert abs(rate) <= 1e-10 * scale

    @pytest.mark.parametrize("maker", ["fourier", "fd4_narrow"])
    def test_hh_rates_commuting(self, maker):
        b = BUNDLE_MAKERS[maker](with_d4=True)
        m = b.mass.matrix
        op = 4.0 * np.eye(b.n) - 5.0 * b.d2a.mat + b.d4a.mat
        rng = np.random.default_rng(47)
        for _ in range(100):
            u = rng.uniform(-1.0, 1.0, b.n)
            du = eq.hh_rhs(b, u)
            scale = max(abs(u @ m @ op @ u), 1.0)
            assert abs(np.sum(m @ du)) <= 1e-10 * scale
            assert abs(np.sum(m @ op @ du)) <= 1e-10 * scale
            assert abs(u @ m @ op @ du) <= 1e-10 * scale

    @pytest.mark.parametrize("maker", ["fourier", "fd6_wide", "cg_p3_wide"])
    def test_bbm_bbm_rates(self, maker):
        b = BUNDLE_MAKERS[maker]()
        semi = eq.bbm_bbm(b)
        m = b.mass.matrix
        rng = np.random.default_rng(48)
        for _ in range(100):
            eta = rng.uniform(-0.5, 0.5, b.n)
            u = rng.uniform(-0.5, 0.5, b.n)
            deta, du = eq.bbm_bbm_rhs(b, eta, u)
            assert abs(np.sum(m @ deta)) <= 1e-10
            assert abs(np.sum(m @ du)) <= 1e-10
            # energy rate via the exact gradient
            rate = (2.0 * eta + u * u) @ m @ deta + (2.0 * u * (1.0 + eta)) @ m @ du
            scale = max(semi.invariant("J3")(np.stack([eta, u])), 1.0)
            assert abs(rate) <= 1e-10 * scale

    def test_reflecting_rates_on_admissible_states(self):
        rb = reflecting_cg_bundle(8, 3, (0.0, 1.0))
        x = rb.grid.nodes
        m = rb.mass.matrix
        rng = np.random.default_rng(49)
        for _ in range(100):
            coeff = rng.uniform(-0.3, 0.3, 3)
            eta = sum(c * np.cos((k + 1) * np.pi * x) for k, c in enumerate(coeff))
            u = x * (1.0 - x) * sum(c * np.sin((k + 1) * np.pi * x) for k, c in enumerate(coeff))
            u[0] = u[-1] = 0.0
            deta, du = eq.bbm_bbm_reflecting_rhs(rb.solvers, rb.d1, eta, u)
            assert du[0] == 0.0 and du[-1] == 0.0
            assert abs(np.sum(m @ deta)) <= 1e-10
            rate = (2.0 * eta + u * u) @ m @ deta + (2.0 * u * (1.0 + eta)) @ m @ du
            assert abs(rate) <= 1e-10

    def test_negative_control_fw_noncommuting_quadratic_rate(self):
        # narrow continuous-coupling second derivative does not commute with
        # the first derivative, so the quadratic functional must leak
        b = cg_bundle(2, 2, DOMAIN, "narrow")
        assert not b.d1_commutes_d2a
        m = b.mass.matrix
        u = np.array([0.3, -1.1, 0.8, 0.2])
        du = eq.fw_rhs(b, u)
        assert abs(u @ m @ du) > 1e-6

    def test_negative_control_bbm_bbm_narrow_energy_rate(self):
        b = dg_bundle(4, 2, DOMAIN, "narrow")
        rng = np.random.default_rng(50)
        eta = rng.uniform(-0.5, 0.5, b.n)
        u = rng.uniform(-0.5, 0.5, b.n)
        deta, du = eq.bbm_bbm_rhs(b, eta, u)
        m = b.mass.matrix
        rate = (2.0 * eta + u * u) @ m @ deta + (2.0 * u * (1.0 + eta)) @ m @ du
        assert abs(rate) > 1e-6


class TestDissipativeVariant:
    def test_energy_rate_is_one_sided_and_mass_conserved(self):
        b = fd_bundle(32, DOMAIN, 4, "narrow", with_upwind=True)
        m = b.mass.matrix
        form = m @ (np.eye(b.n) - b.d2a.mat)
        rng = np.random.default_rng(51)
        for _ in range(50):
            u = rng.uniform(-1.0, 1.0, b.n)
            du = eq.bbm_rhs_dissipative(b, u)
            assert abs(np.sum(m @ du)) <= 1e-10
            assert u @ form @ du <= 1e-11 * max(abs(u @ form @ u), 1.0)

    def test_constant_is_steady(self):
        b = fd_bundle(32, DOMAIN, 4, "narrow", with_upwind=True)
        np.testing.assert_allclose(
            eq.bbm_rhs_dissipative(b, 0.5 * np.ones(b.n)), 0.0, atol=1e-13
        )


class TestHypothesisEnforcement:
    def test_dense_mass_matrix_rejected_for_scalar_equation(self):
        b = fourier_bundle(8, DOMAIN)
        dense = MassMatrix(dense=b.mass.matrix)
        d1_dense = type(b.d1)(
            mat=b.d1.mat, mass=dense, grid=b.d1.grid, periodic=True,
            accuracy_order=b.d1.accuracy_order,
        )
        bad = eq.OperatorBundle(d1=d1_dense, d2a=b.d2a)
        with pytest.raises(eq.ConfigurationError, match="diagonal"):
            eq.bbm_rhs(bad, np.ones(8))

    def test_reflecting_rejects_nonzero_endpoints(self):
        rb = reflecting_cg_bundle(4, 2, (0.0, 1.0))
        u = np.ones(rb.n)
        with pytest.raises(eq.ConfigurationError, match="Dirichlet"):
            eq.bbm_bbm_reflecting_rhs(rb.solvers, rb.d1, np.zeros(rb.n), u)

    def test_hh_requires_fourth_derivative(self):
        b = fourier_bundle(8, DOMAIN)
        with pytest.raises(eq.ConfigurationError, match="fourth"):
            eq.hh_rhs(b, np.ones(8))

    def test_dp_norm_equivalence_bound(self):
        b = fourier_bundle(24, DOMAIN)
        rng = np.random.default_rng(52)
        for _ in range(50):
            u = rng.uniform(-1.0, 1.0, b.n)
            _, j2, _ = eq.dp_invariants(b, u)
            norm2 = b.mass.inner(u, u)
            assert norm2 <= 4.0 * j2 + 1e-12
            assert j2 <= norm2 + 1e-12
