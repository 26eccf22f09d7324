import numpy as np
import pytest

from sbpwave.sbp import (
    SbpConstructionError,
    fd_periodic_d1,
    fd_periodic_d2,
    fd_periodic_upwind,
    fourier_d1,
    verify_sbp,
)


def test_second_order_stencil_matches_hand_derivation():
    # three-point antisymmetric stencil from the accuracy conditions
    op = fd_periodic_d1(8, (0.0, 8.0), order=2)
    row = op.mat[3]
    expected = np.zeros(8)
    expected[2], expected[4] = -0.5, 0.5
    np.testing.assert_allclose(row, expected, atol=1e-14)
    # circulant wrap
    np.testing.assert_allclose(op.mat[0, 7], -0.5, atol=1e-14)


def test_d1_annihilates_constants():
    for order in (2, 4, 6, 8):
        op = fd_periodic_d1(32, (-1.0, 3.0), order=order)
        np.testing.assert_allclose(op.mat @ np.ones(32), 0.0, atol=1e-13)


def test_ones_in_left_kernel_of_m_d1():
    op = fd_periodic_d1(16, (0.0, 1.0), order=4)
    md = op.mass.matrix @ op.mat
    assert np.max(np.abs(md.sum(axis=0))) <= 1e-12 * np.max(np.abs(md))


def test_narrow_d2_second_order_stencil():
    op = fd_periodic_d2(8, (0.0, 8.0), order=2, stencil_kind="narrow")
    row = op.mat[3]
    expected = np.zeros(8)
    expected[2], expected[3], expected[4] = 1.0, -2.0, 1.0
    np.testing.assert_allclose(row, expected, atol=1e-14)


def test_wide_d2_maps_highest_frequency_to_zero():
    n = 16
    op = fd_periodic_d2(n, (0.0, 2.0), order=4, stencil_kind="wide")
    alternating = (-1.0) ** np.arange(n)
    np.testing.assert_allclose(op.mat @ alternating, 0.0, atol=1e-12)


def test_narrow_d2_damps_highest_frequency():
    n = 16
    op = fd_periodic_d2(n, (0.0, 2.0), order=4, stencil_kind="narrow")
    alternating = (-1.0) ** np.arange(n)
    assert np.max(np.abs(op.mat @ alternating)) > 1.0


def test_first_order_upwind_is_forward_backward():
    n = 8
    pair = fd_periodic_upwind(n, (0.0, 8.0), order=1)
    row = pair.plus[3]
    expected = np.zeros(n)
    expected[3], expected[4] = -1.0, 1.0
    np.testing.assert_allclose(row, expected, atol=1e-14)
    row = pair.minus[3]
    expected = np.zeros(n)
    expected[2], expected[3] = -1.0, 1.0
    np.testing.assert_allclose(row, expected, atol=1e-14)


def test_upwind_annihilates_constants():
    pair = fd_periodic_upwind(32, (0.0, 5.0), order=3)
    np.testing.assert_allclose(pair.plus @ np.ones(32), 0.0, atol=1e-13)
    np.testing.assert_allclose(pair.minus @ np.ones(32), 0.0, atol=1e-13)


@pytest.mark.parametrize("order", [1, 2, 3, 4, 5, 6, 7, 8])
def test_upwind_dissipation_sign(order):
    pair = fd_periodic_upwind(48, (0.0, 3.0), order=order)
    m = pair.mass.matrix
    sym = m @ (pair.plus - pair.minus)
    sym = 0.5 * (sym + sym.T)
    evals = np.linalg.eigvalsh(sym)
    scale = np.max(np.abs(m @ pair.plus))
    assert evals.max() <= 1e-12 * scale


def test_upwind_composition_gives_narrow_stencil():
    n = 8
    pair = fd_periodic_upwind(n, (0.0, 8.0), order=1)
    d2 = pair.compose("minus_plus")
    row = d2.mat[3]
    expected = np.zeros(n)
    expected[2], expected[3], expected[4] = 1.0, -2.0, 1.0
    np.testing.assert_allclose(row, expected, atol=1e-14)


def test_fourier_differentiates_sine_exactly():
    n = 8
    op = fourier_d1(n, (0.0, 2.0 * np.pi))
    x = op.grid.nodes
    np.testing.assert_allclose(op.mat @ np.sin(x), np.cos(x), atol=1e-13)
    np.testing.assert_allclose(op.mat @ np.ones(n), 0.0, atol=1e-13)


def test_fourier_skew_symmetry_identity():
    op = fourier_d1(16, (0.0, 2.0 * np.pi))
    md = op.mass.matrix @ op.mat
    assert np.max(np.abs(md + md.T)) <= 1e-13


def test_fourier_odd_node_count():
    n = 9
    op = fourier_d1(n, (-1.0, 1.0))
    x = op.grid.nodes
    k = 2.0 * np.pi / 2.0
    np.testing.assert_allclose(op.mat @ np.sin(k * x), k * np.cos(k * x), atol=1e-12)


def test_fourier_square_is_spectral_second_derivative():
    op = fourier_d1(8, (0.0, 2.0 * np.pi))
    d2 = op.square()
    x = op.grid.nodes
    np.testing.assert_allclose(d2.mat @ np.sin(x), -np.sin(x), atol=1e-12)


def test_construction_errors():
    with pytest.raises(SbpConstructionError):
        fd_periodic_d1(4, (0.0, 1.0), order=4)
    with pytest.raises(SbpConstructionError):
        fd_periodic_d1(16, (0.0, 1.0), order=3)
    with pytest.raises(SbpConstructionError):
        fd_periodic_d2(16, (0.0, 1.0), order=4, stencil_kind="banded")
    with pytest.raises(SbpConstructionError):
        fd_periodic_upwind(16, (0.0, 1.0), order=11)
    with pytest.raises(SbpConstructionError):
        fd_periodic_d1(16, (1.0, 1.0), order=2)


@pytest.mark.parametrize("order", [2, 4, 6, 8])
def test_verify_passes_for_fd_families(order):
    assert verify_sbp(fd_periodic_d1(64, (0.0, 1.0), order=order)).passed
    assert verify_sbp(fd_periodic_d2(64, (0.0, 1.0), order=order, stencil_kind="narrow")).passed
    assert verify_sbp(fd_periodic_d2(64, (0.0, 1.0), order=order, stencil_kind="wide")).passed
    assert verify_sbp(fd_periodic_upwind(64, (0.0, 1.0), order=order)).passed


def test_verify_reports_fourier_order_at_least_nyquist():
    report = verify_sbp(fourier_d1(16, (0.0, 2.0 * np.pi)))
    assert report.passed
    assert report.accuracy_order_found >= 8


def test_verify_flags_corrupted_operator():
    op = fd_periodic_d1(32, (0.0, 1.0), order=4)
    bad = op.mat.copy()
    bad[3, 7] += 1e-3
    corrupted = type(op)(
        mat=bad, mass=op.mass, grid=op.grid, periodic=True, accuracy_order=4
    )
    report = verify_sbp(corrupted)
    assert not report.passed
    failed = [c.name for c in report.checks if not c.passed]
    assert "periodic_identity" in failed
