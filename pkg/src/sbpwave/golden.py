"""Reference 4x4 operators with rational entries for the coupling checks.

Two linear elements coupled discontinuously and two quadratic elements
coupled continuously on the periodic interval [-1, 3] have closed-form
operators; reproducing them entrywise pins down every sign and index
convention in the coupling code.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .sbp import couple_cg, couple_cg_d2, couple_dg, couple_dg_upwind, uniform_mesh


def _rational(rows):
    return np.array([[float(Fraction(x)) for x in row] for row in rows])


DG_LINEAR_D1 = _rational(
    [["0", "1/2", "0", "-1/2"], ["-1/2", "0", "1/2", "0"],
     ["0", "-1/2", "0", "1/2"], ["1/2", "0", "-1/2", "0"]]
)
DG_LINEAR_D1_MINUS = _rational(
    [["1/2", "1/2", "0", "-1"], ["-1/2", "1/2", "0", "0"],
     ["0", "-1", "1/2", "1/2"], ["0", "0", "-1/2", "1/2"]]
)
DG_LINEAR_D1_PLUS = _rational(
    [["-1/2", "1/2", "0", "0"], ["-1/2", "-1/2", "1", "0"],
     ["0", "0", "-1/2", "1/2"], ["1", "0", "-1/2", "-1/2"]]
)
DG_LINEAR_M_DMINUS_DPLUS_D1 = _rational(
    [["1/4", "-5/4", "-1/4", "5/4"], ["1/4", "-1/4", "-1/4", "1/4"],
     ["-1/4", "5/4", "1/4", "-5/4"], ["-1/4", "1/4", "1/4", "-1/4"]]
)
DG_LINEAR_M_DPLUS_DMINUS_D1 = _rational(
    [["1/4", "-1/4", "-1/4", "1/4"], ["5/4", "-1/4", "-5/4", "1/4"],
     ["-1/4", "1/4", "1/4", "-1/4"], ["-5/4", "1/4", "5/4", "-1/4"]]
)
CG_QUADRATIC_M = _rational(
    [["2/3", "0", "0", "0"], ["0", "4/3", "0", "0"],
     ["0", "0", "2/3", "0"], ["0", "0", "0", "4/3"]]
)
CG_QUADRATIC_D1 = _rational(
    [["0", "1", "0", "-1"], ["-1/2", "0", "1/2", "0"],
     ["0", "-1", "0", "1"], ["1/2", "0", "-1/2", "0"]]
)
CG_QUADRATIC_D2 = _rational(
    [["-7/2", "2", "-1/2", "2"], ["1", "-2", "1", "0"],
     ["-1/2", "2", "-7/2", "2"], ["1", "0", "1", "-2"]]
)
CG_QUADRATIC_M_D2_D1 = _rational(
    [["0", "-2", "0", "2"], ["4/3", "0", "-4/3", "0"],
     ["0", "2", "0", "-2"], ["-4/3", "0", "4/3", "0"]]
)


def golden_comparisons() -> list[dict]:
    """Max entrywise separation between constructed and reference operators."""
    elements = uniform_mesh((-1.0, 3.0), 2, 1)
    dg = couple_dg(elements, periodic=True)
    pair = couple_dg_upwind(elements, periodic=True)
    m = np.diag(pair.mass.diagonal)
    elements2 = uniform_mesh((-1.0, 3.0), 2, 2)
    cg = couple_cg(elements2, periodic=True)
    cg_d2 = couple_cg_d2(elements2, periodic=True)
    m2 = np.diag(cg.mass.diagonal)
    comparisons = [
        ("dg_linear_d1", dg.mat, DG_LINEAR_D1),
        ("dg_linear_d1_minus", pair.minus, DG_LINEAR_D1_MINUS),
        ("dg_linear_d1_plus", pair.plus, DG_LINEAR_D1_PLUS),
        ("dg_linear_m_dminus_dplus_d1", m @ pair.minus @ pair.plus @ dg.mat,
         DG_LINEAR_M_DMINUS_DPLUS_D1),
        ("dg_linear_m_dplus_dminus_d1", m @ pair.plus @ pair.minus @ dg.mat,
         DG_LINEAR_M_DPLUS_DMINUS_D1),
        ("cg_quadratic_m", m2, CG_QUADRATIC_M),
        ("cg_quadratic_d1", cg.mat, CG_QUADRATIC_D1),
        ("cg_quadratic_d2", cg_d2.mat, CG_QUADRATIC_D2),
        ("cg_quadratic_m_d2_d1", m2 @ cg_d2.mat @ cg.mat, CG_QUADRATIC_M_D2_D1),
    ]
    out = []
    for name, computed, expected in comparisons:
        gap = float(np.max(np.abs(computed - expected)))
        out.append({"name": name, "max_abs_diff": gap, "passed": gap <= 1e-14})
    # the continuous-coupling product must be indefinite
    product = m2 @ cg_d2.mat @ cg.mat
    evals = np.linalg.eigvalsh(0.5 * (product + product.T))
    out.append(
        {
            "name": "cg_quadratic_m_d2_d1_indefinite",
            "max_abs_diff": 0.0,
            "passed": bool(evals.min() < -1e-8 and evals.max() > 1e-8),
        }
    )
    return out
