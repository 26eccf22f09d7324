"""Couple element-level SBP operators into global operators.

Discontinuous (DG) coupling duplicates the interface node and glues elements
with penalty terms; continuous (CG) coupling shares the interface node and
sums mass and stiffness contributions.  Both preserve the SBP identities on
the joint grid, with accuracy equal to the least accurate element.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .lobatto import LobattoElement
from .types import Grid, MassMatrix, SbpConstructionError, SbpOperator1, SbpOperator2, UpwindPair

INTERFACE_RTOL = 1e-12


def _check_mesh(elements: Sequence[LobattoElement], periodic: bool):
    if len(elements) < 2:
        raise SbpConstructionError("coupling needs at least two elements")
    length = elements[-1].b - elements[0].a
    tol = INTERFACE_RTOL * length
    for left, right in zip(elements, elements[1:]):
        if abs(left.b - right.a) > tol:
            raise SbpConstructionError(
                f"element interface mismatch: {left.b!r} vs {right.a!r}"
            )
    return elements[0].a, elements[-1].b


def _dg_grid(elements: Sequence[LobattoElement], x_min, x_max, periodic) -> Grid:
    nodes = np.concatenate([e.nodes for e in elements])
    return Grid(nodes=nodes, x_min=x_min, x_max=x_max, periodic=periodic)


def _dg_interfaces(elements, periodic):
    """Pairs (right end index of left element, left end index of right element)."""
    sizes = [e.n for e in elements]
    starts = np.concatenate([[0], np.cumsum(sizes)[:-1]])
    pairs = []
    for e in range(len(elements) - 1):
        pairs.append((starts[e] + sizes[e] - 1, starts[e + 1]))
    if periodic:
        pairs.append((starts[-1] + sizes[-1] - 1, 0))
    return pairs


def couple_dg(elements: Sequence[LobattoElement], periodic: bool = False) -> SbpOperator1:
    """Glue elements discontinuously with central interface penalties."""
    x_min, x_max = _check_mesh(elements, periodic)
    pairs = _dg_interfaces(elements, periodic)
    n = sum(e.n for e in elements)
    mass_diag = np.concatenate([e.mass_diag for e in elements])
    mat = np.zeros((n, n))
    pos = 0
    for e in elements:
        mat[pos : pos + e.n, pos : pos + e.n] = e.d1
        pos += e.n
    for i_r, i_l in pairs:
        mat[i_r, i_r] -= 0.5 / mass_diag[i_r]
        mat[i_r, i_l] += 0.5 / mass_diag[i_r]
        mat[i_l, i_r] -= 0.5 / mass_diag[i_l]
        mat[i_l, i_l] += 0.5 / mass_diag[i_l]
    return SbpOperator1(
        mat=mat,
        mass=MassMatrix(diagonal=mass_diag),
        grid=_dg_grid(elements, x_min, x_max, periodic),
        periodic=periodic,
        accuracy_order=min(e.degree for e in elements),
    )


def couple_dg_upwind(elements: Sequence[LobattoElement], periodic: bool = False) -> UpwindPair:
    """Glue elements with one-sided interface penalties.

    Elements without their own biased pair contribute D+ = D- = D1; the
    interface terms alone then provide the dissipation.
    """
    x_min, x_max = _check_mesh(elements, periodic)
    pairs = _dg_interfaces(elements, periodic)
    n = sum(e.n for e in elements)
    mass_diag = np.concatenate([e.mass_diag for e in elements])
    plus = np.zeros((n, n))
    minus = np.zeros((n, n))
    pos = 0
    for e in elements:
        p_mat = e.plus if e.has_upwind else e.d1
        m_mat = e.minus if e.has_upwind else e.d1
        plus[pos : pos + e.n, pos : pos + e.n] = p_mat
        minus[pos : pos + e.n, pos : pos + e.n] = m_mat
        pos += e.n
    for i_r, i_l in pairs:
        plus[i_r, i_r] -= 1.0 / mass_diag[i_r]
        plus[i_r, i_l] += 1.0 / mass_diag[i_r]
        minus[i_l, i_r] -= 1.0 / mass_diag[i_l]
        minus[i_l, i_l] += 1.0 / mass_diag[i_l]
    return UpwindPair(
        plus=plus,
        minus=minus,
        mass=MassMatrix(diagonal=mass_diag),
        grid=_dg_grid(elements, x_min, x_max, periodic),
        periodic=periodic,
        accuracy_order=min(e.degree for e in elements),
    )


def _cg_layout(elements: Sequence[LobattoElement], periodic: bool):
    """Global index of each element node when interface nodes are shared."""
    index_maps = []
    pos = 0
    for k, e in enumerate(elements):
        if k == 0:
            idx = np.arange(e.n)
            pos = e.n
        else:
            idx = np.concatenate([[pos - 1], np.arange(pos, pos + e.n - 1)])
            pos += e.n - 1
        index_maps.append(idx)
    n = pos
    if periodic:
        # identify the final node with the first one
        last = index_maps[-1]
        last = last.copy()
        last[-1] = 0
        index_maps[-1] = last
        n -= 1
    return index_maps, n


def _cg_grid(elements, index_maps, n, x_min, x_max, periodic) -> Grid:
    nodes = np.empty(n)
    for e, idx in zip(elements, index_maps):
        nodes[idx] = e.nodes
    if periodic:
        nodes[0] = elements[0].nodes[0]
    return Grid(nodes=nodes, x_min=x_min, x_max=x_max, periodic=periodic)


def _cg_assemble(elements, index_maps, n, local_matrices):
    """Sum local matrices into the global matrix using shared node indices."""
    mat = np.zeros((n, n))
    for local, idx in zip(local_matrices, index_maps):
        mat[np.ix_(idx, idx)] += local
    return mat


def _cg_mass(elements, index_maps, n):
    diag = np.zeros(n)
    for e, idx in zip(elements, index_maps):
        np.add.at(diag, idx, e.mass_diag)
    return diag


def couple_cg(elements: Sequence[LobattoElement], periodic: bool = False) -> SbpOperator1:
    """Glue elements continuously, sharing interface nodes."""
    x_min, x_max = _check_mesh(elements, periodic)
    index_maps, n = _cg_layout(elements, periodic)
    mass_diag = _cg_mass(elements, index_maps, n)
    stiffness = _cg_assemble(
        elements, index_maps, n, [e.mass_diag[:, None] * e.d1 for e in elements]
    )
    mat = stiffness / mass_diag[:, None]
    return SbpOperator1(
        mat=mat,
        mass=MassMatrix(diagonal=mass_diag),
        grid=_cg_grid(elements, index_maps, n, x_min, x_max, periodic),
        periodic=periodic,
        accuracy_order=min(e.degree for e in elements),
    )


def couple_cg_upwind(elements: Sequence[LobattoElement], periodic: bool = False) -> UpwindPair:
    """Continuous coupling of element-level upwind pairs."""
    x_min, x_max = _check_mesh(elements, periodic)
    if not all(e.has_upwind for e in elements):
        raise SbpConstructionError("all elements need a biased pair for upwind coupling")
    index_maps, n = _cg_layout(elements, periodic)
    mass_diag = _cg_mass(elements, index_maps, n)
    plus = _cg_assemble(
        elements, index_maps, n, [e.mass_diag[:, None] * e.plus for e in elements]
    ) / mass_diag[:, None]
    minus = _cg_assemble(
        elements, index_maps, n, [e.mass_diag[:, None] * e.minus for e in elements]
    ) / mass_diag[:, None]
    order = min(e.degree for e in elements)
    order = max(order - 1, 0) if any(np.any(e.plus != e.d1) for e in elements) else order
    return UpwindPair(
        plus=plus,
        minus=minus,
        mass=MassMatrix(diagonal=mass_diag),
        grid=_cg_grid(elements, index_maps, n, x_min, x_max, periodic),
        periodic=periodic,
        accuracy_order=order,
    )


def couple_cg_d2(elements: Sequence[LobattoElement], periodic: bool = False) -> SbpOperator2:
    """Narrow-stencil continuous second-derivative operator.

    Element contributions are the negative stiffness forms -D1^T M D1; the
    boundary derivative rows of the outermost elements enter only in the
    bounded case.
    """
    x_min, x_max = _check_mesh(elements, periodic)
    index_maps, n = _cg_layout(elements, periodic)
    mass_diag = _cg_mass(elements, index_maps, n)
    local = [-(e.d1.T * e.mass_diag) @ e.d1 for e in elements]
    md2 = _cg_assemble(elements, index_maps, n, local)
    d_l = d_r = None
    if not periodic:
        first, last = elements[0], elements[-1]
        d_l = np.zeros(n)
        d_l[index_maps[0]] = first.d1[0]
        d_r = np.zeros(n)
        d_r[index_maps[-1]] = last.d1[-1]
        md2[index_maps[0][0], index_maps[0]] -= first.d1[0]
        md2[index_maps[-1][-1], index_maps[-1]] += last.d1[-1]
    mat = md2 / mass_diag[:, None]
    return SbpOperator2(
        mat=mat,
        mass=MassMatrix(diagonal=mass_diag),
        grid=_cg_grid(elements, index_maps, n, x_min, x_max, periodic),
        periodic=periodic,
        stencil_kind="narrow",
        accuracy_order=min(e.degree for e in elements),
        d_l=d_l,
        d_r=d_r,
    )
