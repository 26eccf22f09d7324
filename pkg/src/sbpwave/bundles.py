"""Build operator bundles for the discretization families used in experiments.

Families: global Fourier collocation, periodic central finite differences,
and continuous/discontinuous couplings of Lobatto elements.  Commutation
flags are set from structure: circulant matrices always commute, elementwise
couplings only do when the second derivative is the squared first one.
"""

from __future__ import annotations

from .equations import OperatorBundle, ReflectingBundle
from .sbp import (
    couple_cg,
    couple_cg_d2,
    couple_dg,
    couple_dg_upwind,
    fd_periodic_d1,
    fd_periodic_d2,
    fd_periodic_upwind,
    fourier_d1,
    uniform_mesh,
)

FAMILIES = ("fourier", "fd_periodic", "cg", "dg")


def fourier_bundle(n: int, domain, with_d4: bool = False) -> OperatorBundle:
    d1 = fourier_d1(n, domain)
    d2 = d1.square()
    d4 = d2.square() if with_d4 else None
    return OperatorBundle(
        d1=d1, d2a=d2, d4a=d4, d4b=d4,
        d1_commutes_d2a=True, d1_commutes_d2b=True,
        label=f"fourier_n{n}",
    )


def fd_bundle(n: int, domain, order: int, stencil: str = "narrow",
              with_d4: bool = False, with_upwind: bool = False) -> OperatorBundle:
    d1 = fd_periodic_d1(n, domain, order)
    d2 = d1.square() if stencil == "wide" else fd_periodic_d2(n, domain, order, "narrow")
    d4 = d2.square() if with_d4 else None
    pair = fd_periodic_upwind(n, domain, order) if with_upwind else None
    return OperatorBundle(
        d1=d1, d2a=d2, d4a=d4, d4b=d4, upwind=pair,
        d1_commutes_d2a=True, d1_commutes_d2b=True,
        label=f"fd{order}_{stencil}_n{n}",
    )


def cg_bundle(num_elements: int, degree: int, domain, stencil: str = "narrow",
              periodic: bool = True, with_d4: bool = False) -> OperatorBundle:
    elements = uniform_mesh(domain, num_elements, degree)
    d1 = couple_cg(elements, periodic=periodic)
    if stencil == "wide":
        d2 = d1.square()
        commutes = True
    else:
        d2 = couple_cg_d2(elements, periodic=periodic)
        commutes = False
    d4 = d2.square() if with_d4 and periodic else None
    return OperatorBundle(
        d1=d1, d2a=d2, d4a=d4, d4b=d4,
        d1_commutes_d2a=commutes, d1_commutes_d2b=commutes,
        label=f"cg_p{degree}_{stencil}_e{num_elements}",
    )


def dg_bundle(num_elements: int, degree: int, domain, stencil: str = "narrow",
              periodic: bool = True, with_d4: bool = False) -> OperatorBundle:
    elements = uniform_mesh(domain, num_elements, degree)
    d1 = couple_dg(elements, periodic=periodic)
    pair = couple_dg_upwind(elements, periodic=periodic)
    if stencil == "wide":
        d2 = d1.square()
        commutes = True
    else:
        d2 = pair.compose("plus_minus")
        commutes = False
    d4 = d2.square() if with_d4 and periodic else None
    return OperatorBundle(
        d1=d1, d2a=d2, d4a=d4, d4b=d4, upwind=pair,
        d1_commutes_d2a=commutes, d1_commutes_d2b=commutes,
        label=f"dg_p{degree}_{stencil}_e{num_elements}",
    )


def make_bundle(family: str, size: int, domain, order: int = 4,
                stencil: str = "narrow", periodic: bool = True,
                with_d4: bool = False, with_upwind: bool = False) -> OperatorBundle:
    """size is the node count for global families, the element count otherwise."""
    if family == "fourier":
        return fourier_bundle(size, domain, with_d4=with_d4)
    if family == "fd_periodic":
        return fd_bundle(size, domain, order, stencil, with_d4=with_d4,
                         with_upwind=with_upwind)
    if family == "cg":
        return cg_bundle(size, order, domain, stencil, periodic=periodic, with_d4=with_d4)
    if family == "dg":
        return dg_bundle(size, order, domain, stencil, periodic=periodic, with_d4=with_d4)
    raise ValueError(f"unknown discretization family {family!r}")


def reflecting_cg_bundle(num_elements: int, degree: int, domain) -> ReflectingBundle:
    d1 = couple_cg(uniform_mesh(domain, num_elements, degree), periodic=False)
    return ReflectingBundle(d1, label=f"cg_p{degree}_e{num_elements}_reflecting")
