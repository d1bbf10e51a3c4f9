"""Cubic/quintic decomposition of the nonlinearity and the multilinear forms.

    N(u) = N_{3,0} + m (N_{3,1} + N_{3,2}) + N_{5,1} + N_{5,2}

with

    N_{3,0}(p1,p2,p3) = -Re(conj(p1) p2) p3
    N_{3,1}(p1,p2,p3) = (2/r^2) A_theta[p1,p2] p3
    N_{3,2}(p1,p2,p3) = -(int_r^inf Re(conj(p1) p2) dr'/r') p3
    N_{5,1}(p1..p5)   = (1/r^2) A_theta[p1,p2] A_theta[p3,p4] p5
    N_{5,2}(p1..p5)   = -(int_r^inf A_theta[p1,p2] Re(conj(p3) p4) dr'/r') p5

and the scalar forms M_{4,0}, M_{4,1}, M_6 entering the energy.  Because the
prefix/suffix sums share midpoint weights, the five pairing identities
between N_* and M_* hold to rounding on the grid (discrete Fubini), not just
to O(h^2).  The integrator consumes the collapsed real potential V[u]; the
individual pieces exist for identity tests and modulation remainders.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gauge import a_t, a_theta, a_theta_pol
from .grid import (
    RadialField,
    abs2,
    check_same_grid,
    half_suffix_sum,
    inner_real,
    integrate,
    norm,
    re_product,
)


@dataclass
class NonlinearityParts:
    n30: RadialField
    n31: RadialField
    n32: RadialField
    n51: RadialField
    n52: RadialField
    total: RadialField


def _suffix_over_r(f: RadialField, weights) -> np.ndarray:
    """int_r^inf weights(r') dr'/r' via the half-inclusive suffix sum."""
    g = f.grid
    return half_suffix_sum(weights * g.h / g.r)


def cubic(kind: str, psi1: RadialField, psi2: RadialField, psi3: RadialField) -> RadialField:
    check_same_grid(psi1, psi2)
    check_same_grid(psi1, psi3)
    g = psi1.grid
    if kind == "30":
        vals = -re_product(psi1, psi2) * psi3.values
    elif kind == "31":
        vals = 2.0 / g.r**2 * a_theta_pol(psi1, psi2).values * psi3.values
    elif kind == "32":
        vals = -_suffix_over_r(psi1, re_product(psi1, psi2)) * psi3.values
    else:
        raise ValueError(f"unknown cubic kind {kind!r}")
    return RadialField(g, psi3.m, vals)


def quintic(kind: str, psi1, psi2, psi3, psi4, psi5) -> RadialField:
    for p in (psi2, psi3, psi4, psi5):
        check_same_grid(psi1, p)
    g = psi1.grid
    if kind == "51":
        vals = (
            a_theta_pol(psi1, psi2).values
            * a_theta_pol(psi3, psi4).values
            / g.r**2
            * psi5.values
        )
    elif kind == "52":
        w = a_theta_pol(psi1, psi2).values * re_product(psi3, psi4)
        vals = -_suffix_over_r(psi1, w) * psi5.values
    else:
        raise ValueError(f"unknown quintic kind {kind!r}")
    return RadialField(g, psi5.m, vals)


def energy_form(kind: str, *psis: RadialField) -> float:
    g = psis[0].grid
    for p in psis[1:]:
        check_same_grid(psis[0], p)
    if kind == "40":
        p1, p2, p3, p4 = psis
        dens = -0.25 * re_product(p1, p2) * re_product(p3, p4)
    elif kind == "41":
        p1, p2, p3, p4 = psis
        dens = a_theta_pol(p1, p2).values / g.r**2 * re_product(p3, p4)
    elif kind == "6":
        p1, p2, p3, p4, p5, p6 = psis
        dens = (
            0.5
            * a_theta_pol(p1, p2).values
            * a_theta_pol(p3, p4).values
            / g.r**2
            * re_product(p5, p6)
        )
    else:
        raise ValueError(f"unknown energy form kind {kind!r}")
    return integrate(RadialField(g, psis[0].m, dens))


def duality_residuals(p1, p2, p3, p4, p5, p6) -> tuple:
    """Absolute defects of the five pairing identities between N_* and M_*.

    Exact summation-by-parts duals by construction, so these sit at rounding
    level for any inputs.
    """
    m = p1.m
    r1 = abs(inner_real(cubic("30", p1, p2, p3), p4) - 4.0 * energy_form("40", p1, p2, p3, p4))
    r2 = abs(
        m * inner_real(cubic("31", p1, p2, p3), p4)
        - 2.0 * m * energy_form("41", p1, p2, p3, p4)
    )
    r3 = abs(
        m * inner_real(cubic("32", p1, p2, p3), p4)
        - 2.0 * m * energy_form("41", p3, p4, p1, p2)
    )
    r4 = abs(
        inner_real(quintic("51", p1, p2, p3, p4, p5), p6)
        - 2.0 * energy_form("6", p1, p2, p3, p4, p5, p6)
    )
    r5 = abs(
        inner_real(quintic("52", p1, p2, p3, p4, p5), p6)
        - 4.0 * energy_form("6", p1, p2, p5, p6, p3, p4)
    )
    return (r1, r2, r3, r4, r5)


def nonlinearity_parts(u: RadialField) -> NonlinearityParts:
    """All pieces evaluated on the diagonal; total = n30 + m(n31+n32) + n51 + n52."""
    n30 = cubic("30", u, u, u)
    n31 = cubic("31", u, u, u)
    n32 = cubic("32", u, u, u)
    n51 = quintic("51", u, u, u, u, u)
    n52 = quintic("52", u, u, u, u, u)
    total = RadialField(
        u.grid,
        u.m,
        n30.values + u.m * (n31.values + n32.values) + n51.values + n52.values,
    )
    return NonlinearityParts(n30, n31, n32, n51, n52, total)


def potential_values(grid, m: int, values) -> np.ndarray:
    """Raw-array form of the potential (hot path for the integrator)."""
    from .grid import half_prefix_sum

    dens = abs2(values)
    ath = -0.5 * half_prefix_sum(dens * grid.r * grid.h)
    at = -half_suffix_sum((m + ath) * dens * grid.h / grid.r)
    return at + ath * (ath + 2.0 * m) / grid.r**2 - dens


def nonlinear_potential(u: RadialField) -> RadialField:
    """Real potential V[u] with N(u) = V[u] u:

        V[u] = A_t[u] + A_theta[u] (A_theta[u] + 2m) / r^2 - |u|^2.

    The middle term is ((m+A_theta)^2 - m^2)/r^2 written without cancellation.
    Built from the same prefix/suffix sums as the N_* pieces, so the identity
    V[u] u = N(u) holds to rounding.
    """
    return RadialField(u.grid, u.m, potential_values(u.grid, u.m, u.values))


def energy_via_forms(u: RadialField) -> float:
    """E[u] = 1/2 int (|du|^2 + m^2 |u|^2 / r^2) + M_{4,0} + m M_{4,1} + M_6."""
    from .grid import differentiate

    g = u.grid
    du = differentiate(u).values
    quad = 0.5 * integrate(
        RadialField(g, u.m, abs2(du) + u.m**2 * abs2(u.values) / g.r**2)
    )
    return (
        quad
        + energy_form("40", u, u, u, u)
        + u.m * energy_form("41", u, u, u, u)
        + energy_form("6", u, u, u, u, u, u)
    )
