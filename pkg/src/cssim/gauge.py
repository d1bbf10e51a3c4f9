"""Nonlocal gauge potentials of the self-dual Chern-Simons covariant NLS.

    A_theta[u](r) = -1/2 int_0^r |u|^2 r' dr'
    A_t[u](r)     = -int_r^infty (m + A_theta[u]) |u|^2 dr'/r'

Both are O(n) cumulative sums.  A_theta uses the half-inclusive prefix sum,
A_t the matching half-inclusive suffix sum, so that every discrete duality
identity involving them is an exact summation-by-parts statement.  The
suffix truncates int_r^infty at the domain edge; configurations are expected
to keep the tail mass negligible (see grid.tail_mass_fraction).
"""

from __future__ import annotations

from dataclasses import dataclass

from .grid import (
    RadialField,
    abs2,
    check_same_grid,
    half_prefix_sum,
    half_suffix_sum,
    re_product,
)


@dataclass
class GaugePotentials:
    """Pair (A_theta[u], A_t[u]) as real fields on u's grid."""

    a_theta: RadialField
    a_t: RadialField


def a_theta_pol(psi1: RadialField, psi2: RadialField) -> RadialField:
    """Polarized angular potential A_theta[psi1, psi2] = -1/2 int_0^r Re(conj(psi1) psi2) r' dr'."""
    check_same_grid(psi1, psi2, same_m=True)
    g = psi1.grid
    p = re_product(psi1, psi2)
    vals = -0.5 * half_prefix_sum(p * g.r * g.h)
    return RadialField(g, psi1.m, vals)


def a_theta(u: RadialField) -> RadialField:
    """A_theta[u] = A_theta[u, u]; nonpositive, bounded by M[u]/(4 pi)."""
    g = u.grid
    vals = -0.5 * half_prefix_sum(abs2(u.values) * g.r * g.h)
    return RadialField(g, u.m, vals)


def a_t(u: RadialField, a_th: RadialField | None = None) -> RadialField:
    """Temporal potential, integrated inward from the domain edge.

    The value at the edge r_max is zero by the suffix convention; the last
    node carries only its own half cell.
    """
    g = u.grid
    if a_th is None:
        a_th = a_theta(u)
    integrand = (u.m + a_th.values) * abs2(u.values) * g.h / g.r
    return RadialField(g, u.m, -half_suffix_sum(integrand))


def gauge_potentials(u: RadialField) -> GaugePotentials:
    ath = a_theta(u)
    return GaugePotentials(a_theta=ath, a_t=a_t(u, ath))
