"""Closed-form vortex objects, symmetry actions, and both energy forms.

The static profile

    Q(r) = sqrt(8) (m+1) r^m / (1 + r^{2m+2}),   m >= 0,

is annihilated by the covariant Cauchy-Riemann operator
D_u f = df/dr - ((m + A_theta[u])/r) f, which makes the energy a perfect
square: E[u] = 1/2 int |D_u u|^2.  The pseudoconformal image
S(t) = Q(r/|t|) e^{-i r^2/(4|t|)} / |t| (t < 0) is the explicit finite-time
blow-up solution; it has finite energy only for m >= 1.

Closed forms kept here (Q, Q', LambdaQ = (r d/dr + 1)Q, A_theta[Q]) serve as
oracles for the discrete operators; everything dynamical uses the discrete
quadrature path.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.interpolate import CubicSpline

from .gauge import a_theta
from .grid import (
    RadialField,
    RadialGrid,
    abs2,
    check_same_grid,
    differentiate,
    integrate,
)

logger = logging.getLogger(__name__)

SQRT8 = np.sqrt(8.0)


@dataclass(frozen=True)
class SolitonParams:
    """Scaling/phase pair (lambda, gamma) of the modulated soliton Q_{lambda,gamma}."""

    lam: float
    gamma: float

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError(f"scale must be positive, got {self.lam}")


@dataclass(frozen=True)
class EnergyPair:
    coulomb: float
    selfdual: float


# -- closed forms ------------------------------------------------------------


def q_closed_form(m: int, r: NDArray) -> NDArray:
    s = r ** (2 * m + 2)
    return SQRT8 * (m + 1) * r**m / (1.0 + s)


def q_prime_closed_form(m: int, r: NDArray) -> NDArray:
    s = r ** (2 * m + 2)
    first = m * r ** (m - 1) * (1.0 + s) if m != 0 else 0.0
    return SQRT8 * (m + 1) * (first - (2 * m + 2) * r ** (3 * m + 1)) / (1.0 + s) ** 2


def lambda_q_closed_form(m: int, r: NDArray) -> NDArray:
    """LambdaQ = (r d/dr + 1) Q, the L2-scaling derivative of Q."""
    s = r ** (2 * m + 2)
    return SQRT8 * (m + 1) ** 2 * r**m * (1.0 - s) / (1.0 + s) ** 2


def a_theta_q_closed_form(m: int, r: NDArray) -> NDArray:
    """A_theta[Q](r) = -2 (m+1) r^{2m+2} / (1 + r^{2m+2}); limit -2(m+1)."""
    s = r ** (2 * m + 2)
    return -2.0 * (m + 1) * s / (1.0 + s)


def _require_vortex_index(m: int) -> None:
    if m < 0:
        raise ValueError(
            f"no nontrivial finite-energy static solution exists for m={m} < 0"
        )


def q_profile(m: int, grid: RadialGrid) -> RadialField:
    """Sample the static vortex on the grid (real field)."""
    _require_vortex_index(m)
    return RadialField(grid, m, q_closed_form(m, grid.r))


def lambda_q(m: int, grid: RadialGrid) -> RadialField:
    _require_vortex_index(m)
    return RadialField(grid, m, lambda_q_closed_form(m, grid.r))


def s_solution(m: int, t: float, grid: RadialGrid, allow_m0: bool = False) -> RadialField:
    """Pseudoconformal blow-up profile S(t) = Q(r/|t|) e^{-i r^2/(4|t|)} / |t|, t < 0."""
    if t >= 0:
        raise ValueError(f"S(t) is defined for t < 0, got t={t}")
    if m < 1:
        if not (m == 0 and allow_m0):
            raise ValueError(
                "S(t) has finite energy only for m >= 1; pass allow_m0=True to override"
            )
        logger.warning("sampling S(t) with m=0: its energy is infinite")
    lam = abs(t)
    y = grid.r / lam
    vals = q_closed_form(m, y) / lam * np.exp(-1j * grid.r**2 / (4.0 * lam))
    return RadialField(grid, m, vals)


# -- resampling (scaling action) ---------------------------------------------


def _resample(f: RadialField, x: NDArray) -> NDArray:
    """Evaluate f at points x by cubic interpolation, zero outside the grid.

    Interpolates amplitude and unwrapped phase separately, which tracks the
    oscillatory pseudoconformal phase much better than componentwise cubic
    near blow-up.  Falls back to componentwise linear wherever the amplitude
    is at noise level (phase meaningless there).
    """
    r = f.grid.r
    v = f.values
    out = np.zeros(len(x), dtype=np.complex128)
    inside = (x >= r[0]) & (x <= r[-1])
    if not np.any(inside):
        return out
    xi = x[inside]

    amp = np.abs(v)
    amp_floor = 1e-12 * (amp.max() if amp.max() > 0 else 1.0)
    phase = np.unwrap(np.angle(np.where(amp > amp_floor, v, 1.0)))
    interp_a = CubicSpline(r, amp)
    interp_p = CubicSpline(r, phase)
    vals = interp_a(xi) * np.exp(1j * interp_p(xi))

    # componentwise linear where the stencil touches near-zero amplitude
    idx = np.clip(np.searchsorted(r, xi), 1, len(r) - 1)
    tiny = (amp[idx] <= amp_floor) | (amp[idx - 1] <= amp_floor)
    if np.any(tiny):
        xt = xi[tiny]
        lin = np.interp(xt, r, v.real) + 1j * np.interp(xt, r, v.imag)
        vals[tiny] = lin
    out[inside] = vals
    return out


def modulate(f: RadialField, p: SolitonParams) -> RadialField:
    """f_{lambda,gamma}(r) = (e^{i gamma}/lambda) f(r/lambda)."""
    if p.lam == 1.0 and p.gamma == 0.0:
        return f.copy()
    vals = np.exp(1j * p.gamma) / p.lam * _resample(f, f.grid.r / p.lam)
    return RadialField(f.grid, f.m, vals)


def demodulate(g: RadialField, p: SolitonParams) -> RadialField:
    """Inverse action: g^flat(y) = lambda e^{-i gamma} g(lambda y)."""
    if p.lam == 1.0 and p.gamma == 0.0:
        return g.copy()
    vals = p.lam * np.exp(-1j * p.gamma) * _resample(g, p.lam * g.grid.r)
    return RadialField(g.grid, g.m, vals)


def modulated_soliton(m: int, grid: RadialGrid, p: SolitonParams) -> RadialField:
    """Q_{lambda,gamma} sampled from the closed form (no resampling error)."""
    _require_vortex_index(m)
    vals = np.exp(1j * p.gamma) / p.lam * q_closed_form(m, grid.r / p.lam)
    return RadialField(grid, m, vals)


# -- covariant derivative, mass, energy --------------------------------------


def scaling_generator(f: RadialField) -> RadialField:
    """Lambda f = (r d/dr + 1) f, the generator of the L2 scaling."""
    return RadialField(f.grid, f.m, f.grid.r * differentiate(f).values + f.values)


def covariant_cr(u: RadialField, f: RadialField) -> RadialField:
    """D_u f = df/dr - ((m + A_theta[u])/r) f."""
    check_same_grid(u, f, same_m=True)
    g = u.grid
    c = (u.m + a_theta(u).values) / g.r
    return RadialField(g, u.m, differentiate(f).values - c * f.values)


def mass(u: RadialField) -> float:
    return integrate(RadialField(u.grid, u.m, abs2(u.values)))


def energy(u: RadialField) -> EnergyPair:
    """Both energy forms.

    coulomb  = int 1/2 |du|^2 + 1/2 ((m+A_theta)/r)^2 |u|^2 - 1/4 |u|^4
    selfdual = int 1/2 |D_u u|^2

    They agree up to an O(h^2) discrete integration-by-parts residual; the
    manifestly nonnegative selfdual value is the canonical one downstream.
    """
    g = u.grid
    du = differentiate(u).values
    c = (u.m + a_theta(u).values) / g.r
    usq = abs2(u.values)
    coulomb_dens = 0.5 * abs2(du) + 0.5 * c**2 * usq - 0.25 * usq * usq
    d = du - c * u.values
    selfdual_dens = 0.5 * abs2(d)
    coulomb = integrate(RadialField(g, u.m, coulomb_dens))
    selfdual = integrate(RadialField(g, u.m, selfdual_dens))
    return EnergyPair(coulomb=coulomb, selfdual=selfdual)


def h1_scale_estimate(u: RadialField) -> float:
    """Scale proxy lambda ~ ||Q||_{Hdot1} / ||u||_{Hdot1} (valid near-soliton, m >= 0)."""
    from .grid import norm  # local import keeps module surface tidy

    _require_vortex_index(u.m)
    qn = _q_hdot1_ref(u.grid, u.m)
    un = norm(u, "Hdot1_m")
    if un == 0:
        raise ValueError("cannot estimate a scale for the zero field")
    return qn / un


_Q_HDOT1_CACHE: dict = {}


def _q_hdot1_ref(grid: RadialGrid, m: int) -> float:
    from .grid import norm

    key = (grid.n, grid.h, m)
    if key not in _Q_HDOT1_CACHE:
        _Q_HDOT1_CACHE[key] = norm(q_profile(m, grid), "Hdot1_m")
    return _Q_HDOT1_CACHE[key]


def virial_flux(u: RadialField) -> float:
    """int Im(conj(u) r du/dr), the generator paired with the variance."""
    du = differentiate(u).values
    v = u.values
    im_part = np.real(v) * np.imag(du) - np.imag(v) * np.real(du)
    return float(np.sum(u.grid.r * im_part * u.grid.w, dtype=np.longdouble))


def variance(u: RadialField) -> float:
    """int r^2 |u|^2."""
    return integrate(RadialField(u.grid, u.m, u.grid.r**2 * abs2(u.values)))
