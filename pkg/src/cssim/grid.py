"""Cell-centered radial grid, quadrature and norms for the measure 2*pi*r*dr.

Nodes sit at r_i = (i + 1/2)*h, so r = 0 is never a sample point: every
operator in this package divides by r somewhere (equivariant Laplacian,
gauge potentials, Hardy weights).  Midpoint quadrature on this grid is
exact for constants and second-order accurate for smooth decaying
integrands.

The half-inclusive prefix/suffix sums defined here,

    P_i(x) = sum_{j<i} x_j + x_i/2,      S_i(x) = sum_{j>i} x_j + x_i/2,

satisfy the exact discrete Fubini identity  sum_i f_i S_i(g) = sum_j g_j P_j(f)
while remaining O(h^2)-accurate approximations of integrals up to / from the
node position.  All nonlocal integrals (gauge potentials, suffix potentials)
use these sums, which is what turns the multilinear duality identities into
machine-precision checks downstream.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np
from numpy.typing import NDArray


class GridMismatchError(ValueError):
    """Two fields that must share a grid (or equivariance index) do not."""


@dataclass(frozen=True)
class RadialGrid:
    """Uniform cell-centered grid on (0, r_max] with r_i = (i + 1/2) h.

    Hashable on (n, h) so operator caches can key on the grid object.
    The node array and quadrature weights are precomputed; treat them as
    read-only.
    """

    n: int
    h: float
    r: NDArray = field(init=False, repr=False, compare=False)
    w: NDArray = field(init=False, repr=False, compare=False)  # 2*pi*r*h

    def __post_init__(self):
        if self.n < 4:
            raise ValueError(f"grid needs at least 4 cells, got n={self.n}")
        if self.h <= 0:
            raise ValueError(f"grid spacing must be positive, got h={self.h}")
        r = (np.arange(self.n) + 0.5) * self.h
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "w", 2.0 * np.pi * r * self.h)
        self.r.setflags(write=False)
        self.w.setflags(write=False)

    @property
    def r_max(self) -> float:
        return self.n * self.h

    @classmethod
    def from_rmax(cls, r_max: float, h: float) -> "RadialGrid":
        return cls(n=int(round(r_max / h)), h=h)


@dataclass
class RadialField:
    """Radial part u(r) of an m-equivariant field u(r) e^{i m theta}.

    Operations never mutate `values`; arithmetic allocates fresh fields.
    For |m| >= 1 a well-formed field vanishes like r^{|m|} at the origin;
    the finite-difference boundary stencils encode that through the parity
    ghost (f(-r) = (-1)^m f(r)).
    """

    grid: RadialGrid
    m: int
    values: NDArray

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.values.shape != (self.grid.n,):
            raise ValueError(
                f"field has {self.values.shape} values for a grid of {self.grid.n} nodes"
            )
        if not np.all(np.isfinite(self.values)):
            raise FloatingPointError("non-finite values in RadialField")

    # -- small arithmetic layer so formulas read like the math ------------

    def _like(self, values: NDArray) -> "RadialField":
        return RadialField(self.grid, self.m, values)

    def __add__(self, other: "RadialField") -> "RadialField":
        check_same_grid(self, other)
        return self._like(self.values + other.values)

    def __sub__(self, other: "RadialField") -> "RadialField":
        check_same_grid(self, other)
        return self._like(self.values - other.values)

    def __neg__(self) -> "RadialField":
        return self._like(-self.values)

    def __mul__(self, a: Union[complex, float, NDArray]) -> "RadialField":
        return self._like(self.values * a)

    __rmul__ = __mul__

    def copy(self) -> "RadialField":
        return self._like(self.values.copy())

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.values)


def zero_field(grid: RadialGrid, m: int, real: bool = False) -> RadialField:
    dtype = np.float64 if real else np.complex128
    return RadialField(grid, m, np.zeros(grid.n, dtype=dtype))


def check_same_grid(f: RadialField, g: RadialField, same_m: bool = False) -> None:
    if f.grid is not g.grid and (f.grid.n, f.grid.h) != (g.grid.n, g.grid.h):
        raise GridMismatchError("fields live on different grids")
    if same_m and f.m != g.m:
        raise GridMismatchError(f"equivariance indices differ: {f.m} vs {g.m}")


def abs2(values: NDArray) -> NDArray:
    """|z|^2 as re^2 + im^2 (no sqrt round-trip, keeps phase invariance exact)."""
    if np.iscomplexobj(values):
        return values.real**2 + values.imag**2
    return values * values


def re_product(f: RadialField, g: RadialField) -> NDArray:
    """Pointwise Re(conj(f) g), computed componentwise."""
    fv, gv = f.values, g.values
    if np.iscomplexobj(fv) or np.iscomplexobj(gv):
        return np.real(fv).astype(float) * np.real(gv) + np.imag(fv) * np.imag(gv)
    return fv * gv


# -- quadrature ------------------------------------------------------------


def integrate(f: RadialField) -> float:
    """2*pi * sum_i f(r_i) r_i h, the midpoint rule for int f dx on R^2.

    Only defined for real integrands (norms, densities).
    """
    v = f.values
    if np.iscomplexobj(v):
        if np.any(v.imag != 0.0):
            raise TypeError("integrate expects a real-valued field")
        v = v.real
    return float(np.sum(v * f.grid.w, dtype=np.longdouble))


def inner_real(f: RadialField, g: RadialField) -> float:
    """Real inner product (f,g)_r = int Re(conj(f) g)."""
    check_same_grid(f, g)
    return float(np.sum(re_product(f, g) * f.grid.w, dtype=np.longdouble))


def half_prefix_sum(x: NDArray) -> NDArray:
    """P_i = sum_{j<i} x_j + x_i/2, accumulated in extended precision.

    Approximates int_0^{r_i} when x_j are midpoint cell contributions.  The
    first node keeps only a quarter of its own cell: prefix integrands carry
    the r dr measure and vanish linearly at the origin, so the quarter weight
    integrates the first half-cell exactly for the constant part of the
    density (a half weight overshoots it by a factor two).
    """
    xl = np.asarray(x, dtype=np.longdouble)
    acc = np.cumsum(xl)
    out = acc - 0.5 * xl
    out[0] = 0.25 * xl[0]
    return out.astype(np.float64)


def half_suffix_sum(x: NDArray) -> NDArray:
    """S_i = sum_{j>i} x_j + x_i/2, the exact summation-by-parts transpose of
    half_prefix_sum (shared diagonal weights, including the quarter at node 0)."""
    xl = np.asarray(x, dtype=np.longdouble)
    acc = np.cumsum(xl[::-1])[::-1]
    out = acc - 0.5 * xl
    out[0] = acc[0] - 0.75 * xl[0]
    return out.astype(np.float64)


# -- differentiation --------------------------------------------------------


def _diff_core(v: NDArray, h: float, ghost_sign: float) -> NDArray:
    """Central differences with a parity ghost at the origin and a one-sided
    second-order stencil at the outer edge."""
    out = np.empty_like(v)
    out[1:-1] = (v[2:] - v[:-2]) / (2.0 * h)
    out[0] = (v[1] - ghost_sign * v[0]) / (2.0 * h)
    out[-1] = (3.0 * v[-1] - 4.0 * v[-2] + v[-3]) / (2.0 * h)
    return out


def differentiate(f: RadialField) -> RadialField:
    """d/dr, second order; origin closed by the parity ghost (-1)^m f(r_0)."""
    sign = -1.0 if (f.m % 2) else 1.0
    return RadialField(f.grid, f.m, _diff_core(f.values, f.grid.h, sign))


def log_minus_weight(r: NDArray) -> NDArray:
    """<log_- r>^{-1} with log_- r = max(-log r, 0)."""
    lm = np.maximum(-np.log(r), 0.0)
    return 1.0 / np.sqrt(1.0 + lm * lm)


def minus1_values(f: RadialField) -> NDArray:
    """Pointwise |f|_{-1} = max(|df/dr|, |f|/r)."""
    df = differentiate(f).values
    return np.maximum(np.abs(df), np.abs(f.values) / f.grid.r)


NORM_KINDS = ("L2", "Hdot1_m", "adaptedH1", "H11", "minus1")


def norm(f: RadialField, kind: str) -> float:
    """Norms used throughout: L2, the equivariant Hdot1, the adapted H1
    (log-weighted Hardy term when m = 0), the r-weighted H11, and the L2
    norm of the pointwise |f|_{-1} envelope."""
    r = f.grid.r
    if kind == "L2":
        return float(np.sqrt(integrate(RadialField(f.grid, f.m, abs2(f.values)))))
    if kind == "Hdot1_m":
        df = differentiate(f).values
        dens = abs2(df) + f.m**2 * abs2(f.values) / r**2
        return float(np.sqrt(integrate(RadialField(f.grid, f.m, dens))))
    if kind == "adaptedH1":
        if abs(f.m) >= 1:
            return norm(f, "Hdot1_m")
        df = differentiate(f).values
        a = np.sqrt(integrate(RadialField(f.grid, f.m, abs2(df))))
        wv = log_minus_weight(r) / r
        b = np.sqrt(integrate(RadialField(f.grid, f.m, abs2(wv * f.values))))
        return float(a + b)
    if kind == "H11":
        l2sq = integrate(RadialField(f.grid, f.m, abs2(f.values)))
        rfsq = integrate(RadialField(f.grid, f.m, abs2(r * f.values)))
        return float(np.sqrt(l2sq + norm(f, "Hdot1_m") ** 2 + rfsq))
    if kind == "minus1":
        env = minus1_values(f)
        return float(np.sqrt(integrate(RadialField(f.grid, f.m, env * env))))
    raise ValueError(f"unknown norm kind {kind!r}; expected one of {NORM_KINDS}")


# -- cutoffs and synthetic fields -------------------------------------------


def smooth_cutoff(x: NDArray) -> NDArray:
    """C^infty cutoff: 1 for x <= 1, 0 for x >= 2, monotone in between."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    out[x <= 1.0] = 1.0
    mid = (x > 1.0) & (x < 2.0)
    if np.any(mid):
        t = x[mid]
        a = np.exp(-1.0 / (2.0 - t))  # -> 0 as t -> 2
        b = np.exp(-1.0 / (t - 1.0))  # -> 0 as t -> 1
        out[mid] = a / (a + b)
    return out


def cutoff_field(grid: RadialGrid, m: int, radius: float) -> RadialField:
    """chi_R(r) = chi(r/R) as a real field."""
    return RadialField(grid, m, smooth_cutoff(grid.r / radius))


def random_smooth_field(
    grid: RadialGrid,
    m: int,
    rng: np.random.Generator,
    n_modes: int = 3,
    scale_range: tuple = (1.0, 4.0),
    complex_values: bool = True,
) -> RadialField:
    """Random smooth decaying field with the correct r^{|m|} origin behaviour.

    Built as r^{|m|} e^{-r^2/(2 s^2)} * (random polynomial in r^2), which is a
    smooth function of r^2 times r^{|m|}; this keeps the even/odd parity that
    the boundary stencils assume.
    """
    r = grid.r
    s = rng.uniform(*scale_range)
    x = (r / s) ** 2
    vals = np.zeros(grid.n, dtype=np.complex128 if complex_values else np.float64)
    for k in range(n_modes):
        if complex_values:
            c = rng.standard_normal() + 1j * rng.standard_normal()
        else:
            c = rng.standard_normal()
        vals = vals + c * x**k
    envelope = r ** abs(m) * np.exp(-0.5 * x) / (1.0 + s ** abs(m))
    return RadialField(grid, m, vals * envelope)


def random_h1_field(
    grid: RadialGrid, m: int, seed: int, mass_target: float, n_modes: int = 4
) -> RadialField:
    """Seeded random field rescaled to a prescribed mass (for scenario data)."""
    rng = np.random.default_rng(seed)
    f = random_smooth_field(grid, m, rng, n_modes=n_modes)
    msq = integrate(RadialField(grid, m, abs2(f.values)))
    if msq <= 0:
        raise ValueError("degenerate random field")
    return f * np.sqrt(mass_target / msq)


def tail_mass_fraction(u: RadialField, outer_fraction: float = 0.1) -> float:
    """Fraction of the mass sitting in the outer `outer_fraction` of the domain."""
    r = u.grid.r
    dens = abs2(u.values)
    total = float(np.sum(dens * u.grid.w, dtype=np.longdouble))
    if total == 0.0:
        return 0.0
    mask = r >= (1.0 - outer_fraction) * u.grid.r_max
    outer = float(np.sum(dens[mask] * u.grid.w[mask], dtype=np.longdouble))
    return outer / total
