"""Linearized Bogomol'nyi operator around the vortex and its certification.

    L_Q eps    = D_Q eps - (2/r) A_theta[Q, eps] Q
    L_Q* v     = -dv/dr - v/r - ((m+A_theta[Q])/r) v + Q int_r^inf Re(conj(Q) v) dr'
    calL_Q     = L_Q* L_Q        (Hessian of the energy at Q)

Both operators are only R-linear: the nonlocal pieces see Re(.) alone, so on
interleaved (Re, Im) vectors the real block differs from the imaginary block.

Discretization notes.  The nonlocal prefix/suffix pieces of L_Q and L_Q* are
exact duals of each other (shared midpoint weights).  The derivative pieces
use stencils that are pointwise O(h^2)-consistent AND whose interior rows
satisfy exact summation by parts:

    (Df, g)_w = (f, -Dg - Avg(g)/r)_w       (exact, fields vanishing near ends)

where Avg is the two-point average.  L_Q* therefore uses -D - Avg(.)/r with
the parity ghost flipped to (-1)^{m+1} (the adjoint acts on the opposite
parity class).  Consequences: all generalized-kernel identities hold at
O(h^2) down to the first node, and adjointness/symmetry are exact to
rounding on fields vanishing at the four boundary-closure nodes
{0, n-3, n-2, n-1}.  An exact matrix transpose instead would be O(h)
inconsistent at the origin node when m = 0, degrading the kernel-relation
residuals; see the operator tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.typing import NDArray
from scipy.integrate import solve_ivp

from .gauge import a_theta, a_theta_pol
from .grid import (
    RadialField,
    RadialGrid,
    abs2,
    check_same_grid,
    half_prefix_sum,
    half_suffix_sum,
    inner_real,
    integrate,
    log_minus_weight,
    minus1_values,
    norm,
    re_product,
    smooth_cutoff,
)
from .soliton import (
    SQRT8,
    covariant_cr,
    energy,
    lambda_q,
    q_closed_form,
    q_profile,
    a_theta_q_closed_form,
)

BOUNDARY_CLOSURE_NODES = (0, -3, -2, -1)  # rows with nonstandard stencils


class TransversalityError(ValueError):
    """The test profiles fail the 2x2 transversality determinant condition."""


class RhoSolveError(RuntimeError):
    """The outward integration for rho failed to meet its defining residual."""


@lru_cache(maxsize=32)
def _q_data(grid: RadialGrid, m: int):
    """Cached (Q, m + A_theta[Q], weights) on a grid; A_theta discrete for
    self-consistency with the rest of the artifact."""
    q = q_profile(m, grid)
    c = m + a_theta(q).values
    return q, c


def l_q(eps: RadialField) -> RadialField:
    """L_Q eps = D_Q eps - (2/r) A_theta[Q, eps] Q."""
    g = eps.grid
    q, c = _q_data(g, eps.m)
    d = _apply_diff(eps.values, g.h, _ghost_sign(eps.m))
    pol = -0.5 * half_prefix_sum(q.values * np.real(eps.values) * g.r * g.h)
    vals = d - (c / g.r) * eps.values - 2.0 / g.r * pol * q.values
    return RadialField(g, eps.m, vals)


def l_q_star(v: RadialField) -> RadialField:
    """L_Q* v = -dv/dr - Avg(v)/r - ((m+A_theta[Q])/r) v + Q int_r^inf Re(conj(Q) v) dr'."""
    g = v.grid
    q, c = _q_data(g, v.m)
    sign = -_ghost_sign(v.m)  # adjoint slot has opposite parity
    d = _apply_diff(v.values, g.h, sign)
    avg = _apply_avg(v.values, sign)
    suf = half_suffix_sum(q.values * np.real(v.values) * g.h)
    vals = -d - avg / g.r - (c / g.r) * v.values + q.values * suf
    return RadialField(g, v.m, vals)


def cal_l_q(eps: RadialField) -> RadialField:
    """calL_Q = L_Q* L_Q, the energy Hessian at Q."""
    return l_q_star(l_q(eps))


def _ghost_sign(m: int) -> float:
    return -1.0 if (m % 2) else 1.0


def _apply_diff(v: NDArray, h: float, ghost_sign: float) -> NDArray:
    out = np.empty_like(v)
    out[1:-1] = (v[2:] - v[:-2]) / (2.0 * h)
    out[0] = (v[1] - ghost_sign * v[0]) / (2.0 * h)
    out[-1] = (3.0 * v[-1] - 4.0 * v[-2] + v[-3]) / (2.0 * h)
    return out


def _apply_avg(v: NDArray, ghost_sign: float) -> NDArray:
    out = np.empty_like(v)
    out[1:-1] = 0.5 * (v[2:] + v[:-2])
    out[0] = 0.5 * (v[1] + ghost_sign * v[0])
    out[-1] = v[-1]
    return out


# -- generalized kernel: the rho profile -------------------------------------


def rho_profile(m: int, grid: RadialGrid, rtol: float = 1e-10, atol: float = 1e-12,
                project_kernel: bool = False) -> RadialField:
    """Real profile solving L_Q rho = r Q / (2(m+1)).

    Integrates the coupled system

        drho/dr = ((m + A_theta[Q])/r) rho + (2/r) P Q + r Q / (2(m+1))
        dP/dr   = -(1/2) Q rho r,        P = A_theta[Q, rho],

    outward from the first node, seeded on the regular branch by the series
    rho = a r^{m+2} + b r^{3m+4} with

        a = sqrt(8)/4,
        b = -sqrt(8) [(m+2)^2 + 2(m+1)^2] / (4 (m+2)^2).

    rho is defined only up to kernel elements of L_Q.  Every seed yields a
    bounded solution (the regular kernel element LambdaQ itself decays), so
    boundedness cannot select the representative; the returned normalization
    is the pure series branch, i.e. no r^m admixture in the origin expansion.
    The iQ pairing vanishes identically for a real profile.  Optionally the
    discrete LambdaQ component can be projected out afterwards
    (project_kernel=True); for m = 0 that overlap integral is log-divergent
    in the domain size and amplifies the O(h^2) kernel residual of LambdaQ,
    so it is off by default.
    """
    if m < 0:
        raise ValueError("rho exists for m >= 0 only")
    r = grid.r
    a = SQRT8 / 4.0
    b = -SQRT8 * ((m + 2) ** 2 + 2.0 * (m + 1) ** 2) / (4.0 * (m + 2) ** 2)

    def rhs(rr, y):
        rho, p = y
        q = q_closed_form(m, rr)
        c = m + a_theta_q_closed_form(m, rr)
        drho = c / rr * rho + 2.0 / rr * p * q + rr * q / (2.0 * (m + 1))
        dp = -0.5 * q * rho * rr
        return [drho, dp]

    r0 = r[0]
    rho0 = a * r0 ** (m + 2) + b * r0 ** (3 * m + 4)
    p0 = -SQRT8 * (m + 1) * a * r0 ** (2 * m + 4) / (2.0 * (2 * m + 4))
    sol = solve_ivp(
        rhs, (r0, r[-1]), [rho0, p0], t_eval=r, rtol=rtol, atol=atol,
        method="RK45", dense_output=False,
    )
    if not sol.success:
        raise RhoSolveError(f"outward integration for rho failed: {sol.message}")
    rho = RadialField(grid, m, sol.y[0])

    if project_kernel:
        lq = lambda_q(m, grid)
        alpha = inner_real(rho, lq) / inner_real(lq, lq)
        rho = RadialField(grid, m, rho.values - alpha * lq.values)

    q, _ = _q_data(grid, m)
    target = RadialField(grid, m, grid.r * q.values / (2.0 * (m + 1)))
    res = norm(l_q(rho) - target, "L2") / norm(target, "L2")
    if res > 1e-2:
        raise RhoSolveError(
            f"rho residual ||L_Q rho - rQ/(2(m+1))||/||rQ|| = {res:.3e} at n={grid.n}, "
            f"h={grid.h}: integration did not converge to the defining equation"
        )
    return rho


# -- matrix representations ---------------------------------------------------


@dataclass
class LinearOperatorMatrix:
    """Dense real matrix acting on interleaved (Re, Im) vectors of length 2n.

    Re/Im blocks differ (the operators are only R-linear); for L_Q and L_Q*
    the two blocks decouple because the nonlocal pieces are real and driven
    by Re(.) alone.
    """

    which: str
    grid: RadialGrid
    m: int
    matrix: NDArray  # (2n, 2n)

    @property
    def dim(self) -> int:
        return 2 * self.grid.n

    def interleave(self, f: RadialField) -> NDArray:
        x = np.empty(self.dim)
        x[0::2] = np.real(f.values)
        x[1::2] = np.imag(f.values)
        return x

    def deinterleave(self, x: NDArray) -> RadialField:
        return RadialField(self.grid, self.m, x[0::2] + 1j * x[1::2])

    def apply(self, f: RadialField) -> RadialField:
        return self.deinterleave(self.matrix @ self.interleave(f))

    def weighted(self) -> NDArray:
        """W A with W = diag(2 pi r h) interleaved; symmetric when the operator
        is self-adjoint for the real inner product."""
        w = np.repeat(self.grid.w, 2)
        return self.matrix * w[:, None]


def _diff_matrix(grid: RadialGrid, ghost_sign: float) -> NDArray:
    n, h = grid.n, grid.h
    d = np.zeros((n, n))
    idx = np.arange(1, n - 1)
    d[idx, idx + 1] = 1.0 / (2 * h)
    d[idx, idx - 1] = -1.0 / (2 * h)
    d[0, 0] = -ghost_sign / (2 * h)
    d[0, 1] = 1.0 / (2 * h)
    d[n - 1, n - 1] = 3.0 / (2 * h)
    d[n - 1, n - 2] = -4.0 / (2 * h)
    d[n - 1, n - 3] = 1.0 / (2 * h)
    return d


def _avg_matrix(grid: RadialGrid, ghost_sign: float) -> NDArray:
    n = grid.n
    a = np.zeros((n, n))
    idx = np.arange(1, n - 1)
    a[idx, idx + 1] = 0.5
    a[idx, idx - 1] = 0.5
    a[0, 0] = 0.5 * ghost_sign
    a[0, 1] = 0.5
    a[n - 1, n - 1] = 1.0
    return a


def _prefix_weight_matrix(n: int) -> NDArray:
    w = np.tril(np.ones((n, n)), -1)
    np.fill_diagonal(w, 0.5)
    w[0, 0] = 0.25  # matches half_prefix_sum's first-cell weight
    return w


def _lq_blocks(grid: RadialGrid, m: int):
    """Real and imaginary n x n blocks of L_Q."""
    q, c = _q_data(grid, m)
    r, h = grid.r, grid.h
    d = _diff_matrix(grid, _ghost_sign(m))
    base = d - np.diag(c / r)
    # nonlocal: eps_re -> -(2/r) A_theta[Q,eps] Q = (Q/r) P (Q r h eps_re)
    nl = (q.values / r)[:, None] * _prefix_weight_matrix(grid.n) * (q.values * r * h)[None, :]
    return base + nl, base


def _lqstar_blocks(grid: RadialGrid, m: int):
    q, c = _q_data(grid, m)
    r, h = grid.r, grid.h
    sign = -_ghost_sign(m)
    d = _diff_matrix(grid, sign)
    avg = _avg_matrix(grid, sign)
    base = -d - np.diag(1.0 / r) @ avg - np.diag(c / r)
    # nonlocal: v_re -> Q * suffix(Q v_re h); suffix weights are prefix^T
    nl = q.values[:, None] * _prefix_weight_matrix(grid.n).T * (q.values * h)[None, :]
    return base + nl, base


def _interleave_blocks(rr: NDArray, ii: NDArray) -> NDArray:
    n = rr.shape[0]
    mat = np.zeros((2 * n, 2 * n))
    mat[0::2, 0::2] = rr
    mat[1::2, 1::2] = ii
    return mat


def operator_matrix(which: str, grid: RadialGrid, m: int) -> LinearOperatorMatrix:
    """Assemble LQ, LQstar or calLQ on interleaved (Re, Im) vectors."""
    if which == "LQ":
        rr, ii = _lq_blocks(grid, m)
        mat = _interleave_blocks(rr, ii)
    elif which == "LQstar":
        rr, ii = _lqstar_blocks(grid, m)
        mat = _interleave_blocks(rr, ii)
    elif which == "calLQ":
        lrr, lii = _lq_blocks(grid, m)
        srr, sii = _lqstar_blocks(grid, m)
        mat = _interleave_blocks(srr @ lrr, sii @ lii)
    else:
        raise ValueError(f"unknown operator {which!r}")
    return LinearOperatorMatrix(which=which, grid=grid, m=m, matrix=mat)


# -- coercivity certification --------------------------------------------------


@dataclass
class CoercivityResult:
    c_low: float
    c_high: float
    det_transversality: float


def transversality_det(z1: RadialField, z2: RadialField) -> float:
    """det [[(LambdaQ,Z1), (iQ,Z1)], [(LambdaQ,Z2), (iQ,Z2)]]."""
    g = z1.grid
    m = z1.m
    lq = lambda_q(m, g)
    iq = RadialField(g, m, 1j * q_profile(m, g).values)
    return (
        inner_real(lq, z1) * inner_real(iq, z2)
        - inner_real(iq, z1) * inner_real(lq, z2)
    )


def _check_transversality(z1: RadialField, z2: RadialField) -> float:
    g, m = z1.grid, z1.m
    lq = lambda_q(m, g)
    iq = RadialField(g, m, 1j * q_profile(m, g).values)
    det = transversality_det(z1, z2)
    scale = max(
        norm(lq, "L2") * norm(z1, "L2"),
        norm(iq, "L2") * norm(z2, "L2"),
        1e-300,
    ) ** 2
    if abs(det) <= 1e-6 * scale:
        raise TransversalityError(
            f"|det| = {abs(det):.3e} <= 1e-6 * scale = {1e-6 * scale:.3e}"
        )
    return det


def _hdot1_weight(grid: RadialGrid, m: int) -> NDArray:
    """Diagonal zeroth-order weight of the (squared) adapted H1 form."""
    if abs(m) >= 1:
        return (m / grid.r) ** 2
    return (log_minus_weight(grid.r) / grid.r) ** 2


def _component_forms(grid: RadialGrid, m: int, component: str):
    """Quadratic forms A (||L_Q f||^2) and B (adapted-H1) for one component.

    The Re and Im blocks of L_Q decouple; `component` picks which block.
    """
    rr, ii = _lq_blocks(grid, m)
    block = rr if component == "re" else ii
    w = grid.w
    amat = block.T @ (w[:, None] * block)
    d = _diff_matrix(grid, _ghost_sign(m))
    bmat = d.T @ (w[:, None] * d) + np.diag(w * _hdot1_weight(grid, m))
    return amat, bmat


def _constrained_extremes(amat, bmat, constraints) -> tuple:
    """Min/max generalized Rayleigh quotients of (A, B) on the intersection of
    the constraint null space."""
    from scipy.linalg import eigh, null_space

    if constraints:
        cmat = np.vstack(constraints)
        v = null_space(cmat)
        amat = v.T @ amat @ v
        bmat = v.T @ bmat @ v
    vals = eigh(amat, bmat, eigvals_only=True)
    return float(vals[0]), float(vals[-1])


def coercivity_constant(
    z1: RadialField,
    z2: RadialField,
    grid: RadialGrid,
    m: int,
    interior_fraction: float = 0.9,
    constrained: bool = True,
) -> CoercivityResult:
    """Extremes of ||L_Q f||^2 / ||f||^2_{adapted H1} over {f : (f,Z1)=(f,Z2)=0},
    with f supported on r <= interior_fraction * r_max (Dirichlet truncation
    pollutes the spectrum near the outer edge).

    With the shipped profiles (Z1 real, Z2 imaginary) the Re and Im blocks
    separate into two n-dimensional problems; a mixed pair falls back to the
    full interleaved problem.
    """
    det = _check_transversality(z1, z2) if constrained else transversality_det(z1, z2)
    mask = grid.r <= interior_fraction * grid.r_max
    idx = np.where(mask)[0]
    w = grid.w

    z1_im_negligible = np.max(np.abs(np.imag(z1.values)), initial=0.0) == 0.0
    z2_re_negligible = np.max(np.abs(np.real(z2.values)), initial=0.0) == 0.0

    if z1_im_negligible and z2_re_negligible:
        results = []
        for component, z in (("re", z1), ("im", z2)):
            amat, bmat = _component_forms(grid, m, component)
            amat = amat[np.ix_(idx, idx)]
            bmat = bmat[np.ix_(idx, idx)]
            zvals = np.real(z.values) if component == "re" else np.imag(z.values)
            cons = [(w * zvals)[idx]] if constrained else []
            results.append(_constrained_extremes(amat, bmat, cons))
        c_low = min(lo for lo, _ in results)
        c_high = max(hi for _, hi in results)
        return CoercivityResult(c_low=c_low, c_high=c_high, det_transversality=det)

    # general interleaved problem
    lq_mat = operator_matrix("LQ", grid, m)
    w2 = np.repeat(w, 2)
    amat = lq_mat.matrix.T @ (w2[:, None] * lq_mat.matrix)
    d = _diff_matrix(grid, _ghost_sign(m))
    bblock = d.T @ (w[:, None] * d) + np.diag(w * _hdot1_weight(grid, m))
    bmat = _interleave_blocks(bblock, bblock)
    idx2 = np.sort(np.concatenate([2 * idx, 2 * idx + 1]))
    amat = amat[np.ix_(idx2, idx2)]
    bmat = bmat[np.ix_(idx2, idx2)]
    cons = []
    if constrained:
        for z in (z1, z2):
            zz = np.empty(2 * grid.n)
            zz[0::2] = w * np.real(z.values)
            zz[1::2] = w * np.imag(z.values)
            cons.append(zz[idx2])
    lo, hi = _constrained_extremes(amat, bmat, cons)
    return CoercivityResult(c_low=lo, c_high=hi, det_transversality=det)


# -- nonlinear coercivity / Hardy diagnostics ---------------------------------


def project_out_kernel(eps: RadialField, z1: RadialField, z2: RadialField) -> RadialField:
    """Remove the LambdaQ / iQ components so that (eps, Z1)_r = (eps, Z2)_r = 0."""
    g, m = eps.grid, eps.m
    lq = lambda_q(m, g)
    iq = RadialField(g, m, 1j * q_profile(m, g).values)
    a11, a12 = inner_real(lq, z1), inner_real(iq, z1)
    a21, a22 = inner_real(lq, z2), inner_real(iq, z2)
    b1, b2 = inner_real(eps, z1), inner_real(eps, z2)
    det = a11 * a22 - a12 * a21
    alpha = (b1 * a22 - b2 * a12) / det
    beta = (a11 * b2 - a21 * b1) / det
    return RadialField(g, m, eps.values - alpha * lq.values - beta * iq.values)


def nonlinear_coercivity_ratio(eps: RadialField, z1: RadialField, z2: RadialField,
                               orthogonality_tol: float = 1e-8) -> float:
    """E[Q + eps] / ||eps||^2_{adaptedH1} for eps satisfying the orthogonality
    conditions (caller projects; violations beyond tol are rejected)."""
    nrm = norm(eps, "adaptedH1")
    if nrm == 0.0:
        raise ValueError("coercivity ratio undefined for eps = 0")
    scale = norm(eps, "L2")
    for z in (z1, z2):
        pairing = abs(inner_real(eps, z))
        if pairing > orthogonality_tol * max(scale * norm(z, "L2"), 1e-300):
            raise ValueError(
                f"eps violates orthogonality against the test profiles: {pairing:.3e}"
            )
    u = q_profile(eps.m, eps.grid) + eps
    return energy(u).selfdual / nrm**2


def nonlinear_hardy_ratio(f: RadialField, eps: RadialField, R: float) -> float:
    """Exterior Hardy quotient for the operator D_Q - A_theta[eps]/r.

    f is windowed by (1 - chi_R) so it vanishes on r <= R; the quotient
    compares ||1_{[R,inf)} (D_Q - A_theta[eps]/r) f||^2 against
    ||1_{[R,inf)} |f|_{-1}||^2.
    """
    check_same_grid(f, eps, same_m=True)
    g = f.grid
    window = 1.0 - smooth_cutoff(g.r / R)
    fw = RadialField(g, f.m, window * f.values)
    q, _ = _q_data(g, f.m)
    dq_fw = covariant_cr(q, fw)
    op = dq_fw.values - a_theta(eps).values / g.r * fw.values
    mask = (g.r >= R).astype(float)
    num = integrate(RadialField(g, f.m, mask * abs2(op)))
    env = minus1_values(fw)
    den = integrate(RadialField(g, f.m, mask * env * env))
    if den == 0.0:
        raise ValueError("Hardy quotient undefined: windowed field vanishes on [R, inf)")
    return num / den
