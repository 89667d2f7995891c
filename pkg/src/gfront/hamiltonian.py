"""Numerical Hamiltonians for the inviscid and strain G-equations.

Every sub-term is a function of the one-sided derivatives
``(pm, pp, qm, qp)`` = (D-x G, D+x G, D-y G, D+y G):

* advection ``u p + v q``: upwind selection
* laminar ``s_L |grad G|``: Godunov
* strain ``a p^2/r`` and ``b q^2/r``: Osher-Sethian sign splitting
* strain ``c p q / r``: Roe upwinding, Lax-Friedrichs diffusion only where
  the transverse one-sided pair has opposite signs

The scalar kernels are numba functions usable both from Python and from the
fused grid loop :func:`assemble_grid`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .discretization import PAD, GradientField, OneSidedGradients, first_order_axis0, weno_axis0, weno_row
from .flow import FlowSample, strain_coefficients


@njit(cache=True, inline="always", error_model="numpy")
def _fraction(num, p2, q2):
    r2 = p2 + q2
    if r2 == 0.0:
        return 0.0
    return num / math.sqrt(r2)


@njit(cache=True, error_model="numpy")
def upwind_advection(pm, pp, qm, qp, u, v):
    if u > 0.0:
        p = pm
    elif u < 0.0:
        p = pp
    else:
        p = 0.5 * (pm + pp)
    if v > 0.0:
        q = qm
    elif v < 0.0:
        q = qp
    else:
        q = 0.5 * (qm + qp)
    return u * p + v * q


@njit(cache=True, error_model="numpy")
def godunov_laminar(pm, pp, qm, qp, s_L):
    p2 = max(max(pm, 0.0) ** 2, min(pp, 0.0) ** 2)
    q2 = max(max(qm, 0.0) ** 2, min(qp, 0.0) ** 2)
    return s_L * math.sqrt(p2 + q2)


@njit(cache=True, error_model="numpy")
def osher_sethian_s1(pm, pp, qm, qp, a):
    """``a p^2 / |grad G|``: increasing in p^2, decreasing in q^2 for a > 0."""
    if a > 0.0:
        p2 = min(pp, 0.0) ** 2 + max(pm, 0.0) ** 2
        q2 = min(qm, 0.0) ** 2 + max(qp, 0.0) ** 2
    elif a < 0.0:
        p2 = min(pm, 0.0) ** 2 + max(pp, 0.0) ** 2
        q2 = min(qp, 0.0) ** 2 + max(qm, 0.0) ** 2
    else:
        return 0.0
    return a * _fraction(p2, p2, q2)


@njit(cache=True, error_model="numpy")
def osher_sethian_s2(pm, pp, qm, qp, b):
    """``b q^2 / |grad G|``: the s1 construction with the roles of p and q swapped."""
    if b > 0.0:
        p2 = min(pm, 0.0) ** 2 + max(pp, 0.0) ** 2
        q2 = min(qp, 0.0) ** 2 + max(qm, 0.0) ** 2
    elif b < 0.0:
        p2 = min(pp, 0.0) ** 2 + max(pm, 0.0) ** 2
        q2 = min(qm, 0.0) ** 2 + max(qp, 0.0) ** 2
    else:
        return 0.0
    return b * _fraction(q2, p2, q2)


@njit(cache=True, inline="always", error_model="numpy")
def _transverse_sign(m, p):
    """Sign class of a one-sided pair: +1/-1 when both agree, 0 when split.

    A single zero takes the sign of the other member; two zeros give 2,
    meaning the derivative vanishes from both sides.
    """
    prod = m * p
    if prod > 0.0:
        return 1 if m > 0.0 else -1
    if prod < 0.0:
        return 0
    s = m + p
    if s > 0.0:
        return 1
    if s < 0.0:
        return -1
    return 2


@njit(cache=True, error_model="numpy")
def roe_s3(pm, pp, qm, qp, c):
    """``c p q / |grad G|`` with Roe upwinding and Lax-Friedrichs fallback."""
    if c == 0.0:
        return 0.0
    sq = _transverse_sign(qm, qp)
    sp = _transverse_sign(pm, pp)
    if sq == 2 or sp == 2:
        # grad G vanishes transversally: the central fraction is zero and
        # no diffusion is added on that side
        frac_zero = True
    else:
        frac_zero = False

    absc = abs(c)
    # p selection keyed on the sign of c*q
    cbar_p = 0.0
    if sq == 0:
        ps = 0.5 * (pm + pp)
        cbar_p = absc
    elif sq == 2:
        ps = 0.5 * (pm + pp)
    elif c * sq > 0.0:
        ps = pm
    else:
        ps = pp
    cbar_q = 0.0
    if sp == 0:
        qs = 0.5 * (qm + qp)
        cbar_q = absc
    elif sp == 2:
        qs = 0.5 * (qm + qp)
    elif c * sp > 0.0:
        qs = qm
    else:
        qs = qp

    central = 0.0 if frac_zero else c * _fraction(ps * qs, ps * ps, qs * qs)
    return central - cbar_p * 0.5 * (pp - pm) - cbar_q * 0.5 * (qp - qm)


@njit(cache=True, error_model="numpy")
def numerical_hamiltonian(pm, pp, qm, qp, u, v, s_L, a, b, c, strain):
    value = upwind_advection(pm, pp, qm, qp, u, v) + godunov_laminar(pm, pp, qm, qp, s_L)
    if strain:
        value += osher_sethian_s1(pm, pp, qm, qp, a)
        value += osher_sethian_s2(pm, pp, qm, qp, b)
        value += roe_s3(pm, pp, qm, qp, c)
    return value


@njit(cache=True, error_model="numpy")
def advective_bounds(u, v, s_L, a, b, c, strain):
    extra = abs(a) + abs(b) + 2.0 * abs(c) if strain else 0.0
    return abs(u) + s_L + extra, abs(v) + s_L + extra


def analytic_hamiltonian(p, q, u, v, s_L, a=0.0, b=0.0, c=0.0):
    """Continuous Hamiltonian H(p, q); the consistency target. Vectorised."""
    p, q = np.asarray(p, float), np.asarray(q, float)
    r = np.sqrt(p * p + q * q)
    with np.errstate(invalid="ignore", divide="ignore"):
        strain = np.where(r > 0, (a * p * p + b * q * q + c * p * q) / r, 0.0)
    return u * p + v * q + s_L * r + strain


@dataclass(frozen=True)
class HamiltonianInputs:
    grads: OneSidedGradients
    flow: FlowSample
    s_L: float = 1.0
    d_M: float = 0.0
    strain_enabled: bool = False

    def __post_init__(self):
        if not self.s_L > 0:
            raise ValueError(f"s_L must be > 0, got {self.s_L}")
        if self.d_M < 0:
            raise ValueError(f"d_M must be >= 0, got {self.d_M}")


@dataclass(frozen=True)
class HamiltonianValue:
    value: float
    advective_bound_x: float
    advective_bound_y: float


def assemble(inputs: HamiltonianInputs) -> HamiltonianValue:
    g, f = inputs.grads, inputs.flow
    k = strain_coefficients(f, inputs.d_M)
    strain = bool(inputs.strain_enabled)
    value = numerical_hamiltonian(
        g.p_minus, g.p_plus, g.q_minus, g.q_plus, f.u, f.v, inputs.s_L, k.a, k.b, k.c, strain
    )
    bx, by = advective_bounds(f.u, f.v, inputs.s_L, k.a, k.b, k.c, strain)
    return HamiltonianValue(value, bx, by)


@njit(cache=True, error_model="numpy")
def assemble_grid(pm, pp, qm, qp, u_of_y, dudy_of_y, v_of_x, dvdx_of_x, s_L, d_M, strain, out):
    """Fill ``out`` with -H at every node for a separable flow u(y), v(x).

    Returns the grid maxima of the x and y advective bounds.
    """
    n_x, n_y = out.shape
    bx_max = 0.0
    by_max = 0.0
    for i in range(n_x):
        v = v_of_x[i]
        dvdx = dvdx_of_x[i]
        for j in range(n_y):
            u = u_of_y[j]
            c = d_M * (dudy_of_y[j] + dvdx)
            h = numerical_hamiltonian(
                pm[i, j], pp[i, j], qm[i, j], qp[i, j], u, v, s_L, 0.0, 0.0, c, strain
            )
            out[i, j] = -h
            bx, by = advective_bounds(u, v, s_L, 0.0, 0.0, c, strain)
            if bx > bx_max:
                bx_max = bx
            if by > by_max:
                by_max = by
    return bx_max, by_max


def hamiltonian_field(grads: GradientField, u_of_y, dudy_of_y, v_of_x, dvdx_of_x,
                      s_L: float, d_M: float, strain: bool):
    out = np.empty(grads.grid.shape)
    bx, by = assemble_grid(
        grads.p_minus, grads.p_plus, grads.q_minus, grads.q_plus,
        np.ascontiguousarray(u_of_y, dtype=np.float64), np.ascontiguousarray(dudy_of_y, dtype=np.float64),
        np.ascontiguousarray(v_of_x, dtype=np.float64), np.ascontiguousarray(dvdx_of_x, dtype=np.float64),
        float(s_L), float(d_M), bool(strain), out,
    )
    return out, bx, by


@njit(cache=True, error_model="numpy")
def fused_rhs(dx, dy, weno, eps, u_of_y, dudy_of_y, v_of_x, dvdx_of_x, s_L, d_M, strain, out):
    """-H at every node straight from padded x/y differences.

    Same arithmetic as computing the four one-sided arrays and calling
    :func:`assemble_grid`; the y-derivatives are built one row at a time.
    """
    n_x, n_y = out.shape
    pm = np.empty((n_x, n_y))
    pp = np.empty((n_x, n_y))
    qm = np.empty(n_y)
    qp = np.empty(n_y)
    if weno:
        weno_axis0(dx, eps, pm, pp)
    else:
        first_order_axis0(dx, pm, pp)
    bx_max = 0.0
    by_max = 0.0
    for i in range(n_x):
        if weno:
            weno_row(dy[i], eps, qm, qp)
        else:
            for j in range(n_y):
                qm[j] = dy[i, j + PAD]
                qp[j] = dy[i, j + PAD + 1]
        v = v_of_x[i]
        dvdx = dvdx_of_x[i]
        for j in range(n_y):
            u = u_of_y[j]
            c = d_M * (dudy_of_y[j] + dvdx)
            out[i, j] = -numerical_hamiltonian(pm[i, j], pp[i, j], qm[j], qp[j], u, v, s_L,
                                               0.0, 0.0, c, strain)
            bx, by = advective_bounds(u, v, s_L, 0.0, 0.0, c, strain)
            if bx > bx_max:
                bx_max = bx
            if by > by_max:
                by_max = by
    return bx_max, by_max
