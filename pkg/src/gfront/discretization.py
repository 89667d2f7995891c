"""One-sided derivatives of the total field: WENO5 and a first-order oracle.

Both schemes work on divided differences of the total field. Differences of
an affine-periodic field are plainly periodic, so the x-term enters only as
the constant ``slope_x`` added to every x-difference.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .grid import Grid, ScalarField2D

EPS_WENO = 1e-6
PAD = 3

SCHEME_WENO5 = "weno5"
SCHEME_FIRST_ORDER = "first_order"
SCHEMES = (SCHEME_WENO5, SCHEME_FIRST_ORDER)


@dataclass(frozen=True)
class OneSidedGradients:
    p_minus: float
    p_plus: float
    q_minus: float
    q_plus: float


@dataclass
class GradientField:
    grid: Grid
    p_minus: np.ndarray
    p_plus: np.ndarray
    q_minus: np.ndarray
    q_plus: np.ndarray

    def at(self, i: int, j: int) -> OneSidedGradients:
        return OneSidedGradients(
            float(self.p_minus[i, j]), float(self.p_plus[i, j]),
            float(self.q_minus[i, j]), float(self.q_plus[i, j]),
        )


@njit(cache=True, inline="always", error_model="numpy")
def weno5(v1, v2, v3, v4, v5, eps):
    """Jiang-Shu WENO5 combination of five consecutive divided differences.

    Ordered so that v3 is the difference adjacent to the node on the upwind
    side (pass the reversed sequence for the right-biased derivative).
    """
    phi1 = v1 / 3.0 - 7.0 * v2 / 6.0 + 11.0 * v3 / 6.0
    phi2 = -v2 / 6.0 + 5.0 * v3 / 6.0 + v4 / 3.0
    phi3 = v3 / 3.0 + 5.0 * v4 / 6.0 - v5 / 6.0

    s1 = 13.0 / 12.0 * (v1 - 2.0 * v2 + v3) ** 2 + 0.25 * (v1 - 4.0 * v2 + 3.0 * v3) ** 2
    s2 = 13.0 / 12.0 * (v2 - 2.0 * v3 + v4) ** 2 + 0.25 * (v2 - v4) ** 2
    s3 = 13.0 / 12.0 * (v3 - 2.0 * v4 + v5) ** 2 + 0.25 * (3.0 * v3 - 4.0 * v4 + v5) ** 2

    a1 = 0.1 / (s1 + eps) ** 2
    a2 = 0.6 / (s2 + eps) ** 2
    a3 = 0.3 / (s3 + eps) ** 2
    return (a1 * phi1 + a2 * phi2 + a3 * phi3) / (a1 + a2 + a3)


@njit(cache=True, error_model="numpy")
def padded_differences(u, h, slope):
    """Backward differences along axis 0 with PAD ghost rows each side.

    Row ``r`` of the result holds ``(G[i] - G[i-1]) / h`` for ``i = r - PAD``.
    """
    n, m = u.shape
    d = np.empty((n + 2 * PAD, m))
    for r in range(n + 2 * PAD):
        i = (r - PAD) % n
        im = (i - 1) % n
        for j in range(m):
            d[r, j] = (u[i, j] - u[im, j]) / h + slope
    return d


@njit(cache=True, inline="always", error_model="numpy")
def weno5_pair(v1, v2, v3, v4, v5, eps):
    """Both reconstructions sharing one five-difference window.

    Returns ``(weno5(v1..v5), weno5(v5..v1))``: the left-biased value at the
    node right of v3's left end and the right-biased value one node earlier.
    The smoothness indicators are the same set, only the weights swap.
    """
    b1 = 13.0 / 12.0 * (v1 - 2.0 * v2 + v3) ** 2 + 0.25 * (v1 - 4.0 * v2 + 3.0 * v3) ** 2
    b2 = 13.0 / 12.0 * (v2 - 2.0 * v3 + v4) ** 2 + 0.25 * (v2 - v4) ** 2
    b3 = 13.0 / 12.0 * (v3 - 2.0 * v4 + v5) ** 2 + 0.25 * (3.0 * v3 - 4.0 * v4 + v5) ** 2
    g1 = 1.0 / (b1 + eps) ** 2
    g2 = 1.0 / (b2 + eps) ** 2
    g3 = 1.0 / (b3 + eps) ** 2

    f1 = v1 / 3.0 - 7.0 * v2 / 6.0 + 11.0 * v3 / 6.0
    f2 = -v2 / 6.0 + 5.0 * v3 / 6.0 + v4 / 3.0
    f3 = v3 / 3.0 + 5.0 * v4 / 6.0 - v5 / 6.0
    a1, a2, a3 = 0.1 * g1, 0.6 * g2, 0.3 * g3
    left = (a1 * f1 + a2 * f2 + a3 * f3) / (a1 + a2 + a3)

    r1 = v5 / 3.0 - 7.0 * v4 / 6.0 + 11.0 * v3 / 6.0
    r2 = -v4 / 6.0 + 5.0 * v3 / 6.0 + v2 / 3.0
    r3 = v3 / 3.0 + 5.0 * v2 / 6.0 - v1 / 6.0
    c1, c3 = 0.1 * g3, 0.3 * g1
    right = (c1 * r1 + a2 * r2 + c3 * r3) / (c1 + a2 + c3)
    return left, right


@njit(cache=True, error_model="numpy")
def weno_axis0(d, eps, out_minus, out_plus):
    """WENO5 one-sided derivatives along axis 0 from padded differences."""
    n = out_minus.shape[0]
    m = out_minus.shape[1]
    for r in range(PAD, n + PAD + 1):
        i = r - PAD
        for j in range(m):
            left, right = weno5_pair(d[r - 2, j], d[r - 1, j], d[r, j], d[r + 1, j], d[r + 2, j], eps)
            if i < n:
                out_minus[i, j] = left
            if i > 0:
                out_plus[i - 1, j] = right


@njit(cache=True, error_model="numpy")
def weno_row(d, eps, out_minus, out_plus):
    """1D version of :func:`weno_axis0` for one padded row."""
    n = out_minus.shape[0]
    for r in range(PAD, n + PAD + 1):
        i = r - PAD
        left, right = weno5_pair(d[r - 2], d[r - 1], d[r], d[r + 1], d[r + 2], eps)
        if i < n:
            out_minus[i] = left
        if i > 0:
            out_plus[i - 1] = right


@njit(cache=True, error_model="numpy")
def first_order_axis0(d, out_minus, out_plus):
    n = out_minus.shape[0]
    m = out_minus.shape[1]
    for i in range(n):
        r = i + PAD
        for j in range(m):
            out_minus[i, j] = d[r, j]
            out_plus[i, j] = d[r + 1, j]


def _one_sided(field: ScalarField2D, scheme: str, eps: float) -> GradientField:
    grid = field.grid
    u = field.values
    out = [np.empty(grid.shape) for _ in range(4)]
    ut = np.ascontiguousarray(u.T)
    qm_t = np.empty((grid.n_y, grid.n_x))
    qp_t = np.empty((grid.n_y, grid.n_x))
    dx = padded_differences(u, grid.h_x, field.slope_x)
    dy = padded_differences(ut, grid.h_y, 0.0)
    if scheme == SCHEME_WENO5:
        weno_axis0(dx, eps, out[0], out[1])
        weno_axis0(dy, eps, qm_t, qp_t)
    elif scheme == SCHEME_FIRST_ORDER:
        first_order_axis0(dx, out[0], out[1])
        first_order_axis0(dy, qm_t, qp_t)
    else:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    out[2][:] = qm_t.T
    out[3][:] = qp_t.T
    return GradientField(grid, *out)


def weno5_one_sided(field: ScalarField2D, eps: float = EPS_WENO) -> GradientField:
    return _one_sided(field, SCHEME_WENO5, eps)


def first_order_one_sided(field: ScalarField2D) -> GradientField:
    return _one_sided(field, SCHEME_FIRST_ORDER, EPS_WENO)


def one_sided(field: ScalarField2D, scheme: str = SCHEME_WENO5) -> GradientField:
    return _one_sided(field, scheme, EPS_WENO)


@njit(cache=True, error_model="numpy")
def padded_differences_axis1(u, h, slope):
    """Backward differences along axis 1 with PAD ghost columns each side."""
    n, m = u.shape
    d = np.empty((n, m + 2 * PAD))
    for i in range(n):
        for c in range(m + 2 * PAD):
            j = (c - PAD) % m
            jm = (j - 1) % m
            d[i, c] = (u[i, j] - u[i, jm]) / h + slope
    return d
