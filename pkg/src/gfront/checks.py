"""Invariant and property suites shared by ``gfront check`` and the tests.

Each suite returns a :class:`CheckResult`; nothing here raises on failure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import hamiltonian as ham
from .discretization import first_order_one_sided, weno5_one_sided
from .flow import FlowKind, FlowSpec, velocity_profiles
from .grid import ScalarField2D, make_grid
from .integrator import SolverConfig, run
from .diagnostics import FrontHistory, estimate_speed, front_position


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


# one-sided arguments and the increment direction that must not lower H
ARG_DIRECTIONS = ((0, +1), (1, -1), (2, +1), (3, -1))


def sample_quadruples(rng: np.random.Generator, n: int, scale: float = 2.0) -> np.ndarray:
    """Random (p-, p+, q-, q+) with a share of exact zeros and near-zero values."""
    P = rng.uniform(-scale, scale, (n, 4))
    kind = rng.integers(0, 10, (n, 4))
    P[kind == 0] = 0.0
    P[kind == 1] *= 1e-9
    return P


def sample_increments(rng: np.random.Generator, n: int, scale: float = 2.0) -> np.ndarray:
    d = rng.uniform(0.0, scale, n)
    tiny = rng.integers(0, 5, n) == 0
    d[tiny] *= 1e-8
    return d


def sample_coefficients(rng: np.random.Generator, n: int, scale: float = 2.0) -> np.ndarray:
    c = rng.uniform(-scale, scale, n)
    c[rng.integers(0, 10, n) == 0] = 0.0
    return c


def _terms(rng: np.random.Generator, n: int):
    """Sub-term name -> (vectorised callable of (P, params), params)."""
    u = sample_coefficients(rng, n)
    v = sample_coefficients(rng, n)
    s_L = rng.uniform(0.1, 2.0, n)
    a = sample_coefficients(rng, n)
    b = sample_coefficients(rng, n)
    c = sample_coefficients(rng, n)

    def vec(f):
        return np.vectorize(f, otypes=[float])

    up, god = vec(ham.upwind_advection), vec(ham.godunov_laminar)
    s1, s2, s3 = vec(ham.osher_sethian_s1), vec(ham.osher_sethian_s2), vec(ham.roe_s3)
    full = vec(ham.numerical_hamiltonian)
    return {
        "upwind": lambda P: up(*P.T, u, v),
        "godunov": lambda P: god(*P.T, s_L),
        "s1": lambda P: s1(*P.T, a),
        "s2": lambda P: s2(*P.T, b),
        "s3": lambda P: s3(*P.T, c),
        "full": lambda P: full(*P.T, u, v, s_L, a, b, c, True),
    }


def monotonicity_violations(n: int = 100_000, seed: int = 0, atol: float = 1e-12) -> dict[str, int]:
    """Count weak-monotonicity violations per sub-term over random samples."""
    rng = np.random.default_rng(seed)
    P = sample_quadruples(rng, n)
    terms = _terms(rng, n)
    incs = [sample_increments(rng, n) for _ in ARG_DIRECTIONS]
    out = {}
    for name, f in terms.items():
        base = f(P)
        count = 0
        for (k, direction), d in zip(ARG_DIRECTIONS, incs):
            Q = P.copy()
            Q[:, k] += d
            diff = direction * (f(Q) - base)
            count += int(np.count_nonzero(diff < -atol * (1.0 + np.abs(base))))
        out[name] = count
    return out


def consistency_error(n: int = 10_000, seed: int = 1) -> float:
    rng = np.random.default_rng(seed)
    p, q = rng.uniform(-3, 3, (2, n))
    u, v, a, b, c = rng.uniform(-3, 3, (5, n))
    s_L = rng.uniform(0.1, 2.0, n)
    full = np.vectorize(ham.numerical_hamiltonian, otypes=[float])
    got = full(p, p, q, q, u, v, s_L, a, b, c, True)
    want = ham.analytic_hamiltonian(p, q, u, v, s_L, a, b, c)
    return float(np.max(np.abs(got - want)))


def observed_orders(sizes=(64, 128, 256), amplitude: float = 0.1):
    """Max-norm orders of D-x for G = x + amplitude*sin(x) + amplitude*cos(y)."""
    res = {"weno5": [], "first_order": []}
    for n in sizes:
        grid = make_grid(n, n)
        x, y = grid.x_nodes(), grid.y_nodes()
        u = amplitude * np.sin(x)[:, None] + amplitude * np.cos(y)[None, :]
        f = ScalarField2D(grid, u)
        exact_p = (1.0 + amplitude * np.cos(x))[:, None]
        exact_q = (-amplitude * np.sin(y))[None, :]
        for name, scheme in (("weno5", weno5_one_sided), ("first_order", first_order_one_sided)):
            g = scheme(f)
            err = max(np.abs(g.p_minus - exact_p).max(), np.abs(g.p_plus - exact_p).max(),
                      np.abs(g.q_minus - exact_q).max(), np.abs(g.q_plus - exact_q).max())
            res[name].append(err)
    orders = {}
    for name, errs in res.items():
        e = np.array(errs)
        orders[name] = list(np.log2(e[:-1] / e[1:]))
    return orders, res


def jacobian_error(n: int = 1000, seed: int = 2, step: float = 1e-5) -> float:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for kind in FlowKind:
        spec = FlowSpec(kind, rng.uniform(0.5, 5.0), rng.uniform(0.5, 4.0))
        s = rng.uniform(0, 2 * math.pi, n)
        t = rng.uniform(0, 10, n)
        w, dw = velocity_profiles(spec, s, t)
        fd = (velocity_profiles(spec, s + step, t)[0] - velocity_profiles(spec, s - step, t)[0]) / (2 * step)
        rel = np.abs(fd - dw) / np.maximum(1.0, np.abs(dw))
        worst = max(worst, float(rel.max()))
    return worst


def planar_front_error(n: int = 32, t_end: float = 2.0) -> tuple[float, float]:
    cfg = SolverConfig(grid=make_grid(n, n), t_end=t_end, sample_dt=0.1)
    hist = FrontHistory()
    run(cfg, [lambda st: hist.append(st.t, front_position(st.field))])
    err = float(np.max(np.abs(hist.positions - hist.times)))
    return err, estimate_speed(hist).s_T


def run_checks(samples: int = 100_000) -> list[CheckResult]:
    results = []
    err = consistency_error()
    results.append(CheckResult("consistency", err <= 1e-12, f"max |H_num(p,p,q,q) - H(p,q)| = {err:.3g}"))
    viol = monotonicity_violations(samples)
    for name, count in viol.items():
        results.append(CheckResult(f"monotonicity[{name}]", count == 0,
                                   f"{count} violations over {samples} samples x 4 arguments"))
    orders, _ = observed_orders()
    results.append(CheckResult("weno5 order", min(orders["weno5"]) >= 4.5,
                               "orders " + ", ".join(f"{o:.2f}" for o in orders["weno5"])))
    results.append(CheckResult("first-order oracle order", all(abs(o - 1) < 0.1 for o in orders["first_order"]),
                               "orders " + ", ".join(f"{o:.2f}" for o in orders["first_order"])))
    jerr = jacobian_error()
    results.append(CheckResult("flow jacobian", jerr <= 1e-8, f"max relative FD gap {jerr:.3g}"))
    perr, s_T = planar_front_error()
    results.append(CheckResult("planar front", perr <= 1e-8 and abs(s_T - 1) <= 1e-6,
                               f"max |X(t) - t| = {perr:.3g}, s_T = {s_T:.12g}"))
    return results
