"""TVD-RK3 time marching of the affine-periodic G-equation problem.

The stored unknown is the periodic part u of G = x + u, starting from
u = 0 (planar front at x = 0). Only u evolves, since the x-term is
time-independent.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from . import discretization as disc
from .flow import FlowKind, FlowSpec, velocity_profiles
from .grid import Grid, ScalarField2D, make_grid
from .hamiltonian import fused_rhs

DEFAULT_CFL = 0.5
DEFAULT_SAMPLE_DT = 0.25


class NumericalError(RuntimeError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    grid: Grid = field(default_factory=lambda: make_grid(256, 256))
    flow: FlowSpec = field(default_factory=FlowSpec)
    s_L: float = 1.0
    d_M: float = 0.0
    strain_enabled: bool = False
    cfl_number: float = DEFAULT_CFL
    t_end: float = 10.0
    snapshot_stride: int = 0
    scheme: str = disc.SCHEME_WENO5
    sample_dt: float = DEFAULT_SAMPLE_DT

    def __post_init__(self):
        if not 0.0 < self.cfl_number <= 1.0:
            raise ValueError(f"cfl_number must lie in (0, 1], got {self.cfl_number}")
        if not self.t_end > 0.0:
            raise ValueError(f"t_end must be > 0, got {self.t_end}")
        if not self.s_L > 0.0:
            raise ValueError(f"s_L must be > 0, got {self.s_L}")
        if not self.d_M >= 0.0:
            raise ValueError(f"d_M must be >= 0, got {self.d_M}")
        if self.scheme not in disc.SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if not self.sample_dt > 0.0:
            raise ValueError(f"sample_dt must be > 0, got {self.sample_dt}")
        if self.snapshot_stride < 0:
            raise ValueError("snapshot_stride must be >= 0")

    @property
    def model(self) -> str:
        return "strain" if self.strain_enabled else "inviscid"

    @property
    def sample_interval(self) -> float:
        """Observer sampling interval; divides the flow period exactly when unsteady."""
        period = self.flow.period
        if period is None:
            return self.sample_dt
        return period / math.ceil(period / self.sample_dt - 1e-9)

    def with_(self, **changes) -> "SolverConfig":
        return replace(self, **changes)

    def describe(self) -> dict:
        d = asdict(self)
        d["grid"] = {"n_x": self.grid.n_x, "n_y": self.grid.n_y}
        d["flow"] = {"kind": self.flow.kind.value, "A": self.flow.A, "omega": self.flow.omega}
        d["weno_eps"] = disc.EPS_WENO
        d["weno_flavor"] = "jiang-shu"
        return d

    def digest(self) -> str:
        text = repr(sorted(_flatten(self.describe()).items()))
        return hashlib.sha256(text.encode()).hexdigest()[:16]


def _flatten(d: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in d.items():
        key = prefix + k
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        else:
            out[key] = v
    return out


@dataclass
class RunState:
    field: ScalarField2D
    t: float = 0.0
    step: int = 0


Observer = Callable[[RunState], None]


class _FlowTables:
    """Node-sampled velocity profiles for the separable cellular flows."""

    def __init__(self, config: SolverConfig):
        self.spec = config.flow
        self.x = config.grid.x_nodes()
        self.y = config.grid.y_nodes()
        self._t = None

    def at(self, t: float):
        if self._t != t:
            u, dudy = velocity_profiles(self.spec, self.y, t)
            v, dvdx = velocity_profiles(self.spec, self.x, t)
            self._cache = (np.ascontiguousarray(u), np.ascontiguousarray(dudy),
                           np.ascontiguousarray(v), np.ascontiguousarray(dvdx))
            self._t = t
        return self._cache


class Solver:
    """Holds per-run scratch state; ``rhs``/``step`` are the hot path."""

    def __init__(self, config: SolverConfig):
        self.config = config
        self._tables = _FlowTables(config)

    def rhs(self, field: ScalarField2D, t: float):
        cfg = self.config
        g = cfg.grid
        u = field.values
        dx = disc.padded_differences(u, g.h_x, field.slope_x)
        dy = disc.padded_differences_axis1(u, g.h_y, 0.0)
        out = np.empty(g.shape)
        uy, dudy, vx, dvdx = self._tables.at(t)
        bx, by = fused_rhs(dx, dy, cfg.scheme == disc.SCHEME_WENO5, disc.EPS_WENO,
                           uy, dudy, vx, dvdx, cfg.s_L, cfg.d_M, cfg.strain_enabled, out)
        if not np.isfinite(out).all():
            i, j = np.argwhere(~np.isfinite(out))[0]
            raise NumericalError(f"non-finite Hamiltonian at node ({i}, {j}), t={t!r}")
        return out, bx, by

    def step(self, state: RunState, dt: float, first_rhs=None) -> RunState:
        if not dt > 0.0:
            raise ValueError(f"dt must be > 0, got {dt}")
        f0 = state.field
        u0 = f0.values
        t0 = state.t
        L0 = first_rhs if first_rhs is not None else self.rhs(f0, t0)[0]
        u1 = u0 + dt * L0
        L1 = self.rhs(_like(f0, u1), t0 + dt)[0]
        u2 = 0.75 * u0 + 0.25 * (u1 + dt * L1)
        L2 = self.rhs(_like(f0, u2), t0 + 0.5 * dt)[0]
        u3 = u0 / 3.0 + 2.0 / 3.0 * (u2 + dt * L2)
        if not np.isfinite(u3).all():
            i, j = np.argwhere(~np.isfinite(u3))[0]
            raise NumericalError(f"non-finite value at node ({i}, {j}) after step {state.step + 1}")
        return RunState(_like(f0, u3), t0 + dt, state.step + 1)


def _like(f: ScalarField2D, values: np.ndarray) -> ScalarField2D:
    return ScalarField2D(f.grid, values, f.x_shift_per_period)


def rhs(field: ScalarField2D, t: float, config: SolverConfig):
    """Time derivative of the periodic part, ``-H``, and grid-max advective bounds."""
    return Solver(config).rhs(field, t)


def cfl_step(bounds_x: float, bounds_y: float, grid: Grid, cfl_number: float) -> float:
    if bounds_x < 0 or bounds_y < 0:
        raise ValueError("advective bounds must be >= 0")
    rate = bounds_x / grid.h_x + bounds_y / grid.h_y
    if rate == 0.0:
        raise NumericalError("both advective bounds are zero; the time step is unbounded")
    return cfl_number / rate


def tvd_rk3_step(state: RunState, dt: float, config: SolverConfig) -> RunState:
    return Solver(config).step(state, dt)


def initial_state(config: SolverConfig) -> RunState:
    return RunState(ScalarField2D.zeros(config.grid), 0.0, 0)


class _Schedule:
    """Observer times k*interval (computed by multiplication, never accumulated)."""

    def __init__(self, interval: float, t_end: float, t_start: float = 0.0):
        self.interval = interval
        self.t_end = t_end
        self.k = int(math.floor(t_start / interval + 1e-9)) + 1

    def next_time(self) -> float:
        return min(self.k * self.interval, self.t_end)

    def advance(self):
        self.k += 1


def advance(config: SolverConfig, state: RunState, t_end: float,
            observers: Sequence[Observer] = (), solver: Solver | None = None) -> RunState:
    """March ``state`` to ``t_end``, calling observers at scheduled times."""
    solver = solver or Solver(config)
    sched = _Schedule(config.sample_interval, t_end, state.t)
    stride = config.snapshot_stride
    while state.t < t_end:
        L0, bx, by = solver.rhs(state.field, state.t)
        dt = cfl_step(bx, by, config.grid, config.cfl_number)
        t_next = sched.next_time()
        hit = state.t + dt >= t_next
        if hit:
            dt = t_next - state.t
        state = solver.step(state, dt, first_rhs=L0)
        if hit:
            state.t = t_next
            sched.advance()
        if hit or (stride and state.step % stride == 0):
            for obs in observers:
                obs(state)
    return state


def run(config: SolverConfig, observers: Sequence[Observer] = ()) -> RunState:
    state = initial_state(config)
    for obs in observers:
        obs(state)
    return advance(config, state, config.t_end, observers)
