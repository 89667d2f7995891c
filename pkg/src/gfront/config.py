"""Flat ``key=value`` configuration documents.

Pairs may be separated by whitespace or newlines; ``#`` starts a comment.
A document containing ``sweep=`` describes a parameter sweep, otherwise a
single run. Example::

    model=strain flow=steady A=12 d_M=0.2
    grid=128 t_end=20
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .diagnostics import DEFAULT_M_MAX, DEFAULT_N_MAX, DEFAULT_QUENCH_EPS, DEFAULT_WINDOW_FRAC
from .discretization import SCHEMES
from .flow import FlowKind, FlowSpec
from .grid import GridError, make_grid
from .integrator import DEFAULT_CFL, DEFAULT_SAMPLE_DT, SolverConfig

DEFAULT_GRID = 256
DEFAULT_T_END = 10.0
DEFAULT_T_MAX = 400.0
ADAPTIVE_RTOL = 0.005


class ConfigError(ValueError):
    pass


class SweepAxis(str, enum.Enum):
    FLOW_INTENSITY = "A"
    FREQUENCY = "omega"


@dataclass(frozen=True)
class MeasureConfig:
    """How a run is turned into a speed report."""

    adaptive: bool = True
    t_max: float = DEFAULT_T_MAX
    quench_eps: float | None = None  # None -> 0.01 * s_L
    window_frac: float = DEFAULT_WINDOW_FRAC
    lock_N_max: int = DEFAULT_N_MAX
    lock_M_max: int = DEFAULT_M_MAX
    lock_tol: float | None = None  # None -> 2 * h_x
    periods: float | None = None  # unsteady only: run length in flow periods, replaces t_end


@dataclass(frozen=True)
class RunSpec:
    solver: SolverConfig = field(default_factory=SolverConfig)
    measure: MeasureConfig = field(default_factory=MeasureConfig)

    def at(self, axis: SweepAxis, value: float) -> "RunSpec":
        flow = self.solver.flow
        flow = replace(flow, A=value) if axis is SweepAxis.FLOW_INTENSITY else replace(flow, omega=value)
        return replace(self, solver=self.solver.with_(flow=flow))


@dataclass(frozen=True)
class SweepSpec:
    axis: SweepAxis
    values: tuple[float, ...]
    base: RunSpec
    workers: int = 1

    def __post_init__(self):
        v = self.values
        if not v:
            raise ConfigError("sweep values are empty")
        if any(x < 0 for x in v):
            raise ConfigError("sweep values must be >= 0")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ConfigError("sweep values must be strictly increasing")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")


_KEYS = {
    "model", "flow", "A", "omega", "d_M", "s_L", "grid", "cfl", "t_end", "scheme",
    "sample_dt", "snapshot_stride", "adaptive", "t_max", "quench_eps", "window_frac",
    "lock_N_max", "lock_M_max", "lock_tol", "periods", "sweep", "values", "range", "workers",
}


def _tokens(text: str):
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0]
        for tok in line.split():
            if "=" not in tok:
                raise ConfigError(f"line {lineno}: expected key=value, got {tok!r}")
            key, value = tok.split("=", 1)
            yield lineno, key.strip(), value.strip()


def _number(lineno, key, value, kind=float):
    try:
        x = kind(value)
    except ValueError:
        raise ConfigError(f"line {lineno}: {key}={value!r} is not a valid {kind.__name__}") from None
    if kind is float and not math.isfinite(x):
        raise ConfigError(f"line {lineno}: {key} must be finite")
    return x


def _bool(lineno, key, value):
    v = value.lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"line {lineno}: {key}={value!r} is not a boolean")


def _grid(lineno, value):
    parts = value.lower().split("x")
    if len(parts) not in (1, 2):
        raise ConfigError(f"line {lineno}: grid={value!r}; use N or NxM")
    n = [_number(lineno, "grid", p, int) for p in parts]
    try:
        return make_grid(n[0], n[-1])
    except GridError as e:
        raise ConfigError(f"line {lineno}: {e}") from None


def _range_values(lineno, value):
    parts = value.split(":")
    if len(parts) != 3:
        raise ConfigError(f"line {lineno}: range={value!r}; use lo:hi:step")
    lo, hi, step = (_number(lineno, "range", p) for p in parts)
    if step <= 0 or hi < lo:
        raise ConfigError(f"line {lineno}: range needs lo <= hi and step > 0")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    # round to suppress lo + k*step accumulation noise in printed values
    return tuple(float(np.round(lo + k * step, 12)) for k in range(count))


def parse_config(text: str) -> RunSpec | SweepSpec:
    raw: dict[str, tuple[int, str]] = {}
    for lineno, key, value in _tokens(text):
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r} (first on line {raw[key][0]})")
        raw[key] = (lineno, value)

    def get(key, conv=float, default=None):
        if key not in raw:
            return default
        lineno, value = raw[key]
        if conv is bool:
            return _bool(lineno, key, value)
        return _number(lineno, key, value, conv)

    def where(key):
        return f"line {raw[key][0]}: " if key in raw else ""

    model = raw.get("model", (0, "inviscid"))[1]
    if model not in ("inviscid", "strain"):
        raise ConfigError(f"{where('model')}model must be inviscid or strain, got {model!r}")
    flow_kind = raw.get("flow", (0, "steady"))[1]
    if flow_kind not in ("steady", "unsteady"):
        raise ConfigError(f"{where('flow')}flow must be steady or unsteady, got {flow_kind!r}")
    scheme = raw.get("scheme", (0, SCHEMES[0]))[1]
    if scheme not in SCHEMES:
        raise ConfigError(f"{where('scheme')}scheme must be one of {SCHEMES}, got {scheme!r}")

    A = get("A", default=0.0)
    omega = get("omega", default=1.0)
    d_M = get("d_M", default=None)
    s_L = get("s_L", default=1.0)
    cfl = get("cfl", default=DEFAULT_CFL)
    t_end = get("t_end", default=DEFAULT_T_END)

    checks = [
        ("A", A >= 0, "A must be >= 0"),
        ("omega", omega > 0, "omega must be > 0"),
        ("d_M", d_M is None or d_M >= 0, "d_M must be >= 0"),
        ("s_L", s_L > 0, "s_L must be > 0"),
        ("cfl", 0 < cfl <= 1, "cfl must lie in (0, 1]"),
        ("t_end", t_end > 0, "t_end must be > 0"),
    ]
    for key, ok, msg in checks:
        if not ok:
            raise ConfigError(f"{where(key)}range error: {msg}")
    if model == "strain" and d_M is None:
        raise ConfigError("model=strain requires d_M")

    grid = _grid(*raw["grid"]) if "grid" in raw else make_grid(DEFAULT_GRID, DEFAULT_GRID)
    try:
        solver = SolverConfig(
            grid=grid,
            flow=FlowSpec(FlowKind(flow_kind), A, omega),
            s_L=s_L,
            d_M=d_M or 0.0,
            strain_enabled=model == "strain",
            cfl_number=cfl,
            t_end=t_end,
            snapshot_stride=get("snapshot_stride", int, 0),
            scheme=scheme,
            sample_dt=get("sample_dt", default=DEFAULT_SAMPLE_DT),
        )
        measure = MeasureConfig(
            adaptive=get("adaptive", bool, True),
            t_max=get("t_max", default=DEFAULT_T_MAX),
            quench_eps=get("quench_eps", default=None),
            window_frac=get("window_frac", default=DEFAULT_WINDOW_FRAC),
            lock_N_max=get("lock_N_max", int, DEFAULT_N_MAX),
            lock_M_max=get("lock_M_max", int, DEFAULT_M_MAX),
            lock_tol=get("lock_tol", default=None),
            periods=get("periods", default=None),
        )
    except ValueError as e:
        raise ConfigError(f"range error: {e}") from None
    if not 0 < measure.window_frac <= 1:
        raise ConfigError(f"{where('window_frac')}range error: window_frac must lie in (0, 1]")
    if measure.periods is not None:
        if flow_kind != "unsteady":
            raise ConfigError(f"{where('periods')}periods needs flow=unsteady")
        if not measure.periods > 0:
            raise ConfigError(f"{where('periods')}range error: periods must be > 0")
    if measure.t_max < t_end:
        raise ConfigError(f"{where('t_max')}range error: t_max must be >= t_end")
    spec = RunSpec(solver, measure)

    sweep_keys = [k for k in ("values", "range", "workers") if k in raw]
    if "sweep" not in raw:
        if sweep_keys:
            raise ConfigError(f"{where(sweep_keys[0])}{sweep_keys[0]} given without sweep=A|omega")
        return spec

    axis_name = raw["sweep"][1]
    try:
        axis = SweepAxis(axis_name)
    except ValueError:
        raise ConfigError(f"{where('sweep')}sweep axis must be A or omega, got {axis_name!r}") from None
    if axis is SweepAxis.FREQUENCY and flow_kind != "unsteady":
        raise ConfigError(f"{where('sweep')}an omega sweep needs flow=unsteady")
    if ("values" in raw) == ("range" in raw):
        raise ConfigError(f"{where('sweep')}sweep needs exactly one of values=... or range=lo:hi:step")
    if "values" in raw:
        lineno, value = raw["values"]
        values = tuple(_number(lineno, "values", v) for v in value.split(",") if v)
    else:
        values = _range_values(*raw["range"])
    if axis is SweepAxis.FREQUENCY and any(v <= 0 for v in values):
        raise ConfigError("omega sweep values must be > 0")
    return SweepSpec(axis, values, spec, get("workers", int, 1))


def format_config(spec: RunSpec) -> str:
    """Inverse of :func:`parse_config` for a single run (used for provenance)."""
    s, m = spec.solver, spec.measure
    items = [
        ("model", s.model), ("flow", s.flow.kind.value), ("A", s.flow.A), ("omega", s.flow.omega),
        ("d_M", s.d_M), ("s_L", s.s_L), ("grid", f"{s.grid.n_x}x{s.grid.n_y}"),
        ("cfl", s.cfl_number), ("t_end", s.t_end), ("scheme", s.scheme),
        ("sample_dt", s.sample_dt), ("snapshot_stride", s.snapshot_stride),
        ("adaptive", str(m.adaptive).lower()), ("t_max", m.t_max),
        ("window_frac", m.window_frac), ("lock_N_max", m.lock_N_max), ("lock_M_max", m.lock_M_max),
    ]
    if m.quench_eps is not None:
        items.append(("quench_eps", m.quench_eps))
    if m.lock_tol is not None:
        items.append(("lock_tol", m.lock_tol))
    if m.periods is not None:
        items.append(("periods", m.periods))
    return " ".join(f"{k}={v:.17g}" if isinstance(v, float) else f"{k}={v}" for k, v in items)
