"""Single-run measurement, parameter sweeps, regime classification, output."""

from __future__ import annotations

import enum
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .config import ADAPTIVE_RTOL, RunSpec, SweepAxis, SweepSpec, format_config
from .diagnostics import (
    DiagnosticsError, FrontHistory, SpeedReport, area_behind_front, detect_locking,
    estimate_speed, front_position, speed_record,
)
from .grid import write_checkpoint
from .flow import FlowKind
from .integrator import NumericalError, RunState, Solver, advance, initial_state

log = logging.getLogger(__name__)

COMPLETE_FRACTION = 0.99


class Regime(str, enum.Enum):
    COMPLETE = "complete"
    INCOMPLETE = "incomplete"
    QUENCHED = "quenched"


def classify_regime(report: SpeedReport, area_behind_front: float) -> Regime:
    if report.quenched:
        return Regime.QUENCHED
    if area_behind_front >= COMPLETE_FRACTION:
        return Regime.COMPLETE
    return Regime.INCOMPLETE


@dataclass
class RunResult:
    spec: RunSpec
    report: SpeedReport
    regime: Regime
    area_behind: float
    history: FrontHistory
    final: RunState = field(repr=False)


class _Recorder:
    def __init__(self, history: FrontHistory, checkpoint_dir: Path | None = None, every: int = 0):
        self.history = history
        self.checkpoint_dir = checkpoint_dir
        self.every = every
        self.calls = 0
        self.written = 0

    def __call__(self, state: RunState) -> None:
        self.history.append(state.t, front_position(state.field))
        if self.checkpoint_dir is not None and self.every and self.calls % self.every == 0:
            write_checkpoint(state.field, self.checkpoint_dir / f"field_{self.written:04d}.txt", state.t)
            self.written += 1
        self.calls += 1


def _quench_eps(spec: RunSpec) -> float:
    m = spec.measure
    return m.quench_eps if m.quench_eps is not None else 0.01 * spec.solver.s_L


def measure(spec: RunSpec, checkpoint_dir: str | Path | None = None, snapshots: int = 0) -> RunResult:
    """Simulate, fit s_T and classify; doubles t_end until the slope settles if adaptive."""
    cfg = spec.solver
    m = spec.measure
    t_target = cfg.t_end
    if m.periods is not None and cfg.flow.period is not None:
        t_target = m.periods * cfg.flow.period
    hist = FrontHistory(
        flow_period=cfg.flow.period,
        metadata={"config_digest": cfg.digest(), "h_x": repr(cfg.grid.h_x), "config": format_config(spec)},
    )
    every = 0
    if checkpoint_dir is not None and snapshots > 0:
        checkpoint_dir = Path(checkpoint_dir)
        checkpoint_dir.mkdir(parents=True, exist_ok=True)
        samples = int(round(t_target / cfg.sample_interval))
        every = max(1, samples // snapshots)
    recorder = _Recorder(hist, checkpoint_dir, every)
    eps = _quench_eps(spec)

    solver = Solver(cfg)
    state = initial_state(cfg)
    recorder(state)
    state = advance(cfg, state, t_target, [recorder], solver)
    report = estimate_speed(hist, eps, m.window_frac)
    while m.adaptive and t_target < m.t_max:
        t_target = min(2.0 * t_target, m.t_max)
        state = advance(cfg, state, t_target, [recorder], solver)
        new = estimate_speed(hist, eps, m.window_frac)
        settled = abs(new.s_T - report.s_T) < ADAPTIVE_RTOL * abs(new.s_T)
        both_stalled = max(new.s_T, report.s_T) < eps
        log.debug("t_end=%g s_T=%.6g (previous %.6g)", t_target, new.s_T, report.s_T)
        report = new
        if settled or both_stalled:
            break

    if cfg.flow.kind is FlowKind.UNSTEADY:
        tol = m.lock_tol if m.lock_tol is not None else 2.0 * cfg.grid.h_x
        report.locking = detect_locking(hist, cfg.flow.omega, m.lock_N_max, m.lock_M_max, tol, m.window_frac)
    X = hist.samples[-1][1]
    area = area_behind_front(state.field, X)
    return RunResult(spec, report, classify_regime(report, area), area, hist, state)


@dataclass
class SweepRow:
    value: float
    report: SpeedReport | None = None
    regime: Regime | None = None
    area_behind: float | None = None
    t_final: float | None = None
    error: str | None = None


@dataclass
class SweepResult:
    axis: SweepAxis
    rows: list[SweepRow]
    provenance: dict


def _sweep_point(args) -> SweepRow:
    spec, value = args
    try:
        r = measure(spec)
    except (NumericalError, DiagnosticsError) as e:
        return SweepRow(value, error=f"{type(e).__name__}: {e}")
    return SweepRow(value, r.report, r.regime, r.area_behind, r.history.samples[-1][0])


def provenance(spec: SweepSpec) -> dict:
    cfg = spec.base.solver
    return {
        "code_version": __version__,
        "axis": spec.axis.value,
        "values": ",".join(f"{v:.17g}" for v in spec.values),
        "base_config": format_config(spec.base),
        "base_digest": cfg.digest(),
        "scheme": f"{cfg.scheme} (jiang-shu weno eps=1e-06)" if cfg.scheme == "weno5" else cfg.scheme,
        "time_stepping": f"tvd-rk3 cfl={cfg.cfl_number:.17g}",
    }


def run_sweep(spec: SweepSpec) -> SweepResult:
    jobs = [(spec.base.at(spec.axis, v), v) for v in spec.values]
    if spec.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(spec.workers, len(jobs))) as pool:
            rows = list(pool.map(_sweep_point, jobs))
    else:
        rows = [_sweep_point(j) for j in jobs]
    return SweepResult(spec.axis, rows, provenance(spec))


def _row_record(result: SweepResult, row: SweepRow) -> str:
    base = _parse_base(result.provenance["base_config"])
    A = row.value if result.axis is SweepAxis.FLOW_INTENSITY else base["A"]
    omega = row.value if result.axis is SweepAxis.FREQUENCY else base["omega"]
    steady = base["flow"] == "steady"
    return speed_record(A, None if steady else omega, base["d_M"], base["model"], row.report, row.error)


def _parse_base(text: str) -> dict:
    kv = dict(tok.split("=", 1) for tok in text.split())
    return {"A": float(kv["A"]), "omega": float(kv["omega"]), "d_M": float(kv["d_M"]),
            "model": kv["model"], "flow": kv["flow"]}


def emit_results(result: SweepResult, path: str | Path) -> list[Path]:
    """Write the record file, a two-column plot table and a JSON summary.

    Returns the paths written. Rows that failed appear as ``# error`` lines.
    """
    path = Path(path)
    header = ["# gfront sweep results"] + [f"# {k}: {v}" for k, v in result.provenance.items()]
    lines = header + ["A,omega,d_M,model,s_T,stderr,quenched,N,M"]
    table = header + [f"{result.axis.value},s_T"]
    for row in result.rows:
        if row.report is None:
            lines.append(f"# error at {result.axis.value}={row.value:.17g}: {row.error}")
            continue
        lines.append(_row_record(result, row))
        table.append(f"{row.value:.17g},{row.report.s_T:.17g}")
    summary = {
        "axis": result.axis.value,
        "provenance": result.provenance,
        "rows": [_row_json(r) for r in result.rows],
    }
    table_path = path.with_name(path.stem + "_table.csv")
    json_path = path.with_name(path.stem + ".json")
    path.write_text("\n".join(lines) + "\n")
    table_path.write_text("\n".join(table) + "\n")
    json_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return [path, table_path, json_path]


def _row_json(row: SweepRow) -> dict:
    d = {"value": row.value, "error": row.error, "t_final": row.t_final,
         "area_behind": row.area_behind, "regime": row.regime.value if row.regime else None}
    if row.report is not None:
        rep = asdict(row.report)
        rep["locking"] = list(row.report.locking) if row.report.locking else None
        rep["window"] = list(row.report.window)
        d["report"] = rep
    return d


def regime_sequence_ok(regimes: list[Regime]) -> bool:
    """True when the sequence reads complete* incomplete* quenched*."""
    order = {Regime.COMPLETE: 0, Regime.INCOMPLETE: 1, Regime.QUENCHED: 2}
    ranks = [order[r] for r in regimes]
    return all(a <= b for a, b in zip(ranks, ranks[1:]))
