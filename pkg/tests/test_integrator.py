import math

import numpy as np
import pytest

from gfront.diagnostics import FrontHistory, front_position
from gfront.flow import FlowKind, FlowSpec
from gfront.grid import ScalarField2D, make_grid
from gfront.integrator import (
    NumericalError, RunState, Solver, SolverConfig, cfl_step, initial_state, rhs, run,
    tvd_rk3_step,
)


def small(n=32, **kw):
    return SolverConfig(grid=make_grid(n, n), **kw)


def test_rhs_planar():
    cfg = small(s_L=1.3)
    L, bx, by = rhs(ScalarField2D.zeros(cfg.grid), 0.0, cfg)
    assert np.all(L == -1.3)
    assert bx == by == 1.3


def test_rhs_steady_origin_node():
    cfg = small(flow=FlowSpec(FlowKind.STEADY, 1.0))
    L, _, _ = rhs(ScalarField2D.zeros(cfg.grid), 0.0, cfg)
    assert L[0, 0] == pytest.approx(-2.0, abs=1e-15)


def test_rhs_zero_diffusivity_bitwise(rng):
    base = small(flow=FlowSpec(FlowKind.UNSTEADY, 3.0, 2.0))
    f = ScalarField2D(base.grid, 0.3 * rng.normal(size=base.grid.shape))
    a, _, _ = rhs(f, 0.7, base)
    b, _, _ = rhs(f, 0.7, base.with_(strain_enabled=True, d_M=0.0))
    np.testing.assert_array_equal(a, b)


def test_rhs_reports_nonfinite():
    cfg = small()
    vals = np.zeros(cfg.grid.shape)
    vals[4, 5] = np.nan
    with pytest.raises(NumericalError, match="node"):
        rhs(ScalarField2D(cfg.grid, vals), 0.0, cfg)


def test_cfl_examples():
    g = make_grid(256, 256)
    assert cfl_step(1.0, 1.0, g, 0.5) == pytest.approx(g.h_x / 4, rel=1e-15)
    assert cfl_step(0.0, 2.0, make_grid(8, 8), 1.0) == pytest.approx(math.pi / 8, rel=1e-15)
    with pytest.raises(NumericalError):
        cfl_step(0.0, 0.0, g, 0.5)


def test_rk3_planar_one_step():
    cfg = small()
    st = tvd_rk3_step(initial_state(cfg), 0.37, cfg)
    np.testing.assert_allclose(st.field.values, -0.37, rtol=1e-15)
    assert st.t == 0.37 and st.step == 1


class _Linear(Solver):
    """Frozen spatial operator L(u) = lam*u for the stability polynomial check."""

    def __init__(self, config, lam):
        super().__init__(config)
        self.lam = lam

    def rhs(self, field, t):
        return self.lam * field.values, 1.0, 1.0


@pytest.mark.parametrize("z", [-0.5, -1.0, 0.25, -2.5])
def test_rk3_stability_polynomial(z):
    cfg = small(8)
    lam = -3.0 if z < 0 else 3.0
    dt = z / lam
    st = RunState(ScalarField2D(cfg.grid, np.ones(cfg.grid.shape)))
    out = _Linear(cfg, lam).step(st, dt)
    want = 1 + z + z * z / 2 + z ** 3 / 6
    np.testing.assert_allclose(out.field.values, want, rtol=1e-14)


def test_rk3_time_order():
    # fixed fine grid, smooth unsteady forcing: step-restricted error at order ~3
    cfg = small(32, flow=FlowSpec(FlowKind.UNSTEADY, 0.5, 3.0))
    solver = Solver(cfg)

    def march(dt, T=0.5):
        st = initial_state(cfg)
        for _ in range(int(round(T / dt))):
            st = solver.step(st, dt)
        return st.field.values

    ref = march(0.5 / 512)
    errs = [np.abs(march(0.5 / n) - ref).max() for n in (8, 16, 32)]
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert orders.min() >= 2.7, (errs, orders)


def test_run_planar_exact():
    cfg = small(t_end=10.0)
    hist = FrontHistory()
    final = run(cfg, [lambda s: hist.append(s.t, front_position(s.field))])
    np.testing.assert_allclose(final.field.values, -10.0, rtol=1e-13)
    assert final.t == 10.0
    assert np.abs(hist.positions - hist.times).max() < 1e-8


def test_observer_times_exact():
    cfg = small(flow=FlowSpec(FlowKind.UNSTEADY, 1.0, 3.0), t_end=4 * math.pi / 3)
    times = []
    run(cfg, [lambda s: times.append(s.t)])
    k = np.arange(len(times))
    np.testing.assert_array_equal(np.array(times), k * cfg.sample_interval)
    period = cfg.flow.period
    assert period / cfg.sample_interval == pytest.approx(round(period / cfg.sample_interval), abs=1e-12)


def test_snapshot_stride_calls_observers():
    cfg = small(t_end=0.5, snapshot_stride=3)
    steps = []
    run(cfg, [lambda s: steps.append(s.step)])
    assert any(s % 3 == 0 and s > 0 for s in steps)


def test_run_deterministic():
    cfg = small(flow=FlowSpec(FlowKind.UNSTEADY, 2.0, 2.0), strain_enabled=True, d_M=0.2, t_end=1.0)
    a, b = run(cfg), run(cfg)
    assert a.field.values.tobytes() == b.field.values.tobytes()


def test_quenching_stalls_front():
    # 64^2 under-resolves the strain layer and the front leaks through; 128^2 stalls
    cfg = small(128, flow=FlowSpec(FlowKind.STEADY, 12.0), strain_enabled=True, d_M=0.2,
                t_end=4.0, sample_dt=0.5)
    hist = FrontHistory()
    run(cfg, [lambda s: hist.append(s.t, front_position(s.field))])
    late = hist.positions[hist.times >= 2.0]
    assert late.max() - late.min() < 0.5


@pytest.mark.parametrize("kw", [dict(cfl_number=0.0), dict(cfl_number=1.5), dict(t_end=0.0),
                                dict(s_L=-1.0), dict(d_M=-0.2), dict(scheme="eno"),
                                dict(sample_dt=0.0), dict(snapshot_stride=-1)])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        SolverConfig(grid=make_grid(8, 8), **kw)


def test_digest_tracks_config():
    a = small()
    assert a.digest() == small().digest()
    assert a.digest() != a.with_(cfl_number=0.4).digest()
    assert a.model == "inviscid" and a.with_(strain_enabled=True).model == "strain"
