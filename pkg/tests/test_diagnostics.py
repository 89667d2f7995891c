import math

import numpy as np
import pytest

from gfront.diagnostics import (
    DiagnosticsError, FrontHistory, area_behind_front, burnt_area_fraction, detect_locking,
    estimate_speed, front_position, period_samples, speed_record, SpeedReport,
)
from gfront.grid import TWO_PI, ScalarField2D, make_grid

from conftest import field_from


def history(t, X, h_x=TWO_PI / 64):
    h = FrontHistory(metadata={"h_x": repr(h_x)})
    for a, b in zip(t, X):
        h.append(a, b)
    return h


def staircase(omega, N, M, periods, per_sample=8, x0=0.3):
    """Front that jumps 2pi*N once every M flow periods."""
    T = TWO_PI / omega
    t = np.arange(periods * per_sample + 1) * (T / per_sample)
    X = x0 + TWO_PI * N * np.floor(t / (M * T) + 1e-9)
    return t, X


# --- front position ----------------------------------------------------------

def test_front_planar_offset():
    f = field_from(32, lambda x, y: -1.3 + 0 * x + 0 * y)
    assert front_position(f) == pytest.approx(1.3, abs=1e-13)


def test_front_initial():
    assert front_position(ScalarField2D.zeros(make_grid(32, 32))) == 0.0


def test_front_far_downstream():
    f = field_from(32, lambda x, y: -40.0 + 0 * x + 0 * y)
    assert front_position(f) == pytest.approx(40.0, abs=1e-12)


@pytest.mark.parametrize("n", [64, 128])
def test_front_sinusoid(n):
    f = field_from(n, lambda x, y: 0.5 * np.sin(y) + 0 * x)
    assert front_position(f) == pytest.approx(0.5, abs=2 * (TWO_PI / n) ** 2)


def test_front_rejects_periodic_field():
    with pytest.raises(DiagnosticsError):
        front_position(ScalarField2D.zeros(make_grid(16, 16), 0.0))


def test_front_k_max_check():
    f = field_from(16, lambda x, y: -20.0 + 0 * x + 0 * y)
    with pytest.raises(DiagnosticsError):
        front_position(f, k_max=1)
    assert front_position(f, k_max=5) == pytest.approx(20.0, abs=1e-12)


# --- burnt area --------------------------------------------------------------

def test_area_fully_burnt():
    f = field_from(32, lambda x, y: -10.0 + 0 * x + 0 * y)
    assert burnt_area_fraction(f, (0.0, 9.0)) == 1.0


def test_area_unburnt():
    assert burnt_area_fraction(ScalarField2D.zeros(make_grid(32, 32)), (0.5, 6.0)) == 0.0


def test_area_half_split():
    n = 64
    f = field_from(n, lambda x, y: -20.0 + 0 * x + 0 * y)
    assert burnt_area_fraction(f, (15.0, 25.0)) == pytest.approx(0.5, abs=2.0 / (10 / (TWO_PI / n)))


def test_area_behind_planar_front():
    f = field_from(32, lambda x, y: -30.0 + 0 * x + 0 * y)
    assert area_behind_front(f) == 1.0


def test_area_empty_window():
    with pytest.raises(DiagnosticsError):
        burnt_area_fraction(ScalarField2D.zeros(make_grid(8, 8)), (1.0, 1.0))


# --- speed -------------------------------------------------------------------

def test_speed_planar():
    t = np.linspace(0, 10, 41)
    r = estimate_speed(history(t, t))
    assert r.s_T == pytest.approx(1.0, abs=1e-12)
    assert r.stderr < 1e-12 and not r.quenched


def test_speed_stalled():
    t = np.linspace(0, 10, 41)
    r = estimate_speed(history(t, np.full_like(t, 2.5)))
    assert r.s_T == pytest.approx(0.0, abs=1e-12) and r.quenched


def test_speed_staircase():
    t, X = staircase(2.0, 1, 1, 200)
    assert estimate_speed(history(t, X)).s_T == pytest.approx(2.0, rel=0.01)


def test_speed_needs_samples():
    with pytest.raises(DiagnosticsError):
        estimate_speed(history([0.0, 1.0], [0.0, 1.0]))


def test_speed_window_is_trailing():
    t = np.linspace(0, 10, 101)
    X = np.where(t < 5, 3 * t, 15 + t)
    r = estimate_speed(history(t, X), window_frac=0.5)
    assert r.s_T == pytest.approx(1.0, abs=1e-12)
    assert r.window == (5.0, 10.0)


def test_history_rejects_bad_samples():
    h = FrontHistory()
    h.append(0.0, 0.0)
    with pytest.raises(DiagnosticsError):
        h.append(0.0, 1.0)
    with pytest.raises(DiagnosticsError):
        h.append(1.0, math.nan)


def test_history_roundtrip(tmp_path):
    t, X = staircase(2.0, 1, 2, 10)
    h = history(t, X)
    h.flow_period = math.pi
    p = tmp_path / "h.csv"
    h.write(p)
    back = FrontHistory.read(p)
    assert back.samples == h.samples
    assert back.flow_period == math.pi and back.metadata["h_x"] == h.metadata["h_x"]


# --- locking -----------------------------------------------------------------

def test_locking_one_in_two():
    t, X = staircase(2.0, 1, 2, 80)
    assert detect_locking(history(t, X), 2.0) == (1, 2)


def test_locking_reduced():
    t, X = staircase(2.0, 2, 4, 160)
    assert detect_locking(history(t, X), 2.0) == (1, 2)


def test_locking_two_per_period():
    t, X = staircase(1.5, 2, 1, 60)
    assert detect_locking(history(t, X), 1.5) == (2, 1)


def test_locking_irrational_linear():
    omega = 2.0
    t = np.arange(0, 400 * 8 + 1) * (TWO_PI / omega / 8)
    assert detect_locking(history(t, math.sqrt(2) * t), omega) is None


def test_locking_with_jitter():
    t, X = staircase(2.0, 1, 1, 60)
    X = X + 0.01 * np.sin(7 * t)
    assert detect_locking(history(t, X), 2.0, tol=0.05) == (1, 1)


def test_locking_stalled_front_is_not_locked():
    t = np.arange(0, 60 * 8 + 1) * (math.pi / 8)
    assert detect_locking(history(t, np.full_like(t, 1.0)), 2.0) is None


def test_period_samples_needs_alignment():
    with pytest.raises(DiagnosticsError):
        period_samples(history([0.1, 0.2, 0.3], [0, 0, 0]), 1.0)


def test_locking_needs_tolerance():
    t, X = staircase(2.0, 1, 1, 20)
    h = FrontHistory()
    for a, b in zip(t, X):
        h.append(a, b)
    with pytest.raises(DiagnosticsError):
        detect_locking(h, 2.0)


# --- records -----------------------------------------------------------------

def test_speed_record_fields():
    rec = speed_record(4.0, 2.0, 0.0, "inviscid", SpeedReport(2.0, 1e-3, False, (1, 1)))
    assert rec == "4,2,0,inviscid,2,0.001,0,1,1"


def test_speed_record_steady_and_error():
    assert speed_record(1.0, None, 0.2, "strain", SpeedReport(0.5, 0.0, False)).split(",")[1] == ""
    assert "# error: boom" in speed_record(1.0, None, 0.2, "strain", None, "boom")


# --- invariants --------------------------------------------------------------

def _wavy(n=64):
    return field_from(n, lambda x, y: 0.4 * np.sin(y) * np.cos(x) - 0.3 * np.cos(2 * y) - 2.0)


def test_front_independent_of_copy_range():
    f = _wavy()
    base = front_position(f)
    for k in (2, 3, 7, 20):
        assert front_position(f, k_max=k) == base


@pytest.mark.parametrize("c", [0.25, 1.0, 13.0])
def test_front_translation_covariance(c):
    # x-independent periodic part: G is linear in x along every row
    f = field_from(64, lambda x, y: 0.4 * np.sin(y) - 0.3 * np.cos(2 * y) + 0 * x)
    g = ScalarField2D(f.grid, f.values - c)
    assert front_position(g) - front_position(f) == pytest.approx(c, abs=1e-12)


def test_front_shift_by_whole_cells():
    f = _wavy()
    g = ScalarField2D(f.grid, f.values - 3 * 2 * np.pi)
    assert front_position(g) - front_position(f) == pytest.approx(6 * np.pi, abs=1e-12)


def test_inviscid_front_never_recedes():
    from gfront.flow import FlowKind, FlowSpec
    from gfront.integrator import SolverConfig, run

    cfg = SolverConfig(grid=make_grid(48, 48), flow=FlowSpec(FlowKind.UNSTEADY, 3.0, 2.0),
                       t_end=6.0, sample_dt=0.05)
    X = []
    run(cfg, [lambda s: X.append(front_position(s.field))])
    assert np.diff(X).min() >= -cfg.grid.h_x
