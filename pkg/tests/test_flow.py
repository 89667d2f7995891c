import math

import numpy as np
import pytest

from gfront.flow import (
    FlowKind, FlowSpec, sample_flow, secant_form, strain_coefficients, velocity_profiles,
    verify_secant_form,
)
from gfront.checks import jacobian_error


def test_steady_origin():
    s = sample_flow(FlowSpec(FlowKind.STEADY, 2.0), 0.0, 0.0, 0.0)
    assert (s.u, s.v, s.du_dy, s.dv_dx) == (2.0, 2.0, 0.0, 0.0)


def test_steady_hyperbolic_point():
    s = sample_flow(FlowSpec(FlowKind.STEADY, 1.0), math.pi / 2, math.pi / 2, 0.0)
    assert s.u == pytest.approx(0.0, abs=1e-15)
    assert s.v == pytest.approx(0.0, abs=1e-15)
    assert s.du_dy == -1.0 and s.dv_dx == -1.0


def test_unsteady_at_t0():
    s = sample_flow(FlowSpec(FlowKind.UNSTEADY, 1.0, 1.0), math.pi / 2, math.pi / 2, 0.0)
    assert s.u == pytest.approx(1.0, abs=1e-15)
    assert s.v == pytest.approx(1.0, abs=1e-15)


def test_separable_zero_diagonal(rng):
    spec = FlowSpec(FlowKind.UNSTEADY, 3.0, 2.0)
    for x, y, t in rng.uniform(0, 6, (20, 3)):
        s = sample_flow(spec, x, y, t)
        assert s.du_dx == 0.0 and s.dv_dy == 0.0


def test_divergence_free(rng):
    spec = FlowSpec(FlowKind.UNSTEADY, 2.5, 1.5)
    for x, y, t in rng.uniform(0, 6, (50, 3)):
        s = sample_flow(spec, x, y, t)
        assert s.du_dx + s.dv_dy == 0.0


def test_jacobian_matches_finite_differences():
    assert jacobian_error() <= 1e-8


def test_strain_at_hyperbolic_point():
    s = sample_flow(FlowSpec(FlowKind.STEADY, 1.0), math.pi / 2, math.pi / 2, 0.0)
    k = strain_coefficients(s, 0.2)
    assert k.a == 0.0 and k.b == 0.0
    assert k.c == pytest.approx(-0.4, abs=1e-15)


def test_strain_vanishes_without_diffusivity(rng):
    spec = FlowSpec(FlowKind.UNSTEADY, 2.0, 1.0)
    k = strain_coefficients(sample_flow(spec, *rng.uniform(0, 6, 3)), 0.0)
    assert (k.a, k.b, k.c) == (0.0, 0.0, 0.0)


def test_strain_zero_at_origin():
    k = strain_coefficients(sample_flow(FlowSpec(FlowKind.STEADY, 1.0), 0.0, 0.0, 0.0), 0.7)
    assert (k.a, k.b, k.c) == (0.0, 0.0, 0.0)


def test_negative_diffusivity_rejected():
    with pytest.raises(ValueError):
        strain_coefficients(sample_flow(FlowSpec(), 0, 0, 0), -0.1)


@pytest.mark.parametrize("bad", [dict(A=-1.0), dict(kind="unsteady", omega=0.0)])
def test_flow_validation(bad):
    with pytest.raises(ValueError):
        FlowSpec(**bad)


def test_period():
    assert FlowSpec(FlowKind.UNSTEADY, 1.0, 2.0).period == pytest.approx(math.pi)
    assert FlowSpec().period is None


def test_secant_form_theta_zero(rng):
    # cos(wt) = 0 -> theta = 0 and the phase form is the steady flow
    x, y = rng.uniform(0, 6, (2, 100))
    t = math.pi / 2
    us, vs = secant_form(1.3, 1.0, x, y, t)
    np.testing.assert_allclose(us, 1.3 * np.cos(y), atol=1e-15)
    np.testing.assert_allclose(vs, 1.3 * np.cos(x), atol=1e-15)


def test_secant_form_origin():
    us, vs = secant_form(1.0, 1.0, 0.0, 0.0, 0.0)
    assert us == pytest.approx(1.0, abs=1e-15) and vs == pytest.approx(1.0, abs=1e-15)


def test_secant_form_matched_convention():
    assert verify_secant_form(1.0, 1.0, 10**6) < 1e-12


def test_secant_form_printed_sign_disagrees():
    assert verify_secant_form(1.0, 1.0, 1000, sign=+1) > 0.1


def test_profiles_vectorised():
    spec = FlowSpec(FlowKind.UNSTEADY, 2.0, 3.0)
    s = np.linspace(0, 2 * math.pi, 7)
    w, dw = velocity_profiles(spec, s, 0.4)
    assert w.shape == dw.shape == s.shape
