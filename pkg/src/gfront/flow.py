"""Cellular flows and their exact Jacobians.

Steady:    V = A <cos y, cos x>
Unsteady:  V = A <cos y + sin y cos(wt), cos x + sin x cos(wt)>

Both flows have u = u(y, t) and v = v(x, t), so du/dx = dv/dy = 0 and only
the cross strain coefficient c is nonzero.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np


class FlowKind(str, enum.Enum):
    STEADY = "steady"
    UNSTEADY = "unsteady"


@dataclass(frozen=True)
class FlowSpec:
    kind: FlowKind = FlowKind.STEADY
    A: float = 0.0
    omega: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", FlowKind(self.kind))
        if not self.A >= 0.0:
            raise ValueError(f"flow intensity A must be >= 0, got {self.A}")
        if self.kind is FlowKind.UNSTEADY and not self.omega > 0.0:
            raise ValueError(f"omega must be > 0 for the unsteady flow, got {self.omega}")

    @property
    def period(self) -> float | None:
        if self.kind is FlowKind.UNSTEADY:
            return 2.0 * math.pi / self.omega
        return None


@dataclass(frozen=True)
class FlowSample:
    u: float
    v: float
    du_dx: float
    du_dy: float
    dv_dx: float
    dv_dy: float


@dataclass(frozen=True)
class StrainCoefficients:
    a: float
    b: float
    c: float


def _modulation(spec: FlowSpec, t):
    if spec.kind is FlowKind.UNSTEADY:
        return np.cos(spec.omega * t)
    return 0.0


def velocity_profiles(spec: FlowSpec, s, t):
    """Return ``(w, dw)`` where ``w(s) = A (cos s + sin s cos wt)``.

    ``u(y) = w(y)`` and ``v(x) = w(x)``; ``dw`` is the derivative in s, which
    gives du/dy and dv/dx.
    """
    m = _modulation(spec, t)
    cs, sn = np.cos(s), np.sin(s)
    return spec.A * (cs + sn * m), spec.A * (-sn + cs * m)


def sample_flow(spec: FlowSpec, x: float, y: float, t: float) -> FlowSample:
    u, du_dy = velocity_profiles(spec, y, t)
    v, dv_dx = velocity_profiles(spec, x, t)
    return FlowSample(float(u), float(v), 0.0, float(du_dy), float(dv_dx), 0.0)


def strain_coefficients(sample: FlowSample, d_M: float) -> StrainCoefficients:
    if d_M < 0:
        raise ValueError(f"d_M must be >= 0, got {d_M}")
    return StrainCoefficients(
        a=d_M * sample.du_dx,
        b=d_M * sample.dv_dy,
        c=d_M * (sample.du_dy + sample.dv_dx),
    )


def secant_form(A: float, omega: float, x, y, t, sign: int = -1):
    """Phase form A sec(theta) <cos(y + sign*theta), cos(x + sign*theta)>.

    theta = arctan(cos(wt)). With ``sign=-1`` this reproduces the direct
    unsteady formula; the printed ``+theta`` flips the sin-term sign.
    """
    theta = np.arctan(np.cos(omega * t))
    sec = 1.0 / np.cos(theta)
    return A * sec * np.cos(y + sign * theta), A * sec * np.cos(x + sign * theta)


def verify_secant_form(A: float, omega: float, samples: int, sign: int = -1, seed: int = 0) -> float:
    """Max componentwise gap between the direct and phase forms at random points."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    x, y = rng.uniform(0.0, 2.0 * math.pi, (2, samples))
    t = rng.uniform(0.0, 2.0 * math.pi / omega, samples)
    spec = FlowSpec(FlowKind.UNSTEADY, A, omega)
    u, _ = velocity_profiles(spec, y, t)
    v, _ = velocity_profiles(spec, x, t)
    us, vs = secant_form(A, omega, x, y, t, sign)
    return float(max(np.max(np.abs(u - us)), np.max(np.abs(v - vs))))
