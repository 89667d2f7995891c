"""Front position, turbulent flame speed, quenching and frequency locking."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .grid import TWO_PI, ScalarField2D

DEFAULT_WINDOW_FRAC = 0.5
DEFAULT_QUENCH_EPS = 0.01
DEFAULT_N_MAX = 16
DEFAULT_M_MAX = 16
ALIGN_RTOL = 1e-9
BEHIND_CELLS = (3, 4)


class DiagnosticsError(ValueError):
    pass


@dataclass
class FrontHistory:
    samples: list[tuple[float, float]] = field(default_factory=list)
    flow_period: float | None = None
    metadata: dict = field(default_factory=dict)

    def append(self, t: float, X: float) -> None:
        if self.samples and not t > self.samples[-1][0]:
            raise DiagnosticsError(f"sample times must increase: {t} after {self.samples[-1][0]}")
        if not math.isfinite(X):
            raise DiagnosticsError(f"non-finite front position at t={t}")
        self.samples.append((float(t), float(X)))

    @property
    def times(self) -> np.ndarray:
        return np.array([s[0] for s in self.samples])

    @property
    def positions(self) -> np.ndarray:
        return np.array([s[1] for s in self.samples])

    def write(self, path: str | Path) -> None:
        lines = [f"# {k}: {v}" for k, v in sorted(self.metadata.items())]
        if self.flow_period is not None:
            lines.append(f"# flow_period: {self.flow_period:.17g}")
        lines.append("t,X")
        lines += [f"{t:.17g},{x:.17g}" for t, x in self.samples]
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def read(cls, path: str | Path) -> "FrontHistory":
        hist = cls()
        for line in Path(path).read_text().splitlines():
            if line.startswith("#"):
                key, _, value = line[1:].partition(":")
                key, value = key.strip(), value.strip()
                if key == "flow_period":
                    hist.flow_period = float(value)
                else:
                    hist.metadata[key] = value
            elif line and line != "t,X":
                t, x = line.split(",")
                hist.append(float(t), float(x))
        return hist


@dataclass
class SpeedReport:
    s_T: float
    stderr: float
    quenched: bool
    locking: tuple[int, int] | None = None
    window: tuple[float, float] = (0.0, 0.0)


def _safe_k_max(G: np.ndarray, shift: float) -> int:
    return int(math.ceil(max(0.0, -float(G.min())) / shift)) + 1


def front_position(field: ScalarField2D, k_max: int | None = None) -> float:
    """Rightmost x where the total field crosses zero upward, over all rows.

    Crossings are located by linear interpolation between x-neighbours; the
    affine periodicity lets every node pair be tested against the highest
    copy in which its left end is still burnt.
    """
    shift = field.x_shift_per_period
    if not shift > 0:
        raise DiagnosticsError("front position needs an affine-periodic G-field (shift > 0)")
    h = field.grid.h_x
    G = field.total()
    if k_max is None:
        k_max = _safe_k_max(G, shift)
    elif (G + k_max * shift).min() <= 0.0:
        raise DiagnosticsError(f"copy k_max={k_max} is not fully unburnt")

    Ga = G
    Gb = np.concatenate([G[1:], G[:1] + shift], axis=0)
    # highest copy with Ga + shift*k < 0
    k = np.ceil(-Ga / shift) - 1.0
    k += (Ga + shift * (k + 1.0) < 0.0)
    k -= (Ga + shift * k >= 0.0)
    k = np.minimum(k, k_max)
    ga = Ga + shift * k
    gb = Gb + shift * k
    ok = (ga < 0.0) & (gb >= 0.0)
    if not ok.any():
        raise DiagnosticsError("no burnt region {G < 0} found")
    # interpolate back from the right end so a node sitting on G = 0 is exact
    x_next = np.append(field.grid.x_nodes()[1:], TWO_PI)
    xb = x_next[:, None] + TWO_PI * k
    with np.errstate(invalid="ignore", divide="ignore"):
        xc = xb - h * (gb / (gb - ga))
    return float(np.max(xc[ok]))


def burnt_area_fraction(field: ScalarField2D, x_window: tuple[float, float]) -> float:
    """Fraction of strip nodes with G < 0 inside [x_lo, x_hi] x [0, 2pi)."""
    lo, hi = x_window
    if not hi > lo:
        raise DiagnosticsError(f"empty window {x_window}")
    h = field.grid.h_x
    k_lo = int(math.floor(lo / TWO_PI)) - 1
    k_hi = int(math.floor(hi / TWO_PI)) + 1
    x0 = field.grid.x_nodes()
    G = field.total()
    burnt = total = 0
    for k in range(k_lo, k_hi + 1):
        x = x0 + TWO_PI * k
        sel = (x >= lo) & (x <= hi)
        if sel.any():
            g = G[sel] + k * field.x_shift_per_period
            burnt += int(np.count_nonzero(g < 0.0))
            total += g.size
    if total == 0:
        raise DiagnosticsError(f"window {x_window} contains no nodes (h_x={h})")
    return burnt / total


def area_behind_front(field: ScalarField2D, X: float | None = None,
                      cells: tuple[int, int] = BEHIND_CELLS) -> float:
    """Burnt fraction of the strip between ``cells[1]`` and ``cells[0]`` periods behind X.

    The default skips the three cells next to the front, where pockets of a
    completely burning flow are still being consumed.
    """
    if X is None:
        X = front_position(field)
    near, far = cells
    return burnt_area_fraction(field, (X - far * TWO_PI, X - near * TWO_PI))


def estimate_speed(history: FrontHistory, quench_eps: float = DEFAULT_QUENCH_EPS,
                   window_frac: float = DEFAULT_WINDOW_FRAC, min_samples: int = 10) -> SpeedReport:
    """Least-squares slope of X(t) over the trailing window."""
    t = history.times
    X = history.positions
    if t.size == 0:
        raise DiagnosticsError("empty history")
    t_hi = float(t[-1])
    t_lo = t_hi * (1.0 - window_frac)
    sel = t >= t_lo - 1e-12 * max(1.0, t_hi)
    if np.count_nonzero(sel) < min_samples:
        raise DiagnosticsError(
            f"{np.count_nonzero(sel)} samples in window [{t_lo}, {t_hi}]; need {min_samples}"
        )
    tw, Xw = t[sel], X[sel]
    slope, intercept = np.polyfit(tw, Xw, 1)
    resid = Xw - (slope * tw + intercept)
    span = float(tw[-1] - tw[0])
    stderr = float(np.sqrt(np.mean(resid ** 2)) / span) if span > 0 else math.inf
    displacement = float(Xw[-1] - Xw[0])
    quenched = bool(slope < quench_eps and displacement < TWO_PI)
    return SpeedReport(float(slope), stderr, quenched, None, (float(tw[0]), t_hi))


def _period_index(t: np.ndarray, period: float):
    r = t / period
    m = np.rint(r)
    aligned = np.abs(r - m) <= ALIGN_RTOL * np.maximum(1.0, np.abs(r))
    return m.astype(int), aligned


def period_samples(history: FrontHistory, omega: float) -> dict[int, float]:
    """Front positions at exact multiples of the flow period, keyed by period index."""
    period = TWO_PI / omega
    t = history.times
    m, aligned = _period_index(t, period)
    out = {int(k): float(x) for k, x, a in zip(m, history.positions, aligned) if a}
    if len(out) < 2:
        raise DiagnosticsError(
            f"history is not sampled at multiples of the flow period {period:.6g}"
        )
    return out


def detect_locking(history: FrontHistory, omega: float, N_max: int = DEFAULT_N_MAX,
                   M_max: int = DEFAULT_M_MAX, tol: float | None = None,
                   window_frac: float = DEFAULT_WINDOW_FRAC) -> tuple[int, int] | None:
    """Smallest M (then N) with X(t + M*T) - X(t) = 2pi*N on the trailing window.

    Each M is tried only while the trailing window spans at least 3*M flow
    periods. The pattern is returned in lowest terms.
    """
    if tol is None:
        h_x = history.metadata.get("h_x")
        if h_x is None:
            raise DiagnosticsError("tol not given and history carries no h_x")
        tol = 2.0 * float(h_x)
    by_period = period_samples(history, omega)
    m_end = max(by_period)
    m_lo = int(math.ceil(m_end * (1.0 - window_frac)))
    idx = list(range(m_lo, m_end + 1))
    missing = [m for m in idx if m not in by_period]
    if missing:
        raise DiagnosticsError(f"flow periods {missing[:5]} missing from the trailing window")
    Xp = np.array([by_period[m] for m in idx])
    span = m_end - m_lo
    for M in range(1, M_max + 1):
        if span < 3 * M:
            break
        d = Xp[M:] - Xp[:-M]
        N = int(round(float(np.mean(d)) / TWO_PI))
        if N < 1 or N > N_max:
            continue
        if np.all(np.abs(d - TWO_PI * N) <= tol):
            g = math.gcd(N, M)
            return (N // g, M // g)
    return None


def speed_record(A: float, omega: float | None, d_M: float, model: str, report: SpeedReport | None,
                 error: str | None = None) -> str:
    """One-line record ``A,omega,d_M,model,s_T,stderr,quenched,N,M``."""
    om = "" if omega is None else f"{omega:.17g}"
    head = f"{A:.17g},{om},{d_M:.17g},{model}"
    if report is None:
        return f"{head},,,,,,# error: {error}"
    N, M = report.locking if report.locking else ("", "")
    return (f"{head},{report.s_T:.17g},{report.stderr:.17g},"
            f"{'1' if report.quenched else '0'},{N},{M}")
