"""Uniform periodic grid on [0, 2pi]^2 and affine-periodic scalar fields.

A G-field is stored through its periodic part ``u`` so that
``G(x, y) = x + u(x, y)``; the affine x-term is never materialised in the
stored array, which keeps ``G(x + 2pi, y) = G(x, y) + 2pi`` structural.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

TWO_PI = 2.0 * math.pi
MIN_NODES = 8
CHECKPOINT_TAG = "gfront-field"
CHECKPOINT_VERSION = "v1"


class GridError(ValueError):
    pass


@dataclass(frozen=True)
class Grid:
    n_x: int
    n_y: int

    def __post_init__(self):
        if self.n_x < MIN_NODES or self.n_y < MIN_NODES:
            raise GridError(
                f"grid {self.n_x}x{self.n_y} is below the WENO5 stencil minimum "
                f"of {MIN_NODES} nodes per direction"
            )

    @property
    def h_x(self) -> float:
        return TWO_PI / self.n_x

    @property
    def h_y(self) -> float:
        return TWO_PI / self.n_y

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_x, self.n_y)

    def x_nodes(self) -> np.ndarray:
        return np.arange(self.n_x) * self.h_x

    def y_nodes(self) -> np.ndarray:
        return np.arange(self.n_y) * self.h_y


def make_grid(n_x: int, n_y: int) -> Grid:
    return Grid(int(n_x), int(n_y))


@dataclass
class ScalarField2D:
    """Nodal field ``values[i, j]`` at ``(i*h_x, j*h_y)``, j the fast axis.

    ``x_shift_per_period`` is 2pi for G-fields (the total field is
    ``x + values``) and 0 for plain periodic fields.
    """

    grid: Grid
    values: np.ndarray = field(repr=False)
    x_shift_per_period: float = TWO_PI

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=np.float64)
        if self.values.shape != self.grid.shape:
            raise GridError(f"values shape {self.values.shape} does not match grid {self.grid.shape}")

    @classmethod
    def zeros(cls, grid: Grid, x_shift_per_period: float = TWO_PI) -> "ScalarField2D":
        return cls(grid, np.zeros(grid.shape), x_shift_per_period)

    @property
    def slope_x(self) -> float:
        """Mean x-slope of the total field (1 for G-fields, 0 for periodic ones)."""
        return self.x_shift_per_period / TWO_PI

    def copy(self) -> "ScalarField2D":
        return ScalarField2D(self.grid, self.values.copy(), self.x_shift_per_period)

    def total(self) -> np.ndarray:
        """Total field on the base cell, ``i*h_x*slope + values``."""
        x = self.grid.x_nodes() * self.slope_x
        return x[:, None] + self.values


def ghost_value(field: ScalarField2D, i: int, j: int) -> float:
    """Total field at a logical (possibly out-of-range) node."""
    n_x, n_y = field.grid.shape
    k, i0 = divmod(int(i), n_x)
    j0 = int(j) % n_y
    base = i0 * field.grid.h_x * field.slope_x + field.values[i0, j0]
    return float(base + k * field.x_shift_per_period)


def extend_to_strip(field: ScalarField2D, k_min: int, k_max: int) -> np.ndarray:
    """Total field on the strip [2pi k_min, 2pi (k_max+1)) x [0, 2pi).

    Returns an array of shape ``(n_x * (k_max - k_min + 1), n_y)``; row ``r``
    sits at ``x = 2pi k_min + r*h_x``.
    """
    if k_min > k_max:
        raise ValueError("k_min must not exceed k_max")
    base = field.total()
    copies = [base + k * field.x_shift_per_period for k in range(k_min, k_max + 1)]
    return np.concatenate(copies, axis=0)


def strip_x(grid: Grid, k_min: int, k_max: int) -> np.ndarray:
    """x-coordinates of the rows returned by :func:`extend_to_strip`."""
    x = grid.x_nodes()
    return np.concatenate([x + k * TWO_PI for k in range(k_min, k_max + 1)])


def write_checkpoint(field: ScalarField2D, path: str | Path, time: float = 0.0) -> None:
    n_x, n_y = field.grid.shape
    header = (
        f"{CHECKPOINT_TAG} {CHECKPOINT_VERSION} {n_x} {n_y} "
        f"{field.x_shift_per_period:.17g} {time:.17g}"
    )
    body = "\n".join(f"{v:.17g}" for v in field.values.ravel(order="C"))
    Path(path).write_text(header + "\n" + body + "\n")


def read_checkpoint(path: str | Path) -> tuple[ScalarField2D, float]:
    lines = Path(path).read_text().split("\n")
    parts = lines[0].split()
    if len(parts) != 6 or parts[0] != CHECKPOINT_TAG or parts[1] != CHECKPOINT_VERSION:
        raise ValueError(f"{path}: not a {CHECKPOINT_TAG} {CHECKPOINT_VERSION} checkpoint")
    n_x, n_y = int(parts[2]), int(parts[3])
    shift, time = float(parts[4]), float(parts[5])
    data = [float(s) for s in lines[1:] if s.strip()]
    if len(data) != n_x * n_y:
        raise ValueError(f"{path}: expected {n_x * n_y} values, found {len(data)}")
    values = np.array(data, dtype=np.float64).reshape(n_x, n_y)
    return ScalarField2D(make_grid(n_x, n_y), values, shift), time
